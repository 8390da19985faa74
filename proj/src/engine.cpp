#include "lisa/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lisa {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr int kCsaAttemptBudget = 10000;

void validate_box(const Box& box) {
  if (box.lo.empty() || box.lo.size() != box.hi.size())
    throw std::invalid_argument("model: malformed window box");
  for (std::size_t a = 0; a < box.lo.size(); ++a)
    if (!(box.lo[a] < box.hi[a]))
      throw std::invalid_argument("model: window box has empty extent");
}

bool in_box(const Box& box, std::span<const double> x) {
  for (std::size_t a = 0; a < box.lo.size(); ++a)
    if (x[a] < box.lo[a] || x[a] > box.hi[a]) return false;
  return true;
}

double csa_weight(const AdsorptionModel& m, uint64_t k) {
  std::size_t i = std::min<std::size_t>(k, m.weights.size() - 1);
  return m.weights[i];
}

double csa_envelope(const AdsorptionModel& m, uint64_t n) {
  double env = 0.0;
  for (std::size_t i = 0; i < m.weights.size() && i <= n; ++i)
    env = std::max(env, m.weights[i]);
  return env;
}

}  // namespace

int model_dimension(const ModelVariant& variant) {
  struct Visitor {
    int operator()(const RightUniformModel&) { return 1; }
    int operator()(const CloseUniformModel&) { return 1; }
    int operator()(const CloseNormalModel&) { return 1; }
    int operator()(const DisplacementModel& m) { return law_dimension(m.law); }
    int operator()(const UrnCopyModel& m) { return m.window.dimension(); }
    int operator()(const AdsorptionModel& m) { return m.window.dimension(); }
  };
  return std::visit(Visitor{}, variant);
}

std::vector<std::vector<double>> default_initial(const ModelVariant& variant) {
  int d = model_dimension(variant);
  struct Visitor {
    int d;
    std::vector<std::vector<double>> operator()(const RightUniformModel&) {
      return {{0.0}};
    }
    std::vector<std::vector<double>> operator()(const CloseUniformModel&) {
      return {{0.0}, {1.0}};
    }
    std::vector<std::vector<double>> operator()(const CloseNormalModel&) {
      return {{0.0}, {1.0}};
    }
    std::vector<std::vector<double>> operator()(const DisplacementModel&) {
      std::vector<double> a(d, 0.0), b(d, 0.0);
      b[0] = 1.0;
      return {a, b};
    }
    std::vector<std::vector<double>> operator()(const UrnCopyModel& m) {
      std::vector<double> c(d);
      for (int a = 0; a < d; ++a) c[a] = 0.5 * (m.window.lo[a] + m.window.hi[a]);
      return {c};
    }
    std::vector<std::vector<double>> operator()(const AdsorptionModel& m) {
      std::vector<double> c(d);
      for (int a = 0; a < d; ++a) c[a] = 0.5 * (m.window.lo[a] + m.window.hi[a]);
      return {c};
    }
  };
  return std::visit(Visitor{d}, variant);
}

const char* model_name(const ModelVariant& variant) {
  struct Visitor {
    const char* operator()(const RightUniformModel&) { return "right-uniform"; }
    const char* operator()(const CloseUniformModel&) { return "close-uniform"; }
    const char* operator()(const CloseNormalModel&) { return "close-normal"; }
    const char* operator()(const DisplacementModel&) { return "displacement"; }
    const char* operator()(const UrnCopyModel&) { return "urn-copy"; }
    const char* operator()(const AdsorptionModel&) { return "adsorption"; }
  };
  return std::visit(Visitor{}, variant);
}

void validate_model(const ModelSpec& spec) {
  int d = model_dimension(spec.variant);
  const auto initial =
      spec.initial.empty() ? default_initial(spec.variant) : spec.initial;
  for (const auto& p : initial) {
    if (p.size() != static_cast<std::size_t>(d))
      throw std::invalid_argument("model: initial point dimension mismatch");
    for (double c : p)
      if (!std::isfinite(c))
        throw std::invalid_argument("model: non-finite initial coordinate");
  }
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, RightUniformModel>) {
          if (initial.empty())
            throw std::invalid_argument("model: right-uniform needs >= 1 initial point");
          for (const auto& p : initial)
            if (p[0] < 0.0 || p[0] > 1.0)
              throw std::invalid_argument("model: right-uniform initial points must lie in [0,1]");
        } else if constexpr (std::is_same_v<T, CloseUniformModel> ||
                             std::is_same_v<T, CloseNormalModel> ||
                             std::is_same_v<T, DisplacementModel>) {
          if (initial.size() < 2)
            throw std::invalid_argument("model: displacement rules need >= 2 initial points");
          if constexpr (std::is_same_v<T, CloseNormalModel>) {
            if (!(m.a > 0)) throw std::invalid_argument("model: close-normal scale a <= 0");
          }
          if constexpr (std::is_same_v<T, DisplacementModel>) {
            validate_law(m.law);
            eta_moment(m.law, 1.0);  // finite C required
          }
        } else if constexpr (std::is_same_v<T, UrnCopyModel>) {
          validate_box(m.window);
          if (initial.empty())
            throw std::invalid_argument("model: urn-copy needs >= 1 initial point");
          for (const auto& p : initial)
            if (!in_box(m.window, p))
              throw std::invalid_argument("model: urn-copy initial points must lie in the window");
        } else if constexpr (std::is_same_v<T, AdsorptionModel>) {
          validate_box(m.window);
          if (!(m.radius > 0))
            throw std::invalid_argument("model: adsorption radius <= 0");
          if (m.weights.empty())
            throw std::invalid_argument("model: adsorption needs weights");
          for (double w : m.weights)
            if (!(w > 0))
              throw std::invalid_argument("model: adsorption weights must be positive");
          if (initial.empty())
            throw std::invalid_argument("model: adsorption needs >= 1 initial point");
          for (const auto& p : initial)
            if (!in_box(m.window, p))
              throw std::invalid_argument("model: adsorption initial points must lie in the window");
        }
      },
      spec.variant);
}

ParticleConfig::ParticleConfig(int dimension, NeighborIndex::Backend backend,
                               bool track_spacing)
    : index(dimension, backend, track_spacing),
      min1d(std::numeric_limits<double>::infinity()),
      max1d(-std::numeric_limits<double>::infinity()) {}

uint64_t ParticleConfig::insert(std::span<const double> x,
                                std::optional<uint64_t> parent) {
  uint64_t id = index.insert(x);
  parents.push_back(parent);
  if (index.dimension() == 1) {
    min1d = std::min(min1d, x[0]);
    max1d = std::max(max1d, x[0]);
  }
  return id;
}

StepRecord step(ParticleConfig& config, const ModelVariant& model,
                RandomStream& rng, unsigned recorders,
                const StepOverride* injected) {
  uint64_t n = config.size();
  if (n == 0) throw std::invalid_argument("step: empty configuration");
  int dim = config.dimension();

  uint64_t chi = injected && injected->chi ? *injected->chi : rng.index(n) + 1;
  if (chi == 0 || chi > n) throw std::out_of_range("step: injected parent out of range");

  StepRecord rec{};
  rec.n = n;
  rec.chi = chi;
  rec.d = 0.0;
  rec.dstar = kNan;
  rec.eta = kNan;
  rec.x_new = {kNan, kNan, kNan};

  double xc[3];
  config.index.point(chi, std::span<double>(xc, dim));
  double x_new[3] = {0, 0, 0};

  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, RightUniformModel>) {
          auto gap = config.index.successor_gap(chi);
          double span = gap ? *gap : 1.0 - xc[0];
          double u = injected && injected->u ? *injected->u : rng.uniform01();
          x_new[0] = xc[0] + u * span;
          if (n >= 2) rec.d = config.index.nearest_excl(chi);
        } else if constexpr (std::is_same_v<T, CloseUniformModel> ||
                             std::is_same_v<T, CloseNormalModel> ||
                             std::is_same_v<T, DisplacementModel>) {
          double d = config.index.nearest_excl(chi);
          rec.d = d;
          double psi[3] = {0, 0, 0};
          if (injected && injected->psi) {
            if (injected->psi->size() != static_cast<std::size_t>(dim))
              throw std::invalid_argument("step: injected psi dimension mismatch");
            std::copy(injected->psi->begin(), injected->psi->end(), psi);
          } else if constexpr (std::is_same_v<T, CloseUniformModel>) {
            psi[0] = rng.uniform(-1.0, 1.0);
          } else if constexpr (std::is_same_v<T, CloseNormalModel>) {
            psi[0] = m.a * rng.normal();
          } else {
            sample_psi(m.law, rng, std::span<double>(psi, dim));
          }
          double norm_sq = 0.0;
          for (int a = 0; a < dim; ++a) {
            x_new[a] = xc[a] + d * psi[a];
            norm_sq += psi[a] * psi[a];
          }
          if (recorders & kRecordEta) rec.eta = std::sqrt(norm_sq);
        } else if constexpr (std::is_same_v<T, UrnCopyModel>) {
          bool fresh;
          if (injected && injected->fresh) {
            fresh = *injected->fresh;
          } else {
            fresh = rng.uniform01() < 1.0 / static_cast<double>(n);
          }
          if (!fresh) {
            for (int a = 0; a < dim; ++a) x_new[a] = xc[a];
          } else if (injected && injected->draw) {
            std::copy(injected->draw->begin(), injected->draw->end(), x_new);
          } else {
            for (int a = 0; a < dim; ++a)
              x_new[a] = rng.uniform(m.window.lo[a], m.window.hi[a]);
          }
        } else if constexpr (std::is_same_v<T, AdsorptionModel>) {
          if (injected && injected->draw) {
            std::copy(injected->draw->begin(), injected->draw->end(), x_new);
          } else {
            double env = csa_envelope(m, n);
            bool accepted = false;
            for (int attempt = 0; attempt < kCsaAttemptBudget; ++attempt) {
              double cand[3];
              for (int a = 0; a < dim; ++a)
                cand[a] = rng.uniform(m.window.lo[a], m.window.hi[a]);
              uint64_t k = config.index.count_within(
                  std::span<const double>(cand, dim), m.radius);
              double u = rng.uniform01();
              if (u * env <= csa_weight(m, k)) {
                std::copy(cand, cand + dim, x_new);
                accepted = true;
                break;
              }
            }
            if (!accepted)
              throw std::runtime_error("step: adsorption rejection sampling exhausted its attempt budget");
          }
        }
      },
      model);

  config.insert(std::span<const double>(x_new, dim), chi);
  for (int a = 0; a < dim; ++a) rec.x_new[a] = x_new[a];
  if (dim == 1) {
    rec.m = config.min1d;
    rec.M = config.max1d;
  } else {
    rec.m = kNan;
    rec.M = kNan;
  }
  if (recorders & kRecordDstar) rec.dstar = config.index.max_spacing();
  return rec;
}

Trace run(const ModelSpec& spec, const RunOptions& options) {
  validate_model(spec);
  int dim = model_dimension(spec.variant);
  NeighborIndex::Backend backend =
      options.backend ? *options.backend : NeighborIndex::default_backend(dim);
  if (std::holds_alternative<RightUniformModel>(spec.variant) &&
      backend != NeighborIndex::Backend::sorted1d)
    throw std::invalid_argument("run: right-uniform requires the sorted1d backend");
  bool track = (options.recorders & kRecordDstar) != 0;

  Trace trace{spec,
              options.seed,
              options.replica,
              options.steps,
              0.0,
              0.0,
              {},
              ParticleConfig(dim, backend, track)};
  const auto initial =
      spec.initial.empty() ? default_initial(spec.variant) : spec.initial;
  for (const auto& p : initial) trace.config.insert(p, std::nullopt);
  trace.initial_min = trace.config.min1d;
  trace.initial_max = trace.config.max1d;

  RandomStream rng(options.seed, options.replica);
  if (options.recorders & kKeepRecords) trace.records.reserve(options.steps);
  for (uint64_t s = 0; s < options.steps; ++s) {
    StepRecord rec = step(trace.config, spec.variant, rng, options.recorders);
    if (options.on_step) options.on_step(rec);
    if (options.recorders & kKeepRecords) trace.records.push_back(rec);
  }
  return trace;
}

std::vector<std::pair<uint64_t, double>> embedded_maxima(const Trace& trace) {
  if (trace.steps > 0 && trace.records.empty())
    throw std::runtime_error("embedded_maxima: trace was run without records");
  if (trace.config.dimension() != 1)
    throw std::runtime_error("embedded_maxima: 1D traces only");
  std::vector<std::pair<uint64_t, double>> jumps;
  double prev = trace.initial_max;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    double v = trace.records[i].M;
    if (v > prev) {
      jumps.emplace_back(i + 1, v);
      prev = v;
    }
  }
  return jumps;
}

}  // namespace lisa
