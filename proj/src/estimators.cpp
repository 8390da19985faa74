#include "lisa/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>

#include "lisa/simd.hpp"
#include "lisa/stats.hpp"

namespace lisa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform kernels below this scale are summed term by term in value(): the
// prefix evaluation computes t*(sum w) - sum(lo*w), whose rounding error
// grows with the total weight and reaches order one once collapsed chains
// push spacings toward one ulp. Clamped per-kernel ramps never leave [0, 1].
constexpr double kNarrowScale = 1e-6;

std::vector<double> prefix_sums(const std::vector<std::pair<double, double>>& atoms) {
  std::vector<double> p(atoms.size() + 1, 0.0);
  for (std::size_t i = 0; i < atoms.size(); ++i)
    p[i + 1] = p[i] + atoms[i].second;
  return p;
}

// P(psi <= z) for the signed 1D displacement laws.
double psi_cdf(const DisplacementLaw& law, double z) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, UniformSymmetric>) {
          return std::clamp(0.5 * (z + 1.0), 0.0, 1.0);
        } else if constexpr (std::is_same_v<T, ScaledNormal>) {
          return stats::normal_cdf(z / v.a);
        } else if constexpr (std::is_same_v<T, PowerMixture>) {
          auto eta_cdf = [&](double x) {
            if (x <= 0) return 0.0;
            if (x < 1) return (1.0 - v.p) * std::pow(x, v.beta);
            return 1.0 - v.p * std::pow(x, -v.alpha);
          };
          if (z < 0) return 0.5 * (1.0 - eta_cdf(-z));
          return 0.5 + 0.5 * eta_cdf(z);
        } else if constexpr (std::is_same_v<T, DeterministicStep>) {
          if (z < -v.q) return 0.0;
          if (z < v.q) return 0.5;
          return 1.0;
        } else {
          throw std::invalid_argument("mixture: 1D displacement law required");
        }
      },
      law);
}

}  // namespace

double EmpiricalMeasure::cdf(double t) const {
  auto it = std::upper_bound(
      atoms.begin(), atoms.end(), t,
      [](double v, const std::pair<double, double>& a) { return v < a.first; });
  double s = 0.0;
  for (auto i = atoms.begin(); i != it; ++i) s += i->second;
  return s;
}

double EmpiricalMeasure::cdf_left(double t) const {
  auto it = std::lower_bound(
      atoms.begin(), atoms.end(), t,
      [](const std::pair<double, double>& a, double v) { return a.first < v; });
  double s = 0.0;
  for (auto i = atoms.begin(); i != it; ++i) s += i->second;
  return s;
}

CdfView EmpiricalMeasure::view() const {
  if (atoms.empty()) throw std::invalid_argument("measure: no atoms");
  CdfView v;
  auto atoms_copy = atoms;
  auto prefix = prefix_sums(atoms_copy);
  v.value = [atoms_copy, prefix](double t) {
    auto it = std::upper_bound(
        atoms_copy.begin(), atoms_copy.end(), t,
        [](double x, const std::pair<double, double>& a) { return x < a.first; });
    return prefix[static_cast<std::size_t>(it - atoms_copy.begin())];
  };
  v.left = [atoms_copy, prefix](double t) {
    auto it = std::lower_bound(
        atoms_copy.begin(), atoms_copy.end(), t,
        [](const std::pair<double, double>& a, double x) { return a.first < x; });
    return prefix[static_cast<std::size_t>(it - atoms_copy.begin())];
  };
  for (const auto& a : atoms) v.jump_points.push_back(a.first);
  v.lo = atoms.front().first;
  v.hi = atoms.back().first;
  v.smooth = false;
  return v;
}

EmpiricalMeasure empirical_measure(std::span<const double> points,
                                   bool normalize) {
  if (points.empty()) throw std::invalid_argument("measure: empty point set");
  EmpiricalMeasure m;
  double w = normalize ? 1.0 / static_cast<double>(points.size()) : 1.0;
  std::vector<double> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  for (double x : sorted) {
    if (!m.atoms.empty() && m.atoms.back().first == x)
      m.atoms.back().second += w;
    else
      m.atoms.emplace_back(x, w);
  }
  m.normalized = normalize;
  m.total = w * static_cast<double>(points.size());
  return m;
}

EmpiricalMeasure empirical_cdf(const ParticleConfig& config) {
  if (config.dimension() != 1)
    throw std::invalid_argument("empirical_cdf: 1D configurations only");
  return empirical_measure(config.index.column(0), true);
}

double ks_distance(const CdfView& F, const CdfView& G) {
  std::set<double> cands;
  for (const CdfView* v : {&F, &G}) {
    for (double t : v->jump_points) cands.insert(t);
    for (double t : v->critical_points) cands.insert(t);
  }
  double lo = std::min(F.lo, G.lo), hi = std::max(F.hi, G.hi);
  double span = std::max(hi - lo, 1e-12);
  cands.insert(lo - 0.01 * span);
  cands.insert(hi + 0.01 * span);
  if (F.smooth || G.smooth) {
    constexpr int kGrid = 2048;
    for (int i = 0; i <= kGrid; ++i)
      cands.insert(lo + span * static_cast<double>(i) / kGrid);
  }
  double d = 0.0;
  for (double t : cands) {
    d = std::max(d, std::fabs(F.value(t) - G.value(t)));
    d = std::max(d, std::fabs(F.left(t) - G.left(t)));
  }
  return d;
}

namespace {

double lp_search(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  std::size_t k = mu.atoms.size(), m = nu.atoms.size();
  if (k > 16 || m > 16)
    throw std::invalid_argument("lp_oracle: support exceeds 16 atoms");
  if (k == 0 || m == 0) throw std::invalid_argument("lp_oracle: empty measure");

  // One direction: every union A of src atoms must satisfy
  // src(A) <= dst(closed eps-enlargement of A) + eps.
  auto direction_ok = [](const EmpiricalMeasure& src,
                         const EmpiricalMeasure& dst, double eps) {
    std::size_t ns = src.atoms.size(), nd = dst.atoms.size();
    std::vector<uint32_t> reach(nd, 0);
    for (std::size_t j = 0; j < nd; ++j)
      for (std::size_t i = 0; i < ns; ++i)
        if (std::fabs(dst.atoms[j].first - src.atoms[i].first) <= eps)
          reach[j] |= uint32_t{1} << i;
    for (uint32_t a = 1; a < (uint32_t{1} << ns); ++a) {
      double src_mass = 0.0;
      for (std::size_t i = 0; i < ns; ++i)
        if (a & (uint32_t{1} << i)) src_mass += src.atoms[i].second;
      double dst_mass = 0.0;
      for (std::size_t j = 0; j < nd; ++j)
        if (a & reach[j]) dst_mass += dst.atoms[j].second;
      if (src_mass > dst_mass + eps + 1e-12) return false;
    }
    return true;
  };
  auto ok = [&](double eps) {
    return direction_ok(mu, nu, eps) && direction_ok(nu, mu, eps);
  };

  if (ok(0.0)) return 0.0;
  double span = std::max(mu.atoms.back().first, nu.atoms.back().first) -
                std::min(mu.atoms.front().first, nu.atoms.front().first);
  double hi = span + std::fabs(mu.total - nu.total) + 1.0;
  double lo = 0.0;
  while (hi - lo > 1e-9) {
    double mid = 0.5 * (lo + hi);
    if (ok(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace

double lp_oracle(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (std::fabs(mu.total - nu.total) > 1e-9)
    throw std::invalid_argument("lp_oracle: measures must carry equal total mass; use lp_oracle_general to compare normalization candidates");
  return lp_search(mu, nu);
}

double lp_oracle_general(const EmpiricalMeasure& mu,
                         const EmpiricalMeasure& nu) {
  return lp_search(mu, nu);
}

double lp_consecutive_formula(uint64_t n, double dstar) {
  if (n < 1) throw std::invalid_argument("lp_consecutive_formula: n < 1");
  if (dstar < 0) throw std::invalid_argument("lp_consecutive_formula: dstar < 0");
  double nn = static_cast<double>(n);
  return std::min(1.0 / nn, std::max(1.0 / (nn * nn), dstar));
}

IntervalPartition::IntervalPartition(std::vector<double> points)
    : base(std::move(points)) {
  if (base.empty()) throw std::invalid_argument("partition: empty base");
  std::sort(base.begin(), base.end());
  for (std::size_t i = 1; i < base.size(); ++i)
    if (base[i] == base[i - 1])
      throw std::invalid_argument("partition: coincident base points");
}

int IntervalPartition::interval_of(double x) const {
  return static_cast<int>(std::upper_bound(base.begin(), base.end(), x) -
                          base.begin());
}

std::pair<double, double> interval_beta_parameters(int a,
                                                  const std::vector<int>& F) {
  if (a < 1) throw std::invalid_argument("interval law: base size < 1");
  std::set<int> fs(F.begin(), F.end());
  if (fs.size() != F.size())
    throw std::invalid_argument("interval law: duplicate interval index");
  if (fs.empty() || static_cast<int>(fs.size()) == a + 1)
    throw std::invalid_argument("interval law: F must be a nonempty proper subset");
  for (int j : fs)
    if (j < 0 || j > a)
      throw std::invalid_argument("interval law: interval index out of range");
  double b = static_cast<double>(fs.size());
  double b_hat = b - 0.5 * (fs.count(0) + fs.count(a));
  double second = static_cast<double>(a) - b_hat;
  if (!(b_hat > 0) || !(second > 0))
    throw std::invalid_argument("interval law: degenerate Beta parameters");
  return {b_hat, second};
}

std::vector<double> interval_mass_estimate(const IntervalPartition& base,
                                           const std::vector<int>& F,
                                           uint64_t steps, uint64_t replicas,
                                           uint64_t seed) {
  int a = static_cast<int>(base.base.size());
  interval_beta_parameters(a, F);  // validates F
  std::vector<char> in_f(static_cast<std::size_t>(a) + 1, 0);
  for (int j : F) in_f[static_cast<std::size_t>(j)] = 1;

  ModelSpec spec;
  spec.variant = CloseUniformModel{};
  for (double x : base.base) spec.initial.push_back({x});

  std::vector<double> masses;
  masses.reserve(replicas);
  for (uint64_t r = 0; r < replicas; ++r) {
    RunOptions opt;
    opt.steps = steps;
    opt.seed = seed;
    opt.replica = r;
    Trace tr = run(spec, opt);
    auto xs = tr.config.index.column(0);
    uint64_t count = 0;
    for (double x : xs)
      if (in_f[static_cast<std::size_t>(base.interval_of(x))]) ++count;
    masses.push_back(static_cast<double>(count) /
                     static_cast<double>(xs.size()));
  }
  return masses;
}

double local_dimension(const ParticleConfig& config, int probes,
                       std::span<const double> radii, uint64_t seed) {
  if (config.dimension() != 1)
    throw std::invalid_argument("local_dimension: 1D configurations only");
  if (probes < 1) throw std::invalid_argument("local_dimension: probes < 1");
  std::size_t n = config.size();
  if (n < 2) throw std::invalid_argument("local_dimension: configuration too small");
  RandomStream rng(seed);
  double total_n = static_cast<double>(n);
  double slope_sum = 0.0;
  for (int p = 0; p < probes; ++p) {
    uint64_t id = rng.index(n) + 1;
    double x = config.index.coordinate(id, 0);
    std::vector<double> lr, lm;
    for (double r : radii) {
      uint64_t cnt =
          config.index.count_within(std::span<const double>(&x, 1), r);
      if (cnt == 0) continue;
      lr.push_back(std::log(r));
      lm.push_back(std::log(static_cast<double>(cnt) / total_n));
    }
    if (lr.size() < 3)
      throw std::runtime_error("local_dimension: fewer than 3 usable radii");
    slope_sum += stats::linear_fit(lr, lm).slope;
  }
  return slope_sum / static_cast<double>(probes);
}

MixtureCdf::MixtureCdf(const ParticleConfig& config, DisplacementLaw law)
    : law_(std::move(law)) {
  if (config.dimension() != 1)
    throw std::invalid_argument("mixture: 1D configurations only");
  std::size_t n = config.size();
  if (n < 2) throw std::invalid_argument("mixture: need >= 2 particles");
  uniform_ = std::holds_alternative<UniformSymmetric>(law_);
  std::vector<std::pair<double, double>> narrow, wide;  // (center, scale)
  for (uint64_t id = 1; id <= n; ++id) {
    double d = config.index.nearest_excl(id);
    double c = config.index.coordinate(id, 0);
    // deep chains shrink spacings to and below one ulp: a child lands bitwise
    // on its parent (d = 0), or d goes denormal and the weight overflows;
    // the support is unresolvable either way and the exact one-step law is
    // the point mass
    if (!std::isfinite(1.0 / (2.0 * d))) {
      atoms_.push_back(c);
      continue;
    }
    (d < kNarrowScale ? narrow : wide).emplace_back(c, d);
  }
  std::sort(atoms_.begin(), atoms_.end());
  narrow_ = narrow.size();
  centers_.reserve(narrow.size() + wide.size());
  scales_.reserve(narrow.size() + wide.size());
  for (const auto& [c, d] : narrow) {
    centers_.push_back(c);
    scales_.push_back(d);
  }
  for (const auto& [c, d] : wide) {
    centers_.push_back(c);
    scales_.push_back(d);
  }
  const std::size_t m = centers_.size();
  if (uniform_) {
    lo_raw_.resize(m);
    w_raw_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      lo_raw_[i] = centers_[i] - scales_[i];
      w_raw_[i] = 1.0 / (2.0 * scales_[i]);
    }
    struct Piece {
      double lo, hi, w;
    };
    std::vector<Piece> pieces(m - narrow_);
    for (std::size_t i = narrow_; i < m; ++i)
      pieces[i - narrow_] = {lo_raw_[i], centers_[i] + scales_[i], w_raw_[i]};
    const std::size_t k = pieces.size();
    auto fill = [&](auto key, std::vector<double>& sorted,
                    std::vector<double>& w_pre, std::vector<double>& lw_pre) {
      std::sort(pieces.begin(), pieces.end(),
                [&](const Piece& a, const Piece& b) { return key(a) < key(b); });
      sorted.resize(k);
      w_pre.assign(k + 1, 0.0);
      lw_pre.assign(k + 1, 0.0);
      for (std::size_t i = 0; i < k; ++i) {
        sorted[i] = key(pieces[i]);
        w_pre[i + 1] = w_pre[i] + pieces[i].w;
        lw_pre[i + 1] = lw_pre[i] + pieces[i].lo * pieces[i].w;
      }
    };
    fill([](const Piece& p) { return p.lo; }, lo_sorted_, lo_w_prefix_,
         lo_lw_prefix_);
    fill([](const Piece& p) { return p.hi; }, hi_sorted_, hi_w_prefix_,
         hi_lw_prefix_);
  }
}

double MixtureCdf::value(double t) const {
  double n = static_cast<double>(components());
  double s = static_cast<double>(
      std::upper_bound(atoms_.begin(), atoms_.end(), t) - atoms_.begin());
  if (uniform_) {
    s += simd::ramp_mixture_sum(lo_raw_.data(), w_raw_.data(), narrow_, t);
    std::size_t done = static_cast<std::size_t>(
        std::upper_bound(hi_sorted_.begin(), hi_sorted_.end(), t) -
        hi_sorted_.begin());
    std::size_t started = static_cast<std::size_t>(
        std::lower_bound(lo_sorted_.begin(), lo_sorted_.end(), t) -
        lo_sorted_.begin());
    double partial = t * (lo_w_prefix_[started] - hi_w_prefix_[done]) -
                     (lo_lw_prefix_[started] - hi_lw_prefix_[done]);
    return (s + static_cast<double>(done) + partial) / n;
  }
  for (std::size_t i = 0; i < centers_.size(); ++i)
    s += psi_cdf(law_, (t - centers_[i]) / scales_[i]);
  return s / n;
}

double MixtureCdf::value_kernel(double t) const {
  if (!uniform_)
    throw std::runtime_error("mixture: kernel evaluation is uniform-law only");
  double s = static_cast<double>(
      std::upper_bound(atoms_.begin(), atoms_.end(), t) - atoms_.begin());
  return (simd::ramp_mixture_sum(lo_raw_.data(), w_raw_.data(),
                                 lo_raw_.size(), t) +
          s) /
         static_cast<double>(components());
}

CdfView MixtureCdf::view() const {
  CdfView v;
  auto self = *this;
  v.value = [self](double t) { return self.value(t); };
  if (atoms_.empty()) {
    v.left = v.value;  // continuous mixture
  } else {
    const double n = static_cast<double>(components());
    v.left = [self, n](double t) {
      const auto eq =
          std::upper_bound(self.atoms_.begin(), self.atoms_.end(), t) -
          std::lower_bound(self.atoms_.begin(), self.atoms_.end(), t);
      return self.value(t) - static_cast<double>(eq) / n;
    };
    v.jump_points = atoms_;
  }
  double lo = kInf, hi = -kInf;
  if (!atoms_.empty()) {
    lo = atoms_.front();
    hi = atoms_.back();
  }
  if (uniform_) {
    v.critical_points = lo_sorted_;
    v.critical_points.insert(v.critical_points.end(), hi_sorted_.begin(),
                             hi_sorted_.end());
    for (std::size_t i = 0; i < narrow_; ++i) {
      const double a = centers_[i] - scales_[i];
      const double b = centers_[i] + scales_[i];
      v.critical_points.push_back(a);
      v.critical_points.push_back(b);
      lo = std::min(lo, a);
      hi = std::max(hi, b);
    }
    if (!lo_sorted_.empty()) {
      lo = std::min(lo, lo_sorted_.front());
      hi = std::max(hi, hi_sorted_.back());
    }
    v.smooth = false;
  } else {
    double smax = 0.0;
    for (std::size_t i = 0; i < centers_.size(); ++i) {
      lo = std::min(lo, centers_[i] - 8.0 * scales_[i]);
      hi = std::max(hi, centers_[i] + 8.0 * scales_[i]);
      smax = std::max(smax, scales_[i]);
    }
    v.critical_points = centers_;
    v.smooth = smax > 0.0;
  }
  v.lo = lo;
  v.hi = hi;
  return v;
}

}  // namespace lisa
