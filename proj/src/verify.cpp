#include "lisa/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "lisa/ctime.hpp"
#include "lisa/distributions.hpp"
#include "lisa/engine.hpp"
#include "lisa/estimators.hpp"
#include "lisa/io.hpp"
#include "lisa/stats.hpp"
#include "lisa/theory.hpp"

namespace lisa::verify {

Budget parse_budget(std::string_view name) {
  if (name == "smoke") return Budget::smoke;
  if (name == "desk") return Budget::desk;
  if (name == "full") return Budget::full;
  throw std::invalid_argument("unknown budget '" + std::string(name) +
                              "' (expected smoke, desk or full)");
}

const char* budget_name(Budget budget) {
  switch (budget) {
    case Budget::smoke: return "smoke";
    case Budget::desk: return "desk";
    case Budget::full: return "full";
  }
  return "?";
}

void parallel_for(uint64_t count, int threads,
                  const std::function<void(uint64_t)>& work) {
  const int width = std::max(
      1, std::min<int>(threads, static_cast<int>(std::min<uint64_t>(
                                    count, 1024))));
  if (width == 1) {
    for (uint64_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<uint64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&] {
    while (true) {
      const uint64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        work(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(width));
  for (int t = 0; t < width; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

int default_threads() {
  if (const char* env = std::getenv("LISA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1 && v <= 256) return static_cast<int>(v);
    throw std::invalid_argument("LISA_THREADS must be an integer in [1,256]");
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

using stats::KsResult;

void stat(ClaimReport& r, std::string name, double value) {
  r.stats.emplace_back(std::move(name), value);
}

void gate(ClaimReport& r, bool ok, const std::string& description) {
  if (!ok) {
    r.pass = false;
    r.notes.push_back("FAIL: " + description);
  }
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  const double mx = stats::mean(xs), my = stats::mean(ys);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

EmpiricalMeasure scaled_measure(std::span<const double> points,
                                double weight) {
  EmpiricalMeasure m = empirical_measure(points, false);
  for (auto& atom : m.atoms) atom.second *= weight;
  m.total *= weight;
  return m;
}

double uniform01_cdf(double t) { return std::clamp(t, 0.0, 1.0); }

// ---------------------------------------------------------------- claims --

void claim_sigma_uniform(ClaimReport& r, const VerifyOptions&) {
  const auto sigma = sigma_exponent(UniformSymmetric{});
  const double target = 3.0 - 2.0 * std::sqrt(2.0);
  if (!sigma) {
    gate(r, false, "growth exponent reported absent for the uniform law");
    return;
  }
  stat(r, "sigma", *sigma);
  stat(r, "target", target);
  stat(r, "abs_error", std::fabs(*sigma - target));
  gate(r, std::fabs(*sigma - target) < 1e-6,
       "sigma differs from 3 - 2*sqrt(2) by more than 1e-6");
}

void claim_thresholds(ClaimReport& r, const VerifyOptions& o) {
  // Deterministic criterion, bisection on the library moments.
  const auto ms = boundedness_threshold(ThresholdCriterion::moment_sum);
  stat(r, "moment_sum_root", ms.root);

  // Independent oracle: closed-form first moments of the clipped scaled
  // normal through erfc, dense grid, sign change.
  auto f = [](double a) {
    const double c = std::sqrt(2.0 / M_PI);
    return a * c * (2.0 - std::exp(-1.0 / (2.0 * a * a))) +
           std::erfc(1.0 / (a * std::sqrt(2.0))) - 1.0;
  };
  double oracle = 0.0;
  for (double a = 0.55; a < 0.75; a += 1e-5) {
    if (f(a) <= 0.0 && f(a + 1e-5) > 0.0) {
      oracle = a + 0.5e-5;
      break;
    }
  }
  stat(r, "moment_sum_oracle", oracle);
  stat(r, "moment_sum_abs_diff", std::fabs(ms.root - oracle));
  gate(r, oracle > 0.0, "dense-grid oracle found no sign change");
  gate(r, std::fabs(ms.root - oracle) <= 1e-4,
       "moment-sum root differs from the dense-grid oracle by more than 1e-4");

  uint64_t replicas = 1000000;
  if (o.budget == Budget::smoke) replicas = 20000;
  if (o.budget == Budget::full) replicas = 2000000;
  const auto mf =
      boundedness_threshold(ThresholdCriterion::max_functional, replicas,
                            o.seed);
  stat(r, "max_functional_root", mf.root);
  stat(r, "max_functional_root_halfwidth", mf.uncertainty);
  stat(r, "eh_at_root", mf.value_at_root);
  stat(r, "eh_se", mf.se_at_root);

  // Direct estimate at the published critical scale, same replica seeds.
  {
    const DisplacementLaw law = ScaledNormal{0.8239};
    double sum = 0.0;
    for (uint64_t rep = 0; rep < replicas; ++rep) {
      RandomStream rng(o.seed, rep);
      sum += sample_H(law, rng);
    }
    stat(r, "eh_at_published_scale", sum / static_cast<double>(replicas));
  }
  stat(r, "published_scale", 0.8239);
  gate(r, std::fabs(mf.root - 0.8239) <= 0.02,
       "max-functional root is not within 0.02 of the published 0.8239");
  if (std::fabs(mf.root - 0.8239) > 0.02)
    r.notes.push_back(
        "the mean of the sampled maximal functional crosses 1 near " +
        io::format_double(mf.root) +
        "; at scale 0.8239 it is well below 1, and the deterministic "
        "moment-sum criterion crosses near " +
        io::format_double(ms.root));
}

void claim_beta_interval(ClaimReport& r, const VerifyOptions& o,
                         bool boundary) {
  uint64_t replicas = 2000, steps = 5000;
  if (o.budget == Budget::smoke) {
    replicas = 200;
    steps = 500;
  } else if (o.budget == Budget::full) {
    replicas = 4000;
    steps = 10000;
  }
  const IntervalPartition partition({0.0, 1.0});
  const std::vector<int> F = boundary ? std::vector<int>{0}
                                      : std::vector<int>{1};
  const auto [b1, b2] = interval_beta_parameters(partition.count() - 1, F);
  const auto fractions =
      interval_mass_estimate(partition, F, steps, replicas, o.seed);
  const KsResult ks = stats::ks_test_one_sample(
      fractions, [b1 = b1, b2 = b2](double t) {
        return stats::beta_cdf(std::clamp(t, 0.0, 1.0), b1, b2);
      });
  stat(r, "beta_a", b1);
  stat(r, "beta_b", b2);
  stat(r, "mean_fraction", stats::mean(fractions));
  stat(r, "ks_statistic", ks.statistic);
  stat(r, "ks_p", ks.p_value);
  gate(r, ks.p_value >= 0.01,
       "occupation fractions reject the predicted beta law at level 0.01");
}

void claim_example2_bounded(ClaimReport& r, const VerifyOptions& o) {
  uint64_t replicas = 1000, steps = 100000;
  if (o.budget == Budget::smoke) {
    replicas = 100;
    steps = 3000;
  } else if (o.budget == Budget::full) {
    steps = 200000;
  }
  constexpr int kMaxRecord = 10;
  struct Slot {
    double sup = 0.0;
    double diameter = 0.0;
    double inc_sum[kMaxRecord + 1] = {};
    double inc_sumsq[kMaxRecord + 1] = {};
    uint64_t inc_count[kMaxRecord + 1] = {};
  };
  std::vector<Slot> slots(replicas);
  const ModelSpec spec{CloseUniformModel{}, {}};
  parallel_for(replicas, o.threads, [&](uint64_t rep) {
    Slot& s = slots[rep];
    double prev_max = 1.0;
    int record = 0;
    RunOptions opts;
    opts.steps = steps;
    opts.seed = o.seed;
    opts.replica = rep;
    opts.on_step = [&](const StepRecord& rec) {
      if (rec.M > prev_max) {
        ++record;
        if (record <= kMaxRecord) {
          const double inc = rec.M - prev_max;
          s.inc_sum[record] += inc;
          s.inc_sumsq[record] += inc * inc;
          s.inc_count[record] += 1;
        }
        prev_max = rec.M;
      }
    };
    Trace trace = run(spec, opts);
    s.sup = trace.config.max1d;
    s.diameter = trace.config.max1d - trace.config.min1d;
  });

  double sup_sum = 0, sup_sumsq = 0, max_diameter = 0;
  double inc_sum[kMaxRecord + 1] = {}, inc_sumsq[kMaxRecord + 1] = {};
  uint64_t inc_count[kMaxRecord + 1] = {};
  bool all_finite = true;
  for (const Slot& s : slots) {
    sup_sum += s.sup;
    sup_sumsq += s.sup * s.sup;
    max_diameter = std::max(max_diameter, s.diameter);
    all_finite = all_finite && std::isfinite(s.diameter);
    for (int m = 1; m <= kMaxRecord; ++m) {
      inc_sum[m] += s.inc_sum[m];
      inc_sumsq[m] += s.inc_sumsq[m];
      inc_count[m] += s.inc_count[m];
    }
  }
  const double n = static_cast<double>(replicas);
  const double sup_mean = sup_sum / n;
  const double sup_se = std::sqrt(
      std::max(0.0, (sup_sumsq - n * sup_mean * sup_mean) / (n - 1.0)) / n);
  stat(r, "mean_sup", sup_mean);
  stat(r, "sup_se", sup_se);
  stat(r, "max_diameter", max_diameter);
  gate(r, all_finite, "a replica produced a non-finite diameter");
  gate(r, sup_mean <= 2.0 + 3.0 * sup_se,
       "mean running maximum exceeds 2 by more than 3 standard errors");

  for (int m = 1; m <= kMaxRecord; ++m) {
    if (inc_count[m] < 10) continue;
    const double c = static_cast<double>(inc_count[m]);
    const double mean = inc_sum[m] / c;
    const double var =
        std::max(0.0, (inc_sumsq[m] - c * mean * mean) / (c - 1.0));
    const double se = std::sqrt(var / c);
    stat(r, "record_inc_mean_" + std::to_string(m), mean);
    stat(r, "record_inc_se_" + std::to_string(m), se);
    gate(r, mean <= std::pow(2.0, -m) + 4.0 * se,
         "record increment " + std::to_string(m) +
             " exceeds 2^-m by more than 4 standard errors");
  }
}

void claim_lp_formula(ClaimReport& r, const VerifyOptions& o) {
  uint64_t seeds = 200;
  if (o.budget == Budget::smoke) seeds = 20;
  if (o.budget == Budget::full) seeds = 400;
  constexpr uint64_t kMinN = 3, kMaxN = 10;

  struct Case {
    uint64_t seed_index, n;
    double dstar, formula, oracle;
  };
  std::vector<std::vector<Case>> slots(seeds);
  parallel_for(seeds, o.threads, [&](uint64_t s) {
    ParticleConfig config(1, NeighborIndex::Backend::sorted1d, true);
    config.insert(std::vector<double>{0.0}, std::nullopt);
    config.insert(std::vector<double>{1.0}, std::nullopt);
    RandomStream rng(o.seed, s);
    const ModelVariant variant = CloseUniformModel{};
    std::vector<std::vector<double>> coords_at(kMaxN + 2);
    std::vector<double> dstar_at(kMaxN + 1, 0.0);
    while (config.size() < kMaxN + 1) {
      step(config, variant, rng, kRecordDstar);
      const uint64_t n = config.size();
      if (n >= kMinN && n <= kMaxN + 1) {
        const auto col = config.index.column(0);
        coords_at[n].assign(col.begin(), col.end());
        if (n <= kMaxN) dstar_at[n] = config.index.max_spacing();
      }
    }
    for (uint64_t n = kMinN; n <= kMaxN; ++n) {
      const double w = 1.0 / static_cast<double>(n);
      const EmpiricalMeasure mu = scaled_measure(coords_at[n], w);
      const EmpiricalMeasure nu = scaled_measure(coords_at[n + 1], w);
      double formula = lp_consecutive_formula(n, dstar_at[n]);
      if (o.tamper_lp) formula = formula * 1.001 + 1e-3;
      slots[s].push_back(
          {s, n, dstar_at[n], formula, lp_oracle_general(mu, nu)});
    }
  });

  uint64_t cases = 0, mismatches = 0, small_spacing = 0;
  double max_diff = 0.0;
  for (const auto& seed_cases : slots)
    for (const Case& c : seed_cases) {
      ++cases;
      const double diff = std::fabs(c.formula - c.oracle);
      max_diff = std::max(max_diff, diff);
      if (c.dstar < 1.0 / static_cast<double>(c.n)) ++small_spacing;
      if (diff > 1e-6) {
        ++mismatches;
        if (mismatches <= 3)
          r.notes.push_back(
              "mismatch at seed index " + std::to_string(c.seed_index) +
              ", n=" + std::to_string(c.n) + ": d*=" +
              io::format_double(c.dstar) + ", formula=" +
              io::format_double(c.formula) + ", exact=" +
              io::format_double(c.oracle));
      }
    }
  r.notes.push_back(
      "normalization: both consecutive configurations weighted 1/n per "
      "particle, so the exact distance is the added mass 1/n");
  stat(r, "cases", static_cast<double>(cases));
  stat(r, "mismatch_cases", static_cast<double>(mismatches));
  stat(r, "cases_with_dstar_below_1_over_n",
       static_cast<double>(small_spacing));
  stat(r, "max_abs_diff", max_diff);
  gate(r, mismatches == 0,
       "closed-form spacing distance disagrees with the exact search on " +
           std::to_string(mismatches) + " of " + std::to_string(cases) +
           " cases");
  if (mismatches > 0 && mismatches == small_spacing)
    r.notes.push_back(
        "every mismatch has d* < 1/n, where the exact distance stays 1/n "
        "but the formula drops to max(1/n^2, d*)");
}

void claim_spacing_decay(ClaimReport& r, const VerifyOptions& o) {
  uint64_t replicas = 100, steps = 100000;
  std::vector<uint64_t> checkpoints = {1000, 10000, 100000};
  if (o.budget == Budget::smoke) {
    replicas = 20;
    steps = 10000;
    checkpoints = {100, 1000, 10000};
  } else if (o.budget == Budget::full) {
    steps = 300000;
    checkpoints = {3000, 30000, 300000};
  }
  const auto sigma_opt = sigma_exponent(UniformSymmetric{});
  const double sigma = sigma_opt.value();
  const double t_star = 1.0 + std::sqrt(2.0);
  const double phi_star = phi(UniformSymmetric{}, t_star);

  struct Slot {
    std::array<double, 3> scaled{};
    double mart_ratio = 0.0;
  };
  std::vector<Slot> slots(replicas);
  parallel_for(replicas, o.threads, [&](uint64_t rep) {
    ParticleConfig config(1, NeighborIndex::Backend::sorted1d, true);
    config.insert(std::vector<double>{0.0}, std::nullopt);
    config.insert(std::vector<double>{1.0}, std::nullopt);
    RandomStream rng(o.seed, rep);
    const ModelVariant variant = CloseUniformModel{};
    SpacingBoundArray bound({1.0, 1.0}, t_star, phi_star);
    double mart_half = 0.0;
    std::size_t next_cp = 0;
    for (uint64_t s = 0; s < steps; ++s) {
      const StepRecord rec =
          step(config, variant, rng, kRecordDstar | kRecordEta);
      bound.step(rec.chi, rec.eta);
      if (s + 1 == steps / 2) mart_half = bound.martingale();
      const uint64_t points = config.size();
      if (next_cp < checkpoints.size() && points == checkpoints[next_cp]) {
        slots[rep].scaled[next_cp] =
            std::pow(static_cast<double>(points), sigma) *
            config.index.max_spacing();
        ++next_cp;
      }
    }
    slots[rep].mart_ratio =
        std::fabs(bound.martingale() / mart_half - 1.0);
  });

  std::array<std::vector<double>, 3> scaled;
  std::vector<double> ratios;
  for (const Slot& s : slots) {
    for (int c = 0; c < 3; ++c) scaled[c].push_back(s.scaled[c]);
    ratios.push_back(s.mart_ratio);
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  const double m0 = median(scaled[0]), m1 = median(scaled[1]),
               m2 = median(scaled[2]);
  stat(r, "sigma", sigma);
  stat(r, "median_scaled_spacing_cp1", m0);
  stat(r, "median_scaled_spacing_cp2", m1);
  stat(r, "median_scaled_spacing_cp3", m2);
  gate(r, m1 <= m0 && m2 <= m1,
       "replica-median n^sigma d*_n increases between checkpoints");
  const double mart_median = median(ratios);
  stat(r, "martingale_median_rel_change", mart_median);
  gate(r, mart_median < 0.02,
       "normalized bound-array sum drifts by 2% or more over the last "
       "doubling");
  if (mart_median >= 0.02)
    r.notes.push_back(
        "the exponent 1+sqrt(2) maximizes phi(t)/t, which is exactly the "
        "critical point of this branching-type martingale: the mean stays 2 "
        "but the limit degenerates to zero, so per-path relative changes "
        "remain macroscopic at every feasible size (measured ~0.17 at 1e5 "
        "steps against ~0.21 at 1e4) and no 2% stabilization window exists");
}

void claim_df_equivalence(ClaimReport& r, const VerifyOptions& o) {
  uint64_t replicas = 5000, steps = 10000;
  if (o.budget == Budget::smoke) {
    replicas = 500;
    steps = 2000;
  } else if (o.budget == Budget::full) {
    replicas = 10000;
  }
  const uint64_t half = steps / 2;

  struct Slot {
    double x2 = 0, left_half = 0, left_full = 0, df_x = 0, df_y = 0;
  };
  std::vector<Slot> slots(replicas);
  parallel_for(replicas, o.threads, [&](uint64_t rep) {
    Slot& s = slots[rep];
    ParticleConfig config(1, NeighborIndex::Backend::sorted1d, false);
    config.insert(std::vector<double>{0.0}, std::nullopt);
    RandomStream rng(o.seed, rep);
    const ModelVariant variant = RightUniformModel{};
    auto left_fraction = [&](double x) {
      const auto col = config.index.column(0);
      const auto below = std::count_if(col.begin(), col.end(),
                                       [x](double v) { return v < x; });
      return static_cast<double>(below) / static_cast<double>(col.size());
    };
    for (uint64_t st = 0; st < steps; ++st) {
      const StepRecord rec = step(config, variant, rng);
      if (st == 0) s.x2 = rec.x_new[0];
      if (st + 1 == half) s.left_half = left_fraction(s.x2);
    }
    s.left_full = left_fraction(s.x2);

    RandomStream df_rng(o.seed ^ 0xd1b54a32d192ed03ULL, rep);
    const DFTree tree =
        df_sample(1, [&df_rng](double x0, double x1, double y0, double y1) {
          const double x = df_rng.uniform(x0, x1);
          const double y = df_rng.uniform(y0, y1);
          return std::pair<double, double>{x, y};
        });
    s.df_x = tree.nodes[0].first;
    s.df_y = tree.nodes[0].second;
  });

  std::vector<double> x2(replicas), left(replicas), dfx(replicas),
      dfy(replicas);
  double stability = 0.0;
  for (uint64_t i = 0; i < replicas; ++i) {
    x2[i] = slots[i].x2;
    left[i] = slots[i].left_full;
    dfx[i] = slots[i].df_x;
    dfy[i] = slots[i].df_y;
    stability += std::fabs(slots[i].left_full - slots[i].left_half);
  }
  const KsResult ks_split = stats::ks_test_two_sample(x2, dfx);
  const KsResult ks_mass = stats::ks_test_two_sample(left, dfy);
  const double corr = pearson(x2, left);
  stat(r, "ks_split_p", ks_split.p_value);
  stat(r, "ks_mass_p", ks_mass.p_value);
  stat(r, "corr_split_mass", corr);
  stat(r, "mean_abs_mass_drift", stability / static_cast<double>(replicas));
  gate(r, ks_split.p_value >= 0.01,
       "first split abscissa differs from the recursive-tree marginal");
  gate(r, ks_mass.p_value >= 0.01,
       "limiting left mass differs from the recursive-tree marginal");
  gate(r, std::fabs(corr) < 0.05,
       "split position and limiting left mass are correlated");
}

void claim_dimension_rnu(ClaimReport& r, const VerifyOptions& o) {
  uint64_t steps = 100000;
  int probes = 200;
  double base_exp = -4.0;
  if (o.budget == Budget::smoke) {
    steps = 30000;
    probes = 100;
    base_exp = -3.5;
  } else if (o.budget == Budget::full) {
    steps = 200000;
  }
  std::vector<double> radii(9);
  for (int j = 0; j < 9; ++j)
    radii[static_cast<std::size_t>(j)] =
        std::pow(10.0, base_exp + 0.25 * j);

  RunOptions opts;
  opts.steps = steps;
  opts.seed = o.seed;
  const Trace trace = run(ModelSpec{RightUniformModel{}, {}}, opts);
  const double dim =
      local_dimension(trace.config, probes, radii, o.seed ^ 0x5851f42dULL);
  stat(r, "mean_slope", dim);
  stat(r, "target", 0.5);
  gate(r, std::fabs(dim - 0.5) <= 0.1,
       "size-biased occupation dimension leaves 0.5 +- 0.1");
}

void claim_mixture_convergence(ClaimReport& r, const VerifyOptions& o) {
  uint64_t replicas = 100, n_small = 100, n_big = 10000;
  if (o.budget == Budget::smoke) {
    replicas = 20;
    n_small = 100;
    n_big = 1000;
  } else if (o.budget == Budget::full) {
    n_big = 20000;
  }
  struct Slot {
    double ks_small = 0, ks_big = 0;
  };
  std::vector<Slot> slots(replicas);
  parallel_for(replicas, o.threads, [&](uint64_t rep) {
    ParticleConfig config(1, NeighborIndex::Backend::sorted1d, false);
    config.insert(std::vector<double>{0.0}, std::nullopt);
    config.insert(std::vector<double>{1.0}, std::nullopt);
    RandomStream rng(o.seed, rep);
    const ModelVariant variant = CloseUniformModel{};
    auto ks_now = [&] {
      const MixtureCdf mix(config, UniformSymmetric{});
      return ks_distance(mix.view(), empirical_cdf(config).view());
    };
    while (config.size() < n_small) step(config, variant, rng);
    slots[rep].ks_small = ks_now();
    while (config.size() < n_big) step(config, variant, rng);
    slots[rep].ks_big = ks_now();
  });
  uint64_t good = 0;
  double mean_big = 0;
  for (const Slot& s : slots) {
    if (s.ks_big < s.ks_small && s.ks_big < 0.05) ++good;
    mean_big += s.ks_big;
  }
  stat(r, "replicas", static_cast<double>(replicas));
  stat(r, "decreasing_and_small", static_cast<double>(good));
  stat(r, "mean_ks_at_big_n", mean_big / static_cast<double>(replicas));
  gate(r, static_cast<double>(good) >=
              0.95 * static_cast<double>(replicas),
       "next-point mixture fails to approach the empirical measure in 95% "
       "of replicas");
}

void claim_conveq_laws(ClaimReport& r, const VerifyOptions& o) {
  const double alpha = 2.0, beta = 0.25, p = 0.3;
  const HLaw laws = h_law_analytic(alpha, beta, p);
  GridSpec grid;
  if (o.budget == Budget::smoke) grid.points = 1025;
  const GSolution sol = solve_G(laws.F, grid);
  double sup_closed = 0.0, sup_printed = 0.0;
  for (std::size_t i = 0; i < sol.t.size(); ++i) {
    sup_closed = std::max(sup_closed,
                          std::fabs(sol.g[i] - laws.G(sol.t[i])));
    sup_printed = std::max(sup_printed,
                           std::fabs(sol.g[i] - laws.G_printed(sol.t[i])));
  }
  stat(r, "iterations", static_cast<double>(sol.iterations));
  stat(r, "sup_vs_closed_form", sup_closed);
  stat(r, "sup_vs_printed_form", sup_printed);
  stat(r, "cdf_of_H_at_1", sol(0.0));
  gate(r, sup_closed <= 1e-3,
       "fixed-point solution leaves the closed form by more than 1e-3");

  uint64_t samples = 100000;
  if (o.budget == Budget::smoke) samples = 10000;
  const DisplacementLaw law = PowerMixture{alpha, beta, p};
  std::vector<double> logs(samples);
  RandomStream rng(o.seed, 0, 3);
  for (auto& v : logs) v = std::log(sample_H(law, rng));
  std::sort(logs.begin(), logs.end());
  double sup_ecdf = 0.0;
  const double m = static_cast<double>(samples);
  for (uint64_t i = 0; i < samples; ++i) {
    const double g = sol(logs[i]);
    sup_ecdf = std::max(sup_ecdf,
                        std::fabs(static_cast<double>(i) / m - g));
    sup_ecdf = std::max(
        sup_ecdf, std::fabs(static_cast<double>(i + 1) / m - g));
  }
  stat(r, "sup_vs_sample_ecdf", sup_ecdf);
  gate(r, sup_ecdf <= 0.02,
       "fixed-point solution leaves the sampled distribution by more than "
       "0.02");
}

void claim_ctime_yule(ClaimReport& r, const VerifyOptions& o) {
  uint64_t replicas = 10000;
  double horizon = 3.0;
  if (o.budget == Budget::smoke) replicas = 1000;
  if (o.budget == Budget::full) replicas = 20000;
  {
    std::vector<double> counts(replicas);
    const ModelSpec spec{CloseUniformModel{}, {}};
    parallel_for(replicas, o.threads, [&](uint64_t rep) {
      YuleOptions opts;
      opts.horizon = horizon;
      opts.seed = o.seed;
      opts.replica = rep;
      const TimedTrace timed = yule_run(spec, opts);
      counts[rep] = static_cast<double>(timed.trace.config.size());
    });
    const double expected = 2.0 * std::exp(horizon);
    const double mean = stats::mean(counts);
    const double se = stats::standard_error(counts);
    stat(r, "mean_population", mean);
    stat(r, "expected_population", expected);
    stat(r, "population_se", se);
    gate(r, std::fabs(mean - expected) <= 4.0 * se,
         "mean population at the horizon misses n0*e^T by more than 4 "
         "standard errors");
  }

  uint64_t decay_replicas = 500;
  double decay_horizon = 6.0, grid_lo = 2.0;
  if (o.budget == Budget::smoke) {
    decay_replicas = 100;
    decay_horizon = 4.0;
  }
  const ModelSpec spec{CloseNormalModel{0.3}, {}};
  std::vector<std::optional<TimedTrace>> slots(decay_replicas);
  parallel_for(decay_replicas, o.threads, [&](uint64_t rep) {
    YuleOptions opts;
    opts.horizon = decay_horizon;
    opts.seed = o.seed ^ 0x94d049bb133111ebULL;
    opts.replica = rep;
    opts.recorders = kRecordDstar | kKeepRecords;
    slots[rep] = yule_run(spec, opts);
  });
  std::vector<TimedTrace> traces;
  traces.reserve(decay_replicas);
  for (auto& s : slots) traces.push_back(std::move(*s));
  std::vector<double> grid;
  for (double t = grid_lo; t <= decay_horizon + 1e-9; t += 0.5)
    grid.push_back(t);
  const DecayFit fit =
      spacing_decay_fit(traces, ScaledNormal{0.3}, grid);
  stat(r, "decay_slope", fit.slope);
  stat(r, "contract_rate", fit.contract_rate);
  stat(r, "decay_tolerance", 0.05);
  gate(r, fit.slope <= fit.contract_rate + 0.05,
       "mean maximal spacing decays slower than the moment-sum rate allows");
}

void claim_infrastructure(ClaimReport& r, const VerifyOptions& o) {
  uint64_t inserts = 10000;
  if (o.budget == Budget::smoke) inserts = 1000;

  // Exact agreement between the specialized backends and the brute scan.
  for (int dim : {1, 2}) {
    NeighborIndex fast(dim,
                       dim == 1 ? NeighborIndex::Backend::sorted1d
                                : NeighborIndex::Backend::grid,
                       dim == 1);
    NeighborIndex brute(dim, NeighborIndex::Backend::brute, false);
    RandomStream rng(o.seed, static_cast<uint64_t>(dim), 11);
    uint64_t mismatches = 0;
    std::vector<double> x(static_cast<std::size_t>(dim));
    for (uint64_t i = 1; i <= inserts; ++i) {
      for (auto& v : x) v = rng.uniform01();
      fast.insert(x);
      brute.insert(x);
      if (i >= 2 && fast.nearest_excl(i) != brute.nearest_excl(i))
        ++mismatches;
      if (i >= 2 && i % 500 == 0) {
        if (fast.max_spacing() != brute.max_spacing()) ++mismatches;
        const uint64_t probe = 1 + (i / 2) % i;
        if (fast.nearest_excl(probe) != brute.nearest_excl(probe))
          ++mismatches;
      }
    }
    stat(r, "nn_mismatches_" + std::to_string(dim) + "d",
         static_cast<double>(mismatches));
    gate(r, mismatches == 0,
         std::to_string(dim) +
             "d neighbour queries disagree with the brute-force scan");
  }

  // Same bytes out of the replica pool no matter how wide it runs.
  {
    auto batch = [&](int threads) {
      const uint64_t replicas = 8;
      std::vector<std::string> lines(replicas);
      const ModelSpec spec{CloseUniformModel{}, {}};
      parallel_for(replicas, threads, [&](uint64_t rep) {
        RunOptions opts;
        opts.steps = o.budget == Budget::smoke ? 500 : 2000;
        opts.seed = o.seed;
        opts.replica = rep;
        opts.recorders = kRecordDstar;
        Trace trace = run(spec, opts);
        lines[rep] = io::summary_json(io::summarize(trace));
      });
      std::string all;
      for (const auto& l : lines) all += l + "\n";
      return all;
    };
    const bool same = batch(1) == batch(3);
    stat(r, "pool_determinism", same ? 1.0 : 0.0);
    gate(r, same, "replica pool output depends on the thread count");
  }

  // Copy steps repeat an existing coordinate bitwise, so fresh draws are
  // countable; their total follows the harmonic number of the step count.
  {
    uint64_t replicas = 200, steps = 10000;
    if (o.budget == Budget::smoke) {
      replicas = 50;
      steps = 1000;
    }
    std::vector<double> fresh(replicas);
    const ModelSpec spec{UrnCopyModel{Box{{0.0}, {1.0}}}, {}};
    parallel_for(replicas, o.threads, [&](uint64_t rep) {
      std::vector<double> coords;
      coords.reserve(steps + 1);
      for (const auto& p : default_initial(spec.variant))
        coords.push_back(p[0]);
      uint64_t count = 0;
      RunOptions opts;
      opts.steps = steps;
      opts.seed = o.seed ^ 0xbf58476d1ce4e5b9ULL;
      opts.replica = rep;
      opts.on_step = [&](const StepRecord& rec) {
        if (rec.x_new[0] != coords[rec.chi - 1]) ++count;
        coords.push_back(rec.x_new[0]);
      };
      run(spec, opts);
      fresh[rep] = static_cast<double>(count);
    });
    double harmonic = 0.0;
    for (uint64_t k = 1; k <= steps; ++k)
      harmonic += 1.0 / static_cast<double>(k);
    const double mean = stats::mean(fresh);
    stat(r, "mean_fresh_draws", mean);
    stat(r, "harmonic_number", harmonic);
    stat(r, "fresh_draw_se", stats::standard_error(fresh));
    gate(r, std::fabs(mean - harmonic) <= 0.05 * harmonic,
         "fresh-draw count misses the harmonic number by more than 5%");
  }

  // Constant weights make every candidate acceptable, so the accepted
  // points must be uniform on the window.
  {
    uint64_t replicas = 50, steps = 40;
    if (o.budget == Budget::smoke) replicas = 25;
    std::vector<std::vector<double>> slots(replicas);
    const ModelSpec spec{
        AdsorptionModel{Box{{0.0}, {1.0}}, 0.2, {1.0}}, {}};
    parallel_for(replicas, o.threads, [&](uint64_t rep) {
      RunOptions opts;
      opts.steps = steps;
      opts.seed = o.seed ^ 0x2545f4914f6cdd1dULL;
      opts.replica = rep;
      opts.on_step = [&](const StepRecord& rec) {
        slots[rep].push_back(rec.x_new[0]);
      };
      run(spec, opts);
    });
    std::vector<double> points;
    for (const auto& s : slots)
      points.insert(points.end(), s.begin(), s.end());
    const KsResult ks = stats::ks_test_one_sample(points, uniform01_cdf);
    stat(r, "adsorption_ks_p", ks.p_value);
    gate(r, ks.p_value >= 0.01,
         "constant-weight adsorption points reject uniformity at level "
         "0.01");
  }
}

}  // namespace

const std::vector<std::string>& claim_ids() {
  static const std::vector<std::string> ids = {
      "sigma-uniform",        "thresholds",
      "beta-middle-interval", "beta-boundary-interval",
      "example2-bounded",     "lp-formula",
      "spacing-decay",        "df-equivalence",
      "dimension-rnu",        "mixture-convergence",
      "conveq-laws",          "ctime-yule",
      "infrastructure"};
  return ids;
}

ClaimReport run_claim(const std::string& id, const VerifyOptions& options) {
  ClaimReport report;
  report.id = id;
  report.budget = budget_name(options.budget);
  report.seed = options.seed;
  const auto start = std::chrono::steady_clock::now();
  if (id == "sigma-uniform")
    claim_sigma_uniform(report, options);
  else if (id == "thresholds")
    claim_thresholds(report, options);
  else if (id == "beta-middle-interval")
    claim_beta_interval(report, options, false);
  else if (id == "beta-boundary-interval")
    claim_beta_interval(report, options, true);
  else if (id == "example2-bounded")
    claim_example2_bounded(report, options);
  else if (id == "lp-formula")
    claim_lp_formula(report, options);
  else if (id == "spacing-decay")
    claim_spacing_decay(report, options);
  else if (id == "df-equivalence")
    claim_df_equivalence(report, options);
  else if (id == "dimension-rnu")
    claim_dimension_rnu(report, options);
  else if (id == "mixture-convergence")
    claim_mixture_convergence(report, options);
  else if (id == "conveq-laws")
    claim_conveq_laws(report, options);
  else if (id == "ctime-yule")
    claim_ctime_yule(report, options);
  else if (id == "infrastructure")
    claim_infrastructure(report, options);
  else
    throw std::invalid_argument("unknown claim id '" + id + "'");
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

namespace {

nlohmann::ordered_json stats_block(const ClaimReport& r) {
  nlohmann::ordered_json j;
  j["claim"] = r.id;
  j["budget"] = r.budget;
  j["seed"] = r.seed;
  j["pass"] = r.pass;
  nlohmann::ordered_json s = nlohmann::ordered_json::object();
  for (const auto& [name, value] : r.stats) s[name] = value;
  j["stats"] = s;
  j["notes"] = r.notes;
  return j;
}

}  // namespace

std::string report_stats_json(const ClaimReport& report) {
  return stats_block(report).dump();
}

std::string report_json(const ClaimReport& report) {
  nlohmann::ordered_json j = stats_block(report);
  j["runtime_s"] = report.runtime_seconds;
  return j.dump();
}

}  // namespace lisa::verify
