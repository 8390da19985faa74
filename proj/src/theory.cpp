#include "lisa/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lisa/stats.hpp"

namespace lisa {

double phi(const DisplacementLaw& law, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("phi: t must be positive");
  return 1.0 - (eta_moment(law, t) + eta_hat_moment(law, t));
}

namespace {

// Maximizes f on [a,b] by golden section; f assumed unimodal there.
double golden_max(const std::function<double(double)>& f, double a, double b,
                  double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::optional<double> sigma_exponent(const DisplacementLaw& law) {
  const TheoryConstants tc = constants(law);
  double lo = 1e-3;
  double hi = 1e3;
  if (std::isfinite(tc.t_max)) hi = std::min(hi, tc.t_max * (1.0 - 1e-9));
  if (!(hi > lo)) return std::nullopt;

  auto rate = [&](double u) { return phi(law, std::exp(u)) / std::exp(u); };
  const double ulo = std::log(lo), uhi = std::log(hi);
  constexpr int kScan = 240;
  int best = -1;
  double best_val = 0.0;
  std::vector<double> vals(kScan + 1);
  for (int i = 0; i <= kScan; ++i) {
    const double u = ulo + (uhi - ulo) * i / kScan;
    vals[i] = rate(u);
    if (vals[i] > best_val) {
      best_val = vals[i];
      best = i;
    }
  }
  if (best < 0) return std::nullopt;  // phi <= 0 throughout: no positive rate

  const double step = (uhi - ulo) / kScan;
  const double a = ulo + step * std::max(0, best - 1);
  const double b = ulo + step * std::min(kScan, best + 1);
  const double u_star = golden_max(rate, a, b, 1e-9);
  return rate(u_star);
}

double markov_bound(const DisplacementLaw& law, double E_phi1) {
  const TheoryConstants tc = constants(law);
  if (!(tc.C_hat < 1.0))
    throw std::domain_error("markov_bound: requires E min(eta,1) < 1");
  if (!(E_phi1 >= 0.0))
    throw std::invalid_argument("markov_bound: E_phi1 must be nonnegative");
  return tc.C * (1.0 + E_phi1) / (1.0 - tc.C_hat);
}

double sup_bound_th2(const DisplacementLaw& law, double A0, double D0,
                     int n0) {
  const TheoryConstants tc = constants(law);
  if (!(tc.C + tc.C_hat < 1.0))
    throw std::domain_error(
        "sup_bound_th2: requires E eta + E min(eta,1) < 1");
  if (n0 < 1) throw std::invalid_argument("sup_bound_th2: n0 must be >= 1");
  return A0 + static_cast<double>(n0) * D0 * tc.C / (1.0 - tc.C_hat - tc.C);
}

ThresholdEstimate boundedness_threshold(ThresholdCriterion criterion,
                                        uint64_t replicas, uint64_t seed) {
  if (criterion == ThresholdCriterion::moment_sum) {
    auto f = [](double a) {
      const DisplacementLaw law = ScaledNormal{a};
      return eta_moment(law, 1.0) + eta_hat_moment(law, 1.0) - 1.0;
    };
    double lo = 0.1, hi = 2.0;
    if (!(f(lo) < 0.0 && f(hi) > 0.0))
      throw std::logic_error("boundedness_threshold: bracket lost");
    while (hi - lo > 1e-5) {
      const double mid = 0.5 * (lo + hi);
      (f(mid) < 0.0 ? lo : hi) = mid;
    }
    const double root = 0.5 * (lo + hi);
    return {root, 0.5 * (hi - lo), f(root) + 1.0, 0.0};
  }

  if (replicas < 100)
    throw std::invalid_argument(
        "boundedness_threshold: too few replicas for the max-functional root");
  // Same replica seeds for every candidate scale, so the estimated mean of H
  // is pointwise monotone in a and bisection is safe.
  auto estimate = [&](double a) {
    const DisplacementLaw law = ScaledNormal{a};
    double sum = 0.0, sumsq = 0.0;
    for (uint64_t r = 0; r < replicas; ++r) {
      RandomStream rng(seed, r);
      const double h = sample_H(law, rng);
      sum += h;
      sumsq += h * h;
    }
    const double n = static_cast<double>(replicas);
    const double m = sum / n;
    const double var = std::max(0.0, (sumsq - n * m * m) / (n - 1.0));
    return std::pair<double, double>{m, std::sqrt(var / n)};
  };

  double lo = 0.5, hi = 1.6;
  auto [flo, slo] = estimate(lo);
  auto [fhi, shi] = estimate(hi);
  if (!(flo < 1.0 && fhi > 1.0))
    throw std::logic_error("boundedness_threshold: bracket lost");
  double mean = flo, se = slo;
  for (int it = 0; it < 24 && hi - lo > 2e-4; ++it) {
    const double mid = 0.5 * (lo + hi);
    std::tie(mean, se) = estimate(mid);
    if (std::abs(mean - 1.0) <= 2.0 * se) {
      // The interval straddles 1 within noise; finer bisection would chase
      // Monte Carlo error.
      lo = hi = mid;
      break;
    }
    (mean < 1.0 ? lo : hi) = mid;
  }
  const double root = 0.5 * (lo + hi);
  // Map the residual at the root through a local slope estimate of EH(a).
  const double slope = std::max(0.5, (fhi - flo) / (1.6 - 0.5));
  const double half = 0.5 * (hi - lo) + 2.0 * se / slope;
  return {root, half, mean, se};
}

double GSolution::operator()(double x) const {
  if (x <= t.front()) return g.front();
  if (x >= t.back()) return g.back();
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - t.begin()) - 1;
  const double w = (x - t[k]) / (t[k + 1] - t[k]);
  return (1.0 - w) * g[k] + w * g[k + 1];
}

GSolution solve_G(const std::function<double(double)>& F, GridSpec grid) {
  const std::size_t n = grid.points;
  if (n < 64 || !(grid.hi > grid.lo))
    throw std::invalid_argument("solve_G: degenerate grid");
  if (!(F(0.0) > 0.0))
    throw std::invalid_argument(
        "solve_G: log eta needs mass on the negative axis");

  const double h = (grid.hi - grid.lo) / static_cast<double>(n - 1);
  GSolution sol;
  sol.t.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    sol.t[i] = grid.lo + h * static_cast<double>(i);

  // Bin masses at midpoints z_j = lo + (j - 1/2) h, plus the tail below the
  // grid collapsed onto lo. Midpoints sit half a cell off the t grid, so
  // every convolution lookup lands at integer + 1/2 and interpolation is one
  // average.
  std::vector<double> w(n, 0.0);
  const double tail_lo = std::max(0.0, F(grid.lo));
  double prev = F(grid.lo);
  std::size_t j0 = 0;  // largest j with z_j <= 0
  for (std::size_t j = 1; j < n; ++j) {
    const double cur = F(sol.t[j]);
    w[j] = std::max(0.0, cur - prev);
    prev = cur;
    if (grid.lo + (static_cast<double>(j) - 0.5) * h <= 0.0) j0 = j;
  }

  std::vector<double> g(n), next(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = std::clamp(F(sol.t[i]), 0.0, 1.0);

  auto at = [&](const std::vector<double>& v, double kf) -> double {
    // value at fractional grid index kf, clamped to the boundary values
    if (kf <= 0.0) return v.front();
    if (kf >= static_cast<double>(n - 1)) return v.back();
    const auto k = static_cast<std::size_t>(kf);
    const double frac = kf - static_cast<double>(k);
    return (1.0 - frac) * v[k] + frac * v[k + 1];
  };

  const double tail_idx = -grid.lo / h;  // lookup offset for G(t_i - lo)
  const double F0 = F(0.0);
  std::vector<double> den(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (sol.t[i] < 0.0) continue;
    den[i] = 1.0 - (F(sol.t[i]) - F0);
    if (!(den[i] > 1e-8))
      throw std::runtime_error("solve_G: vanishing denominator");
  }

  constexpr double kTol = 1e-10;
  constexpr int kMaxIter = 100000;
  int it = 0;
  for (; it < kMaxIter; ++it) {
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = sol.t[i];
      const double fi = static_cast<double>(i);
      double acc = tail_lo * at(g, fi + tail_idx);
      double val;
      if (t < 0.0) {
        // G(t) = int_{z <= t} G(t - z) dF(z); midpoints z_j <= t_i iff j <= i
        const std::size_t jmax = std::min(i, n - 1);
        for (std::size_t j = 1; j <= jmax; ++j)
          acc += w[j] * at(g, fi - static_cast<double>(j) + 0.5 + tail_idx);
        val = acc;
      } else {
        // self-mass F(t) - F(0) moved to the denominator
        for (std::size_t j = 1; j <= j0; ++j)
          acc += w[j] * at(g, fi - static_cast<double>(j) + 0.5 + tail_idx);
        val = acc / den[i];
      }
      val = std::clamp(val, 0.0, 1.0);
      next[i] = 0.5 * g[i] + 0.5 * val;
      delta = std::max(delta, std::abs(next[i] - g[i]));
    }
    g.swap(next);
    if (delta < kTol) break;
  }
  if (it >= kMaxIter)
    throw std::runtime_error("solve_G: iteration cap reached");
  sol.g = std::move(g);
  sol.iterations = it + 1;
  return sol;
}

double DFTree::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  // nodes are in abscissa order; find the bracketing pair
  auto it = std::lower_bound(nodes.begin(), nodes.end(), x,
                             [](const auto& nd, double v) {
                               return nd.first < v;
                             });
  if (it != nodes.end()) {
    x1 = it->first;
    y1 = it->second;
  }
  if (it != nodes.begin()) {
    --it;
    x0 = it->first;
    y0 = it->second;
  }
  if (x1 == x0) return y0;
  return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

namespace {

void df_build(int level, int depth, double x0, double x1, double y0,
              double y1, const DFDraw& draw,
              std::vector<std::pair<double, double>>& out) {
  if (level > depth) return;
  const auto [x, y] = draw(x0, x1, y0, y1);
  if (!(x >= x0 && x <= x1 && y >= y0 && y <= y1))
    throw std::invalid_argument("df_sample: node outside its rectangle");
  df_build(level + 1, depth, x0, x, y0, y, draw, out);
  out.emplace_back(x, y);
  df_build(level + 1, depth, x, x1, y, y1, draw, out);
}

}  // namespace

DFTree df_sample(int depth, DFDraw draw) {
  if (depth < 0 || depth > 24)
    throw std::invalid_argument("df_sample: depth out of range");
  DFTree tree;
  tree.depth = depth;
  tree.nodes.reserve((std::size_t{1} << depth) - 1);
  df_build(1, depth, 0.0, 1.0, 0.0, 1.0, draw, tree.nodes);
  return tree;
}

DFTree df_sample(int depth, uint64_t seed) {
  RandomStream rng(seed);
  return df_sample(depth, [&rng](double x0, double x1, double y0, double y1) {
    const double x = rng.uniform(x0, x1);
    const double y = rng.uniform(y0, y1);
    return std::pair<double, double>{x, y};
  });
}

SpacingBoundArray::SpacingBoundArray(std::vector<double> initial, double t,
                                     double phi_t)
    : values_(std::move(initial)), t_(t), phi_t_(phi_t) {
  if (values_.empty())
    throw std::invalid_argument("SpacingBoundArray: empty initial array");
  if (!(t_ > 0.0))
    throw std::invalid_argument("SpacingBoundArray: exponent must be > 0");
  for (double v : values_)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("SpacingBoundArray: bad initial entry");
  sum_t_ = 0.0;
  for (double v : values_) sum_t_ += std::pow(v, t_);
}

void SpacingBoundArray::step(uint64_t chi, double eta) {
  step(chi, eta, std::min(eta, 1.0));
}

void SpacingBoundArray::step(uint64_t chi, double eta, double eta_hat) {
  if (chi < 1 || chi > values_.size())
    throw std::out_of_range("SpacingBoundArray: chi outside the population");
  if (!(eta >= 0.0) || !(eta_hat >= 0.0))
    throw std::invalid_argument("SpacingBoundArray: negative factor");
  const double n = static_cast<double>(values_.size());
  normalizer_ /= 1.0 - phi_t_ / n;
  const double d = values_[chi - 1];
  const double kept = d * eta_hat;
  const double born = d * eta;
  values_[chi - 1] = kept;
  values_.push_back(born);
  sum_t_ += std::pow(kept, t_) + std::pow(born, t_) - std::pow(d, t_);
  if (++steps_since_resync_ >= 4096) resync();
}

void SpacingBoundArray::resync() {
  // incremental sum drifts by O(sqrt(steps)) ulps; refresh occasionally
  double s = 0.0;
  for (double v : values_) s += std::pow(v, t_);
  sum_t_ = s;
  steps_since_resync_ = 0;
}

}  // namespace lisa
