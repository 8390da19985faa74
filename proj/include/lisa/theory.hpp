#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lisa/distributions.hpp"
#include "lisa/rng.hpp"

namespace lisa {

// phi(t) = 1 - (E eta^t + E eta_hat^t).
double phi(const DisplacementLaw& law, double t);

// sigma = sup_{t>0} phi(t)/t where defined; absent when phi <= 0 throughout.
std::optional<double> sigma_exponent(const DisplacementLaw& law);

// C (1 + E_phi1) / (1 - C_hat); the expected-supremum bound of the maximal
// chain. Throws when C_hat >= 1.
double markov_bound(const DisplacementLaw& law, double E_phi1);

// A0 + n0 D0 C / (1 - C_hat - C); requires C + C_hat < 1.
double sup_bound_th2(const DisplacementLaw& law, double A0, double D0,
                     int n0);

enum class ThresholdCriterion { moment_sum, max_functional };

struct ThresholdEstimate {
  double root;
  double uncertainty;       // half-width; 0 for the deterministic criterion
  double value_at_root;     // C+C_hat or estimated EH at the root
  double se_at_root;        // MC standard error (max-functional only)
};

// Critical scale a* of the scaled-normal family under either boundedness
// criterion. The max-functional root uses common random numbers across
// candidate scales so the Monte Carlo curve is monotone.
ThresholdEstimate boundedness_threshold(ThresholdCriterion criterion,
                                        uint64_t replicas = 1000000,
                                        uint64_t seed = 20240901);

struct GridSpec {
  double lo = -30.0;
  double hi = 30.0;
  std::size_t points = 4097;
};

struct GSolution {
  std::vector<double> t;
  std::vector<double> g;
  int iterations = 0;

  double operator()(double x) const;  // linear interpolation, clamped to [0,1]
};

// Fixed point of the distributional identity log H = max(log eta,
// log eta_hat + log H') given the cdf F of log eta. Damped iteration on a
// uniform grid; the t >= 0 branch is rearranged so the self-referencing mass
// moves to the denominator.
GSolution solve_G(const std::function<double(double)>& F,
                  GridSpec grid = {});

// Random distribution function built by recursive uniform splits of nested
// diagonal rectangles; nodes in abscissa order, 2^depth - 1 of them.
struct DFTree {
  int depth = 0;
  std::vector<std::pair<double, double>> nodes;

  double cdf(double x) const;
};

using DFDraw = std::function<std::pair<double, double>(
    double x0, double x1, double y0, double y1)>;

DFTree df_sample(int depth, DFDraw draw);
DFTree df_sample(int depth, uint64_t seed);

// Triangular bound array coupled to a trace: the chosen entry shrinks by
// eta_hat while the new particle receives the parent bound times eta. The
// normalized sum prod_j (1 - phi(t)/j)^{-1} sum_k Delta_k^t is a martingale.
class SpacingBoundArray {
 public:
  SpacingBoundArray(std::vector<double> initial, double t, double phi_t);

  void step(uint64_t chi, double eta);
  void step(uint64_t chi, double eta, double eta_hat);

  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double martingale() const { return normalizer_ * sum_t_; }
  double exponent() const { return t_; }

 private:
  void resync();

  std::vector<double> values_;
  double t_;
  double phi_t_;
  double sum_t_;
  double normalizer_ = 1.0;
  uint64_t steps_since_resync_ = 0;
};

}  // namespace lisa
