#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "lisa/distributions.hpp"
#include "lisa/engine.hpp"

namespace lisa {

// Right-continuous CDF plus the structure needed for exact sup-norm
// comparison: atom locations, breakpoints of piecewise pieces, and a window
// for grid refinement when a component is genuinely smooth.
struct CdfView {
  std::function<double(double)> value;
  std::function<double(double)> left;
  std::vector<double> jump_points;
  std::vector<double> critical_points;
  double lo = 0.0;
  double hi = 1.0;
  bool smooth = false;
};

struct EmpiricalMeasure {
  std::vector<std::pair<double, double>> atoms;  // (coordinate, weight), sorted
  bool normalized = false;
  double total = 0.0;

  double cdf(double t) const;
  double cdf_left(double t) const;
  CdfView view() const;
};

EmpiricalMeasure empirical_measure(std::span<const double> points,
                                   bool normalize);
// Normalized empirical measure of a 1D configuration.
EmpiricalMeasure empirical_cdf(const ParticleConfig& config);

double ks_distance(const CdfView& F, const CdfView& G);

// Exact Levy-Prokhorov distance between small atomic measures: bisection on
// epsilon with an exhaustive check over unions of support atoms. Requires
// equal total masses (normalized measures included) and at most 16 atoms
// per measure.
double lp_oracle(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);
// Same search without the equal-mass requirement; used to compare candidate
// normalizations of the consecutive-measure identity.
double lp_oracle_general(const EmpiricalMeasure& mu,
                         const EmpiricalMeasure& nu);

double lp_consecutive_formula(uint64_t n, double dstar);

// Intervals cut by an ordered base configuration: interval 0 is (-inf, x_1),
// interval j is [x_j, x_{j+1}), interval a is [x_a, inf).
struct IntervalPartition {
  std::vector<double> base;

  explicit IntervalPartition(std::vector<double> points);
  int interval_of(double x) const;
  int count() const { return static_cast<int>(base.size()) + 1; }
};

// Beta(b_hat, a - b_hat) parameters for the limiting mass of the interval
// union indexed by F; boundary intervals contribute half weight.
std::pair<double, double> interval_beta_parameters(int a,
                                                   const std::vector<int>& F);

// Per replica, the fraction of all particles lying in the F-intervals after
// `steps` close-uniform steps from the base configuration.
std::vector<double> interval_mass_estimate(const IntervalPartition& base,
                                           const std::vector<int>& F,
                                           uint64_t steps, uint64_t replicas,
                                           uint64_t seed);

// Mean over size-biased probe particles of the log-log regression slope of
// ball mass against radius.
double local_dimension(const ParticleConfig& config, int probes,
                       std::span<const double> radii, uint64_t seed);

// The next-point mixture law of a 1D configuration: equal-weight mixture of
// the displacement law rescaled to each particle's nearest distance.
class MixtureCdf {
 public:
  MixtureCdf(const ParticleConfig& config, DisplacementLaw law);

  double value(double t) const;
  // Reference evaluation through the ramp kernel (uniform-symmetric only).
  double value_kernel(double t) const;
  CdfView view() const;
  std::size_t components() const { return centers_.size() + atoms_.size(); }
  std::size_t degenerate_components() const { return atoms_.size(); }

 private:
  DisplacementLaw law_;
  bool uniform_;
  std::vector<double> centers_;
  std::vector<double> scales_;
  // particles whose nearest distance underflowed to an exact duplicate; the
  // rescaled kernel degenerates to the point mass there
  std::vector<double> atoms_;
  // kernels narrower than kNarrowScale sit at the front of every per-kernel
  // array and are summed term by term; only the wide tail is in the prefix sums
  std::size_t narrow_ = 0;
  // uniform path: wide ramp starts/ends sorted with prefix sums, O(log n) eval
  std::vector<double> lo_sorted_, lo_w_prefix_, lo_lw_prefix_;
  std::vector<double> hi_sorted_, hi_w_prefix_, hi_lw_prefix_;
  std::vector<double> lo_raw_, w_raw_;
};

}  // namespace lisa
