#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lisa/engine.hpp"

namespace lisa {

// Continuous-time embedding: every particle carries an independent rate-1
// clock, so the population jumps at rate n. Simulated through the embedded
// chain with Exp(n) holding times; each birth draws its holding time first,
// then the placement variables.
struct TimedTrace {
  Trace trace;
  std::vector<double> birth_times;  // one entry per executed step, increasing
  double horizon = 0.0;
  double initial_dstar = 0.0;  // nan when spacing is not tracked or n0 < 2
};

struct YuleOptions {
  double horizon = 1.0;
  uint64_t seed = 0;
  uint64_t replica = 0;
  unsigned recorders = kRecordNone;
  uint64_t cap = 10000000;  // birth budget; exceeding it is an error
  std::optional<NeighborIndex::Backend> backend;
};

TimedTrace yule_run(const ModelSpec& spec, const YuleOptions& options);
TimedTrace yule_run(const ModelSpec& spec, double horizon, uint64_t seed);

// d*_t: maximal spacing of the configuration alive at time t. Piecewise
// constant between births. Requires kRecordDstar | kKeepRecords.
double dstar_at(const TimedTrace& timed, double t);

struct DecayFit {
  double slope;
  double intercept;
  double contract_rate;  // -(1 - C - C_hat) of the law
};

// Least-squares slope of log mean d*_t across replicas on the given grid.
DecayFit spacing_decay_fit(std::span<const TimedTrace> traces,
                           const DisplacementLaw& law,
                           std::span<const double> time_grid);

}  // namespace lisa
