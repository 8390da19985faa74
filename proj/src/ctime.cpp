#include "lisa/ctime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <variant>

#include "lisa/stats.hpp"

namespace lisa {

TimedTrace yule_run(const ModelSpec& spec, const YuleOptions& options) {
  validate_model(spec);
  if (!(options.horizon >= 0.0))
    throw std::invalid_argument("yule_run: horizon must be nonnegative");
  const int dim = model_dimension(spec.variant);
  NeighborIndex::Backend backend =
      options.backend ? *options.backend : NeighborIndex::default_backend(dim);
  if (std::holds_alternative<RightUniformModel>(spec.variant) &&
      backend != NeighborIndex::Backend::sorted1d)
    throw std::invalid_argument(
        "yule_run: right-uniform requires the sorted1d backend");
  const bool track = (options.recorders & kRecordDstar) != 0;

  TimedTrace timed{Trace{spec,
                         options.seed,
                         options.replica,
                         0,
                         0.0,
                         0.0,
                         {},
                         ParticleConfig(dim, backend, track)},
                   {},
                   options.horizon,
                   0.0};
  Trace& trace = timed.trace;
  const auto initial =
      spec.initial.empty() ? default_initial(spec.variant) : spec.initial;
  for (const auto& p : initial) trace.config.insert(p, std::nullopt);
  trace.initial_min = trace.config.min1d;
  trace.initial_max = trace.config.max1d;
  timed.initial_dstar = (track && trace.config.size() >= 2)
                            ? trace.config.index.max_spacing()
                            : std::numeric_limits<double>::quiet_NaN();

  RandomStream rng(options.seed, options.replica);
  double clock = 0.0;
  while (true) {
    const double rate = static_cast<double>(trace.config.size());
    clock += rng.exponential(rate);
    if (clock > options.horizon) break;
    if (timed.birth_times.size() >= options.cap)
      throw std::runtime_error("yule_run: birth budget exceeded");
    StepRecord rec = step(trace.config, spec.variant, rng, options.recorders);
    if (options.recorders & kKeepRecords) trace.records.push_back(rec);
    timed.birth_times.push_back(clock);
    ++trace.steps;
  }
  return timed;
}

TimedTrace yule_run(const ModelSpec& spec, double horizon, uint64_t seed) {
  YuleOptions options;
  options.horizon = horizon;
  options.seed = seed;
  return yule_run(spec, options);
}

double dstar_at(const TimedTrace& timed, double t) {
  if (timed.trace.steps > 0 && timed.trace.records.empty())
    throw std::runtime_error("dstar_at: trace was run without records");
  const auto& births = timed.birth_times;
  const auto it = std::upper_bound(births.begin(), births.end(), t);
  if (it == births.begin()) {
    if (std::isnan(timed.initial_dstar))
      throw std::runtime_error("dstar_at: spacing was not tracked");
    return timed.initial_dstar;
  }
  const std::size_t k = static_cast<std::size_t>(it - births.begin()) - 1;
  const double v = timed.trace.records[k].dstar;
  if (std::isnan(v))
    throw std::runtime_error("dstar_at: spacing was not tracked");
  return v;
}

DecayFit spacing_decay_fit(std::span<const TimedTrace> traces,
                           const DisplacementLaw& law,
                           std::span<const double> time_grid) {
  if (traces.size() < 100)
    throw std::invalid_argument(
        "spacing_decay_fit: needs at least 100 replicas");
  if (time_grid.size() < 2)
    throw std::invalid_argument(
        "spacing_decay_fit: time grid must have at least two points");
  for (std::size_t i = 1; i < time_grid.size(); ++i)
    if (!(time_grid[i] > time_grid[i - 1]))
      throw std::invalid_argument(
          "spacing_decay_fit: time grid must be increasing");
  for (const auto& tr : traces)
    if (time_grid.back() > tr.horizon)
      throw std::invalid_argument(
          "spacing_decay_fit: grid extends past a trace horizon");

  std::vector<double> log_mean(time_grid.size());
  for (std::size_t j = 0; j < time_grid.size(); ++j) {
    double sum = 0.0;
    for (const auto& tr : traces) sum += dstar_at(tr, time_grid[j]);
    log_mean[j] = std::log(sum / static_cast<double>(traces.size()));
  }
  const stats::LinearFit fit = stats::linear_fit(time_grid, log_mean);
  const TheoryConstants tc = constants(law);
  return {fit.slope, fit.intercept, -(1.0 - tc.C - tc.C_hat)};
}

}  // namespace lisa
