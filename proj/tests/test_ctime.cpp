#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "lisa/ctime.hpp"
#include "lisa/stats.hpp"

using namespace lisa;

TEST_CASE("zero horizon produces no births") {
  YuleOptions opts;
  opts.horizon = 0.0;
  opts.seed = 1;
  const TimedTrace timed = yule_run({CloseUniformModel{}, {}}, opts);
  CHECK(timed.trace.config.size() == 2);
  CHECK(timed.birth_times.empty());
  CHECK(timed.trace.steps == 0);

  CHECK_THROWS_AS(
      yule_run({CloseUniformModel{}, {}}, YuleOptions{-1.0, 1, 0}),
      std::invalid_argument);
}

TEST_CASE("timed runs are reproducible") {
  YuleOptions opts;
  opts.horizon = 3.0;
  opts.seed = 42;
  opts.replica = 7;
  opts.recorders = kRecordDstar | kKeepRecords;
  const TimedTrace a = yule_run({CloseUniformModel{}, {}}, opts);
  const TimedTrace b = yule_run({CloseUniformModel{}, {}}, opts);
  REQUIRE(a.birth_times.size() == b.birth_times.size());
  for (std::size_t i = 0; i < a.birth_times.size(); ++i)
    REQUIRE(a.birth_times[i] == b.birth_times[i]);
  const auto xa = a.trace.config.index.column(0);
  const auto xb = b.trace.config.index.column(0);
  for (std::size_t i = 0; i < xa.size(); ++i) REQUIRE(xa[i] == xb[i]);

  for (std::size_t i = 1; i < a.birth_times.size(); ++i)
    REQUIRE(a.birth_times[i] > a.birth_times[i - 1]);
  REQUIRE(a.birth_times.back() <= opts.horizon);
}

TEST_CASE("holding times are exponential in the population size") {
  const int reps = 4000;
  std::vector<double> first, second;
  for (int r = 0; r < reps; ++r) {
    YuleOptions opts;
    opts.horizon = 4.0;
    opts.seed = 2025;
    opts.replica = static_cast<uint64_t>(r);
    const TimedTrace timed = yule_run({CloseUniformModel{}, {}}, opts);
    // missing the horizon with fewer than two births has probability 1e-3
    if (timed.birth_times.size() < 2) continue;
    first.push_back(timed.birth_times[0]);
    second.push_back(timed.birth_times[1] - timed.birth_times[0]);
  }
  REQUIRE(first.size() > 3900);
  const auto ks1 = stats::ks_test_one_sample(
      first, [](double t) { return t <= 0 ? 0.0 : 1.0 - std::exp(-2.0 * t); });
  CHECK(ks1.p_value > 1e-3);
  const auto ks2 = stats::ks_test_one_sample(
      second,
      [](double t) { return t <= 0 ? 0.0 : 1.0 - std::exp(-3.0 * t); });
  CHECK(ks2.p_value > 1e-3);
}

TEST_CASE("population growth matches the branching mean") {
  const double T = 1.0;
  const int reps = 3000;
  std::vector<double> sizes;
  for (int r = 0; r < reps; ++r) {
    YuleOptions opts;
    opts.horizon = T;
    opts.seed = 99;
    opts.replica = static_cast<uint64_t>(r);
    const TimedTrace timed = yule_run({CloseUniformModel{}, {}}, opts);
    sizes.push_back(static_cast<double>(timed.trace.config.size()));
  }
  const double m = stats::mean(sizes);
  const double se = stats::standard_error(sizes);
  CHECK(std::abs(m - 2.0 * std::exp(T)) < 4.0 * se);
}

TEST_CASE("first birth placement agrees with the discrete chain") {
  const int reps = 3000;
  std::vector<double> timed_x, discrete_x;
  for (int r = 0; r < reps; ++r) {
    // placement draws are independent of the clock, so conditioning on a
    // birth before the horizon does not tilt the first location
    YuleOptions yopts;
    yopts.horizon = 0.3;
    yopts.seed = 31;
    yopts.replica = static_cast<uint64_t>(r);
    yopts.recorders = kKeepRecords;
    const TimedTrace timed = yule_run({CloseUniformModel{}, {}}, yopts);
    if (!timed.trace.records.empty())
      timed_x.push_back(timed.trace.records[0].x_new[0]);

    RunOptions dopts;
    dopts.steps = 1;
    dopts.seed = 7700 + static_cast<uint64_t>(r);
    dopts.recorders = kKeepRecords;
    const Trace tr = run({CloseUniformModel{}, {}}, dopts);
    discrete_x.push_back(tr.records[0].x_new[0]);
  }
  REQUIRE(timed_x.size() > 500);
  const auto res = stats::ks_test_two_sample(timed_x, discrete_x);
  CHECK(res.p_value > 1e-3);
}

TEST_CASE("spacing lookup is piecewise constant between births") {
  YuleOptions opts;
  opts.horizon = 2.0;
  opts.seed = 17;
  opts.recorders = kRecordDstar | kKeepRecords;
  const TimedTrace timed = yule_run({CloseUniformModel{}, {}}, opts);
  REQUIRE(!timed.birth_times.empty());

  CHECK(dstar_at(timed, 0.0) == timed.initial_dstar);
  CHECK(dstar_at(timed, timed.birth_times[0] * 0.5) == timed.initial_dstar);
  CHECK(dstar_at(timed, timed.birth_times[0]) ==
        timed.trace.records[0].dstar);
  const double t_end = timed.horizon;
  CHECK(dstar_at(timed, t_end) == timed.trace.records.back().dstar);
  for (std::size_t i = 1; i < timed.birth_times.size(); ++i) {
    const double mid =
        0.5 * (timed.birth_times[i - 1] + timed.birth_times[i]);
    CHECK(dstar_at(timed, mid) == timed.trace.records[i - 1].dstar);
  }

  YuleOptions lean = opts;
  lean.recorders = kRecordNone;
  const TimedTrace no_rec = yule_run({CloseUniformModel{}, {}}, lean);
  CHECK_THROWS_AS(dstar_at(no_rec, 1.0), std::runtime_error);
}

TEST_CASE("decay fit input validation") {
  std::vector<TimedTrace> traces;
  YuleOptions opts;
  opts.horizon = 3.0;
  opts.seed = 5;
  opts.recorders = kRecordDstar | kKeepRecords;
  for (uint64_t r = 0; r < 120; ++r) {
    opts.replica = r;
    traces.push_back(yule_run({CloseUniformModel{}, {}}, opts));
  }
  const std::vector<double> grid = {1.0, 1.5, 2.0, 2.5, 3.0};
  const DecayFit fit = spacing_decay_fit(traces, UniformSymmetric{}, grid);
  CHECK(std::isfinite(fit.slope));
  // close-uniform spacing shrinks in time
  CHECK(fit.slope < 0.0);
  CHECK(fit.contract_rate == doctest::Approx(0.0).epsilon(1).scale(1e-12));

  std::vector<TimedTrace> few;
  for (int i = 0; i < 50; ++i) few.push_back(traces[i]);
  CHECK_THROWS_AS(spacing_decay_fit(few, UniformSymmetric{}, grid),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      spacing_decay_fit(traces, UniformSymmetric{}, std::vector<double>{1.0}),
      std::invalid_argument);
  CHECK_THROWS_AS(spacing_decay_fit(traces, UniformSymmetric{},
                                    std::vector<double>{2.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(spacing_decay_fit(traces, UniformSymmetric{},
                                    std::vector<double>{1.0, 99.0}),
                  std::invalid_argument);
}

TEST_CASE("the birth budget is enforced") {
  YuleOptions opts;
  opts.horizon = 100.0;
  opts.seed = 3;
  opts.cap = 5;
  CHECK_THROWS_WITH_AS(yule_run({CloseUniformModel{}, {}}, opts),
                       "yule_run: birth budget exceeded",
                       std::runtime_error);
}
