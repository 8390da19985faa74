#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "lisa/estimators.hpp"
#include "lisa/stats.hpp"

using namespace lisa;

namespace {

EmpiricalMeasure atoms(std::vector<std::pair<double, double>> aw) {
  std::vector<double> pts;
  for (auto& [x, w] : aw)
    for (int k = 0; k < static_cast<int>(w * 4 + 0.5); ++k) pts.push_back(x);
  // build through the public constructor to keep weights consistent
  return empirical_measure(pts, true);
}

}  // namespace

TEST_CASE("empirical measures and their cdfs") {
  const std::vector<double> pts = {0.5, 0.1, 0.5, 0.9};
  const EmpiricalMeasure m = empirical_measure(pts, true);
  CHECK(m.atoms.size() == 3);
  CHECK(m.total == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.cdf(0.0) == 0.0);
  CHECK(m.cdf(0.1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(m.cdf(0.5) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(m.cdf_left(0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(m.cdf(2.0) == doctest::Approx(1.0).epsilon(1e-15));

  const EmpiricalMeasure raw = empirical_measure(pts, false);
  CHECK(raw.total == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(raw.cdf(0.5) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("sup distance between cdfs") {
  // step against the identity: worst gap is at the jump
  const EmpiricalMeasure single = empirical_measure(std::vector<double>{0.5}, true);
  CdfView uniform;
  uniform.value = [](double t) { return std::min(1.0, std::max(0.0, t)); };
  uniform.left = uniform.value;
  uniform.lo = 0.0;
  uniform.hi = 1.0;
  uniform.smooth = true;
  CHECK(ks_distance(single.view(), uniform) ==
        doctest::Approx(0.5).epsilon(1e-9));

  const EmpiricalMeasure a = empirical_measure(std::vector<double>{0.0, 0.5}, true);
  const EmpiricalMeasure b = empirical_measure(std::vector<double>{0.25, 0.75}, true);
  CHECK(ks_distance(a.view(), b.view()) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ks_distance(a.view(), a.view()) == 0.0);
}

TEST_CASE("exact transport distance on small measures") {
  const EmpiricalMeasure d0 = empirical_measure(std::vector<double>{0.0}, true);
  const EmpiricalMeasure d3 = empirical_measure(std::vector<double>{0.3}, true);
  CHECK(lp_oracle(d0, d3) == doctest::Approx(0.3).epsilon(1e-5));

  const EmpiricalMeasure half = empirical_measure(std::vector<double>{0.0, 1.0}, true);
  CHECK(lp_oracle(d0, half) == doctest::Approx(0.5).epsilon(1e-5));

  // identical measures are at distance zero
  CHECK(lp_oracle(half, half) == doctest::Approx(0.0).epsilon(1e-6));

  // symmetry and the general variant agreeing on equal masses
  CHECK(lp_oracle(d3, d0) == doctest::Approx(lp_oracle(d0, d3)).epsilon(1e-6));
  CHECK(lp_oracle_general(d0, half) ==
        doctest::Approx(lp_oracle(d0, half)).epsilon(1e-5));

  // mass mismatch is rejected by the strict variant only
  const EmpiricalMeasure heavy = empirical_measure(std::vector<double>{0.0, 1.0}, false);
  CHECK_THROWS_AS(lp_oracle(d0, heavy), std::invalid_argument);
  CHECK(lp_oracle_general(d0, heavy) > 0.0);

  std::vector<double> many(17);
  for (int i = 0; i < 17; ++i) many[static_cast<std::size_t>(i)] = i * 0.05;
  CHECK_THROWS_AS(lp_oracle(empirical_measure(many, true), d0),
                  std::invalid_argument);
}

TEST_CASE("transport distance is monotone in the shift") {
  const EmpiricalMeasure base = empirical_measure(std::vector<double>{0.0, 0.25, 0.5}, true);
  double prev = 0.0;
  for (double shift : {0.05, 0.1, 0.2, 0.4}) {
    std::vector<double> moved = {shift, 0.25 + shift, 0.5 + shift};
    const double d = lp_oracle(base, empirical_measure(moved, true));
    CHECK(d >= prev - 1e-9);
    CHECK(d <= shift + 1e-6);
    prev = d;
  }
}

TEST_CASE("consecutive-measure distance formula") {
  CHECK(lp_consecutive_formula(4, 0.3) ==
        doctest::Approx(0.25).epsilon(1e-15));
  CHECK(lp_consecutive_formula(4, 0.01) ==
        doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(lp_consecutive_formula(4, 0.1) ==
        doctest::Approx(0.1).epsilon(1e-15));
  CHECK_THROWS_AS(lp_consecutive_formula(0, 0.1), std::invalid_argument);
}

TEST_CASE("interval partition bookkeeping") {
  const IntervalPartition part({0.0, 1.0});
  CHECK(part.count() == 3);
  CHECK(part.interval_of(-0.5) == 0);
  CHECK(part.interval_of(0.0) == 1);
  CHECK(part.interval_of(0.5) == 1);
  CHECK(part.interval_of(1.0) == 2);
  CHECK(part.interval_of(7.0) == 2);
}

TEST_CASE("limiting interval-mass parameters") {
  // base of two points: middle interval has full weight
  CHECK(interval_beta_parameters(2, {1}) ==
        std::pair<double, double>{1.0, 1.0});
  // boundary intervals carry half weight
  CHECK(interval_beta_parameters(2, {0}) ==
        std::pair<double, double>{0.5, 1.5});
  CHECK(interval_beta_parameters(2, {0, 1}) ==
        std::pair<double, double>{1.5, 0.5});
  CHECK(interval_beta_parameters(4, {1, 2}) ==
        std::pair<double, double>{2.0, 2.0});
  CHECK_THROWS_AS(interval_beta_parameters(2, {}), std::invalid_argument);
  CHECK_THROWS_AS(interval_beta_parameters(2, {0, 1, 2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(interval_beta_parameters(2, {5}), std::invalid_argument);
  CHECK_THROWS_AS(interval_beta_parameters(2, {1, 1}), std::invalid_argument);
}

TEST_CASE("interval mass estimates share replica streams") {
  const IntervalPartition part({0.0, 1.0});
  const auto small = interval_mass_estimate(part, {1}, 60, 3, 99);
  const auto large = interval_mass_estimate(part, {1}, 60, 5, 99);
  REQUIRE(small.size() == 3);
  REQUIRE(large.size() == 5);
  for (int i = 0; i < 3; ++i) CHECK(small[i] == large[i]);
  for (double f : large) {
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
  }
}

TEST_CASE("local dimension of an evenly spaced configuration is one") {
  ParticleConfig c(1, NeighborIndex::Backend::sorted1d, false);
  const int n = 1000;
  for (int i = 0; i < n; ++i)
    c.insert(std::vector<double>{static_cast<double>(i) / (n - 1)},
             std::nullopt);
  const std::vector<double> radii = {0.01, 0.02, 0.04, 0.08};
  const double dim = local_dimension(c, 50, radii, 4321);
  CHECK(dim == doctest::Approx(1.0).epsilon(0.08));

  CHECK_THROWS_AS(local_dimension(c, 0, radii, 1), std::invalid_argument);
  ParticleConfig flat(2, NeighborIndex::Backend::grid, false);
  flat.insert(std::vector<double>{0.0, 0.0}, std::nullopt);
  flat.insert(std::vector<double>{1.0, 1.0}, std::nullopt);
  CHECK_THROWS_AS(local_dimension(flat, 5, radii, 1), std::invalid_argument);
}

TEST_CASE("next-point mixture law") {
  ParticleConfig c(1, NeighborIndex::Backend::sorted1d, false);
  c.insert(std::vector<double>{0.0}, std::nullopt);
  c.insert(std::vector<double>{1.0}, std::nullopt);
  const MixtureCdf mix(c, UniformSymmetric{});
  CHECK(mix.components() == 2);
  // both component scales are 1: mean of U[-1,1] and U[0,2] cdfs
  CHECK(mix.value(0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mix.value(-1.0) == 0.0);
  CHECK(mix.value(2.0) == 1.0);
  CHECK(mix.value(0.0) == doctest::Approx(0.25).epsilon(1e-12));

  for (double t : {-0.9, -0.3, 0.1, 0.5, 0.77, 1.4, 1.99})
    CHECK(mix.value(t) == doctest::Approx(mix.value_kernel(t)).epsilon(1e-12));

  // empirical next points against the mixture law
  RandomStream rng(31415);
  std::vector<double> draws(4000);
  for (auto& v : draws) {
    ParticleConfig cc(1, NeighborIndex::Backend::sorted1d, false);
    cc.insert(std::vector<double>{0.0}, std::nullopt);
    cc.insert(std::vector<double>{1.0}, std::nullopt);
    const StepRecord rec = step(cc, CloseUniformModel{}, rng);
    v = rec.x_new[0];
  }
  const auto res = stats::ks_test_one_sample(
      draws, [&mix](double t) { return mix.value(t); });
  CHECK(res.p_value > 1e-3);
}

TEST_CASE("duplicate particles become point-mass components") {
  ParticleConfig c(1, NeighborIndex::Backend::sorted1d, false);
  c.insert(std::vector<double>{0.0}, std::nullopt);
  c.insert(std::vector<double>{1.0}, std::nullopt);
  c.insert(std::vector<double>{0.5}, std::nullopt);
  c.insert(std::vector<double>{0.5}, std::nullopt);
  const MixtureCdf mix(c, UniformSymmetric{});
  CHECK(mix.components() == 4);
  CHECK(mix.degenerate_components() == 2);
  // regular components U[-0.5,0.5] and U[0.5,1.5] plus two atoms at 0.5
  CHECK(mix.value(0.25) == doctest::Approx(0.75 / 4.0).epsilon(1e-12));
  CHECK(mix.value(0.5) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(mix.value(2.0) == 1.0);
  for (double t : {-0.4, 0.1, 0.5, 0.9, 1.3})
    CHECK(mix.value(t) == doctest::Approx(mix.value_kernel(t)).epsilon(1e-12));

  const CdfView v = mix.view();
  REQUIRE(v.jump_points.size() == 2);
  CHECK(v.left(0.5) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(v.value(0.5) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(ks_distance(v, v) == 0.0);
  // the jump shows up against the smooth two-point mixture
  ParticleConfig base(1, NeighborIndex::Backend::sorted1d, false);
  base.insert(std::vector<double>{0.0}, std::nullopt);
  base.insert(std::vector<double>{1.0}, std::nullopt);
  const MixtureCdf smooth_mix(base, UniformSymmetric{});
  CHECK(ks_distance(v, smooth_mix.view()) >=
        doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("near-ulp spacings stay exact in the mixture cdf") {
  // h = 3*2^-48: the pair at 0.5 carries weight 1/(2h) ~ 4.7e13 each, enough
  // to wreck the t*(sum w) - sum(lo*w) evaluation if it went through the
  // prefix sums; the direct ramp path has to agree with the reference kernel
  const double h = 3.0 * std::ldexp(1.0, -48);
  ParticleConfig c(1, NeighborIndex::Backend::sorted1d, false);
  c.insert(std::vector<double>{0.0}, std::nullopt);
  c.insert(std::vector<double>{1.0}, std::nullopt);
  c.insert(std::vector<double>{0.5}, std::nullopt);
  c.insert(std::vector<double>{0.5 + h}, std::nullopt);
  const MixtureCdf mix(c, UniformSymmetric{});
  CHECK(mix.components() == 4);
  CHECK(mix.degenerate_components() == 0);
  for (double t : {-0.4, 0.1, 0.25, 0.5, 0.5 + h, 0.75, 1.3, 1.6}) {
    const double f = mix.value(t);
    CHECK(f == doctest::Approx(mix.value_kernel(t)).epsilon(1e-12));
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
  }
  // wide components U[-0.5,0.5] and ~U[0.5,1.5]; the narrow pair is fully
  // below 0.75 and fully above 0.25
  CHECK(mix.value(0.25) == doctest::Approx(0.75 / 4.0).epsilon(1e-9));
  CHECK(mix.value(0.75) == doctest::Approx(3.25 / 4.0).epsilon(1e-9));
  const CdfView v = mix.view();
  CHECK(v.jump_points.empty());
  // 2 kinks per component, narrow ones included
  CHECK(v.critical_points.size() == 8);
  CHECK(ks_distance(v, v) == 0.0);
}

TEST_CASE("mixture law against a normal-law configuration") {
  ParticleConfig c(1, NeighborIndex::Backend::sorted1d, false);
  c.insert(std::vector<double>{0.0}, std::nullopt);
  c.insert(std::vector<double>{0.5}, std::nullopt);
  c.insert(std::vector<double>{2.0}, std::nullopt);
  const MixtureCdf mix(c, ScaledNormal{0.4});
  // scales: 0.5, 0.5, 1.5
  const auto comp = [](double t, double c0, double s) {
    return stats::normal_cdf((t - c0) / (0.4 * s));
  };
  for (double t : {-1.0, 0.0, 0.4, 1.0, 2.5}) {
    const double want =
        (comp(t, 0.0, 0.5) + comp(t, 0.5, 0.5) + comp(t, 2.0, 1.5)) / 3.0;
    CHECK(mix.value(t) == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("helper measure builder is sane") {
  const EmpiricalMeasure m = atoms({{0.0, 0.25}, {1.0, 0.75}});
  CHECK(m.atoms.size() == 2);
  CHECK(m.atoms[0].second == doctest::Approx(0.25).epsilon(1e-12));
}
