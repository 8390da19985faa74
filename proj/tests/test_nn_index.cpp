#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <initializer_list>
#include <limits>
#include <vector>

#include <doctest.h>

#include "lisa/nn_index.hpp"
#include "lisa/rng.hpp"

using namespace lisa;

namespace {

uint64_t put(NeighborIndex& idx, std::initializer_list<double> x) {
  return idx.insert(std::vector<double>(x));
}

}  // namespace

TEST_CASE("construction constraints") {
  CHECK_THROWS_AS(NeighborIndex(0, NeighborIndex::Backend::brute, false),
                  std::invalid_argument);
  CHECK_THROWS_AS(NeighborIndex(2, NeighborIndex::Backend::sorted1d, false),
                  std::invalid_argument);
  CHECK_THROWS_AS(NeighborIndex(4, NeighborIndex::Backend::grid, false),
                  std::invalid_argument);
  CHECK(NeighborIndex::default_backend(1) ==
        NeighborIndex::Backend::sorted1d);
  CHECK(NeighborIndex::default_backend(2) == NeighborIndex::Backend::grid);
  CHECK(NeighborIndex::default_backend(5) == NeighborIndex::Backend::brute);
}

TEST_CASE("small 1D configuration by hand") {
  NeighborIndex idx(1, NeighborIndex::Backend::sorted1d, true);
  CHECK(put(idx, {0.0}) == 1);
  CHECK_THROWS_AS(idx.nearest_excl(1), std::runtime_error);
  CHECK_THROWS_AS(idx.max_spacing(), std::runtime_error);
  CHECK(put(idx, {1.0}) == 2);
  CHECK(idx.nearest_excl(1) == 1.0);
  CHECK(idx.max_spacing() == 1.0);
  CHECK(put(idx, {0.25}) == 3);
  CHECK(idx.nearest_excl(1) == 0.25);
  CHECK(idx.nearest_excl(2) == 0.75);
  CHECK(idx.nearest_excl(3) == 0.25);
  CHECK(idx.max_spacing() == 0.75);
  CHECK(idx.nearest_to(std::vector<double>{0.3}) ==
        doctest::Approx(0.05).epsilon(1e-15));

  CHECK(idx.successor_gap(1).value() == 0.25);
  CHECK(idx.successor_gap(3).value() == 0.75);
  CHECK_FALSE(idx.successor_gap(2).has_value());

  CHECK(idx.coordinate(3, 0) == 0.25);
  double out[1];
  idx.point(2, out);
  CHECK(out[0] == 1.0);
  CHECK(idx.column(0).size() == 3);
  CHECK_THROWS_AS(idx.nearest_excl(9), std::out_of_range);
  CHECK_THROWS_AS(idx.coordinate(1, 2), std::out_of_range);
}

TEST_CASE("closed-ball counting includes the boundary") {
  NeighborIndex idx(1, NeighborIndex::Backend::sorted1d, false);
  put(idx, {0.0});
  put(idx, {0.3});
  put(idx, {0.7});
  const std::vector<double> q = {0.0};
  CHECK(idx.count_within(q, 0.3) == 2);
  CHECK(idx.count_within(q, std::nextafter(0.3, 0.0)) == 1);
  CHECK(idx.count_within(q, 0.0) == 1);
  CHECK(idx.count_within(q, 2.0) == 3);
  CHECK_THROWS_AS(idx.count_within(q, -0.1), std::invalid_argument);
}

TEST_CASE("coincident points") {
  for (auto backend :
       {NeighborIndex::Backend::sorted1d, NeighborIndex::Backend::brute}) {
    NeighborIndex idx(1, backend, backend == NeighborIndex::Backend::sorted1d);
    put(idx, {0.5});
    put(idx, {0.5});
    put(idx, {0.9});
    CHECK(idx.nearest_excl(1) == 0.0);
    CHECK(idx.nearest_excl(2) == 0.0);
    CHECK(idx.nearest_excl(3) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(idx.count_within(std::vector<double>{0.5}, 0.0) == 2);
  }
}

TEST_CASE("backends answer identically in 1D") {
  NeighborIndex fast(1, NeighborIndex::Backend::sorted1d, true);
  NeighborIndex ref(1, NeighborIndex::Backend::brute, false);
  RandomStream rng(4242);
  for (int i = 0; i < 2000; ++i) {
    const std::vector<double> x = {rng.normal() * 2.0};
    const uint64_t a = fast.insert(x);
    const uint64_t b = ref.insert(x);
    REQUIRE(a == b);
    if (i >= 1) REQUIRE(fast.nearest_excl(a) == ref.nearest_excl(a));
    if (i % 50 == 0 && i >= 1) {
      REQUIRE(fast.max_spacing() == ref.max_spacing());
      const std::vector<double> q = {rng.uniform(-5.0, 5.0)};
      REQUIRE(fast.nearest_to(q) == ref.nearest_to(q));
      REQUIRE(fast.count_within(q, 0.7) == ref.count_within(q, 0.7));
      const uint64_t probe = 1 + rng.index(a);
      REQUIRE(fast.nearest_excl(probe) == ref.nearest_excl(probe));
    }
  }
}

TEST_CASE("backends answer identically in 2D") {
  NeighborIndex fast(2, NeighborIndex::Backend::grid, true);
  NeighborIndex ref(2, NeighborIndex::Backend::brute, false);
  RandomStream rng(777);
  for (int i = 0; i < 1200; ++i) {
    // mixed cluster scales stress the cell rebuild
    const double s = (i % 3 == 0) ? 8.0 : 0.25;
    const std::vector<double> x = {rng.normal() * s, rng.normal() * s};
    fast.insert(x);
    const uint64_t id = ref.insert(x);
    if (i >= 1) REQUIRE(fast.nearest_excl(id) == ref.nearest_excl(id));
    if (i % 40 == 0 && i >= 1) {
      REQUIRE(fast.max_spacing() == ref.max_spacing());
      const std::vector<double> q = {rng.uniform(-9.0, 9.0),
                                     rng.uniform(-9.0, 9.0)};
      REQUIRE(fast.nearest_to(q) == ref.nearest_to(q));
      REQUIRE(fast.count_within(q, 1.5) == ref.count_within(q, 1.5));
      const uint64_t probe = 1 + rng.index(id);
      REQUIRE(fast.nearest_excl(probe) == ref.nearest_excl(probe));
    }
  }
}

TEST_CASE("successor_gap needs the ordered backend") {
  NeighborIndex idx(2, NeighborIndex::Backend::grid, false);
  put(idx, {0.0, 0.0});
  CHECK_THROWS_AS(idx.successor_gap(1), std::runtime_error);
}

TEST_CASE("tracked spacing stays consistent through many inserts") {
  NeighborIndex idx(1, NeighborIndex::Backend::sorted1d, true);
  RandomStream rng(31);
  put(idx, {0.0});
  put(idx, {1.0});
  auto direct = [&idx]() {
    // in 1D every nearest neighbour is an adjacent point in sorted order
    std::vector<double> xs(idx.column(0).begin(), idx.column(0).end());
    std::sort(xs.begin(), xs.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double near = std::numeric_limits<double>::infinity();
      if (i > 0) near = std::min(near, xs[i] - xs[i - 1]);
      if (i + 1 < xs.size()) near = std::min(near, xs[i + 1] - xs[i]);
      worst = std::max(worst, near);
    }
    return worst;
  };
  for (int i = 0; i < 10000; ++i) {
    put(idx, {rng.uniform01()});
    if (i % 2000 == 0) REQUIRE(idx.max_spacing() == direct());
  }
  CHECK(idx.size() == 10002);
  CHECK(idx.max_spacing() == direct());
}
