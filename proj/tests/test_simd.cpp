#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>

#include "lisa/simd.hpp"

namespace {

using namespace lisa;

// Straight-line Philox-4x32-10 with all four counter words free, written
// independently of the library kernel so the published vectors check both.
void philox_reference(const uint32_t ctr[4], const uint32_t key[2],
                      uint32_t out[4]) {
  uint32_t c[4] = {ctr[0], ctr[1], ctr[2], ctr[3]};
  uint32_t k[2] = {key[0], key[1]};
  for (int round = 0; round < 10; ++round) {
    const uint64_t p0 = 0xD2511F53ull * c[0];
    const uint64_t p1 = 0xCD9E8D57ull * c[2];
    const uint32_t n[4] = {
        static_cast<uint32_t>(p1 >> 32) ^ c[1] ^ k[0],
        static_cast<uint32_t>(p1),
        static_cast<uint32_t>(p0 >> 32) ^ c[3] ^ k[1],
        static_cast<uint32_t>(p0)};
    std::memcpy(c, n, sizeof c);
    k[0] += 0x9E3779B9u;
    k[1] += 0xBB67AE85u;
  }
  std::memcpy(out, c, sizeof c);
}

uint64_t mix(uint64_t& s) {
  s += 0x9E3779B97F4A7C15ull;
  uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

bool same_bits(double a, double b) {
  return std::memcmp(&a, &b, sizeof a) == 0;
}

}  // namespace

TEST_CASE("philox matches the published vectors") {
  {
    const uint32_t ctr[4] = {0, 0, 0, 0};
    const uint32_t key[2] = {0, 0};
    uint32_t out[4];
    philox_reference(ctr, key, out);
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);
  }
  {
    const uint32_t ctr[4] = {0x243f6a88u, 0x85a308d3u, 0x13198a2eu,
                             0x03707344u};
    const uint32_t key[2] = {0xa4093822u, 0x299f31d0u};
    uint32_t out[4];
    philox_reference(ctr, key, out);
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);
  }
}

TEST_CASE("philox_block agrees with the reference for every key layout") {
  // library counter layout: (block lo, block hi, substream, 0)
  {
    uint32_t out[4];
    simd::detail::philox_block(0, 0, 0, 0, out);
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[3] == 0x9b00dbd8u);
  }
  uint64_t s = 42;
  for (int i = 0; i < 200; ++i) {
    const uint32_t key0 = static_cast<uint32_t>(mix(s));
    const uint32_t key1 = static_cast<uint32_t>(mix(s));
    const uint32_t sub = static_cast<uint32_t>(mix(s));
    const uint64_t block = mix(s);
    const uint32_t ctr[4] = {static_cast<uint32_t>(block),
                             static_cast<uint32_t>(block >> 32), sub, 0};
    const uint32_t key[2] = {key0, key1};
    uint32_t want[4], got[4];
    philox_reference(ctr, key, want);
    simd::detail::philox_block(key0, key1, sub, block, got);
    REQUIRE(std::memcmp(want, got, sizeof want) == 0);
  }
}

TEST_CASE("philox_uniform2 packs two 53-bit doubles per block") {
  double out[8];
  simd::detail::philox_uniform2_scalar(7, 9, 2, 100, 4, out);
  for (double v : out) {
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  uint32_t w[4];
  simd::detail::philox_block(7, 9, 2, 101, w);
  const uint64_t a = (static_cast<uint64_t>(w[1]) << 32) | w[0];
  const uint64_t b = (static_cast<uint64_t>(w[3]) << 32) | w[2];
  CHECK(same_bits(out[2], static_cast<double>(a >> 11) * 0x1.0p-53));
  CHECK(same_bits(out[3], static_cast<double>(b >> 11) * 0x1.0p-53));
}

TEST_CASE("backend control") {
  CHECK(simd::backend_name(simd::Backend::scalar) ==
        std::string("scalar"));
  CHECK(simd::backend_name(simd::Backend::avx2) == std::string("avx2"));
  const simd::Backend before = simd::active_backend();
  simd::force_backend(simd::Backend::scalar);
  CHECK(simd::active_backend() == simd::Backend::scalar);
  if (!simd::avx2_available())
    CHECK_THROWS_AS(simd::force_backend(simd::Backend::avx2),
                    std::runtime_error);
  simd::force_backend(before);
}

TEST_CASE("vector kernels are bit-identical to the scalar ones") {
  if (!simd::avx2_available()) return;
  uint64_t s = 7;
  for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{3},
                        std::size_t{4}, std::size_t{7}, std::size_t{8},
                        std::size_t{13}, std::size_t{64}, std::size_t{201}}) {
    std::vector<double> xs(n), ys(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = static_cast<double>(mix(s) >> 11) * 0x1.0p-53 * 10 - 5;
      ys[i] = static_cast<double>(mix(s) >> 11) * 0x1.0p-53 * 10 - 5;
      w[i] = static_cast<double>(mix(s) >> 11) * 0x1.0p-53 * 3;
    }
    const double q = 0.37, qy = -1.25;
    CHECK(same_bits(
        simd::detail::min_sq_dist_1d_scalar(xs.data(), n, q),
        simd::detail::min_sq_dist_1d_avx2(xs.data(), n, q)));
    CHECK(same_bits(
        simd::detail::min_sq_dist_2d_scalar(xs.data(), ys.data(), n, q, qy),
        simd::detail::min_sq_dist_2d_avx2(xs.data(), ys.data(), n, q, qy)));
    CHECK(same_bits(
        simd::detail::ramp_mixture_sum_scalar(xs.data(), w.data(), n, 0.8),
        simd::detail::ramp_mixture_sum_avx2(xs.data(), w.data(), n, 0.8)));
    if (n > 0) {
      std::vector<double> a(2 * n), b(2 * n);
      simd::detail::philox_uniform2_scalar(11, 22, 3, 1000, n, a.data());
      simd::detail::philox_uniform2_avx2(11, 22, 3, 1000, n, b.data());
      CHECK(std::memcmp(a.data(), b.data(), 2 * n * sizeof(double)) == 0);
    }
  }
}

TEST_CASE("kernel values match direct evaluation") {
  const std::vector<double> xs = {0.0, 1.0, -2.0, 0.5};
  CHECK(simd::min_sq_dist_1d(xs.data(), xs.size(), 0.4) ==
        doctest::Approx(0.01).epsilon(1e-14));
  CHECK(simd::min_sq_dist_1d(xs.data(), 0, 0.4) ==
        std::numeric_limits<double>::infinity());
  const std::vector<double> ys = {0.0, 0.0, 1.0, -1.0};
  CHECK(simd::min_sq_dist_2d(xs.data(), ys.data(), 4, 0.5, -0.9) ==
        doctest::Approx(0.01).epsilon(1e-12));

  // ramp pieces: sum of clamped linear sections against a long-double sum
  const std::vector<double> lo = {-1.0, 0.0, 0.25, 2.0};
  const std::vector<double> w = {0.5, 2.0, 1.0, 3.0};
  for (double t : {-2.0, -0.5, 0.1, 0.3, 1.0, 5.0}) {
    long double want = 0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      long double v = (static_cast<long double>(t) - lo[i]) * w[i];
      want += std::min<long double>(1, std::max<long double>(0, v));
    }
    CHECK(simd::ramp_mixture_sum(lo.data(), w.data(), lo.size(), t) ==
          doctest::Approx(static_cast<double>(want)).epsilon(1e-12));
  }
}
