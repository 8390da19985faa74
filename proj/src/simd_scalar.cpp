#include "lisa/simd.hpp"

#include <limits>

// Reference kernels. Compiled with FP contraction off so the element-wise
// arithmetic matches the vector variants exactly.

namespace lisa::simd::detail {

namespace {

constexpr uint32_t kMul0 = 0xD2511F53u;
constexpr uint32_t kMul1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

constexpr double kTo53 = 0x1.0p-53;

}  // namespace

void philox_block(uint32_t key0, uint32_t key1, uint32_t substream,
                  uint64_t block, uint32_t out[4]) {
  uint32_t c0 = static_cast<uint32_t>(block);
  uint32_t c1 = static_cast<uint32_t>(block >> 32);
  uint32_t c2 = substream;
  uint32_t c3 = 0;
  uint32_t k0 = key0;
  uint32_t k1 = key1;
  for (int r = 0; r < 10; ++r) {
    uint64_t p0 = static_cast<uint64_t>(kMul0) * c0;
    uint64_t p1 = static_cast<uint64_t>(kMul1) * c2;
    uint32_t n0 = static_cast<uint32_t>(p1 >> 32) ^ c1 ^ k0;
    uint32_t n1 = static_cast<uint32_t>(p1);
    uint32_t n2 = static_cast<uint32_t>(p0 >> 32) ^ c3 ^ k1;
    uint32_t n3 = static_cast<uint32_t>(p0);
    c0 = n0;
    c1 = n1;
    c2 = n2;
    c3 = n3;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  out[0] = c0;
  out[1] = c1;
  out[2] = c2;
  out[3] = c3;
}

void philox_uniform2_scalar(uint32_t key0, uint32_t key1, uint32_t substream,
                            uint64_t block0, std::size_t nblocks, double* out) {
  uint32_t w[4];
  for (std::size_t i = 0; i < nblocks; ++i) {
    philox_block(key0, key1, substream, block0 + i, w);
    uint64_t a = (static_cast<uint64_t>(w[1]) << 32) | w[0];
    uint64_t b = (static_cast<uint64_t>(w[3]) << 32) | w[2];
    out[2 * i] = static_cast<double>(a >> 11) * kTo53;
    out[2 * i + 1] = static_cast<double>(b >> 11) * kTo53;
  }
}

double min_sq_dist_1d_scalar(const double* xs, std::size_t n, double q) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double d = xs[i] - q;
    double s = d * d;
    if (s < best) best = s;
  }
  return best;
}

double min_sq_dist_2d_scalar(const double* xs, const double* ys, std::size_t n,
                             double qx, double qy) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double dx = xs[i] - qx;
    double dy = ys[i] - qy;
    double s = dx * dx + dy * dy;
    if (s < best) best = s;
  }
  return best;
}

double ramp_mixture_sum_scalar(const double* lo, const double* w, std::size_t n,
                               double t) {
  // Four striped partial sums reduced as ((s0+s2)+(s1+s3)), the exact
  // addition order of the vector variant; anything else breaks bit-equality.
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t k = 0; k < 4; ++k) {
      double v = (t - lo[i + k]) * w[i + k];
      if (v < 0.0) v = 0.0;
      if (v > 1.0) v = 1.0;
      s[k] += v;
    }
  }
  double sum = (s[0] + s[2]) + (s[1] + s[3]);
  for (; i < n; ++i) {
    double v = (t - lo[i]) * w[i];
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    sum += v;
  }
  return sum;
}

}  // namespace lisa::simd::detail
