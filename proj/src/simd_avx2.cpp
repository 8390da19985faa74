#include "lisa/simd.hpp"

#include <immintrin.h>

#include <limits>

namespace lisa::simd::detail {

namespace {

constexpr double kTo53 = 0x1.0p-53;

// Four blocks per pass; each 64-bit lane carries one zero-extended 32-bit word
// so _mm256_mul_epu32 yields the full 64-bit product per lane.
inline void philox4_avx2(uint32_t key0, uint32_t key1, uint32_t substream,
                         uint64_t block0, double* out) {
  const __m256i mask32 = _mm256_set1_epi64x(0xFFFFFFFFll);
  const __m256i mul0 = _mm256_set1_epi64x(0xD2511F53ll);
  const __m256i mul1 = _mm256_set1_epi64x(0xCD9E8D57ll);
  const __m256i weyl0 = _mm256_set1_epi64x(0x9E3779B9ll);
  const __m256i weyl1 = _mm256_set1_epi64x(0xBB67AE85ll);

  __m256i c0 = _mm256_set_epi64x(
      static_cast<long long>((block0 + 3) & 0xFFFFFFFFu),
      static_cast<long long>((block0 + 2) & 0xFFFFFFFFu),
      static_cast<long long>((block0 + 1) & 0xFFFFFFFFu),
      static_cast<long long>(block0 & 0xFFFFFFFFu));
  __m256i c1 = _mm256_set_epi64x(static_cast<long long>((block0 + 3) >> 32),
                                 static_cast<long long>((block0 + 2) >> 32),
                                 static_cast<long long>((block0 + 1) >> 32),
                                 static_cast<long long>(block0 >> 32));
  __m256i c2 = _mm256_set1_epi64x(static_cast<long long>(substream));
  __m256i c3 = _mm256_setzero_si256();
  __m256i k0 = _mm256_set1_epi64x(static_cast<long long>(key0));
  __m256i k1 = _mm256_set1_epi64x(static_cast<long long>(key1));

  for (int r = 0; r < 10; ++r) {
    __m256i p0 = _mm256_mul_epu32(c0, mul0);
    __m256i p1 = _mm256_mul_epu32(c2, mul1);
    __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p1, 32), c1), k0);
    __m256i n1 = _mm256_and_si256(p1, mask32);
    __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p0, 32), c3), k1);
    __m256i n3 = _mm256_and_si256(p0, mask32);
    c0 = n0;
    c1 = n1;
    c2 = n2;
    c3 = n3;
    k0 = _mm256_and_si256(_mm256_add_epi64(k0, weyl0), mask32);
    k1 = _mm256_and_si256(_mm256_add_epi64(k1, weyl1), mask32);
  }

  alignas(32) uint64_t w0[4], w1[4], w2[4], w3[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(w0), c0);
  _mm256_store_si256(reinterpret_cast<__m256i*>(w1), c1);
  _mm256_store_si256(reinterpret_cast<__m256i*>(w2), c2);
  _mm256_store_si256(reinterpret_cast<__m256i*>(w3), c3);
  for (int j = 0; j < 4; ++j) {
    uint64_t a = (w1[j] << 32) | w0[j];
    uint64_t b = (w3[j] << 32) | w2[j];
    out[2 * j] = static_cast<double>(a >> 11) * kTo53;
    out[2 * j + 1] = static_cast<double>(b >> 11) * kTo53;
  }
}

inline double hmin(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d m = _mm_min_pd(lo, hi);
  m = _mm_min_sd(m, _mm_unpackhi_pd(m, m));
  return _mm_cvtsd_f64(m);
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  s = _mm_add_sd(s, _mm_unpackhi_pd(s, s));
  return _mm_cvtsd_f64(s);
}

}  // namespace

void philox_uniform2_avx2(uint32_t key0, uint32_t key1, uint32_t substream,
                          uint64_t block0, std::size_t nblocks, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= nblocks; i += 4)
    philox4_avx2(key0, key1, substream, block0 + i, out + 2 * i);
  if (i < nblocks)
    philox_uniform2_scalar(key0, key1, substream, block0 + i, nblocks - i,
                           out + 2 * i);
}

double min_sq_dist_1d_avx2(const double* xs, std::size_t n, double q) {
  const __m256d qv = _mm256_set1_pd(q);
  __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(xs + i), qv);
    best = _mm256_min_pd(best, _mm256_mul_pd(d, d));
  }
  double m = hmin(best);
  for (; i < n; ++i) {
    double d = xs[i] - q;
    double s = d * d;
    if (s < m) m = s;
  }
  return m;
}

double min_sq_dist_2d_avx2(const double* xs, const double* ys, std::size_t n,
                           double qx, double qy) {
  const __m256d qxv = _mm256_set1_pd(qx);
  const __m256d qyv = _mm256_set1_pd(qy);
  __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), qxv);
    __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), qyv);
    best = _mm256_min_pd(
        best, _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));
  }
  double m = hmin(best);
  for (; i < n; ++i) {
    double dx = xs[i] - qx;
    double dy = ys[i] - qy;
    double s = dx * dx + dy * dy;
    if (s < m) m = s;
  }
  return m;
}

double ramp_mixture_sum_avx2(const double* lo, const double* w, std::size_t n,
                             double t) {
  const __m256d tv = _mm256_set1_pd(t);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = zero;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_mul_pd(_mm256_sub_pd(tv, _mm256_loadu_pd(lo + i)),
                              _mm256_loadu_pd(w + i));
    acc = _mm256_add_pd(acc, _mm256_max_pd(zero, _mm256_min_pd(one, v)));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) {
    double v = (t - lo[i]) * w[i];
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    sum += v;
  }
  return sum;
}

}  // namespace lisa::simd::detail
