#pragma once

#include <cstddef>
#include <cstdint>

// Compute kernels with a scalar reference implementation and, when the build
// and CPU allow it, an AVX2 variant. The backend is picked once at startup;
// LISA_SIMD=scalar|avx2 overrides the detection. Both variants of a kernel
// must produce bit-identical results, which the unit tests enforce.

namespace lisa::simd {

enum class Backend { scalar, avx2 };

bool avx2_available();
Backend active_backend();
// Throws std::runtime_error if the requested backend is not available.
void force_backend(Backend b);
const char* backend_name(Backend b);

// min_i (xs[i] - q)^2, +inf for n == 0.
double min_sq_dist_1d(const double* xs, std::size_t n, double q);
// min_i (xs[i] - qx)^2 + (ys[i] - qy)^2, +inf for n == 0.
double min_sq_dist_2d(const double* xs, const double* ys, std::size_t n,
                      double qx, double qy);
// sum_k clamp((t - lo[k]) * w[k], 0, 1); the ramp pieces of a mixture CDF.
double ramp_mixture_sum(const double* lo, const double* w, std::size_t n,
                        double t);
// Philox-4x32-10 counter blocks (key0,key1; counter = block,substream,0):
// writes two doubles in [0,1) per block for blocks [block0, block0+nblocks).
void philox_uniform2(uint32_t key0, uint32_t key1, uint32_t substream,
                     uint64_t block0, std::size_t nblocks, double* out);

namespace detail {

// One Philox block -> four 32-bit words. Shared by the scalar kernel and the
// per-draw path in RandomStream.
void philox_block(uint32_t key0, uint32_t key1, uint32_t substream,
                  uint64_t block, uint32_t out[4]);

double min_sq_dist_1d_scalar(const double* xs, std::size_t n, double q);
double min_sq_dist_2d_scalar(const double* xs, const double* ys, std::size_t n,
                             double qx, double qy);
double ramp_mixture_sum_scalar(const double* lo, const double* w,
                               std::size_t n, double t);
void philox_uniform2_scalar(uint32_t key0, uint32_t key1, uint32_t substream,
                            uint64_t block0, std::size_t nblocks, double* out);

double min_sq_dist_1d_avx2(const double* xs, std::size_t n, double q);
double min_sq_dist_2d_avx2(const double* xs, const double* ys, std::size_t n,
                           double qx, double qy);
double ramp_mixture_sum_avx2(const double* lo, const double* w, std::size_t n,
                             double t);
void philox_uniform2_avx2(uint32_t key0, uint32_t key1, uint32_t substream,
                          uint64_t block0, std::size_t nblocks, double* out);

}  // namespace detail

}  // namespace lisa::simd
