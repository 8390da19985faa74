#include "lisa/simd.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace lisa::simd {

namespace {

struct Kernels {
  double (*min1d)(const double*, std::size_t, double);
  double (*min2d)(const double*, const double*, std::size_t, double, double);
  double (*ramp)(const double*, const double*, std::size_t, double);
  void (*philox2)(uint32_t, uint32_t, uint32_t, uint64_t, std::size_t, double*);
};

constexpr Kernels kScalar{detail::min_sq_dist_1d_scalar,
                          detail::min_sq_dist_2d_scalar,
                          detail::ramp_mixture_sum_scalar,
                          detail::philox_uniform2_scalar};

#ifdef LISA_HAVE_AVX2_TU
constexpr Kernels kAvx2{detail::min_sq_dist_1d_avx2,
                        detail::min_sq_dist_2d_avx2,
                        detail::ramp_mixture_sum_avx2,
                        detail::philox_uniform2_avx2};
#endif

Backend g_backend = [] {
#ifdef LISA_HAVE_AVX2_TU
  bool have = __builtin_cpu_supports("avx2");
#else
  bool have = false;
#endif
  if (const char* env = std::getenv("LISA_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && have) return Backend::avx2;
  }
  return have ? Backend::avx2 : Backend::scalar;
}();

const Kernels& kernels() {
#ifdef LISA_HAVE_AVX2_TU
  if (g_backend == Backend::avx2) return kAvx2;
#endif
  return kScalar;
}

}  // namespace

bool avx2_available() {
#ifdef LISA_HAVE_AVX2_TU
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend active_backend() { return g_backend; }

void force_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_available())
    throw std::runtime_error("avx2 backend not available on this machine");
  g_backend = b;
}

const char* backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

double min_sq_dist_1d(const double* xs, std::size_t n, double q) {
  return kernels().min1d(xs, n, q);
}

double min_sq_dist_2d(const double* xs, const double* ys, std::size_t n,
                      double qx, double qy) {
  return kernels().min2d(xs, ys, n, qx, qy);
}

double ramp_mixture_sum(const double* lo, const double* w, std::size_t n,
                        double t) {
  return kernels().ramp(lo, w, n, t);
}

void philox_uniform2(uint32_t key0, uint32_t key1, uint32_t substream,
                     uint64_t block0, std::size_t nblocks, double* out) {
  kernels().philox2(key0, key1, substream, block0, nblocks, out);
}

}  // namespace lisa::simd
