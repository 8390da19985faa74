#include "lisa/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lisa/simd.hpp"

namespace lisa {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr double kTo53 = 0x1.0p-53;

}  // namespace

RandomStream::RandomStream(uint64_t seed, uint64_t replica, uint32_t substream)
    : seed_(seed), replica_(replica), sub_(substream) {
  uint64_t key = splitmix64(splitmix64(seed) ^ replica);
  key0_ = static_cast<uint32_t>(key);
  key1_ = static_cast<uint32_t>(key >> 32);
  cached_block_ = ~uint64_t{0};
}

uint64_t RandomStream::raw() {
  uint64_t block = next_draw_ >> 1;
  if (block != cached_block_) {
    uint32_t w[4];
    simd::detail::philox_block(key0_, key1_, sub_, block, w);
    buf_[0] = (static_cast<uint64_t>(w[1]) << 32) | w[0];
    buf_[1] = (static_cast<uint64_t>(w[3]) << 32) | w[2];
    cached_block_ = block;
  }
  return buf_[next_draw_++ & 1];
}

double RandomStream::uniform01() {
  return static_cast<double>(raw() >> 11) * kTo53;
}

double RandomStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double RandomStream::normal() {
  double u1 = uniform01();
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log1p(-u1));
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

double RandomStream::exponential(double rate) {
  if (!(rate > 0)) throw std::invalid_argument("exponential: rate must be > 0");
  return -std::log1p(-uniform01()) / rate;
}

uint64_t RandomStream::index(uint64_t n) {
  if (n == 0) throw std::invalid_argument("index: empty range");
  unsigned __int128 m = static_cast<unsigned __int128>(raw()) * n;
  auto lo = static_cast<uint64_t>(m);
  if (lo < n) {
    uint64_t t = (0 - n) % n;
    while (lo < t) {
      m = static_cast<unsigned __int128>(raw()) * n;
      lo = static_cast<uint64_t>(m);
    }
  }
  return static_cast<uint64_t>(m >> 64);
}

void RandomStream::fill_uniform01(double* out, std::size_t count) {
  std::size_t i = 0;
  while (i < count && (next_draw_ & 1) != 0) out[i++] = uniform01();
  std::size_t pairs = (count - i) / 2;
  if (pairs > 0) {
    simd::philox_uniform2(key0_, key1_, sub_, next_draw_ >> 1, pairs, out + i);
    next_draw_ += 2 * pairs;
    cached_block_ = ~uint64_t{0};
    i += 2 * pairs;
  }
  while (i < count) out[i++] = uniform01();
}

RandomStream RandomStream::substream(uint32_t id) const {
  RandomStream s(seed_, replica_, id);
  return s;
}

}  // namespace lisa
