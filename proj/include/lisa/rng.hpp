#pragma once

#include <cstddef>
#include <cstdint>

namespace lisa {

// Counter-based stream: Philox-4x32-10 keyed by a hash of (seed, replica),
// with the draw index as counter. Draws are reproducible at random access,
// replicas are statistically independent, and substreams never overlap the
// parent stream. One u64 per draw; a double in [0,1) keeps the top 53 bits.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed, uint64_t replica = 0,
                        uint32_t substream = 0);

  uint64_t raw();
  double uniform01();
  double uniform(double lo, double hi);
  // Standard normal via Box-Muller; consumes exactly two uniform draws.
  double normal();
  double exponential(double rate);
  // Unbiased uniform index in {0, ..., n-1}.
  uint64_t index(uint64_t n);

  // Bit-identical to count repeated uniform01() calls, but batched through the
  // runtime-selected kernel backend.
  void fill_uniform01(double* out, std::size_t count);

  // Fresh stream with the same key and an independent counter space.
  RandomStream substream(uint32_t id) const;

  uint64_t position() const { return next_draw_; }
  uint64_t seed() const { return seed_; }
  uint64_t replica() const { return replica_; }

 private:
  uint64_t seed_;
  uint64_t replica_;
  uint32_t key0_;
  uint32_t key1_;
  uint32_t sub_;
  uint64_t next_draw_ = 0;
  uint64_t cached_block_;
  uint64_t buf_[2];
};

}  // namespace lisa
