#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

namespace lisa {

// Incremental nearest-neighbour index over a growing configuration.
// Three backends answer every query identically: an ordered structure for 1D,
// a uniform cell grid for low dimension, and a linear-scan reference. With
// track_spacing the per-particle nearest distances are cached and the maximal
// spacing is served from a lazily invalidated heap.
class NeighborIndex {
 public:
  enum class Backend { sorted1d, grid, brute };

  static Backend default_backend(int dimension);

  NeighborIndex(int dimension, Backend backend, bool track_spacing);

  // Returns the 1-based insertion rank.
  uint64_t insert(std::span<const double> x);

  std::size_t size() const { return n_; }
  int dimension() const { return dim_; }
  Backend backend() const { return backend_; }
  bool tracks_spacing() const { return track_; }

  // Distance from particle id to the closest other particle.
  double nearest_excl(uint64_t id) const;
  // Distance from an arbitrary point to the closest stored particle.
  double nearest_to(std::span<const double> q) const;
  // max over particles of nearest_excl; lazily repaired heap when tracking,
  // full scan otherwise.
  double max_spacing();
  // Number of particles in the closed ball B(q, r).
  uint64_t count_within(std::span<const double> q, double r) const;
  // Gap to the next particle strictly to the right in coordinate order,
  // absent for the rightmost particle. sorted1d only.
  std::optional<double> successor_gap(uint64_t id) const;

  void point(uint64_t id, std::span<double> out) const;
  double coordinate(uint64_t id, int axis) const;
  std::span<const double> column(int axis) const;

 private:
  struct Cell {
    std::vector<double> coords[3];
    std::vector<uint64_t> ids;
  };
  struct HeapEntry {
    double dist;
    uint64_t id;
    uint32_t version;
    bool operator<(const HeapEntry& o) const { return dist < o.dist; }
  };

  uint64_t cell_key(std::span<const double> q) const;
  Cell& cell_for(std::span<const double> q);
  double grid_nearest(std::span<const double> q, uint64_t exclude_id) const;
  double brute_nearest(std::span<const double> q, uint64_t exclude_id) const;
  void grid_rebuild();
  void refresh_cache_after_insert(uint64_t new_id, std::span<const double> q,
                                  double radius);
  double computed_nearest_excl(uint64_t id) const;
  void set_cache(uint64_t id, double dist);

  int dim_;
  Backend backend_;
  bool track_;
  std::size_t n_ = 0;
  std::vector<double> cols_[3];

  // sorted1d
  std::multiset<std::pair<double, uint64_t>> order_;
  std::vector<std::multiset<std::pair<double, uint64_t>>::iterator> its_;

  // grid
  double h_ = 1.0;
  std::unordered_map<uint64_t, Cell> cells_;
  double bbox_lo_[3];
  double bbox_hi_[3];

  // spacing cache
  std::vector<double> cache_;
  std::vector<uint32_t> version_;
  mutable std::priority_queue<HeapEntry> heap_;
};

}  // namespace lisa
