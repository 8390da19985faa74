#include "lisa/nn_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lisa/simd.hpp"

namespace lisa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kKeyBits = 21;
constexpr int64_t kKeyBias = int64_t{1} << (kKeyBits - 1);
constexpr std::size_t kMaxCellOccupancy = 8;

double sq(double v) { return v * v; }

}  // namespace

NeighborIndex::Backend NeighborIndex::default_backend(int dimension) {
  if (dimension == 1) return Backend::sorted1d;
  if (dimension <= 3) return Backend::grid;
  return Backend::brute;
}

NeighborIndex::NeighborIndex(int dimension, Backend backend,
                             bool track_spacing)
    : dim_(dimension), backend_(backend), track_(track_spacing) {
  if (dimension < 1) throw std::invalid_argument("index: dimension < 1");
  if (backend == Backend::sorted1d && dimension != 1)
    throw std::invalid_argument("index: sorted1d backend requires dimension 1");
  if (backend == Backend::grid && dimension > 3)
    throw std::invalid_argument("index: grid backend supports dimension <= 3");
  for (int a = 0; a < 3; ++a) {
    bbox_lo_[a] = kInf;
    bbox_hi_[a] = -kInf;
  }
}

uint64_t NeighborIndex::cell_key(std::span<const double> q) const {
  uint64_t key = 0;
  for (int a = 0; a < dim_; ++a) {
    auto idx = static_cast<int64_t>(std::floor(q[a] / h_)) + kKeyBias;
    if (idx < 0 || idx >= (int64_t{1} << kKeyBits))
      throw std::runtime_error("index: coordinate out of grid key range");
    key = (key << kKeyBits) | static_cast<uint64_t>(idx);
  }
  return key;
}

NeighborIndex::Cell& NeighborIndex::cell_for(std::span<const double> q) {
  return cells_[cell_key(q)];
}

double NeighborIndex::brute_nearest(std::span<const double> q,
                                    uint64_t exclude_id) const {
  std::size_t n = n_;
  if (n == 0) return kInf;
  auto scan = [&](std::size_t begin, std::size_t count) -> double {
    if (count == 0) return kInf;
    if (dim_ == 1)
      return simd::min_sq_dist_1d(cols_[0].data() + begin, count, q[0]);
    if (dim_ == 2)
      return simd::min_sq_dist_2d(cols_[0].data() + begin,
                                  cols_[1].data() + begin, count, q[0], q[1]);
    double best = kInf;
    for (std::size_t i = begin; i < begin + count; ++i) {
      double s = 0.0;
      for (int a = 0; a < dim_; ++a) s += sq(cols_[a][i] - q[a]);
      if (s < best) best = s;
    }
    return best;
  };
  double best;
  if (exclude_id == 0) {
    best = scan(0, n);
  } else {
    std::size_t k = exclude_id - 1;
    best = std::min(scan(0, k), scan(k + 1, n - k - 1));
  }
  return std::sqrt(best);
}

double NeighborIndex::grid_nearest(std::span<const double> q,
                                   uint64_t exclude_id) const {
  if (n_ == 0 || (n_ == 1 && exclude_id != 0)) return kInf;
  uint64_t exclude_key = 0;
  double ex[3] = {0, 0, 0};
  if (exclude_id != 0) {
    for (int a = 0; a < dim_; ++a) ex[a] = cols_[a][exclude_id - 1];
    exclude_key = cell_key(std::span<const double>(ex, dim_));
  }
  int64_t base[3] = {0, 0, 0};
  for (int a = 0; a < dim_; ++a)
    base[a] = static_cast<int64_t>(std::floor(q[a] / h_));
  double far = 0.0;
  for (int a = 0; a < dim_; ++a)
    far = std::max(far,
                   std::max(std::fabs(q[a] - bbox_lo_[a]),
                            std::fabs(bbox_hi_[a] - q[a])));
  auto max_shell = static_cast<int64_t>(far / h_) + 2;

  double best = kInf;
  for (int64_t k = 0; k <= max_shell; ++k) {
    if (k > 0 && best <= sq((static_cast<double>(k) - 1.0) * h_)) break;
    int64_t r1 = dim_ >= 2 ? k : 0;
    int64_t r2 = dim_ >= 3 ? k : 0;
    for (int64_t o0 = -k; o0 <= k; ++o0)
      for (int64_t o1 = -r1; o1 <= r1; ++o1)
        for (int64_t o2 = -r2; o2 <= r2; ++o2) {
          int64_t linf = std::max({std::llabs(o0), std::llabs(o1), std::llabs(o2)});
          if (linf != k) continue;
          int64_t idx[3] = {base[0] + o0, base[1] + o1, base[2] + o2};
          uint64_t key = 0;
          bool bad = false;
          for (int a = 0; a < dim_; ++a) {
            int64_t b = idx[a] + kKeyBias;
            if (b < 0 || b >= (int64_t{1} << kKeyBits)) {
              bad = true;
              break;
            }
            key = (key << kKeyBits) | static_cast<uint64_t>(b);
          }
          if (bad) continue;
          auto it = cells_.find(key);
          if (it == cells_.end()) continue;
          const Cell& cell = it->second;
          if (exclude_id != 0 && key == exclude_key) {
            for (std::size_t i = 0; i < cell.ids.size(); ++i) {
              if (cell.ids[i] == exclude_id) continue;
              double s = 0.0;
              for (int a = 0; a < dim_; ++a) s += sq(cell.coords[a][i] - q[a]);
              if (s < best) best = s;
            }
          } else if (dim_ == 1) {
            best = std::min(best, simd::min_sq_dist_1d(cell.coords[0].data(),
                                                       cell.ids.size(), q[0]));
          } else if (dim_ == 2) {
            best = std::min(
                best, simd::min_sq_dist_2d(cell.coords[0].data(),
                                           cell.coords[1].data(),
                                           cell.ids.size(), q[0], q[1]));
          } else {
            for (std::size_t i = 0; i < cell.ids.size(); ++i) {
              double s = 0.0;
              for (int a = 0; a < dim_; ++a) s += sq(cell.coords[a][i] - q[a]);
              if (s < best) best = s;
            }
          }
        }
  }
  return std::sqrt(best);
}

void NeighborIndex::grid_rebuild() {
  // One halving per insert; coincident duplicates stay dense rather than
  // driving the cell size to zero.
  if (n_ <= kMaxCellOccupancy * std::max<std::size_t>(cells_.size(), 1)) return;
  h_ *= 0.5;
  cells_.clear();
  double p[3];
  for (std::size_t i = 0; i < n_; ++i) {
    for (int a = 0; a < dim_; ++a) p[a] = cols_[a][i];
    Cell& c = cell_for(std::span<const double>(p, dim_));
    for (int a = 0; a < dim_; ++a) c.coords[a].push_back(p[a]);
    c.ids.push_back(i + 1);
  }
}

double NeighborIndex::computed_nearest_excl(uint64_t id) const {
  double p[3];
  for (int a = 0; a < dim_; ++a) p[a] = cols_[a][id - 1];
  std::span<const double> q(p, dim_);
  switch (backend_) {
    case Backend::sorted1d: {
      auto it = its_[id - 1];
      double best = kInf;
      if (it != order_.begin()) best = it->first - std::prev(it)->first;
      auto nx = std::next(it);
      if (nx != order_.end()) best = std::min(best, nx->first - it->first);
      return best;
    }
    case Backend::grid:
      return grid_nearest(q, id);
    case Backend::brute:
      return brute_nearest(q, id);
  }
  return kInf;
}

void NeighborIndex::set_cache(uint64_t id, double dist) {
  cache_[id - 1] = dist;
  ++version_[id - 1];
  heap_.push({dist, id, version_[id - 1]});
}

void NeighborIndex::refresh_cache_after_insert(uint64_t new_id,
                                               std::span<const double> q,
                                               double radius) {
  if (backend_ == Backend::sorted1d) {
    auto it = its_[new_id - 1];
    if (it != order_.begin()) {
      auto pv = std::prev(it);
      double g = it->first - pv->first;
      if (g < cache_[pv->second - 1]) set_cache(pv->second, g);
    }
    auto nx = std::next(it);
    if (nx != order_.end()) {
      double g = nx->first - it->first;
      if (g < cache_[nx->second - 1]) set_cache(nx->second, g);
    }
    return;
  }
  if (backend_ == Backend::brute || !std::isfinite(radius)) {
    for (uint64_t id = 1; id <= n_; ++id) {
      if (id == new_id) continue;
      double s = 0.0;
      for (int a = 0; a < dim_; ++a) s += sq(cols_[a][id - 1] - q[a]);
      double d = std::sqrt(s);
      if (d < cache_[id - 1]) set_cache(id, d);
    }
    return;
  }
  // Any particle whose cached distance improves lies within the pre-insert
  // maximal spacing of the new point.
  int64_t lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    lo[a] = static_cast<int64_t>(std::floor((q[a] - radius) / h_));
    hi[a] = static_cast<int64_t>(std::floor((q[a] + radius) / h_));
  }
  for (int64_t i0 = lo[0]; i0 <= hi[0]; ++i0)
    for (int64_t i1 = (dim_ >= 2 ? lo[1] : 0); i1 <= (dim_ >= 2 ? hi[1] : 0); ++i1)
      for (int64_t i2 = (dim_ >= 3 ? lo[2] : 0); i2 <= (dim_ >= 3 ? hi[2] : 0); ++i2) {
        int64_t idx[3] = {i0, i1, i2};
        uint64_t key = 0;
        bool bad = false;
        for (int a = 0; a < dim_; ++a) {
          int64_t b = idx[a] + kKeyBias;
          if (b < 0 || b >= (int64_t{1} << kKeyBits)) {
            bad = true;
            break;
          }
          key = (key << kKeyBits) | static_cast<uint64_t>(b);
        }
        if (bad) continue;
        auto it = cells_.find(key);
        if (it == cells_.end()) continue;
        const Cell& cell = it->second;
        for (std::size_t i = 0; i < cell.ids.size(); ++i) {
          uint64_t id = cell.ids[i];
          if (id == new_id) continue;
          double s = 0.0;
          for (int a = 0; a < dim_; ++a) s += sq(cell.coords[a][i] - q[a]);
          double d = std::sqrt(s);
          if (d < cache_[id - 1]) set_cache(id, d);
        }
      }
}

uint64_t NeighborIndex::insert(std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(dim_))
    throw std::invalid_argument("index: point dimension mismatch");
  for (double c : x)
    if (!std::isfinite(c))
      throw std::invalid_argument("index: non-finite coordinate");

  double dnew = kInf;
  double radius = kInf;
  if (track_ && n_ >= 2 && backend_ == Backend::grid) radius = max_spacing();
  if (track_ && n_ >= 1) {
    if (backend_ == Backend::grid) dnew = grid_nearest(x, 0);
    if (backend_ == Backend::brute) dnew = brute_nearest(x, 0);
  }

  uint64_t id = ++n_;
  for (int a = 0; a < dim_; ++a) {
    cols_[a].push_back(x[a]);
    bbox_lo_[a] = std::min(bbox_lo_[a], x[a]);
    bbox_hi_[a] = std::max(bbox_hi_[a], x[a]);
  }
  switch (backend_) {
    case Backend::sorted1d:
      its_.push_back(order_.emplace(x[0], id));
      break;
    case Backend::grid: {
      Cell& c = cell_for(x);
      for (int a = 0; a < dim_; ++a) c.coords[a].push_back(x[a]);
      c.ids.push_back(id);
      grid_rebuild();
      break;
    }
    case Backend::brute:
      break;
  }
  if (track_) {
    if (backend_ == Backend::sorted1d && n_ >= 2)
      dnew = computed_nearest_excl(id);
    cache_.push_back(dnew);
    version_.push_back(0);
    heap_.push({dnew, id, 0});
    refresh_cache_after_insert(id, x, radius);
  }
  return id;
}

double NeighborIndex::nearest_excl(uint64_t id) const {
  if (id == 0 || id > n_) throw std::out_of_range("index: unknown id");
  if (n_ < 2) throw std::runtime_error("index: nearest_excl on a singleton");
  if (track_) return cache_[id - 1];
  return computed_nearest_excl(id);
}

double NeighborIndex::nearest_to(std::span<const double> q) const {
  if (q.size() != static_cast<std::size_t>(dim_))
    throw std::invalid_argument("index: point dimension mismatch");
  if (n_ == 0) throw std::runtime_error("index: nearest_to on empty index");
  switch (backend_) {
    case Backend::sorted1d: {
      auto it = order_.lower_bound({q[0], 0});
      double best = kInf;
      if (it != order_.end()) best = it->first - q[0];
      if (it != order_.begin()) best = std::min(best, q[0] - std::prev(it)->first);
      return best;
    }
    case Backend::grid:
      return grid_nearest(q, 0);
    case Backend::brute:
      return brute_nearest(q, 0);
  }
  return kInf;
}

double NeighborIndex::max_spacing() {
  if (n_ < 2) throw std::runtime_error("index: max_spacing needs >= 2 points");
  if (!track_) {
    double best = 0.0;
    for (uint64_t id = 1; id <= n_; ++id)
      best = std::max(best, computed_nearest_excl(id));
    return best;
  }
  while (!heap_.empty()) {
    const HeapEntry& top = heap_.top();
    if (top.version == version_[top.id - 1]) return top.dist;
    heap_.pop();
  }
  throw std::logic_error("index: spacing heap exhausted");
}

uint64_t NeighborIndex::count_within(std::span<const double> q,
                                     double r) const {
  if (q.size() != static_cast<std::size_t>(dim_))
    throw std::invalid_argument("index: point dimension mismatch");
  if (r < 0) throw std::invalid_argument("index: negative radius");
  double rsq = r * r;
  uint64_t count = 0;
  switch (backend_) {
    case Backend::sorted1d: {
      // One-ulp slack on the coordinate window, then the exact test all
      // backends share.
      double lo = std::nextafter(q[0] - r, -kInf);
      double hi = std::nextafter(q[0] + r, kInf);
      auto it = order_.lower_bound({lo, 0});
      for (; it != order_.end() && it->first <= hi; ++it)
        if (sq(it->first - q[0]) <= rsq) ++count;
      return count;
    }
    case Backend::grid: {
      int64_t lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
      for (int a = 0; a < dim_; ++a) {
        lo[a] = static_cast<int64_t>(std::floor((q[a] - r) / h_)) - 1;
        hi[a] = static_cast<int64_t>(std::floor((q[a] + r) / h_)) + 1;
      }
      for (int64_t i0 = lo[0]; i0 <= hi[0]; ++i0)
        for (int64_t i1 = (dim_ >= 2 ? lo[1] : 0); i1 <= (dim_ >= 2 ? hi[1] : 0); ++i1)
          for (int64_t i2 = (dim_ >= 3 ? lo[2] : 0); i2 <= (dim_ >= 3 ? hi[2] : 0); ++i2) {
            int64_t idx[3] = {i0, i1, i2};
            uint64_t key = 0;
            bool bad = false;
            for (int a = 0; a < dim_; ++a) {
              int64_t b = idx[a] + kKeyBias;
              if (b < 0 || b >= (int64_t{1} << kKeyBits)) {
                bad = true;
                break;
              }
              key = (key << kKeyBits) | static_cast<uint64_t>(b);
            }
            if (bad) continue;
            auto it = cells_.find(key);
            if (it == cells_.end()) continue;
            const Cell& cell = it->second;
            for (std::size_t i = 0; i < cell.ids.size(); ++i) {
              double s = 0.0;
              for (int a = 0; a < dim_; ++a) s += sq(cell.coords[a][i] - q[a]);
              if (s <= rsq) ++count;
            }
          }
      return count;
    }
    case Backend::brute: {
      for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int a = 0; a < dim_; ++a) s += sq(cols_[a][i] - q[a]);
        if (s <= rsq) ++count;
      }
      return count;
    }
  }
  return count;
}

std::optional<double> NeighborIndex::successor_gap(uint64_t id) const {
  if (backend_ != Backend::sorted1d)
    throw std::runtime_error("index: successor_gap requires the sorted1d backend");
  if (id == 0 || id > n_) throw std::out_of_range("index: unknown id");
  auto it = its_[id - 1];
  auto nx = std::next(it);
  if (nx == order_.end()) return std::nullopt;
  return nx->first - it->first;
}

void NeighborIndex::point(uint64_t id, std::span<double> out) const {
  if (id == 0 || id > n_) throw std::out_of_range("index: unknown id");
  if (out.size() != static_cast<std::size_t>(dim_))
    throw std::invalid_argument("index: output dimension mismatch");
  for (int a = 0; a < dim_; ++a) out[a] = cols_[a][id - 1];
}

double NeighborIndex::coordinate(uint64_t id, int axis) const {
  if (id == 0 || id > n_) throw std::out_of_range("index: unknown id");
  if (axis < 0 || axis >= dim_) throw std::out_of_range("index: bad axis");
  return cols_[axis][id - 1];
}

std::span<const double> NeighborIndex::column(int axis) const {
  if (axis < 0 || axis >= dim_) throw std::out_of_range("index: bad axis");
  return cols_[axis];
}

}  // namespace lisa
