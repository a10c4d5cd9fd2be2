#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ifs_chisel/errors.hpp"
#include "ifs_chisel/geometry.hpp"
#include "ifs_chisel/ifs.hpp"

namespace ifs_chisel {

// Occupancy grid. Cell (i, j) covers
//   [origin.x + i·cell, origin.x + (i+1)·cell) × [origin.y + j·cell, origin.y + (j+1)·cell)
// and is stored row-major with row 0 at minimal y.
class Raster {
public:
  Raster(Point origin, double cell_size, std::size_t width, std::size_t height)
      : origin_(origin), cell_size_(cell_size), width_(width), height_(height),
        cells_(width * height, 0) {
    if (width == 0 || height == 0) throw Error("raster must have at least one cell");
    if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
      throw Error("raster cell size must be positive and finite");
    }
    if (!is_finite(origin)) throw Error("raster origin must be finite");
  }

  Point origin() const noexcept { return origin_; }
  double cell_size() const noexcept { return cell_size_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }

  bool at(std::size_t i, std::size_t j) const { return cells_[j * width_ + i] != 0; }
  void set(std::size_t i, std::size_t j, bool marked = true) {
    cells_[j * width_ + i] = marked ? 1 : 0;
  }

  Point cell_center(std::size_t i, std::size_t j) const {
    return {origin_.x + (static_cast<double>(i) + 0.5) * cell_size_,
            origin_.y + (static_cast<double>(j) + 0.5) * cell_size_};
  }

  // Cell containing p, if p falls on the grid.
  std::optional<std::pair<std::size_t, std::size_t>> cell_of(const Point& p) const {
    const double fi = std::floor((p.x - origin_.x) / cell_size_);
    const double fj = std::floor((p.y - origin_.y) / cell_size_);
    if (!(fi >= 0.0 && fj >= 0.0 && fi < static_cast<double>(width_) &&
          fj < static_cast<double>(height_))) {
      return std::nullopt;
    }
    return std::make_pair(static_cast<std::size_t>(fi), static_cast<std::size_t>(fj));
  }

  std::size_t marked_count() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1));
  }

  bool same_grid(const Raster& other) const {
    return origin_ == other.origin_ && cell_size_ == other.cell_size_ &&
           width_ == other.width_ && height_ == other.height_;
  }

  // Copy of the grid geometry with every cell cleared.
  Raster blank() const { return Raster(origin_, cell_size_, width_, height_); }

  friend bool operator==(const Raster& a, const Raster& b) {
    return a.same_grid(b) && a.cells_ == b.cells_;
  }

private:
  Point origin_;
  double cell_size_;
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> cells_;
};

namespace detail {

inline double directed_hausdorff_reference(std::span<const Point> from,
                                           std::span<const Point> to) {
  double worst_sq = 0.0;
  for (const Point& p : from) {
    double best_sq = std::numeric_limits<double>::infinity();
    for (const Point& q : to) best_sq = std::min(best_sq, distance_squared(p, q));
    worst_sq = std::max(worst_sq, best_sq);
  }
  return std::sqrt(worst_sq);
}

// Uniform bucket grid over a point set for exact nearest-distance queries.
class BucketGrid {
public:
  explicit BucketGrid(std::span<const Point> pts) {
    double x0 = pts[0].x, x1 = pts[0].x, y0 = pts[0].y, y1 = pts[0].y;
    for (const Point& p : pts) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
    const double w = x1 - x0;
    const double h = y1 - y0;
    const double n = static_cast<double>(pts.size());
    // About two points per bucket, also for sets that lie on a line.
    cell_ = std::max(std::sqrt(2.0 * w * h / n), 2.0 * std::max(w, h) / n);
    if (!(cell_ > 0.0)) cell_ = 1.0;
    ox_ = x0;
    oy_ = y0;
    nx_ = static_cast<std::int64_t>(std::floor(w / cell_)) + 1;
    ny_ = static_cast<std::int64_t>(std::floor(h / cell_)) + 1;

    std::vector<std::size_t> counts(static_cast<std::size_t>(nx_ * ny_) + 1, 0);
    std::vector<std::size_t> slot(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
      slot[k] = bucket_index(pts[k]);
      ++counts[slot[k] + 1];
    }
    for (std::size_t b = 1; b < counts.size(); ++b) counts[b] += counts[b - 1];
    start_ = counts;
    points_.resize(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) points_[counts[slot[k]]++] = pts[k];
  }

  // Exact min over the set of distance_squared(p, ·).
  double nearest_squared(const Point& p) const {
    const std::int64_t cx = clamp_coord((p.x - ox_) / cell_);
    const std::int64_t cy = clamp_coord((p.y - oy_) / cell_);
    const std::int64_t gap_x = cx < 0 ? -cx : (cx >= nx_ ? cx - nx_ + 1 : 0);
    const std::int64_t gap_y = cy < 0 ? -cy : (cy >= ny_ ? cy - ny_ + 1 : 0);
    const std::int64_t first_ring = std::max(gap_x, gap_y);
    const std::int64_t last_ring =
        std::max({cx, nx_ - 1 - cx, cy, ny_ - 1 - cy, first_ring});

    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t r = first_ring; r <= last_ring; ++r) {
      scan_ring(p, cx, cy, r, best);
      // Buckets beyond ring r are at least r·cell away from p's bucket; one
      // ring of margin absorbs floor() rounding at bucket edges.
      const double reach = static_cast<double>(r - 1) * cell_;
      if (r >= 1 && best <= reach * reach) break;
    }
    return best;
  }

private:
  static std::int64_t clamp_coord(double v) {
    constexpr double kLimit = 1e15;
    return static_cast<std::int64_t>(std::floor(std::clamp(v, -kLimit, kLimit)));
  }

  std::size_t bucket_index(const Point& p) const {
    const std::int64_t i = std::clamp<std::int64_t>(clamp_coord((p.x - ox_) / cell_), 0, nx_ - 1);
    const std::int64_t j = std::clamp<std::int64_t>(clamp_coord((p.y - oy_) / cell_), 0, ny_ - 1);
    return static_cast<std::size_t>(j * nx_ + i);
  }

  void scan_bucket(const Point& p, std::int64_t i, std::int64_t j, double& best) const {
    if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return;
    const auto b = static_cast<std::size_t>(j * nx_ + i);
    for (std::size_t k = start_[b]; k < start_[b + 1]; ++k) {
      best = std::min(best, distance_squared(p, points_[k]));
    }
  }

  void scan_ring(const Point& p, std::int64_t cx, std::int64_t cy, std::int64_t r,
                 double& best) const {
    if (r == 0) {
      scan_bucket(p, cx, cy, best);
      return;
    }
    const std::int64_t i0 = std::max<std::int64_t>(cx - r, 0);
    const std::int64_t i1 = std::min<std::int64_t>(cx + r, nx_ - 1);
    for (std::int64_t i = i0; i <= i1; ++i) {
      scan_bucket(p, i, cy - r, best);
      scan_bucket(p, i, cy + r, best);
    }
    const std::int64_t j0 = std::max<std::int64_t>(cy - r + 1, 0);
    const std::int64_t j1 = std::min<std::int64_t>(cy + r - 1, ny_ - 1);
    for (std::int64_t j = j0; j <= j1; ++j) {
      scan_bucket(p, cx - r, j, best);
      scan_bucket(p, cx + r, j, best);
    }
  }

  double ox_ = 0.0, oy_ = 0.0, cell_ = 1.0;
  std::int64_t nx_ = 1, ny_ = 1;
  std::vector<std::size_t> start_;
  std::vector<Point> points_;
};

inline double directed_hausdorff_grid(std::span<const Point> from,
                                      std::span<const Point> to) {
  const BucketGrid grid(to);
  double worst_sq = 0.0;
  for (const Point& p : from) worst_sq = std::max(worst_sq, grid.nearest_squared(p));
  return std::sqrt(worst_sq);
}

inline void require_non_empty(std::span<const Point> a, std::span<const Point> b) {
  if (a.empty() || b.empty()) throw EmptyInput("hausdorff distance needs two non-empty sets");
}

} // namespace detail

/// O(|a|·|b|) Hausdorff distance.
inline double hausdorff_distance_reference(std::span<const Point> a,
                                           std::span<const Point> b) {
  detail::require_non_empty(a, b);
  return std::max(detail::directed_hausdorff_reference(a, b),
                  detail::directed_hausdorff_reference(b, a));
}

/// Bucket-grid Hausdorff distance. Evaluates exactly the same squared
/// distances as the reference path, so the result is bit-identical.
inline double hausdorff_distance_grid(std::span<const Point> a,
                                      std::span<const Point> b) {
  detail::require_non_empty(a, b);
  return std::max(detail::directed_hausdorff_grid(a, b),
                  detail::directed_hausdorff_grid(b, a));
}

inline double hausdorff_distance(std::span<const Point> a, std::span<const Point> b) {
  constexpr std::size_t kBruteForceWork = 1u << 16;
  if (a.size() * b.size() <= kBruteForceWork) return hausdorff_distance_reference(a, b);
  return hausdorff_distance_grid(a, b);
}

/// Square cells of side max(box.width, box.height)/resolution covering box;
/// a cell is marked iff `inside` holds at its center.
template <typename Predicate>
Raster rasterize_region(Predicate&& inside, const Box& box, std::size_t resolution) {
  if (resolution < 2) throw Error("rasterize_region: resolution must be at least 2");
  const double w = box.width();
  const double h = box.height();
  if (!(w >= 0.0 && h >= 0.0 && std::max(w, h) > 0.0) || !std::isfinite(w) ||
      !std::isfinite(h)) {
    throw Error("rasterize_region: box is degenerate");
  }
  const double cell = std::max(w, h) / static_cast<double>(resolution);
  const auto cells_along = [cell](double extent) {
    const double k = std::ceil(extent / cell - 1e-9);
    return static_cast<std::size_t>(std::max(1.0, k));
  };
  Raster r({box.x0, box.y0}, cell, cells_along(w), cells_along(h));
  for (std::size_t j = 0; j < r.height(); ++j) {
    for (std::size_t i = 0; i < r.width(); ++i) {
      if (inside(r.cell_center(i, j))) r.set(i, j);
    }
  }
  return r;
}

inline PointSet raster_points(const Raster& r) {
  PointSet out;
  for (std::size_t j = 0; j < r.height(); ++j) {
    for (std::size_t i = 0; i < r.width(); ++i) {
      if (r.at(i, j)) out.push_back(r.cell_center(i, j));
    }
  }
  if (out.empty()) throw EmptyRaster("raster has no marked cells");
  return out;
}

/// Chebyshev dilation of the marked cells by `radius` cells.
inline Raster dilate(const Raster& r, std::size_t radius) {
  if (radius == 0) return r;
  const std::size_t w = r.width();
  const std::size_t h = r.height();
  // Separable max filter using prefix counts along each axis.
  Raster rows = r.blank();
  std::vector<std::size_t> prefix(std::max(w, h) + 1);
  for (std::size_t j = 0; j < h; ++j) {
    for (std::size_t i = 0; i < w; ++i) prefix[i + 1] = prefix[i] + (r.at(i, j) ? 1 : 0);
    for (std::size_t i = 0; i < w; ++i) {
      const std::size_t lo = i >= radius ? i - radius : 0;
      const std::size_t hi = std::min(w, i + radius + 1);
      if (prefix[hi] > prefix[lo]) rows.set(i, j);
    }
  }
  Raster out = r.blank();
  for (std::size_t i = 0; i < w; ++i) {
    for (std::size_t j = 0; j < h; ++j) prefix[j + 1] = prefix[j] + (rows.at(i, j) ? 1 : 0);
    for (std::size_t j = 0; j < h; ++j) {
      const std::size_t lo = j >= radius ? j - radius : 0;
      const std::size_t hi = std::min(h, j + radius + 1);
      if (prefix[hi] > prefix[lo]) out.set(i, j);
    }
  }
  return out;
}

/// True iff every marked cell of a lies within Chebyshev distance tol_cells of
/// some marked cell of b.
inline bool raster_subset(const Raster& a, const Raster& b, std::size_t tol_cells) {
  if (!a.same_grid(b)) throw GridMismatch("raster_subset: rasters use different grids");
  const Raster grown = dilate(b, tol_cells);
  for (std::size_t j = 0; j < a.height(); ++j) {
    for (std::size_t i = 0; i < a.width(); ++i) {
      if (a.at(i, j) && !grown.at(i, j)) return false;
    }
  }
  return true;
}

// Hausdorff distance between the marked-cell centers of two rasters.
inline double raster_hausdorff(const Raster& a, const Raster& b) {
  const PointSet pa = raster_points(a);
  const PointSet pb = raster_points(b);
  return hausdorff_distance(pa, pb);
}

} // namespace ifs_chisel
