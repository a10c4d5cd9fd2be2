#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "ifs_chisel/discrete_sets.hpp"
#include "ifs_chisel/errors.hpp"
#include "ifs_chisel/geometry.hpp"
#include "ifs_chisel/ifs.hpp"

namespace ifs_chisel {

enum class IterationMode { forward, deletion };

inline const char* to_string(IterationMode m) {
  return m == IterationMode::forward ? "forward" : "deletion";
}

// Stage 0 is the seed. Forward traces fill point_stages, deletion traces fill
// raster_stages; the other vector stays empty.
struct IterationTrace {
  IterationMode mode = IterationMode::forward;
  std::vector<PointSet> point_stages;
  std::vector<Raster> raster_stages;
  std::vector<double> consecutive_hausdorff;
  std::vector<bool> nesting_ok;

  std::size_t stage_count() const {
    return mode == IterationMode::forward ? point_stages.size() : raster_stages.size();
  }

  // Point count (forward) or marked-cell count (deletion).
  std::size_t stage_size(std::size_t k) const {
    return mode == IterationMode::forward ? point_stages.at(k).size()
                                          : raster_stages.at(k).marked_count();
  }
};

struct ForwardOptions {
  std::size_t max_points = std::size_t{1} << 24;
  // Snap-free dedup cell side; 0 disables dedup.
  double dedup_resolution = 0.0;
};

inline IterationTrace forward_iterate(const IfsSystem& s, const PointSet& seed,
                                      std::size_t n, const ForwardOptions& opts = {}) {
  if (seed.empty()) throw EmptyInput("forward_iterate: seed set is empty");
  IterationTrace trace;
  trace.mode = IterationMode::forward;
  trace.point_stages.push_back(seed);
  for (std::size_t k = 0; k < n; ++k) {
    const PointSet& current = trace.point_stages.back();
    if (current.size() > opts.max_points / s.size()) {
      throw ResourceLimit("forward iteration stage " + std::to_string(k + 1) +
                          " would exceed " + std::to_string(opts.max_points) +
                          " points; enable dedup or lower n");
    }
    PointSet next = hutchinson(s, current);
    if (opts.dedup_resolution > 0.0) next = dedup_quantized(next, opts.dedup_resolution);
    trace.consecutive_hausdorff.push_back(hausdorff_distance(current, next));
    trace.point_stages.push_back(std::move(next));
  }
  return trace;
}

struct DeletionOptions {
  // Rank-deficient maps (|det| ≤ 1e-12) are pushed forward with a one-cell
  // dilation instead of being inverted. When false they raise NonInvertibleMap.
  bool allow_forward_fallback = true;
};

namespace detail {

inline Raster deletion_step(const IfsSystem& s, const Raster& prev,
                            const DeletionOptions& opts) {
  std::vector<AffineMap> inverses;
  std::vector<AffineMap> degenerate;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const AffineMap& m = s.map(i);
    if (std::abs(m.determinant()) > 1e-12) {
      inverses.push_back(inverse(m));
    } else if (opts.allow_forward_fallback) {
      degenerate.push_back(m);
    } else {
      throw NonInvertibleMap("deletion iteration: map " + std::to_string(i) +
                             " has a singular linear part");
    }
  }

  Raster next = prev.blank();
  for (std::size_t j = 0; j < prev.height(); ++j) {
    for (std::size_t i = 0; i < prev.width(); ++i) {
      const Point c = prev.cell_center(i, j);
      for (const AffineMap& inv : inverses) {
        const auto cell = prev.cell_of(apply_affine(inv, c));
        if (cell && prev.at(cell->first, cell->second)) {
          next.set(i, j);
          break;
        }
      }
    }
  }

  if (!degenerate.empty()) {
    const auto w = static_cast<std::ptrdiff_t>(prev.width());
    const auto h = static_cast<std::ptrdiff_t>(prev.height());
    for (std::size_t j = 0; j < prev.height(); ++j) {
      for (std::size_t i = 0; i < prev.width(); ++i) {
        if (!prev.at(i, j)) continue;
        for (const AffineMap& m : degenerate) {
          const auto cell = prev.cell_of(apply_affine(m, prev.cell_center(i, j)));
          if (!cell) continue;
          const auto ci = static_cast<std::ptrdiff_t>(cell->first);
          const auto cj = static_cast<std::ptrdiff_t>(cell->second);
          for (std::ptrdiff_t dj = -1; dj <= 1; ++dj) {
            for (std::ptrdiff_t di = -1; di <= 1; ++di) {
              const std::ptrdiff_t x = ci + di;
              const std::ptrdiff_t y = cj + dj;
              if (x >= 0 && y >= 0 && x < w && y < h) {
                next.set(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
              }
            }
          }
        }
      }
    }
  }
  return next;
}

} // namespace detail

/// Deletion chain b0 ⊇ F(b0) ⊇ F²(b0) ⊇ … on b0's grid. A cell of stage k+1 is
/// marked iff some fᵢ⁻¹(cell center) lands in a marked cell of stage k.
inline IterationTrace deletion_iterate(const IfsSystem& s, const Raster& b0, std::size_t n,
                                       const DeletionOptions& opts = {}) {
  if (b0.marked_count() == 0) throw EmptyRaster("deletion_iterate: starting raster is empty");
  IterationTrace trace;
  trace.mode = IterationMode::deletion;
  trace.raster_stages.push_back(b0);
  for (std::size_t k = 0; k < n; ++k) {
    const Raster& prev = trace.raster_stages.back();
    Raster next = detail::deletion_step(s, prev, opts);
    if (next.marked_count() == 0) {
      throw EmptyStage("deletion stage " + std::to_string(k + 1) +
                       " lost every cell; raise the resolution");
    }
    trace.nesting_ok.push_back(raster_subset(next, prev, 1));
    trace.consecutive_hausdorff.push_back(raster_hausdorff(prev, next));
    trace.raster_stages.push_back(std::move(next));
  }
  return trace;
}

enum class ConvergenceStatus { pass, fail, converged };

struct ConvergenceReport {
  ConvergenceStatus status = ConvergenceStatus::fail;
  // r_k = d_H(stage k+1, stage k) / d_H(stage k, stage k−1), k = 1, 2, …
  std::vector<double> ratios;
  double lambda_max = 0.0;
  double ratio_slack = 0.05;
  // Absolute slack on each distance; the cell size for deletion traces.
  double absolute_slack = 0.0;

  bool ok() const { return status != ConvergenceStatus::fail; }
};

inline const char* to_string(ConvergenceStatus s) {
  switch (s) {
    case ConvergenceStatus::pass: return "pass";
    case ConvergenceStatus::fail: return "fail";
    case ConvergenceStatus::converged: return "converged";
  }
  return "?";
}

/// Checks the Hausdorff contraction d_{k+1} ≤ (λ + 0.05)·d_k between
/// consecutive stages. A distance below 1e-12 makes the ratios undefined and
/// yields the converged status.
inline ConvergenceReport convergence_report(const IterationTrace& trace, double lambda_max) {
  if (trace.stage_count() < 3) {
    throw Error("convergence_report: trace needs at least 3 stages");
  }
  ConvergenceReport r;
  r.lambda_max = lambda_max;
  if (trace.mode == IterationMode::deletion) {
    r.absolute_slack = trace.raster_stages.front().cell_size();
  }
  const std::vector<double>& d = trace.consecutive_hausdorff;
  bool pass = true;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d[k] < 1e-12) {
      r.status = ConvergenceStatus::converged;
      return r;
    }
    if (k == 0) continue;
    r.ratios.push_back(d[k] / d[k - 1]);
    if (d[k] > (lambda_max + r.ratio_slack) * d[k - 1] + r.absolute_slack) pass = false;
  }
  r.status = pass ? ConvergenceStatus::pass : ConvergenceStatus::fail;
  return r;
}

/// Depth n for attractor_estimate: the smallest n with
/// λⁿ/(1−λ)·d_H({seed}, F({seed})) ≤ eps − (eps/4)·√2, leaving room for the
/// final dedup. Returns 0 when the seed is fixed by every map.
inline std::size_t attractor_depth(const IfsSystem& s, double eps, const Point& seed) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error("attractor_estimate: eps must be positive");
  const PointSet start{seed};
  const double gap = hausdorff_distance(start, hutchinson(s, start));
  const double lambda = s.max_ratio();
  const double budget = eps - 0.25 * eps * std::sqrt(2.0);
  std::size_t n = 0;
  double bound = gap / (1.0 - lambda);
  while (bound > budget) {
    bound *= lambda;
    ++n;
  }
  return n;
}

/// Point set within Hausdorff distance eps of the attractor: Fⁿ({seed}) with
/// n from attractor_depth, thinned to one point per eps/4 cell.
inline PointSet attractor_estimate(const IfsSystem& s, double eps, const Point& seed,
                                   std::size_t max_points = std::size_t{1} << 24) {
  const std::size_t n = attractor_depth(s, eps, seed);
  PointSet current{seed};
  for (std::size_t k = 0; k < n; ++k) {
    if (current.size() > max_points / s.size()) {
      throw ResourceLimit("attractor_estimate needs depth " + std::to_string(n) +
                          ", which exceeds " + std::to_string(max_points) + " points");
    }
    current = hutchinson(s, current);
  }
  return dedup_quantized(current, eps / 4.0);
}

} // namespace ifs_chisel
