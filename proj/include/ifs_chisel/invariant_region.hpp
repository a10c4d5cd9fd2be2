#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ifs_chisel/errors.hpp"
#include "ifs_chisel/geometry.hpp"
#include "ifs_chisel/ifs.hpp"

namespace ifs_chisel {

// Multi-foci (Maxwell) ellipse { x : Σⱼ d(x, aⱼ) ≤ m_threshold } whose foci are
// the fixed points of an IFS. With m_threshold = (1+λ)/(1−λ)·D every map of the
// system sends the region into itself.
struct InvariantEllipse {
  std::vector<Point> foci;
  double m_threshold = 0.0;
  double lambda_max = 0.0;
  double d_max = 0.0;
};

/// Σⱼ d(p, aⱼ), accumulated in focus order.
inline double distance_sum(std::span<const Point> foci, const Point& p) {
  double sum = 0.0;
  for (const Point& a : foci) sum += distance(p, a);
  return sum;
}

// Dᵢ = Σⱼ d(aᵢ, aⱼ) for each fixed point of the system.
inline std::vector<double> focal_sums(std::span<const Point> foci) {
  std::vector<double> sums;
  sums.reserve(foci.size());
  for (const Point& a : foci) sums.push_back(distance_sum(foci, a));
  return sums;
}

inline InvariantEllipse ellipse_params(const IfsSystem& s) {
  InvariantEllipse e;
  e.foci.assign(s.fixed_points().begin(), s.fixed_points().end());
  e.lambda_max = s.max_ratio();
  for (double di : focal_sums(e.foci)) e.d_max = std::max(e.d_max, di);
  e.m_threshold = (1.0 + e.lambda_max) / (1.0 - e.lambda_max) * e.d_max;
  return e;
}

// Closed membership test; boundary points belong to the region.
inline bool contains(const InvariantEllipse& e, const Point& p) {
  return distance_sum(e.foci, p) <= e.m_threshold;
}

// Σⱼ d(x, aⱼ) ≥ d(x, aᵢ), so the region sits inside every square of half-side
// M around a focus; the box is the intersection of those squares.
inline Box bounding_box(const InvariantEllipse& e) {
  const double inf = std::numeric_limits<double>::infinity();
  Box box{-inf, -inf, inf, inf};
  const double m = e.m_threshold;
  for (const Point& a : e.foci) {
    box.x0 = std::max(box.x0, a.x - m);
    box.y0 = std::max(box.y0, a.y - m);
    box.x1 = std::min(box.x1, a.x + m);
    box.y1 = std::min(box.y1, a.y + m);
  }
  return box;
}

// splitmix64 (Steele, Lea, Flood). Fixed so that sampled reports are
// reproducible across builds and languages.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) from the top 53 bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

private:
  std::uint64_t state_;
};

/// Rejection sampling over bounding_box(e): each candidate draws x then y.
inline PointSet sample_points(const InvariantEllipse& e, std::size_t n,
                              std::uint64_t seed) {
  if (n == 0) throw Error("sample_points: n must be at least 1");
  if (e.foci.empty()) throw Error("sample_points: region has no foci");
  if (e.m_threshold <= 0.0) return PointSet(n, e.foci.front());

  const Box box = bounding_box(e);
  SplitMix64 rng(seed);
  PointSet out;
  out.reserve(n);
  constexpr std::size_t kMaxConsecutiveRejections = 1'000'000;
  std::size_t rejected = 0;
  while (out.size() < n) {
    const double x = rng.next_in(box.x0, box.x1);
    const double y = rng.next_in(box.y0, box.y1);
    const Point p{x, y};
    if (contains(e, p)) {
      out.push_back(p);
      rejected = 0;
    } else if (++rejected >= kMaxConsecutiveRejections) {
      throw DegenerateRegion("rejection sampling found no point of the region "
                             "in 10^6 consecutive draws");
    }
  }
  return out;
}

struct InvarianceReport {
  bool pass = false;
  // max over samples x and maps i of Σⱼ d(fᵢ(x), aⱼ) − M
  double worst_slack = -std::numeric_limits<double>::infinity();
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double threshold = 0.0;
  double tolerance = 0.0;
  std::vector<double> per_map_worst;
  Point worst_sample;
  std::size_t worst_map = 0;
  // λ·Σⱼ d(x, aⱼ) + (λ+1)·Dᵢ at the worst (x, i), with aⱼ the system's fixed
  // points; for the system's own ellipse it bounds the image sum from above.
  double worst_chain_bound = 0.0;
};

/// Samples n points of the region e and checks fᵢ(x) ∈ e for every map.
/// e is normally ellipse_params(s) but any foci/threshold pair is accepted,
/// which is how the unit-disk counterexample is checked.
inline InvarianceReport verify_invariance(const IfsSystem& s,
                                          const InvariantEllipse& e,
                                          std::size_t n, std::uint64_t seed) {
  InvarianceReport r;
  r.n = n;
  r.seed = seed;
  r.threshold = e.m_threshold;
  r.tolerance = 1e-9 * (1.0 + e.m_threshold);
  r.per_map_worst.assign(s.size(), -std::numeric_limits<double>::infinity());

  const PointSet samples = sample_points(e, n, seed);
  const std::span<const Point> fixed = s.fixed_points();
  const std::vector<double> d_i = focal_sums(fixed);
  const double lambda = s.max_ratio();

  for (const Point& x : samples) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Point image = apply_affine(s.map(i), x);
      const double slack = distance_sum(e.foci, image) - e.m_threshold;
      r.per_map_worst[i] = std::max(r.per_map_worst[i], slack);
      if (slack > r.worst_slack) {
        r.worst_slack = slack;
        r.worst_sample = x;
        r.worst_map = i;
        r.worst_chain_bound =
            lambda * distance_sum(fixed, x) + (lambda + 1.0) * d_i[i];
      }
    }
  }
  r.pass = r.worst_slack <= r.tolerance;
  return r;
}

inline nlohmann::ordered_json to_json(const InvarianceReport& r) {
  nlohmann::ordered_json j;
  j["pass"] = r.pass;
  j["worst_slack"] = r.worst_slack;
  j["n"] = r.n;
  j["seed"] = r.seed;
  j["per_map_worst"] = r.per_map_worst;
  return j;
}

inline std::string to_text(const InvarianceReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << (r.pass ? "PASS" : "FAIL") << ": invariance over " << r.n
     << " samples (seed " << r.seed << ")\n";
  os << "threshold M = " << r.threshold << "\n";
  os << "worst slack = " << r.worst_slack << " (tolerance " << r.tolerance
     << ")\n";
  os << "worst sample = (" << r.worst_sample.x << ", " << r.worst_sample.y
     << ") under map " << r.worst_map << "\n";
  os << "chain bound at worst sample = " << r.worst_chain_bound << "\n";
  for (std::size_t i = 0; i < r.per_map_worst.size(); ++i) {
    os << "map " << i << " worst slack = " << r.per_map_worst[i] << "\n";
  }
  return os.str();
}

} // namespace ifs_chisel
