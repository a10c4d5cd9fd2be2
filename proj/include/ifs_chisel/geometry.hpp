#pragma once

#include <cmath>

#include "ifs_chisel/errors.hpp"

namespace ifs_chisel {

// Largest admissible contraction ratio inside an IfsSystem. Keeps 1/(1 - ratio)
// well conditioned.
inline constexpr double kMaxContractionRatio = 1.0 - 1e-9;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline bool is_finite(const Point& p) {
  return std::isfinite(p.x) && std::isfinite(p.y);
}

inline double norm(const Point& p) { return std::sqrt(p.x * p.x + p.y * p.y); }

// Euclidean distance. Written as sqrt(dx^2 + dy^2) everywhere so that every
// nearest-neighbour search in the library rounds identically.
inline double distance(const Point& p, const Point& q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  return std::sqrt(dx * dx + dy * dy);
}

// Closed axis-aligned rectangle [x0, x1] × [y0, y1].
struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool contains(const Point& p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }

  friend bool operator==(const Box&, const Box&) = default;
};

inline double distance_squared(const Point& p, const Point& q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  return dx * dx + dy * dy;
}

// x' = a*x + b*y + e
// y' = c*x + d*y + f
struct AffineMap {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 1.0;
  double e = 0.0;
  double f = 0.0;

  static AffineMap identity() { return {}; }

  bool is_finite() const {
    return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) &&
           std::isfinite(d) && std::isfinite(e) && std::isfinite(f);
  }

  double determinant() const { return a * d - b * c; }

  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

inline Point apply_affine(const AffineMap& m, const Point& p) {
  return {m.a * p.x + m.b * p.y + m.e, m.c * p.x + m.d * p.y + m.f};
}

// (outer ∘ inner)(p) = outer(inner(p))
inline AffineMap compose(const AffineMap& outer, const AffineMap& inner) {
  return {outer.a * inner.a + outer.b * inner.c,
          outer.a * inner.b + outer.b * inner.d,
          outer.c * inner.a + outer.d * inner.c,
          outer.c * inner.b + outer.d * inner.d,
          outer.a * inner.e + outer.b * inner.f + outer.e,
          outer.c * inner.e + outer.d * inner.f + outer.f};
}

/// Largest singular value of the linear part, i.e. the Lipschitz constant of
/// the map for the Euclidean metric.
///
/// The Gram matrix AᵀA has eigenvalues (T ± sqrt(T² - 4Δ²)) / 2 with
/// T = a² + b² + c² + d² and Δ = ad - bc. Factoring T² - 4Δ² as
/// ((a+d)² + (c-b)²)((a-d)² + (b+c)²) gives the square root of the larger
/// eigenvalue as the mean of the two hypotenuses below, which avoids the
/// cancellation the unfactored form suffers for near-conformal maps.
inline double contraction_ratio(const AffineMap& m) {
  const double p = std::hypot(m.a + m.d, m.c - m.b);
  const double q = std::hypot(m.a - m.d, m.b + m.c);
  return 0.5 * (p + q);
}

/// Unique solution of (I - A) p = (e, f).
inline Point fixed_point(const AffineMap& m) {
  const double m00 = 1.0 - m.a;
  const double m01 = -m.b;
  const double m10 = -m.c;
  const double m11 = 1.0 - m.d;
  const double det = m00 * m11 - m01 * m10;
  if (!(std::abs(det) >= 1e-12)) {
    throw SingularSystem("I - A is singular (det " + std::to_string(det) +
                         "); map has no unique fixed point");
  }
  return {(m11 * m.e - m01 * m.f) / det, (m00 * m.f - m10 * m.e) / det};
}

/// x ↦ ratio · R(angle) · (x - center) + center, counterclockwise positive.
inline AffineMap rotation_similitude(const Point& center, double angle_rad,
                                     double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw InvalidRatio("similitude ratio must lie in (0, 1), got " +
                       std::to_string(ratio));
  }
  const double cs = ratio * std::cos(angle_rad);
  const double sn = ratio * std::sin(angle_rad);
  AffineMap m{cs, -sn, sn, cs, 0.0, 0.0};
  m.e = center.x - (m.a * center.x + m.b * center.y);
  m.f = center.y - (m.c * center.x + m.d * center.y);
  return m;
}

inline AffineMap inverse(const AffineMap& m) {
  const double det = m.determinant();
  if (!(std::abs(det) > 1e-12)) {
    throw NonInvertibleMap("linear part is singular (det " +
                           std::to_string(det) + ")");
  }
  const double ia = m.d / det;
  const double ib = -m.b / det;
  const double ic = -m.c / det;
  const double id = m.a / det;
  return {ia, ib, ic, id, -(ia * m.e + ib * m.f), -(ic * m.e + id * m.f)};
}

} // namespace ifs_chisel
