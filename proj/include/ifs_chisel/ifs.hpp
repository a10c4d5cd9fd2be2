#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ifs_chisel/errors.hpp"
#include "ifs_chisel/geometry.hpp"

namespace ifs_chisel {

// Finite multiset of plane points. Order is significant: the Hutchinson
// operator and the CSV writer both preserve it.
using PointSet = std::vector<Point>;

// Ordered, validated list of contractions together with their ratios and
// fixed points. Immutable after construction.
class IfsSystem {
public:
  explicit IfsSystem(std::vector<AffineMap> maps) : maps_(std::move(maps)) {
    if (maps_.empty()) throw EmptySystem();
    ratios_.reserve(maps_.size());
    fixed_points_.reserve(maps_.size());
    for (std::size_t i = 0; i < maps_.size(); ++i) {
      const AffineMap& m = maps_[i];
      if (!m.is_finite()) {
        throw ParseError("map " + std::to_string(i) +
                         " has a non-finite coefficient");
      }
      const double ratio = contraction_ratio(m);
      if (!(ratio <= kMaxContractionRatio)) throw NotAContraction(i, ratio);
      ratios_.push_back(ratio);
      fixed_points_.push_back(fixed_point(m));
    }
  }

  std::size_t size() const noexcept { return maps_.size(); }
  std::span<const AffineMap> maps() const noexcept { return maps_; }
  std::span<const double> ratios() const noexcept { return ratios_; }
  std::span<const Point> fixed_points() const noexcept { return fixed_points_; }

  const AffineMap& map(std::size_t i) const { return maps_.at(i); }

  double max_ratio() const {
    double best = 0.0;
    for (double r : ratios_) best = std::max(best, r);
    return best;
  }

private:
  std::vector<AffineMap> maps_;
  std::vector<double> ratios_;
  std::vector<Point> fixed_points_;
};

/// F(B) = f₁(B) ‖ f₂(B) ‖ … ‖ f_N(B), concatenated in map order, duplicates
/// kept.
inline PointSet hutchinson(const IfsSystem& s, std::span<const Point> b) {
  if (b.empty()) throw EmptyInput("hutchinson: input point set is empty");
  PointSet out;
  out.reserve(s.size() * b.size());
  for (const AffineMap& m : s.maps()) {
    for (const Point& p : b) out.push_back(apply_affine(m, p));
  }
  return out;
}

/// Keeps the first point falling in each square cell of side `resolution`
/// (cells anchored at the origin). Surviving points are not moved; every
/// dropped point lies within resolution·√2 of a kept one.
inline PointSet dedup_quantized(std::span<const Point> points,
                                double resolution) {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw Error("dedup resolution must be positive and finite");
  }
  struct KeyHash {
    std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& k) const {
      const auto h1 = static_cast<std::uint64_t>(k.first) * 0x9E3779B97F4A7C15ULL;
      const auto h2 = static_cast<std::uint64_t>(k.second) + 0x632BE59BD9B4E019ULL;
      return static_cast<std::size_t>(h1 ^ (h2 + (h1 << 6) + (h1 >> 2)));
    }
  };
  std::unordered_set<std::pair<std::int64_t, std::int64_t>, KeyHash> seen;
  seen.reserve(points.size());
  PointSet out;
  for (const Point& p : points) {
    const auto key = std::make_pair(
        static_cast<std::int64_t>(std::floor(p.x / resolution)),
        static_cast<std::int64_t>(std::floor(p.y / resolution)));
    if (seen.insert(key).second) out.push_back(p);
  }
  return out;
}

namespace detail {

inline double require_number(const nlohmann::json& obj, const char* key,
                             std::size_t index) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError("map " + std::to_string(index) + ": missing key \"" +
                     key + "\"");
  }
  if (!it->is_number()) {
    throw ParseError("map " + std::to_string(index) + ": key \"" + key +
                     "\" must be a number");
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) {
    throw ParseError("map " + std::to_string(index) + ": key \"" + key +
                     "\" is not finite");
  }
  return v;
}

inline void reject_unknown_keys(const nlohmann::json& obj,
                                std::initializer_list<std::string_view> allowed,
                                const std::string& where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (std::string_view k : allowed) known = known || item.key() == k;
    if (!known) throw ParseError(where + ": unknown key \"" + item.key() + "\"");
  }
}

inline AffineMap parse_map(const nlohmann::json& m, std::size_t index) {
  const std::string where = "map " + std::to_string(index);
  if (!m.is_object()) throw ParseError(where + ": expected an object");
  const auto kind_it = m.find("kind");
  if (kind_it == m.end() || !kind_it->is_string()) {
    throw ParseError(where + ": missing string key \"kind\"");
  }
  const auto kind = kind_it->get<std::string>();
  if (kind == "affine") {
    reject_unknown_keys(m, {"kind", "a", "b", "c", "d", "e", "f"}, where);
    return {require_number(m, "a", index), require_number(m, "b", index),
            require_number(m, "c", index), require_number(m, "d", index),
            require_number(m, "e", index), require_number(m, "f", index)};
  }
  if (kind == "similitude") {
    reject_unknown_keys(m, {"kind", "center", "angle_rad", "ratio"}, where);
    const auto c = m.find("center");
    if (c == m.end() || !c->is_array() || c->size() != 2 ||
        !(*c)[0].is_number() || !(*c)[1].is_number()) {
      throw ParseError(where + ": \"center\" must be a [x, y] number pair");
    }
    const Point center{(*c)[0].get<double>(), (*c)[1].get<double>()};
    if (!is_finite(center)) throw ParseError(where + ": center not finite");
    const double angle = require_number(m, "angle_rad", index);
    const double ratio = require_number(m, "ratio", index);
    if (ratio >= 1.0) throw NotAContraction(index, ratio);
    if (!(ratio > 0.0)) {
      throw ParseError(where + ": similitude ratio must be positive");
    }
    return rotation_similitude(center, angle, ratio);
  }
  throw ParseError(where + ": unknown kind \"" + kind + "\"");
}

} // namespace detail

/// Reads the JSON form:
///   { "maps": [ {"kind":"affine","a":..,"b":..,"c":..,"d":..,"e":..,"f":..}
///             | {"kind":"similitude","center":[x,y],"angle_rad":..,"ratio":..} ] }
inline IfsSystem parse_ifs(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("top level must be an object");
  detail::reject_unknown_keys(doc, {"maps"}, "document");
  const auto maps_it = doc.find("maps");
  if (maps_it == doc.end() || !maps_it->is_array()) {
    throw ParseError("document needs a \"maps\" array");
  }
  if (maps_it->empty()) throw EmptySystem();
  std::vector<AffineMap> maps;
  maps.reserve(maps_it->size());
  for (std::size_t i = 0; i < maps_it->size(); ++i) {
    maps.push_back(detail::parse_map((*maps_it)[i], i));
  }
  return IfsSystem(std::move(maps));
}

// Always emits the affine form; nlohmann prints shortest round-trip decimals
// so parse_ifs(serialize_ifs(s)) reproduces every coefficient bit for bit.
inline std::string serialize_ifs(const IfsSystem& s) {
  nlohmann::ordered_json doc;
  auto& maps = doc["maps"] = nlohmann::ordered_json::array();
  for (const AffineMap& m : s.maps()) {
    nlohmann::ordered_json entry;
    entry["kind"] = "affine";
    entry["a"] = m.a;
    entry["b"] = m.b;
    entry["c"] = m.c;
    entry["d"] = m.d;
    entry["e"] = m.e;
    entry["f"] = m.f;
    maps.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

// Vertices of the unit equilateral triangle shared by the Sierpinski gallery
// entry and the locus renderer.
inline std::vector<Point> unit_triangle() {
  return {{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}};
}

/// Gallery: "cantor", "sierpinski", "paper-example".
inline IfsSystem builtin(std::string_view name) {
  if (name == "cantor") {
    const double third = 1.0 / 3.0;
    return IfsSystem({{third, 0.0, 0.0, third, 0.0, 0.0},
                      {third, 0.0, 0.0, third, 2.0 / 3.0, 0.0}});
  }
  if (name == "sierpinski") {
    std::vector<AffineMap> maps;
    for (const Point& v : unit_triangle()) {
      maps.push_back({0.5, 0.0, 0.0, 0.5, 0.5 * v.x, 0.5 * v.y});
    }
    return IfsSystem(std::move(maps));
  }
  if (name == "paper-example") {
    // Two rotation-similitudes: +30° about the origin at ratio 1/2 and -30°
    // about (1, 0) at ratio 3/5.
    return IfsSystem(
        {rotation_similitude({0.0, 0.0}, std::numbers::pi / 6.0, 0.5),
         rotation_similitude({1.0, 0.0}, -std::numbers::pi / 6.0, 0.6)});
  }
  throw UnknownName("unknown builtin IFS \"" + std::string(name) +
                    "\" (expected cantor, sierpinski or paper-example)");
}

inline std::vector<std::string> builtin_names() {
  return {"cantor", "sierpinski", "paper-example"};
}

} // namespace ifs_chisel
