#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "ifs_chisel/discrete_sets.hpp"
#include "ifs_chisel/errors.hpp"
#include "ifs_chisel/geometry.hpp"
#include "ifs_chisel/invariant_region.hpp"
#include "ifs_chisel/iteration_engine.hpp"

namespace ifs_chisel {

inline constexpr std::string_view kPbmComment = "# ifs-chisel";

namespace detail {

inline void check_stream(const std::ostream& out, const char* what) {
  if (!out) throw IoFailure(std::string(what) + ": write failed");
}

// Shortest decimal that parses back to the same double.
inline std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_real(std::string_view text, const std::string& where) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ParseError(where + ": \"" + std::string(text) + "\" is not a finite number");
  }
  return v;
}

} // namespace detail

/// Plain PBM (P1). Rows are written top to bottom (maximal y first), cells left
/// to right, at most 35 values (70 characters) per line; each raster row starts
/// a new line.
inline void write_pbm(const Raster& r, std::ostream& out) {
  constexpr std::size_t kValuesPerLine = 35;
  out << "P1\n" << kPbmComment << '\n' << r.width() << ' ' << r.height() << '\n';
  std::string line;
  for (std::size_t row = r.height(); row-- > 0;) {
    line.clear();
    for (std::size_t i = 0; i < r.width(); ++i) {
      if (i > 0) line += (i % kValuesPerLine == 0) ? '\n' : ' ';
      line += r.at(i, row) ? '1' : '0';
    }
    line += '\n';
    out << line;
  }
  detail::check_stream(out, "write_pbm");
}

/// Reads a P1 file written by write_pbm (or any plain PBM without geometry);
/// origin and cell size are supplied by the caller.
inline Raster read_pbm(std::istream& in, Point origin = {}, double cell_size = 1.0) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string word;
    while (words >> word) tokens.push_back(word);
  }
  if (tokens.size() < 3 || tokens[0] != "P1") throw ParseError("read_pbm: missing P1 header");
  std::size_t dims[2] = {0, 0};
  for (int k = 0; k < 2; ++k) {
    const std::string& t = tokens[1 + k];
    const auto res = std::from_chars(t.data(), t.data() + t.size(), dims[k]);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size() || dims[k] == 0) {
      throw ParseError("read_pbm: bad dimension \"" + t + "\"");
    }
  }
  Raster r(origin, cell_size, dims[0], dims[1]);
  const std::size_t total = dims[0] * dims[1];
  std::size_t cell = 0;
  // Plain PBM permits pixels without separators, so read characters.
  for (std::size_t t = 3; t < tokens.size(); ++t) {
    for (char ch : tokens[t]) {
      if (ch != '0' && ch != '1') throw ParseError("read_pbm: bad pixel value");
      if (cell >= total) throw ParseError("read_pbm: too many pixels");
      r.set(cell % dims[0], dims[1] - 1 - cell / dims[0], ch == '1');
      ++cell;
    }
  }
  if (cell != total) throw ParseError("read_pbm: truncated pixel data");
  return r;
}

/// "x,y" header then one shortest-round-trip row per point.
inline void write_points_csv(std::span<const Point> points, std::ostream& out) {
  std::string text = "x,y\n";
  for (const Point& p : points) {
    text += detail::format_real(p.x);
    text += ',';
    text += detail::format_real(p.y);
    text += '\n';
  }
  out << text;
  detail::check_stream(out, "write_points_csv");
}

inline PointSet read_points_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("points CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y") throw ParseError("points CSV: expected header \"x,y\"");
  PointSet out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const std::string where = "points CSV line " + std::to_string(line_no);
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw ParseError(where + ": expected two comma-separated values");
    }
    const std::string_view view(line);
    out.push_back({detail::parse_real(view.substr(0, comma), where),
                   detail::parse_real(view.substr(comma + 1), where)});
  }
  return out;
}

struct LocusRaster {
  Raster region;
  // Cells whose membership differs from at least one 4-neighbour.
  Raster boundary;
};

inline Raster boundary_cells(const Raster& region) {
  Raster edge = region.blank();
  const std::size_t w = region.width();
  const std::size_t h = region.height();
  for (std::size_t j = 0; j < h; ++j) {
    for (std::size_t i = 0; i < w; ++i) {
      const bool v = region.at(i, j);
      const bool differs = (i > 0 && region.at(i - 1, j) != v) ||
                           (i + 1 < w && region.at(i + 1, j) != v) ||
                           (j > 0 && region.at(i, j - 1) != v) ||
                           (j + 1 < h && region.at(i, j + 1) != v);
      if (differs) edge.set(i, j);
    }
  }
  return edge;
}

/// Maxwell locus { p : Σⱼ d(p, aⱼ) ≤ sum } over box, plus its boundary cells.
inline LocusRaster render_locus(std::span<const Point> foci, double sum, const Box& box,
                                std::size_t resolution) {
  if (foci.empty()) throw EmptyInput("render_locus: no foci");
  if (!(sum >= 0.0)) throw Error("render_locus: sum must be non-negative");
  Raster region = rasterize_region(
      [foci, sum](const Point& p) { return distance_sum(foci, p) <= sum; }, box, resolution);
  Raster edge = boundary_cells(region);
  return {std::move(region), std::move(edge)};
}

/// One row per stage: stage,count,hausdorff_to_previous,nesting_ok. Fields that
/// do not apply (stage 0, nesting in forward mode) are left empty.
inline void write_trace_csv(const IterationTrace& trace, std::ostream& out) {
  std::string text = "stage,count,hausdorff_to_previous,nesting_ok\n";
  for (std::size_t k = 0; k < trace.stage_count(); ++k) {
    text += std::to_string(k) + ',' + std::to_string(trace.stage_size(k)) + ',';
    if (k > 0) text += detail::format_real(trace.consecutive_hausdorff[k - 1]);
    text += ',';
    if (k > 0 && trace.mode == IterationMode::deletion) {
      text += trace.nesting_ok[k - 1] ? "true" : "false";
    }
    text += '\n';
  }
  out << text;
  detail::check_stream(out, "write_trace_csv");
}

// stage_007.pbm / stage_007.csv
inline std::string stage_file_name(std::size_t k, std::string_view extension) {
  std::string digits = std::to_string(k);
  if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
  return "stage_" + digits + "." + std::string(extension);
}

/// Writes content to a sibling temp file and renames it over path.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoFailure("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoFailure("cannot move " + tmp.string() + " to " + path.string());
  }
}

} // namespace ifs_chisel
