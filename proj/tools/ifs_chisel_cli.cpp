// ifs-chisel: command-line front end for the invariant-ellipse and attractor
// pipelines. Exit codes: 0 ok, 1 usage/parse error, 2 verification failure,
// 3 resource limit.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ifs_chisel/ifs_chisel.hpp"

namespace fs = std::filesystem;
using namespace ifs_chisel;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitVerifyFailed = 2;
constexpr int kExitResource = 3;

struct IfsSource {
  std::string file;
  std::string name;

  void attach(CLI::App* cmd) {
    auto* f = cmd->add_option("--ifs", file, "IFS JSON document");
    auto* b = cmd->add_option("--builtin", name, "cantor | sierpinski | paper-example");
    f->excludes(b);
    b->excludes(f);
  }

  IfsSystem load() const {
    if (file.empty() == name.empty()) {
      throw CLI::ValidationError("exactly one of --ifs and --builtin is required");
    }
    if (!name.empty()) return builtin(name);
    return parse_ifs(read_text(file));
  }

  static std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }
};

std::vector<double> parse_reals(const std::string& text, std::size_t count, const char* flag) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(detail::parse_real(std::string_view(text).substr(start, comma - start), flag));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.size() != count) {
    throw CLI::ValidationError(std::string(flag) + " expects " + std::to_string(count) +
                               " comma-separated numbers");
  }
  return out;
}

PointSet read_points_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot read " + path);
  return read_points_csv(in);
}

std::string points_csv(const PointSet& pts) {
  std::ostringstream os;
  write_points_csv(pts, os);
  return os.str();
}

std::string pbm(const Raster& r) {
  std::ostringstream os;
  write_pbm(r, os);
  return os.str();
}

std::string fmt(double v) { return detail::format_real(v); }

int cmd_ellipse(const IfsSource& src, bool as_json) {
  const IfsSystem s = src.load();
  const InvariantEllipse e = ellipse_params(s);
  const std::vector<double> d_i = focal_sums(e.foci);
  if (as_json) {
    nlohmann::ordered_json j;
    j["foci"] = nlohmann::ordered_json::array();
    for (const Point& a : e.foci) j["foci"].push_back({a.x, a.y});
    j["ratios"] = std::vector<double>(s.ratios().begin(), s.ratios().end());
    j["lambda"] = e.lambda_max;
    j["D_i"] = d_i;
    j["D"] = e.d_max;
    j["M"] = e.m_threshold;
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  std::cout << "foci:";
  for (const Point& a : e.foci) std::cout << " (" << fmt(a.x) << "," << fmt(a.y) << ")";
  std::cout << "\nlambda = " << fmt(e.lambda_max) << "\nD = " << fmt(e.d_max)
            << "\nM = " << fmt(e.m_threshold) << '\n';
  return 0;
}

int cmd_verify(const IfsSource& src, std::size_t samples, std::uint64_t seed,
               std::optional<double> threshold, const std::string& foci_file, bool as_json) {
  const IfsSystem s = src.load();
  InvariantEllipse e = ellipse_params(s);
  // Exploration only: an overridden region carries no invariance guarantee.
  if (!foci_file.empty()) {
    if (!threshold) throw CLI::ValidationError("--foci requires --threshold");
    e.foci = read_points_file(foci_file);
    if (e.foci.empty()) throw CLI::ValidationError("--foci file lists no points");
  }
  if (threshold) e.m_threshold = *threshold;
  const InvarianceReport r = verify_invariance(s, e, samples, seed);
  if (as_json) {
    std::cout << to_json(r).dump() << '\n';
  } else {
    std::cout << to_text(r);
  }
  return r.pass ? 0 : kExitVerifyFailed;
}

struct IterateArgs {
  std::string mode = "forward";
  std::size_t n = 0;
  std::string seed_point;
  std::size_t resolution = 0;
  std::string out;
  double dedup = 0.0;
  std::size_t max_points = std::size_t{1} << 24;
};

int cmd_iterate(const IfsSource& src, const IterateArgs& args) {
  const IfsSystem s = src.load();
  const fs::path dir(args.out);
  IterationTrace trace;
  if (args.mode == "forward") {
    if (args.resolution != 0) {
      throw CLI::ValidationError("--resolution applies to deletion mode only");
    }
    Point seed = s.fixed_points()[0];
    if (!args.seed_point.empty()) {
      const auto xy = parse_reals(args.seed_point, 2, "--seed-point");
      seed = {xy[0], xy[1]};
    }
    ForwardOptions opts;
    opts.max_points = args.max_points;
    opts.dedup_resolution = args.dedup;
    trace = forward_iterate(s, {seed}, args.n, opts);
    fs::create_directories(dir);
    for (std::size_t k = 0; k < trace.stage_count(); ++k) {
      write_file_atomic(dir / stage_file_name(k, "csv"), points_csv(trace.point_stages[k]));
    }
  } else if (args.mode == "deletion") {
    if (!args.seed_point.empty()) {
      throw CLI::ValidationError("--seed-point applies to forward mode only");
    }
    const std::size_t resolution = args.resolution == 0 ? 512 : args.resolution;
    const InvariantEllipse e = ellipse_params(s);
    if (!(e.m_threshold > 0.0)) {
      throw Error("invariant region is a single point; deletion mode needs M > 0");
    }
    const Raster b0 = rasterize_region([&e](const Point& p) { return contains(e, p); },
                                       bounding_box(e), resolution);
    trace = deletion_iterate(s, b0, args.n);
    fs::create_directories(dir);
    for (std::size_t k = 0; k < trace.stage_count(); ++k) {
      write_file_atomic(dir / stage_file_name(k, "pbm"), pbm(trace.raster_stages[k]));
    }
  } else {
    throw CLI::ValidationError("--mode must be forward or deletion");
  }
  std::ostringstream csv;
  write_trace_csv(trace, csv);
  write_file_atomic(dir / "trace.csv", csv.str());
  std::cout << "wrote " << trace.stage_count() << " stages to " << dir.string() << '\n';
  return 0;
}

int cmd_hausdorff(const std::string& a, const std::string& b) {
  std::cout << fmt(hausdorff_distance(read_points_file(a), read_points_file(b))) << '\n';
  return 0;
}

struct LocusArgs {
  std::string foci;
  double sum = 0.0;
  std::string box;
  std::size_t resolution = 512;
  std::string out;
  std::string boundary_out;
};

int cmd_locus(const LocusArgs& args) {
  const PointSet foci = read_points_file(args.foci);
  const auto b = parse_reals(args.box, 4, "--box");
  const LocusRaster locus = render_locus(foci, args.sum, {b[0], b[1], b[2], b[3]}, args.resolution);
  write_file_atomic(args.out, pbm(locus.region));
  if (!args.boundary_out.empty()) write_file_atomic(args.boundary_out, pbm(locus.boundary));
  std::cout << "marked " << locus.region.marked_count() << " of "
            << locus.region.width() * locus.region.height() << " cells\n";
  return 0;
}

int cmd_attractor(const IfsSource& src, double eps, const std::string& seed_point,
                  const std::string& out, std::size_t max_points) {
  const IfsSystem s = src.load();
  Point seed = s.fixed_points()[0];
  if (!seed_point.empty()) {
    const auto xy = parse_reals(seed_point, 2, "--seed-point");
    seed = {xy[0], xy[1]};
  }
  const PointSet pts = attractor_estimate(s, eps, seed, max_points);
  write_file_atomic(out, points_csv(pts));
  std::cout << "depth " << attractor_depth(s, eps, seed) << ", " << pts.size() << " points\n";
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Invariant multi-foci ellipses and attractors of planar IFS"};
  app.require_subcommand(1);

  IfsSource src;
  bool as_json = false;

  auto* ellipse = app.add_subcommand("ellipse", "print fixed points, lambda, D and M");
  src.attach(ellipse);
  ellipse->add_flag("--json", as_json, "machine-readable output");

  std::size_t samples = 10'000;
  std::uint64_t seed = 0;
  std::optional<double> threshold;
  auto* verify = app.add_subcommand("verify", "sample the ellipse and check f_i(B) in B");
  src.attach(verify);
  verify->add_option("--samples", samples, "number of sample points")->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed, "splitmix64 seed")->required();
  std::string verify_foci;
  verify->add_option("--threshold", threshold, "override M (exploration, no guarantee)");
  verify->add_option("--foci", verify_foci, "replace the region's foci (x,y CSV)");
  verify->add_flag("--json", as_json, "machine-readable output");

  IterateArgs it;
  auto* iterate = app.add_subcommand("iterate", "forward or deletion iteration to files");
  src.attach(iterate);
  iterate->add_option("--mode", it.mode, "forward | deletion")
      ->check(CLI::IsMember({"forward", "deletion"}));
  iterate->add_option("--n", it.n, "number of steps")->required();
  iterate->add_option("--seed-point", it.seed_point, "X,Y (forward mode)");
  iterate->add_option("--resolution", it.resolution, "cells along the long side (deletion)");
  iterate->add_option("--out", it.out, "output directory")->required();
  iterate->add_option("--dedup", it.dedup, "forward dedup cell size (0 = off)");
  iterate->add_option("--max-points", it.max_points, "forward point cap");

  std::string file_a, file_b;
  auto* hausdorff = app.add_subcommand("hausdorff", "distance between two point CSV files");
  hausdorff->add_option("--a", file_a)->required();
  hausdorff->add_option("--b", file_b)->required();

  LocusArgs lc;
  auto* locus = app.add_subcommand("locus", "render a Maxwell multi-foci locus as PBM");
  locus->add_option("--foci", lc.foci, "foci as x,y CSV")->required();
  locus->add_option("--sum", lc.sum, "distance-sum threshold")->required();
  locus->add_option("--box", lc.box, "X0,Y0,X1,Y1")->required();
  locus->add_option("--resolution", lc.resolution, "cells along the long side");
  locus->add_option("--out", lc.out, "region PBM")->required();
  locus->add_option("--boundary-out", lc.boundary_out, "boundary PBM");

  double eps = 0.0;
  std::string attractor_seed, attractor_out;
  std::size_t attractor_cap = std::size_t{1} << 24;
  auto* attractor = app.add_subcommand("attractor", "attractor estimate within eps to CSV");
  src.attach(attractor);
  attractor->add_option("--eps", eps, "Hausdorff accuracy")->required()->check(CLI::PositiveNumber);
  attractor->add_option("--seed-point", attractor_seed, "X,Y (default: first fixed point)");
  attractor->add_option("--out", attractor_out, "output CSV")->required();
  attractor->add_option("--max-points", attractor_cap, "point cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "ifs-chisel: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*ellipse) return cmd_ellipse(src, as_json);
    if (*verify) return cmd_verify(src, samples, seed, threshold, verify_foci, as_json);
    if (*iterate) return cmd_iterate(src, it);
    if (*hausdorff) return cmd_hausdorff(file_a, file_b);
    if (*locus) return cmd_locus(lc);
    if (*attractor) return cmd_attractor(src, eps, attractor_seed, attractor_out, attractor_cap);
  } catch (const ResourceLimit& e) {
    std::cerr << "ifs-chisel: " << e.what() << '\n';
    return kExitResource;
  } catch (const CLI::Error& e) {
    std::cerr << "ifs-chisel: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "ifs-chisel: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

} // namespace

int main(int argc, char** argv) { return run(argc, argv); }
