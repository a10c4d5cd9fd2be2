#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "ifs_chisel/render_io.hpp"

namespace ifs_chisel {
namespace {

std::string pbm_text(const Raster& r) {
  std::ostringstream os;
  write_pbm(r, os);
  return os.str();
}

std::string csv_text(const PointSet& p) {
  std::ostringstream os;
  write_points_csv(p, os);
  return os.str();
}

TEST(WritePbm, SmallestFile) {
  Raster r({0, 0}, 1.0, 1, 1);
  r.set(0, 0);
  EXPECT_EQ(pbm_text(r), "P1\n# ifs-chisel\n1 1\n1\n");
}

TEST(WritePbm, SingleRowOrientation) {
  Raster r({0, 0}, 1.0, 2, 1);
  r.set(0, 0);
  EXPECT_EQ(pbm_text(r), "P1\n# ifs-chisel\n2 1\n1 0\n");
}

TEST(WritePbm, TopRowFirst) {
  Raster r({0, 0}, 1.0, 2, 2);
  r.set(0, 0);
  EXPECT_EQ(pbm_text(r), "P1\n# ifs-chisel\n2 2\n0 0\n1 0\n");
}

TEST(WritePbm, WideRowsWrapAtSeventyCharacters) {
  Raster r({0, 0}, 1.0, 100, 2);
  for (std::size_t i = 0; i < 100; i += 3) r.set(i, 1);
  const std::string text = pbm_text(r);
  std::istringstream in(text);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    EXPECT_LE(line.size(), 70u);
    ++lines;
  }
  // header (3) + two rows of 35 + 35 + 30 values
  EXPECT_EQ(lines, 3u + 6u);
  EXPECT_EQ(text.back(), '\n');
}

TEST(WritePbm, RoundTripsThroughReader) {
  std::mt19937_64 rng(12);
  std::bernoulli_distribution coin(0.4);
  for (int t = 0; t < 50; ++t) {
    const std::size_t w = 1 + rng() % 90;
    const std::size_t h = 1 + rng() % 20;
    Raster r({0, 0}, 1.0, w, h);
    for (std::size_t j = 0; j < h; ++j) {
      for (std::size_t i = 0; i < w; ++i) r.set(i, j, coin(rng));
    }
    std::istringstream in(pbm_text(r));
    EXPECT_EQ(read_pbm(in), r);
  }
}

TEST(ReadPbm, RejectsMalformedInput) {
  std::istringstream bad_magic("P4\n1 1\n1\n");
  EXPECT_THROW(read_pbm(bad_magic), ParseError);
  std::istringstream truncated("P1\n2 2\n1 0 1\n");
  EXPECT_THROW(read_pbm(truncated), ParseError);
  std::istringstream bad_pixel("P1\n1 1\n2\n");
  EXPECT_THROW(read_pbm(bad_pixel), ParseError);
}

TEST(WritePointsCsv, Examples) {
  EXPECT_EQ(csv_text({{1.0, 1.0}}), "x,y\n1,1\n");
  EXPECT_EQ(csv_text({}), "x,y\n");
  EXPECT_EQ(csv_text({{0.5, 0.25}}), "x,y\n0.5,0.25\n");
}

TEST(WritePointsCsv, ShortestRoundTrip) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> coord(-1e3, 1e3);
  PointSet pts(500);
  for (Point& p : pts) p = {coord(rng), coord(rng)};
  pts.push_back({1.0 / 3.0, -2.0 / 3.0});
  pts.push_back({1e-300, std::numeric_limits<double>::max()});
  std::istringstream in(csv_text(pts));
  EXPECT_EQ(read_points_csv(in), pts);
}

TEST(ReadPointsCsv, RejectsMalformedInput) {
  std::istringstream no_header("1,2\n");
  EXPECT_THROW(read_points_csv(no_header), ParseError);
  std::istringstream bad_value("x,y\n1,abc\n");
  EXPECT_THROW(read_points_csv(bad_value), ParseError);
  std::istringstream three_cols("x,y\n1,2,3\n");
  EXPECT_THROW(read_points_csv(three_cols), ParseError);
}

TEST(RenderLocus, TriangleVerticesOnBoundary) {
  const auto tri = unit_triangle();
  const LocusRaster locus = render_locus(tri, 2.0, {-0.25, -0.25, 1.25, 1.25}, 512);
  for (const Point& v : tri) {
    const auto cell = locus.region.cell_of(v);
    ASSERT_TRUE(cell.has_value());
    EXPECT_TRUE(locus.region.at(cell->first, cell->second));
    EXPECT_TRUE(locus.boundary.at(cell->first, cell->second));
  }
}

TEST(RenderLocus, CentroidIsInterior) {
  const auto tri = unit_triangle();
  const LocusRaster locus = render_locus(tri, 2.0, {-0.25, -0.25, 1.25, 1.25}, 512);
  const Point centroid{0.5, std::sqrt(3.0) / 6.0};
  EXPECT_NEAR(distance_sum(tri, centroid), std::sqrt(3.0), 1e-15);
  const auto cell = locus.region.cell_of(centroid);
  ASSERT_TRUE(cell.has_value());
  EXPECT_TRUE(locus.region.at(cell->first, cell->second));
  EXPECT_FALSE(locus.boundary.at(cell->first, cell->second));
}

TEST(RenderLocus, BelowFermatMinimumIsEmpty) {
  const auto tri = unit_triangle();
  // Fine-grid oracle: the distance sum never drops below √3.
  double grid_min = 1e300;
  for (int j = 0; j <= 1000; ++j) {
    for (int i = 0; i <= 1000; ++i) {
      grid_min = std::min(grid_min, distance_sum(tri, {i / 1000.0, j / 1000.0}));
    }
  }
  EXPECT_GE(grid_min, std::sqrt(3.0) - 1e-15);
  EXPECT_LT(grid_min, std::sqrt(3.0) + 1e-5);
  const LocusRaster locus =
      render_locus(tri, std::sqrt(3.0) - 1e-9, {-0.25, -0.25, 1.25, 1.25}, 512);
  EXPECT_EQ(locus.region.marked_count(), 0u);
  EXPECT_EQ(locus.boundary.marked_count(), 0u);
}

TEST(RenderLocus, MonotoneInSum) {
  const auto tri = unit_triangle();
  const Box box{-1, -1, 2, 2};
  Raster prev = render_locus(tri, 1.8, box, 128).region;
  for (double sum = 1.9; sum < 3.5; sum += 0.1) {
    const Raster cur = render_locus(tri, sum, box, 128).region;
    EXPECT_TRUE(raster_subset(prev, cur, 0)) << sum;
    prev = cur;
  }
}

TEST(RenderLocus, TwoFociMatchAnalyticEllipse) {
  const PointSet foci{{0.0, 0.0}, {1.0, 0.0}};
  for (double sum : {1.5, 2.5, 4.0}) {
    const double a = sum / 2.0;
    const double b = std::sqrt(a * a - 0.25);
    const Box box{0.5 - a, -b, 0.5 + a, b};
    const LocusRaster locus = render_locus(foci, sum, box, 512);
    const double cell = locus.region.cell_size();
    const double area = locus.region.marked_count() * cell * cell;
    EXPECT_NEAR(area / (std::numbers::pi * a * b), 1.0, 0.01) << sum;
  }
}

TEST(RenderLocus, ArgumentValidation) {
  EXPECT_THROW(render_locus(PointSet{}, 1.0, {0, 0, 1, 1}, 8), EmptyInput);
  EXPECT_THROW(render_locus(PointSet{{0, 0}}, -1.0, {0, 0, 1, 1}, 8), Error);
}

TEST(BoundaryCells, SingleMarkedCell) {
  Raster r({0, 0}, 1.0, 3, 3);
  r.set(1, 1);
  const Raster b = boundary_cells(r);
  EXPECT_TRUE(b.at(1, 1));
  EXPECT_TRUE(b.at(0, 1));
  EXPECT_TRUE(b.at(1, 2));
  EXPECT_FALSE(b.at(0, 0));
  EXPECT_EQ(b.marked_count(), 5u);
}

TEST(TraceCsv, ForwardTrace) {
  const IterationTrace t = forward_iterate(builtin("cantor"), {{0.0, 0.0}}, 2);
  std::ostringstream os;
  write_trace_csv(t, os);
  const std::string expected = "stage,count,hausdorff_to_previous,nesting_ok\n"
                               "0,1,,\n"
                               "1,2," + detail::format_real(t.consecutive_hausdorff[0]) + ",\n"
                               "2,4," + detail::format_real(t.consecutive_hausdorff[1]) + ",\n";
  EXPECT_EQ(os.str(), expected);
}

TEST(TraceCsv, DeletionTraceHasNestingFlags) {
  const IfsSystem s({{0.5, 0, 0, 0.5, 0, 0}});
  const Raster b0 = rasterize_region([](const Point&) { return true; }, {0, 0, 1, 1}, 16);
  std::ostringstream os;
  write_trace_csv(deletion_iterate(s, b0, 2), os);
  EXPECT_NE(os.str().find("\n1,64,"), std::string::npos);
  EXPECT_NE(os.str().find(",true\n2,16,"), std::string::npos);
}

TEST(StageFileName, ZeroPadded) {
  EXPECT_EQ(stage_file_name(7, "pbm"), "stage_007.pbm");
  EXPECT_EQ(stage_file_name(10, "csv"), "stage_010.csv");
  EXPECT_EQ(stage_file_name(1234, "csv"), "stage_1234.csv");
}

TEST(WriteFileAtomic, WritesAndReplaces) {
  const auto dir = std::filesystem::temp_directory_path() / "ifs_chisel_render_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.txt";
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text, "second");
  EXPECT_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
  EXPECT_THROW(write_file_atomic(dir / "missing" / "x.txt", "x"), IoFailure);
  std::filesystem::remove_all(dir);
}

} // namespace
} // namespace ifs_chisel
