#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ifs_chisel_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(const std::string& args) {
    const fs::path out = dir_ / "stdout.txt";
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = std::string(IFS_CHISEL_CLI) + " " + args + " >" + out.string() +
                            " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

  fs::path dir_;
};

TEST_F(CliTest, EllipseForExample) {
  const Result r = run("ellipse --builtin paper-example");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("M = 4\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("foci: (0,0) (1,0)"), std::string::npos) << r.out;
}

TEST_F(CliTest, EllipseJson) {
  const Result r = run("ellipse --builtin sierpinski --json");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"M\": 6"), std::string::npos) << r.out;
}

TEST_F(CliTest, EllipseFromFile) {
  const fs::path f = write("sys.json",
                           R"({"maps":[{"kind":"affine","a":0.5,"b":0,"c":0,"d":0.5,"e":0,"f":0},)"
                           R"({"kind":"affine","a":0.5,"b":0,"c":0,"d":0.5,"e":0.5,"f":0}]})");
  const Result r = run("ellipse --ifs " + f.string());
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("M = 3\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, VerifyPassesForExample) {
  const Result r = run("verify --builtin paper-example --samples 10000 --seed 1");
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
}

TEST_F(CliTest, VerifyUnitDiskFailsWithExitTwo) {
  const fs::path foci = write("disk.csv", "x,y\n0,0\n");
  const Result r = run("verify --builtin paper-example --samples 10000 --seed 1 --foci " +
                       foci.string() + " --threshold 1 --json");
  EXPECT_EQ(r.code, 2) << r.out << r.err;
  EXPECT_NE(r.out.find("\"pass\":false"), std::string::npos) << r.out;
}

TEST_F(CliTest, ForwardIterationWritesStages) {
  const fs::path out = dir_ / "d";
  const Result r = run("iterate --builtin paper-example --mode forward --n 10 --seed-point 1,1 --out " +
                       out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(out / "stage_010.csv");
  std::string line;
  std::size_t rows = 0;
  std::getline(in, line);
  EXPECT_EQ(line, "x,y");
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 1024u);
  EXPECT_TRUE(fs::exists(out / "stage_000.csv"));
  EXPECT_TRUE(fs::exists(out / "trace.csv"));
}

TEST_F(CliTest, DeletionIterationWritesPbm) {
  const fs::path out = dir_ / "del";
  const Result r = run("iterate --builtin cantor --mode deletion --n 2 --resolution 64 --out " +
                       out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(out / "stage_002.pbm").rfind("P1\n# ifs-chisel\n", 0), 0u);
  EXPECT_NE(slurp(out / "trace.csv").find(",true\n"), std::string::npos);
}

TEST_F(CliTest, OutputsAreDeterministic) {
  const fs::path a = dir_ / "a";
  const fs::path b = dir_ / "b";
  const std::string args = "iterate --builtin sierpinski --mode forward --n 5 --seed-point 0.3,0.2 --out ";
  ASSERT_EQ(run(args + a.string()).code, 0);
  ASSERT_EQ(run(args + b.string()).code, 0);
  for (const char* name : {"stage_005.csv", "trace.csv"}) {
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
  const Result v1 = run("verify --builtin sierpinski --samples 500 --seed 9 --json");
  const Result v2 = run("verify --builtin sierpinski --samples 500 --seed 9 --json");
  EXPECT_EQ(v1.out, v2.out);
}

TEST_F(CliTest, HausdorffBetweenFiles) {
  const fs::path a = write("a.csv", "x,y\n0,0\n");
  const fs::path b = write("b.csv", "x,y\n3,4\n");
  const Result r = run("hausdorff --a " + a.string() + " --b " + b.string());
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "5\n");
}

TEST_F(CliTest, LocusWritesPbm) {
  const fs::path foci = write("tri.csv", "x,y\n0,0\n1,0\n0.5,0.8660254037844386\n");
  const fs::path out = dir_ / "locus.pbm";
  const fs::path edge = dir_ / "edge.pbm";
  const Result r = run("locus --foci " + foci.string() + " --sum 2 --box -0.25,-0.25,1.25,1.25" +
                       " --resolution 64 --out " + out.string() + " --boundary-out " + edge.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(out).rfind("P1\n# ifs-chisel\n64 64\n", 0), 0u);
  EXPECT_TRUE(fs::exists(edge));
}

TEST_F(CliTest, AttractorWritesCsv) {
  const fs::path out = dir_ / "cantor.csv";
  const Result r = run("attractor --builtin cantor --eps 0.001 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("depth 7"), std::string::npos) << r.out;
  EXPECT_EQ(slurp(out).rfind("x,y\n", 0), 0u);
}

TEST_F(CliTest, UsageErrorsExitOne) {
  const fs::path f = write("sys.json", R"({"maps":[]})");
  for (const std::string& args :
       {std::string(""), std::string("ellipse"), std::string("ellipse --builtin menger"),
        "ellipse --builtin cantor --ifs " + f.string(), "ellipse --ifs " + f.string(),
        std::string("ellipse --ifs /nonexistent/file.json"),
        std::string("iterate --builtin cantor --mode sideways --n 2 --out x"),
        std::string("verify --builtin cantor --seed notanumber"),
        std::string("locus --foci /nonexistent.csv --sum 2 --box 0,0,1 --out x.pbm")}) {
    const Result r = run(args);
    EXPECT_EQ(r.code, 1) << args;
    EXPECT_FALSE(r.err.empty()) << args;
  }
}

TEST_F(CliTest, ResourceLimitExitsThree) {
  const Result r = run("iterate --builtin sierpinski --mode forward --n 30 --max-points 100000 --out " + (dir_ / "big").string());
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("exceed"), std::string::npos) << r.err;
}

TEST_F(CliTest, HelpExitsZero) {
  EXPECT_EQ(run("--help").code, 0);
}

} // namespace
