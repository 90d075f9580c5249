#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fnls/cli.hpp"

using namespace fnls;
namespace fs = std::filesystem;

namespace {

const char* kMinimal =
    "dimension = 1\n"
    "s = 0.7\n"
    "beta = 0.8\n"
    "lambda = 1\n"
    "c2 = 1\n"
    "n = 512\n"
    "L = 128\n";

std::string parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "<no error>";
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream is(p);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fnls_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  int run(std::vector<std::string> args) {
    out_.str({});
    err_.str({});
    args.insert(args.begin(), "fnls");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli::run(static_cast<int>(argv.size()), argv.data(), {out_, err_});
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST(Config, MinimalConfigTakesDefaults) {
  const auto c = parse_config(kMinimal);
  EXPECT_EQ(c.physics.dimension, 1);
  EXPECT_DOUBLE_EQ(c.physics.s, 0.7);
  EXPECT_EQ(c.nonlinearity.cmu, 0.0);
  EXPECT_EQ(c.kernel, KernelRule::Spectral);
  EXPECT_EQ(c.solver.tol, 1e-8);
  EXPECT_EQ(c.evolution.record_stride, 10u);
  EXPECT_EQ(c.seed, 1u);
  EXPECT_TRUE(c.admissibility.existence_ok);
  EXPECT_EQ(c.grid(), Grid::cube(1, 512, 128.0));
}

TEST(Config, CommentsAndBlankLinesAreIgnored) {
  const auto c = parse_config(std::string("# header\n\n") + kMinimal + "kernel = cell-average  # trailing\n");
  EXPECT_EQ(c.kernel, KernelRule::CellAverage);
}

TEST(Config, ErrorsNameTheLine) {
  EXPECT_EQ(parse_error(std::string(kMinimal) + "colour = red\n"), "line 8: unknown key 'colour'");
  EXPECT_EQ(parse_error(std::string(kMinimal) + "s = 0.5\n"), "duplicate key 's' on lines 2 and 8");
  EXPECT_EQ(parse_error("dimension = 1\ns = 0.7\nbeta = 0.8\nlambda = 1\nn = 64\nL = 10\n"),
            "missing required key 'c2'");
  EXPECT_NE(parse_error(std::string(kMinimal) + "tol = fast\n").find("line 8"), std::string::npos);
  EXPECT_NE(parse_error(std::string(kMinimal) + "no equals sign\n").find("line 8"), std::string::npos);
  EXPECT_NE(parse_error(std::string(kMinimal) + "kernel = exact\n").find("line 8"), std::string::npos);
  EXPECT_NE(parse_error("dimension = 2\ns = 0.7\nbeta = 0.8\nlambda = 1\nc2 = 1\nn = 8,8,8\nL = 1\n").find("line 6"),
            std::string::npos);
}

TEST(Config, SerializeThenParseIsAFixpoint) {
  auto c = parse_config("dimension = 2\ns = 0.6\nbeta = 1.1\nlambda = 0.3\nc2 = 0.5\ncmu = 1\nmu = 2.4\n"
                        "n = 64,32\nL = 20,10.1\ntol = 1e-9\nT = 3\ndt = 0.001\nseed = 77\n");
  const auto text = serialize_config(c);
  const auto again = parse_config(text);
  EXPECT_EQ(serialize_config(again), text);
  EXPECT_EQ(again.L[1], 10.1);
  EXPECT_EQ(again.n, (std::vector<std::size_t>{64, 32}));
  EXPECT_EQ(again.seed, 77u);
}

TEST(Snapshot, RoundTripIsBitExact) {
  const Grid g({8, 10}, {3.0, 2.5});
  ComplexField u(g);
  for (std::size_t i = 0; i < g.size(); ++i) u[i] = Complex(std::sin(1.0 + i), 1.0 / (3.0 + i));
  std::stringstream ss;
  write_snapshot(ss, u);
  EXPECT_EQ(ss.str().size(), 4 + 4 + 4 + 2 * 16 + g.size() * 16);
  const auto v = read_snapshot(ss);
  EXPECT_EQ(v.grid(), g);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(v[i], u[i]);
}

TEST(Snapshot, MalformedInputIsRejected) {
  const Grid g = Grid::cube(1, 8, 1.0);
  std::stringstream good;
  write_snapshot(good, ComplexField(g));
  const std::string bytes = good.str();
  auto fails_with = [](const std::string& data, const std::string& needle) {
    std::stringstream ss(data);
    try {
      read_snapshot(ss);
    } catch (const ParseError& e) {
      return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
  };
  EXPECT_TRUE(fails_with("XNLS" + bytes.substr(4), "bad magic"));
  std::string bad_version = bytes;
  bad_version[4] = 9;
  EXPECT_TRUE(fails_with(bad_version, "version 9"));
  EXPECT_TRUE(fails_with(bytes.substr(0, bytes.size() - 3), "truncated"));
  EXPECT_TRUE(fails_with(bytes + "x", "trailing"));
}

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run({}), cli::kExitOperational);
  EXPECT_EQ(err_.str().rfind(cli::kErrorPrefix, 0), 0u);
  EXPECT_EQ(run({"ground-state"}), cli::kExitOperational);
  EXPECT_EQ(run({"validate", "--config", path("missing.cfg")}), cli::kExitOperational);
  EXPECT_NE(err_.str().find("cannot open config"), std::string::npos);
  EXPECT_EQ(run({"--help"}), cli::kExitOk);
}

TEST_F(Cli, ConfigErrorIsReportedWithPrefix) {
  const auto cfg = write("bad.cfg", std::string(kMinimal) + "colour = red\n");
  EXPECT_EQ(run({"validate", "--config", cfg}), cli::kExitOperational);
  EXPECT_EQ(err_.str(), std::string(cli::kErrorPrefix) + "line 8: unknown key 'colour'\n");
}

TEST_F(Cli, ValidateReportsCoulombCriticalCase) {
  const auto cfg = write("coulomb.cfg", "dimension = 3\ns = 0.5\nbeta = 2\nlambda = 1\nc2 = 1\nn = 16\nL = 8\n");
  EXPECT_EQ(run({"validate", "--config", cfg, "--summary", path("v.json")}), cli::kExitOk);
  const auto j = Json::parse(out_.str());
  EXPECT_EQ(j["admissibility"]["existence_ok"], true);
  EXPECT_EQ(j["admissibility"]["negative_energy_ok"], false);
  EXPECT_EQ(Json::parse(slurp(path("v.json"))), j);
  // The solver refuses the same configuration.
  EXPECT_EQ(run({"ground-state", "--config", cfg}), cli::kExitOperational);
}

TEST_F(Cli, GroundStateThenEvolveAlongTheOrbit) {
  const auto cfg = write("gs.cfg", std::string(kMinimal) + "T = 0.5\ndt = 0.01\nrecord_stride = 10\n");
  ASSERT_EQ(run({"ground-state", "--config", cfg, "--out", path("u.snap"), "--history", path("h.csv"), "--summary",
                 path("gs.json")}),
            cli::kExitOk)
      << err_.str();
  const auto gs = Json::parse(slurp(path("gs.json")));
  EXPECT_EQ(gs["pass"], true);
  EXPECT_LT(gs["ground_state"]["energy"]["total"].get<double>(), 0.0);
  const auto hist = read_csv(path("h.csv"));
  ASSERT_GT(hist.size(), 2u);
  EXPECT_EQ(hist[0], history_columns());

  ASSERT_EQ(run({"evolve", "--config", cfg, "--init", path("u.snap"), "--ref", path("u.snap"), "--out",
                 path("traj.csv"), "--dump-every", "25", "--dump-prefix", path("d")}),
            cli::kExitOk)
      << err_.str();
  const auto summary = Json::parse(out_.str());
  EXPECT_EQ(summary["steps"], 50);
  EXPECT_LT(summary["sup_orbit_distance"].get<double>(), 1e-4);
  const auto traj = read_csv(path("traj.csv"));
  ASSERT_EQ(traj.size(), 1u + 6u);
  EXPECT_EQ(traj[0], trajectory_columns());
  for (std::size_t i = 1; i < traj.size(); ++i) {
    ASSERT_EQ(traj[i].size(), 6u);
    EXPECT_FALSE(traj[i][4].empty());
  }
  EXPECT_TRUE(fs::exists(path("d_00000025.snap")));
  EXPECT_TRUE(fs::exists(path("d_00000050.snap")));

  // Without a reference the orbit columns stay empty.
  ASSERT_EQ(run({"evolve", "--config", cfg, "--init", path("u.snap"), "--out", path("free.csv")}), cli::kExitOk);
  EXPECT_TRUE(read_csv(path("free.csv"))[1][4].empty());

  EXPECT_EQ(run({"analyze", "orbit", "--config", cfg, "--phi", path("d_00000050.snap"), "--w", path("u.snap")}),
            cli::kExitOk);
  EXPECT_LT(Json::parse(out_.str())["relative_distance"].get<double>(), 1e-4);
}

TEST_F(Cli, OutputsAreDeterministic) {
  const auto cfg = write("gs.cfg", std::string(kMinimal) + "T = 0.2\ndt = 0.01\n");
  ASSERT_EQ(run({"ground-state", "--config", cfg, "--out", path("a.snap"), "--history", path("a.csv")}), cli::kExitOk);
  ASSERT_EQ(run({"ground-state", "--config", cfg, "--out", path("b.snap"), "--history", path("b.csv")}), cli::kExitOk);
  EXPECT_EQ(slurp(path("a.snap")), slurp(path("b.snap")));
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  ASSERT_EQ(run({"evolve", "--config", cfg, "--init", path("a.snap"), "--out", path("ta.csv")}), cli::kExitOk);
  ASSERT_EQ(run({"evolve", "--config", cfg, "--init", path("a.snap"), "--out", path("tb.csv")}), cli::kExitOk);
  EXPECT_EQ(slurp(path("ta.csv")), slurp(path("tb.csv")));
}

TEST_F(Cli, SnapshotOnWrongGridIsRejected) {
  const auto cfg = write("gs.cfg", kMinimal);
  save_snapshot(path("small.snap"), ComplexField(Grid::cube(1, 64, 128.0)));
  EXPECT_EQ(run({"evolve", "--config", cfg, "--init", path("small.snap"), "--out", path("t.csv")}),
            cli::kExitOperational);
  EXPECT_NE(err_.str().find("does not match"), std::string::npos);
}

TEST_F(Cli, LevyAndExponentsSubcommands) {
  const auto cfg = write("gs.cfg", std::string(kMinimal));
  const Grid g = Grid::cube(1, 512, 128.0);
  save_snapshot(path("g.snap"), sample<Complex>(g, [](std::span<const double> x) { return std::exp(-x[0] * x[0]); }));
  EXPECT_EQ(run({"analyze", "levy", "--config", cfg, "--field", path("g.snap"), "--radii", "0.5,1,2,4,8", "--out",
                 path("q.csv")}),
            cli::kExitOk)
      << err_.str();
  EXPECT_EQ(Json::parse(out_.str())["classification"], "compact-like");
  EXPECT_EQ(read_csv(path("q.csv")).size(), 6u);
  EXPECT_EQ(run({"analyze", "levy", "--config", cfg, "--field", path("g.snap"), "--radii", "1,x"}),
            cli::kExitOperational);

  EXPECT_EQ(run({"analyze", "exponents", "--config", cfg, "--out", path("e.csv")}), cli::kExitOk) << out_.str();
  const auto j = Json::parse(out_.str());
  EXPECT_EQ(j["pass"], true);
  EXPECT_DOUBLE_EQ(j["young"]["e1"].get<double>(), gn_hls_exponents({1, 0.7, 0.8, 1.0}, {1, 0, 2}).e1);
}

#ifdef FNLS_CLI_PATH
TEST_F(Cli, InstalledBinaryReportsExitCodes) {
  const std::string bin = FNLS_CLI_PATH;
  const auto cfg = write("c.cfg", kMinimal);
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status(bin + " validate --config " + cfg), cli::kExitOk);
  EXPECT_EQ(status(bin + " validate --config " + path("nope.cfg")), cli::kExitOperational);
  EXPECT_EQ(status(bin + " frobnicate"), cli::kExitOperational);
}
#endif
