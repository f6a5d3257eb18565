#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "tsrm/config.hpp"
#include "tsrm/csv.hpp"

using namespace tsrm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("tsrm_cli_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(TSRM_CLI) + " " + args + " >" + log.string() + " 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(read_text_file((dir / "manifest.json").string())); }

}  // namespace

TEST(Config, EmptyFileGivesDefaults) {
  EXPECT_EQ(parse_config(""), Config{});
  const auto dir = scratch("empty");
  write_text_file((dir / "empty.ini").string(), "");
  EXPECT_EQ(load_config((dir / "empty.ini").string()), Config{});
}

TEST(Config, NegativeStepNamesTheKey) {
  try {
    parse_config("[samplers]\ndt = -1\n");
    FAIL() << "expected a config error";
  } catch (const config_error& e) {
    EXPECT_NE(std::string(e.what()).find("samplers.dt"), std::string::npos) << e.what();
  }
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(parse_config("[samplers]\ndtt = 0.1\n"), config_error);
  EXPECT_THROW(parse_config("[sampler]\ndt = 0.1\n"), config_error);
  EXPECT_THROW(parse_config("dt = 0.1\n"), config_error);
}

TEST(Config, BadValuesRejected) {
  EXPECT_THROW(parse_config("[lattice]\nprofile = wavy\n"), config_error);
  EXPECT_THROW(parse_config("[samplers]\nbridge_correction = maybe\n"), config_error);
  EXPECT_THROW(parse_config("[estimators]\nreplicas = 1.5\n"), config_error);
  EXPECT_THROW(parse_config("[area_laws]\na_min = 10\na_max = 1\n"), config_error);
  EXPECT_THROW(parse_config("[run]\nthreads = 0\n"), config_error);
}

TEST(Config, ParseErrorCarriesLineNumber) {
  try {
    parse_config("[rng]\nseed = 3\n[broken\n", "x.ini");
    FAIL() << "expected a config error";
  } catch (const config_error& e) {
    EXPECT_NE(std::string(e.what()).find("x.ini:3"), std::string::npos) << e.what();
  }
}

TEST(Config, RoundTrip) {
  Config c;
  c.seed = 99;
  c.profile = ProfileKind::flat;
  c.mesh = 1.0 / 3;
  c.sde.dt = 1e-5;
  c.sde.bridge_correction = false;
  c.levels = 7;
  c.threads = 3;
  const auto text = config_to_ini(c);
  EXPECT_EQ(parse_config(text), c);
  EXPECT_EQ(config_to_ini(parse_config(text)), text);
  EXPECT_EQ(config_snapshot(c).at("samplers").at("dt"), "1e-05");
}

TEST(Csv, EmptyTableIsHeaderOnly) {
  CsvTable t({"a", "b"});
  EXPECT_EQ(t.str(), "a,b\n");
}

TEST(Csv, ShortestRoundTripFloats) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1e-5), "1e-05");
  EXPECT_EQ(format_number(2.0), "2");
  for (double v : {0.1 + 0.2, 1.0 / 3, 6.02214076e23, -4.9e-324, 0.07832926514925364}) EXPECT_EQ(parse_number(format_number(v)), v);
}

TEST(Csv, WriteThenRead) {
  CsvTable t({"x", "n", "name"});
  t.row(0.1 + 0.2, 42, "alpha");
  t.row(-1e300, -7, "beta");
  const auto dir = scratch("rw");
  const auto path = (dir / "t.csv").string();
  write_text_file(path, t.str());
  const auto back = parse_csv(read_text_file(path));
  EXPECT_EQ(back.header(), t.header());
  EXPECT_EQ(back.rows(), t.rows());
  EXPECT_EQ(parse_number(back.rows()[0][0]), 0.1 + 0.2);
  EXPECT_EQ(read_text_file(path).find('\r'), std::string::npos);
}

TEST(Csv, RowWidthChecked) {
  CsvTable t({"a", "b"});
  EXPECT_THROW(t.row(1.0), domain_error);
}

TEST(Csv, Digest) {
  EXPECT_EQ(fnv1a64_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a64_hex("a"), "af63dc4c8601ec8c");
  EXPECT_NE(fnv1a64_hex("a,b\n"), fnv1a64_hex("a,b\r\n"));
}

TEST(Csv, UnwritablePathIsAnIoError) {
  EXPECT_THROW(write_text_file("/nonexistent-dir/x.csv", "a\n"), io_error);
  EXPECT_THROW(read_text_file("/nonexistent-dir/x.csv"), io_error);
}

TEST(Cli, ManifestListsOutputsWithDigests) {
  const auto dir = scratch("manifest");
  ASSERT_EQ(run_cli("area-law --out " + dir.string(), dir / "log.txt"), 0);
  const auto m = manifest(dir);
  EXPECT_EQ(m["subcommand"], "area-law");
  ASSERT_FALSE(m["outputs"].empty());
  for (const auto& o : m["outputs"]) {
    const auto text = read_text_file((dir / o["file"].get<std::string>()).string());
    EXPECT_EQ(o["fnv1a64"], fnv1a64_hex(text));
  }
  EXPECT_TRUE(m.contains("config_snapshot"));
  EXPECT_TRUE(m.contains("master_seed"));
}

TEST(Cli, DigestsStableAcrossRunsAndThreads) {
  auto digests = [](const std::string& name, const std::string& threads) {
    const auto dir = scratch(name);
    EXPECT_EQ(run_cli("tail-h-flat --mc --replicas 20000 --seed 5 --threads " + threads + " --out " + dir.string(),
                      dir / "log.txt"),
              0);
    std::vector<std::string> out;
    const auto m = manifest(dir);
    for (const auto& o : m["outputs"]) out.push_back(o["fnv1a64"]);
    return out;
  };
  const auto a = digests("d1", "1"), b = digests("d2", "1"), c = digests("d3", "3");
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("codes");
  EXPECT_EQ(run_cli("kappa --out " + dir.string(), dir / "ok.txt"), 0);
  EXPECT_EQ(run_cli("kappa --no-such-flag", dir / "flag.txt"), 1);
  EXPECT_EQ(run_cli("frobnicate", dir / "sub.txt"), 1);
  write_text_file((dir / "bad.ini").string(), "[samplers]\ndt = -1\n");
  EXPECT_EQ(run_cli("kappa --config " + (dir / "bad.ini").string() + " --out " + dir.string(), dir / "cfg.txt"), 1);
  EXPECT_NE(read_text_file((dir / "cfg.txt").string()).find("samplers.dt"), std::string::npos);
  EXPECT_EQ(run_cli("kappa --out /proc/no-such-dir/out", dir / "io.txt"), 2);
}
