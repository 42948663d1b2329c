#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rrnet/error.hpp"
#include "rrnet/run_config.hpp"
#include "rrnet/runs.hpp"

using namespace rrnet;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rrnet_cfg_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}
}  // namespace

TEST_CASE("key vocabulary") {
  CHECK(RunConfig::subcommands().size() == 5);
  for (const auto& sub : RunConfig::subcommands()) {
    const auto keys = RunConfig::allowed_keys(sub);
    CHECK(std::is_sorted(keys.begin(), keys.end()));
    CHECK(std::binary_search(keys.begin(), keys.end(), "seed"));
    CHECK(std::binary_search(keys.begin(), keys.end(), "out"));
  }
  CHECK_THROWS_AS(RunConfig("plot"), InvalidArgument);

  RunConfig c("benchmark");
  c.set("phi", "5");
  try {
    c.set("bta", "0.3");
    FAIL("expected rejection");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("'bta'") != std::string::npos);
  }
  CHECK_THROWS_AS(RunConfig("train").set("phi", "1"), InvalidArgument);
}

TEST_CASE("config text") {
  RunConfig c("benchmark");
  c.merge_text("# comment\nphi = 2\n\n  delta=0.2   # trailing\nbetas = 0.1, 0.3\nreps = 4\n", "cfg");
  CHECK(c.get("phi", "") == "2");
  CHECK(c.get_double("delta", 0.0) == 0.2);
  CHECK(c.get_doubles("betas", {}) == std::vector<double>{0.1, 0.3});
  CHECK(c.get_size("reps", 1) == 4);
  CHECK(c.get_size("jobs", 3) == 3);
  c.merge_text("phi = 5", "override");
  CHECK(c.get("phi", "") == "5");
  try {
    c.merge_text("phi = 1\nwidth = 4\n", "bad.cfg");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
    CHECK(std::string(e.what()).find("width") != std::string::npos);
  }
  CHECK_THROWS_AS(c.merge_text("phi 1\n", "x"), ParseError);
  c.set("reps", "-3");
  CHECK_THROWS_AS(c.get_size("reps", 1), InvalidArgument);
  c.set("delta", "abc");
  CHECK_THROWS_AS(c.get_double("delta", 0.0), InvalidArgument);
  CHECK_THROWS_AS(c.merge_file("/nonexistent/run.cfg"), IoError);
  CHECK(split_list(" a, ,b ,c") == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("optimizer settings from keys") {
  RunConfig c("train");
  c.set("epochs", "7");
  c.set("lr", "0.01");
  c.set("sigma_solver", "fixed-point");
  c.set("seed", "42");
  const TrainConfig tc = train_config_from(c);
  CHECK(tc.epochs == 7);
  CHECK(tc.adam.learning_rate == 0.01);
  CHECK(tc.sigma_solver == SigmaSolver::FixedPoint);
  CHECK(tc.seed == 42);
  CHECK(tc.batch_size == 32);
  c.set("sigma_solver", "newton");
  CHECK_THROWS_AS(train_config_from(c), InvalidArgument);
}

TEST_CASE("architecture strings") {
  CHECK(parse_architecture("10;sigmoid", 1).param_count() == 31);
  CHECK(parse_architecture("2;15;sigmoid", 2).param_count() == 61);
  CHECK(parse_architecture(";identity", 3).param_count() == 4);
  CHECK_THROWS_AS(parse_architecture("2;15;sigmoid", 1), ShapeError);
  CHECK_THROWS_AS(parse_architecture("15", 1), InvalidArgument);
}

TEST_CASE("train run writes checkpoint, trace and metadata") {
  const fs::path dir = scratch("train");
  {
    std::ofstream f(dir / "d.csv");
    f << "x,y\n";
    for (int i = 0; i < 30; ++i) f << i * 0.1 << "," << 1.0 + 2.0 * i * 0.1 << "\n";
  }
  RunConfig c("train");
  c.set("data", (dir / "d.csv").string());
  c.set("arch", ";identity");
  c.set("beta", "0.3");
  c.set("epochs", "5");
  c.set("max_outer", "2");
  c.set("out", (dir / "out").string());
  const RunOutcome r = execute(c);
  CHECK(r.status == RunStatus::Ok);
  CHECK(fs::exists(dir / "out" / "model.ckpt"));
  CHECK(fs::exists(dir / "out" / "trace.csv"));
  CHECK(fs::exists(dir / "out" / "residuals.csv"));
  const std::string meta = slurp(dir / "out" / "metadata.json");
  CHECK(meta.find("\"generator\"") != std::string::npos);
  CHECK(meta.find("\"subcommand\": \"train\"") != std::string::npos);
  CHECK(meta.find("\"beta\"") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("run-time validation") {
  RunConfig c("train");
  c.set("data", "/nonexistent/file.csv");
  c.set("out", (fs::temp_directory_path() / "rrnet_cfg_missing").string());
  try {
    execute(c);
    FAIL("expected an IO error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/file.csv") != std::string::npos);
  }
  RunConfig b("benchmark");
  b.set("phi", "9");
  b.set("out", (fs::temp_directory_path() / "rrnet_cfg_badphi").string());
  CHECK_THROWS_AS(execute(b), InvalidArgument);
  RunConfig i("influence");
  i.set("i", "0");
  i.set("out", (fs::temp_directory_path() / "rrnet_cfg_badi").string());
  CHECK_THROWS_AS(execute(i), InvalidArgument);
}
