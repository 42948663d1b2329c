#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string output;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(RRNET_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 512> buf{};
  while (fgets(buf.data(), static_cast<int>(buf.size()), pipe)) r.output += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rrnet_cli_" + name);
  fs::remove_all(p);
  return p;
}

fs::path write_linear_csv(const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path f = dir / "data.csv";
  std::ofstream o(f);
  o << "x,y\n";
  for (int i = 0; i < 40; ++i) o << i * 0.05 << "," << 0.5 + 1.5 * i * 0.05 + ((i % 7 == 0) ? 30.0 : 0.0) << "\n";
  return f;
}

}  // namespace

TEST_CASE("train: valid run writes a checkpoint") {
  const fs::path dir = scratch("train");
  const fs::path data = write_linear_csv(dir);
  const Result r = run("train --data " + data.string() + " --beta 0.5 --arch '4;tanh' --epochs 5 --max_outer 2 --out " +
                       (dir / "out").string());
  CHECK_MESSAGE(r.code == 0, r.output);
  CHECK(fs::exists(dir / "out" / "model.ckpt"));
  CHECK(slurp(dir / "out" / "trace.csv").rfind("outer,loss,sigma,descent_ok\n", 0) == 0);
  CHECK(fs::exists(dir / "out" / "metadata.json"));
  fs::remove_all(dir);
}

TEST_CASE("train: errors exit 1 with a message") {
  const fs::path dir = scratch("train_err");
  const fs::path data = write_linear_csv(dir);
  Result r = run("train --data /nonexistent/path/d.csv --out " + (dir / "o").string());
  CHECK(r.code == 1);
  CHECK(r.output.find("/nonexistent/path/d.csv") != std::string::npos);

  r = run("train --data " + data.string() + " --beta 1.5 --out " + (dir / "o").string());
  CHECK(r.code == 1);
  CHECK(r.output.find("beta must lie in [0, 1]") != std::string::npos);

  r = run("train --data " + data.string() + " --bogus 3");
  CHECK(r.code == 1);
  fs::remove_all(dir);
}

TEST_CASE("config file and flag override") {
  const fs::path dir = scratch("cfg");
  const fs::path data = write_linear_csv(dir);
  {
    std::ofstream c(dir / "run.cfg");
    c << "# settings\ndata = " << data.string() << "\nbeta = 1.5\nepochs = 3\nmax_outer = 1\narch = ;identity\nout = "
      << (dir / "out").string() << "\n";
  }
  Result r = run("train --config " + (dir / "run.cfg").string());
  CHECK(r.code == 1);
  r = run("train --config " + (dir / "run.cfg").string() + " --beta 0.2");
  CHECK_MESSAGE(r.code == 0, r.output);
  CHECK(slurp(dir / "out" / "metadata.json").find("\"beta\": \"0.2\"") != std::string::npos);
  {
    std::ofstream c(dir / "bad.cfg");
    c << "data = x\nwidth = 3\n";
  }
  r = run("train --config " + (dir / "bad.cfg").string());
  CHECK(r.code == 1);
  CHECK(r.output.find("width") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("benchmark smoke run") {
  const fs::path dir = scratch("bench");
  const Result r = run("benchmark --phi 5 --delta 0.3 --reps 5 --epochs 10 --max_outer 2 --out " + dir.string());
  CHECK_MESSAGE(r.code == 0, r.output);
  const std::string lng = slurp(dir / "replications.csv");
  std::map<std::string, int> rows;
  std::istringstream in(lng);
  std::string line;
  std::getline(in, line);
  CHECK(line == "method,beta,delta,rep,train_tmse,test_mse");
  while (std::getline(in, line)) {
    const auto c1 = line.find(',');
    rows[line.substr(0, line.find(',', c1 + 1))]++;
  }
  CHECK(rows.size() == 4);  // lse plus rrnet at three betas
  for (const auto& [k, v] : rows) CHECK(v == 5);
  CHECK(slurp(dir / "results.csv").rfind("method,beta,delta,metric,mean,stderr,R\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("benchmark method grid and validation") {
  const fs::path dir = scratch("bench_grid");
  Result r = run("benchmark --phi 1 --reps 1 --methods lse,dpd --betas 0.1,0.3 --epochs 2 --max_outer 1 --out " +
                 dir.string());
  CHECK_MESSAGE(r.code == 0, r.output);
  const std::string res = slurp(dir / "results.csv");
  CHECK(std::count(res.begin(), res.end(), '\n') == 1 + 3 * 2);
  r = run("benchmark --phi 9 --out " + dir.string());
  CHECK(r.code == 1);
  fs::remove_all(dir);
}

TEST_CASE("influence curves") {
  const fs::path dir = scratch("if");
  Result r = run("influence --preset ex31 --beta 0,0.5 --i 2 --out " + dir.string());
  CHECK_MESSAGE(r.code == 0, r.output);
  for (const char* b : {"0", "0.5"})
    for (const char* k : {"theta", "sigma", "predictor"})
      CHECK(fs::exists(dir / (std::string("if_beta") + b + "_" + k + ".csv")));
  CHECK(slurp(dir / "if_beta0.5_theta.csv").rfind("t,component_index,value\n", 0) == 0);
  r = run("influence --preset ex32 --beta 0.5 --i 49 --out " + dir.string());
  CHECK_MESSAGE(r.code == 0, r.output);
  CHECK(slurp(dir / "if_beta0.5_relu_limit.csv").rfind("m,sup_gap,", 0) == 0);
  r = run("influence --preset ex31 --i 0 --out " + dir.string());
  CHECK(r.code == 1);
  fs::remove_all(dir);
}

TEST_CASE("breakdown and cv on a CSV file") {
  const fs::path dir = scratch("bd");
  const fs::path data = write_linear_csv(dir);
  Result r = run("breakdown --data " + data.string() +
                 " --arch ';identity' --deltas 0.2 --magnitudes 100 --betas 0,0.5 --epochs 5 --max_outer 2 --out " +
                 (dir / "b").string());
  CHECK_MESSAGE(r.code == 0, r.output);
  CHECK(slurp(dir / "b" / "breakdown.csv").rfind("delta,magnitude,beta,max_abs_fit,sigma_hat\n", 0) == 0);
  r = run("cv --data " + data.string() + " --k 4 --methods lse,dpd --betas 0.3 --arch ';identity' --epochs 5 " +
          "--max_outer 2 --out " + (dir / "c").string());
  CHECK_MESSAGE(r.code == 0, r.output);
  const std::string cv = slurp(dir / "c" / "cv.csv");
  CHECK(cv.rfind("method,beta,k,trim,cv_tmse,folds_completed\n", 0) == 0);
  CHECK(std::count(cv.begin(), cv.end(), '\n') == 3);
  r = run("cv --data " + data.string() + " --k 1 --out " + (dir / "c").string());
  CHECK(r.code == 1);
  fs::remove_all(dir);
}

TEST_CASE("repeated runs are byte-identical") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const std::string args = "benchmark --phi 5 --delta 0.3 --reps 3 --epochs 10 --max_outer 2 --seed 4 --out ";
  REQUIRE(run(args + a.string()).code == 0);
  REQUIRE(run(args + b.string() + " --jobs 1").code == 0);
  CHECK(slurp(a / "results.csv") == slurp(b / "results.csv"));
  CHECK(slurp(a / "replications.csv") == slurp(b / "replications.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("no subcommand is an error") {
  CHECK(run("").code != 0);
  CHECK(run("--help").code == 0);
}
