// Exercises the command-line binary end to end through a shell: exit codes,
// written artifacts and the problem-file error paths.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "altproj/apps.hpp"
#include "altproj/io.hpp"

using namespace altproj;
namespace fs = std::filesystem;

namespace {

const char* kCli = ALTPROJ_CLI_PATH;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("altproj_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(kCli) + " " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WEXITSTATUS(raw);
}

std::string write_problem(const TempDir& dir, const std::string& name, apps::ExampleId id) {
  const fs::path file = dir.path / name;
  std::ofstream out(file);
  out << io::serialize_problem(apps::build_example(id).problem).dump(2);
  return file.string();
}

}  // namespace

TEST_CASE("run: halving instance hits the iteration cap with exit 3") {
  TempDir dir;
  const std::string problem = write_problem(dir, "revlines.json", apps::ExampleId::ReverseLines);
  const std::string trace = (dir.path / "trace.csv").string();
  const std::string summary = (dir.path / "summary.json").string();
  CHECK(run_cli("run --problem " + problem + " --max-iter 100 --trace-out " + trace +
                " --summary-out " + summary) == 3);

  std::ifstream in(summary);
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  CHECK(j.at("status").get<std::string>() == "max_iter_reached");
  const double x0 = j.at("final_iterate").at(0).get<double>();
  CHECK(std::abs(x0 - 3.0 / std::pow(2.0, 100)) <= 1e-12);

  std::ifstream tr(trace);
  std::string header;
  std::getline(tr, header);
  CHECK(header == "k,x_0,x_1,x_2,dist_X,dist_Y,step_norm,d_0,d_1,d_2");
}

TEST_CASE("run: simultaneous transport run terminates finitely with exit 0") {
  TempDir dir;
  const std::string problem = write_problem(dir, "transport.json", apps::ExampleId::ProductTransport);
  const std::string summary = (dir.path / "summary.json").string();
  CHECK(run_cli("run --problem " + problem + " --summary-out " + summary) == 0);
  std::ifstream in(summary);
  nlohmann::json j;
  in >> j;
  CHECK(j.at("status").get<std::string>() == "finite_termination");
  CHECK(std::abs(j.at("final_iterate").at(0).get<double>()) <= 1e-10);
  CHECK(std::abs(j.at("final_iterate").at(1).get<double>() - 1.0) <= 1e-10);
}

TEST_CASE("run: malformed input exits 1") {
  TempDir dir;
  const fs::path bad = dir.path / "bad.json";
  std::ofstream(bad) << "{ not json";
  CHECK(run_cli("run --problem " + bad.string()) == 1);
  CHECK(run_cli("run --problem " + (dir.path / "missing.json").string()) == 1);
}

TEST_CASE("certify: verdict-driven exit codes") {
  TempDir dir;
  const std::string revlines = write_problem(dir, "revlines.json", apps::ExampleId::ReverseLines);
  CHECK(run_cli("certify --problem " + revlines + " --delta 1 --samples 200 --seed 0") == 4);

  // Transport polyhedron against the axis: the bound holds, exit 0.
  io::ProblemSpec xh;
  xh.dimension = 2;
  xh.sets = apps::build_example(apps::ExampleId::ProductTransport).problem.sets;
  std::swap(xh.sets[0], xh.sets[1]);  // (X, Y) order not needed; use X vs H
  xh.sets[1] = Hyperplane((Vector(2) << 0, 1).finished(), 0.0);
  xh.start = (Vector(2) << 5, 7).finished();
  xh.stop.max_iter = 500;
  const fs::path xh_file = dir.path / "xh.json";
  std::ofstream(xh_file) << io::serialize_problem(xh).dump(2);
  const std::string report = (dir.path / "report.json").string();
  CHECK(run_cli("certify --problem " + xh_file.string() +
                " --delta 1 --samples 300 --seed 0 --report-out " + report) == 0);
  std::ifstream in(report);
  nlohmann::json j;
  in >> j;
  CHECK(j.at("unilateral").at("verdict").get<std::string>() == "holds");
  CHECK(std::abs(j.at("unilateral").at("omega").get<double>() - 0.7071) <= 0.01);
  CHECK(j.at("single_step").at("verified").get<bool>());

  // Overlapping balls: consistent instance, exit 6.
  io::ProblemSpec balls;
  balls.dimension = 2;
  balls.sets.push_back(Ball((Vector(2) << 0, 0).finished(), 1.0));
  balls.sets.push_back(Ball((Vector(2) << 0.5, 0).finished(), 1.0));
  balls.start = (Vector(2) << 2, 2).finished();
  balls.stop.max_iter = 500;
  const fs::path balls_file = dir.path / "balls.json";
  std::ofstream(balls_file) << io::serialize_problem(balls).dump(2);
  CHECK(run_cli("certify --problem " + balls_file.string() + " --samples 100") == 6);
}

TEST_CASE("reproduce: pass/fail manifests and unknown ids") {
  TempDir dir;
  CHECK(run_cli("reproduce --example parallel-lines-cycle --out-dir " + dir.path.string()) == 0);
  std::ifstream in(dir.path / "manifest_parallel-lines-cycle.json");
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  CHECK(j.at("all_pass").get<bool>());
  CHECK(run_cli("reproduce --example no-such-example") == 1);
}

TEST_CASE("lp and minmax subcommands") {
  TempDir dir;
  const fs::path lp = dir.path / "lp.json";
  std::ofstream(lp) << R"({
    "c": [1, 1], "A": [[1, 1]], "b": [1], "nonneg": [true, true],
    "dual": [1], "eps": 0.5, "start": [2, 0.5], "max_iter": 300
  })";
  CHECK(run_cli("lp --problem " + lp.string()) == 0);

  const fs::path mm = dir.path / "mm.json";
  std::ofstream(mm) << R"({
    "pieces": [
      {"type": "affine", "a": [1], "b": 0},
      {"type": "affine", "a": [-1], "b": 0}
    ],
    "beta": -1, "start": [0.7], "max_iter": 300
  })";
  CHECK(run_cli("minmax --problem " + mm.string()) == 0);
}

TEST_CASE("holder-sweep writes the rate table") {
  TempDir dir;
  const std::string out = (dir.path / "rates.csv").string();
  CHECK(run_cli("holder-sweep --eps 0.5 1 --max-iter 500 --out " + out) == 0);
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "eps,rate,iters,status");
  std::string row;
  std::getline(in, row);
  std::stringstream ss(row);
  std::string eps, rate;
  std::getline(ss, eps, ',');
  std::getline(ss, rate, ',');
  CHECK(std::abs(std::stod(rate) - 2.0 / 3.0) <= 1e-3);
}

TEST_CASE("exit codes are deterministic across repeated invocations") {
  TempDir dir;
  const std::string problem = write_problem(dir, "pp.json", apps::ExampleId::BapebVsTransversality);
  const int first = run_cli("certify --problem " + problem + " --delta 0.5 --samples 150 --seed 3");
  const int second = run_cli("certify --problem " + problem + " --delta 0.5 --samples 150 --seed 3");
  CHECK(first == second);
}
