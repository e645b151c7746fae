// Command-line front end: runs projection methods on JSON problem files,
// produces error-bound certificates, reproduces the built-in example
// registry and sweeps the ball-vs-line contraction rates.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "altproj/apps.hpp"
#include "altproj/certify.hpp"
#include "altproj/io.hpp"
#include "altproj/oracle.hpp"
#include "altproj/solvers.hpp"

namespace {

using namespace altproj;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDiverged = 2;
constexpr int kExitMaxIter = 3;
constexpr int kExitFailsEvidence = 4;
constexpr int kExitInconclusive = 5;
constexpr int kExitConsistent = 6;
constexpr int kExitExpectationFailed = 7;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("ALTPROJ_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      return 0;
    }
  }
  return 0;
}

int status_exit(RunStatus status) {
  switch (status) {
    case RunStatus::FiniteTermination:
    case RunStatus::ConvergedToTol:
      return kExitOk;
    case RunStatus::Diverged:
      return kExitDiverged;
    case RunStatus::MaxIterReached:
      return kExitMaxIter;
  }
  return kExitUsage;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

// --- run ---------------------------------------------------------------

int cmd_run(const std::string& problem_path, const std::string& method_override, int max_iter,
            double tol, const std::string& trace_out, const std::string& summary_out) {
  io::ProblemSpec spec = io::load_problem_file(problem_path);
  if (!method_override.empty()) spec.method = io::parse_method(method_override);
  if (max_iter > 0) spec.stop.max_iter = max_iter;
  if (tol > 0.0) spec.stop.fix_tol = tol;

  RunResult result;
  nlohmann::json extra;
  switch (spec.method) {
    case io::Method::Map:
      result = map_run(spec.sets[0], spec.sets[1], spec.start, spec.stop);
      break;
    case io::Method::Cyclic: {
      CyclicResult cyc = cyclic_run(spec.sets, spec.start, spec.stop);
      result = std::move(cyc.run);
      if (cyc.cycle.has_value()) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : cyc.cycle->points) pts.push_back(io::to_json(p));
        extra["cycle"] = std::move(pts);
      }
      break;
    }
    case io::Method::Cimmino: {
      CimminoResult cim = cimmino_run(spec.sets, spec.start, spec.stop);
      result = std::move(cim.run);
      break;
    }
    case io::Method::Dr: {
      DrResult dr = dr_run(spec.sets[0], spec.sets[1], spec.start, spec.stop);
      extra["shadow_status"] = to_string(dr.shadow_status);
      extra["shadow_final"] = io::to_json(dr.shadow.back().iterate);
      result = std::move(dr.governing);
      break;
    }
  }

  if (!trace_out.empty()) {
    std::ofstream os(trace_out);
    if (!os) throw Error("cannot write trace to '" + trace_out + "'");
    io::write_trace_csv(os, result.trace, spec.dimension);
  }
  nlohmann::json summary = io::run_summary(result);
  for (auto& [key, val] : extra.items()) summary[key] = val;
  const std::string text = summary.dump(2);
  if (!summary_out.empty()) write_file(summary_out, text);
  std::cout << text << "\n";
  return status_exit(result.status);
}

// --- certify -----------------------------------------------------------

int cmd_certify(const std::string& problem_path, double delta, int samples, std::uint64_t seed,
                const std::string& report_out) {
  io::ProblemSpec spec = io::load_problem_file(problem_path);
  if (spec.sets.size() != 2) {
    std::cerr << "certify requires a two-set problem\n";
    return kExitUsage;
  }
  const ConvexSet& X = spec.sets[0];
  const ConvexSet& Y = spec.sets[1];

  RunResult run = map_run(X, Y, spec.start, spec.stop);
  if (run.status == RunStatus::Diverged) {
    std::cerr << "run diverged; no certificate\n";
    return kExitDiverged;
  }
  certify::BestPairEstimate est = certify::estimate_from_run(X, Y, run);

  nlohmann::json report;
  report["best_pair"] = io::best_pair_json(est);
  if (est.consistent) {
    report["verdict"] = "consistent";
    const std::string text = report.dump(2);
    if (!report_out.empty()) write_file(report_out, text);
    std::cout << text << "\n";
    return kExitConsistent;
  }

  const certify::SupportingHyperplane hyp = certify::optimal_supporting_hyperplane(est);
  report["supporting_hyperplane"] = {{"normal", io::to_json(hyp.plane.normal)},
                                     {"offset", hyp.plane.offset}};

  certify::ErrorBoundReport uni = certify::unilateral_bapeb_estimate(X, est, delta, samples, seed);
  report["unilateral"] = io::report_json(uni);

  certify::ErrorBoundReport bi = certify::bilateral_bapeb_check(X, Y, run.trace, est);
  report["bilateral"] = io::report_json(bi);

  try {
    certify::WitnessPairs witness;
    if (spec.metadata.value("example", std::string()) == "bapeb-vs-transversality") {
      witness = certify::parabola_witness_pairs({2, 5, 10, 50, 1000, 100000, 1000000});
    }
    certify::TransversalityReport tr =
        certify::intrinsic_transversality_sample(X, Y, est, delta, samples, seed, witness);
    report["transversality"] = io::transversality_json(tr);
  } catch (const UnsupportedVariant&) {
    report["transversality"] = nullptr;
  }

  if (uni.verdict == certify::Verdict::Holds && std::isfinite(uni.omega)) {
    const double r = certify::single_step_radius(uni, est);
    const bool verified = certify::single_step_verify(X, Y, est, r, 1000, seed);
    report["single_step"] = {{"r", r}, {"verified", verified}};
  } else {
    report["single_step"] = nullptr;
  }

  report["verdict"] = certify::to_string(uni.verdict);
  const std::string text = report.dump(2);
  if (!report_out.empty()) write_file(report_out, text);
  std::cout << text << "\n";

  switch (uni.verdict) {
    case certify::Verdict::Holds: return kExitOk;
    case certify::Verdict::FailsEvidence: return kExitFailsEvidence;
    case certify::Verdict::Inconclusive: return kExitInconclusive;
  }
  return kExitUsage;
}

// --- reproduce ---------------------------------------------------------

struct Manifest {
  nlohmann::json checks = nlohmann::json::array();
  bool all_pass = true;

  void add(const std::string& name, bool pass, const std::string& detail = "") {
    checks.push_back({{"name", name}, {"pass", pass}, {"detail", detail}});
    all_pass = all_pass && pass;
  }
};

void reproduce_reverse_lines(Manifest& m) {
  apps::ExampleProblem ex = apps::build_example(apps::ExampleId::ReverseLines);
  const ConvexSet& X = ex.named_sets.at("X");
  const std::vector<std::string> lines = {"Y_gamma_0", "Y", "Y_gamma_5"};

  std::vector<RunResult> runs;
  for (const auto& name : lines) {
    runs.push_back(map_run(X, ex.named_sets.at(name), ex.problem.start, ex.problem.stop));
  }
  bool closed_form = true;
  for (const auto& run : runs) {
    for (int k = 0; k <= 40; ++k) {
      Vector expect = Vector::Zero(3);
      expect(0) = 3.0 / std::pow(2.0, k);
      closed_form = closed_form && (run.trace.records[static_cast<std::size_t>(k)].iterate - expect).norm() <= 1e-12;
    }
  }
  m.add("closed_form_halving", closed_form);

  bool invariant = true;
  for (std::size_t k = 0; k < runs[0].trace.records.size(); ++k) {
    for (std::size_t j = 1; j < runs.size(); ++j) {
      invariant = invariant && (runs[j].trace.records[k].iterate - runs[0].trace.records[k].iterate)
                                       .lpNorm<Eigen::Infinity>() <= 1e-14;
    }
  }
  m.add("gamma_invariance", invariant);

  StopCriteria long_stop = ex.problem.stop;
  long_stop.max_iter = 500;
  RunResult long_run = map_run(X, ex.named_sets.at("Y"), ex.problem.start, long_stop);
  m.add("no_finite_termination",
        !detect_finite_termination(long_run.trace, long_stop).has_value());

  certify::BestPairEstimate est = certify::estimate_from_run(X, ex.named_sets.at("Y"), long_run);
  certify::ErrorBoundReport uni = certify::unilateral_bapeb_estimate(X, est, 1.0, 400, default_seed());
  m.add("unilateral_fails", uni.verdict == certify::Verdict::FailsEvidence,
        std::string("verdict=") + certify::to_string(uni.verdict));
}

void reproduce_ball_hyperplane(Manifest& m) {
  StopCriteria stop;
  stop.max_iter = 2000;
  auto rows = apps::holder_rate_experiment({0.1, 0.5, 1.0, 2.0}, stop);
  bool rates_ok = true;
  std::string detail;
  for (const auto& row : rows) {
    const double expect = 1.0 / (1.0 + row.eps);
    rates_ok = rates_ok && std::abs(row.rate - expect) <= 1e-3;
    detail += "rate(" + std::to_string(row.eps) + ")=" + std::to_string(row.rate) + " ";
  }
  m.add("linear_rates", rates_ok, detail);

  auto zero_rows = apps::holder_rate_experiment({0.0}, stop);
  Ball X(io::vector_from_json({0.0, 1.0}), 1.0);
  Hyperplane Y0(io::vector_from_json({0.0, 1.0}), 0.0);
  RunResult sub = map_run(Y0, X, io::vector_from_json({1.0, 0.0}), stop);
  bool tail_ok = true;
  const auto& recs = sub.trace.records;
  for (std::size_t i = recs.size() - 50; i + 1 < recs.size(); ++i) {
    tail_ok = tail_ok && std::abs(recs[i + 1].iterate(0)) / std::abs(recs[i].iterate(0)) > 0.999;
  }
  m.add("sublinear_tail", tail_ok, "rate(0)=" + std::to_string(zero_rows[0].rate));

  apps::ExampleProblem ex = apps::build_example(apps::ExampleId::BallHyperplane);
  StopCriteria est_stop;
  est_stop.max_iter = 500;
  certify::BestPairEstimate est = certify::estimate_best_pair(
      ex.named_sets.at("X"), ex.named_sets.at("Y"), ex.problem.start, est_stop);
  m.add("best_pair", (est.x_bar - io::vector_from_json({0.0, 0.0})).norm() <= 1e-8 &&
                         (est.y_bar - io::vector_from_json({0.0, -1.0})).norm() <= 1e-8);
}

void reproduce_bapeb_vs_transversality(Manifest& m, std::uint64_t seed) {
  apps::ExampleProblem ex = apps::build_example(apps::ExampleId::BapebVsTransversality);
  const ConvexSet& X = ex.named_sets.at("X");
  const ConvexSet& Y = ex.named_sets.at("Y");
  RunResult run = map_run(X, Y, ex.problem.start, ex.problem.stop);
  m.add("finite_termination", run.status == RunStatus::FiniteTermination);

  certify::BestPairEstimate est = certify::estimate_from_run(X, Y, run);
  m.add("best_pair", (est.x_bar - io::vector_from_json({0.0, 1.0})).norm() <= 1e-8 &&
                         (est.y_bar - io::vector_from_json({0.0, 0.0})).norm() <= 1e-8);

  certify::ErrorBoundReport bi = certify::bilateral_bapeb_check(X, Y, run.trace, est);
  m.add("bilateral_holds", bi.verdict == certify::Verdict::Holds);

  certify::WitnessPairs witness =
      certify::parabola_witness_pairs({2, 5, 10, 50, 1000, 100000, 1000000});
  certify::TransversalityReport tr =
      certify::intrinsic_transversality_sample(X, Y, est, 0.5, 200, seed, witness);
  m.add("transversality_fails", tr.verdict == certify::Verdict::FailsEvidence);

  bool decay_ok = true;
  for (int k : {10, 50}) {
    const auto pairs = certify::parabola_witness_pairs({k});
    const double e = certify::transversality_expression(X, Y, pairs[0].first, pairs[0].second);
    decay_ok = decay_ok && e <= 2.0 * 3.0 / k;
  }
  m.add("witness_decay", decay_ok);
}

void reproduce_product_transport(Manifest& m) {
  apps::ExampleProblem ex = apps::build_example(apps::ExampleId::ProductTransport);
  const ConvexSet& X = ex.named_sets.at("X");
  const ConvexSet& Y = ex.named_sets.at("Y");
  const ConvexSet& H = ex.named_sets.at("H");
  const Vector z0 = ex.problem.start;
  const StopCriteria stop = ex.problem.stop;
  const Vector mid = io::vector_from_json({0.0, 1.0});

  CimminoResult yx = cimmino_run({Y, X}, z0, stop);
  m.add("cimmino_yx_finite", yx.run.status == RunStatus::FiniteTermination &&
                                 (yx.run.final_iterate - mid).norm() <= 1e-10);

  CimminoResult hx = cimmino_run({H, X}, z0, stop);
  m.add("cimmino_hx_not_finite", hx.run.status == RunStatus::ConvergedToTol &&
                                     (hx.run.final_iterate - mid).norm() <= 1e-8);

  RunResult xh = map_run(X, H, z0, stop);
  m.add("map_xh_finite", xh.status == RunStatus::FiniteTermination &&
                             (xh.final_iterate - io::vector_from_json({0.0, 2.0})).norm() <= 1e-10);

  // Lifted pair: one alternating step on the diagonal equals one averaged
  // step, exactly, along the whole run.
  auto [product, diagonal] = pierra_lift({Y, X});
  RunResult lifted = map_run(ConvexSet(diagonal), ConvexSet(product), diagonal_embed(z0, 2), stop);
  bool pierra_ok = lifted.status == yx.run.status;
  const std::size_t upto = std::min(lifted.trace.records.size(), yx.run.trace.records.size());
  for (std::size_t k = 0; k < upto; ++k) {
    pierra_ok = pierra_ok && (lifted.trace.records[k].iterate.head(2) -
                              yx.run.trace.records[k].iterate).lpNorm<Eigen::Infinity>() <= 1e-14;
  }
  m.add("pierra_equivalence", pierra_ok);

  StopCriteria dr_stop = stop;
  dr_stop.divergence_norm = 1e3;
  DrResult dr = dr_run(X, Y, z0, dr_stop);
  m.add("dr_split", dr.governing.status == RunStatus::Diverged &&
                        (dr.shadow.back().iterate - io::vector_from_json({0.0, 2.0})).norm() <= 1e-8);
}

void reproduce_lp_demo(Manifest& m) {
  apps::ExampleProblem ex = apps::build_example(apps::ExampleId::LpDemo);
  Matrix A(1, 2);
  A << 1, 1;
  LinearProgram lp(io::vector_from_json({1.0, 1.0}), A, Vector::Ones(1), {true, true});
  apps::LpSolveResult sol = apps::lp_solve_via_map(lp, Vector::Ones(1), 0.5, ex.problem.start,
                                                   ex.problem.stop);
  const auto [xv, val] = oracle::lp_vertex_solve(lp);
  (void)xv;
  m.add("finite_termination", sol.run.status == RunStatus::FiniteTermination);
  m.add("objective_matches_oracle", std::abs(sol.value - val) <= 1e-8,
        "value=" + std::to_string(sol.value));
}

void reproduce_minmax_demo(Manifest& m) {
  apps::MinMaxProblem abs_problem;
  abs_problem.pieces.push_back(apps::AffinePiece{Vector::Ones(1), 0.0});
  abs_problem.pieces.push_back(apps::AffinePiece{-Vector::Ones(1), 0.0});
  abs_problem.beta = -1.0;
  StopCriteria stop;
  stop.max_iter = 200;
  apps::MinMaxResult affine = apps::minmax_solve(abs_problem, 0.7 * Vector::Ones(1), stop);
  m.add("affine_finite", affine.run.status == RunStatus::FiniteTermination &&
                             std::abs(affine.value) <= 1e-10 && affine.x.norm() <= 1e-10);

  apps::MinMaxProblem quad;
  Matrix q(1, 1);
  q << 2.0;
  quad.pieces.push_back(apps::QuadraticPiece{q, Vector::Zero(1), 0.0});
  quad.pieces.push_back(apps::QuadraticPiece{q, -2.0 * Vector::Ones(1), 1.0});
  quad.beta = -1.0;
  StopCriteria qstop;
  qstop.max_iter = 2000;
  apps::MinMaxResult quadratic = apps::minmax_solve(quad, 0.9 * Vector::Ones(1), qstop);
  m.add("quadratic_converges", std::abs(quadratic.x(0) - 0.5) <= 1e-8 &&
                                   std::abs(quadratic.value - 0.25) <= 1e-8);
}

void reproduce_parallel_lines(Manifest& m) {
  apps::ExampleProblem ex = apps::build_example(apps::ExampleId::ParallelLinesCycle);
  CyclicResult cyc = cyclic_run(ex.problem.sets, ex.problem.start, ex.problem.stop);
  bool ok = cyc.run.status == RunStatus::FiniteTermination && cyc.cycle.has_value();
  if (ok) {
    const auto& pts = cyc.cycle->points;
    ok = (pts[0] - io::vector_from_json({3.0, 0.0})).norm() <= 1e-12 &&
         (pts[1] - io::vector_from_json({3.0, 1.0})).norm() <= 1e-12 &&
         (pts[2] - io::vector_from_json({3.0, 2.0})).norm() <= 1e-12;
  }
  m.add("cycle_found_finitely", ok);
}

int cmd_reproduce(const std::string& example, const std::string& out_dir) {
  apps::ExampleId id;
  try {
    id = apps::parse_example_id(example);
  } catch (const UnknownExample& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  Manifest m;
  const std::uint64_t seed = default_seed();
  switch (id) {
    case apps::ExampleId::ReverseLines: reproduce_reverse_lines(m); break;
    case apps::ExampleId::BallHyperplane: reproduce_ball_hyperplane(m); break;
    case apps::ExampleId::BapebVsTransversality: reproduce_bapeb_vs_transversality(m, seed); break;
    case apps::ExampleId::ProductTransport: reproduce_product_transport(m); break;
    case apps::ExampleId::LpDemo: reproduce_lp_demo(m); break;
    case apps::ExampleId::MinmaxDemo: reproduce_minmax_demo(m); break;
    case apps::ExampleId::ParallelLinesCycle: reproduce_parallel_lines(m); break;
  }

  nlohmann::json manifest;
  manifest["example"] = example;
  manifest["checks"] = m.checks;
  manifest["all_pass"] = m.all_pass;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file((fs::path(out_dir) / ("manifest_" + example + ".json")).string(),
               manifest.dump(2));
  }
  for (const auto& c : m.checks) {
    std::cout << (c.at("pass").get<bool>() ? "[pass] " : "[FAIL] ") << example << "/"
              << c.at("name").get<std::string>() << "\n";
  }
  return m.all_pass ? kExitOk : kExitExpectationFailed;
}

// --- lp / minmax / holder-sweep ----------------------------------------

int cmd_lp(const std::string& problem_path) {
  std::ifstream in(problem_path);
  if (!in) throw ParseError("cannot open '" + problem_path + "'");
  nlohmann::json j;
  in >> j;

  Matrix A(static_cast<int>(j.at("A").size()), static_cast<int>(j.at("A").at(0).size()));
  for (int i = 0; i < A.rows(); ++i) {
    for (int c = 0; c < A.cols(); ++c) A(i, c) = j.at("A").at(i).at(c).get<double>();
  }
  std::vector<bool> nonneg(static_cast<std::size_t>(A.cols()), true);
  if (j.contains("nonneg")) {
    nonneg.clear();
    for (const auto& f : j.at("nonneg")) nonneg.push_back(f.get<bool>());
  }
  LinearProgram lp(io::vector_from_json(j.at("c")), A, io::vector_from_json(j.at("b")), nonneg);
  const Vector dual = io::vector_from_json(j.at("dual"));
  const double eps = j.value("eps", 1.0);
  const Vector x0 = j.contains("start") ? io::vector_from_json(j.at("start"))
                                        : Vector::Zero(lp.num_vars());
  StopCriteria stop;
  stop.max_iter = j.value("max_iter", 1000);

  apps::LpSolveResult sol = apps::lp_solve_via_map(lp, dual, eps, x0, stop);
  if (sol.run.status != RunStatus::FiniteTermination) {
    std::cerr << "warning: run ended with status " << to_string(sol.run.status)
              << " (finite termination expected)\n";
  }
  nlohmann::json out;
  out["x"] = io::to_json(sol.x);
  out["value"] = sol.value;
  out["status"] = to_string(sol.run.status);
  out["iterations"] = sol.run.trace.iterations();
  std::cout << out.dump(2) << "\n";
  return status_exit(sol.run.status);
}

int cmd_minmax(const std::string& problem_path) {
  std::ifstream in(problem_path);
  if (!in) throw ParseError("cannot open '" + problem_path + "'");
  nlohmann::json j;
  in >> j;

  apps::MinMaxProblem p;
  for (const auto& pj : j.at("pieces")) {
    const std::string type = pj.at("type").get<std::string>();
    if (type == "affine") {
      p.pieces.push_back(apps::AffinePiece{io::vector_from_json(pj.at("a")), pj.at("b").get<double>()});
    } else if (type == "quadratic") {
      Matrix Q(static_cast<int>(pj.at("Q").size()), static_cast<int>(pj.at("Q").at(0).size()));
      for (int r = 0; r < Q.rows(); ++r) {
        for (int c = 0; c < Q.cols(); ++c) Q(r, c) = pj.at("Q").at(r).at(c).get<double>();
      }
      p.pieces.push_back(
          apps::QuadraticPiece{Q, io::vector_from_json(pj.at("q")), pj.at("c").get<double>()});
    } else {
      throw ParseError("unknown piece type '" + type + "'");
    }
  }
  p.beta = j.at("beta").get<double>();
  const Vector x0 = io::vector_from_json(j.at("start"));
  StopCriteria stop;
  stop.max_iter = j.value("max_iter", 2000);

  apps::MinMaxResult sol = apps::minmax_solve(p, x0, stop);
  nlohmann::json out;
  out["x"] = io::to_json(sol.x);
  out["value"] = sol.value;
  out["status"] = to_string(sol.run.status);
  out["iterations"] = sol.run.trace.iterations();
  std::cout << out.dump(2) << "\n";
  return status_exit(sol.run.status);
}

int cmd_holder_sweep(const std::vector<double>& eps_values, int max_iter, const std::string& out) {
  StopCriteria stop;
  stop.max_iter = max_iter;
  auto rows = apps::holder_rate_experiment(eps_values, stop);
  std::ostringstream csv;
  csv << "eps,rate,iters,status\n";
  for (const auto& row : rows) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d,%s\n", row.eps, row.rate, row.iters,
                  to_string(row.status));
    csv << buf;
  }
  if (!out.empty()) {
    write_file(out, csv.str());
  }
  std::cout << csv.str();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Alternating-projection solvers and error-bound certificates"};
  app.require_subcommand(1);

  std::string problem_path, method, trace_out, summary_out, report_out, example, out_dir, out_csv;
  int max_iter = 0;
  double tol = 0.0;
  double delta = 1.0;
  int samples = 400;
  std::uint64_t seed = default_seed();
  bool seed_given = false;
  std::vector<double> eps_values{0.0, 0.1, 0.5, 1.0, 2.0};
  int sweep_iters = 2000;

  CLI::App* run = app.add_subcommand("run", "run a projection method on a problem file");
  run->add_option("--problem", problem_path, "problem JSON path")->required();
  run->add_option("--method", method, "override the problem's method (map|cyclic|cimmino|dr)");
  run->add_option("--max-iter", max_iter, "override max iterations");
  run->add_option("--tol", tol, "override the relative fixed-point tolerance");
  run->add_option("--trace-out", trace_out, "write the iteration trace CSV here");
  run->add_option("--summary-out", summary_out, "also write the JSON summary here");

  CLI::App* certify_cmd = app.add_subcommand("certify", "error-bound certificates for a two-set problem");
  certify_cmd->add_option("--problem", problem_path, "problem JSON path")->required();
  certify_cmd->add_option("--delta", delta, "sampling radius around the best point");
  certify_cmd->add_option("--samples", samples, "samples per refinement level");
  certify_cmd->add_option("--seed", seed, "sampling seed (default: ALTPROJ_SEED or 0)")
      ->each([&](const std::string&) { seed_given = true; });
  certify_cmd->add_option("--report-out", report_out, "write the JSON report here");

  CLI::App* reproduce = app.add_subcommand("reproduce", "re-run a registry example against its expected outcomes");
  reproduce->add_option("--example", example, "example id")->required();
  reproduce->add_option("--out-dir", out_dir, "directory for the pass/fail manifest");

  CLI::App* lp = app.add_subcommand("lp", "solve a linear program by alternating projections");
  lp->add_option("--problem", problem_path, "LP JSON path")->required();

  CLI::App* minmax = app.add_subcommand("minmax", "solve a min-max problem through its epigraph");
  minmax->add_option("--problem", problem_path, "min-max JSON path")->required();

  CLI::App* sweep = app.add_subcommand("holder-sweep", "contraction rates of the ball-vs-line family");
  sweep->add_option("--eps", eps_values, "gap values");
  sweep->add_option("--max-iter", sweep_iters, "iterations per gap value");
  sweep->add_option("--out", out_csv, "write the CSV table here");

  CLI11_PARSE(app, argc, argv);
  (void)seed_given;

  try {
    if (run->parsed()) return cmd_run(problem_path, method, max_iter, tol, trace_out, summary_out);
    if (certify_cmd->parsed()) return cmd_certify(problem_path, delta, samples, seed, report_out);
    if (reproduce->parsed()) return cmd_reproduce(example, out_dir);
    if (lp->parsed()) return cmd_lp(problem_path);
    if (minmax->parsed()) return cmd_minmax(problem_path);
    if (sweep->parsed()) return cmd_holder_sweep(eps_values, sweep_iters, out_csv);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
