#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "altproj/geometry.hpp"
#include "altproj/solvers.hpp"

namespace altproj::certify {
struct BestPairEstimate;
struct ErrorBoundReport;
struct TransversalityReport;
}  // namespace altproj::certify

namespace altproj::io {

enum class Method { Map, Cyclic, Cimmino, Dr };

const char* to_string(Method m);
Method parse_method(const std::string& name);

/// A feasibility instance: >= 2 sets, a start point, a method and stopping
/// criteria, all parsed from the JSON problem schema.
struct ProblemSpec {
  int dimension = 0;
  std::vector<ConvexSet> sets;
  Vector start;
  Method method = Method::Map;
  StopCriteria stop;
  nlohmann::json metadata;
};

/// Set descriptors:
///   {"type":"hyperplane","normal":[...],"offset":b}
///   {"type":"halfspace","normal":[...],"offset":b}
///   {"type":"polyhedron","A":[[...]],"b":[...]}
///   {"type":"ball","center":[...],"radius":r}
///   {"type":"affine","base":[...],"directions":[[...]]}
///   {"type":"quad_epigraph","Q":[[...]],"q":[...],"c":c}      (+ optional "t_sign": -1)
///   {"type":"intersection","members":[...],"slater":[...]}
ConvexSet parse_set(const nlohmann::json& j);
nlohmann::json serialize_set(const ConvexSet& set);

ProblemSpec parse_problem(const nlohmann::json& j);
nlohmann::json serialize_problem(const ProblemSpec& spec);
ProblemSpec load_problem_file(const std::string& path);

nlohmann::json to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j);

/// CSV trace: header k,x_0..x_{n-1},dist_X,dist_Y,step_norm,d_0..d_{n-1};
/// one row per iteration, reals printed with 17 significant digits.
void write_trace_csv(std::ostream& os, const IterationTrace& trace, int dim);
IterationTrace read_trace_csv(std::istream& is, int* dim_out = nullptr);

nlohmann::json run_summary(const RunResult& result);

nlohmann::json best_pair_json(const certify::BestPairEstimate& est);
nlohmann::json report_json(const certify::ErrorBoundReport& report);
nlohmann::json transversality_json(const certify::TransversalityReport& report);

}  // namespace altproj::io
