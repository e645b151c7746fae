#include "altproj/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "altproj/certify.hpp"

namespace altproj::io {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("expected a nonempty array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.at(0).size());
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<int>(row.size()) != cols) throw ParseError("ragged matrix rows");
    for (int c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::Map: return "map";
    case Method::Cyclic: return "cyclic";
    case Method::Cimmino: return "cimmino";
    case Method::Dr: return "dr";
  }
  return "map";
}

Method parse_method(const std::string& name) {
  if (name == "map") return Method::Map;
  if (name == "cyclic") return Method::Cyclic;
  if (name == "cimmino") return Method::Cimmino;
  if (name == "dr") return Method::Dr;
  throw ParseError("unknown method '" + name + "'");
}

nlohmann::json to_json(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Vector vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("expected an array of reals");
  Vector v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

ConvexSet parse_set(const nlohmann::json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "hyperplane") {
      return Hyperplane(vector_from_json(j.at("normal")), j.at("offset").get<double>());
    }
    if (type == "halfspace") {
      return Halfspace(vector_from_json(j.at("normal")), j.at("offset").get<double>());
    }
    if (type == "polyhedron") {
      return Polyhedron(matrix_from_json(j.at("A")), vector_from_json(j.at("b")));
    }
    if (type == "ball") {
      return Ball(vector_from_json(j.at("center")), j.at("radius").get<double>());
    }
    if (type == "affine") {
      Matrix dirs = matrix_from_json(j.at("directions"));
      // Rows of the JSON array are spanning directions; store as columns.
      return AffineSubspace(vector_from_json(j.at("base")), dirs.transpose());
    }
    if (type == "quad_epigraph") {
      const double sign = j.contains("t_sign") ? j.at("t_sign").get<double>() : 1.0;
      return QuadraticEpigraph(matrix_from_json(j.at("Q")), vector_from_json(j.at("q")),
                               j.at("c").get<double>(), sign);
    }
    if (type == "intersection") {
      std::vector<ConvexSet> members;
      for (const auto& mj : j.at("members")) members.push_back(parse_set(mj));
      return IntersectionSet(std::move(members), vector_from_json(j.at("slater")));
    }
    throw ParseError("unknown set type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed set descriptor: ") + e.what());
  }
}

nlohmann::json serialize_set(const ConvexSet& set) {
  nlohmann::json j;
  j["type"] = set.tag();
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Hyperplane> || std::is_same_v<T, Halfspace>) {
          j["normal"] = to_json(s.normal);
          j["offset"] = s.offset;
        } else if constexpr (std::is_same_v<T, Polyhedron>) {
          j["A"] = matrix_to_json(s.A);
          j["b"] = to_json(s.b);
        } else if constexpr (std::is_same_v<T, Ball>) {
          j["center"] = to_json(s.center);
          j["radius"] = s.radius;
        } else if constexpr (std::is_same_v<T, AffineSubspace>) {
          j["base"] = to_json(s.base);
          j["directions"] = matrix_to_json(s.directions.transpose());
        } else if constexpr (std::is_same_v<T, QuadraticEpigraph>) {
          j["Q"] = matrix_to_json(s.quad);
          j["q"] = to_json(s.lin);
          j["c"] = s.constant;
          if (s.t_sign < 0.0) j["t_sign"] = -1.0;
        } else if constexpr (std::is_same_v<T, IntersectionSet>) {
          nlohmann::json members = nlohmann::json::array();
          for (const auto& member : s.members) members.push_back(serialize_set(member));
          j["members"] = std::move(members);
          j["slater"] = to_json(s.slater);
        } else {
          throw ParseError(std::string("set variant '") + set.tag() +
                           "' has no schema representation");
        }
      },
      set.variant());
  return j;
}

ProblemSpec parse_problem(const nlohmann::json& j) {
  try {
    ProblemSpec spec;
    spec.dimension = j.at("dimension").get<int>();
    for (const auto& sj : j.at("sets")) spec.sets.push_back(parse_set(sj));
    if (spec.sets.size() < 2) throw ParseError("a problem needs at least two sets");
    spec.start = vector_from_json(j.at("start"));
    spec.method = parse_method(j.value("method", std::string("map")));
    if (j.contains("stop")) {
      const auto& s = j.at("stop");
      spec.stop.max_iter = s.value("max_iter", spec.stop.max_iter);
      spec.stop.fix_tol = s.value("fix_tol", spec.stop.fix_tol);
      spec.stop.divergence_norm = s.value("divergence_norm", spec.stop.divergence_norm);
      spec.stop.stall_window = s.value("stall_window", spec.stop.stall_window);
    }
    spec.metadata = j.value("metadata", nlohmann::json::object());

    if (spec.start.size() != spec.dimension) throw ParseError("start point dimension mismatch");
    for (const auto& s : spec.sets) {
      if (s.dimension() != spec.dimension) throw ParseError("set dimension mismatch");
    }
    if (spec.stop.max_iter < 1) throw ParseError("max_iter must be >= 1");
    if (!(spec.stop.fix_tol > 0.0)) throw ParseError("fix_tol must be positive");
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed problem: ") + e.what());
  }
}

nlohmann::json serialize_problem(const ProblemSpec& spec) {
  nlohmann::json j;
  j["dimension"] = spec.dimension;
  nlohmann::json sets = nlohmann::json::array();
  for (const auto& s : spec.sets) sets.push_back(serialize_set(s));
  j["sets"] = std::move(sets);
  j["start"] = to_json(spec.start);
  j["method"] = to_string(spec.method);
  j["stop"] = {{"max_iter", spec.stop.max_iter},
               {"fix_tol", spec.stop.fix_tol},
               {"divergence_norm", spec.stop.divergence_norm},
               {"stall_window", spec.stop.stall_window}};
  j["metadata"] = spec.metadata;
  return j;
}

ProblemSpec load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open problem file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return parse_problem(j);
}

void write_trace_csv(std::ostream& os, const IterationTrace& trace, int dim) {
  os << "k";
  for (int i = 0; i < dim; ++i) os << ",x_" << i;
  os << ",dist_X,dist_Y,step_norm";
  for (int i = 0; i < dim; ++i) os << ",d_" << i;
  os << "\n";
  for (const auto& rec : trace.records) {
    os << rec.k;
    for (int i = 0; i < dim; ++i) os << "," << fmt17(rec.iterate(i));
    os << "," << fmt17(rec.dist_to_x) << "," << fmt17(rec.dist_to_y) << ","
       << fmt17(rec.step_norm);
    for (int i = 0; i < dim; ++i) os << "," << fmt17(rec.displacement(i));
    os << "\n";
  }
}

IterationTrace read_trace_csv(std::istream& is, int* dim_out) {
  std::string header;
  if (!std::getline(is, header)) throw ParseError("empty trace file");
  int dim = 0;
  {
    std::stringstream ss(header);
    std::string col;
    while (std::getline(ss, col, ',')) {
      if (col.rfind("x_", 0) == 0) ++dim;
    }
  }
  if (dim_out != nullptr) *dim_out = dim;

  IterationTrace trace;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (static_cast<int>(vals.size()) != 2 * dim + 4) throw ParseError("trace row width mismatch");
    TraceRecord rec;
    rec.k = static_cast<int>(vals[0]);
    rec.iterate = Eigen::Map<const Vector>(vals.data() + 1, dim);
    rec.dist_to_x = vals[static_cast<std::size_t>(dim) + 1];
    rec.dist_to_y = vals[static_cast<std::size_t>(dim) + 2];
    rec.step_norm = vals[static_cast<std::size_t>(dim) + 3];
    rec.displacement = Eigen::Map<const Vector>(vals.data() + dim + 4, dim);
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

nlohmann::json run_summary(const RunResult& result) {
  nlohmann::json j;
  j["status"] = altproj::to_string(result.status);
  if (result.finite_k.has_value()) j["finite_k"] = *result.finite_k;
  j["final_iterate"] = to_json(result.final_iterate);
  j["iterations"] = result.trace.iterations();
  if (!result.trace.empty()) {
    j["distance"] = result.trace.back().displacement.norm();
  }
  return j;
}

nlohmann::json best_pair_json(const certify::BestPairEstimate& est) {
  nlohmann::json j;
  j["x_bar"] = to_json(est.x_bar);
  j["y_bar"] = to_json(est.y_bar);
  j["d"] = to_json(est.d);
  j["distance"] = est.gap();
  j["residual"] = est.residual;
  j["consistent"] = est.consistent;
  return j;
}

nlohmann::json report_json(const certify::ErrorBoundReport& report) {
  nlohmann::json j;
  j["omega"] = finite_or_null(report.omega);
  j["vacuous"] = !std::isfinite(report.omega);
  j["delta"] = report.delta;
  j["r"] = report.r;
  j["samples"] = report.samples;
  j["min_ratio_witness"] =
      report.min_ratio_witness.size() > 0 ? to_json(report.min_ratio_witness) : nlohmann::json();
  j["verdict"] = certify::to_string(report.verdict);
  return j;
}

nlohmann::json transversality_json(const certify::TransversalityReport& report) {
  nlohmann::json j;
  j["kappa"] = report.kappa;
  j["samples"] = report.samples;
  j["verdict"] = certify::to_string(report.verdict);
  return j;
}

}  // namespace altproj::io
