#pragma once

// JSON schemas for norms, matrices and analysis results, plus trajectory CSV.
//
// Norm documents:
//   {"kind": "lp", "p": 1 | 2 | "inf" | <number >= 1>}
//   {"kind": "scaled", "T": [[...]], "inner": <norm>}
//   {"kind": "polyhedral", "vertices": [[...], ...]}
//   {"kind": "piecewise_orthant", "cases": [{"signs": "+-", "inner": <norm>}, ...]}
//
// Every emitter has a matching parser so that emit -> parse -> emit is a fixed point.

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "logmeasure/diffusion_sim.hpp"
#include "logmeasure/norm_classifier.hpp"
#include "logmeasure/stability_lab.hpp"

namespace logmeasure::io {

using json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ParseError, where + ": " + what);
}

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing \"") + key + "\"");
  return *it;
}

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

inline bool boolean(const json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected true or false");
  return j.get<bool>();
}

inline std::string string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

template <class E>
E enum_from(const json& j, const std::string& where, std::initializer_list<E> values) {
  const std::string s = string(j, where);
  for (E e : values)
    if (to_string(e) == s) return e;
  fail(where, "unknown value \"" + s + "\"");
}

}  // namespace detail

// --------------------------------------------------------------------------
// Vectors and matrices
// --------------------------------------------------------------------------

inline json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

inline Vector vector_from_json(const json& j, const std::string& where = "vector") {
  if (!j.is_array() || j.empty()) detail::fail(where, "expected a non-empty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = detail::number(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

inline Matrix matrix_from_json(const json& j, const std::string& where = "matrix") {
  if (!j.is_array() || j.empty()) detail::fail(where, "expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) detail::fail(where, "rows must be non-empty arrays");
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string row = where + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != cols) detail::fail(row, "ragged matrix");
    for (std::size_t k = 0; k < cols; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          detail::number(j[i][k], row + "[" + std::to_string(k) + "]");
  }
  return m;
}

// --------------------------------------------------------------------------
// Norm specs
// --------------------------------------------------------------------------

inline json to_json(const NormSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        json out;
        if constexpr (std::is_same_v<T, LpSpec>) {
          out["kind"] = "lp";
          if (std::isinf(s.p)) out["p"] = "inf";
          else out["p"] = s.p;
        } else if constexpr (std::is_same_v<T, ScaledSpec>) {
          out["kind"] = "scaled";
          out["T"] = to_json(s.T);
          out["inner"] = to_json(*s.inner);
        } else if constexpr (std::is_same_v<T, PolyhedralSpec>) {
          out["kind"] = "polyhedral";
          out["vertices"] = json::array();
          for (const auto& v : s.vertices) out["vertices"].push_back(to_json(v));
        } else {
          out["kind"] = "piecewise_orthant";
          out["cases"] = json::array();
          for (const auto& c : s.cases) out["cases"].push_back(json{{"signs", c.signs}, {"inner", to_json(*c.inner)}});
        }
        return out;
      },
      spec.kind);
}

inline NormSpec norm_spec_from_json(const json& j, const std::string& where = "norm") {
  const std::string kind = detail::string(detail::field(j, "kind", where), where + ".kind");
  if (kind == "lp") {
    const json& p = detail::field(j, "p", where);
    if (p.is_string()) {
      if (p.get<std::string>() != "inf") detail::fail(where + ".p", "the only string exponent is \"inf\"");
      return lp_spec(kInf);
    }
    return lp_spec(detail::number(p, where + ".p"));
  }
  if (kind == "scaled")
    return scaled_spec(matrix_from_json(detail::field(j, "T", where), where + ".T"),
                       norm_spec_from_json(detail::field(j, "inner", where), where + ".inner"));
  if (kind == "polyhedral") {
    const json& vs = detail::field(j, "vertices", where);
    if (!vs.is_array() || vs.empty()) detail::fail(where + ".vertices", "expected a non-empty array");
    std::vector<Vector> verts;
    for (std::size_t i = 0; i < vs.size(); ++i)
      verts.push_back(vector_from_json(vs[i], where + ".vertices[" + std::to_string(i) + "]"));
    return polyhedral_spec(std::move(verts));
  }
  if (kind == "piecewise_orthant") {
    const json& cs = detail::field(j, "cases", where);
    if (!cs.is_array() || cs.empty()) detail::fail(where + ".cases", "expected a non-empty array");
    std::vector<std::pair<std::string, NormSpec>> cases;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string at = where + ".cases[" + std::to_string(i) + "]";
      cases.emplace_back(detail::string(detail::field(cs[i], "signs", at), at + ".signs"),
                         norm_spec_from_json(detail::field(cs[i], "inner", at), at + ".inner"));
    }
    return piecewise_orthant_spec(cases);
  }
  detail::fail(where + ".kind", "unknown norm kind \"" + kind + "\"");
}

// --------------------------------------------------------------------------
// Results
// --------------------------------------------------------------------------

inline json to_json(const MeasureResult& r) {
  json out{{"value", r.value}, {"method", std::string(to_string(r.method))}, {"error_bound", r.error_bound}};
  if (r.h_used) out["h_used"] = *r.h_used;
  return out;
}

inline MeasureResult measure_result_from_json(const json& j, const std::string& where = "result") {
  MeasureResult r;
  r.value = detail::number(detail::field(j, "value", where), where + ".value");
  r.method = detail::enum_from(detail::field(j, "method", where), where + ".method",
                               {Method::ClosedForm, Method::ExactPolyhedral, Method::ScaledClosedForm, Method::Estimated});
  r.error_bound = detail::number(detail::field(j, "error_bound", where), where + ".error_bound");
  if (j.contains("h_used")) r.h_used = detail::number(j["h_used"], where + ".h_used");
  return r;
}

inline json to_json(const Verdict& v) {
  json out{{"holds", v.holds}, {"exact", v.exact}};
  out["witness_vector"] = v.witness_vector ? to_json(*v.witness_vector) : json(nullptr);
  out["witness_matrix"] = v.witness_matrix ? to_json(*v.witness_matrix) : json(nullptr);
  out["checks_run"] = v.checks_run;
  out["note"] = v.note;
  return out;
}

inline Verdict verdict_from_json(const json& j, const std::string& where = "verdict") {
  Verdict v;
  v.holds = detail::boolean(detail::field(j, "holds", where), where + ".holds");
  v.exact = detail::boolean(detail::field(j, "exact", where), where + ".exact");
  if (j.contains("witness_vector") && !j["witness_vector"].is_null())
    v.witness_vector = vector_from_json(j["witness_vector"], where + ".witness_vector");
  if (j.contains("witness_matrix") && !j["witness_matrix"].is_null())
    v.witness_matrix = matrix_from_json(j["witness_matrix"], where + ".witness_matrix");
  const json& c = detail::field(j, "checks_run", where);
  if (!c.is_number_unsigned() && !(c.is_number_integer() && c.get<long long>() >= 0))
    detail::fail(where + ".checks_run", "expected a nonnegative integer");
  v.checks_run = c.get<std::size_t>();
  v.note = detail::string(detail::field(j, "note", where), where + ".note");
  return v;
}

inline json to_json(const ConditionResult& c) {
  json out{{"condition", c.index}, {"statement", c.statement}, {"holds", c.holds}, {"exact", c.exact},
           {"checks", c.checks}};
  out["witness"] = c.witness ? to_json(*c.witness) : json(nullptr);
  out["witness_value"] = c.witness_value;
  out["note"] = c.note;
  return out;
}

inline ConditionResult condition_from_json(const json& j, const std::string& where = "condition") {
  ConditionResult c;
  const json& idx = detail::field(j, "condition", where);
  if (!idx.is_number_integer()) detail::fail(where + ".condition", "expected an integer");
  c.index = idx.get<int>();
  c.statement = detail::string(detail::field(j, "statement", where), where + ".statement");
  c.holds = detail::boolean(detail::field(j, "holds", where), where + ".holds");
  c.exact = detail::boolean(detail::field(j, "exact", where), where + ".exact");
  const json& checks = detail::field(j, "checks", where);
  if (!checks.is_number_integer()) detail::fail(where + ".checks", "expected an integer");
  c.checks = checks.get<decltype(c.checks)>();
  if (j.contains("witness") && !j["witness"].is_null()) c.witness = matrix_from_json(j["witness"], where + ".witness");
  c.witness_value = detail::number(detail::field(j, "witness_value", where), where + ".witness_value");
  c.note = detail::string(detail::field(j, "note", where), where + ".note");
  return c;
}

inline json to_json(const AdmissibilityVerdict& a) {
  json out{{"admissible", a.admissible}, {"exact", a.exact}};
  out["counterexample_D"] = a.counterexample_D ? to_json(*a.counterexample_D) : json(nullptr);
  out["counterexample_value"] = a.counterexample_value;
  out["equivalence_trace"] = json::array();
  for (const auto& c : a.equivalence_trace) out["equivalence_trace"].push_back(to_json(c));
  return out;
}

inline AdmissibilityVerdict admissibility_from_json(const json& j, const std::string& where = "admissibility") {
  AdmissibilityVerdict a;
  a.admissible = detail::boolean(detail::field(j, "admissible", where), where + ".admissible");
  a.exact = detail::boolean(detail::field(j, "exact", where), where + ".exact");
  if (j.contains("counterexample_D") && !j["counterexample_D"].is_null())
    a.counterexample_D = matrix_from_json(j["counterexample_D"], where + ".counterexample_D");
  a.counterexample_value =
      detail::number(detail::field(j, "counterexample_value", where), where + ".counterexample_value");
  const json& trace = detail::field(j, "equivalence_trace", where);
  if (!trace.is_array()) detail::fail(where + ".equivalence_trace", "expected an array");
  for (std::size_t i = 0; i < trace.size(); ++i)
    a.equivalence_trace.push_back(condition_from_json(trace[i], where + ".equivalence_trace[" + std::to_string(i) + "]"));
  return a;
}

inline json to_json(const DStabilityReport& r) {
  json out{{"verdict", std::string(to_string(r.verdict))}, {"method", std::string(to_string(r.method))}};
  if (r.certificate)
    out["certificate"] = json{{"name", r.certificate->name}, {"norm", to_json(r.certificate->spec)}, {"mu", r.certificate->mu}};
  else
    out["certificate"] = nullptr;
  if (r.counterexample)
    out["counterexample"] = json{{"D", to_json(r.counterexample->D)}, {"abscissa", r.counterexample->abscissa}};
  else
    out["counterexample"] = nullptr;
  out["note"] = r.note;
  return out;
}

inline DStabilityReport dstability_from_json(const json& j, const std::string& where = "report") {
  DStabilityReport r;
  r.verdict = detail::enum_from(detail::field(j, "verdict", where), where + ".verdict",
                                {StabilityVerdict::Stable, StabilityVerdict::Unstable, StabilityVerdict::Unknown});
  r.method = detail::enum_from(detail::field(j, "method", where), where + ".method",
                               {StabilityMethod::Exact2x2, StabilityMethod::Metzler, StabilityMethod::AdmissibleCertificate,
                                StabilityMethod::Falsified, StabilityMethod::BudgetExhausted});
  if (j.contains("certificate") && !j["certificate"].is_null()) {
    const json& c = j["certificate"];
    const std::string at = where + ".certificate";
    r.certificate = Certificate{detail::string(detail::field(c, "name", at), at + ".name"),
                                norm_spec_from_json(detail::field(c, "norm", at), at + ".norm"),
                                detail::number(detail::field(c, "mu", at), at + ".mu")};
  }
  if (j.contains("counterexample") && !j["counterexample"].is_null()) {
    const json& c = j["counterexample"];
    const std::string at = where + ".counterexample";
    r.counterexample = Counterexample{matrix_from_json(detail::field(c, "D", at), at + ".D"),
                                      detail::number(detail::field(c, "abscissa", at), at + ".abscissa")};
  }
  r.note = detail::string(detail::field(j, "note", where), where + ".note");
  return r;
}

// --------------------------------------------------------------------------
// Trajectories
// --------------------------------------------------------------------------

inline json to_json(const Trajectory& tr) {
  json states = json::array();
  for (const auto& s : tr.states) states.push_back(to_json(s));
  return json{{"times", tr.times}, {"states", std::move(states)}, {"sync_metric", tr.sync_metric},
              {"diverged", tr.diverged}};
}

inline Trajectory trajectory_from_json(const json& j, const std::string& where = "trajectory") {
  Trajectory tr;
  auto numbers = [&](const char* key) {
    const json& a = detail::field(j, key, where);
    if (!a.is_array()) detail::fail(where + "." + key, "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < a.size(); ++i)
      out.push_back(detail::number(a[i], where + "." + key + "[" + std::to_string(i) + "]"));
    return out;
  };
  tr.times = numbers("times");
  tr.sync_metric = numbers("sync_metric");
  const json& st = detail::field(j, "states", where);
  if (!st.is_array()) detail::fail(where + ".states", "expected an array");
  for (std::size_t i = 0; i < st.size(); ++i)
    tr.states.push_back(vector_from_json(st[i], where + ".states[" + std::to_string(i) + "]"));
  if (tr.states.size() != tr.times.size() || tr.sync_metric.size() != tr.times.size())
    detail::fail(where, "times, states and sync_metric differ in length");
  tr.diverged = detail::boolean(detail::field(j, "diverged", where), where + ".diverged");
  return tr;
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double x) {
  return json(x).dump();
}

/// Columns t, x_1..x_n, z_1..z_n, sync.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  const Eigen::Index n = tr.states.empty() ? 0 : tr.states.front().size() / 2;
  os << "t";
  for (Eigen::Index i = 1; i <= n; ++i) os << ",x_" << i;
  for (Eigen::Index i = 1; i <= n; ++i) os << ",z_" << i;
  os << ",sync\n";
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    os << format_double(tr.times[k]);
    for (Eigen::Index i = 0; i < tr.states[k].size(); ++i) os << ',' << format_double(tr.states[k](i));
    os << ',' << format_double(tr.sync_metric[k]) << '\n';
  }
}

}  // namespace logmeasure::io
