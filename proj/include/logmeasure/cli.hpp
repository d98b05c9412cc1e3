#pragma once

// Command-line front end: logmeasure measure|classify|dstable|diffusion|battery.
//
// Every subcommand reads one JSON document (--in FILE, optionally layered over a
// built-in --example) and writes one output document to stdout or --out.
// Exit codes: 0/1/2 dstable verdict (stable/unstable/unknown), 64 usage,
// 65 unreadable or invalid input, 70 internal inconsistency.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "logmeasure/gallery.hpp"
#include "logmeasure/io.hpp"

namespace logmeasure::cli {

using io::json;

enum ExitCode : int {
  kExitOk = 0,
  kExitUnstable = 1,
  kExitUnknown = 2,
  kExitUsage = 64,
  kExitData = 65,
  kExitSoftware = 70,
};

struct Request {
  std::string subcommand;
  std::optional<std::string> input_path;
  std::optional<std::string> output_path;
  std::optional<std::string> seed_text;
  std::string format = "json";
  std::optional<std::string> example;
  std::optional<std::string> norm;
};

/// Thrown for problems with the command line itself (exit 64).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::uint64_t parse_seed(const std::string& text, const std::string& origin) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (text.empty() || text[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    throw UsageError(origin + ": not an unsigned integer: \"" + text + "\"");
  }
  if (used != text.size()) throw UsageError(origin + ": not an unsigned integer: \"" + text + "\"");
  return v;
}

/// --seed wins, then LOGMEASURE_SEED, then the library default.
inline std::uint64_t resolve_seed(const Request& r) {
  if (r.seed_text) return parse_seed(*r.seed_text, "--seed");
  if (const char* env = std::getenv("LOGMEASURE_SEED")) return parse_seed(env, "LOGMEASURE_SEED");
  return kDefaultSeed;
}

// --------------------------------------------------------------------------
// Built-in examples and norm shorthands
// --------------------------------------------------------------------------

inline const std::vector<std::string>& example_names() {
  static const std::vector<std::string> names{"intro", "example2", "parallelogram", "li-wang"};
  return names;
}

inline json example_document(const std::string& name) {
  const Matrix neg_d = -gallery::li_wang_diagonal();
  if (name == "intro") {
    Vector x0(2), z0(2);
    x0 << 1, 0;
    z0 << 0, 1;
    return json{{"matrix", io::to_json(gallery::intro_matrix())},
                {"norm", io::to_json(lp_spec(kInf))},
                {"D", io::to_json(Matrix(Matrix::Identity(2, 2)))},
                {"x0", io::to_json(x0)},
                {"z0", io::to_json(z0)},
                {"horizon", 30.0},
                {"dt", 0.01}};
  }
  if (name == "example2")
    return json{{"matrix", io::to_json(neg_d)}, {"norm", io::to_json(gallery::orthant_monotonic_example_spec())}};
  if (name == "parallelogram")
    return json{{"matrix", io::to_json(neg_d)}, {"norm", io::to_json(gallery::parallelogram_spec())}};
  if (name == "li-wang") return json{{"matrix", io::to_json(neg_d)}, {"norm", io::to_json(gallery::li_wang_spec())}};
  throw UsageError("unknown example \"" + name + "\"");
}

/// lp:1, lp:2, lp:inf, lp:<p>, or the name of an example norm.
inline NormSpec norm_shorthand(const std::string& text) {
  if (text.rfind("lp:", 0) == 0) {
    const std::string p = text.substr(3);
    if (p == "inf") return lp_spec(kInf);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(p, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != p.size()) throw UsageError("bad --norm exponent \"" + p + "\"");
    return lp_spec(v);
  }
  if (text == "example2") return gallery::orthant_monotonic_example_spec();
  if (text == "parallelogram") return gallery::parallelogram_spec();
  if (text == "li-wang") return gallery::li_wang_spec();
  throw UsageError("unknown --norm \"" + text + "\" (use lp:1, lp:2, lp:inf, lp:<p>, example2, parallelogram, li-wang)");
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read input file \"" + path + "\"");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

/// Example defaults, overlaid by the input file, overlaid by --norm.
inline json assemble_input(const Request& r, bool input_required) {
  json doc = json::object();
  if (r.example) doc = example_document(*r.example);
  if (r.input_path) {
    const json file = read_json_file(*r.input_path);
    if (!file.is_object()) throw Error(ErrorCode::ParseError, *r.input_path + ": top level must be an object");
    doc.merge_patch(file);
  }
  if (r.norm) doc["norm"] = io::to_json(norm_shorthand(*r.norm));
  if (input_required && !r.example && !r.input_path && !r.norm)
    throw UsageError(r.subcommand + " needs --in FILE or --example NAME");
  return doc;
}

// --------------------------------------------------------------------------
// Small formatting helpers
// --------------------------------------------------------------------------

namespace detail {

inline std::string num(double x) { return io::format_double(x); }

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Left-aligned fixed-width table.
inline std::string table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (width.size() <= c) width.push_back(0);
      width[c] = std::max(width[c], row[c].size());
    }
  std::ostringstream os;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (c) os << "  ";
      if (c + 1 == rows[r].size()) os << rows[r][c];
      else os << std::left << std::setw(static_cast<int>(width[c])) << rows[r][c];
    }
    os << '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c ? 2 : 0);
      os << std::string(total, '-') << '\n';
    }
  }
  return os.str();
}

inline std::string trace_table(const AdmissibilityVerdict& a) {
  std::vector<std::vector<std::string>> rows{{"cond", "holds", "exact", "checks", "statement"}};
  for (const auto& c : a.equivalence_trace)
    rows.push_back({std::to_string(c.index), yes_no(c.holds), yes_no(c.exact), std::to_string(c.checks), c.statement});
  return table(rows);
}

inline int get_int(const json& doc, const char* key, int fallback) {
  if (!doc.contains(key)) return fallback;
  const json& v = doc[key];
  if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > 100000000)
    throw Error(ErrorCode::ParseError, std::string(key) + ": expected a nonnegative integer");
  return v.get<int>();
}

inline Matrix diagonal_from_json(const json& j, const std::string& where) {
  if (j.is_array() && !j.empty() && !j[0].is_array()) return diag(io::vector_from_json(j, where));
  return io::matrix_from_json(j, where);
}

inline double get_number(const json& doc, const char* key) {
  if (!doc.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing \"") + key + "\"");
  return io::detail::number(doc[key], key);
}

}  // namespace detail

// --------------------------------------------------------------------------
// Subcommands. Each returns its exit code and writes one document to `out`.
// --------------------------------------------------------------------------

inline int run_measure(const json& doc, const Request& r, std::uint64_t seed, std::ostream& out) {
  if (!doc.contains("matrix")) throw Error(ErrorCode::ParseError, "missing \"matrix\"");
  if (!doc.contains("norm")) throw Error(ErrorCode::ParseError, "missing \"norm\" (or pass --norm)");
  const Matrix a = io::matrix_from_json(doc["matrix"]);
  require_square(a, "matrix");
  const NormSpec spec = io::norm_spec_from_json(doc["norm"]);
  const auto norm = validate_norm_spec(spec, a.rows(), seed);
  EstimatorOptions opts;
  opts.seed = seed;
  const MeasureResult mu = matrix_measure(a, norm, opts);
  const MeasureResult nrm = induced_matrix_norm(a, norm, opts);
  const double s = spectral_abscissa(a);

  if (r.format == "csv") {
    out << "quantity,value,method,error_bound\n";
    out << "measure," << detail::num(mu.value) << ',' << to_string(mu.method) << ',' << detail::num(mu.error_bound) << '\n';
    out << "induced_norm," << detail::num(nrm.value) << ',' << to_string(nrm.method) << ','
        << detail::num(nrm.error_bound) << '\n';
    out << "spectral_abscissa," << detail::num(s) << ",eigen,0.0\n";
  } else if (r.format == "text") {
    out << "norm:              " << norm.describe() << '\n';
    out << "mu(A):             " << detail::num(mu.value) << "  [" << to_string(mu.method) << ", error bound "
        << detail::num(mu.error_bound) << "]\n";
    out << "||A||:             " << detail::num(nrm.value) << "  [" << to_string(nrm.method) << "]\n";
    out << "spectral abscissa: " << detail::num(s) << '\n';
  } else {
    json o = io::to_json(mu);
    o["induced_norm"] = io::to_json(nrm);
    o["spectral_abscissa"] = s;
    out << o.dump(2) << '\n';
  }
  return kExitOk;
}

inline int run_classify(const json& doc, const Request& r, std::uint64_t seed, std::ostream& out) {
  if (!doc.contains("norm")) throw Error(ErrorCode::ParseError, "missing \"norm\" (or pass --norm)");
  const NormSpec spec = io::norm_spec_from_json(doc["norm"]);
  std::optional<Eigen::Index> dim;
  if (doc.contains("dim")) dim = detail::get_int(doc, "dim", 0);
  else if (doc.contains("matrix")) dim = io::matrix_from_json(doc["matrix"]).rows();
  const auto norm = validate_norm_spec(spec, dim, seed);

  const Verdict absolute = is_absolute(norm, seed);
  const Verdict monotone = is_orthant_monotonic(norm, seed);
  std::optional<Verdict> identity;
  std::string identity_note;
  try {
    identity = diag_norm_identity_check(norm, detail::get_int(doc, "samples", 1000), seed);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoExactPath) throw;
    identity_note = e.what();
  }
  const AdmissibilityVerdict adm = is_admissible_measure(norm, detail::get_int(doc, "budget", 1000), seed);

  if (r.format == "csv") {
    out << "property,holds,exact,checks,note\n";
    auto row = [&](const char* name, const Verdict& v) {
      out << name << ',' << (v.holds ? "true" : "false") << ',' << (v.exact ? "true" : "false") << ',' << v.checks_run
          << ',' << detail::csv_field(v.note) << '\n';
    };
    row("absolute", absolute);
    row("orthant_monotonic", monotone);
    if (identity) row("diag_identity", *identity);
    else out << "diag_identity,,,0," << detail::csv_field(identity_note) << '\n';
    for (const auto& c : adm.equivalence_trace)
      out << "condition_" << c.index << ',' << (c.holds ? "true" : "false") << ',' << (c.exact ? "true" : "false")
          << ',' << c.checks << ',' << detail::csv_field(c.statement) << '\n';
  } else if (r.format == "text") {
    out << "norm: " << norm.describe() << "\n\n";
    std::vector<std::vector<std::string>> rows{{"property", "holds", "exact", "note"}};
    rows.push_back({"absolute", detail::yes_no(absolute.holds), detail::yes_no(absolute.exact), absolute.note});
    rows.push_back({"orthant_monotonic", detail::yes_no(monotone.holds), detail::yes_no(monotone.exact), monotone.note});
    if (identity)
      rows.push_back({"diag_identity", detail::yes_no(identity->holds), detail::yes_no(identity->exact), identity->note});
    else
      rows.push_back({"diag_identity", "-", "-", identity_note});
    out << detail::table(rows) << '\n' << "admissibility: " << detail::yes_no(adm.admissible) << "\n\n"
        << detail::trace_table(adm);
  } else {
    json o;
    o["absolute"] = io::to_json(absolute);
    o["orthant_monotonic"] = io::to_json(monotone);
    o["diag_identity"] = identity ? io::to_json(*identity) : json(nullptr);
    o["admissibility"] = io::to_json(adm);
    out << o.dump(2) << '\n';
  }
  return kExitOk;
}

inline int run_dstable(const json& doc, const Request& r, std::uint64_t seed, std::ostream& out) {
  if (!doc.contains("matrix")) throw Error(ErrorCode::ParseError, "missing \"matrix\"");
  const Matrix a = io::matrix_from_json(doc["matrix"]);
  require_square(a, "matrix");
  DStabilityOptions o;
  o.seed = seed;
  o.falsifier_budget = detail::get_int(doc, "budget", static_cast<int>(o.falsifier_budget));
  o.family_scalings = detail::get_int(doc, "family_scalings", o.family_scalings);
  o.admissibility_budget = detail::get_int(doc, "admissibility_budget", o.admissibility_budget);
  if (doc.contains("family")) {
    const json& fam = doc["family"];
    if (!fam.is_array()) throw Error(ErrorCode::ParseError, "family: expected an array of norms");
    std::vector<NamedNorm> named;
    for (std::size_t k = 0; k < fam.size(); ++k) {
      const std::string at = "family[" + std::to_string(k) + "]";
      named.push_back({at, validate_norm_spec(io::norm_spec_from_json(fam[k], at), a.rows(), seed)});
    }
    o.family = std::move(named);
  }
  const DStabilityReport rep = analyze_additive_d_stability(a, o);

  if (r.format == "csv") {
    out << "verdict,method,certificate,mu,counterexample_diagonal,abscissa,note\n";
    out << to_string(rep.verdict) << ',' << to_string(rep.method) << ',';
    if (rep.certificate) out << detail::csv_field(rep.certificate->name) << ',' << detail::num(rep.certificate->mu);
    else out << ',';
    out << ',';
    if (rep.counterexample) {
      std::string d;
      for (Eigen::Index i = 0; i < rep.counterexample->D.rows(); ++i)
        d += (i ? " " : "") + detail::num(rep.counterexample->D(i, i));
      out << d << ',' << detail::num(rep.counterexample->abscissa);
    } else {
      out << ',';
    }
    out << ',' << detail::csv_field(rep.note) << '\n';
  } else if (r.format == "text") {
    out << "verdict: " << to_string(rep.verdict) << "  (" << to_string(rep.method) << ")\n";
    if (rep.certificate)
      out << "certificate: " << rep.certificate->name << " with mu(A) = " << detail::num(rep.certificate->mu) << '\n';
    if (rep.counterexample) {
      out << "counterexample D = diag(";
      for (Eigen::Index i = 0; i < rep.counterexample->D.rows(); ++i)
        out << (i ? ", " : "") << detail::num(rep.counterexample->D(i, i));
      out << "), s(A - D) = " << detail::num(rep.counterexample->abscissa) << '\n';
    }
    if (!rep.note.empty()) out << "note: " << rep.note << '\n';
  } else {
    out << io::to_json(rep).dump(2) << '\n';
  }
  switch (rep.verdict) {
    case StabilityVerdict::Stable: return kExitOk;
    case StabilityVerdict::Unstable: return kExitUnstable;
    case StabilityVerdict::Unknown: return kExitUnknown;
  }
  return kExitUnknown;
}

/// Summary record for a diffusion run.
inline json diffusion_verdict(const Matrix& a, const Matrix& d, const Trajectory& tr) {
  json v;
  try {
    v["sync_verdict"] = sync_verdict(a, d);
    v["note"] = "";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BaseNotHurwitz && e.code() != ErrorCode::Marginal) throw;
    v["sync_verdict"] = nullptr;
    v["note"] = e.what();
  }
  v["abscissa_A"] = spectral_abscissa(a);
  v["abscissa_A_minus_2D"] = spectral_abscissa(a - 2.0 * d);
  v["eigen_split_error"] = eigen_split_error(build_coupled(a, d));
  v["steps"] = tr.times.size() - 1;
  v["final_time"] = tr.times.back();
  v["final_sync_metric"] = tr.sync_metric.back();
  v["max_sync_metric"] = *std::max_element(tr.sync_metric.begin(), tr.sync_metric.end());
  v["terminal_log_slope"] = tr.times.size() >= 3 ? json(terminal_log_slope(tr)) : json(nullptr);
  v["diverged"] = tr.diverged;
  return v;
}

inline int run_diffusion(const json& doc, const Request& r, std::ostream& out, std::ostream& err) {
  for (const char* key : {"matrix", "D", "x0", "z0"})
    if (!doc.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing \"") + key + "\"");
  const Matrix a = io::matrix_from_json(doc["matrix"]);
  const Matrix d = detail::diagonal_from_json(doc["D"], "D");
  const Vector x0 = io::vector_from_json(doc["x0"], "x0");
  const Vector z0 = io::vector_from_json(doc["z0"], "z0");
  const double horizon = detail::get_number(doc, "horizon");
  const double dt = detail::get_number(doc, "dt");
  const Trajectory tr = simulate(a, d, x0, z0, horizon, dt);
  const json verdict = diffusion_verdict(a, d, tr);

  if (r.format == "csv") {
    io::write_trajectory_csv(out, tr);
    if (r.output_path) {
      std::ofstream vf(*r.output_path + ".verdict.json");
      if (!vf) throw UsageError("cannot write \"" + *r.output_path + ".verdict.json\"");
      vf << verdict.dump(2) << '\n';
    } else {
      err << verdict.dump(2) << '\n';
    }
  } else if (r.format == "text") {
    const json& sv = verdict["sync_verdict"];
    out << "synchronizes (A - 2D Hurwitz): " << (sv.is_null() ? std::string("n/a") : detail::yes_no(sv.get<bool>()))
        << '\n';
    if (!verdict["note"].get<std::string>().empty()) out << "note: " << verdict["note"].get<std::string>() << '\n';
    out << "s(A) = " << detail::num(verdict["abscissa_A"].get<double>())
        << ", s(A - 2D) = " << detail::num(verdict["abscissa_A_minus_2D"].get<double>()) << '\n';
    out << "steps: " << verdict["steps"].get<std::size_t>() << ", final t = " << detail::num(tr.times.back())
        << (tr.diverged ? " (stopped: diverged)" : "") << '\n';
    out << "sync metric: final " << detail::num(tr.sync_metric.back()) << ", max "
        << detail::num(verdict["max_sync_metric"].get<double>()) << '\n';
  } else {
    out << json{{"verdict", verdict}, {"trajectory", io::to_json(tr)}}.dump(2) << '\n';
  }
  return kExitOk;
}

inline int run_battery(const json& doc, const Request& r, std::uint64_t seed, std::ostream& out) {
  const int budget = detail::get_int(doc, "budget", 1000);
  json members = json::array();
  bool all_agree = true;
  std::vector<std::vector<std::string>> rows{
      {"norm", "expected", "(1) orth-mono", "(2) mu(-D)<=0", "(3) mu(D)=max", "(4) mu(-I-D)<0", "agree"}};
  std::ostringstream csv;
  csv << "norm,expected,condition_1,condition_2,condition_3,condition_4,admissible,agree\n";

  for (const auto& m : gallery::norm_battery(seed)) {
    json entry{{"name", m.name}, {"norm", io::to_json(m.norm.spec())}, {"expected", m.expected_orthant_monotonic}};
    std::vector<std::string> row{m.name, detail::yes_no(m.expected_orthant_monotonic)};
    std::string csv_row = m.expected_orthant_monotonic ? ",true" : ",false";
    bool ok = false;
    try {
      const auto adm = is_admissible_measure(m.norm, budget, seed);
      ok = adm.admissible == m.expected_orthant_monotonic;
      entry["admissibility"] = io::to_json(adm);
      entry["error"] = nullptr;
      for (const auto& c : adm.equivalence_trace) {
        row.push_back(detail::yes_no(c.holds) + (c.exact ? "" : " (sampled)"));
        csv_row += std::string(",") + (c.holds ? "true" : "false");
      }
      csv_row += std::string(",") + (adm.admissible ? "true" : "false");
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InconsistentOracles) throw;
      entry["admissibility"] = nullptr;
      entry["error"] = e.what();
      for (int k = 0; k < 4; ++k) row.push_back("?");
      csv_row += ",,,,,";
    }
    entry["agree"] = ok;
    all_agree = all_agree && ok;
    row.push_back(detail::yes_no(ok));
    csv << detail::csv_field(m.name) << csv_row << ',' << (ok ? "true" : "false") << '\n';
    rows.push_back(row);
    members.push_back(std::move(entry));
  }

  if (r.format == "csv") {
    out << csv.str();
  } else if (r.format == "text") {
    out << detail::table(rows) << '\n' << (all_agree ? "all conditions agree on every member" : "DISAGREEMENT") << '\n';
  } else {
    out << json{{"members", std::move(members)}, {"all_agree", all_agree}}.dump(2) << '\n';
  }
  return all_agree ? kExitOk : kExitSoftware;
}

inline int dispatch(const Request& r, std::ostream& out, std::ostream& err) {
  const std::uint64_t seed = resolve_seed(r);
  const json doc = assemble_input(r, r.subcommand != "battery");
  if (r.subcommand == "measure") return run_measure(doc, r, seed, out);
  if (r.subcommand == "classify") return run_classify(doc, r, seed, out);
  if (r.subcommand == "dstable") return run_dstable(doc, r, seed, out);
  if (r.subcommand == "diffusion") return run_diffusion(doc, r, out, err);
  if (r.subcommand == "battery") return run_battery(doc, r, seed, out);
  throw UsageError("unknown subcommand \"" + r.subcommand + "\"");
}

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InconsistentOracles:
    case ErrorCode::EigenFailure:
      return kExitSoftware;
    default:
      return kExitData;
  }
}

/// Parses the command line and runs one request.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Logarithmic norms, admissible measures and additive D-stability", "logmeasure"};
  app.require_subcommand(1);
  Request req;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--in", req.input_path, "input JSON document");
    sub->add_option("--out", req.output_path, "write the output document here instead of stdout");
    sub->add_option("--seed", req.seed_text, "RNG seed (default: $LOGMEASURE_SEED, then 0xC0FFEE)");
    sub->add_option("--format", req.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_option("--example", req.example, "built-in input: intro, example2, parallelogram, li-wang")
        ->check(CLI::IsMember(example_names()));
    sub->add_option("--norm", req.norm, "norm shorthand: lp:1, lp:2, lp:inf, lp:<p>, example2, parallelogram, li-wang");
  };
  const std::pair<const char*, const char*> subs[] = {
      {"measure", "matrix measure, induced norm and spectral abscissa of {matrix} under {norm}"},
      {"classify", "absolute / orthant-monotonic / admissibility classification of {norm}"},
      {"dstable", "additive D-stability of {matrix}; exit 0 stable, 1 unstable, 2 unknown"},
      {"diffusion", "simulate two diffusively coupled copies of x' = Ax"},
      {"battery", "admissibility equivalence table over the built-in norm battery"},
  };
  for (const auto& [name, help] : subs) add_common(app.add_subcommand(name, help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }
  for (const auto* sub : app.get_subcommands()) req.subcommand = sub->get_name();

  try {
    std::ostringstream buffer;
    const int code = dispatch(req, buffer, err);
    if (req.output_path) {
      std::ofstream f(*req.output_path, std::ios::binary);
      if (!f) throw UsageError("cannot write \"" + *req.output_path + "\"");
      f << buffer.str();
    } else {
      out << buffer.str();
    }
    return code;
  } catch (const UsageError& e) {
    err << "logmeasure: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "logmeasure: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "logmeasure: internal error: " << e.what() << '\n';
    return kExitSoftware;
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"logmeasure"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace logmeasure::cli
