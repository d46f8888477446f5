#pragma once

#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinboson/spinboson.hpp"
#include "verify.hpp"

namespace spinboson::cli {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kOk = 0, kUsage = 1, kVerifyFailed = 2 };

inline const std::vector<std::string>& model_names() {
  static const std::vector<std::string> v = {"jt", "dot", "jc", "jc-rwa", "mjc", "dirac", "general"};
  return v;
}

/// Field names and defaults per model, in declaration order.
inline const std::vector<std::pair<std::string, double>>& model_fields(const std::string& model) {
  static const std::map<std::string, std::vector<std::pair<std::string, double>>> fields = {
      {"jt", {{"m", 1}, {"omega", 1}, {"mu_level", 0}, {"kappa", 0}, {"hbar", 1}}},
      {"dot", {{"m_star", 1}, {"omega0", 1}, {"B", 0}, {"lambda_R", 0}, {"g", 2}, {"mu_bohr", 1}, {"charge", 1}, {"hbar", 1}}},
      {"jc", {{"omega", 1}, {"omega0", 1}, {"kappa", 0}, {"hbar", 1}}},
      {"jc-rwa", {{"omega", 1}, {"omega0", 1}, {"kappa", 0}, {"hbar", 1}}},
      {"mjc", {{"omega", 1}, {"omega0", 1}, {"lambda1", 0}, {"lambda2", 0}, {"hbar", 1}}},
      {"dirac", {{"mass", 1}, {"c", 1}, {"omega", 1}, {"hbar", 1}}},
      {"general",
       {{"omega1", 0}, {"omega2", 0}, {"beta", 0}, {"kappa1", 0}, {"kappa2", 0}, {"kappa3", 0}, {"kappa4", 0},
        {"gamma1", 0}, {"gamma2", 0}, {"gamma3", 0}, {"gamma4", 0}}},
  };
  const auto it = fields.find(model);
  if (it == fields.end()) throw UsageError("unknown model '" + model + "'");
  return it->second;
}

inline std::vector<std::string> all_field_names() {
  std::vector<std::string> out;
  for (const auto& m : model_names())
    for (const auto& [name, def] : model_fields(m))
      if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  return out;
}

struct RunConfig {
  std::string command;
  std::string model;
  std::map<std::string, std::string> params;  // as given; general couplings may be "re,im"
  std::optional<int> cutoff, cutoff_b;
  std::vector<int> cutoffs;
  std::string format = "json";
  std::optional<std::string> output, dump;
  std::optional<double> tol;
  std::string suite = "all";
  std::string variant = "both";
  std::optional<int> levels;
  std::optional<double> k, sector_charge, energy;
  bool mirrored = false;
  std::optional<std::string> sector;
  std::vector<double> scan;
  int grid = 20000;
  std::optional<int> rows;
  bool printed = false;
};

// ---------------------------------------------------------------------------
// Parameters

inline Complex parse_value(const std::string& key, const std::string& text, bool allow_complex) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw UsageError("parameter " + key + ": cannot read '" + text + "' as a number");
    return v;
  };
  const auto comma = text.find(',');
  if (comma == std::string::npos) return number(text);
  if (!allow_complex) throw UsageError("parameter " + key + " must be real");
  return {number(text.substr(0, comma)), number(text.substr(comma + 1))};
}

inline std::map<std::string, Complex> resolve_params(const RunConfig& c) {
  const auto& fields = model_fields(c.model);
  for (const auto& [name, value] : c.params) {
    const bool known = std::any_of(fields.begin(), fields.end(), [&](const auto& f) { return f.first == name; });
    if (!known) throw UsageError("parameter " + name + " does not apply to model " + c.model);
  }
  std::map<std::string, Complex> out;
  for (const auto& [name, def] : fields) {
    const auto it = c.params.find(name);
    const bool complex_ok = c.model == "general" && (name.rfind("kappa", 0) == 0 || name.rfind("gamma", 0) == 0);
    out[name] = it == c.params.end() ? Complex(def) : parse_value(name, it->second, complex_ok);
  }
  return out;
}

inline PresetParams make_preset(const std::string& model, const std::map<std::string, Complex>& v) {
  auto r = [&](const char* k) { return v.at(k).real(); };
  if (model == "jt") return JTParams{r("m"), r("omega"), r("mu_level"), r("kappa"), r("hbar")};
  if (model == "dot")
    return DotParams{r("m_star"), r("omega0"), r("B"), r("lambda_R"), r("g"), r("mu_bohr"), r("charge"), r("hbar")};
  if (model == "jc") return JCParams{r("omega"), r("omega0"), r("kappa"), r("hbar")};
  if (model == "jc-rwa") return JCRWAParams{r("omega"), r("omega0"), r("kappa"), r("hbar")};
  if (model == "mjc") return MJCParams{r("omega"), r("omega0"), r("lambda1"), r("lambda2"), r("hbar")};
  if (model == "dirac") return DiracParams{r("mass"), r("c"), r("omega"), r("hbar")};
  throw UsageError("model " + model + " has no preset");
}

inline GeneralForm general_form(const std::string& model, const std::map<std::string, Complex>& v) {
  if (model != "general") return to_general(make_preset(model, v));
  GeneralForm f;
  auto& g = f.params;
  g.omega1 = v.at("omega1").real();
  g.omega2 = v.at("omega2").real();
  g.beta = v.at("beta").real();
  g.kappa1 = v.at("kappa1");
  g.kappa2 = v.at("kappa2");
  g.kappa3 = v.at("kappa3");
  g.kappa4 = v.at("kappa4");
  g.gamma1 = v.at("gamma1");
  g.gamma2 = v.at("gamma2");
  g.gamma3 = v.at("gamma3");
  g.gamma4 = v.at("gamma4");
  return f;
}

inline bool needs_two_modes(const std::string& model, const GeneralForm& f) {
  if (model == "general") return f.params.uses_mode_b();
  return model == "jt" || model == "dot" || model == "mjc";
}

inline Cutoff resolve_cutoff(const RunConfig& c, const GeneralForm& f, int fallback) {
  const int a = c.cutoff.value_or(fallback);
  if (a < 8 || (c.cutoff_b && *c.cutoff_b < 8)) throw UsageError("cutoffs must be at least 8");
  if (!needs_two_modes(c.model, f)) {
    if (c.cutoff_b) throw UsageError("--cutoff-b given for a one-mode model");
    return Cutoff::one_mode(a);
  }
  return Cutoff::two_mode(a, c.cutoff_b.value_or(a));
}

// ---------------------------------------------------------------------------
// Output

inline Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

/// JSON text with every float printed to 17 significant digits.
inline void write_json(std::ostream& os, const Json& j, int indent = 0) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  const std::string inner(static_cast<std::size_t>(indent + 2), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [key, val] : j.items()) {
        os << (first ? "" : ",\n") << inner << Json(key).dump() << ": ";
        write_json(os, val, indent + 2);
        first = false;
      }
      os << "\n" << pad << "}";
      return;
    }
    case Json::value_t::array: {
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& x) { return x.is_primitive(); });
      if (j.empty()) {
        os << "[]";
        return;
      }
      if (flat) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          os << (i ? ", " : "");
          write_json(os, j[i], indent);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        os << (i ? ",\n" : "") << inner;
        write_json(os, j[i], indent + 2);
      }
      os << "\n" << pad << "]";
      return;
    }
    case Json::value_t::number_float: os << json_number(j.get<double>()); return;
    default: os << j.dump(); return;
  }
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
};

struct Output {
  Json result = Json::object();
  Table table;
  int exit_code = kOk;
};

inline std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) {
    const std::string s = json_number(v.get<double>());
    return s.front() == '"' ? s.substr(1, s.size() - 2) : s;
  }
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  return v.dump();
}

inline void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    return;
  }
  std::ostringstream s;
  write_json(s, j);
  out.emplace_back(prefix, s.str());
}

inline void write_csv(std::ostream& os, const Json& header, const Output& out) {
  std::vector<std::pair<std::string, std::string>> lines;
  flatten(header, "config", lines);
  for (const auto& [k, v] : out.result.items())
    if (!v.is_array() || k == "notes") flatten(v, k, lines);
  for (const auto& [k, v] : lines) os << "# " << k << " = " << v << "\n";
  for (std::size_t i = 0; i < out.table.columns.size(); ++i) os << (i ? "," : "") << out.table.columns[i];
  os << "\n";
  for (const auto& row : out.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << "\n";
  }
}

// ---------------------------------------------------------------------------
// Commands

inline Json normalized_json(const GeneralForm& f) {
  const auto& g = f.params;
  Json j;
  j["omega1"] = g.omega1;
  j["omega2"] = g.omega2;
  j["beta"] = g.beta;
  j["kappa1"] = complex_json(g.kappa1);
  j["kappa2"] = complex_json(g.kappa2);
  j["kappa3"] = complex_json(g.kappa3);
  j["kappa4"] = complex_json(g.kappa4);
  j["gamma1"] = complex_json(g.gamma1);
  j["gamma2"] = complex_json(g.gamma2);
  j["gamma3"] = complex_json(g.gamma3);
  j["gamma4"] = complex_json(g.gamma4);
  j["offset"] = f.offset;
  for (const auto& [k, v] : f.extras) j[k] = v;
  return j;
}

inline Json cutoff_json(const Cutoff& c) {
  Json j;
  j["n_max_a"] = c.n_max_a;
  if (c.n_max_b) j["n_max_b"] = *c.n_max_b;
  return j;
}

/// Smallest singular value of (M - z I).
inline double eigen_residual(const DenseMatrix& m, Complex z) {
  const DenseMatrix shifted = m - z * DenseMatrix::Identity(m.rows(), m.cols());
  Eigen::JacobiSVD<DenseMatrix> svd(shifted);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

inline Output cmd_spectrum(const RunConfig& c, const std::string& model, const GeneralForm& form, const Cutoff& cut) {
  Output out;
  out.table.columns = {"index", "energy_re", "energy_im", "residual"};
  Json levels = Json::array();
  auto emit = [&](Complex e, double res) {
    Json row;
    row["energy"] = complex_json(e);
    row["residual"] = res;
    out.table.rows.push_back({static_cast<int>(levels.size()), e.real(), e.imag(), res});
    levels.push_back(row);
  };
  const FockBasis basis(cut);
  const auto build = build_hamiltonian(form.params, basis, form.offset);
  if (build.hermitian) {
    Spectrum s;
    if (model == "general") {
      s = eig_hermitian(build.assembled(), true, cut);
      s.eigenvalues.array() += build.constant_offset;
      if (c.levels && *c.levels < s.eigenvalues.size()) {
        s.eigenvalues.conservativeResize(*c.levels);
        if (s.level_residuals.size()) s.level_residuals.conservativeResize(*c.levels);
      }
    } else {
      s = preset_lowest_levels(make_preset(model, resolve_params(c)), cut, c.levels, true);
    }
    for (Index i = 0; i < s.eigenvalues.size(); ++i)
      emit(s.eigenvalues(i), s.level_residuals.size() ? s.level_residuals(i) : s.residual);
    out.result["residual_kind"] = s.residual_kind;
  } else {
    // Non-Hermitian: conserved sectors of a preset, or the full matrix of a
    // general parameter set.
    std::vector<std::pair<Complex, double>> all;
    if (model == "general") {
      const DenseMatrix h(build.assembled());
      Eigen::ComplexEigenSolver<DenseMatrix> es(h);
      for (Index i = 0; i < h.rows(); ++i) {
        const Complex z = es.eigenvalues()(i);
        const DenseVector v = es.eigenvectors().col(i);
        all.emplace_back(z + build.constant_offset, (h * v - z * v).norm());
      }
    } else {
      for (const auto& sec : sector_decompose(build, conserved_charge(kind_of(make_preset(model, resolve_params(c))), basis))) {
        const DenseMatrix m(sec.matrix);
        if (m.rows() > 8) throw std::runtime_error("non-Hermitian sector larger than 8");
        for (const Complex z : eig_small_general(m)) all.emplace_back(z + build.constant_offset, eigen_residual(m, z));
      }
    }
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
      return x.first.real() != y.first.real() ? x.first.real() < y.first.real() : x.first.imag() < y.first.imag();
    });
    if (c.levels && static_cast<std::size_t>(*c.levels) < all.size()) all.resize(static_cast<std::size_t>(*c.levels));
    for (const auto& [z, res] : all) emit(z, res);
    out.result["residual_kind"] = "smallest singular value of (H - E)";
  }
  out.result["hermitian"] = build.hermitian;
  out.result["levels"] = levels;
  Json notes = Json::array();
  for (const auto& n : form.notes) notes.push_back(n);
  for (const auto& n : build.notes) notes.push_back(n);
  out.result["notes"] = notes;
  return out;
}

inline Output report_output(const ComparisonReport& rep, const std::string& variant, std::optional<int> levels) {
  Output out;
  const bool show_printed = variant != "rederived", show_rederived = variant != "printed";
  auto opt = [](const std::optional<Complex>& z) { return z ? complex_json(*z) : Json(); };
  auto re = [](const std::optional<Complex>& z) { return z ? Json(z->real()) : Json(); };
  auto im = [](const std::optional<Complex>& z) { return z ? Json(z->imag()) : Json(); };
  auto err = [](double e) { return std::isnan(e) ? Json() : Json(e); };
  out.table.columns = {"label"};
  if (show_printed) out.table.columns.insert(out.table.columns.end(), {"printed_re", "printed_im", "printed_error"});
  if (show_rederived) out.table.columns.insert(out.table.columns.end(), {"rederived_re", "rederived_im", "rederived_error"});
  out.table.columns.insert(out.table.columns.end(), {"oracle_re", "oracle_im", "alternative_re", "alternative_im"});
  Json rows = Json::array();
  std::size_t count = rep.rows.size();
  if (levels) count = std::min(count, static_cast<std::size_t>(*levels));
  for (std::size_t i = 0; i < count; ++i) {
    const auto& r = rep.rows[i];
    Json j;
    j["label"] = r.label;
    std::vector<Json> t = {r.label};
    if (show_printed) {
      j["printed"] = opt(r.printed);
      j["printed_error"] = err(r.printed_error());
      t.insert(t.end(), {re(r.printed), im(r.printed), err(r.printed_error())});
    }
    if (show_rederived) {
      j["rederived"] = opt(r.rederived);
      j["rederived_error"] = err(r.rederived_error());
      t.insert(t.end(), {re(r.rederived), im(r.rederived), err(r.rederived_error())});
    }
    j["oracle"] = opt(r.oracle);
    if (r.alternative) j["alternative"] = opt(r.alternative);
    t.insert(t.end(), {re(r.oracle), im(r.oracle), re(r.alternative), im(r.alternative)});
    rows.push_back(j);
    out.table.rows.push_back(std::move(t));
  }
  out.result["report"] = rep.model;
  if (show_printed) out.result["max_printed_error"] = rep.max_printed_error;
  if (show_rederived) out.result["max_rederived_error"] = rep.max_rederived_error;
  out.result["rows"] = rows;
  Json notes = Json::array();
  for (const auto& n : rep.notes) notes.push_back(n);
  out.result["notes"] = notes;
  return out;
}

inline Output cmd_closed_form(const RunConfig& c, const std::string& model, const std::map<std::string, Complex>& v) {
  if (c.variant != "printed" && c.variant != "rederived" && c.variant != "both")
    throw UsageError("--variant must be printed, rederived or both");
  const PresetParams preset = make_preset(model, v);
  const auto form = to_general(preset);
  if (model == "jc-rwa") {
    const Cutoff cut = resolve_cutoff(c, form, 128);
    return report_output(jcrwa_report(std::get<JCRWAParams>(preset), cut.n_max_a, c.levels.value_or(40)), c.variant, std::nullopt);
  }
  if (model == "dirac") return report_output(dirac_report(std::get<DiracParams>(preset), c.levels.value_or(51)), c.variant, std::nullopt);
  if (model == "mjc") {
    const Cutoff cut = resolve_cutoff(c, form, 40);
    if (cut.n_max_b && *cut.n_max_b != cut.n_max_a) throw UsageError("mjc closed form needs equal mode cutoffs");
    return report_output(mjc_report(std::get<MJCParams>(preset), cut.n_max_a), c.variant, c.levels);
  }
  if (model == "jc") {
    const Cutoff cut = resolve_cutoff(c, form, 64);
    return report_output(jc_ground_report(std::get<JCParams>(preset), cut.n_max_a), c.variant, std::nullopt);
  }
  throw UsageError("closed-form supports jc-rwa, dirac, mjc and jc");
}

inline RecurrenceSector resolve_sector(const RunConfig& c, const std::string& model) {
  if (model == "jc") {
    if (c.k || c.sector_charge) throw UsageError("jc sectors are chosen with --sector even|odd");
    const std::string s = c.sector.value_or("even");
    if (s == "even") return RecurrenceSector::jc_even();
    if (s == "odd") return RecurrenceSector::jc_odd();
    throw UsageError("--sector must be even or odd");
  }
  if (c.sector) throw UsageError("--sector applies to jc only");
  if (c.k && c.sector_charge) throw UsageError("give either --k or --sector-charge");
  if (c.sector_charge) {
    try {
      return RecurrenceSector::from_charge(*c.sector_charge);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  const double k = c.k.value_or(0.5);
  const double shift = 2.0 * k - 1.0;
  if (shift < -1e-12 || std::abs(shift - std::round(shift)) > 1e-12) throw UsageError("--k must be one of 1/2, 1, 3/2, ...");
  return RecurrenceSector::su11(k, c.mirrored);
}

inline Output cmd_recurrence(const RunConfig& c, const std::string& model, const std::map<std::string, Complex>& v) {
  if (model != "jt" && model != "dot" && model != "jc") throw UsageError("recurrence supports jt, dot and jc");
  const PresetParams preset = make_preset(model, v);
  const Cutoff cut = resolve_cutoff(c, to_general(preset), 64);
  const FockBasis basis(cut);
  const auto sector = resolve_sector(c, model);
  RecurrenceOptions opt;
  if (!c.scan.empty()) {
    if (c.scan.size() != 2) throw UsageError("--scan takes two energies");
    opt.window = std::pair{c.scan[0], c.scan[1]};
  }
  if (c.grid < 2) throw UsageError("--grid must be at least 2");
  opt.grid = c.grid;
  opt.rows = c.rows;
  opt.residual_tol = c.tol;
  opt.printed = c.printed;
  RecurrenceRun run;
  try {
    run = run_recurrence(preset, sector, basis, opt);
  } catch (const std::logic_error& e) {
    throw UsageError(e.what());
  }

  Output out;
  out.table.columns = {"kind", "energy", "residual"};
  Json accepted = Json::array(), spurious = Json::array(), poles = Json::array(), oracle = Json::array();
  for (const auto& cand : run.candidates) {
    Json j;
    j["energy"] = cand.energy;
    if (cand.status == RootStatus::pole) {
      j["det_residual"] = cand.det_residual;
      poles.push_back(j);
      out.table.rows.push_back({"pole", cand.energy, cand.det_residual});
      continue;
    }
    j["residual"] = cand.spinor_residual.value_or(std::nan(""));
    (cand.status == RootStatus::accepted ? accepted : spurious).push_back(j);
    out.table.rows.push_back({status_name(cand.status), cand.energy, j["residual"]});
  }
  for (Index i = 0; i < run.oracle.eigenvalues.size(); ++i) {
    Json j;
    j["energy"] = run.oracle.eigenvalues(i);
    j["residual"] = run.oracle.level_residuals(i);
    j["tail_residual"] = run.oracle_tail(i);
    oracle.push_back(j);
    out.table.rows.push_back({"oracle", run.oracle.eigenvalues(i), run.oracle.level_residuals(i)});
  }
  out.result["sector"] = sector.name();
  out.result["rows"] = run.system.size();
  out.result["window"] = Json::array({run.window.first, run.window.second});
  out.result["accepted"] = accepted;
  out.result["spurious"] = spurious;
  out.result["poles"] = poles;
  out.result["oracle"] = oracle;
  out.result["max_pair_error"] = run.max_pair_error;
  const auto base = build_recurrence(preset, sector, run.system.N);
  const auto cmp = compare_printed_rows(base, {run.window.first, 0.5 * (run.window.first + run.window.second), run.window.second});
  Json pr;
  pr["available"] = cmp.available;
  if (cmp.available) {
    pr["max_diag_gap"] = cmp.max_diag_gap;
    pr["max_lower_gap"] = cmp.max_lower_gap;
    pr["max_upper_gap"] = cmp.max_upper_gap;
    pr["differing_rows"] = cmp.differing_rows.size();
  }
  out.result["printed_rows"] = pr;
  Json notes = Json::array();
  for (const auto& n : run.system.notes) notes.push_back(n);
  out.result["notes"] = notes;
  return out;
}

inline Output cmd_reconstruct(const RunConfig& c, const std::string& model, const std::map<std::string, Complex>& v) {
  if (model != "jt" && model != "dot" && model != "jc") throw UsageError("reconstruct supports jt, dot and jc");
  if (!c.energy) throw UsageError("reconstruct needs --energy");
  const PresetParams preset = make_preset(model, v);
  const Cutoff cut = resolve_cutoff(c, to_general(preset), 64);
  const FockBasis basis(cut);
  const auto sector = resolve_sector(c, model);
  auto system = build_recurrence(preset, sector, c.rows.value_or(max_rows_in_box(preset, sector, basis)));
  if (c.printed) system = system.printed();
  const ReconstructionContext ctx(system.params, basis);
  const double tol = c.tol.value_or(1e-8 * spectral_scale(system.params));
  Output out;
  out.result["sector"] = sector.name();
  out.result["energy"] = *c.energy;
  out.result["det_residual"] = evaluate_determinant(system, *c.energy).relative();
  out.table.columns = {"component", "n_a", "n_b", "re", "im"};
  try {
    const auto rec = reconstruct_spinor(ctx, system, *c.energy, null_vector(system, *c.energy));
    out.result["residual"] = rec.residual;
    out.result["status"] = rec.residual < tol ? "accepted" : "spurious";
    Json amps = Json::array();
    const Index d = basis.dim();
    for (Index i = 0; i < rec.spinor.size(); ++i) {
      if (std::abs(rec.spinor(i)) < 1e-15) continue;
      const auto [na, nb] = basis.occupation(i % d);
      Json j;
      j["component"] = i < d ? 1 : 2;
      j["n_a"] = na;
      j["n_b"] = nb;
      j["amplitude"] = complex_json(rec.spinor(i));
      amps.push_back(j);
      out.table.rows.push_back({i < d ? 1 : 2, na, nb, rec.spinor(i).real(), rec.spinor(i).imag()});
    }
    out.result["spinor"] = amps;
  } catch (const PoleError& e) {
    out.result["status"] = "pole";
    out.result["residual"] = std::numeric_limits<double>::infinity();
    out.result["notes"] = Json::array({e.what()});
  }
  return out;
}

inline Output cmd_converge(const RunConfig& c, const std::string& model, const std::map<std::string, Complex>& v) {
  if (model == "general") throw UsageError("converge needs a preset model");
  const PresetParams preset = make_preset(model, v);
  std::vector<int> cutoffs = c.cutoffs.empty() ? std::vector<int>{64, 128} : c.cutoffs;
  std::sort(cutoffs.begin(), cutoffs.end());
  cutoffs.erase(std::unique(cutoffs.begin(), cutoffs.end()), cutoffs.end());
  for (int n : cutoffs)
    if (n < 8) throw UsageError("cutoffs must be at least 8");
  const int level_count = c.levels.value_or(10);
  const bool two = two_mode_model(kind_of(preset));
  // Cutoffs are solved concurrently; assembly below is in cutoff order.
  std::vector<std::future<Spectrum>> jobs;
  for (int n : cutoffs)
    jobs.push_back(std::async(std::launch::async, [&, n] {
      return preset_lowest_levels(preset, two ? Cutoff::two_mode(n) : Cutoff::one_mode(n), level_count, true);
    }));
  std::map<int, Spectrum> solved;
  for (std::size_t i = 0; i < cutoffs.size(); ++i) solved[cutoffs[i]] = jobs[i].get();
  const auto table = convergence_study([&](int n, int) { return solved.at(n).eigenvalues; }, cutoffs, level_count,
                                       c.tol.value_or(1e-10));
  Output out;
  out.table.columns = {"n_max", "level", "energy", "residual", "delta", "converged"};
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json j;
    j["n_max"] = row.n_max;
    Json lv = Json::array();
    for (Index i = 0; i < row.levels.size(); ++i) {
      Json e;
      e["energy"] = row.levels(i);
      e["residual"] = solved.at(row.n_max).level_residuals(i);
      Json delta, conv;
      if (row.deltas.size()) {
        e["delta"] = row.deltas(i);
        e["converged"] = static_cast<bool>(row.converged[static_cast<std::size_t>(i)]);
        delta = row.deltas(i);
        conv = static_cast<bool>(row.converged[static_cast<std::size_t>(i)]);
      }
      lv.push_back(e);
      out.table.rows.push_back({row.n_max, static_cast<int>(i), row.levels(i), e["residual"], delta, conv});
    }
    j["levels"] = lv;
    if (row.deltas.size()) j["max_delta"] = row.max_delta;
    rows.push_back(j);
  }
  out.result["tolerance"] = table.tolerance;
  out.result["all_converged"] = table.all_converged();
  out.result["rows"] = rows;
  return out;
}

inline Output cmd_verify(const RunConfig& c) {
  VerifyOptions o;
  o.cutoff = c.cutoff.value_or(20);
  if (o.cutoff < 8) throw UsageError("cutoffs must be at least 8");
  o.tol = c.tol;
  const auto& suites = verify_suites();
  if (c.suite != "all" && std::none_of(suites.begin(), suites.end(), [&](const auto& s) { return s.first == c.suite; }))
    throw UsageError("unknown suite '" + c.suite + "'");
  Output out;
  out.table.columns = {"suite", "check", "value", "tolerance", "pass", "detail"};
  Json list = Json::array();
  Json failed = Json::array();
  for (const auto& [name, fn] : suites) {
    if (c.suite != "all" && c.suite != name) continue;
    const auto r = fn(o);
    Json s;
    s["suite"] = name;
    s["pass"] = r.pass();
    Json checks = Json::array();
    for (const auto& ch : r.checks) {
      Json j;
      j["name"] = ch.name;
      j["value"] = ch.value;
      j["tolerance"] = ch.tolerance;
      j["pass"] = ch.pass;
      if (!ch.detail.empty()) j["detail"] = ch.detail;
      checks.push_back(j);
      out.table.rows.push_back({name, ch.name, ch.value, ch.tolerance, ch.pass, ch.detail});
      if (!ch.pass) failed.push_back(name + ": " + ch.name);
    }
    s["checks"] = checks;
    Json notes = Json::array();
    for (const auto& n : r.notes) notes.push_back(n);
    s["notes"] = notes;
    list.push_back(s);
  }
  out.result["pass"] = failed.empty();
  out.result["failed"] = failed;
  out.result["suites"] = list;
  out.exit_code = failed.empty() ? kOk : kVerifyFailed;
  return out;
}

inline Json config_header(const RunConfig& c, const std::map<std::string, Complex>& values, const GeneralForm* form) {
  Json h;
  h["command"] = c.command;
  if (!c.model.empty()) {
    h["model"] = c.model;
    Json raw;
    for (const auto& [name, def] : model_fields(c.model)) {
      const Complex z = values.at(name);
      raw[name] = z.imag() == 0.0 ? Json(z.real()) : complex_json(z);
    }
    h["parameters"] = raw;
    if (form) h["normalized"] = normalized_json(*form);
  }
  if (c.cutoff) h["cutoff"] = *c.cutoff;
  if (c.cutoff_b) h["cutoff_b"] = *c.cutoff_b;
  if (!c.cutoffs.empty()) h["cutoffs"] = c.cutoffs;
  if (c.tol) h["tol"] = *c.tol;
  if (c.levels) h["levels"] = *c.levels;
  if (c.command == "verify") h["suite"] = c.suite;
  if (c.command == "closed-form") h["variant"] = c.variant;
  if (c.command == "recurrence" || c.command == "reconstruct") {
    if (c.k) h["k"] = *c.k;
    if (c.mirrored) h["mirrored"] = true;
    if (c.sector_charge) h["sector_charge"] = *c.sector_charge;
    if (c.sector) h["sector"] = *c.sector;
    if (c.rows) h["rows"] = *c.rows;
    if (c.printed) h["printed"] = true;
  }
  if (c.command == "recurrence") {
    if (!c.scan.empty()) h["scan"] = c.scan;
    h["grid"] = c.grid;
  }
  if (c.energy) h["energy"] = *c.energy;
  h["format"] = c.format;
  return h;
}

/// Runs a resolved configuration; the artifact goes to `os`.
inline int run(const RunConfig& c, std::ostream& os) {
  if (c.format != "json" && c.format != "csv") throw UsageError("--format must be json or csv");
  const std::vector<std::string> commands = {"spectrum", "closed-form", "recurrence", "verify", "converge", "reconstruct"};
  if (std::find(commands.begin(), commands.end(), c.command) == commands.end()) throw UsageError("unknown command '" + c.command + "'");

  std::map<std::string, Complex> values;
  std::optional<GeneralForm> form;
  if (c.command == "verify") {
    if (!c.model.empty() || !c.params.empty()) throw UsageError("verify takes no model or parameters");
  } else {
    if (c.model.empty()) throw UsageError("--model is required");
    values = resolve_params(c);
    form = general_form(c.model, values);
  }
  if (c.model == "general" && c.command != "spectrum") throw UsageError("the general model supports spectrum only");

  Output out;
  if (c.command == "verify") out = cmd_verify(c);
  else if (c.command == "spectrum") out = cmd_spectrum(c, c.model, *form, resolve_cutoff(c, *form, 64));
  else if (c.command == "closed-form") out = cmd_closed_form(c, c.model, values);
  else if (c.command == "recurrence") out = cmd_recurrence(c, c.model, values);
  else if (c.command == "converge") out = cmd_converge(c, c.model, values);
  else out = cmd_reconstruct(c, c.model, values);

  if (c.dump) {
    if (!form) throw UsageError("--dump needs a model");
    const int fallback = c.command == "closed-form" && c.model == "jc-rwa" ? 128 : c.model == "mjc" && c.command == "closed-form" ? 40 : 64;
    const FockBasis basis(resolve_cutoff(c, *form, fallback));
    std::ofstream f(*c.dump);
    if (!f) throw UsageError("cannot write " + *c.dump);
    write_matrix_json(f, build_hamiltonian(form->params, basis).assembled());
    out.result["dump"] = *c.dump;
  }

  const Json header = config_header(c, values, form ? &*form : nullptr);
  if (c.format == "json") {
    Json doc;
    doc["config"] = header;
    doc["result"] = out.result;
    write_json(os, doc);
    os << "\n";
  } else {
    write_csv(os, header, out);
  }
  return out.exit_code;
}

// ---------------------------------------------------------------------------
// Argument parsing

inline void merge_config_file(RunConfig& c, const std::string& path, const std::map<std::string, std::string>& flag_params,
                              const std::vector<std::string>& explicit_flags) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config " + path);
  Json j;
  try {
    j = Json::parse(f);
  } catch (const std::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  auto given = [&](const std::string& flag) {
    return std::find(explicit_flags.begin(), explicit_flags.end(), flag) != explicit_flags.end();
  };
  auto text = [](const Json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array() && v.size() == 2) return json_number(v[0].get<double>()) + "," + json_number(v[1].get<double>());
    if (v.is_number()) return json_number(v.get<double>());
    throw UsageError("config value " + v.dump() + " is not a number");
  };
  const auto fields = all_field_names();
  try {
    for (const auto& [key, val] : j.items()) {
      if (key == "command") {
        if (val.get<std::string>() != c.command) throw UsageError("config command differs from the subcommand");
      } else if (key == "model") {
        if (!given("model")) c.model = val.get<std::string>();
      } else if (key == "parameters" || key == "params") {
        for (const auto& [pk, pv] : val.items())
          if (!flag_params.count(pk)) c.params[pk] = text(pv);
      } else if (std::find(fields.begin(), fields.end(), key) != fields.end()) {
        if (!flag_params.count(key)) c.params[key] = text(val);
      } else if (key == "cutoff") {
        if (!given("cutoff")) c.cutoff = val.get<int>();
      } else if (key == "cutoff_b") {
        if (!given("cutoff-b")) c.cutoff_b = val.get<int>();
      } else if (key == "cutoffs") {
        if (!given("cutoffs")) c.cutoffs = val.get<std::vector<int>>();
      } else if (key == "format") {
        if (!given("format")) c.format = val.get<std::string>();
      } else if (key == "output") {
        if (!given("output")) c.output = val.get<std::string>();
      } else if (key == "tol") {
        if (!given("tol")) c.tol = val.get<double>();
      } else if (key == "suite") {
        if (!given("suite")) c.suite = val.get<std::string>();
      } else if (key == "variant") {
        if (!given("variant")) c.variant = val.get<std::string>();
      } else if (key == "levels") {
        if (!given("levels")) c.levels = val.get<int>();
      } else if (key == "k") {
        if (!given("k")) c.k = val.get<double>();
      } else if (key == "mirrored") {
        if (!given("mirrored")) c.mirrored = val.get<bool>();
      } else if (key == "sector_charge") {
        if (!given("sector-charge")) c.sector_charge = val.get<double>();
      } else if (key == "sector") {
        if (!given("sector")) c.sector = val.get<std::string>();
      } else if (key == "scan") {
        if (!given("scan")) c.scan = val.get<std::vector<double>>();
      } else if (key == "grid") {
        if (!given("grid")) c.grid = val.get<int>();
      } else if (key == "rows") {
        if (!given("rows")) c.rows = val.get<int>();
      } else if (key == "printed") {
        if (!given("printed")) c.printed = val.get<bool>();
      } else if (key == "energy") {
        if (!given("energy")) c.energy = val.get<double>();
      } else {
        throw UsageError("config key '" + key + "' is not recognized");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
}

inline constexpr const char* kDefaultsHelp =
    "Defaults: hbar = 1, m = m_star = mass = c = 1, mu_bohr = 1, charge = 1, g = 2, omega = omega0 = 1; "
    "couplings, fields and level splittings default to 0.";

/// Parses argv and runs. Returns the process exit code.
inline int main_entry(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Spectra and checks for two-level fermion / boson Hamiltonians"};
  app.footer(kDefaultsHelp);
  app.require_subcommand(1);
  RunConfig c;
  std::optional<std::string> config_path;
  const auto fields = all_field_names();
  std::map<std::string, std::optional<std::string>> field_values;
  for (const auto& f : fields) field_values[f];

  struct Spec {
    const char* name;
    const char* help;
  };
  const std::vector<Spec> subs = {
      {"spectrum", "Ascending eigenvalues with residuals"},
      {"closed-form", "Closed-form levels against diagonalization"},
      {"recurrence", "Determinant scan of a recurrence sector"},
      {"verify", "Run verification suites"},
      {"converge", "Lowest levels across cutoffs"},
      {"reconstruct", "Spinor reconstruction at one energy"},
  };
  std::vector<CLI::App*> handles;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    handles.push_back(sub);
    sub->add_option("--config", config_path, "JSON config; flags win on conflict");
    sub->add_option("--format", c.format, "json or csv");
    sub->add_option("--output", c.output, "Output file (default stdout)");
    sub->add_option("--tol", c.tol, "Tolerance override");
    const std::string cmd = s.name;
    if (cmd == "verify") {
      sub->add_option("--suite", c.suite, "algebra, shift, conserved, sp4, closed-form, recurrence or all");
      sub->add_option("--cutoff", c.cutoff, "Cutoff per mode (default 20)");
      continue;
    }
    sub->add_option("--model", c.model, "jt, dot, jc, jc-rwa, mjc, dirac or general");
    for (const auto& f : fields) sub->add_option("--" + f, field_values[f], "Model parameter");
    sub->add_option("--dump", c.dump, "Write the Hamiltonian matrix as JSON [re, im] pairs");
    sub->add_option("--levels", c.levels, "Number of levels");
    if (cmd == "converge") {
      sub->add_option("--cutoffs", c.cutoffs, "Cutoffs to compare (default 64 128)");
    } else {
      sub->add_option("--cutoff", c.cutoff, "Cutoff of mode a (and b unless --cutoff-b)");
      sub->add_option("--cutoff-b", c.cutoff_b, "Cutoff of mode b");
    }
    if (cmd == "closed-form") sub->add_option("--variant", c.variant, "printed, rederived or both");
    if (cmd == "recurrence" || cmd == "reconstruct") {
      sub->add_option("--k", c.k, "Bargmann index of the sector");
      sub->add_flag("--mirrored", c.mirrored, "Sector with n_a > n_b");
      sub->add_option("--sector-charge", c.sector_charge, "Sector by conserved charge value");
      sub->add_option("--sector", c.sector, "even or odd (jc)");
      sub->add_option("--rows", c.rows, "Recurrence rows (default: all inside the cutoff)");
      sub->add_flag("--printed", c.printed, "Use the printed recurrence coefficients");
    }
    if (cmd == "recurrence") {
      sub->add_option("--scan", c.scan, "Energy window lo hi")->expected(2);
      sub->add_option("--grid", c.grid, "Scan grid points");
    }
    if (cmd == "reconstruct") sub->add_option("--energy", c.energy, "Trial energy");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  c.command = chosen->get_name();
  std::map<std::string, std::string> flag_params;
  for (const auto& [k, v] : field_values)
    if (v) flag_params[k] = *v;
  c.params = flag_params;
  std::vector<std::string> explicit_flags;
  for (const auto* opt : chosen->get_options())
    if (opt->count() > 0) explicit_flags.push_back(opt->get_lnames().empty() ? "" : opt->get_lnames().front());

  try {
    if (config_path) merge_config_file(c, *config_path, flag_params, explicit_flags);
    if (c.output) {
      std::ofstream f(*c.output);
      if (!f) throw UsageError("cannot write " + *c.output);
      const int code = run(c, f);
      if (!f) throw UsageError("write to " + *c.output + " failed");
      return code;
    }
    return run(c, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace spinboson::cli
