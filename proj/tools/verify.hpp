#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spinboson/spinboson.hpp"

namespace spinboson::cli {

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

struct VerifyOptions {
  int cutoff = 20;
  std::optional<double> tol;  // replaces every per-check tolerance when set
};

namespace detail {

inline void below(SuiteResult& r, const VerifyOptions& o, std::string name, double value, double tol, std::string detail = {}) {
  const double t = o.tol.value_or(tol);
  r.checks.push_back({std::move(name), value, t, value < t, std::move(detail)});
}

inline void above(SuiteResult& r, std::string name, double value, double floor, std::string detail = {}) {
  r.checks.push_back({std::move(name), value, floor, value > floor, std::move(detail)});
}

inline void flag(SuiteResult& r, std::string name, bool ok, std::string detail = {}) {
  r.checks.push_back({std::move(name), ok ? 1.0 : 0.0, 1.0, ok, std::move(detail)});
}

inline std::vector<SectorLabel> labels_for(const GeneratorTriple& t) {
  using Kind = RealizationId::Kind;
  std::vector<SectorLabel> out;
  const auto& b = t.basis;
  switch (t.id.kind) {
    case Kind::Su2TwoMode:
      for (Index i = 0; i < b.dim(); ++i) {
        const auto [na, nb] = b.occupation(i);
        out.push_back(Su2Label{0.5 * (na + nb), 0.5 * (na - nb)});
      }
      break;
    case Kind::Su2Single: {
      const int two_j = static_cast<int>(std::lround(2.0 * t.id.param));
      for (int n = 0; n <= two_j; ++n) out.push_back(Su2Label{t.id.param, t.id.param - n});
      break;
    }
    case Kind::Su11TwoMode:
      for (Index i = 0; i < b.dim(); ++i) {
        const auto [na, nb] = b.occupation(i);
        if (nb >= na) out.push_back(Su11Label{0.5 * (nb - na + 1), na, false});
        else out.push_back(Su11Label{0.5 * (na - nb + 1), nb, true});
      }
      break;
    case Kind::Su11SingleL:
    case Kind::Sp4T:
      for (int occ = 0; occ <= b.n_max(Mode::a); ++occ) out.push_back(Su11Label{occ % 2 ? 0.75 : 0.25, occ / 2, false});
      break;
    case Kind::Su11SingleS:
      for (int n = 0; n <= b.n_max(Mode::a); ++n) out.push_back(Su11Label{t.id.param, n, false});
      break;
  }
  return out;
}

/// Casimir eigenvalue expected on the whole representation of a one-mode
/// realization.
inline double single_mode_casimir(const GeneratorTriple& t) {
  using Kind = RealizationId::Kind;
  switch (t.id.kind) {
    case Kind::Su2Single: return t.id.param * (t.id.param + 1.0);
    case Kind::Su11SingleS: return t.id.param * (1.0 - t.id.param);
    default: return 3.0 / 16.0;  // k = 1/4 and k = 3/4 share k(1-k)
  }
}

}  // namespace detail

inline SuiteResult suite_algebra(const VerifyOptions& o) {
  SuiteResult r{"algebra", {}, {}};
  const int n = o.cutoff;
  std::vector<RealizationId> ids = {RealizationId::su2_two_mode(), RealizationId::su11_two_mode(),
                                    RealizationId::su11_single_l(), RealizationId::sp4_t()};
  for (double j : {0.5, 1.0, 1.5, 2.0, 2.5})
    if (2.0 * j <= n) ids.push_back(RealizationId::su2_single(j));
  for (double k : {0.25, 0.5, 0.75, 1.0, 1.5}) ids.push_back(RealizationId::su11_single_s(k));

  for (const auto& id : ids) {
    const FockBasis basis(id.two_mode() ? Cutoff::two_mode(n) : Cutoff::one_mode(n));
    const auto t = build_realization(id, basis);
    const int margin = 2 * id.reach();
    const auto cr = verify_commutation_detail(t, margin);
    detail::below(r, o, id.name() + " commutators", std::max({cr.zero_plus, cr.zero_minus, cr.plus_minus, cr.counter}), 1e-10);
    detail::below(r, o, id.name() + " casimir commutes", cr.casimir, 1e-10);

    const ComplexMatrix p = verification_projector(t, margin);
    const ComplexMatrix expected = id.two_mode() ? casimir(t) : ComplexMatrix(detail::single_mode_casimir(t) * sparse_identity(basis.dim()));
    detail::below(r, o, id.name() + " casimir value", max_abs(ComplexMatrix(p * (casimir_from_generators(t) - expected) * p)), 1e-10);

    double worst = 0.0;
    int checked = 0;
    for (const auto& label : detail::labels_for(t)) {
      try {
        worst = std::max(worst, verify_state_action(t, label).max());
        ++checked;
      } catch (const std::out_of_range&) {
        // a ladder target leaves the cutoff
      }
    }
    detail::below(r, o, id.name() + " state actions", worst, 1e-10, std::to_string(checked) + " labelled states");
  }
  return r;
}

inline SuiteResult suite_shift(const VerifyOptions& o) {
  SuiteResult r{"shift", {}, {}};
  const FockBasis basis(Cutoff::one_mode(std::max(o.cutoff, 8)));
  const auto at_pole = shift_identity_check(basis, 1.0, 0.3, -0.7);
  detail::below(r, o, "a f(H0) = f(H0 + omega) a at E = -0.7", at_pole.plus_residual, 1e-12);
  detail::above(r, "a f(H0) = f(H0 - omega) a at E = -0.7 fails", at_pole.minus_residual, 1e-3);
  const auto clear = shift_outcome(1.0, 0.3, std::max(o.cutoff, 8));
  detail::below(r, o, "a f(H0) = f(H0 + omega) a, pole-free E", clear.plus_residual, 1e-12);
  detail::above(r, "a f(H0) = f(H0 - omega) a fails, pole-free E", clear.minus_residual, 1e-3);
  detail::below(r, o, "a+ f(H0) = f(H0 - omega) a+", clear.adjoint_minus_residual, 1e-12);
  detail::flag(r, "exactly one orientation holds", clear.holding_orientation == "+omega" && at_pole.holding_orientation == "+omega",
               clear.holding_orientation);
  r.notes = at_pole.notes;
  r.notes.push_back(shift_citation(clear));
  return r;
}

/// Presets with every coupling switched on.
inline std::vector<PresetParams> generic_presets() {
  JTParams jt;
  jt.kappa = 0.7;
  jt.mu_level = 0.3;
  DotParams dot;
  dot.lambda_R = 0.6;
  dot.B = 0.4;
  JCParams jc;
  jc.kappa = 0.4;
  jc.omega0 = 0.8;
  JCRWAParams rwa;
  rwa.kappa = 0.3;
  rwa.omega0 = 0.9;
  MJCParams mjc;
  mjc.lambda1 = 0.3;
  mjc.lambda2 = 0.4;
  mjc.omega0 = 0.7;
  DiracParams dirac;
  dirac.omega = 0.5;
  return {jt, dot, jc, rwa, mjc, dirac};
}

inline Cutoff preset_cutoff(const PresetParams& p, int n) {
  return two_mode_model(kind_of(p)) ? Cutoff::two_mode(n) : Cutoff::one_mode(n);
}

inline SuiteResult suite_conserved(const VerifyOptions& o) {
  SuiteResult r{"conserved", {}, {}};
  for (const auto& preset : generic_presets()) {
    const std::string name = model_name(kind_of(preset));
    const FockBasis basis(preset_cutoff(preset, o.cutoff));
    const auto form = to_general(preset);
    const auto build = build_hamiltonian(form.params, basis);
    const auto q = conserved_charge(kind_of(preset), basis);
    const ComplexMatrix h = build.assembled();
    detail::below(r, o, name + " [H, G]", charge_commutator(h, q.diagonal), 1e-13, q.description);

    const auto sectors = sector_decompose(build, q);
    Index total = 0;
    for (const auto& s : sectors) total += static_cast<Index>(s.indices.size());
    detail::flag(r, name + " sector dimensions sum to 2 dim", total == 2 * basis.dim(),
                 std::to_string(total) + " of " + std::to_string(2 * basis.dim()));
    if (!build.hermitian) continue;
    // Dense comparison on a smaller box for the two-mode models.
    const FockBasis small(preset_cutoff(preset, two_mode_model(kind_of(preset)) ? std::min(o.cutoff, 12) : o.cutoff));
    const auto small_build = build_hamiltonian(form.params, small);
    const auto full = eig_hermitian(DenseMatrix(small_build.assembled()), false);
    const auto merged = merge_sector_spectra(sector_spectra(sector_decompose(small_build, conserved_charge(kind_of(preset), small)), false));
    detail::below(r, o, name + " sector union equals full spectrum",
                  sorted_deviation(to_std(full.eigenvalues), to_std(merged.eigenvalues)), 1e-10);
  }
  return r;
}

inline SuiteResult suite_sp4(const VerifyOptions& o) {
  SuiteResult r{"sp4", {}, {}};
  const auto rep = product_decomposition_check(FockBasis(Cutoff::two_mode(o.cutoff)));
  for (const auto& id : rep.identities)
    detail::below(r, o, id.coupling + ": " + id.product + " = " + id.exact_form, id.exact_deviation, 1e-12);
  r.notes = rep.discrepancies;
  return r;
}

inline SuiteResult suite_closed_form(const VerifyOptions& o) {
  SuiteResult r{"closed-form", {}, {}};
  const int n = std::max(o.cutoff, 8);

  JCRWAParams rwa;
  rwa.omega0 = 0.8;
  rwa.kappa = 0.2;
  const auto jr = jcrwa_report(rwa, n, n / 2);
  detail::below(r, o, "jc-rwa rederived levels", jr.max_rederived_error, 1e-10, std::to_string(jr.rows.size()) + " levels");
  r.notes.push_back("jc-rwa printed form largest deviation " + format_number(jr.max_printed_error));

  DiracParams dirac;
  dirac.omega = 0.1;
  const auto dr = dirac_report(dirac, n);
  detail::below(r, o, "dirac closed form against sector oracle", dr.max_printed_error, 1e-10);

  for (auto [l1, l2] : {std::pair{0.3, 0.4}, std::pair{0.5, 0.0}}) {
    MJCParams mjc;
    mjc.omega0 = 0.7;
    mjc.lambda1 = l1;
    mjc.lambda2 = l2;
    const auto mr = mjc_report(mjc, n);
    const std::string tag = "mjc (" + format_number(l1) + ", " + format_number(l2) + ")";
    detail::below(r, o, tag + " rederived levels", mr.max_rederived_error, 1e-10);
    detail::flag(r, tag + " every rederived level matched", mr.match.complete());
  }
  MJCParams mixed, pure;
  mixed.omega0 = pure.omega0 = 0.7;
  mixed.lambda1 = 0.3;
  mixed.lambda2 = 0.4;
  pure.lambda1 = 0.5;
  const double window = n / 2.0;
  detail::below(r, o, "mjc spectrum depends on lambda1^2 + lambda2^2 only",
                sorted_deviation(mjc_levels_below(mixed, n, window), mjc_levels_below(pure, n, window)), 1e-10);
  const FockBasis two(Cutoff::two_mode(n));
  const auto rot = mjc_rotation(mixed, two);
  const auto rc = mjc_rotation_check(rot, two);
  detail::below(r, o, "mjc rotation unitary", rc.unitarity, 1e-10);
  detail::below(r, o, "mjc rotation identities", std::max(rc.transverse, rc.longitudinal), 1e-9,
                "margin " + std::to_string(rc.margin));

  JCParams jc;
  jc.kappa = 0.3;
  const auto gr = jc_ground_report(jc, n);
  detail::below(r, o, "jc lowest accepted recurrence root equals ground state", gr.max_rederived_error, 1e-8);
  for (const auto& s : gr.notes) r.notes.push_back(s);
  return r;
}

/// Models and couplings used for the recurrence checks.
inline std::vector<PresetParams> recurrence_presets() {
  JTParams jt;
  jt.kappa = 1.0;  // kappa' = 0.5
  jt.mu_level = 0.3;
  DotParams dot;
  dot.lambda_R = 1.0;  // lambda' = 0.5
  JCParams jc;
  jc.kappa = 0.5;
  return {jt, dot, jc};
}

inline SuiteResult suite_recurrence(const VerifyOptions& o) {
  SuiteResult r{"recurrence", {}, {}};
  for (const auto& preset : recurrence_presets()) {
    const std::string name = model_name(kind_of(preset));
    const FockBasis basis(preset_cutoff(preset, o.cutoff));
    const double top = o.cutoff / 2.0;
    const auto sum = recurrence_recovery(preset, basis, top);
    detail::below(r, o, name + " accepted roots lie on the spectrum", sum.max_pair_error, 1e-8,
                  std::to_string(sum.accepted) + " accepted, " + std::to_string(sum.spurious) + " spurious, " +
                      std::to_string(sum.poles) + " at poles");
    detail::flag(r, name + " oracle levels below " + format_number(top) + " recovered", sum.missed_untruncated() == 0,
                 std::to_string(sum.oracle_in_window - static_cast<int>(sum.missed.size())) + " of " +
                     std::to_string(sum.oracle_in_window) + " recovered, " + std::to_string(sum.missed_truncated.size()) +
                     " missed levels carry weight outside the recurrence rows");
  }
  return r;
}

using SuiteFn = std::function<SuiteResult(const VerifyOptions&)>;

/// Registry in fixed order.
inline const std::vector<std::pair<std::string, SuiteFn>>& verify_suites() {
  static const std::vector<std::pair<std::string, SuiteFn>> suites = {
      {"algebra", suite_algebra},     {"shift", suite_shift},
      {"conserved", suite_conserved}, {"sp4", suite_sp4},
      {"closed-form", suite_closed_form}, {"recurrence", suite_recurrence},
  };
  return suites;
}

}  // namespace spinboson::cli
