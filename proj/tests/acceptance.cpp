// Acceptance run: one PASS/FAIL line per criterion.
//   acceptance                 all criteria
//   acceptance --criterion N   criterion N only
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "spinboson/spinboson.hpp"
#include "verify.hpp"

using namespace spinboson;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
  std::vector<std::string> details;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Outcome algebra_suite() {
  const auto t0 = Clock::now();
  const auto r = cli::suite_algebra(cli::VerifyOptions{20, std::nullopt});
  const double dt = seconds_since(t0);
  double worst = 0.0;
  Outcome o;
  for (const auto& c : r.checks) {
    worst = std::max(worst, c.value);
    if (!c.pass) o.details.push_back("failed: " + c.name + " = " + sci(c.value));
  }
  o.pass = r.pass() && worst < 1e-10 && dt < 10.0;
  o.summary = std::to_string(r.checks.size()) + " checks at cutoff 20, max residual " + sci(worst) + ", " + sci(dt) + " s";
  return o;
}

Outcome shift_arbiter() {
  Outcome o;
  const auto at_pole = shift_identity_check(FockBasis(Cutoff::one_mode(20)), 1.0, 0.3, -0.7);
  const auto clear = shift_outcome(1.0, 0.3, 20);
  const bool plus_ok = at_pole.plus_residual < 1e-12 && clear.plus_residual < 1e-12;
  const bool minus_fails = at_pole.minus_residual > 1e-3 && clear.minus_residual > 1e-3;
  JCParams jc;
  const auto rep = jc_ground_report(jc, 32);
  const std::string citation = shift_citation(shift_outcome(jc.omega, jc.omega0 / 2.0));
  const bool cited = std::find(rep.notes.begin(), rep.notes.end(), citation) != rep.notes.end();
  o.pass = plus_ok && minus_fails && cited && clear.holding_orientation == "+omega";
  o.summary = "+omega residual " + sci(clear.plus_residual) + ", -omega residual " + sci(clear.minus_residual) +
              " (E=-0.7: " + sci(at_pole.minus_residual) + "), cited in JC report: " + (cited ? "yes" : "no");
  o.details = at_pole.notes;
  return o;
}

Outcome conserved_charges() {
  Outcome o;
  o.pass = true;
  double worst = 0.0;
  for (const auto& preset : cli::generic_presets())
    for (int n : {8, 13, 20, 64}) {
      const FockBasis basis(cli::preset_cutoff(preset, n));
      const auto h = build_hamiltonian(to_general(preset).params, basis).assembled();
      const double c = charge_commutator(h, conserved_charge(kind_of(preset), basis).diagonal);
      worst = std::max(worst, c);
      if (!(c < 1e-13)) {
        o.pass = false;
        o.details.push_back(std::string(model_name(kind_of(preset))) + " cutoff " + std::to_string(n) + ": " + sci(c));
      }
    }
  double worst_dev = 0.0;
  for (const auto& preset : cli::generic_presets()) {
    const auto form = to_general(preset);
    const FockBasis basis(cli::preset_cutoff(preset, 64));
    const auto build = build_hamiltonian(form.params, basis);
    if (!build.hermitian) continue;
    const auto t0 = Clock::now();
    const auto full = eig_hermitian(build.assembled(), false, basis.cutoff());
    const auto merged = merge_sector_spectra(sector_spectra(sector_decompose(build, conserved_charge(kind_of(preset), basis)), false));
    const double dev = sorted_deviation(to_std(full.eigenvalues), to_std(merged.eigenvalues));
    worst_dev = std::max(worst_dev, dev);
    o.details.push_back(std::string(model_name(kind_of(preset))) + ": dimension " + std::to_string(2 * basis.dim()) +
                        ", multiset deviation " + sci(dev) + " (" + full.residual_kind + ", " + sci(seconds_since(t0)) + " s)");
    if (!(dev < 1e-10)) o.pass = false;
  }
  o.summary = "max |[H,G]| " + sci(worst) + " over six presets and four cutoffs; sector union against full spectrum at cutoff 64: " + sci(worst_dev);
  return o;
}

Outcome jcrwa_closed_form() {
  Outcome o;
  JCRWAParams p;
  p.omega0 = 0.8;
  p.kappa = 0.2;
  const auto t0 = Clock::now();
  const auto rep = jcrwa_report(p, 128, 40);
  const double dt = seconds_since(t0);
  int printed_rows = 0;
  for (const auto& r : rep.rows) {
    if (r.printed) ++printed_rows;
    std::ostringstream s;
    s << r.label << ": rederived error " << sci(r.rederived_error());
    if (r.printed) s << ", printed deviation " << sci(r.printed_error());
    o.details.push_back(s.str());
  }
  o.pass = rep.rows.size() == 40 && rep.max_rederived_error < 1e-10 && rep.match.complete() && printed_rows >= 39 && dt < 30.0;
  o.summary = "40 lowest levels at cutoff 128, max rederived error " + sci(rep.max_rederived_error) +
              ", printed comparison on " + std::to_string(printed_rows) + " levels (max deviation " + sci(rep.max_printed_error) +
              "), " + sci(dt) + " s";
  return o;
}

Outcome dirac_closed_form() {
  Outcome o;
  DiracParams p;
  p.omega = 0.3;
  const auto rep = dirac_report(p, 51);
  int alternatives = 0;
  for (const auto& r : rep.rows)
    if (r.alternative) ++alternatives;
  o.pass = rep.rows.size() == 102 && rep.max_printed_error < 1e-10 && alternatives == 102;
  o.summary = "n = 0..50, " + std::to_string(rep.rows.size()) + " levels, max deviation from sector oracle " +
              sci(rep.max_printed_error) + ", Hermitian alternative on " + std::to_string(alternatives) + " levels";
  for (std::size_t i = 0; i < std::min<std::size_t>(4, rep.rows.size()); ++i) {
    const auto& r = rep.rows[i];
    std::ostringstream s;
    s << r.label << ": closed form " << *r.printed << ", oracle " << *r.oracle << ", alternative " << *r.alternative;
    o.details.push_back(s.str());
  }
  return o;
}

Outcome mjc_rotation_and_invariance() {
  Outcome o;
  MJCParams mixed, pure;
  mixed.lambda1 = 0.3;
  mixed.lambda2 = 0.4;
  pure.lambda1 = 0.5;
  mixed.omega0 = pure.omega0 = 0.7;
  const int n = 40;
  const double window = n / 2.0;
  const auto a = mjc_levels_below(mixed, n, window), b = mjc_levels_below(pure, n, window);
  const double dev = sorted_deviation(a, b);
  const FockBasis basis(Cutoff::two_mode(n));
  const auto rc = mjc_rotation_check(mjc_rotation(mixed, basis), basis);
  o.pass = dev < 1e-10 && rc.unitarity < 1e-10 && rc.transverse < 1e-9 && rc.longitudinal < 1e-9 && !a.empty();
  o.summary = std::to_string(a.size()) + " levels below " + sci(window) + " agree to " + sci(dev) + "; |O+O - 1| " +
              sci(rc.unitarity) + "; transformation identities " + sci(std::max(rc.transverse, rc.longitudinal)) +
              " (margin " + std::to_string(rc.margin) + ")";
  return o;
}

Outcome recurrence_recovery_all() {
  Outcome o;
  o.pass = true;
  std::vector<std::string> parts;
  for (const auto& preset : cli::recurrence_presets()) {
    const auto t0 = Clock::now();
    const auto form = to_general(preset);
    const double coupling = std::max(std::abs(form.params.kappa1), std::abs(form.params.gamma2));
    const FockBasis basis(cli::preset_cutoff(preset, 64));
    const auto sum = recurrence_recovery(preset, basis, 32.0);
    const double dt = seconds_since(t0);
    const bool ok = sum.max_pair_error < 1e-8 && sum.missed.empty() && dt < 60.0 && coupling <= 0.5 * form.params.omega1 + 1e-15;
    o.pass = o.pass && ok;
    o.details.push_back(std::string(model_name(kind_of(preset))) + ": coupling " + sci(coupling) + ", " +
                        std::to_string(sum.sectors) + " sectors, " + std::to_string(sum.accepted) + " accepted, " +
                        std::to_string(sum.spurious) + " spurious, " + std::to_string(sum.poles) + " at poles, max error " +
                        sci(sum.max_pair_error) + ", recovered " +
                        std::to_string(sum.oracle_in_window - static_cast<int>(sum.missed.size())) + "/" +
                        std::to_string(sum.oracle_in_window) + " below 32, " + sci(dt) + " s");
    for (const auto& [sec, x] : sum.missed) o.details.push_back("  missed " + sec + " " + sci(x));
  }
  o.summary = "JT, Dot (B=0) and JC at cutoff 64, window E <= hbar*omega*n_max/2";
  return o;
}

Outcome jc_ground_discrepancy() {
  Outcome o;
  JCParams p;
  p.kappa = 0.0;
  p.omega = p.omega0 = 1.0;
  const auto [plus, minus] = jc_ground_closed_form(p);
  const auto rep = jc_ground_report(p, 32);
  const double ground = rep.rows.front().oracle->real();
  const std::string expected_note = "JC ground-state closed form at kappa=0, omega=1, omega0=1 gives {" + format_number(plus) +
                                    ", " + format_number(minus) + "}; oracle ground state is " + format_number(ground);
  const bool note_present = std::find(rep.notes.begin(), rep.notes.end(), expected_note) != rep.notes.end();
  const bool literal = std::abs(plus - 0.0) < 1e-12 && std::abs(minus + 1.0) < 1e-12;
  const bool oracle_ok = std::abs(ground + 0.5) < 1e-12;
  o.pass = literal && oracle_ok && note_present;
  o.summary = "closed form at kappa=0 gives {" + format_number(plus) + ", " + format_number(minus) +
              "}, criterion expects {0, -1}; oracle ground " + format_number(ground) + "; report note present: " +
              (note_present ? "yes" : "no");
  o.details = rep.notes;
  return o;
}

Outcome sp4_products() {
  Outcome o;
  const auto rep = product_decomposition_check(FockBasis(Cutoff::two_mode(12)));
  o.pass = rep.max_exact_deviation < 1e-12 && !rep.discrepancies.empty();
  o.summary = std::to_string(rep.identities.size()) + " identities at cutoff 12, max deviation " + sci(rep.max_exact_deviation) +
              ", " + std::to_string(rep.discrepancies.size()) + " factor discrepancies listed";
  o.details = rep.discrepancies;
  return o;
}

Outcome convergence() {
  Outcome o;
  o.pass = true;
  JTParams jt;
  jt.kappa = 0.2;
  jt.mu_level = 0.3;
  DotParams dot;
  dot.lambda_R = 0.2;
  dot.B = 0.1;
  JCParams jc;
  jc.kappa = 0.1;
  MJCParams mjc;
  mjc.lambda1 = 0.1;
  mjc.lambda2 = 0.1;
  for (const PresetParams& preset : std::vector<PresetParams>{jt, dot, jc, mjc}) {
    const bool two = two_mode_model(kind_of(preset));
    const auto table = convergence_study(
        [&](int n, int count) {
          return preset_lowest_levels(preset, two ? Cutoff::two_mode(n) : Cutoff::one_mode(n), count, false).eigenvalues;
        },
        {64, 128}, 10, 1e-10);
    o.pass = o.pass && table.all_converged();
    o.details.push_back(std::string(model_name(kind_of(preset))) + ": max shift " + sci(table.rows.back().max_delta));
  }
  o.summary = "10 lowest levels between cutoffs 64 and 128";
  return o;
}

const std::vector<std::pair<const char*, std::function<Outcome()>>> kCriteria = {
    {"algebra suite", algebra_suite},
    {"shift arbiter", shift_arbiter},
    {"conserved charges", conserved_charges},
    {"JC-RWA closed form", jcrwa_closed_form},
    {"Dirac oscillator closed form", dirac_closed_form},
    {"MJC rotation and invariance", mjc_rotation_and_invariance},
    {"recurrence root recovery", recurrence_recovery_all},
    {"JC ground-state closed form at kappa=0", jc_ground_discrepancy},
    {"sp(4,R) product identities", sp4_products},
    {"cutoff convergence", convergence},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  bool verbose = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    else if (std::strcmp(argv[i], "--verbose") == 0) verbose = true;
    else {
      std::cerr << "usage: acceptance [--criterion N] [--verbose]\n";
      return 1;
    }
  }
  if (only < 0 || only > static_cast<int>(kCriteria.size())) {
    std::cerr << "criterion must be 1.." << kCriteria.size() << "\n";
    return 1;
  }
  int failed = 0;
  for (std::size_t i = 0; i < kCriteria.size(); ++i) {
    if (only && static_cast<int>(i + 1) != only) continue;
    Outcome o;
    try {
      o = kCriteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("exception: ") + e.what();
    }
    std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << i + 1 << " (" << kCriteria[i].first << "): " << o.summary << "\n";
    if (verbose || only || !o.pass)
      for (const auto& d : o.details) std::cout << "       " << d << "\n";
    if (!o.pass) ++failed;
  }
  return failed ? 1 : 0;
}
