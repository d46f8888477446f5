#pragma once

// Component elimination for the two-level Hamiltonian. Writing
// psi = (psi1, psi2), the lower component is
//   psi2 = -(H0 - E + beta)^-1 (gamma1 a + gamma2 a+ + gamma3 b + gamma4 b+) psi1
// and substituting back gives, after clearing the shifted resolvents,
//   F+ F- F0 psi1 = F- A psi1 + F+ B psi1
// with F+- = H0 - E + beta +- omega, F0 = H0 - E - beta,
//   A = (kappa1 a + kappa3 b) L,  B = (kappa2 a+ + kappa4 b+) L.
// On a conserved sector A and B are tridiagonal, which gives a three-term
// recurrence whose row coefficients are polynomials in E.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "spinboson/liealg.hpp"
#include "spinboson/solver.hpp"

namespace spinboson {

/// Real polynomial in E, c[k] multiplies E^k.
struct Poly {
  std::vector<double> c;

  Poly() = default;
  Poly(std::initializer_list<double> coeffs) : c(coeffs) {}
  static Poly constant(double x) { return Poly{x}; }
  /// x - E
  static Poly shifted(double x) { return Poly{x, -1.0}; }

  double operator()(double e) const {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * e + *it;
    return v;
  }
  int degree() const {
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
      if (c[static_cast<std::size_t>(k)] != 0.0) return k;
    return -1;
  }
  Poly operator*(const Poly& o) const {
    Poly p;
    if (c.empty() || o.c.empty()) return p;
    p.c.assign(c.size() + o.c.size() - 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < o.c.size(); ++j) p.c[i + j] += c[i] * o.c[j];
    return p;
  }
  Poly operator*(double s) const {
    Poly p = *this;
    for (auto& x : p.c) x *= s;
    return p;
  }
  Poly operator+(const Poly& o) const {
    Poly p;
    p.c.assign(std::max(c.size(), o.c.size()), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) p.c[i] += c[i];
    for (std::size_t i = 0; i < o.c.size(); ++i) p.c[i] += o.c[i];
    return p;
  }
  Poly operator-(const Poly& o) const { return *this + o * -1.0; }
};

struct RecurrenceSector {
  enum class Kind { su11, jc_even, jc_odd };
  Kind kind = Kind::su11;
  double k = 0.5;
  bool mirrored = false;

  static RecurrenceSector su11(double k, bool mirrored = false) { return {Kind::su11, k, mirrored}; }
  static RecurrenceSector jc_even() { return {Kind::jc_even, 0.25, false}; }
  static RecurrenceSector jc_odd() { return {Kind::jc_odd, 0.75, false}; }

  /// Sector of a two-mode charge value g = n_a - n_b + 1/2 on the upper
  /// component.
  static RecurrenceSector from_charge(double g) {
    if (!is_half_integer_multiple(g) || std::lround(2.0 * g) % 2 == 0)
      throw std::invalid_argument("two-mode sector charge must be a half-odd integer");
    return g <= 0.5 ? su11((1.5 - g) / 2.0, false) : su11((g + 0.5) / 2.0, true);
  }

  std::string name() const {
    if (kind == Kind::jc_even) return "even";
    if (kind == Kind::jc_odd) return "odd";
    return "k=" + format_number(k) + (mirrored ? " mirrored" : "");
  }

  /// Upper-component occupation of row n.
  std::pair<int, int> state(int n) const {
    switch (kind) {
      case Kind::jc_even: return {2 * n, 0};
      case Kind::jc_odd: return {2 * n + 1, 0};
      case Kind::su11: {
        const int shift = static_cast<int>(std::lround(2.0 * k - 1.0));
        return mirrored ? std::pair{n + shift, n} : std::pair{n, n + shift};
      }
    }
    return {0, 0};
  }
};

struct RecurrenceRow {
  Poly diag, lower, upper;  // coefficients of psi_n, psi_{n-1}, psi_{n+1}
};

struct RecurrenceSystem {
  ModelKind model = ModelKind::jt;
  RecurrenceSector sector;
  int N = 0;  // rows 0..N
  GeneralParams params;
  double omega = 0.0;
  double charge = 0.0;  // conserved-charge value of the sector
  std::vector<std::pair<int, int>> states;
  std::vector<double> energies;  // H0 on each row state
  std::vector<RecurrenceRow> rows;
  std::optional<std::vector<RecurrenceRow>> printed_rows;
  std::vector<std::string> notes;

  int size() const { return N + 1; }

  Eigen::MatrixXd matrix(double e, bool printed = false) const {
    const auto& r = printed ? *printed_rows : rows;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size(), size());
    for (int n = 0; n <= N; ++n) {
      m(n, n) = r[static_cast<std::size_t>(n)].diag(e);
      if (n > 0) m(n, n - 1) = r[static_cast<std::size_t>(n)].lower(e);
      if (n < N) m(n, n + 1) = r[static_cast<std::size_t>(n)].upper(e);
    }
    return m;
  }

  /// Energies where one of the row factors F+, F-, F0 vanishes.
  std::vector<double> factor_zeros() const {
    std::vector<double> z;
    for (double e : energies) {
      z.push_back(e + params.beta + omega);
      z.push_back(e + params.beta - omega);
      z.push_back(e - params.beta);
    }
    std::sort(z.begin(), z.end());
    z.erase(std::unique(z.begin(), z.end()), z.end());
    return z;
  }

  /// Copy whose rows are the printed ones.
  RecurrenceSystem printed() const {
    if (!printed_rows) throw std::logic_error("no printed recurrence for this sector");
    RecurrenceSystem s = *this;
    s.rows = *printed_rows;
    s.notes.push_back("rows replaced by the printed coefficients");
    return s;
  }
};

namespace detail {

using Occ = std::pair<int, int>;
using Ket = std::map<Occ, Complex>;

inline Ket apply_ladder(const Ket& in, Mode mode, bool raise, Complex coeff) {
  Ket out;
  if (coeff == Complex(0.0)) return out;
  for (const auto& [occ, amp] : in) {
    auto [na, nb] = occ;
    int& n = mode == Mode::a ? na : nb;
    if (raise) {
      const double f = std::sqrt(static_cast<double>(n + 1));
      ++n;
      out[{na, nb}] += coeff * amp * f;
    } else {
      if (n == 0) continue;
      const double f = std::sqrt(static_cast<double>(n));
      --n;
      out[{na, nb}] += coeff * amp * f;
    }
  }
  return out;
}

inline void accumulate(Ket& into, const Ket& add) {
  for (const auto& [occ, amp] : add) into[occ] += amp;
}

/// gamma1 a + gamma2 a+ + gamma3 b + gamma4 b+ without truncation.
inline Ket apply_lower_coupling(const GeneralParams& g, const Ket& k) {
  Ket out;
  accumulate(out, apply_ladder(k, Mode::a, false, g.gamma1));
  accumulate(out, apply_ladder(k, Mode::a, true, g.gamma2));
  accumulate(out, apply_ladder(k, Mode::b, false, g.gamma3));
  accumulate(out, apply_ladder(k, Mode::b, true, g.gamma4));
  return out;
}

inline Ket apply_upper_lowering(const GeneralParams& g, const Ket& k) {
  Ket out;
  accumulate(out, apply_ladder(k, Mode::a, false, g.kappa1));
  accumulate(out, apply_ladder(k, Mode::b, false, g.kappa3));
  return out;
}

inline Ket apply_upper_raising(const GeneralParams& g, const Ket& k) {
  Ket out;
  accumulate(out, apply_ladder(k, Mode::a, true, g.kappa2));
  accumulate(out, apply_ladder(k, Mode::b, true, g.kappa4));
  return out;
}

}  // namespace detail

inline double spectral_scale(const GeneralParams& g) {
  return std::max({1.0, std::abs(g.omega1), std::abs(g.omega2), std::abs(g.beta)});
}

/// Charge of the sector on the conserved charge of the model.
inline double recurrence_charge(ModelKind model, const RecurrenceSector& sector) {
  const auto [na, nb] = sector.state(0);
  if (model == ModelKind::jc) return na % 2 == 0 ? 1.0 : -1.0;
  return na - nb + 0.5;
}

/// Recurrence for JT, Dot (equal mode frequencies) or JC on one sector with
/// rows 0..N.
inline RecurrenceSystem build_recurrence(const PresetParams& preset, const RecurrenceSector& sector, int N) {
  const ModelKind model = kind_of(preset);
  if (model != ModelKind::jt && model != ModelKind::dot && model != ModelKind::jc)
    throw std::invalid_argument("build_recurrence: model must be jt, dot or jc");
  if (N < 0) throw std::invalid_argument("build_recurrence: N must be non-negative");
  const bool jc = model == ModelKind::jc;
  if (jc != (sector.kind != RecurrenceSector::Kind::su11))
    throw std::invalid_argument("build_recurrence: JC takes the even/odd sectors, JT and Dot take su(1,1) sectors");
  if (!jc) {
    const double shift = 2.0 * sector.k - 1.0;
    if (shift < -1e-12 || std::abs(shift - std::round(shift)) > 1e-12)
      throw std::invalid_argument("build_recurrence: 2k - 1 must be a non-negative integer");
  }
  const auto form = to_general(preset);
  const GeneralParams& g = form.params;
  if (!jc && std::abs(g.omega1 - g.omega2) > 1e-14 * std::max(1.0, std::abs(g.omega1)))
    throw std::invalid_argument("build_recurrence: unequal mode frequencies (magnetic splitting) are not supported");
  auto is_real = [](Complex z) { return z.imag() == 0.0; };
  if (!(is_real(g.kappa1) && is_real(g.kappa2) && is_real(g.kappa3) && is_real(g.kappa4) && is_real(g.gamma1) &&
        is_real(g.gamma2) && is_real(g.gamma3) && is_real(g.gamma4)))
    throw std::invalid_argument("build_recurrence: couplings must be real");

  RecurrenceSystem s;
  s.model = model;
  s.sector = sector;
  s.N = N;
  s.params = g;
  s.omega = g.omega1;
  s.charge = recurrence_charge(model, sector);
  std::map<detail::Occ, int> row_of;
  for (int n = 0; n <= N + 1; ++n) {
    const auto occ = sector.state(n);
    row_of[occ] = n;
    if (n <= N) {
      s.states.push_back(occ);
      s.energies.push_back(g.omega1 * occ.first + g.omega2 * occ.second);
    }
  }

  // Matrix elements of A and B by exact ket actions.
  auto elements = [&](int m, bool lowering) {
    detail::Ket k{{sector.state(m), Complex(1.0)}};
    const auto lk = detail::apply_lower_coupling(g, k);
    const auto out = lowering ? detail::apply_upper_lowering(g, lk) : detail::apply_upper_raising(g, lk);
    std::map<int, double> col;
    for (const auto& [occ, amp] : out) {
      if (std::abs(amp) < 1e-300) continue;
      const auto it = row_of.find(occ);
      if (it == row_of.end() || std::abs(it->second - m) > 1)
        throw std::logic_error("build_recurrence: coupling leaves the sector or the three-term band");
      col[it->second] += amp.real();
    }
    return col;
  };
  std::vector<std::map<int, double>> a_cols, b_cols;
  for (int m = 0; m <= N; ++m) {
    a_cols.push_back(elements(m, true));
    b_cols.push_back(elements(m, false));
  }
  auto elem = [](const std::vector<std::map<int, double>>& cols, int row, int col) {
    if (col < 0 || col >= static_cast<int>(cols.size())) return 0.0;
    const auto it = cols[static_cast<std::size_t>(col)].find(row);
    return it == cols[static_cast<std::size_t>(col)].end() ? 0.0 : it->second;
  };

  const double beta = g.beta, w = s.omega;
  for (int n = 0; n <= N; ++n) {
    const double e = s.energies[static_cast<std::size_t>(n)];
    const Poly fp = Poly::shifted(e + beta + w), fm = Poly::shifted(e + beta - w), f0 = Poly::shifted(e - beta);
    RecurrenceRow r;
    r.diag = fp * fm * f0 - fm * elem(a_cols, n, n) - fp * elem(b_cols, n, n);
    r.lower = (fm * elem(a_cols, n, n - 1) + fp * elem(b_cols, n, n - 1)) * -1.0;
    r.upper = (fm * elem(a_cols, n, n + 1) + fp * elem(b_cols, n, n + 1)) * -1.0;
    s.rows.push_back(std::move(r));
  }

  // Printed coefficients, available for the even JC sector and the
  // unmirrored su(1,1) sectors.
  const double c2 = (g.kappa1 * g.gamma2).real();
  if (sector.kind == RecurrenceSector::Kind::jc_even || (sector.kind == RecurrenceSector::Kind::su11 && !sector.mirrored)) {
    std::vector<RecurrenceRow> printed;
    const double k = sector.k;
    for (int n = 0; n <= N; ++n) {
      const double e = s.energies[static_cast<std::size_t>(n)];
      const Poly fp = Poly::shifted(e + beta + w), fm = Poly::shifted(e + beta - w), f0 = Poly::shifted(e - beta);
      double dp, dm, lo, up;
      if (jc) {
        dp = 2.0 * n + 1.0;
        dm = 2.0 * n;
        lo = std::sqrt(2.0 * n * (2.0 * n - 1.0));
        up = std::sqrt((2.0 * n + 1.0) * (2.0 * n + 2.0));
      } else {
        dp = model == ModelKind::dot ? n + 0.5 : n + 1.0;
        dm = 2.0 * k + n - 1.0;
        lo = std::sqrt((2.0 * k + n - 1.0) * n);
        up = std::sqrt((2.0 * k + n) * (n + 1.0));
      }
      RecurrenceRow r;
      r.diag = fp * fm * f0 - (fp * dp + fm * dm) * c2;
      r.lower = fp * (-c2 * lo);
      r.upper = fm * (-c2 * up);
      printed.push_back(std::move(r));
    }
    s.printed_rows = std::move(printed);
  } else {
    s.notes.push_back("no printed recurrence exists for this sector; rederived rows only");
  }
  s.notes.push_back("rows rederived from exact ladder actions using a f(H0) = f(H0 + omega) a");
  return s;
}

/// Largest N for which every row state and every lower-component state it
/// couples to lies inside the basis.
inline int max_rows_in_box(const PresetParams& preset, const RecurrenceSector& sector, const FockBasis& basis) {
  const auto g = to_general(preset).params;
  int last = -1;
  for (int n = 0;; ++n) {
    const auto occ = sector.state(n);
    if (!basis.contains(occ.first, occ.second)) break;
    const auto lk = detail::apply_lower_coupling(g, detail::Ket{{occ, Complex(1.0)}});
    bool inside = true;
    for (const auto& [o, amp] : lk)
      if (amp != Complex(0.0) && !basis.contains(o.first, o.second)) inside = false;
    if (!inside) break;
    last = n;
  }
  if (last < 0) throw std::invalid_argument("sector " + sector.name() + " has no rows inside the cutoff");
  return last;
}

struct DeterminantValue {
  int sign = 0;
  double log_abs = -std::numeric_limits<double>::infinity();
  double log_row_norms = 0.0;  // sum of log row 1-norms
  /// |D| / prod(row 1-norms)
  double relative() const { return sign == 0 ? 0.0 : std::exp(log_abs - log_row_norms); }
};

/// D_n = d_n D_{n-1} - l_n u_{n-1} D_{n-2}, rescaled after each step by a
/// positive factor. Optional positive row scales multiply the rows first.
inline DeterminantValue evaluate_determinant(const RecurrenceSystem& s, double e,
                                             const std::vector<double>* row_scales = nullptr) {
  DeterminantValue v;
  double prev2 = 0.0, prev1 = 1.0, log_scale = 0.0;
  double prev_upper = 0.0;
  for (int n = 0; n <= s.N; ++n) {
    const auto& r = s.rows[static_cast<std::size_t>(n)];
    const double sc = row_scales ? (*row_scales)[static_cast<std::size_t>(n)] : 1.0;
    const double d = sc * r.diag(e);
    const double l = n > 0 ? sc * r.lower(e) : 0.0;
    const double u = n < s.N ? sc * r.upper(e) : 0.0;
    v.log_row_norms += std::log(std::max(std::abs(d) + std::abs(l) + std::abs(u), std::numeric_limits<double>::min()));
    const double cur = d * prev1 - l * prev_upper * prev2;
    prev2 = prev1;
    prev1 = cur;
    prev_upper = u;
    const double m = std::max(std::abs(prev1), std::abs(prev2));
    if (m > 0.0 && std::isfinite(m)) {
      prev1 /= m;
      prev2 /= m;
      log_scale += std::log(m);
    }
  }
  v.sign = prev1 > 0.0 ? 1 : prev1 < 0.0 ? -1 : 0;
  v.log_abs = v.sign == 0 ? -std::numeric_limits<double>::infinity() : log_scale + std::log(std::abs(prev1));
  return v;
}

enum class RootStatus { unclassified, accepted, spurious, pole };

inline const char* status_name(RootStatus s) {
  switch (s) {
    case RootStatus::unclassified: return "unclassified";
    case RootStatus::accepted: return "accepted";
    case RootStatus::spurious: return "spurious";
    case RootStatus::pole: return "pole";
  }
  return "?";
}

struct RootCandidate {
  double energy = 0.0;
  double det_residual = 0.0;
  std::optional<double> spinor_residual;
  RootStatus status = RootStatus::unclassified;
};

/// Sign scan of D_N(E) on a uniform grid, bisection on each bracket. Nodes
/// are added just either side of every row-factor zero so a root sitting
/// closer than one grid step to such a zero keeps its own bracket.
inline std::vector<RootCandidate> det_scan_roots(const RecurrenceSystem& s, double e_min, double e_max, int grid,
                                                 double refine_tol = 1e-13) {
  if (grid < 2) throw std::invalid_argument("det_scan_roots: grid needs at least two points");
  if (!(std::isfinite(e_min) && std::isfinite(e_max)) || e_max <= e_min)
    throw std::invalid_argument("det_scan_roots: invalid energy window");
  const double step = (e_max - e_min) / (grid - 1);
  std::vector<double> nodes;
  nodes.reserve(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) nodes.push_back(i == grid - 1 ? e_max : e_min + i * step);
  const double gap = 1e-9 * spectral_scale(s.params);
  for (double z : s.factor_zeros())
    for (double e : {z - gap, z + gap})
      if (e > e_min && e < e_max) nodes.push_back(e);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  std::vector<RootCandidate> out;
  auto push = [&](double e) {
    out.push_back({e, evaluate_determinant(s, e).relative(), std::nullopt, RootStatus::unclassified});
  };
  double e_prev = nodes.front();
  int sign_prev = evaluate_determinant(s, e_prev).sign;
  if (sign_prev == 0) push(e_prev);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double e_cur = nodes[i];
    const int sign_cur = evaluate_determinant(s, e_cur).sign;
    if (sign_cur == 0) {
      push(e_cur);
    } else if (sign_prev != 0 && sign_cur != sign_prev) {
      double lo = e_prev, hi = e_cur;
      int sign_lo = sign_prev;
      const double tol = refine_tol * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const int sm = evaluate_determinant(s, mid).sign;
        if (sm == 0) {
          lo = hi = mid;
          break;
        }
        if (sm == sign_lo) lo = mid;
        else hi = mid;
      }
      push(0.5 * (lo + hi));
    }
    e_prev = e_cur;
    sign_prev = sign_cur;
  }
  return out;
}

/// Right singular vector of the smallest singular value of M(E).
inline Eigen::VectorXd null_vector(const RecurrenceSystem& s, double e) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.matrix(e), Eigen::ComputeFullV);
  const Index last = svd.singularValues().size() - 1;
  return svd.matrixV().col(last);
}

/// Box quantities shared by every reconstruction in one sector.
struct ReconstructionContext {
  FockBasis basis;
  GeneralParams params;
  ComplexMatrix hamiltonian;  // full spinor matrix, no constant offset
  ComplexMatrix lower;        // gamma-coupling block

  ReconstructionContext(const GeneralParams& g, const FockBasis& b) : basis(b), params(g) {
    const auto h = build_hamiltonian(g, b);
    hamiltonian = h.assembled();
    lower = h.spinor.blocks[1][0];
  }
};

struct Reconstruction {
  DenseVector spinor;  // normalized (psi1, psi2)
  double residual = 0.0;
};

/// psi2 = -(H0 - E + beta)^-1 L psi1 from upper-component amplitudes on the
/// sector rows, then |(H - E) psi| for the normalized spinor.
inline Reconstruction reconstruct_spinor(const ReconstructionContext& ctx, const RecurrenceSystem& s, double e,
                                         const Eigen::VectorXd& amplitudes) {
  if (amplitudes.size() != s.size()) throw DimensionError("reconstruct_spinor: amplitude count differs from row count");
  const Index d = ctx.basis.dim();
  DenseVector psi1 = DenseVector::Zero(d);
  for (int n = 0; n <= s.N; ++n) {
    const auto [na, nb] = s.states[static_cast<std::size_t>(n)];
    if (!ctx.basis.contains(na, nb)) throw std::out_of_range("reconstruct_spinor: row state outside the basis");
    psi1(ctx.basis.index_of(na, nb)) = amplitudes(n);
  }
  const DenseVector coupled = ctx.lower * psi1;
  const DenseVector psi2 = -resolvent_apply(ctx.params.omega1, ctx.params.omega2, ctx.params.beta, e, coupled, ctx.basis);
  Reconstruction r;
  r.spinor.resize(2 * d);
  r.spinor << psi1, psi2;
  const double norm = r.spinor.norm();
  if (norm == 0.0) throw std::runtime_error("reconstruct_spinor: zero spinor");
  r.spinor /= norm;
  r.residual = (ctx.hamiltonian * r.spinor - e * r.spinor).norm();
  return r;
}

/// Classifies candidates by reconstruction residual. With a Hermitian H an
/// accepted root lies within its residual of an eigenvalue.
inline std::vector<RootCandidate> filter_spurious(std::vector<RootCandidate> candidates, const RecurrenceSystem& s,
                                                  const ReconstructionContext& ctx, std::optional<double> residual_tol = {}) {
  const double tol = residual_tol.value_or(1e-8 * spectral_scale(s.params));
  for (auto& c : candidates) {
    try {
      const auto rec = reconstruct_spinor(ctx, s, c.energy, null_vector(s, c.energy));
      c.spinor_residual = rec.residual;
      c.status = rec.residual < tol ? RootStatus::accepted : RootStatus::spurious;
    } catch (const PoleError&) {
      c.status = RootStatus::pole;
    }
  }
  return candidates;
}

struct SectorOracle {
  Sector sector;
  Spectrum spectrum;
};

/// Charge block of the box Hamiltonian that contains the recurrence sector
/// (constant offset excluded), diagonalized with vectors.
inline SectorOracle sector_oracle(const PresetParams& preset, const RecurrenceSector& sector, const FockBasis& basis) {
  const ModelKind model = kind_of(preset);
  const auto form = to_general(preset);
  const auto h = build_hamiltonian(form.params, basis);
  if (!h.hermitian) throw NonHermitianError("sector_oracle: model is not Hermitian");
  const double target = recurrence_charge(model, sector);
  for (auto& sec : sector_decompose(h, conserved_charge(model, basis)))
    if (std::abs(sec.charge - target) < 1e-9) {
      auto spec = eig_hermitian(DenseMatrix(sec.matrix), true, basis.cutoff());
      return {std::move(sec), std::move(spec)};
    }
  return {};
}

inline Spectrum sector_direct_eigs(const PresetParams& preset, const RecurrenceSector& sector, const FockBasis& basis) {
  return sector_oracle(preset, sector, basis).spectrum;
}

inline std::pair<double, double> jc_ground_closed_form(const JCParams& p) {
  const double root = std::sqrt(4.0 * p.kappa * p.kappa + p.hbar * p.hbar * (p.omega - p.omega0) * (p.omega - p.omega0));
  return {0.5 * (-p.hbar * p.omega + root), 0.5 * (-p.hbar * p.omega - root)};
}

struct RecurrenceOptions {
  std::optional<std::pair<double, double>> window;
  int grid = 20000;
  double refine_tol = 1e-14;
  std::optional<double> residual_tol;
  std::optional<int> rows;  // default: max_rows_in_box
  bool printed = false;     // scan the printed rows instead of the rederived ones
};

struct RecurrenceRun {
  RecurrenceSystem system;
  std::pair<double, double> window;
  std::vector<RootCandidate> candidates;
  Spectrum oracle;
  /// Per oracle level, |(H - E) v_out| where v_out is the part of the
  /// eigenvector on sector states the recurrence rows cannot reach. This is
  /// the residual the best reconstruction can achieve; at or above the
  /// filter tolerance the level is limited by the row truncation.
  RealVector oracle_tail;
  /// Largest distance from an accepted root to the nearest oracle value.
  double max_pair_error = 0.0;

  std::vector<double> with_status(RootStatus st) const {
    std::vector<double> v;
    for (const auto& c : candidates)
      if (c.status == st) v.push_back(c.energy);
    return v;
  }
};

inline RecurrenceRun run_recurrence(const PresetParams& preset, const RecurrenceSector& sector, const FockBasis& basis,
                                    const RecurrenceOptions& opt = {}) {
  const int n_rows = opt.rows.value_or(max_rows_in_box(preset, sector, basis));
  auto direct = sector_oracle(preset, sector, basis);
  RecurrenceRun run{build_recurrence(preset, sector, n_rows), {}, {}, std::move(direct.spectrum), {}, 0.0};
  if (opt.printed) run.system = run.system.printed();
  if (opt.window) {
    run.window = *opt.window;
  } else {
    if (run.oracle.eigenvalues.size() == 0) throw std::runtime_error("run_recurrence: empty oracle sector, give a window");
    run.window = {run.oracle.eigenvalues.minCoeff() - 1.0, run.oracle.eigenvalues.maxCoeff() + 1.0};
  }
  const ReconstructionContext ctx(run.system.params, basis);
  {
    const Index d = basis.dim();
    std::vector<bool> support(static_cast<std::size_t>(2 * d), false);
    DenseVector rows_upper = DenseVector::Zero(d);
    for (const auto& [na, nb] : run.system.states) {
      support[static_cast<std::size_t>(basis.index_of(na, nb))] = true;
      rows_upper(basis.index_of(na, nb)) = 1.0;
    }
    const DenseVector reach = ctx.lower.cwiseAbs() * rows_upper;
    for (Index i = 0; i < d; ++i)
      if (std::abs(reach(i)) > 0.0) support[static_cast<std::size_t>(d + i)] = true;
    const auto& vecs = *run.oracle.eigenvectors;
    const DenseMatrix hs(direct.sector.matrix);
    run.oracle_tail = RealVector::Zero(vecs.cols());
    for (Index j = 0; j < vecs.cols(); ++j) {
      DenseVector out = vecs.col(j);
      for (std::size_t k = 0; k < direct.sector.indices.size(); ++k)
        if (support[static_cast<std::size_t>(direct.sector.indices[k])]) out(static_cast<Index>(k)) = 0.0;
      run.oracle_tail(j) = (hs * out - run.oracle.eigenvalues(j) * out).norm();
    }
  }
  run.candidates = filter_spurious(det_scan_roots(run.system, run.window.first, run.window.second, opt.grid, opt.refine_tol),
                                   run.system, ctx, opt.residual_tol);
  const auto oracle = to_std(run.oracle.eigenvalues);
  for (const auto& c : run.candidates) {
    if (c.status != RootStatus::accepted) continue;
    double best = std::numeric_limits<double>::infinity();
    for (double x : oracle) best = std::min(best, std::abs(x - c.energy));
    run.max_pair_error = std::max(run.max_pair_error, best);
  }
  return run;
}

/// Every recurrence sector with at least one row inside the basis.
inline std::vector<RecurrenceSector> recurrence_sectors(const PresetParams& preset, const FockBasis& basis) {
  std::vector<RecurrenceSector> out;
  const ModelKind model = kind_of(preset);
  std::vector<RecurrenceSector> all;
  if (model == ModelKind::jc) {
    all = {RecurrenceSector::jc_even(), RecurrenceSector::jc_odd()};
  } else if (model == ModelKind::jt || model == ModelKind::dot) {
    if (basis.modes() != 2) throw std::invalid_argument("recurrence_sectors: model needs a two-mode basis");
    const int top = std::max(basis.n_max(Mode::a), basis.n_max(Mode::b)) + 1;
    for (int twice = -2 * top + 1; twice <= 2 * top + 1; twice += 2) all.push_back(RecurrenceSector::from_charge(0.5 * twice));
  } else {
    throw std::invalid_argument(std::string("recurrence_sectors: no recurrence for model ") + model_name(model));
  }
  for (const auto& sec : all) {
    try {
      max_rows_in_box(preset, sec, basis);
      out.push_back(sec);
    } catch (const std::invalid_argument&) {
    }
  }
  return out;
}

struct RecoverySummary {
  int sectors = 0;
  int accepted = 0, spurious = 0, poles = 0;
  int oracle_in_window = 0;
  std::vector<std::pair<std::string, double>> missed;  // sector name, oracle level
  /// Missed levels whose oracle tail residual reaches the filter tolerance.
  std::vector<std::pair<std::string, double>> missed_truncated;
  double max_pair_error = 0.0;
  int missed_untruncated() const { return static_cast<int>(missed.size() - missed_truncated.size()); }
};

/// Runs every sector and checks both directions: accepted roots against the
/// sector oracle, and oracle levels up to window_top against accepted roots.
inline RecoverySummary recurrence_recovery(const PresetParams& preset, const FockBasis& basis, double window_top,
                                           double tol = 1e-8, const RecurrenceOptions& opt = {}) {
  RecoverySummary sum;
  for (const auto& sec : recurrence_sectors(preset, basis)) {
    const auto run = run_recurrence(preset, sec, basis, opt);
    const double tail_tol = opt.residual_tol.value_or(1e-8 * spectral_scale(run.system.params));
    ++sum.sectors;
    const auto accepted = run.with_status(RootStatus::accepted);
    sum.accepted += static_cast<int>(accepted.size());
    sum.spurious += static_cast<int>(run.with_status(RootStatus::spurious).size());
    sum.poles += static_cast<int>(run.with_status(RootStatus::pole).size());
    sum.max_pair_error = std::max(sum.max_pair_error, run.max_pair_error);
    for (Index i = 0; i < run.oracle.eigenvalues.size(); ++i) {
      const double x = run.oracle.eigenvalues(i);
      if (x > window_top) continue;
      ++sum.oracle_in_window;
      double best = std::numeric_limits<double>::infinity();
      for (double a : accepted) best = std::min(best, std::abs(a - x));
      if (best < tol) continue;
      sum.missed.emplace_back(sec.name(), x);
      if (!(run.oracle_tail(i) < tail_tol)) sum.missed_truncated.emplace_back(sec.name(), x);
    }
  }
  return sum;
}

struct RowComparison {
  bool available = false;
  double max_diag_gap = 0.0, max_lower_gap = 0.0, max_upper_gap = 0.0;
  std::vector<int> differing_rows;
};

/// Printed against rederived rows at the given energies.
inline RowComparison compare_printed_rows(const RecurrenceSystem& s, const std::vector<double>& energies,
                                          double tol = 1e-10) {
  RowComparison c;
  if (!s.printed_rows) return c;
  c.available = true;
  for (int n = 0; n <= s.N; ++n) {
    const auto& a = s.rows[static_cast<std::size_t>(n)];
    const auto& b = (*s.printed_rows)[static_cast<std::size_t>(n)];
    double row_gap = 0.0;
    for (double e : energies) {
      const double dd = std::abs(a.diag(e) - b.diag(e));
      const double dl = n > 0 ? std::abs(a.lower(e) - b.lower(e)) : 0.0;
      const double du = n < s.N ? std::abs(a.upper(e) - b.upper(e)) : 0.0;
      c.max_diag_gap = std::max(c.max_diag_gap, dd);
      c.max_lower_gap = std::max(c.max_lower_gap, dl);
      c.max_upper_gap = std::max(c.max_upper_gap, du);
      row_gap = std::max({row_gap, dd, dl, du});
    }
    if (row_gap > tol) c.differing_rows.push_back(n);
  }
  return c;
}

struct ReductionTerm {
  std::string coupling;  // e.g. "kappa1*gamma2"
  std::string product;   // e.g. "a a+"
  Complex coefficient;
  bool paired_with_minus;  // multiplied by F- (lowering first factor) or F+
};

/// The eliminated equation F+ F- F0 psi1 = F- A psi1 + F+ B psi1 as its
/// list of coupling products.
inline std::vector<ReductionTerm> reduction_equation(const GeneralParams& g) {
  const std::pair<const char*, Complex> upper[] = {{"kappa1", g.kappa1}, {"kappa3", g.kappa3}, {"kappa2", g.kappa2}, {"kappa4", g.kappa4}};
  const char* upper_ops[] = {"a", "b", "a+", "b+"};
  const std::pair<const char*, Complex> lower[] = {{"gamma1", g.gamma1}, {"gamma2", g.gamma2}, {"gamma3", g.gamma3}, {"gamma4", g.gamma4}};
  const char* lower_ops[] = {"a", "a+", "b", "b+"};
  std::vector<ReductionTerm> out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const Complex c = upper[i].second * lower[j].second;
      if (c == Complex(0.0)) continue;
      out.push_back({std::string(upper[i].first) + "*" + lower[j].first, std::string(upper_ops[i]) + " " + lower_ops[j], c, i < 2});
    }
  return out;
}

}  // namespace spinboson
