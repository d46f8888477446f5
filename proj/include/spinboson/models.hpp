#pragma once

// The general two-level/two-mode Hamiltonian, the six physical presets that
// specialize it, their conserved charges and the resulting block structure.

#include <cmath>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "spinboson/fock.hpp"

namespace spinboson {

struct GeneralParams {
  double omega1 = 0.0, omega2 = 0.0;
  double beta = 0.0;
  Complex kappa1, kappa2, kappa3, kappa4;
  Complex gamma1, gamma2, gamma3, gamma4;

  bool uses_mode_b() const {
    return omega2 != 0.0 || kappa3 != Complex(0.0) || kappa4 != Complex(0.0) || gamma3 != Complex(0.0) ||
           gamma4 != Complex(0.0);
  }
  /// gamma1 = conj(kappa2), gamma2 = conj(kappa1), gamma3 = conj(kappa4),
  /// gamma4 = conj(kappa3).
  bool hermitian_pairing(double tol = 1e-14) const {
    return std::abs(gamma1 - std::conj(kappa2)) <= tol && std::abs(gamma2 - std::conj(kappa1)) <= tol &&
           std::abs(gamma3 - std::conj(kappa4)) <= tol && std::abs(gamma4 - std::conj(kappa3)) <= tol;
  }
};

// Presets take physical constants; hbar defaults to 1.
struct JTParams {
  double m = 1.0, omega = 1.0, mu_level = 0.0, kappa = 0.0, hbar = 1.0;
};
struct DotParams {
  double m_star = 1.0, omega0 = 1.0, B = 0.0, lambda_R = 0.0, g = 2.0, mu_bohr = 1.0, charge = 1.0, hbar = 1.0;
};
struct JCParams {
  double omega = 1.0, omega0 = 1.0, kappa = 0.0, hbar = 1.0;
};
struct JCRWAParams {
  double omega = 1.0, omega0 = 1.0, kappa = 0.0, hbar = 1.0;
};
struct MJCParams {
  double omega = 1.0, omega0 = 1.0, lambda1 = 0.0, lambda2 = 0.0, hbar = 1.0;
};
struct DiracParams {
  double mass = 1.0, c = 1.0, omega = 1.0, hbar = 1.0;
};

using PresetParams = std::variant<JTParams, DotParams, JCParams, JCRWAParams, MJCParams, DiracParams>;

enum class ModelKind { jt, dot, jc, jcrwa, mjc, dirac, general };

inline const char* model_name(ModelKind k) {
  switch (k) {
    case ModelKind::jt: return "jt";
    case ModelKind::dot: return "dot";
    case ModelKind::jc: return "jc";
    case ModelKind::jcrwa: return "jc-rwa";
    case ModelKind::mjc: return "mjc";
    case ModelKind::dirac: return "dirac";
    case ModelKind::general: return "general";
  }
  return "?";
}

inline ModelKind kind_of(const PresetParams& p) {
  return std::visit(
      [](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, JTParams>) return ModelKind::jt;
        else if constexpr (std::is_same_v<T, DotParams>) return ModelKind::dot;
        else if constexpr (std::is_same_v<T, JCParams>) return ModelKind::jc;
        else if constexpr (std::is_same_v<T, JCRWAParams>) return ModelKind::jcrwa;
        else if constexpr (std::is_same_v<T, MJCParams>) return ModelKind::mjc;
        else return ModelKind::dirac;
      },
      p);
}

inline bool two_mode_model(ModelKind k) { return k == ModelKind::jt || k == ModelKind::dot || k == ModelKind::mjc; }

struct GeneralForm {
  GeneralParams params;
  double offset = 0.0;
  std::map<std::string, double> extras;  // derived physical quantities
  std::vector<std::string> notes;
};

inline GeneralForm to_general(const PresetParams& preset) {
  GeneralForm f;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        auto& g = f.params;
        if constexpr (std::is_same_v<T, JTParams>) {
          const double kp = std::sqrt(p.m * p.omega / (4.0 * p.hbar)) * p.kappa;
          g.omega1 = g.omega2 = p.hbar * p.omega;
          g.beta = p.mu_level / 2.0;
          g.kappa1 = g.kappa4 = g.gamma2 = g.gamma3 = kp;
          f.extras["kappa_prime"] = kp;
        } else if constexpr (std::is_same_v<T, DotParams>) {
          const double wc = p.charge * p.B / p.m_star;
          const double w = std::sqrt(p.omega0 * p.omega0 + 0.25 * wc * wc);
          const double lp = std::sqrt(p.m_star * w / (4.0 * p.hbar)) * p.lambda_R;
          g.omega1 = p.hbar * (w + wc / 2.0);
          g.omega2 = p.hbar * (w - wc / 2.0);
          g.beta = 0.5 * p.g * p.mu_bohr * p.B;
          g.kappa1 = lp;
          g.kappa4 = -lp;
          g.gamma2 = lp;
          g.gamma3 = -lp;
          f.offset = p.hbar * w;
          f.extras["omega_c"] = wc;
          f.extras["omega_eff"] = w;
          f.extras["lambda_prime"] = lp;
          if (wc != 0.0) f.notes.push_back("cyclotron term splits the mode frequencies: omega1 = omega + omega_c/2, omega2 = omega - omega_c/2");
          f.notes.push_back("constant offset hbar*omega carried separately and added to reported levels");
        } else if constexpr (std::is_same_v<T, JCParams>) {
          g.omega1 = p.hbar * p.omega;
          g.beta = p.hbar * p.omega0 / 2.0;
          g.kappa1 = g.kappa2 = g.gamma1 = g.gamma2 = p.kappa;
        } else if constexpr (std::is_same_v<T, JCRWAParams>) {
          g.omega1 = p.hbar * p.omega;
          g.beta = p.hbar * p.omega0 / 2.0;
          g.kappa1 = g.gamma2 = p.kappa;
        } else if constexpr (std::is_same_v<T, MJCParams>) {
          g.omega1 = g.omega2 = p.hbar * p.omega;
          g.beta = p.hbar * p.omega0;
          g.kappa1 = g.gamma2 = p.lambda1;
          g.kappa3 = g.gamma4 = p.lambda2;
          f.notes.push_back("boson energy read as hbar*omega*(a+a + b+b)");
        } else {
          const Complex kpp(0.0, 2.0 * p.c * std::sqrt(p.mass * p.omega * p.hbar));
          g.beta = p.mass * p.c * p.c;
          g.kappa1 = g.gamma2 = kpp;
          f.extras["kappa_double_prime_imag"] = kpp.imag();
          f.notes.push_back("imaginary coupling makes the Hamiltonian non-Hermitian");
        }
      },
      preset);
  return f;
}

struct HamiltonianBuild {
  SpinorOperator spinor;
  double constant_offset = 0.0;
  bool hermitian = false;
  std::vector<std::string> notes;
  ComplexMatrix assembled() const { return spinor.assemble(); }
};

inline HamiltonianBuild build_hamiltonian(const GeneralParams& g, const FockBasis& basis, double offset = 0.0) {
  if (g.uses_mode_b() && basis.modes() != 2)
    throw std::invalid_argument("build_hamiltonian: mode-b terms need a two-mode basis");
  const ComplexMatrix a = build_annihilation(basis, Mode::a).matrix;
  const ComplexMatrix ad = adjoint_of(a);
  ComplexMatrix h0 = g.omega1 * build_number(basis, Mode::a).matrix;
  ComplexMatrix upper = g.kappa1 * a + g.kappa2 * ad;
  ComplexMatrix lower = g.gamma1 * a + g.gamma2 * ad;
  if (basis.modes() == 2) {
    const ComplexMatrix b = build_annihilation(basis, Mode::b).matrix;
    const ComplexMatrix bd = adjoint_of(b);
    h0 += g.omega2 * build_number(basis, Mode::b).matrix;
    upper += g.kappa3 * b + g.kappa4 * bd;
    lower += g.gamma3 * b + g.gamma4 * bd;
  }
  HamiltonianBuild out;
  out.spinor = spinor_assemble(h0, Complex(g.beta, 0.0), upper, lower);
  out.constant_offset = offset;
  out.hermitian = g.hermitian_pairing();
  if (!out.hermitian) out.notes.push_back("couplings break gamma_i = conj(kappa_j) pairing: Hamiltonian is non-Hermitian");
  return out;
}

struct ConservedCharge {
  SpinorOperator matrix;  // diagonal blocks only
  RealVector diagonal;    // over the full spinor index
  std::string description;
};

/// Diagonal charge commuting with the preset Hamiltonian at every cutoff.
inline ConservedCharge conserved_charge(ModelKind kind, const FockBasis& basis) {
  const Index d = basis.dim();
  ConservedCharge q;
  q.diagonal.resize(2 * d);
  for (int comp = 0; comp < 2; ++comp) {
    const double sigma0 = comp == 0 ? -1.0 : 1.0;
    for (Index i = 0; i < d; ++i) {
      const auto [na, nb] = basis.occupation(i);
      double value = 0.0;
      switch (kind) {
        case ModelKind::jcrwa:
        case ModelKind::dirac: value = na - sigma0 / 2.0; break;
        case ModelKind::mjc: value = na + nb - sigma0 / 2.0; break;
        case ModelKind::jt:
        case ModelKind::dot: value = na - nb - sigma0 / 2.0; break;
        case ModelKind::jc: value = ((na + comp) % 2 == 0) ? 1.0 : -1.0; break;
        case ModelKind::general: throw std::invalid_argument("conserved_charge: no charge for the general model");
      }
      q.diagonal(comp * d + i) = value;
    }
  }
  if (two_mode_model(kind) && basis.modes() != 2) throw std::invalid_argument("conserved_charge: model needs a two-mode basis");
  switch (kind) {
    case ModelKind::jcrwa:
    case ModelKind::dirac: q.description = "N' - sigma0/2"; break;
    case ModelKind::mjc: q.description = "(a+a + b+b) - sigma0/2"; break;
    case ModelKind::jt:
    case ModelKind::dot: q.description = "(a+a - b+b) - sigma0/2"; break;
    default: q.description = "parity (-1)^(n + component)"; break;
  }
  q.matrix.blocks[0][0] = diagonal_matrix(q.diagonal.head(d));
  q.matrix.blocks[1][1] = diagonal_matrix(q.diagonal.tail(d));
  q.matrix.blocks[0][1] = ComplexMatrix(d, d);
  q.matrix.blocks[1][0] = ComplexMatrix(d, d);
  return q;
}

/// max |[H, G]| using the diagonal form of G: [H, G]_ij = H_ij (g_j - g_i).
inline double charge_commutator(const ComplexMatrix& h, const RealVector& g) {
  double worst = 0.0;
  for (Index k = 0; k < h.outerSize(); ++k)
    for (ComplexMatrix::InnerIterator it(h, k); it; ++it)
      worst = std::max(worst, std::abs(it.value() * (g(it.col()) - g(it.row()))));
  return worst;
}

struct Sector {
  double charge = 0.0;
  std::vector<Index> indices;  // ascending full spinor indices
  ComplexMatrix matrix;
};

inline std::vector<Sector> sector_decompose(const ComplexMatrix& h, const ConservedCharge& q, double tol = 1e-10) {
  if (h.rows() != q.diagonal.size()) throw DimensionError("sector_decompose: charge and Hamiltonian dimensions differ");
  const double defect = charge_commutator(h, q.diagonal);
  if (defect > tol) throw std::runtime_error("sector_decompose: [H, G] = " + std::to_string(defect) + " exceeds tolerance");
  // Charges are half-integers or +-1; key on twice the value.
  std::map<long, std::vector<Index>> groups;
  for (Index i = 0; i < q.diagonal.size(); ++i) groups[std::lround(2.0 * q.diagonal(i))].push_back(i);
  std::vector<Index> local(static_cast<std::size_t>(h.rows()), -1);
  std::vector<Sector> out;
  for (auto& [key, idx] : groups) {
    for (std::size_t p = 0; p < idx.size(); ++p) local[static_cast<std::size_t>(idx[p])] = static_cast<Index>(p);
    std::vector<Eigen::Triplet<Complex>> trips;
    for (Index col : idx)
      for (ComplexMatrix::InnerIterator it(h, col); it; ++it)
        trips.emplace_back(local[static_cast<std::size_t>(it.row())], local[static_cast<std::size_t>(col)], it.value());
    Sector s;
    s.charge = key / 2.0;
    s.matrix = ComplexMatrix(static_cast<Index>(idx.size()), static_cast<Index>(idx.size()));
    s.matrix.setFromTriplets(trips.begin(), trips.end());
    s.indices = std::move(idx);
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<Sector> sector_decompose(const HamiltonianBuild& h, const ConservedCharge& q, double tol = 1e-10) {
  return sector_decompose(h.assembled(), q, tol);
}

}  // namespace spinboson
