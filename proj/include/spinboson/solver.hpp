#pragma once

// Eigenvalue machinery: dense Hermitian solves, a banded path for two-mode
// spaces too large to hold densely, small non-Hermitian sectors, the
// diagonal resolvent, the ladder/resolvent shift check, convergence tables
// and spectrum matching.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "spinboson/models.hpp"

extern "C" {
void dsbev_(const char* jobz, const char* uplo, const int* n, const int* kd, double* ab, const int* ldab, double* w,
            double* z, const int* ldz, double* work, int* info);
void zhbev_(const char* jobz, const char* uplo, const int* n, const int* kd, std::complex<double>* ab,
            const int* ldab, double* w, std::complex<double>* z, const int* ldz, std::complex<double>* work,
            double* rwork, int* info);
}

namespace spinboson {

class NonHermitianError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PoleError : public std::runtime_error {
 public:
  PoleError(const std::string& what, int n_a, int n_b) : std::runtime_error(what), n_a(n_a), n_b(n_b) {}
  int n_a, n_b;
};

struct Spectrum {
  RealVector eigenvalues;                  // ascending
  std::optional<DenseMatrix> eigenvectors; // columns, same order
  std::optional<Cutoff> cutoff;
  /// max_i |H v_i - l_i v_i| when eigenvectors exist; otherwise a backward
  /// error bound n * eps * |H|_1 of the banded solver.
  double residual = 0.0;
  RealVector level_residuals;  // per eigenvalue, same convention as residual
  std::string residual_kind = "eigenpair";
};

inline double hermiticity_defect(const ComplexMatrix& m) { return max_abs(ComplexMatrix(m - adjoint_of(m))); }
inline double hermiticity_defect(const DenseMatrix& m) { return max_abs(DenseMatrix(m - m.adjoint())); }

inline constexpr double kHermitianTolerance = 1e-10;
/// Above this dimension sparse Hermitian input goes through the band solver.
inline constexpr Index kDenseLimit = 3000;

namespace detail {

inline void fill_residuals(Spectrum& s, const auto& h) {
  const auto& v = *s.eigenvectors;
  s.level_residuals.resize(s.eigenvalues.size());
  for (Index i = 0; i < s.eigenvalues.size(); ++i) {
    DenseVector r = h * v.col(i) - s.eigenvalues(i) * v.col(i);
    s.level_residuals(i) = r.norm();
  }
  s.residual = s.level_residuals.size() ? s.level_residuals.maxCoeff() : 0.0;
}

}  // namespace detail

/// Householder tridiagonalization followed by implicit symmetric QR.
inline Spectrum eig_hermitian(const DenseMatrix& h, bool vectors = true, std::optional<Cutoff> cutoff = {}) {
  if (h.rows() != h.cols()) throw DimensionError("eig_hermitian: matrix must be square");
  if (hermiticity_defect(h) > kHermitianTolerance) throw NonHermitianError("eig_hermitian: matrix is not Hermitian");
  Spectrum s;
  s.cutoff = cutoff;
  if (h.rows() == 0) return s;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eig_hermitian: QR iteration did not converge");
  s.eigenvalues = es.eigenvalues();
  if (vectors) {
    s.eigenvectors = es.eigenvectors();
    detail::fill_residuals(s, h);
  } else {
    const double bound = static_cast<double>(h.rows()) * std::numeric_limits<double>::epsilon() *
                         h.cwiseAbs().colwise().sum().maxCoeff();
    s.level_residuals = RealVector::Constant(h.rows(), bound);
    s.residual = bound;
    s.residual_kind = "backward-bound";
  }
  return s;
}

/// Half-bandwidth of m under the permutation perm (perm[old] = new).
inline Index bandwidth(const ComplexMatrix& m, const std::vector<Index>& perm) {
  Index kd = 0;
  for (Index k = 0; k < m.outerSize(); ++k)
    for (ComplexMatrix::InnerIterator it(m, k); it; ++it)
      kd = std::max(kd, std::abs(perm[static_cast<std::size_t>(it.row())] - perm[static_cast<std::size_t>(it.col())]));
  return kd;
}

/// Identity or spinor interleaving (c * half + i -> 2 i + c), whichever
/// gives the narrower band.
inline std::vector<Index> band_ordering(const ComplexMatrix& m) {
  const Index n = m.rows();
  std::vector<Index> identity(static_cast<std::size_t>(n));
  std::iota(identity.begin(), identity.end(), Index{0});
  if (n % 2 != 0) return identity;
  std::vector<Index> interleave(static_cast<std::size_t>(n));
  const Index half = n / 2;
  for (Index i = 0; i < n; ++i) interleave[static_cast<std::size_t>(i)] = (i % half) * 2 + i / half;
  return bandwidth(m, interleave) < bandwidth(m, identity) ? interleave : identity;
}

/// Eigenvalues of a sparse Hermitian matrix through LAPACK's band solver.
inline Spectrum eig_hermitian_banded(const ComplexMatrix& h, std::optional<Cutoff> cutoff = {}) {
  if (h.rows() != h.cols()) throw DimensionError("eig_hermitian_banded: matrix must be square");
  if (hermiticity_defect(h) > kHermitianTolerance) throw NonHermitianError("eig_hermitian_banded: matrix is not Hermitian");
  const auto perm = band_ordering(h);
  const int n = static_cast<int>(h.rows());
  const int kd = static_cast<int>(bandwidth(h, perm));
  const int ldab = kd + 1;
  bool real = true;
  double norm1 = 0.0;
  {
    RealVector colsum = RealVector::Zero(n);
    for (Index k = 0; k < h.outerSize(); ++k)
      for (ComplexMatrix::InnerIterator it(h, k); it; ++it) {
        if (it.value().imag() != 0.0) real = false;
        colsum(it.col()) += std::abs(it.value());
      }
    norm1 = n ? colsum.maxCoeff() : 0.0;
  }
  Spectrum s;
  s.cutoff = cutoff;
  s.eigenvalues.resize(n);
  int info = 0;
  const char jobz = 'N', uplo = 'L';
  const int ldz = 1;
  // Lower band storage: ab[(i - j) + j * ldab] = H(i, j) for j <= i <= j + kd.
  if (real) {
    std::vector<double> ab(static_cast<std::size_t>(ldab) * n, 0.0), work(static_cast<std::size_t>(std::max(1, 3 * n - 2)));
    for (Index k = 0; k < h.outerSize(); ++k)
      for (ComplexMatrix::InnerIterator it(h, k); it; ++it) {
        const Index i = perm[static_cast<std::size_t>(it.row())], j = perm[static_cast<std::size_t>(it.col())];
        if (i >= j) ab[static_cast<std::size_t>((i - j) + j * ldab)] = it.value().real();
      }
    double z = 0.0;
    dsbev_(&jobz, &uplo, &n, &kd, ab.data(), &ldab, s.eigenvalues.data(), &z, &ldz, work.data(), &info);
  } else {
    std::vector<std::complex<double>> ab(static_cast<std::size_t>(ldab) * n), work(static_cast<std::size_t>(std::max(1, n)));
    std::vector<double> rwork(static_cast<std::size_t>(std::max(1, 3 * n - 2)));
    for (Index k = 0; k < h.outerSize(); ++k)
      for (ComplexMatrix::InnerIterator it(h, k); it; ++it) {
        const Index i = perm[static_cast<std::size_t>(it.row())], j = perm[static_cast<std::size_t>(it.col())];
        if (i >= j) ab[static_cast<std::size_t>((i - j) + j * ldab)] = it.value();
      }
    std::complex<double> z;
    zhbev_(&jobz, &uplo, &n, &kd, ab.data(), &ldab, s.eigenvalues.data(), &z, &ldz, work.data(), rwork.data(), &info);
  }
  if (info != 0) throw std::runtime_error("band eigensolver failed, info = " + std::to_string(info));
  s.residual = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * norm1;
  s.level_residuals = RealVector::Constant(n, s.residual);
  s.residual_kind = "backward-bound";
  return s;
}

/// Dense solve for small matrices, band solve (eigenvalues only) beyond
/// kDenseLimit.
inline Spectrum eig_hermitian(const ComplexMatrix& h, bool vectors = true, std::optional<Cutoff> cutoff = {}) {
  if (h.rows() > kDenseLimit) return eig_hermitian_banded(h, cutoff);
  return eig_hermitian(DenseMatrix(h), vectors, cutoff);
}

inline std::vector<Complex> sort_complex(std::vector<Complex> z) {
  std::sort(z.begin(), z.end(), [](Complex x, Complex y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return z;
}

/// Eigenvalues of a small general matrix from its characteristic polynomial
/// (Faddeev-LeVerrier coefficients, simultaneous Aberth iteration, then a
/// Newton polish on det(zI - A) evaluated by LU).
inline std::vector<Complex> eig_small_general(const DenseMatrix& m) {
  const Index n = m.rows();
  if (n != m.cols()) throw DimensionError("eig_small_general: matrix must be square");
  if (n > 8) throw std::invalid_argument("eig_small_general: dimension must be at most 8");
  if (n == 0) return {};

  // p(z) = z^n + c[n-1] z^(n-1) + ... + c[0]
  std::vector<Complex> c(static_cast<std::size_t>(n) + 1);
  c[static_cast<std::size_t>(n)] = 1.0;
  DenseMatrix mk = DenseMatrix::Zero(n, n);
  const DenseMatrix id = DenseMatrix::Identity(n, n);
  for (Index k = 1; k <= n; ++k) {
    mk = m * mk + c[static_cast<std::size_t>(n - k + 1)] * id;
    c[static_cast<std::size_t>(n - k)] = -(m * mk).trace() / static_cast<double>(k);
  }
  auto poly = [&](Complex z, Complex& dp) {
    Complex p = c[static_cast<std::size_t>(n)];
    dp = 0.0;
    for (Index k = n - 1; k >= 0; --k) {
      dp = dp * z + p;
      p = p * z + c[static_cast<std::size_t>(k)];
    }
    return p;
  };

  double radius = 0.0;
  for (Index k = 0; k < n; ++k) radius = std::max(radius, std::abs(c[static_cast<std::size_t>(k)]));
  radius = 1.0 + radius;
  std::vector<Complex> z(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k)
    z[static_cast<std::size_t>(k)] = std::polar(0.5 * radius, 2.0 * M_PI * (k + 0.25) / static_cast<double>(n));

  for (int iter = 0; iter < 500; ++iter) {
    double change = 0.0;
    for (Index i = 0; i < n; ++i) {
      Complex& zi = z[static_cast<std::size_t>(i)];
      Complex dp;
      const Complex p = poly(zi, dp);
      if (p == Complex(0.0)) continue;
      const Complex ratio = p / dp;
      Complex sum = 0.0;
      for (Index j = 0; j < n; ++j)
        if (j != i) {
          const Complex diff = zi - z[static_cast<std::size_t>(j)];
          if (diff != Complex(0.0)) sum += 1.0 / diff;
        }
      const Complex step = ratio / (1.0 - ratio * sum);
      if (std::isfinite(step.real()) && std::isfinite(step.imag())) {
        zi -= step;
        change = std::max(change, std::abs(step) / (1.0 + std::abs(zi)));
      }
    }
    if (change < 1e-16) break;
  }

  // Polish each root on det(zI - A) directly; the characteristic polynomial
  // coefficients carry cancellation error that this removes.
  for (auto& zi : z) {
    for (int iter = 0; iter < 8; ++iter) {
      Eigen::PartialPivLU<DenseMatrix> lu(zi * id - m);
      const Complex det = lu.determinant();
      if (det == Complex(0.0)) break;
      // d/dz det(zI - A) = det * trace((zI - A)^-1)
      const DenseMatrix inv = lu.inverse();
      const Complex trace = inv.trace();
      if (!std::isfinite(std::abs(trace))) break;
      const Complex step = 1.0 / trace;
      if (!std::isfinite(std::abs(step)) || std::abs(step) > 1e-6 * (1.0 + std::abs(zi))) break;
      zi -= step;
      if (std::abs(step) < 1e-17 * (1.0 + std::abs(zi))) break;
    }
    if (std::abs(zi.imag()) < 1e-14 * (1.0 + std::abs(zi.real()))) zi = Complex(zi.real(), 0.0);
    if (std::abs(zi.real()) < 1e-14 * (1.0 + std::abs(zi.imag()))) zi = Complex(0.0, zi.imag());
  }
  return sort_complex(std::move(z));
}

inline constexpr double kPoleEpsilon = 1e-9;

/// (H0 - E + beta)^-1 applied componentwise, H0 = omega1 n_a + omega2 n_b.
inline DenseVector resolvent_apply(double omega1, double omega2, double beta, double energy, const DenseVector& v,
                                   const FockBasis& basis, double eps_pole = kPoleEpsilon) {
  if (v.size() != basis.dim()) throw DimensionError("resolvent_apply: vector length differs from basis dimension");
  DenseVector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const auto [na, nb] = basis.occupation(i);
    const double denom = omega1 * na + omega2 * nb + beta - energy;
    if (v(i) == Complex(0.0)) {
      out(i) = 0.0;
      continue;
    }
    if (std::abs(denom) <= eps_pole)
      throw PoleError("resolvent pole at occupation (" + std::to_string(na) + "," + std::to_string(nb) + ")", na, nb);
    out(i) = v(i) / denom;
  }
  return out;
}

struct ShiftCheckReport {
  double omega = 0.0, beta = 0.0, energy = 0.0;
  int n_max = 0;
  double plus_residual = 0.0;           // a f(H0) - f(H0 + w) a
  double minus_residual = 0.0;          // a f(H0) - f(H0 - w) a
  double adjoint_plus_residual = 0.0;   // a+ f(H0) - f(H0 + w) a+
  double adjoint_minus_residual = 0.0;  // a+ f(H0) - f(H0 - w) a+
  std::vector<std::string> notes;
  /// "+omega", "-omega", "both" or "neither".
  std::string holding_orientation;
};

/// Tests both orientations of the ladder/resolvent exchange for
/// f(x) = 1 / (x - E + beta) on the margin-1 interior of a one-mode basis.
/// A pole met by a shifted resolvent makes that residual infinite.
inline ShiftCheckReport shift_identity_check(const FockBasis& basis, double omega, double beta, double energy,
                                             double tol = 1e-12) {
  if (basis.modes() != 1) throw std::invalid_argument("shift_identity_check needs a one-mode basis");
  ShiftCheckReport r;
  r.omega = omega;
  r.beta = beta;
  r.energy = energy;
  r.n_max = basis.n_max(Mode::a);
  const Index dim = basis.dim();
  const ComplexMatrix a = build_annihilation(basis, Mode::a).matrix;
  const ComplexMatrix ad = adjoint_of(a);
  const auto proj = interior_projector(basis, 1);

  auto f_diag = [&](double shift, bool& pole, int& pole_n) {
    RealVector d(dim);
    for (Index n = 0; n < dim; ++n) {
      const double denom = omega * static_cast<double>(n) + shift - energy + beta;
      if (std::abs(denom) <= kPoleEpsilon) {
        pole = true;
        pole_n = static_cast<int>(n);
        d(n) = std::numeric_limits<double>::infinity();
      } else {
        d(n) = 1.0 / denom;
      }
    }
    return d;
  };
  bool pole0 = false;
  int pole0_n = -1;
  const RealVector f0 = f_diag(0.0, pole0, pole0_n);
  if (pole0) throw PoleError("shift_identity_check: E + beta hits an unshifted level", pole0_n, 0);

  auto residual = [&](const ComplexMatrix& ladder, double shift, const char* name) {
    bool any_pole = false;
    int pole_n = -1;
    const RealVector fs = f_diag(shift, any_pole, pole_n);
    bool pole = false;
    double worst = 0.0;
    for (Index k = 0; k < ladder.outerSize(); ++k)
      for (ComplexMatrix::InnerIterator it(ladder, k); it; ++it) {
        const Index i = it.row(), j = it.col();
        if (!proj.retained[static_cast<std::size_t>(i)] || !proj.retained[static_cast<std::size_t>(j)]) continue;
        // (L f(H0))_ij = L_ij f(j); (f(H0 + s) L)_ij = f_s(i) L_ij
        const double lhs = f0(j), rhs = fs(i);
        if (std::isinf(rhs)) pole = true;
        const double diff = std::isinf(rhs) ? std::numeric_limits<double>::infinity() : std::abs(it.value() * (lhs - rhs));
        worst = std::max(worst, diff);
      }
    if (pole)
      r.notes.push_back(std::string(name) + ": shifted resolvent has a pole at n = " + std::to_string(pole_n) +
                        " for E = " + format_number(energy) + "; residual reported as infinite");
    return worst;
  };
  r.plus_residual = residual(a, omega, "a, +omega");
  r.minus_residual = residual(a, -omega, "a, -omega");
  r.adjoint_plus_residual = residual(ad, omega, "a+, +omega");
  r.adjoint_minus_residual = residual(ad, -omega, "a+, -omega");

  const bool plus_ok = r.plus_residual < tol, minus_ok = r.minus_residual < tol;
  r.holding_orientation = plus_ok && minus_ok ? "both" : plus_ok ? "+omega" : minus_ok ? "-omega" : "neither";
  if (plus_ok && !minus_ok)
    r.notes.push_back("a f(H0) = f(H0 + omega) a holds; the -omega orientation fails");
  if (r.adjoint_minus_residual < tol && r.adjoint_plus_residual >= tol)
    r.notes.push_back("mirrored: a+ f(H0) = f(H0 - omega) a+ holds; the +omega orientation fails");
  return r;
}

struct ConvergenceRow {
  int n_max = 0;
  RealVector levels;
  RealVector deltas;  // against the previous row; empty for the first
  double max_delta = 0.0;
  std::vector<bool> converged;
};

struct ConvergenceTable {
  int level_count = 0;
  double tolerance = 0.0;
  std::vector<ConvergenceRow> rows;
  bool all_converged() const {
    if (rows.size() < 2) return true;
    return std::all_of(rows.back().converged.begin(), rows.back().converged.end(), [](bool b) { return b; });
  }
};

/// lowest_levels(n_max, L) must return the L lowest eigenvalues at that cutoff.
inline ConvergenceTable convergence_study(const std::function<RealVector(int, int)>& lowest_levels,
                                          const std::vector<int>& cutoffs, int level_count, double tol = 1e-10) {
  if (!std::is_sorted(cutoffs.begin(), cutoffs.end())) throw std::invalid_argument("convergence_study: cutoffs must ascend");
  ConvergenceTable t;
  t.level_count = level_count;
  t.tolerance = tol;
  for (int n : cutoffs) {
    ConvergenceRow row;
    row.n_max = n;
    row.levels = lowest_levels(n, level_count);
    if (row.levels.size() != level_count) throw std::runtime_error("convergence_study: builder returned the wrong level count");
    if (!t.rows.empty()) {
      row.deltas = (row.levels - t.rows.back().levels).cwiseAbs();
      row.max_delta = row.deltas.maxCoeff();
      for (Index i = 0; i < row.deltas.size(); ++i) row.converged.push_back(row.deltas(i) < tol);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct MatchPair {
  double reference = 0.0;
  double numerical = 0.0;
  double error = 0.0;
  Index reference_index = 0;
  Index numerical_index = 0;
};

struct MatchReport {
  std::vector<MatchPair> pairs;
  std::vector<double> unmatched_reference;
  std::vector<double> unmatched_numerical;
  double max_error = 0.0;
  bool complete() const { return unmatched_reference.empty(); }
};

/// Each reference value in order takes the nearest unused numerical value
/// within tol (ties toward the smaller index).
inline MatchReport match_spectra(const std::vector<double>& reference, const std::vector<double>& numerical, double tol) {
  MatchReport r;
  std::vector<Index> order(numerical.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
    return numerical[static_cast<std::size_t>(x)] < numerical[static_cast<std::size_t>(y)];
  });
  std::vector<double> sorted(numerical.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = numerical[static_cast<std::size_t>(order[i])];
  std::vector<bool> used(numerical.size(), false);

  for (std::size_t ri = 0; ri < reference.size(); ++ri) {
    const double x = reference[ri];
    const auto pos = static_cast<Index>(std::lower_bound(sorted.begin(), sorted.end(), x - tol) - sorted.begin());
    Index best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Index p = pos; p < static_cast<Index>(sorted.size()) && sorted[static_cast<std::size_t>(p)] <= x + tol; ++p) {
      const Index idx = order[static_cast<std::size_t>(p)];
      if (used[static_cast<std::size_t>(idx)]) continue;
      const double dist = std::abs(sorted[static_cast<std::size_t>(p)] - x);
      if (dist < best_dist || (dist == best_dist && idx < best)) {
        best = idx;
        best_dist = dist;
      }
    }
    if (best < 0) {
      r.unmatched_reference.push_back(x);
      continue;
    }
    used[static_cast<std::size_t>(best)] = true;
    r.pairs.push_back({x, numerical[static_cast<std::size_t>(best)], best_dist, static_cast<Index>(ri), best});
    r.max_error = std::max(r.max_error, best_dist);
  }
  for (std::size_t i = 0; i < numerical.size(); ++i)
    if (!used[i]) r.unmatched_numerical.push_back(numerical[i]);
  return r;
}

inline std::vector<double> to_std(const RealVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

/// Largest elementwise gap between two sorted lists of equal length; infinity
/// when the lengths differ.
inline double sorted_deviation(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

// ---------------------------------------------------------------------------
// Sector-wise spectra

struct SectorSpectrum {
  double charge = 0.0;
  std::vector<Index> indices;
  Spectrum spectrum;
};

/// Lower bound on the spectrum of a Hermitian matrix (Gershgorin).
inline double gershgorin_lower(const ComplexMatrix& m) {
  RealVector radius = RealVector::Zero(m.rows()), diag = RealVector::Zero(m.rows());
  for (Index k = 0; k < m.outerSize(); ++k)
    for (ComplexMatrix::InnerIterator it(m, k); it; ++it) {
      if (it.row() == it.col()) diag(it.row()) = it.value().real();
      else radius(it.row()) += std::abs(it.value());
    }
  return m.rows() ? (diag - radius).minCoeff() : std::numeric_limits<double>::infinity();
}

/// Diagonalizes every charge sector (vectors optional). With max_levels set,
/// sectors whose Gershgorin bound lies above the current max_levels-th
/// lowest eigenvalue are skipped.
inline std::vector<SectorSpectrum> sector_spectra(const std::vector<Sector>& sectors, bool vectors,
                                                   std::optional<int> max_levels = {}) {
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < sectors.size(); ++i) order.emplace_back(gershgorin_lower(sectors[i].matrix), i);
  std::sort(order.begin(), order.end());
  std::vector<SectorSpectrum> out;
  std::vector<double> pool;
  for (const auto& [bound, i] : order) {
    if (max_levels && static_cast<int>(pool.size()) >= *max_levels) {
      std::nth_element(pool.begin(), pool.begin() + (*max_levels - 1), pool.end());
      if (bound > pool[static_cast<std::size_t>(*max_levels - 1)]) break;
    }
    SectorSpectrum s{sectors[i].charge, sectors[i].indices, eig_hermitian(DenseMatrix(sectors[i].matrix), vectors)};
    for (Index k = 0; k < s.spectrum.eigenvalues.size(); ++k) pool.push_back(s.spectrum.eigenvalues(k));
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const SectorSpectrum& x, const SectorSpectrum& y) { return x.charge < y.charge; });
  return out;
}

/// Union of sector eigenvalues (ascending) with their per-level residuals.
inline Spectrum merge_sector_spectra(const std::vector<SectorSpectrum>& parts, std::optional<int> max_levels = {}) {
  std::vector<std::pair<double, double>> all;
  for (const auto& p : parts)
    for (Index k = 0; k < p.spectrum.eigenvalues.size(); ++k)
      all.emplace_back(p.spectrum.eigenvalues(k),
                       p.spectrum.level_residuals.size() ? p.spectrum.level_residuals(k) : p.spectrum.residual);
  std::sort(all.begin(), all.end());
  if (max_levels && static_cast<int>(all.size()) > *max_levels) all.resize(static_cast<std::size_t>(*max_levels));
  Spectrum s;
  s.eigenvalues.resize(static_cast<Index>(all.size()));
  s.level_residuals.resize(static_cast<Index>(all.size()));
  for (std::size_t i = 0; i < all.size(); ++i) {
    s.eigenvalues(static_cast<Index>(i)) = all[i].first;
    s.level_residuals(static_cast<Index>(i)) = all[i].second;
  }
  s.residual = s.level_residuals.size() ? s.level_residuals.maxCoeff() : 0.0;
  return s;
}

/// Lowest levels of a Hermitian preset through its conserved charge, with
/// the constant offset added.
inline Spectrum preset_lowest_levels(const PresetParams& preset, const Cutoff& cutoff, std::optional<int> level_count,
                                     bool vectors = true) {
  const auto form = to_general(preset);
  const FockBasis basis(cutoff);
  const auto build = build_hamiltonian(form.params, basis, form.offset);
  if (!build.hermitian) throw NonHermitianError("preset_lowest_levels: Hamiltonian is not Hermitian");
  const auto charge = conserved_charge(kind_of(preset), basis);
  const auto sectors = sector_decompose(build, charge);
  auto spectrum = merge_sector_spectra(sector_spectra(sectors, vectors, level_count), level_count);
  spectrum.eigenvalues.array() += build.constant_offset;
  spectrum.cutoff = cutoff;
  return spectrum;
}

}  // namespace spinboson
