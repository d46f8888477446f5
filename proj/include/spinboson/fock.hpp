#pragma once

// Truncated Fock spaces for one or two boson modes, ladder operators as
// sparse matrices, and the two-level (spinor) block structure.
//
// Basis ordering is lexicographic with mode a major:
//   index(n_a, n_b) = n_a * (n_max_b + 1) + n_b.
// Spinor operators act on C^2 (x) Fock with component-major ordering,
// i.e. the full index of (component c, Fock index i) is c * dim + i.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spinboson/types.hpp"

namespace spinboson {

enum class Mode { a, b };

inline const char* mode_name(Mode m) { return m == Mode::a ? "a" : "b"; }

struct Cutoff {
  int n_max_a = 1;
  std::optional<int> n_max_b;

  static Cutoff one_mode(int n_max) { return Cutoff{n_max, std::nullopt}; }
  static Cutoff two_mode(int n_max_a, int n_max_b) { return Cutoff{n_max_a, n_max_b}; }
  static Cutoff two_mode(int n_max) { return Cutoff{n_max, n_max}; }

  int modes() const { return n_max_b ? 2 : 1; }
  int n_max(Mode m) const {
    if (m == Mode::a) return n_max_a;
    if (!n_max_b) throw std::invalid_argument("mode b requested on a one-mode cutoff");
    return *n_max_b;
  }
  Index dim() const {
    return static_cast<Index>(n_max_a + 1) * static_cast<Index>(n_max_b ? *n_max_b + 1 : 1);
  }
  /// Smallest per-mode cutoff.
  int min_n_max() const { return n_max_b ? std::min(n_max_a, *n_max_b) : n_max_a; }

  bool operator==(const Cutoff&) const = default;
};

class FockBasis {
 public:
  explicit FockBasis(Cutoff cutoff) : cutoff_(cutoff) {
    if (cutoff_.n_max_a < 1 || (cutoff_.n_max_b && *cutoff_.n_max_b < 1))
      throw std::invalid_argument("cutoff must be at least 1 on every mode");
  }

  const Cutoff& cutoff() const { return cutoff_; }
  Index dim() const { return cutoff_.dim(); }
  int modes() const { return cutoff_.modes(); }
  int n_max(Mode m) const { return cutoff_.n_max(m); }

  bool contains(int n_a, int n_b = 0) const {
    if (n_a < 0 || n_b < 0 || n_a > cutoff_.n_max_a) return false;
    return cutoff_.n_max_b ? n_b <= *cutoff_.n_max_b : n_b == 0;
  }

  Index index_of(int n_a, int n_b = 0) const {
    if (!contains(n_a, n_b))
      throw std::out_of_range("occupation (" + std::to_string(n_a) + "," + std::to_string(n_b) +
                              ") outside the truncated basis");
    return static_cast<Index>(n_a) * stride() + n_b;
  }

  std::pair<int, int> occupation(Index index) const {
    if (index < 0 || index >= dim()) throw std::out_of_range("basis index out of range");
    return {static_cast<int>(index / stride()), static_cast<int>(index % stride())};
  }

  int occupation(Index index, Mode m) const {
    auto [na, nb] = occupation(index);
    return m == Mode::a ? na : nb;
  }

 private:
  Index stride() const { return cutoff_.n_max_b ? *cutoff_.n_max_b + 1 : 1; }

  Cutoff cutoff_;
};

struct BosonOp {
  ComplexMatrix matrix;
  std::string label;
};

/// <.., n-1, ..| a |.., n, ..> = sqrt(n) on the selected mode.
inline BosonOp build_annihilation(const FockBasis& basis, Mode mode) {
  if (mode == Mode::b && basis.modes() != 2)
    throw std::invalid_argument("mode b does not exist in a one-mode basis");
  const Index dim = basis.dim();
  ComplexMatrix m(dim, dim);
  m.reserve(Eigen::VectorXi::Constant(dim, 1));
  for (Index col = 0; col < dim; ++col) {
    auto [na, nb] = basis.occupation(col);
    const int n = mode == Mode::a ? na : nb;
    if (n == 0) continue;
    const Index row = mode == Mode::a ? basis.index_of(na - 1, nb) : basis.index_of(na, nb - 1);
    m.insert(row, col) = Complex(std::sqrt(static_cast<double>(n)), 0.0);
  }
  m.makeCompressed();
  return {std::move(m), mode_name(mode)};
}

inline BosonOp adjoint(const BosonOp& op) {
  return {adjoint_of(op.matrix), op.label.size() == 1 ? op.label + "+" : "(" + op.label + ")+"};
}

inline BosonOp build_creation(const FockBasis& basis, Mode mode) { return adjoint(build_annihilation(basis, mode)); }

/// Diagonal number operator; exact at every truncation.
inline BosonOp build_number(const FockBasis& basis, Mode mode) {
  if (mode == Mode::b && basis.modes() != 2)
    throw std::invalid_argument("mode b does not exist in a one-mode basis");
  RealVector diag(basis.dim());
  for (Index i = 0; i < basis.dim(); ++i) diag(i) = basis.occupation(i, mode);
  return {diagonal_matrix(diag), std::string("n_") + mode_name(mode)};
}

inline BosonOp mul(const BosonOp& x, const BosonOp& y) {
  if (x.matrix.cols() != y.matrix.rows()) throw DimensionError("mul: dimension mismatch");
  ComplexMatrix p = x.matrix * y.matrix;
  p.prune(Complex(0.0, 0.0));
  return {std::move(p), x.label + " " + y.label};
}

/// x + s * y
inline BosonOp add_scaled(const BosonOp& x, Complex s, const BosonOp& y) {
  require_same_shape(x.matrix, y.matrix, "add_scaled");
  ComplexMatrix sum = x.matrix + s * y.matrix;
  return {std::move(sum), "(" + x.label + " + s*" + y.label + ")"};
}

inline ComplexMatrix commutator(const ComplexMatrix& x, const ComplexMatrix& y) {
  require_same_shape(x, y, "commutator");
  if (x.rows() != x.cols()) throw DimensionError("commutator: operators must be square");
  ComplexMatrix xy = x * y;
  ComplexMatrix yx = y * x;
  return ComplexMatrix(xy - yx);
}

inline BosonOp commutator(const BosonOp& x, const BosonOp& y) {
  return {commutator(x.matrix, y.matrix), "[" + x.label + "," + y.label + "]"};
}

/// Lifts a single-mode operator to a two-mode basis, acting as identity on
/// the other mode.
inline BosonOp embed_two_mode(const BosonOp& op, const FockBasis& basis, Mode mode) {
  if (basis.modes() != 2) throw std::invalid_argument("embed_two_mode: target basis must have two modes");
  const Index single = basis.n_max(mode) + 1;
  if (op.matrix.rows() != single || op.matrix.cols() != single)
    throw DimensionError("embed_two_mode: operator dimension " + std::to_string(op.matrix.rows()) +
                         " does not match mode cutoff " + std::to_string(single - 1));
  const Index other = basis.n_max(mode == Mode::a ? Mode::b : Mode::a) + 1;
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(op.matrix.nonZeros() * other));
  for (Index k = 0; k < op.matrix.outerSize(); ++k) {
    for (ComplexMatrix::InnerIterator it(op.matrix, k); it; ++it) {
      for (Index s = 0; s < other; ++s) {
        const int ri = static_cast<int>(it.row()), ci = static_cast<int>(it.col()), si = static_cast<int>(s);
        const Index row = mode == Mode::a ? basis.index_of(ri, si) : basis.index_of(si, ri);
        const Index col = mode == Mode::a ? basis.index_of(ci, si) : basis.index_of(si, ci);
        trips.emplace_back(row, col, it.value());
      }
    }
  }
  ComplexMatrix m(basis.dim(), basis.dim());
  m.setFromTriplets(trips.begin(), trips.end());
  return {std::move(m), op.label + "@" + mode_name(mode)};
}

/// Operator on C^2 (x) Fock. blocks[r][c] maps component c to component r.
struct SpinorOperator {
  std::array<std::array<ComplexMatrix, 2>, 2> blocks;

  Index fock_dim() const { return blocks[0][0].rows(); }
  Index dim() const { return 2 * fock_dim(); }

  ComplexMatrix assemble() const {
    const Index d = fock_dim();
    std::vector<Eigen::Triplet<Complex>> trips;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        for (Index k = 0; k < blocks[r][c].outerSize(); ++k)
          for (ComplexMatrix::InnerIterator it(blocks[r][c], k); it; ++it)
            if (it.value() != Complex(0.0, 0.0)) trips.emplace_back(r * d + it.row(), c * d + it.col(), it.value());
    ComplexMatrix m(2 * d, 2 * d);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
  }
};

/// [[h0 - beta, upper], [lower, h0 + beta]]: sigma0 = diag(-1, 1), and
/// sigma+ maps component 2 to component 1.
inline SpinorOperator spinor_assemble(const ComplexMatrix& h0, Complex beta, const ComplexMatrix& upper,
                                      const ComplexMatrix& lower) {
  require_same_shape(h0, upper, "spinor_assemble");
  require_same_shape(h0, lower, "spinor_assemble");
  if (h0.rows() != h0.cols()) throw DimensionError("spinor_assemble: blocks must be square");
  const ComplexMatrix id = sparse_identity(h0.rows());
  SpinorOperator s;
  s.blocks[0][0] = h0 - beta * id;
  s.blocks[0][1] = upper;
  s.blocks[1][0] = lower;
  s.blocks[1][1] = h0 + beta * id;
  for (auto& row : s.blocks)
    for (auto& b : row) b.prune(Complex(0.0, 0.0));
  return s;
}

struct InteriorProjector {
  int margin = 0;
  ComplexMatrix matrix;
  std::vector<bool> retained;

  ComplexMatrix apply(const ComplexMatrix& x) const {
    require_same_shape(matrix, x, "interior projection");
    return ComplexMatrix(matrix * x * matrix);
  }
  /// Block-diagonal P (+) P for spinor-space operators.
  ComplexMatrix spinor() const {
    const Index d = matrix.rows();
    ComplexMatrix m(2 * d, 2 * d);
    std::vector<Eigen::Triplet<Complex>> trips;
    for (Index i = 0; i < d; ++i)
      if (retained[static_cast<std::size_t>(i)]) {
        trips.emplace_back(i, i, 1.0);
        trips.emplace_back(d + i, d + i, 1.0);
      }
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
  }
};

/// Zeroes every state with some occupation above n_max - margin.
inline InteriorProjector interior_projector(const FockBasis& basis, int margin) {
  if (margin < 0 || margin >= basis.cutoff().min_n_max())
    throw std::invalid_argument("interior_projector: margin must satisfy 0 <= margin < n_max");
  InteriorProjector p;
  p.margin = margin;
  RealVector diag(basis.dim());
  p.retained.resize(static_cast<std::size_t>(basis.dim()));
  for (Index i = 0; i < basis.dim(); ++i) {
    auto [na, nb] = basis.occupation(i);
    bool keep = na <= basis.n_max(Mode::a) - margin;
    if (basis.modes() == 2) keep = keep && nb <= basis.n_max(Mode::b) - margin;
    diag(i) = keep ? 1.0 : 0.0;
    p.retained[static_cast<std::size_t>(i)] = keep;
  }
  p.matrix = diagonal_matrix(diag);
  return p;
}

}  // namespace spinboson
