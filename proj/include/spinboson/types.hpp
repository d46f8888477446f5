#pragma once

#include <charconv>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace spinboson {

using Complex = std::complex<double>;

// Operators are stored sparse; ladder operators have at most one entry per
// column, and two-mode spaces at desk-scale cutoffs are too large for dense
// complex storage.
using ComplexMatrix = Eigen::SparseMatrix<Complex>;
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Largest absolute entry; zero for an empty matrix.
inline double max_abs(const ComplexMatrix& m) {
  double best = 0.0;
  for (Index k = 0; k < m.outerSize(); ++k)
    for (ComplexMatrix::InnerIterator it(m, k); it; ++it) best = std::max(best, std::abs(it.value()));
  return best;
}

inline double max_abs(const DenseMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline ComplexMatrix sparse_identity(Index dim) {
  ComplexMatrix id(dim, dim);
  id.setIdentity();
  return id;
}

inline ComplexMatrix adjoint_of(const ComplexMatrix& m) { return ComplexMatrix(m.adjoint()); }

inline ComplexMatrix diagonal_matrix(const RealVector& diag) {
  ComplexMatrix out(diag.size(), diag.size());
  out.reserve(Eigen::VectorXi::Constant(diag.size(), 1));
  for (Index i = 0; i < diag.size(); ++i)
    if (diag(i) != 0.0) out.insert(i, i) = Complex(diag(i), 0.0);
  out.makeCompressed();
  return out;
}

/// Shortest round-trip decimal form (0, -1, -0.5, 0.1).
inline std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + ")");
}

}  // namespace spinboson
