#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "spinboson/solver.hpp"

using namespace spinboson;

namespace {

ComplexMatrix random_banded_hermitian(Index n, Index band, std::mt19937& rng) {
  std::normal_distribution<double> g;
  std::vector<Eigen::Triplet<Complex>> t;
  for (Index i = 0; i < n; ++i) {
    t.emplace_back(i, i, g(rng));
    for (Index k = 1; k <= band && i + k < n; ++k) {
      const Complex z(g(rng), g(rng));
      t.emplace_back(i, i + k, z);
      t.emplace_back(i + k, i, std::conj(z));
    }
  }
  ComplexMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

TEST_CASE("2x2 Hermitian eigenvalues follow the quadratic formula", "[solver]") {
  DenseMatrix m(2, 2);
  m << Complex(0.3, 0), Complex(0.2, -0.5), Complex(0.2, 0.5), Complex(-1.1, 0);
  const auto s = eig_hermitian(m);
  const double mean = (0.3 - 1.1) / 2, half = std::sqrt(0.7 * 0.7 + 0.29);
  CHECK(s.eigenvalues(0) == Catch::Approx(mean - half));
  CHECK(s.eigenvalues(1) == Catch::Approx(mean + half));
  CHECK(s.residual < 1e-14);
  CHECK(s.residual_kind == "eigenpair");
}

TEST_CASE("non-Hermitian input is rejected by the Hermitian solver", "[solver]") {
  DenseMatrix m = DenseMatrix::Identity(3, 3);
  m(0, 1) = 0.5;
  CHECK_THROWS_AS(eig_hermitian(m), NonHermitianError);
}

TEST_CASE("band solver agrees with the dense solver", "[solver][property]") {
  std::mt19937 rng(3);
  for (Index band : {1, 3, 7}) {
    const ComplexMatrix h = random_banded_hermitian(120, band, rng);
    // scramble the ordering so the solver has to find the band itself
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(h.rows());
    perm.setIdentity();
    std::shuffle(perm.indices().data(), perm.indices().data() + h.rows(), rng);
    const ComplexMatrix scrambled = perm * h * perm.transpose();
    const auto banded = eig_hermitian_banded(scrambled);
    Eigen::SelfAdjointEigenSolver<DenseMatrix> dense{DenseMatrix(h)};
    CHECK((banded.eigenvalues - dense.eigenvalues()).cwiseAbs().maxCoeff() < 1e-11);
    CHECK(banded.residual_kind != "eigenpair");
    CHECK(banded.residual > 0.0);
  }
}

TEST_CASE("eigenvalues ascend and residuals are per level", "[solver]") {
  std::mt19937 rng(9);
  const auto s = eig_hermitian(random_banded_hermitian(40, 4, rng));
  for (Index i = 1; i < s.eigenvalues.size(); ++i) CHECK(s.eigenvalues(i - 1) <= s.eigenvalues(i));
  REQUIRE(s.level_residuals.size() == 40);
  CHECK(s.level_residuals.maxCoeff() == s.residual);
  CHECK(s.residual < 1e-12);
}

TEST_CASE("small general eigenvalues match known roots", "[solver]") {
  // companion matrix of (z - 1)(z - 2)(z - (1 + 2i))(z - (1 - 2i))
  const std::vector<Complex> roots = {1.0, 2.0, {1.0, 2.0}, {1.0, -2.0}};
  std::vector<Complex> c = {1.0};
  for (Complex r : roots) {
    std::vector<Complex> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= r * c[i];
    }
    c = next;
  }
  DenseMatrix comp = DenseMatrix::Zero(4, 4);
  for (int i = 1; i < 4; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < 4; ++i) comp(i, 3) = -c[static_cast<std::size_t>(i)];
  const auto z = eig_small_general(comp);
  REQUIRE(z.size() == 4);
  for (Complex r : roots) {
    double best = INFINITY;
    for (Complex x : z) best = std::min(best, std::abs(x - r));
    CHECK(best < 1e-12);
  }

  DenseMatrix two(2, 2);
  two << Complex(-1.0, 0), Complex(0, 2.0), Complex(0, 2.0), Complex(1.0, 0);
  // eigenvalues +-sqrt(1 - 4) = +-i sqrt(3)
  const auto w = eig_small_general(two);
  CHECK(std::abs(w[0] - Complex(0, -std::sqrt(3.0))) < 1e-13);
  CHECK(std::abs(w[1] - Complex(0, std::sqrt(3.0))) < 1e-13);
  CHECK_THROWS(eig_small_general(DenseMatrix::Identity(9, 9)));
}

TEST_CASE("resolvent divides by the shifted diagonal and reports poles", "[solver]") {
  const FockBasis basis(Cutoff::two_mode(3));
  DenseVector v = DenseVector::Ones(basis.dim());
  const auto out = resolvent_apply(1.0, 0.5, 0.25, -0.4, v, basis);
  for (Index i = 0; i < basis.dim(); ++i) {
    const auto [na, nb] = basis.occupation(i);
    CHECK(out(i).real() == Catch::Approx(1.0 / (na + 0.5 * nb + 0.25 + 0.4)));
  }
  try {
    resolvent_apply(1.0, 0.5, 0.25, 2.25, v, basis);  // (2, 0) and (1, 2) both hit
    FAIL("expected a pole");
  } catch (const PoleError& e) {
    CHECK(1.0 * e.n_a + 0.5 * e.n_b == Catch::Approx(2.0));
  }
  DenseVector sparse = DenseVector::Zero(basis.dim());
  sparse(basis.index_of(0, 0)) = 1.0;
  CHECK_NOTHROW(resolvent_apply(1.0, 0.5, 0.25, 2.25, sparse, basis));
}

TEST_CASE("lowering moves the resolvent argument up by omega", "[solver]") {
  const FockBasis basis(Cutoff::one_mode(12));
  const auto r = shift_identity_check(basis, 1.0, 0.3, -0.7);  // f(H0 - omega) has a pole at n = 0
  CHECK(r.plus_residual < 1e-12);
  CHECK(std::isinf(r.minus_residual));
  CHECK(r.holding_orientation == "+omega");
  CHECK(r.adjoint_minus_residual < 1e-12);
  CHECK(r.adjoint_plus_residual > 1e-3);

  const auto generic = shift_identity_check(basis, 1.0, 0.5, 0.3);
  CHECK(generic.plus_residual < 1e-12);
  CHECK(generic.minus_residual > 1e-3);
  CHECK(std::isfinite(generic.minus_residual));
  CHECK_THROWS_AS(shift_identity_check(basis, 1.0, 0.5, 2.5), PoleError);
}

TEST_CASE("convergence study differences consecutive rows", "[solver]") {
  auto levels = [](int n, int count) {
    RealVector v(count);
    for (int i = 0; i < count; ++i) v(i) = i + std::pow(0.5, n);
    return v;
  };
  const auto t = convergence_study(levels, {4, 8, 40}, 3, 1e-10);
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0].deltas.size() == 0);
  CHECK(t.rows[1].max_delta == Catch::Approx(std::pow(0.5, 4) - std::pow(0.5, 8)));
  CHECK(t.rows[2].max_delta == Catch::Approx(std::pow(0.5, 8) - std::pow(0.5, 40)));
  CHECK_FALSE(t.all_converged());
  CHECK(convergence_study(levels, {40, 60}, 3, 1e-10).all_converged());
  CHECK_THROWS(convergence_study(levels, {8, 4}, 3));
}

TEST_CASE("spectrum matching pairs nearest unused levels", "[solver]") {
  const auto r = match_spectra({0.0, 1.0, 1.0, 5.0}, {1.0 + 1e-9, 0.0, 1.0, 2.0}, 1e-6);
  CHECK(r.pairs.size() == 3);
  CHECK(r.unmatched_reference == std::vector<double>{5.0});
  CHECK(r.unmatched_numerical == std::vector<double>{2.0});
  CHECK(r.max_error == Catch::Approx(1e-9).margin(1e-12));
  CHECK_FALSE(r.complete());
  CHECK(sorted_deviation({3, 1, 2}, {1, 2, 3.5}) == Catch::Approx(0.5));
  CHECK(std::isinf(sorted_deviation({1}, {1, 2})));
}

TEST_CASE("preset levels from sectors equal the full dense spectrum", "[solver]") {
  const JTParams p{1.0, 1.0, 0.3, 1.0, 1.0};
  const Cutoff cut = Cutoff::two_mode(6);
  const auto s = preset_lowest_levels(p, cut, 12);
  const auto g = to_general(p);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es{DenseMatrix(build_hamiltonian(g.params, FockBasis(cut)).assembled())};
  REQUIRE(s.eigenvalues.size() == 12);
  CHECK((s.eigenvalues - es.eigenvalues().head(12)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(s.residual < 1e-12);
  CHECK_THROWS_AS(preset_lowest_levels(DiracParams{}, Cutoff::one_mode(6), 4), NonHermitianError);
}

TEST_CASE("Gershgorin bound sits below every eigenvalue", "[solver][property]") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix h = random_banded_hermitian(30, 3, rng);
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es{DenseMatrix(h)};
    CHECK(gershgorin_lower(h) <= es.eigenvalues()(0) + 1e-12);
  }
}
