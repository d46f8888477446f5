#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "spinboson/models.hpp"
#include "spinboson/solver.hpp"

using namespace spinboson;

namespace {

// Element-by-element assembly from occupation numbers.
DenseMatrix assemble_by_hand(const GeneralParams& g, const FockBasis& basis) {
  const Index d = basis.dim();
  DenseMatrix h = DenseMatrix::Zero(2 * d, 2 * d);
  const bool two = basis.modes() == 2;
  for (Index j = 0; j < d; ++j) {
    const auto [na, nb] = basis.occupation(j);
    const double e = g.omega1 * na + (two ? g.omega2 * nb : 0.0);
    h(j, j) = e - g.beta;
    h(d + j, d + j) = e + g.beta;
    auto put = [&](int ta, int tb, double amp, Complex upper, Complex lower) {
      if (!basis.contains(ta, tb)) return;
      const Index i = basis.index_of(ta, tb);
      h(i, d + j) += upper * amp;
      h(d + i, j) += lower * amp;
    };
    put(na - 1, nb, std::sqrt(na), g.kappa1, g.gamma1);
    put(na + 1, nb, std::sqrt(na + 1.0), g.kappa2, g.gamma2);
    if (two) {
      put(na, nb - 1, std::sqrt(nb), g.kappa3, g.gamma3);
      put(na, nb + 1, std::sqrt(nb + 1.0), g.kappa4, g.gamma4);
    }
  }
  return h;
}

FockBasis basis_for(ModelKind k, int n) {
  return two_mode_model(k) ? FockBasis(Cutoff::two_mode(n)) : FockBasis(Cutoff::one_mode(n));
}

PresetParams random_preset(ModelKind k, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.2, 2.0);
  switch (k) {
    case ModelKind::jt: return JTParams{u(rng), u(rng), u(rng), u(rng), u(rng)};
    case ModelKind::dot: return DotParams{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), 1.0};
    case ModelKind::jc: return JCParams{u(rng), u(rng), u(rng), 1.0};
    case ModelKind::jcrwa: return JCRWAParams{u(rng), u(rng), u(rng), 1.0};
    case ModelKind::mjc: return MJCParams{u(rng), u(rng), u(rng), u(rng), 1.0};
    default: return DiracParams{u(rng), u(rng), u(rng), 1.0};
  }
}

const std::vector<ModelKind> kPresets = {ModelKind::jt,    ModelKind::dot, ModelKind::jc,
                                         ModelKind::jcrwa, ModelKind::mjc, ModelKind::dirac};

}  // namespace

TEST_CASE("JT maps onto the general form", "[models]") {
  const auto f = to_general(JTParams{2.0, 3.0, 0.4, 0.7, 1.5});
  // sqrt(m omega / (4 hbar)) = sqrt(6 / 6) = 1
  CHECK(f.params.kappa1.real() == Catch::Approx(0.7));
  CHECK(f.params.kappa4 == f.params.kappa1);
  CHECK(f.params.gamma2 == f.params.kappa1);
  CHECK(f.params.gamma3 == f.params.kappa1);
  CHECK(f.params.kappa2 == Complex(0.0));
  CHECK(f.params.omega1 == Catch::Approx(4.5));
  CHECK(f.params.omega2 == Catch::Approx(4.5));
  CHECK(f.params.beta == Catch::Approx(0.2));
  CHECK(f.params.hermitian_pairing());
}

TEST_CASE("Dot maps onto the general form with an offset", "[models]") {
  const DotParams p{0.5, 1.2, 0.8, 0.3, 2.0, 0.5, 1.0, 1.0};
  const auto f = to_general(p);
  const double wc = 0.8 / 0.5, w = std::sqrt(1.44 + 0.25 * wc * wc);
  CHECK(f.params.omega1 == Catch::Approx(w + wc / 2));
  CHECK(f.params.omega2 == Catch::Approx(w - wc / 2));
  CHECK(f.offset == Catch::Approx(w));
  const double lp = std::sqrt(0.5 * w / 4.0) * 0.3;
  CHECK(f.params.kappa1.real() == Catch::Approx(lp));
  CHECK(f.params.kappa4.real() == Catch::Approx(-lp));
  CHECK(f.params.gamma3.real() == Catch::Approx(-lp));
  CHECK(f.params.beta == Catch::Approx(0.5 * 2.0 * 0.5 * 0.8));
  CHECK(f.params.hermitian_pairing());
}

TEST_CASE("one-mode presets and the Dirac coupling", "[models]") {
  const auto jc = to_general(JCParams{1.3, 0.9, 0.2, 2.0}).params;
  CHECK(jc.omega1 == Catch::Approx(2.6));
  CHECK(jc.beta == Catch::Approx(0.9));
  CHECK(jc.kappa2 == Complex(0.2));
  CHECK(jc.gamma1 == Complex(0.2));
  CHECK_FALSE(jc.uses_mode_b());
  const auto rwa = to_general(JCRWAParams{1.0, 1.0, 0.4, 1.0}).params;
  CHECK(rwa.kappa2 == Complex(0.0));
  CHECK(rwa.gamma1 == Complex(0.0));
  const auto mjc = to_general(MJCParams{1.0, 0.7, 0.3, 0.4, 1.0}).params;
  CHECK(mjc.beta == Catch::Approx(0.7));
  CHECK(mjc.kappa3 == Complex(0.4));
  CHECK(mjc.gamma4 == Complex(0.4));
  const auto dirac = to_general(DiracParams{2.0, 1.5, 0.5, 1.0}).params;
  CHECK(dirac.kappa1.imag() == Catch::Approx(2.0 * 1.5 * 1.0));
  CHECK(dirac.kappa1 == dirac.gamma2);
  CHECK(dirac.beta == Catch::Approx(2.0 * 2.25));
  CHECK_FALSE(dirac.hermitian_pairing());
}

TEST_CASE("assembled Hamiltonian matches element-wise construction", "[models][property]") {
  std::mt19937 rng(11);
  for (ModelKind k : kPresets)
    for (int n : {3, 6}) {
      const auto p = random_preset(k, rng);
      const FockBasis basis = basis_for(k, n);
      const auto g = to_general(p).params;
      const auto build = build_hamiltonian(g, basis);
      INFO(model_name(k) << " n=" << n);
      CHECK((DenseMatrix(build.assembled()) - assemble_by_hand(g, basis)).cwiseAbs().maxCoeff() < 1e-14);
      CHECK(build.hermitian == (k != ModelKind::dirac));
      if (build.hermitian) CHECK(hermiticity_defect(build.assembled()) == 0.0);
    }
}

TEST_CASE("general couplings with complex phases keep Hermiticity when paired", "[models]") {
  GeneralParams g;
  g.omega1 = 1.0;
  g.omega2 = 0.7;
  g.beta = 0.3;
  g.kappa1 = {0.2, 0.1};
  g.kappa2 = {0.0, -0.3};
  g.kappa3 = {0.5, 0.0};
  g.kappa4 = {0.1, 0.4};
  g.gamma1 = std::conj(g.kappa2);
  g.gamma2 = std::conj(g.kappa1);
  g.gamma3 = std::conj(g.kappa4);
  g.gamma4 = std::conj(g.kappa3);
  const FockBasis basis(Cutoff::two_mode(4));
  const auto build = build_hamiltonian(g, basis);
  CHECK(build.hermitian);
  CHECK(hermiticity_defect(build.assembled()) < 1e-15);
  g.gamma4 += 0.1;
  CHECK_FALSE(build_hamiltonian(g, basis).hermitian);
  CHECK_THROWS(build_hamiltonian(g, FockBasis(Cutoff::one_mode(4))));
}

TEST_CASE("conserved charges commute with H at random parameters", "[models][property]") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> cut(2, 9);
  for (int trial = 0; trial < 8; ++trial)
    for (ModelKind k : kPresets) {
      const FockBasis basis = basis_for(k, cut(rng));
      const auto build = build_hamiltonian(to_general(random_preset(k, rng)).params, basis);
      INFO(model_name(k));
      CHECK(charge_commutator(build.assembled(), conserved_charge(k, basis).diagonal) < 1e-12);
    }
}

TEST_CASE("counter-rotating terms break the rotating-wave charge", "[models]") {
  const FockBasis basis(Cutoff::one_mode(6));
  const auto h = build_hamiltonian(to_general(JCParams{1.0, 1.0, 0.3, 1.0}).params, basis).assembled();
  CHECK(charge_commutator(h, conserved_charge(ModelKind::jcrwa, basis).diagonal) > 0.1);
  CHECK_THROWS(sector_decompose(h, conserved_charge(ModelKind::jcrwa, basis)));
}

TEST_CASE("sectors partition the basis and reproduce the spectrum", "[models][property]") {
  std::mt19937 rng(5);
  for (ModelKind k : kPresets) {
    if (k == ModelKind::dirac) continue;
    const FockBasis basis = basis_for(k, 5);
    const auto build = build_hamiltonian(to_general(random_preset(k, rng)).params, basis);
    const auto sectors = sector_decompose(build, conserved_charge(k, basis));
    Index total = 0;
    std::vector<double> merged;
    for (const auto& s : sectors) {
      total += static_cast<Index>(s.indices.size());
      Eigen::SelfAdjointEigenSolver<DenseMatrix> es{DenseMatrix(s.matrix)};
      for (Index i = 0; i < es.eigenvalues().size(); ++i) merged.push_back(es.eigenvalues()(i));
    }
    CHECK(total == 2 * basis.dim());
    Eigen::SelfAdjointEigenSolver<DenseMatrix> full{DenseMatrix(build.assembled())};
    INFO(model_name(k));
    CHECK(sorted_deviation(merged, to_std(full.eigenvalues())) < 1e-12);
  }
}

TEST_CASE("rotating-wave sectors are 1x1 at the bottom and 2x2 above", "[models]") {
  const FockBasis basis(Cutoff::one_mode(6));
  const auto build = build_hamiltonian(to_general(JCRWAParams{1.0, 1.0, 0.3, 1.0}).params, basis);
  const auto sectors = sector_decompose(build, conserved_charge(ModelKind::jcrwa, basis));
  REQUIRE(sectors.size() == 8);
  CHECK(sectors.front().charge == Catch::Approx(-0.5));
  CHECK(sectors.front().indices.size() == 1);
  for (std::size_t i = 1; i + 1 < sectors.size(); ++i) CHECK(sectors[i].indices.size() == 2);
  CHECK(sectors.back().indices.size() == 1);  // truncation leaves (n_max, upper) alone
}

TEST_CASE("MJC shells hold both components of the boson number", "[models]") {
  const FockBasis basis(Cutoff::two_mode(6));
  const auto build = build_hamiltonian(to_general(MJCParams{1.0, 1.0, 0.3, 0.4, 1.0}).params, basis);
  const auto sectors = sector_decompose(build, conserved_charge(ModelKind::mjc, basis));
  for (const auto& s : sectors) {
    // charge c: upper states with n_a + n_b = c - 1/2, lower with c + 1/2 - 1
    const int upper_n = static_cast<int>(std::lround(s.charge - 0.5));
    auto shell = [](int n) { return n < 0 ? 0 : (n <= 6 ? n + 1 : std::max(0, 13 - n)); };
    CHECK(static_cast<int>(s.indices.size()) == shell(upper_n) + shell(upper_n + 1));
  }
}

TEST_CASE("JC parity sectors split the spinor basis in half", "[models]") {
  const FockBasis basis(Cutoff::one_mode(9));
  const auto build = build_hamiltonian(to_general(JCParams{1.0, 0.8, 0.4, 1.0}).params, basis);
  const auto sectors = sector_decompose(build, conserved_charge(ModelKind::jc, basis));
  REQUIRE(sectors.size() == 2);
  CHECK(sectors[0].indices.size() == 10);
  CHECK(sectors[1].indices.size() == 10);
}
