#include <catch_amalgamated.hpp>

#include <cmath>

#include "spinboson/liealg.hpp"

using namespace spinboson;

namespace {

DenseMatrix dense(const ComplexMatrix& m) { return DenseMatrix(m); }

int margin_for(const RealizationId& id) { return 2 * id.reach(); }

FockBasis basis_for(const RealizationId& id, int n_max) {
  return id.two_mode() ? FockBasis(Cutoff::two_mode(n_max)) : FockBasis(Cutoff::one_mode(n_max));
}

const std::vector<RealizationId> kAll = {
    RealizationId::su2_two_mode(),   RealizationId::su2_single(3.0),    RealizationId::su2_single(2.5),
    RealizationId::su11_two_mode(),  RealizationId::su11_single_l(),    RealizationId::su11_single_s(0.5),
    RealizationId::su11_single_s(1.5), RealizationId::sp4_t(),
};

}  // namespace

TEST_CASE("every realization closes on the interior", "[liealg][property]") {
  for (int n_max : {8, 11, 16}) {
    for (const auto& id : kAll) {
      INFO(id.name() << " n_max=" << n_max);
      const auto t = build_realization(id, basis_for(id, n_max));
      const auto r = verify_commutation_detail(t, margin_for(id));
      CHECK(r.zero_plus < 1e-12);
      CHECK(r.zero_minus < 1e-12);
      CHECK(r.plus_minus < 1e-12);
      CHECK(r.counter < 1e-12);
      CHECK(r.casimir < 1e-12);
    }
  }
}

TEST_CASE("two-mode generators have the bilinear matrix elements", "[liealg]") {
  const FockBasis basis(Cutoff::two_mode(5));
  const DenseMatrix jp = dense(build_realization(RealizationId::su2_two_mode(), basis).plus);
  const DenseMatrix kp = dense(build_realization(RealizationId::su11_two_mode(), basis).plus);
  for (int na = 0; na < 5; ++na)
    for (int nb = 0; nb < 5; ++nb) {
      const Index col = basis.index_of(na, nb);
      if (nb > 0) CHECK(jp(basis.index_of(na + 1, nb - 1), col).real() == Catch::Approx(std::sqrt((na + 1.0) * nb)));
      CHECK(kp(basis.index_of(na + 1, nb + 1), col).real() == Catch::Approx(std::sqrt((na + 1.0) * (nb + 1.0))));
    }
}

TEST_CASE("labelled states carry the irreducible ladder coefficients", "[liealg]") {
  const auto su2 = build_realization(RealizationId::su2_two_mode(), FockBasis(Cutoff::two_mode(8)));
  for (int two_j = 0; two_j <= 6; ++two_j)
    for (int two_m = -two_j; two_m <= two_j; two_m += 2)
      CHECK(verify_state_action(su2, Su2Label{two_j / 2.0, two_m / 2.0}).max() < 1e-13);

  const auto su11 = build_realization(RealizationId::su11_two_mode(), FockBasis(Cutoff::two_mode(9)));
  for (double k : {0.5, 1.0, 1.5, 3.0})
    for (int n = 0; n < 4; ++n)
      for (bool mirrored : {false, true}) CHECK(verify_state_action(su11, Su11Label{k, n, mirrored}).max() < 1e-13);

  const auto l = build_realization(RealizationId::su11_single_l(), FockBasis(Cutoff::one_mode(12)));
  for (double k : {0.25, 0.75})
    for (int n = 0; n < 4; ++n) CHECK(verify_state_action(l, Su11Label{k, n}).max() < 1e-13);

  const auto s = build_realization(RealizationId::su2_single(2.0), FockBasis(Cutoff::one_mode(6)));
  for (int two_m = -4; two_m <= 4; two_m += 2) CHECK(verify_state_action(s, Su2Label{2.0, two_m / 2.0}).max() < 1e-13);
}

TEST_CASE("su(1,1) two-mode Casimir is k(1-k) on the sector", "[liealg]") {
  const FockBasis basis(Cutoff::two_mode(7));
  const auto t = build_realization(RealizationId::su11_two_mode(), basis);
  const DenseMatrix c = dense(casimir(t));
  const DenseMatrix cg = dense(casimir_from_generators(t));
  for (double k : {0.5, 1.0, 2.5}) {
    for (Index i : sector_states(Algebra::su11, k, basis)) {
      CHECK(c(i, i).real() == Catch::Approx(k * (1.0 - k)).margin(1e-12));
      const auto [na, nb] = basis.occupation(i);
      if (na < 6 && nb < 6) CHECK(cg(i, i).real() == Catch::Approx(k * (1.0 - k)).margin(1e-12));
    }
  }
}

TEST_CASE("finite su(2) realization lives on n <= 2j only", "[liealg]") {
  const auto t = build_realization(RealizationId::su2_single(1.5), FockBasis(Cutoff::one_mode(8)));
  CHECK(std::count(t.representation.begin(), t.representation.end(), true) == 4);
  // J+ cannot leave the representation: row 4 of J- from column 3 is zero.
  CHECK(std::abs(dense(t.minus)(4, 3)) == 0.0);
  CHECK_THROWS(build_realization(RealizationId::su2_single(5.0), FockBasis(Cutoff::one_mode(8))));
  CHECK_THROWS(build_realization(RealizationId::su2_single(0.3), FockBasis(Cutoff::one_mode(8))));
  CHECK_THROWS(build_realization(RealizationId::su2_two_mode(), FockBasis(Cutoff::one_mode(8))));
}

TEST_CASE("linear ladders divided by two do not close", "[liealg]") {
  // T- = b/2 taken literally: [T-, T+] is a constant, not 2 T0.
  const FockBasis basis(Cutoff::one_mode(10));
  const ComplexMatrix b = build_annihilation(basis, Mode::a).matrix;
  const ComplexMatrix tm = 0.5 * b, tp = 0.5 * adjoint_of(b);
  const auto quad = build_realization(RealizationId::sp4_t(), basis);
  const ComplexMatrix p = verification_projector(quad, 4);
  const double literal = max_abs(ComplexMatrix(p * (commutator(tm, tp) - 2.0 * quad.zero) * p));
  const double quadratic = max_abs(ComplexMatrix(p * (commutator(quad.minus, quad.plus) - 2.0 * quad.zero) * p));
  CHECK(literal > 0.5);
  CHECK(quadratic < 1e-12);
}

TEST_CASE("sector_states lists the labelled occupations in order", "[liealg]") {
  const FockBasis basis(Cutoff::two_mode(4));
  const auto k1 = sector_states(Algebra::su11, 1.5, basis);
  REQUIRE(k1.size() == 3);
  CHECK(k1[0] == basis.index_of(0, 2));
  CHECK(k1[2] == basis.index_of(2, 4));
  const auto mirrored = sector_states(Algebra::su11, 1.5, basis, true);
  CHECK(mirrored[1] == basis.index_of(3, 1));
  const auto j = sector_states(Algebra::su2, 1.5, basis);
  REQUIRE(j.size() == 4);
  CHECK(j.front() == basis.index_of(3, 0));
  CHECK(j.back() == basis.index_of(0, 3));
  CHECK(sector_states(Algebra::su2, 3.5, basis).size() == 2);  // (4,3) and (3,4)
  CHECK_THROWS(sector_states(Algebra::su11, 0.25, basis));
}

TEST_CASE("boson bilinears decompose into sp(4) generators", "[liealg][sp4]") {
  const auto rep = product_decomposition_check(FockBasis(Cutoff::two_mode(10)));
  REQUIRE(rep.identities.size() == 16);
  CHECK(rep.max_exact_deviation < 1e-12);
  int halved = 0, counter_swaps = 0;
  for (const auto& id : rep.identities) {
    if (id.factor == 2.0) {
      ++halved;
      CHECK(id.displayed_deviation > 0.1);
    }
    if (id.note.find("M'") != std::string::npos) {
      ++counter_swaps;
      CHECK(id.displayed_deviation > 0.1);
    }
    if (id.note.empty()) CHECK(id.displayed_deviation < 1e-12);
  }
  CHECK(halved == 4);
  CHECK(counter_swaps == 2);
  CHECK(rep.discrepancies.size() == 6);
}
