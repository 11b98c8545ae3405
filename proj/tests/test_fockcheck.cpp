#include <cmath>

#include <gtest/gtest.h>

#include "bhf/fockcheck.hpp"
#include "toy_models.hpp"

using namespace bhf;
using namespace bhf::testdata;

namespace {

CVec unit(int n, int i) {
  CVec e = CVec::Zero(n);
  e[i] = 1.0;
  return e;
}

std::vector<DoubledVector> random_doubled(int d, int n, std::uint64_t seed) {
  std::vector<DoubledVector> F;
  for (int i = 0; i < n; ++i) F.push_back({random_vector(d, seed + 2 * i, 1.0), random_vector(d, seed + 2 * i + 1, 1.0)});
  return F;
}

}  // namespace

TEST(FockArena, SingleModeBasis) {
  const FockArena a(1, 3, toy_d1());
  ASSERT_EQ(a.size(), 4);
  const CMat N = CMat(a.number());
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(N(i, i).real(), i, 1e-15);
  EXPECT_EQ((N - CMat(N.diagonal().asDiagonal())).norm(), 0.0);
}

TEST(FockArena, TwoModeBasisAndOrder) {
  const FockArena a(2, 2, toy_d2());
  ASSERT_EQ(a.size(), 6);
  for (int b = 1; b < a.size(); ++b) EXPECT_GE(a.total(b), a.total(b - 1));
  EXPECT_EQ(a.index_of({0, 0}), 0);
  EXPECT_EQ(a.basis()[a.index_of({1, 1})], (std::vector<int>{1, 1}));
}

TEST(FockArena, CanonicalCommutationBelowCutoff) {
  const FockArena a(2, 6, toy_d2());
  const std::vector<int> safe = a.shell_up_to(5);
  for (int m = 0; m < 2; ++m)
    for (int l = 0; l < 2; ++l) {
      const CMat c = CMat(a.a(m) * a.adag(l)) - CMat(a.adag(l) * a.a(m));
      for (int b : safe) {
        const CVec col = c.col(b) - (m == l ? unit(a.size(), b) : CVec::Zero(a.size()));
        EXPECT_LT(col.norm(), 1e-14);
      }
    }
  for (int m = 0; m < 2; ++m) EXPECT_EQ((a.a(m) * a.vacuum()).norm(), 0.0);
}

TEST(FockArena, Guards) {
  EXPECT_THROW(FockArena(0, 4, toy_d1()), std::invalid_argument);
  EXPECT_THROW(FockArena(1, 1, toy_d1()), std::invalid_argument);
  EXPECT_THROW(FockArena(2, 4, toy_d1()), std::invalid_argument);
  EXPECT_THROW(FockArena(6, 60, random_toy_model(6, 1)), std::invalid_argument);
}

TEST(SecondQuantize, Properties) {
  const FockArena a(2, 4, toy_d2());
  EXPECT_EQ((CMat(second_quantize(a, CMat::Identity(2, 2))) - CMat(a.number())).norm(), 0.0);
  const CMat w = random_hermitian(2, 3);
  const CMat dG = CMat(second_quantize(a, w));
  EXPECT_LT((dG - dG.adjoint()).norm(), 1e-14);
  const CVec vac = a.vacuum();
  EXPECT_EQ(std::abs(vac.dot(dG * vac)), 0.0);
  for (int k = 0; k < 2; ++k) {
    const CVec one = a.adag(k) * vac;
    EXPECT_NEAR(std::abs(one.dot(dG * one) - w(k, k)), 0.0, 1e-14);
  }
  // preserves total occupation
  for (int b = 0; b < a.size(); ++b)
    for (int c = 0; c < a.size(); ++c)
      if (a.total(b) != a.total(c)) EXPECT_EQ(dG(b, c), cplx(0.0));
}

TEST(FiberHamiltonian, VacuumAndHermiticity) {
  const PhotonModel m = toy_d2();
  const FockArena a(2, 6, m);
  const CMat H = CMat(fiber_hamiltonian(a));
  EXPECT_LT((H - H.adjoint()).norm(), 1e-12);
  const CVec vac = a.vacuum();
  EXPECT_NEAR(vac.dot(H * vac).real(), coupling_energy(m), 1e-14);
}

TEST(FiberHamiltonian, ZeroCoupling) {
  PhotonModel m = toy_d2();
  for (auto& g : m.G) g.setZero();
  const FockArena a(2, 5, m);
  CMat expect = CMat(second_quantize(a, m.kabs.matrix()));
  for (int nu = 0; nu < 3; ++nu) {
    const CMat d = CMat(second_quantize(a, m.k[nu].matrix()));
    expect += 0.5 * d * d;
  }
  EXPECT_LT((CMat(fiber_hamiltonian(a)) - expect).norm(), 1e-13);
  EXPECT_EQ(std::abs(a.vacuum().dot(fiber_hamiltonian(a) * a.vacuum())), 0.0);
}

TEST(FiberHamiltonian, TermAssemblyAgreesBelowCutoff) {
  for (int d : {1, 2, 3}) {
    const FockArena a(d, 6, random_toy_model(d, 10 + d));
    const CMat H = CMat(fiber_hamiltonian(a)), T = CMat(fiber_hamiltonian_terms(a, 20 + d));
    for (int b : a.shell_up_to(4)) EXPECT_LT((H.col(b) - T.col(b)).norm(), 1e-12) << "d=" << d;
  }
}

TEST(PureQuasifree, TrivialIsVacuum) {
  const FockArena a(2, 6, toy_d2());
  const PureQuasifreeState s = prepare_pure_quasifree(a, CMat::Zero(2, 2), CVec::Zero(2));
  EXPECT_LT((s.vector - a.vacuum()).norm(), 1e-15);
  EXPECT_NEAR(s.vector.norm(), 1.0, 1e-12);
}

TEST(PureQuasifree, SqueezedNumber) {
  const FockArena a(1, 40, toy_d1());
  const PureQuasifreeState s = prepare_pure_quasifree(a, CMat::Constant(1, 1, 0.5), CVec::Zero(1));
  const double n = s.vector.dot(a.number() * s.vector).real();
  EXPECT_NEAR(n, std::pow(std::sinh(0.5), 2), 1e-6);
  EXPECT_NEAR(n, kSqueezedNumber, 1e-12);
}

TEST(PureQuasifree, CoherentNumber) {
  const FockArena a(1, 40, toy_d1());
  const CVec eta = CVec::Constant(1, cplx(0.3, -0.2));
  const PureQuasifreeState s = prepare_pure_quasifree(a, CMat::Zero(1, 1), eta);
  EXPECT_NEAR(s.vector.dot(a.number() * s.vector).real(), eta.squaredNorm(), 1e-10);
}

TEST(PureQuasifree, LeakageAndInputGuards) {
  const FockArena a(1, 4, toy_d1());
  EXPECT_THROW(prepare_pure_quasifree(a, CMat::Constant(1, 1, 0.3), CVec::Constant(1, 0.2)), NumericalError);
  const FockArena b(2, 4, toy_d2());
  CMat nonsym(2, 2);
  nonsym << 0.1, 0.2, 0.0, 0.1;
  EXPECT_THROW(prepare_pure_quasifree(b, nonsym, CVec::Zero(2)), std::invalid_argument);
}

TEST(PureQuasifree, ImpliedPairSatisfiesRelations) {
  const PhotonModel m = toy_d2();
  const FockArena a(2, 24, m);
  const PureQuasifreeState s = prepare_pure_quasifree(a, xi_d2(), eta_d2());
  EXPECT_LT(relation_residuals(s.pair, m.J).max(), 1e-12);
  EXPECT_LT(s.action_residual, 1e-4);
}

TEST(Pairings, Counts) {
  EXPECT_EQ(enumerate_pairings(1).size(), 1u);
  const auto p2 = enumerate_pairings(2);
  ASSERT_EQ(p2.size(), 3u);
  EXPECT_EQ(p2[0], (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(p2[1], (std::vector<int>{0, 2, 1, 3}));
  EXPECT_EQ(p2[2], (std::vector<int>{0, 3, 1, 2}));
  EXPECT_EQ(enumerate_pairings(3).size(), 15u);
  EXPECT_EQ(enumerate_pairings(4).size(), 105u);
  EXPECT_EQ(fourth_order_X().size(), 6u);
  EXPECT_THROW(enumerate_pairings(0), std::invalid_argument);
}

TEST(DoubledSpace, Maps) {
  const Involution J = toy_involution(2);
  const CVec phi = random_vector(2, 1, 1.0);
  const DoubledVector q = q_map(J, phi);
  EXPECT_EQ(q.f, phi);
  EXPECT_EQ(q.g, J.apply(phi));
  const DoubledVector F{random_vector(2, 2, 1.0), random_vector(2, 3, 1.0)};
  const DoubledVector JJ = script_j(J, script_j(J, F));
  EXPECT_EQ(JJ.f, F.f);
  EXPECT_EQ(JJ.g, F.g);
  // the adjoint field is the field of the script-J image
  const FockArena a(2, 4, toy_d2());
  EXPECT_LT((CMat(a.field_adj(F)) - CMat(a.field(script_j(J, F)))).norm(), 1e-14);
}

TEST(StringExpectation, OrderOneIsWeylTerm) {
  const PhotonModel m = toy_d2();
  const FockArena a(2, 20, m);
  const PureQuasifreeState s = prepare_pure_quasifree(a, xi_d2(), eta_d2());
  const auto F = random_doubled(2, 1, 5);
  EXPECT_EQ(string_expectation_formula(m.J, s.pair, s.eta, F), std::conj(weyl_term(m.J, s.eta, F[0])));
  EXPECT_LT(std::abs(string_expectation_formula(m.J, s.pair, s.eta, F) - string_expectation_fock(a, s, F)), 1e-6);
}

TEST(StringExpectation, OddOrdersVanishWithoutDisplacement) {
  const PhotonModel m = toy_d2();
  const FockArena a(2, 20, m);
  const PureQuasifreeState s = prepare_pure_quasifree(a, xi_d2(), CVec::Zero(2));
  for (int n : {1, 3}) {
    const auto F = random_doubled(2, n, 10 * n);
    EXPECT_EQ(string_expectation_formula(m.J, s.pair, s.eta, F), cplx(0.0));
    EXPECT_LT(std::abs(string_expectation_fock(a, s, F)), 1e-10);
  }
}

TEST(StringExpectation, WickAgainstFock) {
  for (int d : {1, 2}) {
    const PhotonModel m = random_toy_model(d, 100 + d);
    const FockArena a(d, d == 1 ? 40 : 24, m);
    for (int t = 0; t < 5; ++t) {
      const PureQuasifreeState s = prepare_pure_quasifree(a, random_real_symmetric(d, 200 + 10 * t + d, 0.3),
                                                          random_vector(d, 300 + 10 * t + d, 0.3));
      for (int n = 1; n <= 4; ++n) {
        const auto F = random_doubled(d, n, 400 + 10 * t + n);
        const cplx f = string_expectation_formula(m.J, s.pair, s.eta, F);
        EXPECT_LT(std::abs(f - string_expectation_fock(a, s, F)), 1e-6) << "d=" << d << " n=" << n;
      }
    }
  }
  EXPECT_THROW(string_expectation_formula(toy_involution(1), {CMat::Identity(1, 1), CMat::Zero(1, 1)}, CVec::Zero(1),
                                          random_doubled(1, 5, 1)),
               std::invalid_argument);
}

TEST(StringExpectation, WrongPairConventionIsDetected) {
  const PhotonModel m = toy_d2();
  const FockArena a(2, 24, m);
  const PureQuasifreeState s = prepare_pure_quasifree(a, xi_d2(), CVec::Zero(2));
  const BogolubovPair wrong{s.pair.U, m.J.permute_rows(s.pair.V)};  // plain sinh(xi)
  double worst = 0;
  for (int t = 0; t < 5; ++t) {
    const auto F = random_doubled(2, 2, 500 + 2 * t);
    worst = std::max(worst, std::abs(string_expectation_formula(m.J, wrong, s.eta, F) - string_expectation_fock(a, s, F)));
  }
  EXPECT_GT(worst, 1e-2);
}

TEST(OracleCompare, Vacuum) {
  const PhotonModel m = toy_d2();
  const OracleReport r = oracle_compare(FockArena(2, 6, m), CMat::Zero(2, 2), CVec::Zero(2));
  EXPECT_LT(r.rel_error, 1e-12);
  EXPECT_NEAR(r.fock_energy, coupling_energy(m), 1e-14);
}

TEST(OracleCompare, SingleModeFrozen) {
  const OracleReport r = oracle_compare(FockArena(1, 40, toy_d1()), CMat::Constant(1, 1, 0.3), CVec::Constant(1, 0.2));
  EXPECT_LT(r.rel_error, 1e-6);
  EXPECT_NEAR(r.fock_energy, kEnergyD1, 1e-6 * kEnergyD1);
  EXPECT_NEAR(r.formula_energy, kEnergyD1, 1e-12);
}

TEST(OracleCompare, TwoModeFrozen) {
  const OracleReport r = oracle_compare(FockArena(2, 24, toy_d2()), xi_d2(), eta_d2());
  EXPECT_LT(r.rel_error, 1e-5);
  EXPECT_NEAR(r.fock_energy, kEnergyD2, 1e-5 * kEnergyD2);
  const auto j = r.to_json();
  EXPECT_EQ(j["d"].get<int>(), 2);
  EXPECT_EQ(j["n_max"].get<int>(), 24);
}

TEST(OracleCompare, TruncationConverges) {
  const PhotonModel m = toy_d2();
  double prev = 1e300;
  for (int n : {20, 24, 28}) {
    const double e1 = oracle_compare(FockArena(2, n, m), xi_d2(), eta_d2(), 1e-2).fock_energy;
    const double e2 = oracle_compare(FockArena(2, n + 4, m), xi_d2(), eta_d2(), 1e-2).fock_energy;
    const double diff = std::abs(e1 - e2);
    EXPECT_LT(diff, prev);
    prev = diff;
  }
}

TEST(ExpAntihermitian, Unitary) {
  const CMat H = random_hermitian(5, 1);
  const CMat U = exp_antihermitian(cplx(0, 1) * H);
  EXPECT_LT((U.adjoint() * U - CMat::Identity(5, 5)).norm(), 1e-13);
  EXPECT_THROW(exp_antihermitian(H), std::invalid_argument);
}
