#include <cmath>

#include <gtest/gtest.h>

#include "bhf/energy.hpp"
#include "bhf/fockcheck.hpp"
#include "bhf/grid.hpp"
#include "toy_models.hpp"

using namespace bhf;
using namespace bhf::testdata;

namespace {

PhotonModel grid_model(double g = 1.0) { return make_model(build_grid(1, 2, 2, 2, 4), g); }

CMat sym_psd(const Involution& J, std::uint64_t seed, double lo, double hi) {
  return project(random_psd(J.dim(), seed, lo, hi), ProjectionMode::both, J);
}

CVec sym_vec(const Involution& J, std::uint64_t seed, double norm) {
  const CVec v = random_vector(J.dim(), seed, norm);
  return 0.5 * (v + J.apply(v));
}

CMat sym_hermitian(const Involution& J, std::uint64_t seed, double scale) {
  const CMat H = random_hermitian(J.dim(), seed);
  const CMat S = 0.5 * (H + J.conjugate(H));
  return scale * S / eigh(S).values.cwiseAbs().maxCoeff();
}

BogolubovPair coshsinh_pair(const CMat& r) {
  return {apply_function(r, [](double x) { return std::cosh(x); }),
          apply_function(r, [](double x) { return std::sinh(x); })};
}

}  // namespace

TEST(EnergyFull, VacuumGivesCouplingEnergy) {
  const PhotonModel m = grid_model();
  const int n = m.dim();
  const BogolubovPair B{CMat::Identity(n, n), CMat::Zero(n, n)};
  const CVec zero = CVec::Zero(n);
  EXPECT_NEAR(energy_full(m, B, zero).total, coupling_energy(m), 1e-12);
  EXPECT_NEAR(energy_reduced_V(m, CMat::Zero(n, n), zero).total, coupling_energy(m), 1e-12);
  EXPECT_NEAR(energy_reduced_z(m, CMat::Zero(n, n), zero, Vec3::Zero()).total, coupling_energy(m), 1e-12);
  EXPECT_NEAR(energy_coherent(m, zero).total, coupling_energy(m), 1e-12);
}

TEST(EnergyFull, TrivialPairMatchesCoherent) {
  const PhotonModel m = grid_model();
  const int n = m.dim();
  const BogolubovPair B{CMat::Identity(n, n), CMat::Zero(n, n)};
  for (int s = 0; s < 5; ++s) {
    const CVec eta = random_vector(n, 10 + s, 0.8);
    const double a = energy_full(m, B, eta).total, b = energy_coherent(m, eta).total;
    EXPECT_NEAR(a, b, 1e-12 * (1 + std::abs(b)));
  }
}

TEST(EnergyFull, RejectsInvalidPair) {
  const PhotonModel m = grid_model();
  BogolubovPair B = random_bogolubov(m.J, 3, 0.5);
  B.U *= 1.01;
  EXPECT_THROW(energy_full(m, B, CVec::Zero(m.dim())), std::invalid_argument);
}

TEST(EnergyFull, SingleModeHandValue) {
  const double frozen = kEnergyD1;
  const PhotonModel m = toy_d1();
  const CMat r = CMat::Constant(1, 1, 0.3);
  const CVec eta = CVec::Constant(1, 0.2);
  EXPECT_NEAR(energy_full(m, coshsinh_pair(r), eta).total, frozen, 1e-12);
  EXPECT_NEAR(energy_coshsinh(m, r, eta).total, frozen, 1e-12);
}

TEST(EnergyFull, TwoModeFrozenValue) {
  const double frozen = kEnergyD2;
  const PhotonModel m = toy_d2();
  const CMat xi = xi_d2();
  const CVec eta = eta_d2();
  // squeeze exp(1/2 sum xi_ml (a_m* a_l* - a_m a_l)) has pair (cosh xi, P sinh xi)
  BogolubovPair B = coshsinh_pair(xi);
  B.V = m.J.permute_rows(B.V);
  EXPECT_NEAR(energy_full(m, B, eta).total, frozen, 1e-11);
  // the unpermuted block is not a valid pair for this J
  EXPECT_THROW(energy_full(m, coshsinh_pair(xi), eta), std::invalid_argument);
}

TEST(EnergyReduced, ZAndVFormsAgree) {
  const PhotonModel m = grid_model();
  for (int s = 0; s < 20; ++s) {
    const CMat z = random_psd(m.dim(), 100 + s, 0.0, 2.0);
    const CVec eta = random_vector(m.dim(), 200 + s, 0.7);
    const double ez = energy_reduced_z(m, z, eta, Vec3::Zero()).total;
    const double ev = energy_reduced_V(m, v_from_z(z), eta).total;
    EXPECT_LT(std::abs(ez - ev), 1e-10 * (1 + std::abs(ez)));
  }
}

TEST(EnergyReduced, TraceIdentity) {
  const PhotonModel m = grid_model();
  const int n = m.dim();
  const CMat I = CMat::Identity(n, n);
  for (int s = 0; s < 10; ++s) {
    const CMat z = random_psd(n, 300 + s, 0.0, 3.0);
    const CMat R = resolvent_shift(z);
    const CMat A = R * z * z, B = R * (z * z + 2 * z), C = R * z;
    for (int nu = 0; nu < 3; ++nu) {
      const CMat k = m.k[nu].matrix();
      const cplx lhs = trace_product(k * A * k, 4 * I + A) - trace_product(k * B * k, B);
      const cplx rhs = 4.0 * (trace_product(k * k, A) - trace_product(k * z * k, C));
      EXPECT_LT(std::abs(lhs - rhs), 1e-9 * (1 + std::abs(rhs)));
    }
  }
}

TEST(EnergyReduced, RejectsIndefinite) {
  const PhotonModel m = grid_model();
  CMat V = CMat::Zero(m.dim(), m.dim());
  V(0, 0) = -0.1;
  EXPECT_THROW(energy_reduced_V(m, V, CVec::Zero(m.dim())), std::invalid_argument);
  EXPECT_THROW(energy_reduced_z(m, V, CVec::Zero(m.dim()), Vec3::Zero()), std::invalid_argument);
}

TEST(EnergyReduced, SymmetricFamilyEquality) {
  const PhotonModel m = grid_model();
  const int n = m.dim();
  for (int s = 0; s < 20; ++s) {
    const CMat V = sym_psd(m.J, 400 + s, 0.0, 1.0);
    const CVec eta = sym_vec(m.J, 500 + s, 0.7);
    const BogolubovPair B{sqrt_psd(CMat::Identity(n, n) + V * V), V};
    EXPECT_NEAR(energy_full(m, B, eta).total, energy_reduced_V(m, V, eta).total, 1e-10);
  }
}

TEST(EnergyReduced, LowerBoundOrdering) {
  const PhotonModel m = grid_model();
  for (int s = 0; s < 50; ++s) {
    const BogolubovPair B = random_bogolubov(m.J, 600 + s, 1.0);
    const CVec eta = random_vector(m.dim(), 700 + s, 0.5);
    const double ef = energy_full(m, B, eta).total;
    const double ev = energy_reduced_V(m, sqrt_psd(B.V.adjoint() * B.V), eta).total;
    EXPECT_GE(ef, ev - 1e-9);
  }
}

TEST(EnergyReduced, PShiftCovariance) {
  const PhotonModel m = grid_model();
  const CMat z = random_psd(m.dim(), 800, 0.0, 1.0);
  const CVec eta = random_vector(m.dim(), 801, 0.5);
  const EnergyBreakdown e0 = energy_reduced_z(m, z, eta, Vec3::Zero());
  const Vec3 p(e0.bracket[0], e0.bracket[1], e0.bracket[2]);
  const EnergyBreakdown e1 = energy_reduced_z(m, z, eta, p);
  double sq = 0;
  for (int nu = 0; nu < 3; ++nu) {
    EXPECT_NEAR(e1.bracket[nu], 0.0, 1e-14);
    EXPECT_EQ(e1.offdiag_trace[nu], e0.offdiag_trace[nu]);
    EXPECT_EQ(e1.field[nu], e0.field[nu]);
    sq += e0.square[nu];
  }
  EXPECT_EQ(e1.photon, e0.photon);
  EXPECT_NEAR(e1.total, e0.total - 0.5 * sq, 1e-12);
}

TEST(EnergyExcess, MatchesReducedMinusCoupling) {
  const PhotonModel m = grid_model();
  const int n = m.dim();
  const Vec3 p(0.3, -0.2, 0.1);
  for (int s = 0; s < 10; ++s) {
    const CMat z = random_psd(n, 1700 + s, 0.0, 2.0);
    const CVec eta = random_vector(n, 1800 + s, 0.6);
    const double ref = energy_reduced_z(m, z, eta, p).total - coupling_energy(m);
    EXPECT_NEAR(static_cast<double>(energy_excess(m, z, eta, p)), ref, 1e-11 * (1 + std::abs(ref)));
    const double ref0 = energy_reduced_z(m, CMat::Zero(n, n), eta, p).total - coupling_energy(m);
    EXPECT_NEAR(static_cast<double>(energy_excess(m, CMat::Zero(n, n), eta, p)), ref0, 1e-11 * (1 + std::abs(ref0)));
  }
  EXPECT_EQ(energy_excess(m, CMat::Zero(n, n), CVec::Zero(n), Vec3::Zero()), 0.0L);
  CMat bad = CMat::Zero(n, n);
  bad(0, 0) = -0.1;
  EXPECT_THROW(energy_excess(m, bad, CVec::Zero(n), Vec3::Zero()), std::invalid_argument);
}

TEST(EnergyCoherent, SymmetricClosedForm) {
  const PhotonModel m = grid_model(1.3);
  for (int s = 0; s < 10; ++s) {
    const CVec eta = sym_vec(m.J, 900 + s, 0.9);
    const double closed = coupling_energy(m) + eta.dot(m.dispersion.apply(eta)).real();
    EXPECT_NEAR(energy_coherent(m, eta).total, closed, 1e-10);
    EXPECT_NEAR(energy_coherent(m, eta).total,
                energy_reduced_z(m, CMat::Zero(m.dim(), m.dim()), eta, Vec3::Zero()).total, 1e-12);
  }
}

TEST(EnergyCoshSinh, ZeroSqueezeIsCoherent) {
  const PhotonModel m = grid_model();
  const CVec eta = random_vector(m.dim(), 1000, 0.6);
  EXPECT_NEAR(energy_coshsinh(m, CMat::Zero(m.dim(), m.dim()), eta).total, energy_coherent(m, eta).total, 1e-12);
}

TEST(EnergyCoshSinh, MatchesFullOnCommutingFamily) {
  const PhotonModel m = grid_model();
  for (int s = 0; s < 10; ++s) {
    const CMat r = sym_hermitian(m.J, 1100 + s, 0.8);
    const CVec eta = random_vector(m.dim(), 1200 + s, 0.5);
    const double a = energy_coshsinh(m, r, eta).total, b = energy_full(m, coshsinh_pair(r), eta).total;
    EXPECT_LT(std::abs(a - b), 1e-9 * (1 + std::abs(b)));
  }
}

TEST(EnergyCoshSinh, RejectsNonCommuting) {
  const PhotonModel m = grid_model();
  EXPECT_THROW(energy_coshsinh(m, random_hermitian(m.dim(), 5), CVec::Zero(m.dim())), std::invalid_argument);
}

TEST(LemmaBounds, ZeroSqueezeMarginsVanish) {
  const PhotonModel m = grid_model();
  const int n = m.dim();
  const LemmaMargins lm = check_lemma_bounds(m, {CMat::Identity(n, n), CMat::Zero(n, n)}, random_vector(n, 1, 0.5));
  for (int nu = 0; nu < 3; ++nu) {
    EXPECT_NEAR(lm.field[nu], 0.0, 1e-14);
    EXPECT_NEAR(lm.trace[nu], 0.0, 1e-14);
  }
}

TEST(LemmaBounds, MarginsNonnegative) {
  const PhotonModel m = grid_model();
  for (int s = 0; s < 100; ++s) {
    const BogolubovPair B = random_bogolubov(m.J, 1300 + s, 1.0);
    const LemmaMargins lm = check_lemma_bounds(m, B, random_vector(m.dim(), 1400 + s, 0.5));
    EXPECT_GE(lm.min(), -1e-9);
  }
}

TEST(LemmaBounds, FieldMarginSaturatesOnSymmetricFamily) {
  const PhotonModel m = grid_model();
  for (int s = 0; s < 5; ++s) {
    const CMat V = sym_psd(m.J, 1500 + s, 0.0, 1.0);
    const BogolubovPair B{sqrt_psd(CMat::Identity(m.dim(), m.dim()) + V * V), V};
    const LemmaMargins lm = check_lemma_bounds(m, B, sym_vec(m.J, 1600 + s, 0.5));
    for (int nu = 0; nu < 3; ++nu) EXPECT_NEAR(lm.field[nu], 0.0, 1e-9);
  }
}

TEST(EnergyBreakdown, PartsSumToTotal) {
  const PhotonModel m = grid_model();
  const EnergyBreakdown e = energy_full(m, random_bogolubov(m.J, 9, 0.7), random_vector(m.dim(), 10, 0.4));
  EXPECT_EQ(e.total, e.sum_of_parts());
  EXPECT_LT(e.imag_residue, 1e-10);
  EXPECT_EQ(e.to_json()["total"].get<double>(), e.total);
}
