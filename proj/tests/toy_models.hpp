#pragma once

#include "bhf/fockcheck.hpp"

// Explicit toy data shared with tests/oracles/derived_values.py.
namespace bhf::testdata {

inline PhotonModel toy_d1() {
  std::array<CMat, 3> k{CMat::Constant(1, 1, 0.7), CMat::Constant(1, 1, -0.4), CMat::Constant(1, 1, 1.1)};
  std::array<CVec, 3> G{CVec::Constant(1, cplx(0.5, 0.2)), CVec::Constant(1, cplx(-0.3)), CVec::Constant(1, cplx(0, 0.8))};
  return make_toy_model(k, CMat::Constant(1, 1, 1.3), G, toy_involution(1));
}

inline PhotonModel toy_d2() {
  const cplx i(0, 1);
  std::array<CMat, 3> k;
  k[0].resize(2, 2);
  k[0] << 0.6, 0.2 - 0.1 * i, 0.2 + 0.1 * i, -0.3;
  k[1].resize(2, 2);
  k[1] << -0.2, 0.15 * i, -0.15 * i, 0.4;
  k[2].resize(2, 2);
  k[2] << 0.1, 0.3, 0.3, 0.5;
  CMat kabs(2, 2);
  kabs << 0.9, 0.1, 0.1, 1.2;
  std::array<CVec, 3> G;
  G[0].resize(2);
  G[0] << 0.4 + 0.1 * i, -0.2;
  G[1].resize(2);
  G[1] << 0.3 * i, 0.25 - 0.05 * i;
  G[2].resize(2);
  G[2] << -0.1, 0.35 + 0.2 * i;
  return make_toy_model(k, kabs, G, toy_involution(2));
}

inline CMat xi_d2() {
  CMat xi(2, 2);
  xi << 0.2, -0.1, -0.1, 0.15;
  return xi;
}

inline CVec eta_d2() {
  CVec eta(2);
  eta << cplx(0.15, -0.1), cplx(0.05, 0.2);
  return eta;
}

// dense Fock-space values of the fiber Hamiltonian from the Python oracle
inline constexpr double kEnergyD1 = 1.164986370062171;   // xi = 0.3, eta = 0.2
inline constexpr double kEnergyD2 = 0.7013625381699109;  // xi_d2, eta_d2
inline constexpr double kSqueezedNumber = 0.2715403174076199;  // d = 1, r = 0.5, n_max = 40

}  // namespace bhf::testdata
