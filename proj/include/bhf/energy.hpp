#pragma once

#include <array>

#include <json.hpp>

#include "bhf/hsops.hpp"
#include "bhf/types.hpp"

namespace bhf {

// Per-term decomposition. The functional is
//   total = 1/2 sum_nu (square + offdiag_trace + quad + field + offdiag_field) + photon
// where each functional fills the slots it has and leaves the rest at zero.
struct EnergyBreakdown {
  std::array<double, 3> square{};         // (scalar bracket)^2
  std::array<double, 3> offdiag_trace{};  // tr[(V*JU k)^2]-type trace
  std::array<double, 3> quad{};           // tr[k V*V k (1+V*V)]-type trace
  std::array<double, 3> field{};          // <w|(..)|w> with w = G + k eta
  std::array<double, 3> offdiag_field{};  // 2 Re <w|V*JU w>
  std::array<double, 3> bracket{};        // the scalar bracket itself
  double photon = 0.0;
  double total = 0.0;
  double imag_residue = 0.0;

  double sum_of_parts() const;
  nlohmann::json to_json() const;
};

EnergyBreakdown energy_full(const PhotonModel& m, const BogolubovPair& B, const CVec& eta);
EnergyBreakdown energy_reduced_V(const PhotonModel& m, const CMat& V, const CVec& eta);
EnergyBreakdown energy_reduced_z(const PhotonModel& m, const CMat& z, const CVec& eta, const Vec3& p);
EnergyBreakdown energy_coherent(const PhotonModel& m, const CVec& eta);
EnergyBreakdown energy_coshsinh(const PhotonModel& m, const CMat& r_hat, const CVec& eta);

// 1/2 sum_nu ||G_nu||^2
double coupling_energy(const PhotonModel& m);

// energy_reduced_z(m, z, eta, p).total - coupling_energy(m), evaluated in extended
// precision without the cancellation against the coupling energy; z = 0 skips the resolvent
long double energy_excess(const PhotonModel& m, const CMat& z, const CVec& eta, const Vec3& p);

struct LemmaMargins {
  std::array<double, 3> field{};  // <w| |V| sqrt(1+|V|^2) w> - |Re <w|V*JU w>|
  std::array<double, 3> trace{};  // tr[A k A k] - |tr[(k U*JV)^2]|
  double min() const;
};
LemmaMargins check_lemma_bounds(const PhotonModel& m, const BogolubovPair& B, const CVec& eta);

}  // namespace bhf
