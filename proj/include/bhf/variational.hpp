#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "bhf/energy.hpp"

namespace bhf {

// dE = tr[grad_z dz] + 2 Re <grad_eta|deta> + O(|d|^2)
struct GradientPair {
  CMat grad_z;
  CVec grad_eta;
};

GradientPair gradient(const PhotonModel& m, const CMat& z, const CVec& eta, const Vec3& p);
CMat grad_z(const PhotonModel& m, const CMat& z, const CVec& eta, const Vec3& p);
CVec grad_eta(const PhotonModel& m, const CMat& z, const CVec& eta, const Vec3& p);

// Hermitian dz supported on the spectral subspace {z >= epsilon}, ||dz||_op = epsilon/2.
CMat make_variation(const CMat& z, std::uint64_t seed, double epsilon);

struct FdOptions {
  bool vary_z = true;
  bool vary_eta = true;
  bool j_symmetric = false;  // draw J-symmetric directions
  double epsilon = 0.0;      // admissibility threshold; 0 picks one from the spectrum of z
};

struct FdReport {
  int trials = 0;
  double max_rel_error = 0.0;
  std::vector<double> rel_errors;
  std::vector<double> remainder_ratios;
  double energy = 0.0;
  double fd_step = 0.0;

  nlohmann::json to_json() const;
};

FdReport fd_check(const PhotonModel& m, const CMat& z, const CVec& eta, const Vec3& p, int trials,
                  std::uint64_t seed, const FdOptions& opts = {});

}  // namespace bhf
