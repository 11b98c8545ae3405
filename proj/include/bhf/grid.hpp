#pragma once

#include <array>
#include <vector>

#include "bhf/types.hpp"

namespace bhf {

struct GridParams {
  double sigma = 1.0;
  double lambda = 2.0;
  int n_r = 2;
  int n_theta = 2;
  int n_phi = 4;

  bool operator==(const GridParams&) const = default;
  int dim() const { return 2 * n_r * n_theta * n_phi; }
};

enum class Polarization { plus, minus };

struct Quadrature {
  RVec nodes;
  RVec weights;
};

// Gauss-Legendre rule with n nodes on [a, b]. Nodes come out mirror-symmetric.
Quadrature gauss_legendre(int n, double a, double b);

// eps_+ = (k x z)/|k x z|, eps_- = sign(k_z) khat x eps_+ (sign(0) = +1).
Vec3 polarization_vector(const Vec3& k, Polarization tau);

class MomentumGrid {
 public:
  static MomentumGrid build(const GridParams& params);

  const GridParams& params() const { return params_; }
  double sigma() const { return params_.sigma; }
  double lambda() const { return params_.lambda; }
  int dim() const { return static_cast<int>(weights_.size()); }

  // slot i = geometric_index * 2 + (tau == minus)
  const Vec3& point(int i) const { return points_[i / 2]; }
  double norm_k(int i) const { return norms_[i / 2]; }
  double weight(int i) const { return weights_[i]; }
  Polarization polarization_index(int i) const { return i % 2 == 0 ? Polarization::plus : Polarization::minus; }
  int antipode(int i) const { return involution_.partner(i); }
  const Vec3& polarization(int i) const { return eps_[i]; }
  const Involution& involution() const { return involution_; }
  const RVec& weights() const { return weights_; }

 private:
  GridParams params_;
  std::vector<Vec3> points_;
  std::vector<double> norms_;
  std::vector<Vec3> eps_;
  RVec weights_;
  Involution involution_;
};

MomentumGrid build_grid(double sigma, double lambda, int n_r, int n_theta, int n_phi);

// G_nu(i) = g * eps_{tau_i}(k_i)_nu * |k_i|^{-1/2} * sqrt(w_i)
std::array<CVec, 3> coupling_vectors(const MomentumGrid& grid, double g);

CVec involution_apply(const MomentumGrid& grid, const CVec& f);
cplx inner_product(const CVec& f, const CVec& g);

PhotonModel make_model(const MomentumGrid& grid, double g);

}  // namespace bhf
