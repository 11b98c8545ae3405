#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "bhf/grid.hpp"
#include "bhf/types.hpp"

namespace bhf {

enum class MultSelector { k1, k2, k3, abs_k, dispersion };
MultSelector parse_mult_selector(const std::string& name);

CMat mult_operator(const MomentumGrid& grid, MultSelector which);

bool is_hermitian(const CMat& A, double rel_tol = 1e-12);
double min_eigenvalue(const CMat& A);
void require_hermitian(const CMat& A, const char* what);
void require_psd(const CMat& A, const char* what);

struct HermitianEigen {
  RVec values;
  CMat vectors;
};
HermitianEigen eigh(const CMat& A);

// f(A) = Q diag(f(lambda)) Q^dagger for Hermitian A.
CMat apply_function(const HermitianEigen& e, const std::function<double(double)>& f);
CMat apply_function(const CMat& A, const std::function<double(double)>& f);

struct TraceForms {
  cplx trace;
  cplx trace_product;
  double hs_norm;
};
TraceForms trace_forms(const CMat& A, const CMat& B);
// sum_ij A_ij B_ji
cplx trace_product(const CMat& A, const CMat& B);

CMat resolvent_shift(const CMat& z);  // (z+1)^{-1}
CMat sqrt_psd(const CMat& A);
CMat v_from_z(const CMat& z);         // ((z+1)^{1/2} - (z+1)^{-1/2}) / 2
CMat z_from_v(const CMat& V);         // 2V^2 + 2V sqrt(1+V^2)
CMat conjugate_by_J(const Involution& J, const CMat& A);

enum class ProjectionMode { psd, j_symmetric, both };
CMat project(const CMat& A, ProjectionMode mode, const Involution& J);

struct BogolubovPair {
  CMat U;
  CMat V;
};

struct RelationResiduals {
  double unitarity = 0;   // U*U - V*V - 1
  double symmetry = 0;    // U*JV - V*JU
  double co_unitarity = 0;  // UU* - JVV*J - 1
  double co_symmetry = 0;   // UV* - JVU*J
  double max() const;
};
RelationResiduals relation_residuals(const BogolubovPair& B, const Involution& J);
void require_bogolubov(const BogolubovPair& B, const Involution& J, double tol = 1e-10);

// W_u (cosh xi, sinh xi) W_v with xi Hermitian, J xi J = xi, ||xi|| <= scale.
BogolubovPair random_bogolubov(const Involution& J, std::uint64_t seed, double scale);

// random helpers shared by tests and tools
CMat random_unitary(int n, std::uint64_t seed);
CMat random_hermitian(int n, std::uint64_t seed);
CMat random_psd(int n, std::uint64_t seed, double lo, double hi);
CVec random_vector(int n, std::uint64_t seed, double norm);

}  // namespace bhf
