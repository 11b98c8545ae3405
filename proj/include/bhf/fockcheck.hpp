#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Sparse>
#include <json.hpp>

#include "bhf/energy.hpp"

namespace bhf {

using SpMat = Eigen::SparseMatrix<cplx>;

// Element F = f (+) g of the doubled one-particle space.
struct DoubledVector {
  CVec f;
  CVec g;
};

DoubledVector q_map(const Involution& J, const CVec& phi);       // (phi, J phi)
DoubledVector script_j(const Involution& J, const DoubledVector& F);  // (Jg, Jf)

// Modes paired (0,1), (2,3), ... with conjugation; a trailing odd mode is fixed.
Involution toy_involution(int d);

class FockArena {
 public:
  FockArena(int d, int n_max, PhotonModel one_body);

  int d() const { return d_; }
  int n_max() const { return n_max_; }
  int size() const { return static_cast<int>(basis_.size()); }
  const std::vector<std::vector<int>>& basis() const { return basis_; }
  int index_of(const std::vector<int>& occ) const;
  int total(int b) const { return totals_[b]; }
  const PhotonModel& one_body() const { return model_; }

  const SpMat& a(int m) const { return a_[m]; }
  const SpMat& adag(int m) const { return adag_[m]; }
  SpMat annihilation(const CVec& f) const;  // a(f) = sum conj(f_i) a_i
  SpMat creation(const CVec& f) const;      // a*(f) = sum f_i a_i*
  SpMat field(const DoubledVector& F) const;       // A_J(F) = a(f) + a*(Jg)
  SpMat field_adj(const DoubledVector& F) const;   // A_J*(F) = a*(f) + a(Jg)
  SpMat number() const;
  // indices with total occupation <= n
  std::vector<int> shell_up_to(int n) const;
  CVec vacuum() const;

 private:
  int d_;
  int n_max_;
  PhotonModel model_;
  std::vector<std::vector<int>> basis_;
  std::vector<int> totals_;
  std::map<std::vector<int>, int> index_;
  std::vector<SpMat> a_, adag_;
};

FockArena build_arena(int d, int n_max, const PhotonModel& one_body);

// random toy data: Hermitian k_nu, |k|, complex G_nu, toy involution
PhotonModel random_toy_model(int d, std::uint64_t seed, double k_scale = 1.0, double g_scale = 1.0);

SpMat second_quantize(const FockArena& arena, const CMat& omega);
// 1/2 sum_nu (dGamma(k_nu) + a*(G_nu) + a(G_nu))^2 + dGamma(|k|), built as the square of the sum
SpMat fiber_hamiltonian(const FockArena& arena);
// same operator assembled term by term from dGamma_J forms over an orthonormal basis of h (+) h
SpMat fiber_hamiltonian_terms(const FockArena& arena, std::uint64_t basis_seed);
// dGamma_J[M] = sum_ij <F_i|M F_j> A_J*(F_i) A_J(F_j); M acts on h (+) h
SpMat second_quantize_doubled(const FockArena& arena, const CMat& M, const CMat& onb);

struct PureQuasifreeState {
  CVec vector;
  CMat xi;
  CVec eta;
  BogolubovPair pair;
  double leakage = 0.0;
  double action_residual = 0.0;
};

// Psi = D(eta) S(xi) Omega with S(xi) = exp(1/2 sum xi_ml (a_m* a_l* - a_m a_l)).
PureQuasifreeState prepare_pure_quasifree(const FockArena& arena, const CMat& xi, const CVec& eta,
                                          double leakage_threshold = 1e-8, double action_tol = 1e-4);

// unitary exp(X) for anti-Hermitian X given as a dense matrix
CMat exp_antihermitian(const CMat& X);

std::vector<std::vector<int>> enumerate_pairings(int m);
std::vector<std::array<int, 4>> fourth_order_X();

cplx two_point_kernel(const Involution& J, const BogolubovPair& B, const DoubledVector& F1, const DoubledVector& F2);
cplx weyl_term(const Involution& J, const CVec& eta, const DoubledVector& F);  // <q(eta)|F>
cplx string_expectation_formula(const Involution& J, const BogolubovPair& B, const CVec& eta,
                                const std::vector<DoubledVector>& F);
cplx string_expectation_fock(const FockArena& arena, const PureQuasifreeState& psi,
                             const std::vector<DoubledVector>& F);

struct OracleReport {
  int d = 0;
  int n_max = 0;
  CMat xi;
  CVec eta;
  double formula_energy = 0.0;
  double fock_energy = 0.0;
  double rel_error = 0.0;
  double leakage = 0.0;

  nlohmann::json to_json() const;
};

OracleReport oracle_compare(const FockArena& arena, const CMat& xi, const CVec& eta,
                            double leakage_threshold = 1e-8);

// real symmetric xi with spectral norm xi_norm
CMat random_real_symmetric(int d, std::uint64_t seed, double xi_norm);

}  // namespace bhf
