#include "bhf/fockcheck.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace bhf {

DoubledVector q_map(const Involution& J, const CVec& phi) { return {phi, J.apply(phi)}; }

DoubledVector script_j(const Involution& J, const DoubledVector& F) { return {J.apply(F.g), J.apply(F.f)}; }

Involution toy_involution(int d) {
  if (d < 1) throw std::invalid_argument("toy_involution: d must be >= 1");
  std::vector<int> p(d);
  for (int i = 0; i < d; ++i) p[i] = i;
  for (int i = 0; i + 1 < d; i += 2) std::swap(p[i], p[i + 1]);
  return Involution(std::move(p));
}

namespace {

void enumerate_shell(int d, int N, std::vector<int>& cur, int pos, std::vector<std::vector<int>>& out) {
  if (pos == d - 1) {
    cur[pos] = N;
    out.push_back(cur);
    return;
  }
  for (int n = N; n >= 0; --n) {
    cur[pos] = n;
    enumerate_shell(d, N - n, cur, pos + 1, out);
  }
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

FockArena::FockArena(int d, int n_max, PhotonModel one_body) : d_(d), n_max_(n_max), model_(std::move(one_body)) {
  if (d < 1) throw std::invalid_argument("build_arena: d must be >= 1");
  if (n_max < 2) throw std::invalid_argument("build_arena: n_max must be >= 2");
  if (binomial(n_max + d, d) > 1e6) throw std::invalid_argument("build_arena: basis would exceed 10^6 states");
  if (model_.dim() != d) throw std::invalid_argument("build_arena: one-body data has wrong dimension");
  model_.validate();

  std::vector<int> cur(d);
  for (int N = 0; N <= n_max; ++N) enumerate_shell(d, N, cur, 0, basis_);
  for (int b = 0; b < size(); ++b) {
    index_[basis_[b]] = b;
    int t = 0;
    for (int n : basis_[b]) t += n;
    totals_.push_back(t);
  }
  for (int m = 0; m < d; ++m) {
    std::vector<Eigen::Triplet<cplx>> trip;
    for (int b = 0; b < size(); ++b) {
      const int nm = basis_[b][m];
      if (nm == 0) continue;
      std::vector<int> occ = basis_[b];
      --occ[m];
      trip.emplace_back(index_.at(occ), b, std::sqrt(static_cast<double>(nm)));
    }
    SpMat a(size(), size());
    a.setFromTriplets(trip.begin(), trip.end());
    a_.push_back(a);
    adag_.push_back(SpMat(a.transpose()));
  }
}

FockArena build_arena(int d, int n_max, const PhotonModel& one_body) { return FockArena(d, n_max, one_body); }

int FockArena::index_of(const std::vector<int>& occ) const {
  const auto it = index_.find(occ);
  if (it == index_.end()) throw std::invalid_argument("occupation tuple not in truncated basis");
  return it->second;
}

SpMat FockArena::annihilation(const CVec& f) const {
  require_dim(f, d_, "a(f) argument");
  SpMat out(size(), size());
  for (int m = 0; m < d_; ++m) out += std::conj(f[m]) * a_[m];
  return out;
}

SpMat FockArena::creation(const CVec& f) const {
  require_dim(f, d_, "a*(f) argument");
  SpMat out(size(), size());
  for (int m = 0; m < d_; ++m) out += f[m] * adag_[m];
  return out;
}

SpMat FockArena::field(const DoubledVector& F) const {
  return annihilation(F.f) + creation(model_.J.apply(F.g));
}

SpMat FockArena::field_adj(const DoubledVector& F) const {
  return creation(F.f) + annihilation(model_.J.apply(F.g));
}

SpMat FockArena::number() const { return second_quantize(*this, CMat::Identity(d_, d_)); }

std::vector<int> FockArena::shell_up_to(int n) const {
  std::vector<int> out;
  for (int b = 0; b < size(); ++b)
    if (totals_[b] <= n) out.push_back(b);
  return out;
}

CVec FockArena::vacuum() const {
  CVec v = CVec::Zero(size());
  v[0] = 1.0;
  return v;
}

PhotonModel random_toy_model(int d, std::uint64_t seed, double k_scale, double g_scale) {
  std::mt19937_64 rng(seed);
  std::array<CMat, 3> k;
  for (auto& K : k) {
    K = random_hermitian(d, rng());
    K *= k_scale / std::max(1e-300, K.norm() / std::sqrt(static_cast<double>(d)));
  }
  CMat kabs = random_hermitian(d, rng());
  kabs *= k_scale / std::max(1e-300, kabs.norm() / std::sqrt(static_cast<double>(d)));
  std::array<CVec, 3> G;
  for (auto& g : G) g = random_vector(d, rng(), g_scale);
  return make_toy_model(k, kabs, G, toy_involution(d));
}

SpMat second_quantize(const FockArena& arena, const CMat& omega) {
  require_dim(omega, arena.d(), "second_quantize argument");
  require_hermitian(omega, "second_quantize argument");
  SpMat out(arena.size(), arena.size());
  for (int k = 0; k < arena.d(); ++k)
    for (int l = 0; l < arena.d(); ++l)
      if (omega(k, l) != cplx(0.0)) out += omega(k, l) * SpMat(arena.adag(k) * arena.a(l));
  return out;
}

SpMat fiber_hamiltonian(const FockArena& arena) {
  const PhotonModel& m = arena.one_body();
  SpMat H = second_quantize(arena, m.kabs.matrix());
  for (int nu = 0; nu < 3; ++nu) {
    const SpMat T = second_quantize(arena, m.k[nu].matrix()) + arena.creation(m.G[nu]) + arena.annihilation(m.G[nu]);
    H += 0.5 * SpMat(T * T);
  }
  return H;
}

SpMat second_quantize_doubled(const FockArena& arena, const CMat& M, const CMat& onb) {
  const int d = arena.d();
  require_dim(M, 2 * d, "doubled operator");
  require_dim(onb, 2 * d, "doubled basis");
  const CMat c = onb.adjoint() * M * onb;
  std::vector<SpMat> Adj, A;
  for (int i = 0; i < 2 * d; ++i) {
    const DoubledVector F{onb.col(i).head(d), onb.col(i).tail(d)};
    Adj.push_back(arena.field_adj(F));
    A.push_back(arena.field(F));
  }
  SpMat out(arena.size(), arena.size());
  for (int i = 0; i < 2 * d; ++i)
    for (int j = 0; j < 2 * d; ++j) out += c(i, j) * SpMat(Adj[i] * A[j]);
  return out;
}

SpMat fiber_hamiltonian_terms(const FockArena& arena, std::uint64_t basis_seed) {
  const PhotonModel& m = arena.one_body();
  const int d = arena.d();
  const CMat onb = random_unitary(2 * d, basis_seed);
  auto top = [&](const CMat& k) {
    CMat M = CMat::Zero(2 * d, 2 * d);
    M.topLeftCorner(d, d) = k;
    return M;
  };
  SpMat H = second_quantize_doubled(arena, top(m.kabs.matrix()), onb);
  for (int nu = 0; nu < 3; ++nu) {
    const SpMat P = second_quantize_doubled(arena, top(m.k[nu].matrix()), onb);
    const DoubledVector q = q_map(m.J, m.G[nu]);
    CVec qv(2 * d);
    qv << q.f, q.g;
    const SpMat A2 = second_quantize_doubled(arena, qv * qv.adjoint(), onb);
    const SpMat Aq = arena.field(q);
    H += 0.5 * SpMat(SpMat(P * P) + A2 + SpMat(P * Aq) + SpMat(Aq * P));
  }
  return H;
}

CMat exp_antihermitian(const CMat& X) {
  const CMat H = cplx(0.0, 1.0) * X;
  if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + H.norm()))
    throw std::invalid_argument("exp_antihermitian: generator is not anti-Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (H + H.adjoint()));
  if (es.info() != Eigen::Success) throw NumericalError("exp_antihermitian: eigendecomposition failed");
  CVec ph(es.eigenvalues().size());
  for (int i = 0; i < ph.size(); ++i) ph[i] = std::exp(cplx(0.0, -es.eigenvalues()[i]));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

PureQuasifreeState prepare_pure_quasifree(const FockArena& arena, const CMat& xi, const CVec& eta,
                                          double leakage_threshold, double action_tol) {
  const int d = arena.d();
  require_dim(xi, d, "xi");
  require_dim(eta, d, "eta");
  if (xi.imag().cwiseAbs().maxCoeff() > 0.0 || (xi - xi.transpose()).cwiseAbs().maxCoeff() > 1e-14)
    throw std::invalid_argument("prepare_pure_quasifree: xi must be real symmetric");

  SpMat gs(arena.size(), arena.size());
  for (int m = 0; m < d; ++m)
    for (int l = 0; l < d; ++l)
      if (xi(m, l) != cplx(0.0))
        gs += (0.5 * xi(m, l).real()) * SpMat(arena.adag(m) * arena.adag(l) - arena.a(m) * arena.a(l));
  SpMat gd = arena.creation(eta) - arena.annihilation(eta);
  const CMat S = exp_antihermitian(CMat(gs));
  const CMat D = exp_antihermitian(CMat(gd));

  PureQuasifreeState st;
  st.xi = xi;
  st.eta = eta;
  st.vector = D * (S * arena.vacuum());
  const double nrm = st.vector.norm();
  if (std::abs(nrm - 1.0) > 1e-12) throw NumericalError("prepare_pure_quasifree: state norm drifted");
  for (int b = 0; b < arena.size(); ++b)
    if (arena.total(b) == arena.n_max()) st.leakage += std::norm(st.vector[b]);
  if (st.leakage > leakage_threshold) {
    std::ostringstream os;
    os << "prepare_pure_quasifree: leakage " << st.leakage << " above threshold; increase n_max";
    throw NumericalError(os.str());
  }

  const HermitianEigen e = eigh(xi);
  const CMat C = apply_function(e, [](double x) { return std::cosh(x); });
  const CMat Sh = apply_function(e, [](double x) { return std::sinh(x); });
  const Involution& J = arena.one_body().J;
  st.pair = {C, J.permutation_matrix() * Sh};

  // S* a(e_m) S must equal a(U e_m) + a*(J V e_m) on low-lying states
  const std::vector<int> low = arena.shell_up_to(std::min(2, arena.n_max() - 2));
  for (int m = 0; m < d; ++m) {
    const CMat L = S.adjoint() * CMat(arena.a(m)) * S;
    const SpMat R = arena.annihilation(st.pair.U.col(m)) + arena.creation(J.apply(st.pair.V.col(m)));
    for (int b : low) {
      CVec phi = CVec::Zero(arena.size());
      phi[b] = 1.0;
      st.action_residual = std::max(st.action_residual, (L * phi - R * phi).norm());
    }
  }
  if (st.action_residual > action_tol) {
    std::ostringstream os;
    os << "prepare_pure_quasifree: Bogolubov action check failed (residual " << st.action_residual << ")";
    throw NumericalError(os.str());
  }
  return st;
}

std::vector<std::vector<int>> enumerate_pairings(int m) {
  if (m < 1) throw std::invalid_argument("enumerate_pairings: m must be >= 1");
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::vector<bool> used(2 * m, false);
  auto rec = [&](auto&& self) -> void {
    int first = -1;
    for (int i = 0; i < 2 * m; ++i)
      if (!used[i]) {
        first = i;
        break;
      }
    if (first < 0) {
      out.push_back(cur);
      return;
    }
    used[first] = true;
    for (int j = first + 1; j < 2 * m; ++j) {
      if (used[j]) continue;
      used[j] = true;
      cur.push_back(first);
      cur.push_back(j);
      self(self);
      cur.pop_back();
      cur.pop_back();
      used[j] = false;
    }
    used[first] = false;
  };
  rec(rec);
  return out;
}

std::vector<std::array<int, 4>> fourth_order_X() {
  std::vector<std::array<int, 4>> out;
  std::array<int, 4> t{0, 1, 2, 3};
  do {
    if (t[0] < t[1] && t[2] < t[3]) out.push_back(t);
  } while (std::next_permutation(t.begin(), t.end()));
  return out;
}

cplx two_point_kernel(const Involution& J, const BogolubovPair& B, const DoubledVector& F1, const DoubledVector& F2) {
  // <F1|B* M B F2> with M(x (+) y) = Jy (+) 0
  const CMat JVJ = J.conjugate(B.V);
  const CVec top1 = B.U * F1.f + JVJ * F1.g;
  const CVec bot2 = B.V * F2.f + J.conjugate(B.U) * F2.g;
  return top1.dot(J.apply(bot2));
}

cplx weyl_term(const Involution& J, const CVec& eta, const DoubledVector& F) {
  return eta.dot(F.f) + J.apply(eta).dot(F.g);
}

cplx string_expectation_formula(const Involution& J, const BogolubovPair& B, const CVec& eta,
                                const std::vector<DoubledVector>& F) {
  const int n = static_cast<int>(F.size());
  if (n < 1 || n > 4) throw std::invalid_argument("string_expectation_formula: order must be 1..4");
  std::vector<cplx> cq(n);
  for (int i = 0; i < n; ++i) cq[i] = std::conj(weyl_term(J, eta, F[i]));
  auto K = [&](int i, int j) { return two_point_kernel(J, B, F[i], F[j]); };
  switch (n) {
    case 1:
      return cq[0];
    case 2:
      return K(0, 1) + cq[0] * cq[1];
    case 3:
      return K(0, 1) * cq[2] + K(0, 2) * cq[1] + K(1, 2) * cq[0] + cq[0] * cq[1] * cq[2];
    default: {
      cplx s = cq[0] * cq[1] * cq[2] * cq[3];
      for (const auto& p : enumerate_pairings(2)) s += K(p[0], p[1]) * K(p[2], p[3]);
      for (const auto& t : fourth_order_X()) s += K(t[0], t[1]) * cq[t[2]] * cq[t[3]];
      return s;
    }
  }
}

cplx string_expectation_fock(const FockArena& arena, const PureQuasifreeState& psi,
                             const std::vector<DoubledVector>& F) {
  CVec v = psi.vector;
  for (int i = static_cast<int>(F.size()) - 1; i >= 0; --i) v = arena.field(F[i]) * v;
  return psi.vector.dot(v);
}

nlohmann::json OracleReport::to_json() const {
  nlohmann::json x = nlohmann::json::array();
  for (int i = 0; i < xi.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < xi.cols(); ++j) row.push_back(xi(i, j).real());
    x.push_back(row);
  }
  nlohmann::json e = nlohmann::json::array();
  for (int i = 0; i < eta.size(); ++i) e.push_back({eta[i].real(), eta[i].imag()});
  return {{"d", d},
          {"n_max", n_max},
          {"xi", x},
          {"eta", e},
          {"formula_energy", formula_energy},
          {"fock_energy", fock_energy},
          {"rel_error", rel_error},
          {"leakage", leakage}};
}

OracleReport oracle_compare(const FockArena& arena, const CMat& xi, const CVec& eta, double leakage_threshold) {
  const PureQuasifreeState psi = prepare_pure_quasifree(arena, xi, eta, leakage_threshold);
  const SpMat H = fiber_hamiltonian(arena);
  OracleReport r;
  r.d = arena.d();
  r.n_max = arena.n_max();
  r.xi = xi;
  r.eta = eta;
  r.leakage = psi.leakage;
  r.formula_energy = energy_full(arena.one_body(), psi.pair, eta).total;
  r.fock_energy = psi.vector.dot(H * psi.vector).real();
  r.rel_error = std::abs(r.formula_energy - r.fock_energy) / std::max(std::abs(r.fock_energy), 1e-300);
  return r;
}

CMat random_real_symmetric(int d, std::uint64_t seed, double xi_norm) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::MatrixXd X(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) X(i, j) = N(rng);
  X = 0.5 * (X + X.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X);
  const double nrm = es.eigenvalues().cwiseAbs().maxCoeff();
  if (nrm > 0) X *= xi_norm / nrm;
  return X.cast<cplx>();
}

}  // namespace bhf
