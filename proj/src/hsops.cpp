#include "bhf/hsops.hpp"

#include <cmath>
#include <random>

namespace bhf {

MultSelector parse_mult_selector(const std::string& name) {
  if (name == "k_1" || name == "k1") return MultSelector::k1;
  if (name == "k_2" || name == "k2") return MultSelector::k2;
  if (name == "k_3" || name == "k3") return MultSelector::k3;
  if (name == "|k|" || name == "abs_k") return MultSelector::abs_k;
  if (name == "dispersion" || name == "|k|+|k|^2/2") return MultSelector::dispersion;
  throw std::invalid_argument("mult_operator: unknown selector '" + name + "'");
}

CMat mult_operator(const MomentumGrid& grid, MultSelector which) {
  const int n = grid.dim();
  RVec d(n);
  for (int i = 0; i < n; ++i) {
    const double a = grid.norm_k(i);
    switch (which) {
      case MultSelector::k1: d[i] = grid.point(i).x(); break;
      case MultSelector::k2: d[i] = grid.point(i).y(); break;
      case MultSelector::k3: d[i] = grid.point(i).z(); break;
      case MultSelector::abs_k: d[i] = a; break;
      case MultSelector::dispersion: d[i] = a + 0.5 * a * a; break;
    }
  }
  return d.cast<cplx>().asDiagonal();
}

bool is_hermitian(const CMat& A, double rel_tol) {
  if (A.rows() != A.cols()) return false;
  if (A.size() == 0) return true;
  return (A - A.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * (1.0 + A.norm());
}

void require_hermitian(const CMat& A, const char* what) {
  if (!is_hermitian(A)) throw std::invalid_argument(std::string(what) + " is not Hermitian");
}

HermitianEigen eigh(const CMat& A) {
  require_hermitian(A, "eigendecomposition input");
  const CMat H = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

double min_eigenvalue(const CMat& A) {
  if (A.size() == 0) return 0.0;
  return eigh(A).values.minCoeff();
}

void require_psd(const CMat& A, const char* what) {
  require_hermitian(A, what);
  const double lo = min_eigenvalue(A);
  if (lo < -1e-10 * (1.0 + A.norm()))
    throw std::invalid_argument(std::string(what) + " is not positive semidefinite (min eigenvalue " +
                                std::to_string(lo) + ")");
}

CMat apply_function(const HermitianEigen& e, const std::function<double(double)>& f) {
  RVec fv(e.values.size());
  for (int i = 0; i < fv.size(); ++i) fv[i] = f(e.values[i]);
  return e.vectors * fv.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

CMat apply_function(const CMat& A, const std::function<double(double)>& f) {
  return apply_function(eigh(A), f);
}

cplx trace_product(const CMat& A, const CMat& B) {
  if (A.cols() != B.rows() || A.rows() != B.cols()) throw std::invalid_argument("trace_product: dimension mismatch");
  cplx s = 0.0;
  for (int i = 0; i < A.rows(); ++i) s += A.row(i).transpose().cwiseProduct(B.col(i)).sum();
  return s;
}

TraceForms trace_forms(const CMat& A, const CMat& B) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
    throw std::invalid_argument("trace_forms: dimension mismatch");
  return {A.trace(), (A * B).trace(), A.norm()};
}

// PSD inputs may carry eigenvalues of size -1e-16 from rounding; clamp them.
static HermitianEigen psd_eigen(const CMat& A, const char* what) {
  require_psd(A, what);
  HermitianEigen e = eigh(A);
  e.values = e.values.cwiseMax(0.0);
  return e;
}

CMat resolvent_shift(const CMat& z) {
  return apply_function(psd_eigen(z, "resolvent_shift input"), [](double x) { return 1.0 / (x + 1.0); });
}

CMat sqrt_psd(const CMat& A) {
  return apply_function(psd_eigen(A, "sqrt_psd input"), [](double x) { return std::sqrt(x); });
}

CMat v_from_z(const CMat& z) {
  return apply_function(psd_eigen(z, "v_from_z input"), [](double x) {
    const double y = std::sqrt(x + 1.0);
    return 0.5 * (y - 1.0 / y);
  });
}

CMat z_from_v(const CMat& V) {
  return apply_function(psd_eigen(V, "z_from_v input"),
                        [](double v) { return 2.0 * v * v + 2.0 * v * std::sqrt(1.0 + v * v); });
}

CMat conjugate_by_J(const Involution& J, const CMat& A) { return J.conjugate(A); }

CMat project(const CMat& A, ProjectionMode mode, const Involution& J) {
  require_hermitian(A, "project input");
  CMat B = 0.5 * (A + A.adjoint());
  if (mode != ProjectionMode::psd) {
    B = 0.5 * (B + J.conjugate(B));
    B = 0.5 * (B + B.adjoint()).eval();
  }
  if (mode == ProjectionMode::j_symmetric) return B;
  const HermitianEigen e = eigh(B);
  if (e.values.minCoeff() >= 0.0) return B;
  return apply_function(e, [](double x) { return x > 0.0 ? x : 0.0; });
}

double RelationResiduals::max() const {
  return std::max(std::max(unitarity, symmetry), std::max(co_unitarity, co_symmetry));
}

RelationResiduals relation_residuals(const BogolubovPair& B, const Involution& J) {
  const int n = J.dim();
  require_dim(B.U, n, "U");
  require_dim(B.V, n, "V");
  const CMat I = CMat::Identity(n, n);
  const CMat& U = B.U;
  const CMat& V = B.V;
  // J X as an antilinear map has matrix P conj(X); A* J X = A^dagger P conj(X)
  const CMat JV = J.permute_rows(V.conjugate());
  const CMat JU = J.permute_rows(U.conjugate());
  RelationResiduals r;
  r.unitarity = (U.adjoint() * U - V.adjoint() * V - I).norm();
  r.symmetry = (U.adjoint() * JV - V.adjoint() * JU).norm();
  r.co_unitarity = (U * U.adjoint() - J.conjugate(V * V.adjoint()) - I).norm();
  r.co_symmetry = (U * V.adjoint() - J.conjugate(V * U.adjoint())).norm();
  return r;
}

void require_bogolubov(const BogolubovPair& B, const Involution& J, double tol) {
  const RelationResiduals r = relation_residuals(B, J);
  const double scale = 1.0 + B.U.squaredNorm() + B.V.squaredNorm();
  if (!(r.max() <= tol * scale))
    throw std::invalid_argument("Bogolubov relations violated (residual " + std::to_string(r.max()) + ")");
}

CMat random_unitary(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  CMat Z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) Z(i, j) = cplx(N(rng), N(rng));
  Eigen::HouseholderQR<CMat> qr(Z);
  CMat Q = qr.householderQ();
  const CMat R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const double a = std::abs(R(j, j));
    if (a > 0) Q.col(j) *= R(j, j) / a;
  }
  return Q;
}

CMat random_hermitian(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  CMat H(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) H(i, j) = cplx(N(rng), N(rng));
  return 0.5 * (H + H.adjoint());
}

CMat random_psd(int n, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> Ud(lo, hi);
  RVec ev(n);
  for (int i = 0; i < n; ++i) ev[i] = Ud(rng);
  const CMat Q = random_unitary(n, seed);
  CMat z = Q * ev.cast<cplx>().asDiagonal() * Q.adjoint();
  return 0.5 * (z + z.adjoint());
}

CVec random_vector(int n, std::uint64_t seed, double norm) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(N(rng), N(rng));
  const double a = v.norm();
  return a > 0 ? CVec(v * (norm / a)) : v;
}

BogolubovPair random_bogolubov(const Involution& J, std::uint64_t seed, double scale) {
  if (!std::isfinite(scale)) throw std::invalid_argument("random_bogolubov: scale must be finite");
  const int n = J.dim();
  std::mt19937_64 rng(seed);
  const std::uint64_t s1 = rng(), s2 = rng(), s3 = rng();
  CMat xi = random_hermitian(n, s1);
  xi = 0.5 * (xi + J.conjugate(xi));
  xi = 0.5 * (xi + xi.adjoint()).eval();
  const HermitianEigen e = eigh(xi);
  const double norm = e.values.cwiseAbs().maxCoeff();
  std::uniform_real_distribution<double> Ud(0.0, 1.0);
  const double target = std::abs(scale) * Ud(rng);
  HermitianEigen es = e;
  es.values *= norm > 0 ? target / norm : 0.0;
  const CMat C = apply_function(es, [](double x) { return std::cosh(x); });
  const CMat S = apply_function(es, [](double x) { return std::sinh(x); });
  const CMat Wu = random_unitary(n, s2);
  const CMat Wv = random_unitary(n, s3);
  // (W_u 0; 0 JW_uJ)(C JSJ; S JCJ)(W_v 0; 0 JW_vJ) has blocks
  // U = W_u C W_v, V = (J W_u J) S W_v when JSJ = S, JCJ = C.
  return {Wu * C * Wv, J.conjugate(Wu) * S * Wv};
}

}  // namespace bhf
