#include "bhf/types.hpp"

#include <cmath>
#include <sstream>

namespace bhf {

Involution::Involution(std::vector<int> partner) : partner_(std::move(partner)) {
  const int n = dim();
  for (int i = 0; i < n; ++i) {
    const int j = partner_[i];
    if (j < 0 || j >= n || partner_[j] != i)
      throw std::invalid_argument("involution: partner map is not an involutive permutation");
  }
}

Involution Involution::conjugation(int dim) {
  std::vector<int> p(dim);
  for (int i = 0; i < dim; ++i) p[i] = i;
  return Involution(std::move(p));
}

CVec Involution::apply(const CVec& f) const {
  require_dim(f, dim(), "involution argument");
  CVec out(f.size());
  for (int i = 0; i < dim(); ++i) out[i] = std::conj(f[partner_[i]]);
  return out;
}

CMat Involution::conjugate(const CMat& A) const {
  require_dim(A, dim(), "involution conjugation argument");
  const int n = dim();
  CMat out(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out(i, j) = std::conj(A(partner_[i], partner_[j]));
  return out;
}

CMat Involution::permute_rows(const CMat& M) const {
  if (M.rows() != dim()) throw std::invalid_argument("permute_rows: dimension mismatch");
  CMat out(M.rows(), M.cols());
  for (int i = 0; i < dim(); ++i) out.row(i) = M.row(partner_[i]);
  return out;
}

CMat Involution::permutation_matrix() const {
  CMat P = CMat::Zero(dim(), dim());
  for (int i = 0; i < dim(); ++i) P(i, partner_[i]) = 1.0;
  return P;
}

OneBody OneBody::diagonal(RVec d) {
  OneBody o;
  o.diagonal_ = true;
  o.dense_ = d.cast<cplx>().asDiagonal();
  o.diag_ = std::move(d);
  return o;
}

OneBody OneBody::dense(CMat m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("one-body operator must be square");
  OneBody o;
  o.dense_ = std::move(m);
  return o;
}

CVec OneBody::apply(const CVec& f) const {
  if (diagonal_) return diag_.cast<cplx>().cwiseProduct(f);
  return dense_ * f;
}

CMat OneBody::left(const CMat& X) const {
  if (diagonal_) return diag_.cast<cplx>().asDiagonal() * X;
  return dense_ * X;
}

CMat OneBody::right(const CMat& X) const {
  if (diagonal_) return X * diag_.cast<cplx>().asDiagonal();
  return X * dense_;
}

OneBody OneBody::squared() const {
  if (diagonal_) return diagonal(diag_.cwiseProduct(diag_));
  return dense(dense_ * dense_);
}

OneBody OneBody::plus(const OneBody& o, double c) const {
  if (diagonal_ && o.diagonal_) return diagonal(diag_ + c * o.diag_);
  return dense(dense_ + c * o.dense_);
}

void PhotonModel::validate() const {
  const int n = dim();
  auto check = [&](const OneBody& K, const char* what) {
    require_dim(K.matrix(), n, what);
    const double scale = 1.0 + K.matrix().norm();
    if ((K.matrix() - K.matrix().adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw std::invalid_argument(std::string(what) + " is not Hermitian");
  };
  for (const auto& K : k) check(K, "k_nu");
  check(kabs, "|k|");
  check(dispersion, "dispersion");
  for (const auto& g : G) require_dim(g, n, "coupling vector");
}

PhotonModel make_toy_model(const std::array<CMat, 3>& k, const CMat& kabs,
                           const std::array<CVec, 3>& G, const Involution& J) {
  PhotonModel m;
  for (int nu = 0; nu < 3; ++nu) m.k[nu] = OneBody::dense(k[nu]);
  m.kabs = OneBody::dense(kabs);
  m.dispersion = m.kabs.plus(m.kabs.squared(), 0.5);
  m.G = G;
  m.J = J;
  m.validate();
  return m;
}

void require_dim(const CMat& A, int dim, const char* what) {
  if (A.rows() != dim || A.cols() != dim) {
    std::ostringstream os;
    os << what << ": expected " << dim << "x" << dim << ", got " << A.rows() << "x" << A.cols();
    throw std::invalid_argument(os.str());
  }
}

void require_dim(const CVec& v, int dim, const char* what) {
  if (v.size() != dim) {
    std::ostringstream os;
    os << what << ": expected length " << dim << ", got " << v.size();
    throw std::invalid_argument(os.str());
  }
}

void require_finite(double x, const std::string& what) {
  if (!std::isfinite(x)) throw NumericalError(what + " is not finite");
}

}  // namespace bhf
