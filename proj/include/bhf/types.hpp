#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bhf {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;

// Raised when a computation produces non-finite values or a numerical
// consistency check fails. Precondition violations use std::invalid_argument.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Antiunitary involution J = P o conj on the discretized one-photon space,
// where P is an involutive permutation of basis slots.
class Involution {
 public:
  Involution() = default;
  explicit Involution(std::vector<int> partner);

  static Involution conjugation(int dim);

  int dim() const { return static_cast<int>(partner_.size()); }
  int partner(int i) const { return partner_[i]; }
  const std::vector<int>& permutation() const { return partner_; }

  // (Jf)_i = conj(f_{i*})
  CVec apply(const CVec& f) const;
  // linear operator JAJ, (JAJ)_ij = conj(A_{i* j*})
  CMat conjugate(const CMat& A) const;
  // rows permuted: (PM)_ij = M_{i* j}
  CMat permute_rows(const CMat& M) const;
  CMat permutation_matrix() const;

 private:
  std::vector<int> partner_;
};

// One-body multiplication-type operator. Grid operators are diagonal and
// keep a fast path; toy operators are dense.
class OneBody {
 public:
  OneBody() = default;
  static OneBody diagonal(RVec d);
  static OneBody dense(CMat m);

  int dim() const { return static_cast<int>(dense_.rows()); }
  bool is_diagonal() const { return diagonal_; }
  const RVec& diag() const { return diag_; }
  const CMat& matrix() const { return dense_; }

  CVec apply(const CVec& f) const;
  CMat left(const CMat& X) const;   // K X
  CMat right(const CMat& X) const;  // X K
  OneBody squared() const;
  OneBody plus(const OneBody& o, double c) const;  // this + c*o

 private:
  bool diagonal_ = false;
  RVec diag_;
  CMat dense_;
};

// All one-body data entering the energy functionals.
struct PhotonModel {
  std::array<OneBody, 3> k;
  OneBody kabs;
  OneBody dispersion;  // |k| + |k|^2/2
  std::array<CVec, 3> G;
  Involution J;

  int dim() const { return J.dim(); }
  void validate() const;
};

PhotonModel make_toy_model(const std::array<CMat, 3>& k, const CMat& kabs,
                           const std::array<CVec, 3>& G, const Involution& J);

void require_dim(const CMat& A, int dim, const char* what);
void require_dim(const CVec& v, int dim, const char* what);
void require_finite(double x, const std::string& what);

}  // namespace bhf
