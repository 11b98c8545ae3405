#include "bhf/energy.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace bhf {

namespace {

void finish(EnergyBreakdown& e, const std::string& what) {
  e.total = e.sum_of_parts();
  require_finite(e.total, what + " energy");
  if (e.imag_residue > 1e-10 * (1.0 + std::abs(e.total)))
    throw NumericalError(what + ": imaginary residue " + std::to_string(e.imag_residue) + " exceeds tolerance");
}

cplx quad_form(const CVec& x, const CMat& A) { return x.dot(A * x); }

// Shared assembly of the quasifree expectation given V*V and the matrix M of
// the antilinear operator V*JU (acting as x -> M conj(x)).
EnergyBreakdown assemble_full(const PhotonModel& m, const CMat& VV, const CMat& M, const CVec& eta,
                              const std::string& what) {
  const int n = m.dim();
  require_dim(eta, n, "eta");
  const CMat I = CMat::Identity(n, n);
  const CMat onePlus = I + VV;
  const CMat onePlus2 = I + 2.0 * VV;
  EnergyBreakdown e;
  double im = 0.0;
  for (int nu = 0; nu < 3; ++nu) {
    const OneBody& K = m.k[nu];
    const cplx t = trace_product(K.matrix(), VV);
    const cplx ek = eta.dot(K.apply(eta));
    const cplx eg = eta.dot(m.G[nu]);
    im += std::abs(t.imag()) + std::abs(ek.imag());
    const double b = t.real() + ek.real() + 2.0 * eg.real();
    e.bracket[nu] = b;
    e.square[nu] = b * b;

    // (V*JU k) has matrix M conj(K); its square is linear with matrix A conj(A)
    const CMat A = K.right(M.conjugate()).conjugate();
    const cplx off = trace_product(A, A.conjugate());
    const cplx q = trace_product(K.left(VV), K.left(onePlus));
    const CVec w = m.G[nu] + K.apply(eta);
    const cplx f = quad_form(w, onePlus2);
    const cplx of = w.dot(M * w.conjugate());
    im += std::abs(off.imag()) + std::abs(q.imag()) + std::abs(f.imag());
    e.offdiag_trace[nu] = off.real();
    e.quad[nu] = q.real();
    e.field[nu] = f.real();
    e.offdiag_field[nu] = 2.0 * of.real();
  }
  const cplx ph = trace_product(m.kabs.matrix(), VV) + eta.dot(m.kabs.apply(eta));
  im += std::abs(ph.imag());
  e.photon = ph.real();
  e.imag_residue = im;
  finish(e, what);
  return e;
}

}  // namespace

double EnergyBreakdown::sum_of_parts() const {
  double s = 0.0;
  for (int nu = 0; nu < 3; ++nu)
    s += square[nu] + offdiag_trace[nu] + quad[nu] + field[nu] + offdiag_field[nu];
  return 0.5 * s + photon;
}

nlohmann::json EnergyBreakdown::to_json() const {
  auto arr = [](const std::array<double, 3>& a) { return nlohmann::json::array({a[0], a[1], a[2]}); };
  return {{"bracket", arr(bracket)},   {"square", arr(square)}, {"offdiag_trace", arr(offdiag_trace)},
          {"quad", arr(quad)},         {"field", arr(field)},   {"offdiag_field", arr(offdiag_field)},
          {"photon", photon},          {"total", total}};
}

double LemmaMargins::min() const {
  double m = field[0];
  for (int nu = 0; nu < 3; ++nu) m = std::min(m, std::min(field[nu], trace[nu]));
  return m;
}

double coupling_energy(const PhotonModel& m) {
  double s = 0.0;
  for (const auto& g : m.G) s += g.squaredNorm();
  return 0.5 * s;
}

EnergyBreakdown energy_full(const PhotonModel& m, const BogolubovPair& B, const CVec& eta) {
  require_bogolubov(B, m.J);
  const CMat VV = B.V.adjoint() * B.V;
  // V*JU x = V^dagger P conj(U) conj(x)
  const CMat M = B.V.adjoint() * m.J.permute_rows(B.U.conjugate());
  return assemble_full(m, VV, M, eta, "energy_full");
}

EnergyBreakdown energy_coshsinh(const PhotonModel& m, const CMat& r_hat, const CVec& eta) {
  const int n = m.dim();
  require_dim(r_hat, n, "r_hat");
  require_hermitian(r_hat, "r_hat");
  if ((m.J.conjugate(r_hat) - r_hat).norm() > 1e-10 * (1.0 + r_hat.norm()))
    throw std::invalid_argument("energy_coshsinh: r_hat does not commute with J");
  const HermitianEigen e = eigh(r_hat);
  const CMat VV = apply_function(e, [](double x) { return 0.5 * (std::cosh(2.0 * x) - 1.0); });
  const CMat S2 = apply_function(e, [](double x) { return 0.5 * std::sinh(2.0 * x); });
  // V*JU = sinh(2r)/2 o J, antilinear
  const CMat M = S2 * m.J.permutation_matrix();
  return assemble_full(m, VV, M, eta, "energy_coshsinh");
}

EnergyBreakdown energy_reduced_V(const PhotonModel& m, const CMat& V, const CVec& eta) {
  const int n = m.dim();
  require_dim(V, n, "V");
  require_dim(eta, n, "eta");
  require_psd(V, "V");
  const CMat I = CMat::Identity(n, n);
  const CMat V2 = V * V;
  const CMat S = sqrt_psd(I + V2);
  const CMat T = V * S;
  const CMat D = (V - S) * (V - S);
  EnergyBreakdown e;
  double im = 0.0;
  for (int nu = 0; nu < 3; ++nu) {
    const OneBody& K = m.k[nu];
    const cplx t = trace_product(K.matrix(), V2);
    const cplx ek = eta.dot(K.apply(eta));
    const double b = t.real() + ek.real() + 2.0 * eta.dot(m.G[nu]).real();
    const CMat kT = K.left(T);
    const cplx off = -trace_product(kT, kT);
    const cplx q = trace_product(K.left(V2), K.left(I + V2));
    const CVec w = m.G[nu] + K.apply(eta);
    const cplx f = quad_form(w, D);
    im += std::abs(t.imag()) + std::abs(ek.imag()) + std::abs(off.imag()) + std::abs(q.imag()) + std::abs(f.imag());
    e.bracket[nu] = b;
    e.square[nu] = b * b;
    e.offdiag_trace[nu] = off.real();
    e.quad[nu] = q.real();
    e.field[nu] = f.real();
  }
  const cplx ph = trace_product(m.kabs.matrix(), V2) + eta.dot(m.kabs.apply(eta));
  im += std::abs(ph.imag());
  e.photon = ph.real();
  e.imag_residue = im;
  finish(e, "energy_reduced_V");
  return e;
}

EnergyBreakdown energy_reduced_z(const PhotonModel& m, const CMat& z, const CVec& eta, const Vec3& p) {
  const int n = m.dim();
  require_dim(z, n, "z");
  require_dim(eta, n, "eta");
  require_psd(z, "z");
  HermitianEigen es = eigh(z);
  es.values = es.values.cwiseMax(0.0);
  const CMat R = apply_function(es, [](double x) { return 1.0 / (1.0 + x); });
  const CMat zz = z * z;
  const CMat Rz2 = R * zz;
  const CMat Rz = R * z;
  EnergyBreakdown e;
  double im = 0.0;
  for (int nu = 0; nu < 3; ++nu) {
    const OneBody& K = m.k[nu];
    const cplx t = trace_product(K.matrix(), Rz2);
    const cplx ek = eta.dot(K.apply(eta));
    const double b = 0.25 * t.real() + ek.real() + 2.0 * eta.dot(m.G[nu]).real() - p[nu];
    const cplx off = -0.25 * trace_product(K.left(z), K.left(Rz));
    const CVec w = m.G[nu] + K.apply(eta);
    const cplx f = quad_form(w, R);
    im += std::abs(t.imag()) + std::abs(ek.imag()) + std::abs(off.imag()) + std::abs(f.imag());
    e.bracket[nu] = b;
    e.square[nu] = b * b;
    e.offdiag_trace[nu] = off.real();
    e.field[nu] = f.real();
  }
  const cplx ph = 0.25 * trace_product(m.dispersion.matrix(), Rz2) + eta.dot(m.kabs.apply(eta));
  im += std::abs(ph.imag());
  e.photon = ph.real();
  e.imag_residue = im;
  finish(e, "energy_reduced_z");
  return e;
}

namespace {

using lcplx = std::complex<long double>;
using LMat = Eigen::Matrix<lcplx, Eigen::Dynamic, Eigen::Dynamic>;
using LVec = Eigen::Matrix<lcplx, Eigen::Dynamic, 1>;

LVec apply_l(const OneBody& K, const LVec& x) {
  if (K.is_diagonal()) return K.diag().cast<long double>().cast<lcplx>().asDiagonal() * x;
  return K.matrix().cast<lcplx>() * x;
}

LMat left_l(const OneBody& K, const LMat& X) {
  if (K.is_diagonal()) return K.diag().cast<long double>().cast<lcplx>().asDiagonal() * X;
  return K.matrix().cast<lcplx>() * X;
}

long double re_dot(const LVec& a, const LVec& b) { return a.dot(b).real(); }

// Re tr(A B)
long double re_trace(const LMat& A, const LMat& B) { return (A.transpose().cwiseProduct(B)).sum().real(); }

}  // namespace

long double energy_excess(const PhotonModel& m, const CMat& z, const CVec& eta, const Vec3& p) {
  const int n = m.dim();
  require_dim(z, n, "z");
  require_dim(eta, n, "eta");
  const bool vac = z.isZero(0.0);
  const LVec e = eta.cast<lcplx>();
  LMat zl, Rz, Rz2;
  if (!vac) {
    require_psd(z, "z");
    zl = z.cast<lcplx>();
    const LMat I = LMat::Identity(n, n);
    Eigen::LLT<LMat> llt(I + zl);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("energy_excess: 1 + z is not positive definite");
    Rz = I - llt.solve(I);  // z (1 + z)^{-1}
    Rz2 = Rz * zl;
  }
  long double acc = 0.0L;
  for (int nu = 0; nu < 3; ++nu) {
    const OneBody& K = m.k[nu];
    const LVec G = m.G[nu].cast<lcplx>();
    const LVec ke = apply_l(K, e);
    long double b = re_dot(e, ke) + 2.0L * re_dot(e, G) - static_cast<long double>(p[nu]);
    // <w|R w> - ||G||^2 with R = 1 - Rz
    long double f = 2.0L * re_dot(G, ke) + ke.squaredNorm();
    long double off = 0.0L;
    if (!vac) {
      const LMat KRz2 = left_l(K, Rz2);
      b += 0.25L * KRz2.trace().real();
      off = -0.25L * re_trace(left_l(K, zl), left_l(K, Rz));
      const LVec w = G + ke;
      f -= re_dot(w, Rz * w);
    }
    acc += b * b + off + f;
  }
  long double ph = re_dot(e, apply_l(m.kabs, e));
  if (!vac) ph += 0.25L * left_l(m.dispersion, Rz2).trace().real();
  const long double out = 0.5L * acc + ph;
  require_finite(static_cast<double>(out), "energy_excess");
  return out;
}

EnergyBreakdown energy_coherent(const PhotonModel& m, const CVec& eta) {
  require_dim(eta, m.dim(), "eta");
  EnergyBreakdown e;
  double im = 0.0;
  for (int nu = 0; nu < 3; ++nu) {
    const OneBody& K = m.k[nu];
    const cplx ek = eta.dot(K.apply(eta));
    const double b = ek.real() + 2.0 * eta.dot(m.G[nu]).real();
    im += std::abs(ek.imag());
    e.bracket[nu] = b;
    e.square[nu] = b * b;
    e.field[nu] = (m.G[nu] + K.apply(eta)).squaredNorm();
  }
  const cplx ph = eta.dot(m.kabs.apply(eta));
  im += std::abs(ph.imag());
  e.photon = ph.real();
  e.imag_residue = im;
  finish(e, "energy_coherent");
  return e;
}

LemmaMargins check_lemma_bounds(const PhotonModel& m, const BogolubovPair& B, const CVec& eta) {
  require_bogolubov(B, m.J);
  require_dim(eta, m.dim(), "eta");
  const CMat VV = B.V.adjoint() * B.V;
  // |V| sqrt(1+|V|^2) = (V*V)^{1/2} (1+V*V)^{1/2}
  HermitianEigen e = eigh(0.5 * (VV + VV.adjoint()));
  e.values = e.values.cwiseMax(0.0);
  const CMat A = apply_function(e, [](double x) { return std::sqrt(x) * std::sqrt(1.0 + x); });
  const CMat M = B.V.adjoint() * m.J.permute_rows(B.U.conjugate());  // V*JU
  const CMat N = B.U.adjoint() * m.J.permute_rows(B.V.conjugate());  // U*JV
  LemmaMargins out;
  for (int nu = 0; nu < 3; ++nu) {
    const OneBody& K = m.k[nu];
    const CVec w = m.G[nu] + K.apply(eta);
    out.field[nu] = quad_form(w, A).real() - std::abs(w.dot(M * w.conjugate()).real());
    const CMat kN = K.left(N);  // k U*JV has matrix K N
    const cplx sq = trace_product(kN, kN.conjugate());
    const CMat Ak = K.right(A);
    out.trace[nu] = trace_product(Ak, Ak).real() - std::abs(sq);
  }
  return out;
}

}  // namespace bhf
