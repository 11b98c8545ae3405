#include "bhf/variational.hpp"

#include <cmath>
#include <random>

namespace bhf {

namespace {

struct ZData {
  CMat R;
  CMat Rz2;
};

ZData z_data(const CMat& z) {
  require_psd(z, "z");
  HermitianEigen es = eigh(z);
  es.values = es.values.cwiseMax(0.0);
  ZData d;
  d.R = apply_function(es, [](double x) { return 1.0 / (1.0 + x); });
  d.Rz2 = d.R * (z * z);
  return d;
}

double bracket(const PhotonModel& m, int nu, const ZData& d, const CVec& eta, const Vec3& p) {
  const OneBody& K = m.k[nu];
  return 0.25 * trace_product(K.matrix(), d.Rz2).real() + eta.dot(K.apply(eta)).real() +
         2.0 * eta.dot(m.G[nu]).real() - p[nu];
}

}  // namespace

GradientPair gradient(const PhotonModel& m, const CMat& z, const CVec& eta, const Vec3& p) {
  const int n = m.dim();
  require_dim(z, n, "z");
  require_dim(eta, n, "eta");
  if (z.isZero(0.0)) {
    // R = 1 and every z-dependent product vanishes
    GradientPair g{CMat::Zero(n, n), m.kabs.apply(eta)};
    for (int nu = 0; nu < 3; ++nu) {
      const OneBody& K = m.k[nu];
      const CVec ke = K.apply(eta);
      const double b = eta.dot(ke).real() + 2.0 * eta.dot(m.G[nu]).real() - p[nu];
      const CVec w = m.G[nu] + ke;
      g.grad_z -= 0.5 * w * w.adjoint();
      g.grad_eta += 0.5 * (2.0 * b * w + K.apply(w));
    }
    g.grad_z = (0.5 * (g.grad_z + g.grad_z.adjoint())).eval();
    for (int j = 0; j < n; ++j) require_finite(std::abs(g.grad_eta[j]), "grad_eta");
    return g;
  }
  const ZData d = z_data(z);
  const CMat& R = d.R;
  GradientPair g{CMat::Zero(n, n), CVec::Zero(n)};
  for (int nu = 0; nu < 3; ++nu) {
    const OneBody& K = m.k[nu];
    const double b = bracket(m, nu, d, eta, p);
    const CVec w = m.G[nu] + K.apply(eta);
    const CVec Rw = R * w;
    const CMat kz = K.left(z);
    const CMat RkzR = R * kz * R;
    const CMat zRk = K.right(z * R);
    const CMat kRzk = K.right(K.left(R * z));
    const CMat RkzkR = R * K.right(kz) * R;
    g.grad_z += 0.5 * (0.5 * b * (RkzR + zRk) - 0.25 * (kRzk + RkzkR) - Rw * Rw.adjoint());
    g.grad_eta += 0.5 * (2.0 * b * w + K.apply(Rw));
  }
  const CMat RKzR = R * m.dispersion.left(z) * R;
  const CMat zRK = m.dispersion.right(z * R);
  g.grad_z += 0.25 * (RKzR + zRK);
  g.grad_z = (0.5 * (g.grad_z + g.grad_z.adjoint())).eval();
  g.grad_eta += m.kabs.apply(eta);
  for (int j = 0; j < n; ++j) {
    require_finite(std::abs(g.grad_eta[j]), "grad_eta");
    for (int i = 0; i < n; ++i) require_finite(std::abs(g.grad_z(i, j)), "grad_z");
  }
  return g;
}

CMat grad_z(const PhotonModel& m, const CMat& z, const CVec& eta, const Vec3& p) {
  return gradient(m, z, eta, p).grad_z;
}

CVec grad_eta(const PhotonModel& m, const CMat& z, const CVec& eta, const Vec3& p) {
  return gradient(m, z, eta, p).grad_eta;
}

CMat make_variation(const CMat& z, std::uint64_t seed, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("make_variation: epsilon must be positive");
  require_psd(z, "z");
  const HermitianEigen e = eigh(z);
  std::vector<int> cols;
  for (int i = 0; i < e.values.size(); ++i)
    if (e.values[i] >= epsilon) cols.push_back(i);
  if (cols.empty()) throw std::invalid_argument("make_variation: no spectrum of z above epsilon");
  const int r = static_cast<int>(cols.size());
  CMat Q(z.rows(), r);
  for (int c = 0; c < r; ++c) Q.col(c) = e.vectors.col(cols[c]);
  const CMat X = random_hermitian(r, seed);
  const double op = eigh(X).values.cwiseAbs().maxCoeff();
  CMat dz = Q * X * Q.adjoint() * (op > 0 ? 0.5 * epsilon / op : 0.0);
  return 0.5 * (dz + dz.adjoint());
}

nlohmann::json FdReport::to_json() const {
  return {{"trials", trials},
          {"max_rel_error", max_rel_error},
          {"rel_errors", rel_errors},
          {"remainder_ratios", remainder_ratios},
          {"energy", energy},
          {"fd_step", fd_step}};
}

FdReport fd_check(const PhotonModel& m, const CMat& z, const CVec& eta, const Vec3& p, int trials,
                  std::uint64_t seed, const FdOptions& opts) {
  if (trials < 1) throw std::invalid_argument("fd_check: trials must be >= 1");
  const int n = m.dim();
  require_dim(z, n, "z");
  require_dim(eta, n, "eta");
  double eps = opts.epsilon;
  if (opts.vary_z && eps <= 0.0) {
    const RVec ev = eigh(z).values;
    eps = ev.minCoeff() > 1e-8 * (1.0 + ev.maxCoeff()) ? ev.minCoeff() : 0.5 * ev.maxCoeff();
  }
  const double scale = 1.0 + z.norm() + eta.norm();
  const double t = 1e-5 * scale;
  const GradientPair g = gradient(m, z, eta, p);
  auto energy = [&](const CMat& zz, const CVec& ee) { return energy_reduced_z(m, zz, ee, p).total; };
  const double E0 = energy(z, eta);

  FdReport rep;
  rep.trials = trials;
  rep.energy = E0;
  rep.fd_step = t;
  std::mt19937_64 rng(seed);
  for (int k = 0; k < trials; ++k) {
    const std::uint64_t sz = rng(), se = rng();
    CMat dz = CMat::Zero(n, n);
    CVec de = CVec::Zero(n);
    if (opts.vary_z) {
      dz = make_variation(z, sz, eps);
      if (opts.j_symmetric) dz = (0.5 * (dz + m.J.conjugate(dz))).eval();
    }
    if (opts.vary_eta) {
      de = random_vector(n, se, opts.vary_z ? dz.norm() : 1.0);
      if (opts.j_symmetric) de = (0.5 * (de + m.J.apply(de))).eval();
    }
    if (dz.norm() + de.norm() == 0.0) throw NumericalError("fd_check: degenerate direction");

    const double an = trace_product(g.grad_z, dz).real() + 2.0 * g.grad_eta.dot(de).real();
    const double fd = (energy(z + t * dz, eta + t * de) - energy(z - t * dz, eta - t * de)) / (2.0 * t);
    const double denom = std::max(std::abs(an), 1e-8 * (1.0 + std::abs(E0)));
    const double rel = std::abs(fd - an) / denom;
    rep.rel_errors.push_back(rel);
    rep.max_rel_error = std::max(rep.max_rel_error, rel);

    const double tr = 1e-3 * scale;
    auto remainder = [&](double s) { return std::abs(energy(z + s * dz, eta + s * de) - E0 - s * an); };
    const double r1 = remainder(tr), r2 = remainder(0.5 * tr);
    rep.remainder_ratios.push_back(r2 > 0 ? r1 / r2 : std::numeric_limits<double>::infinity());
  }
  return rep;
}

}  // namespace bhf
