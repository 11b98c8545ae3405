#include "bhf/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace bhf {

Quadrature gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  Quadrature q{RVec(n), RVec(n)};
  const double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
  const int m = (n + 1) / 2;
  for (int i = 1; i <= m; ++i) {
    double z = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
    double pp = 0.0, z1;
    int it = 0;
    do {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      z1 = z;
      z = z1 - p1 / pp;
      if (++it > 100) throw NumericalError("gauss_legendre: Newton iteration did not converge");
    } while (std::abs(z - z1) > 3e-14);
    if (n % 2 == 1 && i == m) z = 0.0;  // exact centre node
    const double w = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    q.nodes[i - 1] = xm - xl * z;
    q.nodes[n - i] = xm + xl * z;
    q.weights[i - 1] = w;
    q.weights[n - i] = w;
  }
  return q;
}

Vec3 polarization_vector(const Vec3& k, Polarization tau) {
  const Vec3 zhat(0.0, 0.0, 1.0);
  const Vec3 c = k.cross(zhat);
  const double cn = c.norm();
  if (!(cn > 1e-14 * k.norm())) throw std::invalid_argument("polarization: k is parallel to the z axis");
  const Vec3 ep = c / cn;
  if (tau == Polarization::plus) return ep;
  const double s = k.z() < 0.0 ? -1.0 : 1.0;
  return s * k.normalized().cross(ep);
}

MomentumGrid MomentumGrid::build(const GridParams& p) {
  if (!(p.sigma > 0.0) || !(p.lambda > p.sigma) || !std::isfinite(p.lambda))
    throw std::invalid_argument("build_grid: need 0 < sigma < lambda");
  if (p.n_r < 1 || p.n_theta < 1) throw std::invalid_argument("build_grid: n_r and n_theta must be >= 1");
  if (p.n_phi < 2 || p.n_phi % 2 != 0) throw std::invalid_argument("build_grid: n_phi must be even and >= 2");

  MomentumGrid g;
  g.params_ = p;
  const Quadrature rq = gauss_legendre(p.n_r, p.sigma, p.lambda);
  const Quadrature cq = gauss_legendre(p.n_theta, -1.0, 1.0);
  const int ngeo = p.n_r * p.n_theta * p.n_phi;
  const double dphi = 2.0 * std::numbers::pi / p.n_phi;

  g.points_.assign(ngeo, Vec3::Zero());
  g.norms_.assign(ngeo, 0.0);
  g.eps_.assign(2 * ngeo, Vec3::Zero());
  g.weights_.resize(2 * ngeo);
  std::vector<int> partner(2 * ngeo, -1);

  auto geo = [&](int ir, int it, int ip) { return (ir * p.n_theta + it) * p.n_phi + ip; };
  for (int ir = 0; ir < p.n_r; ++ir) {
    const double r = rq.nodes[ir];
    for (int it = 0; it < p.n_theta; ++it) {
      const double c = cq.nodes[it];
      for (int ip = 0; ip < p.n_phi; ++ip) {
        const bool rep = c > 0.0 || (c == 0.0 && ip < p.n_phi / 2);
        if (!rep) continue;
        const int a = geo(ir, it, ip);
        const int b = geo(ir, p.n_theta - 1 - it, (ip + p.n_phi / 2) % p.n_phi);
        const double s = std::sqrt(1.0 - c * c);
        const double phi = 0.5 * dphi + ip * dphi;
        const Vec3 k(r * s * std::cos(phi), r * s * std::sin(phi), r * c);
        const double w = rq.weights[ir] * r * r * cq.weights[it] * dphi;
        g.points_[a] = k;
        g.points_[b] = -k;
        g.norms_[a] = g.norms_[b] = k.norm();
        for (int t = 0; t < 2; ++t) {
          const Vec3 e = polarization_vector(k, t == 0 ? Polarization::plus : Polarization::minus);
          g.eps_[2 * a + t] = e;
          g.eps_[2 * b + t] = -e;
          g.weights_[2 * a + t] = g.weights_[2 * b + t] = w;
          partner[2 * a + t] = 2 * b + t;
          partner[2 * b + t] = 2 * a + t;
        }
      }
    }
  }
  g.involution_ = Involution(std::move(partner));

  for (int i = 0; i < g.dim(); ++i) {
    const double n = g.norm_k(i);
    if (n < p.sigma * (1 - 1e-14) || n > p.lambda * (1 + 1e-14)) {
      std::ostringstream os;
      os << "build_grid: node " << i << " has |k| = " << n << " outside the shell";
      throw NumericalError(os.str());
    }
  }
  return g;
}

MomentumGrid build_grid(double sigma, double lambda, int n_r, int n_theta, int n_phi) {
  return MomentumGrid::build(GridParams{sigma, lambda, n_r, n_theta, n_phi});
}

std::array<CVec, 3> coupling_vectors(const MomentumGrid& grid, double g) {
  std::array<CVec, 3> G;
  for (auto& v : G) v = CVec::Zero(grid.dim());
  for (int i = 0; i < grid.dim(); ++i) {
    const double f = g * std::sqrt(grid.weight(i)) / std::sqrt(grid.norm_k(i));
    for (int nu = 0; nu < 3; ++nu) G[nu][i] = f * grid.polarization(i)[nu];
  }
  return G;
}

CVec involution_apply(const MomentumGrid& grid, const CVec& f) {
  return grid.involution().apply(f);
}

cplx inner_product(const CVec& f, const CVec& g) {
  if (f.size() != g.size()) throw std::invalid_argument("inner_product: dimension mismatch");
  return f.dot(g);
}

PhotonModel make_model(const MomentumGrid& grid, double g) {
  PhotonModel m;
  const int n = grid.dim();
  for (int nu = 0; nu < 3; ++nu) {
    RVec d(n);
    for (int i = 0; i < n; ++i) d[i] = grid.point(i)[nu];
    m.k[nu] = OneBody::diagonal(std::move(d));
  }
  RVec a(n);
  for (int i = 0; i < n; ++i) a[i] = grid.norm_k(i);
  m.kabs = OneBody::diagonal(a);
  m.dispersion = OneBody::diagonal(a + 0.5 * a.cwiseProduct(a));
  m.G = coupling_vectors(grid, g);
  m.J = grid.involution();
  return m;
}

}  // namespace bhf
