#include "bhf/selftest.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "bhf/fockcheck.hpp"
#include "bhf/variational.hpp"

namespace bhf {

namespace {

using Outcome = std::pair<bool, std::string>;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

CMat sym_psd(const Involution& J, std::uint64_t seed, double lo, double hi) {
  CMat z = random_psd(J.dim(), seed, lo, hi);
  return project(z, ProjectionMode::both, J);
}

CVec sym_vec(const Involution& J, std::uint64_t seed, double norm) {
  const CVec v = random_vector(J.dim(), seed, norm);
  return 0.5 * (v + J.apply(v));
}

}  // namespace

std::vector<CheckResult> run_selftest(const RunConfig& cfg) {
  cfg.validate();
  const MomentumGrid grid = MomentumGrid::build(cfg.grid_params());
  const PhotonModel m = make_model(grid, cfg.g);
  const int n = m.dim();
  const double s = cfg.sigma, L = cfg.lambda, g = cfg.g;
  const std::uint64_t seed = cfg.seed;
  std::vector<CheckResult> out;

  auto check = [&](const std::string& name, const std::function<Outcome()>& f) {
    CheckResult r{name, false, ""};
    try {
      std::tie(r.pass, r.detail) = f();
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    out.push_back(r);
  };

  check("grid antipodal closure and polarization parity", [&]() -> Outcome {
    for (int i = 0; i < n; ++i) {
      const int j = grid.antipode(i);
      if (grid.antipode(j) != i || grid.point(j) != -grid.point(i) || grid.weight(j) != grid.weight(i) ||
          grid.polarization(j) != -grid.polarization(i) || grid.polarization_index(j) != grid.polarization_index(i))
        return {false, "slot " + std::to_string(i)};
      const Vec3 e = grid.polarization(i), kh = grid.point(i).normalized();
      const Vec3 o = grid.polarization(i % 2 == 0 ? i + 1 : i - 1);
      if (std::abs(e.norm() - 1) > 1e-14 || std::abs(e.dot(o)) > 1e-14 || std::abs(e.dot(kh)) > 1e-14)
        return {false, "orthonormality at slot " + std::to_string(i)};
    }
    return {true, "dim " + std::to_string(n)};
  });

  check("radial quadrature", [&]() -> Outcome {
    double sw = 0;
    for (int i = 0; i < n; i += 2) sw += grid.weight(i);
    const double exact = 4 * std::numbers::pi * (L * L * L - s * s * s) / 3;
    const double rel = std::abs(sw - exact) / exact;
    return {rel < 1e-10, "rel " + fmt(rel)};
  });

  check("coupling norm, transversality, JG = -G", [&]() -> Outcome {
    const double exact = 4 * std::numbers::pi * g * g * (L * L - s * s) / 2;
    const double ce = coupling_energy(m);
    const double rel = exact != 0 ? std::abs(ce - exact) / exact : std::abs(ce);
    double tr = 0, par = 0;
    for (int i = 0; i < n; ++i) {
      cplx kg = 0;
      for (int nu = 0; nu < 3; ++nu) kg += m.k[nu].diag()[i] * m.G[nu][i];
      tr = std::max(tr, std::abs(kg));
    }
    for (int nu = 0; nu < 3; ++nu) par = std::max(par, (m.J.apply(m.G[nu]) + m.G[nu]).norm());
    return {rel < 1e-10 && tr < 1e-14 && par < 1e-14, "rel " + fmt(rel) + ", k.G " + fmt(tr) + ", JG+G " + fmt(par)};
  });

  check("involution", [&]() -> Outcome {
    const CVec f = random_vector(n, seed + 1, 1.0), h = random_vector(n, seed + 2, 1.0);
    const double inv = (m.J.apply(m.J.apply(f)) - f).norm();
    const double sesq = std::abs(m.J.apply(f).dot(m.J.apply(h)) - h.dot(f));
    return {inv == 0.0 && sesq < 1e-14, "J^2 " + fmt(inv) + ", sesquilinear " + fmt(sesq)};
  });

  check("z <-> V parametrization identities", [&]() -> Outcome {
    double worst = 0;
    for (int t = 0; t < 5; ++t) {
      const CMat z = random_psd(n, seed + 10 + t, 0.0, 3.0);
      const CMat I = CMat::Identity(n, n);
      const CMat R = resolvent_shift(z);
      const CMat V = v_from_z(z);
      const CMat S = sqrt_psd(I + V * V);
      const CMat r1 = V * V - 0.25 * R * z * z;
      const CMat r2 = V * S - 0.25 * R * (z + 2 * I) * z;
      const CMat r3 = (V - S) * (V - S) - R;
      worst = std::max({worst, r1.norm() / (1 + (V * V).norm()), r2.norm() / (1 + (V * S).norm()), r3.norm() / (1 + R.norm())});
    }
    return {worst < 1e-10, "max rel " + fmt(worst)};
  });

  check("functional in z equals functional in V", [&]() -> Outcome {
    double worst = 0;
    for (int t = 0; t < 5; ++t) {
      const CMat z = random_psd(n, seed + 20 + t, 0.0, 2.0);
      const CVec eta = random_vector(n, seed + 30 + t, 0.7);
      const double ez = energy_reduced_z(m, z, eta, Vec3::Zero()).total;
      const double ev = energy_reduced_V(m, v_from_z(z), eta).total;
      worst = std::max(worst, std::abs(ez - ev) / (1 + std::abs(ez)));
    }
    return {worst < 1e-10, "max rel " + fmt(worst)};
  });

  check("symmetric family reduction equality", [&]() -> Outcome {
    double worst = 0;
    for (int t = 0; t < 5; ++t) {
      const CMat V = sym_psd(m.J, seed + 40 + t, 0.0, 1.0);
      const CVec eta = sym_vec(m.J, seed + 50 + t, 0.7);
      const CMat U = sqrt_psd(CMat::Identity(n, n) + V * V);
      const double ef = energy_full(m, {U, V}, eta).total;
      const double ev = energy_reduced_V(m, V, eta).total;
      worst = std::max(worst, std::abs(ef - ev));
    }
    return {worst < 1e-10, "max abs " + fmt(worst)};
  });

  check("lower bound ordering and lemma margins", [&]() -> Outcome {
    double worst = 0;
    for (int t = 0; t < 50; ++t) {
      const BogolubovPair B = random_bogolubov(m.J, seed + 100 + t, 1.0);
      const CVec eta = random_vector(n, seed + 200 + t, 0.5);
      const double ef = energy_full(m, B, eta).total;
      const double ev = energy_reduced_V(m, sqrt_psd(B.V.adjoint() * B.V), eta).total;
      const LemmaMargins lm = check_lemma_bounds(m, B, eta);
      worst = std::min({worst, ef - ev, lm.min()});
    }
    return {worst >= -1e-9, "min margin " + fmt(worst)};
  });

  check("gradient against finite differences", [&]() -> Outcome {
    const CMat z = random_psd(n, seed + 300, cfg.gradcheck.z_min_eig, cfg.gradcheck.z_max_eig);
    const CVec eta = random_vector(n, seed + 301, cfg.gradcheck.eta_norm);
    const FdReport r = fd_check(m, z, eta, cfg.p, 5, seed + 302);
    double lo = 1e300, hi = 0;
    for (double q : r.remainder_ratios) {
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    return {r.max_rel_error < 1e-6 && lo >= 3.2 && hi <= 4.8,
            "max rel " + fmt(r.max_rel_error) + ", remainder ratios [" + fmt(lo) + ", " + fmt(hi) + "]"};
  });

  check("symmetric subspace vanishing and coercivity", [&]() -> Outcome {
    const CVec eta = sym_vec(m.J, seed + 400, 1.0);
    double van = 0;
    for (int nu = 0; nu < 3; ++nu)
      van = std::max({van, std::abs(eta.dot(m.k[nu].apply(eta))), std::abs(eta.dot(m.G[nu]).real())});
    const double gn = grad_eta(m, CMat::Zero(n, n), eta, Vec3::Zero()).norm();
    const double bound = (s + 0.5 * s * s) * eta.norm();
    return {van < 1e-12 && gn >= bound, "vanishing " + fmt(van) + ", |grad| " + fmt(gn) + " >= " + fmt(bound)};
  });

  check("coherent stationary point is zero", [&]() -> Outcome {
    MinimizeConfig c = cfg.minimize_config();
    c.mode = Mode::coherent;
    c.symmetry = Symmetry::j_symmetric;
    c.grad_tol = 1e-10;
    const MinimizationResult r = minimize_coherent(m, c, sym_vec(m.J, seed + 500, 1.0));
    const double de = std::abs(r.energy.total - coupling_energy(m));
    return {r.converged && r.eta_opt.norm() < 1e-8 && de < 1e-9,
            "|eta| " + fmt(r.eta_opt.norm()) + ", energy gap " + fmt(de)};
  });

  check("pairing counts", [&]() -> Outcome {
    const size_t c1 = enumerate_pairings(1).size(), c2 = enumerate_pairings(2).size(),
                 c3 = enumerate_pairings(3).size(), x = fourth_order_X().size();
    return {c1 == 1 && c2 == 3 && c3 == 15 && x == 6,
            std::to_string(c1) + "/" + std::to_string(c2) + "/" + std::to_string(c3) + ", |X| " + std::to_string(x)};
  });

  check("Wick formula against truncated Fock space", [&]() -> Outcome {
    const PhotonModel toy = random_toy_model(2, seed + 600);
    const FockArena arena(2, 20, toy);
    const PureQuasifreeState psi = prepare_pure_quasifree(arena, random_real_symmetric(2, seed + 601, 0.25),
                                                          random_vector(2, seed + 602, 0.25));
    double worst = 0;
    std::vector<DoubledVector> F;
    for (int k = 0; k < 4; ++k) {
      F.push_back({random_vector(2, seed + 610 + 2 * k, 1.0), random_vector(2, seed + 611 + 2 * k, 1.0)});
      const cplx a = string_expectation_formula(toy.J, psi.pair, psi.eta, F);
      const cplx b = string_expectation_fock(arena, psi, F);
      worst = std::max(worst, std::abs(a - b));
    }
    return {worst < 1e-6, "max abs " + fmt(worst)};
  });

  check("energy formula against truncated Fock space", [&]() -> Outcome {
    const PhotonModel toy = random_toy_model(cfg.oracle.d, seed + 700);
    const FockArena arena(cfg.oracle.d, cfg.oracle.n_max, toy);
    const OracleReport r = oracle_compare(arena, random_real_symmetric(cfg.oracle.d, seed + 701, cfg.oracle.xi_scale),
                                          random_vector(cfg.oracle.d, seed + 702, cfg.oracle.eta_scale));
    return {r.rel_error < 1e-5, "rel " + fmt(r.rel_error) + ", leakage " + fmt(r.leakage)};
  });

  check("quasifree minimization feasibility and descent", [&]() -> Outcome {
    const MinimizationResult r = minimize(m, cfg.minimize_config());
    bool mono = true;
    for (size_t i = 1; i < r.trajectory.size(); ++i) mono = mono && r.trajectory[i].energy <= r.trajectory[i - 1].energy;
    const double bound = coupling_energy(m) + 1e-9;
    return {r.converged && mono && r.energy.total <= bound,
            "E " + fmt(r.energy.total) + " <= " + fmt(bound) + ", iters " + std::to_string(r.iterations) +
                ", |pg| " + fmt(r.grad_norm)};
  });

  return out;
}

}  // namespace bhf
