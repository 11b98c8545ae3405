#include "bhf/optimizer.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "bhf/variational.hpp"

namespace bhf {

std::string to_string(Mode m) { return m == Mode::quasifree ? "quasifree" : "coherent"; }
std::string to_string(Symmetry s) { return s == Symmetry::j_symmetric ? "j_symmetric" : "none"; }

Mode parse_mode(const std::string& s) {
  if (s == "quasifree") return Mode::quasifree;
  if (s == "coherent") return Mode::coherent;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

Symmetry parse_symmetry(const std::string& s) {
  if (s == "j_symmetric") return Symmetry::j_symmetric;
  if (s == "none") return Symmetry::none;
  throw std::invalid_argument("unknown symmetry '" + s + "'");
}

void MinimizeConfig::validate() const {
  if (!std::isfinite(g)) throw std::invalid_argument("g must be finite");
  if (!p.allFinite()) throw std::invalid_argument("p must be finite");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be positive");
  if (!(step0 > 0.0)) throw std::invalid_argument("step0 must be positive");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) throw std::invalid_argument("backtrack_factor must lie in (0,1)");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw std::invalid_argument("armijo_c must lie in (0,1)");
  if (!(init_noise >= 0.0)) throw std::invalid_argument("init_noise must be >= 0");
}

nlohmann::json MinimizationResult::to_json(bool with_trajectory) const {
  nlohmann::json j = {{"energy", energy.to_json()},
                      {"grad_norm", grad_norm},
                      {"iterations", iterations},
                      {"converged", converged},
                      {"z_trace", z_opt.trace().real()},
                      {"z_hs_norm", z_opt.norm()},
                      {"eta_norm", eta_opt.norm()}};
  if (with_trajectory) {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& r : trajectory) t.push_back({r.energy, r.grad_norm, r.step});
    j["trajectory"] = t;
  }
  return j;
}

namespace {

struct Problem {
  const PhotonModel& m;
  const MinimizeConfig& cfg;
  bool coherent;
  bool symmetric;

  State project(const State& x) const {
    State y;
    if (coherent) {
      y.z = CMat::Zero(m.dim(), m.dim());
    } else {
      y.z = bhf::project(x.z, symmetric ? ProjectionMode::both : ProjectionMode::psd, m.J);
    }
    y.eta = symmetric ? CVec(0.5 * (x.eta + m.J.apply(x.eta))) : x.eta;
    return y;
  }

  // measured from the coupling energy so that descent stays resolvable near the vacuum
  long double excess(const State& x) const { return energy_excess(m, x.z, x.eta, cfg.p); }

  GradientPair grad(const State& x) const {
    GradientPair g = gradient(m, x.z, x.eta, cfg.p);
    if (coherent) g.grad_z.setZero();
    if (symmetric) {
      g.grad_z = (0.5 * (g.grad_z + m.J.conjugate(g.grad_z))).eval();
      g.grad_z = (0.5 * (g.grad_z + g.grad_z.adjoint())).eval();
      g.grad_eta = (0.5 * (g.grad_eta + m.J.apply(g.grad_eta))).eval();
    }
    return g;
  }
};

// metric in which (grad_z, grad_eta) is the gradient
double metric(const CMat& az, const CVec& ae, const CMat& bz, const CVec& be) {
  return trace_product(az, bz).real() + 2.0 * ae.dot(be).real();
}

[[noreturn]] void dump_and_throw(const std::string& what, int it, double E, const State& x) {
  std::ostringstream os;
  os << "minimize: " << what << " at iteration " << it << " (energy " << E << ", ||z|| " << x.z.norm()
     << ", ||eta|| " << x.eta.norm() << ")";
  throw NumericalError(os.str());
}

}  // namespace

MinimizationResult minimize(const PhotonModel& m, const MinimizeConfig& cfg, const std::optional<State>& init) {
  cfg.validate();
  const int n = m.dim();
  const Problem P{m, cfg, cfg.mode == Mode::coherent, cfg.symmetry == Symmetry::j_symmetric};

  State x{CMat::Zero(n, n), CVec::Zero(n)};
  if (init) {
    require_dim(init->z, n, "initial z");
    require_dim(init->eta, n, "initial eta");
    require_psd(init->z, "initial z");
    if (P.symmetric) {
      const double scale = 1.0 + init->z.norm() + init->eta.norm();
      if ((init->z - m.J.conjugate(init->z)).norm() + (init->eta - m.J.apply(init->eta)).norm() > 1e-10 * scale)
        throw std::invalid_argument("initial state is not J-symmetric");
    }
    if (P.coherent && init->z.norm() != 0.0) throw std::invalid_argument("coherent mode requires z = 0");
    x = *init;
  } else if (cfg.init_noise > 0.0) {
    x.eta = random_vector(n, cfg.seed, cfg.init_noise);
    if (!P.coherent) x.z = random_psd(n, cfg.seed + 1, 0.0, cfg.init_noise);
    x = P.project(x);
  }

  MinimizationResult res;
  const double E0 = coupling_energy(m);
  long double E = P.excess(x);
  if (!std::isfinite(E)) dump_and_throw("non-finite initial energy", 0, E, x);
  res.trajectory.push_back({static_cast<double>(E0 + E), std::numeric_limits<double>::quiet_NaN(), 0.0});

  GradientPair g = P.grad(x);
  State x_prev;
  GradientPair g_prev;
  double s_prev = cfg.step0;
  double pg = 0.0;
  int it = 0;
  for (;; ++it) {
    const State unit = P.project({x.z - g.grad_z, x.eta - g.grad_eta});
    pg = std::sqrt((x.z - unit.z).squaredNorm() + (x.eta - unit.eta).squaredNorm());
    res.trajectory.back().grad_norm = pg;
    if (pg <= cfg.grad_tol) {
      res.converged = true;
      break;
    }
    if (it >= cfg.max_iters) break;

    double s = cfg.step0;
    if (it > 0 && cfg.barzilai_borwein) {
      const CMat dz = x.z - x_prev.z;
      const CVec de = x.eta - x_prev.eta;
      const double sy = metric(dz, de, g.grad_z - g_prev.grad_z, g.grad_eta - g_prev.grad_eta);
      const double ss = metric(dz, de, dz, de);
      s = sy > 0.0 ? std::clamp(ss / sy, 1e-10, 1e10) : std::min(2.0 * s_prev, 1e10);
    }

    bool accepted = false;
    State xs;
    long double Es = E;
    for (int bt = 0; bt < 200; ++bt) {
      xs = P.project({x.z - s * g.grad_z, x.eta - s * g.grad_eta});
      const double dec = metric(g.grad_z, g.grad_eta, xs.z - x.z, xs.eta - x.eta);
      Es = P.excess(xs);
      if (!std::isfinite(Es)) dump_and_throw("non-finite trial energy", it, Es, xs);
      if (dec < 0.0 && Es <= E + cfg.armijo_c * dec) {
        accepted = true;
        break;
      }
      if (dec >= 0.0 && (xs.z - x.z).norm() + (xs.eta - x.eta).norm() == 0.0) break;
      s *= cfg.backtrack_factor;
    }
    if (!accepted) break;  // line search exhausted; stationary to working precision

    x_prev = std::move(x);
    g_prev = std::move(g);
    x = std::move(xs);
    E = Es;
    s_prev = s;
    g = P.grad(x);
    res.trajectory.push_back({static_cast<double>(E0 + E), std::numeric_limits<double>::quiet_NaN(), s});
  }

  res.z_opt = x.z;
  res.eta_opt = x.eta;
  res.energy = energy_reduced_z(m, x.z, x.eta, cfg.p);
  res.energy.total = res.trajectory.back().energy;  // agrees with the parts to rounding
  res.grad_norm = pg;
  res.iterations = it;
  return res;
}

MinimizationResult minimize(const MomentumGrid& grid, const MinimizeConfig& cfg, const std::optional<State>& init) {
  return minimize(make_model(grid, cfg.g), cfg, init);
}

MinimizationResult minimize_coherent(const PhotonModel& m, const MinimizeConfig& cfg,
                                     const std::optional<CVec>& init) {
  if (cfg.mode != Mode::coherent) throw std::invalid_argument("minimize_coherent requires mode = coherent");
  std::optional<State> s;
  if (init) s = State{CMat::Zero(m.dim(), m.dim()), *init};
  return minimize(m, cfg, s);
}

MinimizationResult minimize_coherent(const MomentumGrid& grid, const MinimizeConfig& cfg,
                                     const std::optional<CVec>& init) {
  return minimize_coherent(make_model(grid, cfg.g), cfg, init);
}

bool SweepTable::complete() const {
  for (const auto& r : rows)
    if (!r.error.empty()) return false;
  return true;
}

int thread_count_from_env() {
  if (const char* v = std::getenv("BHF_THREADS")) {
    const int n = std::atoi(v);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepTable sweep_cutoff(const GridParams& tmpl, const std::vector<double>& lambdas, const MinimizeConfig& cfg,
                        int threads) {
  cfg.validate();
  if (lambdas.empty()) throw std::invalid_argument("sweep_cutoff: no cutoffs given");
  for (size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > tmpl.sigma)) throw std::invalid_argument("sweep_cutoff: every lambda must exceed sigma");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) throw std::invalid_argument("sweep_cutoff: lambdas must increase");
  }
  SweepTable table;
  table.rows.resize(lambdas.size());
  auto run_row = [&](size_t i) {
    SweepRow& row = table.rows[i];
    row.lambda = lambdas[i];
    try {
      GridParams gp = tmpl;
      gp.lambda = lambdas[i];
      const MomentumGrid grid = MomentumGrid::build(gp);
      const PhotonModel model = make_model(grid, cfg.g);
      row.coupling_energy = coupling_energy(model);
      const MinimizationResult r = minimize(model, cfg);
      row.e_min = r.energy.total;
      row.iters = r.iterations;
      row.grad_norm = r.grad_norm;
      row.converged = r.converged;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };
  const int nt = std::min<int>(threads > 0 ? threads : thread_count_from_env(), static_cast<int>(lambdas.size()));
  if (nt <= 1) {
    for (size_t i = 0; i < lambdas.size(); ++i) run_row(i);
    return table;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      for (size_t i = next++; i < lambdas.size(); i = next++) run_row(i);
    });
  for (auto& th : pool) th.join();
  return table;
}

static std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string sweep_csv(const SweepTable& table) {
  std::string out = "lambda,e_min,iters,grad_norm,converged\n";
  for (const auto& r : table.rows) {
    if (!r.error.empty()) {
      out += fmt17(r.lambda) + ",nan,0,nan,failed\n";
      continue;
    }
    out += fmt17(r.lambda) + "," + fmt17(r.e_min) + "," + std::to_string(r.iters) + "," + fmt17(r.grad_norm) + "," +
           (r.converged ? "true" : "false") + "\n";
  }
  return out;
}

ExponentFit fit_exponent(const SweepTable& table) {
  ExponentFit fit;
  std::vector<double> xs, ys;
  for (const auto& r : table.rows) {
    if (!r.error.empty()) {
      fit.warnings.push_back("row lambda=" + fmt17(r.lambda) + " excluded: failed run");
      continue;
    }
    if (!(r.e_min > 0.0) || !(r.lambda > 0.0)) {
      fit.warnings.push_back("row lambda=" + fmt17(r.lambda) + " excluded: nonpositive energy");
      continue;
    }
    xs.push_back(std::log(r.lambda));
    ys.push_back(std::log(r.e_min));
  }
  const int n = static_cast<int>(xs.size());
  if (n < 3) throw std::invalid_argument("fit_exponent: need at least 3 rows with positive energy");
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_exponent: cutoffs must be distinct");
  fit.exponent = sxy / sxx;
  fit.prefactor = std::exp(my - fit.exponent * mx);
  double sse = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = ys[i] - (my + fit.exponent * (xs[i] - mx));
    sse += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.used_rows = n;
  return fit;
}

}  // namespace bhf
