#include "bhf/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace bhf {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ParseError(where + ": unknown key '" + k + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(where + "." + key + ": wrong type");
  }
}

Vec3 read_vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw ParseError(where + ": expected an array of 3 numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw ParseError(where + ": expected numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

}  // namespace

MinimizeConfig RunConfig::minimize_config() const {
  MinimizeConfig c = optimizer;
  c.g = g;
  c.p = p;
  c.seed = seed;
  return c;
}

void RunConfig::validate() const {
  if (!(sigma > 0.0) || !(lambda > sigma)) throw std::invalid_argument("physics: need 0 < sigma < lambda");
  if (!std::isfinite(g)) throw std::invalid_argument("physics.g must be finite");
  if (n_r < 1 || n_theta < 1) throw std::invalid_argument("grid: n_r and n_theta must be >= 1");
  if (n_phi < 2 || n_phi % 2) throw std::invalid_argument("grid: n_phi must be even and >= 2");
  minimize_config().validate();
  if (oracle.d < 1 || oracle.n_max < 2 || oracle.trials < 1) throw std::invalid_argument("oracle: need d >= 1, n_max >= 2, trials >= 1");
  if (!(oracle.xi_scale >= 0.0) || !(oracle.eta_scale >= 0.0)) throw std::invalid_argument("oracle: scales must be >= 0");
  if (gradcheck.trials < 1) throw std::invalid_argument("gradcheck.trials must be >= 1");
  if (!(gradcheck.z_min_eig > 0.0) || !(gradcheck.z_max_eig >= gradcheck.z_min_eig))
    throw std::invalid_argument("gradcheck: need 0 < z_min_eig <= z_max_eig");
  if (io.output_dir.empty()) throw std::invalid_argument("io.output_dir must not be empty");
}

json RunConfig::to_json() const {
  return {{"physics", {{"g", g}, {"sigma", sigma}, {"lambda", lambda}, {"p", {p[0], p[1], p[2]}}}},
          {"grid", {{"n_r", n_r}, {"n_theta", n_theta}, {"n_phi", n_phi}}},
          {"optimizer",
           {{"mode", to_string(optimizer.mode)},
            {"symmetry", to_string(optimizer.symmetry)},
            {"max_iters", optimizer.max_iters},
            {"grad_tol", optimizer.grad_tol},
            {"step0", optimizer.step0},
            {"backtrack_factor", optimizer.backtrack_factor},
            {"armijo_c", optimizer.armijo_c},
            {"barzilai_borwein", optimizer.barzilai_borwein},
            {"init_noise", optimizer.init_noise}}},
          {"oracle",
           {{"d", oracle.d},
            {"n_max", oracle.n_max},
            {"xi_scale", oracle.xi_scale},
            {"eta_scale", oracle.eta_scale},
            {"trials", oracle.trials}}},
          {"gradcheck",
           {{"trials", gradcheck.trials},
            {"z_min_eig", gradcheck.z_min_eig},
            {"z_max_eig", gradcheck.z_max_eig},
            {"eta_norm", gradcheck.eta_norm}}},
          {"sweep", {{"lambdas", lambdas}}},
          {"io", {{"output_dir", io.output_dir}, {"checkpoint_in", io.checkpoint_in}, {"checkpoint_out", io.checkpoint_out}}},
          {"seed", seed}};
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  check_keys(j, {"physics", "grid", "optimizer", "oracle", "gradcheck", "sweep", "io", "seed"}, "config");
  if (j.contains("physics")) {
    const json& s = j["physics"];
    check_keys(s, {"g", "sigma", "lambda", "p"}, "physics");
    read(s, "g", c.g, "physics");
    read(s, "sigma", c.sigma, "physics");
    read(s, "lambda", c.lambda, "physics");
    if (s.contains("p")) c.p = read_vec3(s["p"], "physics.p");
  }
  if (j.contains("grid")) {
    const json& s = j["grid"];
    check_keys(s, {"n_r", "n_theta", "n_phi"}, "grid");
    read(s, "n_r", c.n_r, "grid");
    read(s, "n_theta", c.n_theta, "grid");
    read(s, "n_phi", c.n_phi, "grid");
  }
  if (j.contains("optimizer")) {
    const json& s = j["optimizer"];
    check_keys(s, {"mode", "symmetry", "max_iters", "grad_tol", "step0", "backtrack_factor", "armijo_c",
                   "barzilai_borwein", "init_noise"},
               "optimizer");
    std::string mode = to_string(c.optimizer.mode), sym = to_string(c.optimizer.symmetry);
    read(s, "mode", mode, "optimizer");
    read(s, "symmetry", sym, "optimizer");
    try {
      c.optimizer.mode = parse_mode(mode);
      c.optimizer.symmetry = parse_symmetry(sym);
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("optimizer: ") + e.what());
    }
    read(s, "max_iters", c.optimizer.max_iters, "optimizer");
    read(s, "grad_tol", c.optimizer.grad_tol, "optimizer");
    read(s, "step0", c.optimizer.step0, "optimizer");
    read(s, "backtrack_factor", c.optimizer.backtrack_factor, "optimizer");
    read(s, "armijo_c", c.optimizer.armijo_c, "optimizer");
    read(s, "barzilai_borwein", c.optimizer.barzilai_borwein, "optimizer");
    read(s, "init_noise", c.optimizer.init_noise, "optimizer");
  }
  if (j.contains("oracle")) {
    const json& s = j["oracle"];
    check_keys(s, {"d", "n_max", "xi_scale", "eta_scale", "trials"}, "oracle");
    read(s, "d", c.oracle.d, "oracle");
    read(s, "n_max", c.oracle.n_max, "oracle");
    read(s, "xi_scale", c.oracle.xi_scale, "oracle");
    read(s, "eta_scale", c.oracle.eta_scale, "oracle");
    read(s, "trials", c.oracle.trials, "oracle");
  }
  if (j.contains("gradcheck")) {
    const json& s = j["gradcheck"];
    check_keys(s, {"trials", "z_min_eig", "z_max_eig", "eta_norm"}, "gradcheck");
    read(s, "trials", c.gradcheck.trials, "gradcheck");
    read(s, "z_min_eig", c.gradcheck.z_min_eig, "gradcheck");
    read(s, "z_max_eig", c.gradcheck.z_max_eig, "gradcheck");
    read(s, "eta_norm", c.gradcheck.eta_norm, "gradcheck");
  }
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    check_keys(s, {"lambdas"}, "sweep");
    read(s, "lambdas", c.lambdas, "sweep");
  }
  if (j.contains("io")) {
    const json& s = j["io"];
    check_keys(s, {"output_dir", "checkpoint_in", "checkpoint_out"}, "io");
    read(s, "output_dir", c.io.output_dir, "io");
    read(s, "checkpoint_in", c.io.checkpoint_in, "io");
    read(s, "checkpoint_out", c.io.checkpoint_out, "io");
  }
  read(j, "seed", c.seed, "config");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("config '" + path + "': " + e.what());
  }
  return parse_config(j);
}

json grid_to_json(const GridParams& g) {
  return {{"sigma", g.sigma}, {"lambda", g.lambda}, {"n_r", g.n_r}, {"n_theta", g.n_theta}, {"n_phi", g.n_phi}};
}

GridParams grid_from_json(const json& j) {
  check_keys(j, {"sigma", "lambda", "n_r", "n_theta", "n_phi"}, "grid");
  try {
    return {j.at("sigma").get<double>(), j.at("lambda").get<double>(), j.at("n_r").get<int>(),
            j.at("n_theta").get<int>(), j.at("n_phi").get<int>()};
  } catch (const json::exception& e) {
    throw ParseError(std::string("grid: ") + e.what());
  }
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, target);
}

void save_checkpoint(const std::string& path, const CMat& z, const CVec& eta, const GridParams& grid) {
  const int n = static_cast<int>(eta.size());
  require_dim(z, n, "checkpoint z");
  std::vector<double> zr, zi, er, ei;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      zr.push_back(z(i, j).real());
      zi.push_back(z(i, j).imag());
    }
  for (int i = 0; i < n; ++i) {
    er.push_back(eta[i].real());
    ei.push_back(eta[i].imag());
  }
  const json j = {{"dim", n},         {"z_real", zr},       {"z_imag", zi},
                  {"eta_real", er},   {"eta_imag", ei},     {"grid", grid_to_json(grid)},
                  {"version", kVersion}};
  write_atomic(path, j.dump(1) + "\n");
}

State load_checkpoint(const std::string& path, const GridParams& expected) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open checkpoint '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("checkpoint '" + path + "': " + e.what());
  }
  State s;
  GridParams gp;
  std::vector<double> zr, zi, er, ei;
  int n = 0;
  try {
    n = j.at("dim").get<int>();
    zr = j.at("z_real").get<std::vector<double>>();
    zi = j.at("z_imag").get<std::vector<double>>();
    er = j.at("eta_real").get<std::vector<double>>();
    ei = j.at("eta_imag").get<std::vector<double>>();
    gp = grid_from_json(j.at("grid"));
  } catch (const json::exception& e) {
    throw ParseError("checkpoint '" + path + "': " + e.what());
  }
  if (!(gp == expected)) throw std::invalid_argument("checkpoint grid does not match the configured grid");
  const size_t nn = static_cast<size_t>(n) * n;
  if (n != expected.dim() || zr.size() != nn || zi.size() != nn || er.size() != size_t(n) || ei.size() != size_t(n))
    throw ParseError("checkpoint '" + path + "': inconsistent array sizes");
  s.z.resize(n, n);
  s.eta.resize(n);
  for (int i = 0; i < n; ++i) {
    s.eta[i] = cplx(er[i], ei[i]);
    for (int k = 0; k < n; ++k) s.z(i, k) = cplx(zr[i * n + k], zi[i * n + k]);
  }
  return s;
}

}  // namespace bhf
