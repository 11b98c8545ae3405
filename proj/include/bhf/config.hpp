#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bhf/grid.hpp"
#include "bhf/optimizer.hpp"

namespace bhf {

inline constexpr const char* kVersion = "bhf 1.0.0";

// Malformed input (bad JSON, wrong types, unknown keys). Value-range problems
// are reported with std::invalid_argument instead.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleConfig {
  int d = 2;
  int n_max = 24;
  double xi_scale = 0.3;
  double eta_scale = 0.3;
  int trials = 3;
};

struct GradcheckConfig {
  int trials = 20;
  double z_min_eig = 0.1;
  double z_max_eig = 1.0;
  double eta_norm = 0.5;
};

struct IoConfig {
  std::string output_dir = "out";
  std::string checkpoint_in;
  std::string checkpoint_out = "checkpoint.json";
};

struct RunConfig {
  double g = 1.0;
  double sigma = 1.0;
  double lambda = 2.0;
  Vec3 p = Vec3::Zero();
  int n_r = 2;
  int n_theta = 2;
  int n_phi = 4;
  MinimizeConfig optimizer;
  OracleConfig oracle;
  GradcheckConfig gradcheck;
  std::vector<double> lambdas{2.0, 3.0, 4.0, 6.0, 8.0};
  IoConfig io;
  std::uint64_t seed = 0;

  GridParams grid_params() const { return {sigma, lambda, n_r, n_theta, n_phi}; }
  // optimizer settings with physics and seed folded in
  MinimizeConfig minimize_config() const;
  void validate() const;
  nlohmann::json to_json() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

nlohmann::json grid_to_json(const GridParams& g);
GridParams grid_from_json(const nlohmann::json& j);

void save_checkpoint(const std::string& path, const CMat& z, const CVec& eta, const GridParams& grid);
State load_checkpoint(const std::string& path, const GridParams& expected);

// write to a sibling temp file, then rename over the target
void write_atomic(const std::string& path, const std::string& content);

}  // namespace bhf
