#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bhf/energy.hpp"
#include "bhf/grid.hpp"

namespace bhf {

enum class Mode { quasifree, coherent };
enum class Symmetry { j_symmetric, none };

std::string to_string(Mode m);
std::string to_string(Symmetry s);
Mode parse_mode(const std::string& s);
Symmetry parse_symmetry(const std::string& s);

struct MinimizeConfig {
  double g = 1.0;
  Vec3 p = Vec3::Zero();
  Mode mode = Mode::quasifree;
  Symmetry symmetry = Symmetry::j_symmetric;
  int max_iters = 5000;
  double grad_tol = 1e-8;
  double step0 = 1.0;
  double backtrack_factor = 0.5;
  double armijo_c = 1e-4;
  bool barzilai_borwein = true;
  double init_noise = 0.0;  // > 0: random start of this norm drawn from seed
  std::uint64_t seed = 0;

  void validate() const;
};

struct State {
  CMat z;
  CVec eta;
};

struct IterationRecord {
  double energy;
  double grad_norm;
  double step;
};

struct MinimizationResult {
  CMat z_opt;
  CVec eta_opt;
  EnergyBreakdown energy;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<IterationRecord> trajectory;

  nlohmann::json to_json(bool with_trajectory = true) const;
};

MinimizationResult minimize(const PhotonModel& m, const MinimizeConfig& cfg,
                            const std::optional<State>& init = std::nullopt);
MinimizationResult minimize(const MomentumGrid& grid, const MinimizeConfig& cfg,
                            const std::optional<State>& init = std::nullopt);
MinimizationResult minimize_coherent(const MomentumGrid& grid, const MinimizeConfig& cfg,
                                     const std::optional<CVec>& init = std::nullopt);
MinimizationResult minimize_coherent(const PhotonModel& m, const MinimizeConfig& cfg,
                                     const std::optional<CVec>& init = std::nullopt);

struct SweepRow {
  double lambda = 0.0;
  double e_min = 0.0;
  int iters = 0;
  double grad_norm = 0.0;
  bool converged = false;
  double coupling_energy = 0.0;  // value at (z, eta) = (0, 0)
  std::string error;             // non-empty marks a failed row
};

struct SweepTable {
  std::vector<SweepRow> rows;
  bool complete() const;
};

// threads <= 0 reads BHF_THREADS, defaulting to the hardware concurrency.
SweepTable sweep_cutoff(const GridParams& grid_template, const std::vector<double>& lambdas,
                        const MinimizeConfig& cfg, int threads = 0);
std::string sweep_csv(const SweepTable& table);

struct ExponentFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  int used_rows = 0;
  std::vector<std::string> warnings;
};
ExponentFit fit_exponent(const SweepTable& table);

int thread_count_from_env();

}  // namespace bhf
