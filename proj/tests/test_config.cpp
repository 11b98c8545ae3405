#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "bhf/config.hpp"

using namespace bhf;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "bhf_test_config";
  fs::create_directories(d);
  return d / name;
}

}  // namespace

TEST(Config, DefaultsValidateAndRoundTrip) {
  const RunConfig c;
  EXPECT_NO_THROW(c.validate());
  const RunConfig back = parse_config(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
}

TEST(Config, GroupedKeysParse) {
  const json j = json::parse(R"({
    "physics": {"g": 0.5, "sigma": 0.5, "lambda": 3.0, "p": [0.1, 0, 0]},
    "grid": {"n_r": 3, "n_theta": 2, "n_phi": 6},
    "optimizer": {"mode": "coherent", "symmetry": "none", "grad_tol": 1e-9},
    "sweep": {"lambdas": [2, 4, 8]},
    "seed": 42})");
  const RunConfig c = parse_config(j);
  EXPECT_EQ(c.g, 0.5);
  EXPECT_EQ(c.lambda, 3.0);
  EXPECT_EQ(c.p[0], 0.1);
  EXPECT_EQ(c.n_phi, 6);
  EXPECT_EQ(c.optimizer.mode, Mode::coherent);
  EXPECT_EQ(c.optimizer.symmetry, Symmetry::none);
  EXPECT_EQ(c.lambdas.size(), 3u);
  EXPECT_EQ(c.seed, 42u);
  const MinimizeConfig m = c.minimize_config();
  EXPECT_EQ(m.g, 0.5);
  EXPECT_EQ(m.seed, 42u);
  EXPECT_EQ(m.p[0], 0.1);
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(parse_config(json::parse(R"({"physcs": {}})")), ParseError);
  EXPECT_THROW(parse_config(json::parse(R"({"grid": {"n_rr": 2}})")), ParseError);
  EXPECT_THROW(parse_config(json::parse(R"({"grid": {"n_r": "two"}})")), ParseError);
  EXPECT_THROW(parse_config(json::parse(R"({"optimizer": {"mode": "fast"}})")), ParseError);
}

TEST(Config, RangeErrorsAreValidationErrors) {
  RunConfig c;
  c.lambda = 0.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.n_phi = 3;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.optimizer.grad_tol = -1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Config, LoadFromFile) {
  const fs::path p = scratch("cfg.json");
  std::ofstream(p) << R"({"physics": {"g": 2.0}})";
  EXPECT_EQ(load_config(p.string()).g, 2.0);
  std::ofstream(p) << "{not json";
  EXPECT_THROW(load_config(p.string()), ParseError);
}

TEST(Checkpoint, BitwiseRoundTrip) {
  const GridParams gp{1.0, 2.0, 2, 2, 4};
  const int n = gp.dim();
  const CMat z = random_psd(n, 1, 0.0, 1.0) * (1.0 / 3.0);
  const CVec eta = random_vector(n, 2, 0.7);
  const fs::path p = scratch("ck.json");
  save_checkpoint(p.string(), z, eta, gp);
  const State s = load_checkpoint(p.string(), gp);
  EXPECT_EQ((s.z - z).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((s.eta - eta).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Checkpoint, GridMismatchRefused) {
  const GridParams gp{1.0, 2.0, 2, 2, 4};
  const fs::path p = scratch("ck2.json");
  save_checkpoint(p.string(), CMat::Zero(gp.dim(), gp.dim()), CVec::Zero(gp.dim()), gp);
  GridParams other = gp;
  other.lambda = 3.0;
  EXPECT_THROW(load_checkpoint(p.string(), other), std::invalid_argument);
}

TEST(Checkpoint, MalformedRefused) {
  const fs::path p = scratch("ck3.json");
  std::ofstream(p) << R"({"dim": 2})";
  EXPECT_THROW(load_checkpoint(p.string(), GridParams{}), ParseError);
  EXPECT_THROW(load_checkpoint(scratch("missing.json").string(), GridParams{}), std::exception);
}

TEST(WriteAtomic, ReplacesContent) {
  const fs::path p = scratch("atomic.txt");
  write_atomic(p.string(), "one");
  write_atomic(p.string(), "two");
  std::ifstream in(p);
  std::string s;
  in >> s;
  EXPECT_EQ(s, "two");
  for (const auto& e : fs::directory_iterator(p.parent_path()))
    EXPECT_EQ(e.path().filename().string().find(".tmp"), std::string::npos);
}

TEST(GridJson, RoundTrip) {
  const GridParams gp{0.5, 4.0, 3, 2, 6};
  EXPECT_EQ(grid_from_json(grid_to_json(gp)), gp);
}
