#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpra/css.hpp"
#include "lpra/fpt.hpp"
#include "lpra/matrix.hpp"
#include "lpra/rankreduce.hpp"

namespace lpra {

/// Batch-run description. `input_path` names a Matrix Market or CSV file;
/// `generator` is a spec like "planted:n=60,d=60,k=3,noise=0.05",
/// "hard:k=40,n=40" or "gaussian:n=50,d=20". Exactly one of the two must be
/// set.
struct RunConfig {
  std::string algorithm;  // css | polyk | polyk-exact | fpt | sketch-check | hardness-scan | oracle
  std::string input_path;
  std::string generator;
  Index k = 1;
  double p = 1.0;
  double eps = 0.25;
  std::uint64_t seed = 0;
  std::string out_path;      // empty -> stdout
  std::string factors_out;   // optional path prefix for factor Matrix Market files
  bool with_oracle = false;  // also run the brute-force oracle on the instance
  int oracle_restarts = 50;
  double fpt_f = 8.0;
  CssConfig css;
  BlockEnumConfig blockenum;
  FptBudget budget;
  std::vector<Index> scan_ks = {10, 40};
  int scan_subsets = 200;
  int scan_seeds = 10;

  void validate() const;
};

/// Loads a flat JSON config file; unknown keys are rejected.
RunConfig load_config_json(const std::string& path);

/// Executes one run and returns the JSON report (schema_version 1).
/// Deterministic given config + seed, except for the wall_time field.
nlohmann::ordered_json run(const RunConfig& cfg);

/// Instance materialization shared with tests: file input or generator.
Matrix materialize_input(const RunConfig& cfg, SeededRng& rng, double* planted_noise_norm);

}  // namespace lpra
