// Batch front end: loads or generates an instance, dispatches one algorithm
// run, and emits a JSON report. Exit codes: 0 ok, 2 config error, 3 numeric
// failure, 4 budget exceeded.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lpra/matrix.hpp"
#include "lpra/runner.hpp"

namespace {

void emit(const nlohmann::ordered_json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << std::endl;
  } else {
    std::ofstream out(out_path);
    if (!out) throw lpra::InvalidInput(out_path + ": cannot open for writing");
    out << j.dump(2) << "\n";
  }
}

int fail(int code, const std::string& kind, const std::string& message,
         const std::string& out_path) {
  nlohmann::ordered_json j;
  j["error"] = {{"code", code}, {"kind", kind}, {"message", message}};
  try {
    emit(j, out_path);
  } catch (const std::exception&) {
    std::cerr << j.dump() << std::endl;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entrywise lp low-rank approximation toolkit"};
  app.get_formatter()->column_width(36);

  std::string config_path;
  lpra::RunConfig cfg;
  std::string budget_mode;

  app.add_option("--config", config_path, "JSON config file; flags override its fields");
  app.add_option("--algo", cfg.algorithm,
                 "css | polyk | polyk-exact | fpt | sketch-check | hardness-scan | oracle");
  app.add_option("--input", cfg.input_path, "Matrix Market (.mtx) or CSV input");
  app.add_option("--gen", cfg.generator,
                 "inline generator, e.g. planted:n=60,d=60,k=3,noise=0.05 or hard:k=40,n=40");
  app.add_option("--k", cfg.k, "target rank");
  app.add_option("--p", cfg.p, "norm parameter in [1,2]");
  app.add_option("--eps", cfg.eps, "accuracy parameter for fpt");
  app.add_option("--seed", cfg.seed, "RNG seed");
  app.add_option("--out", cfg.out_path, "report path (default: stdout)");
  app.add_option("--factors-out", cfg.factors_out, "prefix for .left.mtx/.right.mtx factor dumps");
  app.add_flag("--with-oracle", cfg.with_oracle, "also run the brute-force oracle");
  app.add_option("--oracle-restarts", cfg.oracle_restarts, "alternating-minimization restarts");
  app.add_option("--fpt-f", cfg.fpt_f, "additive-error factor f for the fpt wrapper");
  app.add_option("--css-r-constant", cfg.css.r_constant, "c1 in the block size formula");
  app.add_option("--css-discard-fraction", cfg.css.discard_fraction, "delta per round");
  app.add_option("--css-repeats", cfg.css.repeats, "candidate blocks per round (0=auto)");
  app.add_option("--css-round-cap", cfg.css.round_cap, "round cap (0=auto)");
  app.add_flag("--css-fast-sketch", cfg.css.fast_sketch, "Lewis-sketch the round regressions");
  app.add_option("--blockenum-epsilon", cfg.blockenum.epsilon, "epsilon of the block enumeration");
  app.add_option("--blockenum-big-c", cfg.blockenum.big_constant_C, "small-b branch constant");
  app.add_flag("--blockenum-shared-sketch", cfg.blockenum.shared_sketch,
               "score block subsets through one shared Lewis sketch");
  app.add_option("--budget-sketch-rows", cfg.budget.sketch_rows, "p-stable sketch rows r");
  app.add_option("--budget-grid-cap", cfg.budget.grid_values_per_entry,
                 "grid values per guessed entry");
  app.add_option("--budget-max-guesses", cfg.budget.max_guesses, "guess enumeration cap");
  app.add_option("--budget-q", cfg.budget.q_norm_constant, "norm budget constant q (<=0: q=k)");
  app.add_option("--budget-subset-cap", cfg.budget.median_subset_cap,
                 "median-solve subset enumeration cap");
  app.add_option("--budget-mode", budget_mode, "full_enumeration | oracle_guided");
  app.add_option("--scan-ks", cfg.scan_ks, "k values for hardness-scan");
  app.add_option("--scan-subsets", cfg.scan_subsets, "random subsets per hardness-scan seed");
  app.add_option("--scan-seeds", cfg.scan_seeds, "seeds per hardness-scan k");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    return fail(2, "config", e.what(), "");
  }

  try {
    if (!config_path.empty()) {
      lpra::RunConfig from_file = lpra::load_config_json(config_path);
      // Start from the file, then re-apply any flag that was set explicitly.
      if (app.count("--algo")) from_file.algorithm = cfg.algorithm;
      if (app.count("--input")) from_file.input_path = cfg.input_path;
      if (app.count("--gen")) from_file.generator = cfg.generator;
      if (app.count("--k")) from_file.k = cfg.k;
      if (app.count("--p")) from_file.p = cfg.p;
      if (app.count("--eps")) from_file.eps = cfg.eps;
      if (app.count("--seed")) from_file.seed = cfg.seed;
      if (app.count("--out")) from_file.out_path = cfg.out_path;
      if (app.count("--factors-out")) from_file.factors_out = cfg.factors_out;
      if (app.count("--with-oracle")) from_file.with_oracle = cfg.with_oracle;
      if (app.count("--oracle-restarts")) from_file.oracle_restarts = cfg.oracle_restarts;
      if (app.count("--fpt-f")) from_file.fpt_f = cfg.fpt_f;
      if (app.count("--css-r-constant")) from_file.css.r_constant = cfg.css.r_constant;
      if (app.count("--css-discard-fraction"))
        from_file.css.discard_fraction = cfg.css.discard_fraction;
      if (app.count("--css-repeats")) from_file.css.repeats = cfg.css.repeats;
      if (app.count("--css-round-cap")) from_file.css.round_cap = cfg.css.round_cap;
      if (app.count("--css-fast-sketch")) from_file.css.fast_sketch = cfg.css.fast_sketch;
      if (app.count("--blockenum-epsilon")) from_file.blockenum.epsilon = cfg.blockenum.epsilon;
      if (app.count("--blockenum-big-c"))
        from_file.blockenum.big_constant_C = cfg.blockenum.big_constant_C;
      if (app.count("--blockenum-shared-sketch"))
        from_file.blockenum.shared_sketch = cfg.blockenum.shared_sketch;
      if (app.count("--budget-sketch-rows"))
        from_file.budget.sketch_rows = cfg.budget.sketch_rows;
      if (app.count("--budget-grid-cap"))
        from_file.budget.grid_values_per_entry = cfg.budget.grid_values_per_entry;
      if (app.count("--budget-max-guesses"))
        from_file.budget.max_guesses = cfg.budget.max_guesses;
      if (app.count("--budget-q")) from_file.budget.q_norm_constant = cfg.budget.q_norm_constant;
      if (app.count("--budget-subset-cap"))
        from_file.budget.median_subset_cap = cfg.budget.median_subset_cap;
      if (app.count("--scan-ks")) from_file.scan_ks = cfg.scan_ks;
      if (app.count("--scan-subsets")) from_file.scan_subsets = cfg.scan_subsets;
      if (app.count("--scan-seeds")) from_file.scan_seeds = cfg.scan_seeds;
      cfg = from_file;
    }
    if (!budget_mode.empty()) {
      if (budget_mode == "full_enumeration") {
        cfg.budget.mode = lpra::FptBudget::Mode::kFullEnumeration;
      } else if (budget_mode == "oracle_guided") {
        cfg.budget.mode = lpra::FptBudget::Mode::kOracleGuided;
      } else {
        return fail(2, "config", "budget-mode must be full_enumeration or oracle_guided",
                    cfg.out_path);
      }
    }

    nlohmann::ordered_json report = lpra::run(cfg);
    emit(report, cfg.out_path);
    return 0;
  } catch (const lpra::BudgetExceeded& e) {
    return fail(4, "budget", e.what(), cfg.out_path);
  } catch (const lpra::InvalidInput& e) {
    return fail(2, "config", e.what(), cfg.out_path);
  } catch (const std::exception& e) {
    return fail(3, "numeric", e.what(), cfg.out_path);
  }
}
