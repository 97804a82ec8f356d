#include "lpra/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "lpra/io.hpp"
#include "lpra/oracle.hpp"
#include "lpra/sketch_checks.hpp"
#include "lpra/solvers.hpp"

namespace lpra {

namespace {

using nlohmann::ordered_json;

std::map<std::string, std::string> parse_kv(const std::string& body) {
  std::map<std::string, std::string> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidInput("generator: expected key=value, got " + item);
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

double kv_num(const std::map<std::string, std::string>& kv, const std::string& key,
              double fallback = std::numeric_limits<double>::quiet_NaN()) {
  auto it = kv.find(key);
  if (it == kv.end()) {
    if (std::isnan(fallback)) throw InvalidInput("generator: missing field '" + key + "'");
    return fallback;
  }
  return std::stod(it->second);
}

}  // namespace

void RunConfig::validate() const {
  static const char* kAlgos[] = {"css",          "polyk",         "polyk-exact", "fpt",
                                 "sketch-check", "hardness-scan", "oracle"};
  bool ok = false;
  for (const char* a : kAlgos) ok = ok || algorithm == a;
  if (!ok) throw InvalidInput("unknown algorithm '" + algorithm + "'");
  if (!(p >= 1.0 && p <= 2.0)) throw InvalidInput("p must lie in [1,2]");
  if (k < 1) throw InvalidInput("k must be >= 1");
  if (algorithm == "fpt" && !(eps > 0.0 && eps < 1.0)) {
    throw InvalidInput("eps must lie in (0,1)");
  }
  const bool needs_input = algorithm != "sketch-check" && algorithm != "hardness-scan";
  if (needs_input && input_path.empty() == generator.empty()) {
    throw InvalidInput("exactly one of --input and --gen is required");
  }
}

Matrix materialize_input(const RunConfig& cfg, SeededRng& rng, double* planted_noise_norm) {
  if (planted_noise_norm != nullptr) *planted_noise_norm = -1.0;
  if (!cfg.input_path.empty()) return read_matrix_auto(cfg.input_path);

  const auto colon = cfg.generator.find(':');
  const std::string name = cfg.generator.substr(0, colon);
  const auto kv = colon == std::string::npos ? std::map<std::string, std::string>{}
                                             : parse_kv(cfg.generator.substr(colon + 1));
  if (name == "planted") {
    PlantedInstance inst = planted_instance(
        static_cast<Index>(kv_num(kv, "n")), static_cast<Index>(kv_num(kv, "d")),
        static_cast<Index>(kv_num(kv, "k")), kv_num(kv, "noise", 0.0), cfg.p, rng);
    if (planted_noise_norm != nullptr) *planted_noise_norm = inst.noise_norm_p;
    return inst.a;
  }
  if (name == "hard") {
    HardInstance h = hard_instance(static_cast<Index>(kv_num(kv, "k")),
                                   static_cast<Index>(kv_num(kv, "n")), rng);
    return h.m;
  }
  if (name == "gaussian") {
    return gaussian_matrix(static_cast<Index>(kv_num(kv, "n")),
                           static_cast<Index>(kv_num(kv, "d")), rng);
  }
  throw InvalidInput("unknown generator '" + name + "'");
}

namespace {

ordered_json config_echo(const RunConfig& cfg) {
  ordered_json j;
  j["algorithm"] = cfg.algorithm;
  j["input"] = cfg.input_path;
  j["gen"] = cfg.generator;
  j["k"] = cfg.k;
  j["p"] = cfg.p;
  j["eps"] = cfg.eps;
  j["seed"] = cfg.seed;
  j["with_oracle"] = cfg.with_oracle;
  j["oracle_restarts"] = cfg.oracle_restarts;
  j["fpt_f"] = cfg.fpt_f;
  j["css"] = {{"r_constant", cfg.css.r_constant},
              {"discard_fraction", cfg.css.discard_fraction},
              {"repeats", cfg.css.repeats},
              {"round_cap", cfg.css.round_cap},
              {"fast_sketch", cfg.css.fast_sketch}};
  j["blockenum"] = {{"epsilon", cfg.blockenum.epsilon},
                    {"big_constant_C", cfg.blockenum.big_constant_C},
                    {"shared_sketch", cfg.blockenum.shared_sketch},
                    {"subset_budget", cfg.blockenum.subset_budget}};
  j["budget"] = {{"sketch_rows", cfg.budget.sketch_rows},
                 {"grid_values_per_entry", cfg.budget.grid_values_per_entry},
                 {"max_guesses", cfg.budget.max_guesses},
                 {"q_norm_constant", cfg.budget.q_norm_constant},
                 {"median_subset_cap", cfg.budget.median_subset_cap},
                 {"mode", cfg.budget.mode == FptBudget::Mode::kFullEnumeration
                              ? "full_enumeration"
                              : "oracle_guided"}};
  j["scan_ks"] = cfg.scan_ks;
  j["scan_subsets"] = cfg.scan_subsets;
  j["scan_seeds"] = cfg.scan_seeds;
  return j;
}

void maybe_write_factors(const RunConfig& cfg, const Matrix& left, const Matrix& right) {
  if (cfg.factors_out.empty()) return;
  write_matrix_market(left, cfg.factors_out + ".left.mtx");
  write_matrix_market(right, cfg.factors_out + ".right.mtx");
}

double subset_statistic(const HardInstance& h, int subsets, double p, SeededRng& rng) {
  // min over random half-size subsets of css_error^p / n.
  const Index n = h.n;
  const Index half = n / 2;
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  double best = std::numeric_limits<double>::infinity();
  std::vector<ColumnIndexSet> draws;
  draws.reserve(static_cast<std::size_t>(subsets));
  for (int t = 0; t < subsets; ++t) {
    std::vector<Index> scratch = pool;
    for (Index i = 0; i < half; ++i) {
      const Index j =
          i + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n - i)));
      std::swap(scratch[static_cast<std::size_t>(i)], scratch[static_cast<std::size_t>(j)]);
    }
    scratch.resize(static_cast<std::size_t>(half));
    std::sort(scratch.begin(), scratch.end());
    draws.emplace_back(scratch);
  }
  std::vector<double> errs(draws.size());
  for (std::size_t t = 0; t < draws.size(); ++t) {
    errs[t] = css_error(h.m, draws[t], p);
  }
  for (double e : errs) best = std::min(best, std::pow(e, p) / static_cast<double>(n));
  return best;
}

}  // namespace

ordered_json run(const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  SeededRng rng(cfg.seed);

  ordered_json rep;
  rep["schema_version"] = 1;
  rep["algorithm"] = cfg.algorithm;
  rep["achieved_error_p"] = nullptr;
  rep["baseline_svd_error"] = nullptr;
  rep["oracle_opt"] = nullptr;
  rep["ratio_vs_svd"] = nullptr;
  rep["ratio_vs_oracle"] = nullptr;
  rep["rank_of_output"] = nullptr;
  rep["columns_selected"] = nullptr;

  if (cfg.algorithm == "sketch-check") {
    SeededRng sub = rng.fork("sketch-check");
    auto checks = run_all_sketch_checks(cfg.p, sub);
    ordered_json cj;
    bool all = true;
    for (const auto& c : checks) {
      cj[c.name] = {{"passes", c.passes}, {"trials", c.trials}, {"required", c.required},
                    {"passed", c.passed()}};
      all = all && c.passed();
    }
    rep["checks"] = cj;
    rep["all_passed"] = all;
  } else if (cfg.algorithm == "hardness-scan") {
    ordered_json scan = ordered_json::array();
    std::vector<double> medians;
    for (Index k : cfg.scan_ks) {
      std::vector<double> stats;
      for (int s = 0; s < cfg.scan_seeds; ++s) {
        SeededRng seed_rng = rng.fork("hard-seed").fork(static_cast<std::uint64_t>(s));
        HardInstance h = hard_instance(k, k, seed_rng);
        SeededRng subset_rng = seed_rng.fork("subsets");
        stats.push_back(subset_statistic(h, cfg.scan_subsets, cfg.p, subset_rng));
      }
      std::sort(stats.begin(), stats.end());
      const double median = stats[stats.size() / 2];
      medians.push_back(median);
      scan.push_back({{"k", k}, {"median_statistic", median}});
    }
    rep["scan"] = scan;
    rep["grows_with_k"] =
        medians.size() >= 2 && medians.back() > medians.front();
  } else {
    double planted_noise = -1.0;
    SeededRng gen_rng = rng.fork("instance");
    Matrix a = materialize_input(cfg, gen_rng, &planted_noise);
    if (a.rows() < 1 || a.cols() < 1) throw InvalidInput("input matrix is empty");
    const double a_norm = entrywise_norm(a, cfg.p);
    const double svd_err = svd_baseline(a, cfg.k, cfg.p);
    rep["baseline_svd_error"] = svd_err;
    if (planted_noise >= 0.0) rep["planted_noise_norm_p"] = planted_noise;

    double achieved = 0.0;
    if (cfg.algorithm == "css") {
      SeededRng sub = rng.fork("css");
      CssResult res = random_column_subset_selection(a, cfg.k, cfg.p, sub, cfg.css);
      achieved = css_error(a, res.selected, cfg.p);
      rep["columns_selected"] = res.selected.size();
      rep["rank_of_output"] = res.selected.size();
      rep["rounds"] = static_cast<int>(res.blocks.size());
      Matrix u = select_columns(a, res.selected);
      MultiRegressionResult fit = multi_response_regression(u, a, cfg.p);
      maybe_write_factors(cfg, u, fit.x);
    } else if (cfg.algorithm == "polyk") {
      SeededRng sub = rng.fork("polyk");
      BlockEnumResult res = poly_k_error_and_rank(a, cfg.k, cfg.p, sub, cfg.blockenum);
      MultiRegressionResult fit = multi_response_regression(res.u, a, cfg.p);
      double acc = 0.0;
      for (Index j = 0; j < fit.costs.size(); ++j) acc += std::pow(fit.costs(j), cfg.p);
      achieved = std::pow(acc, 1.0 / cfg.p);
      rep["columns_selected"] = res.selected.size();
      rep["rank_of_output"] = res.u.cols();
      rep["greedy_fallback"] = res.greedy_fallback;
      maybe_write_factors(cfg, res.u, fit.x);
    } else if (cfg.algorithm == "polyk-exact") {
      SeededRng sub = rng.fork("polyk-exact");
      FactorPair fp = poly_k_not_bicriteria(a, cfg.k, cfg.p, sub, cfg.blockenum);
      achieved = fp.achieved_error_p;
      rep["rank_of_output"] = numerical_rank(fp.left);
      maybe_write_factors(cfg, fp.left, fp.right);
    } else if (cfg.algorithm == "fpt") {
      SeededRng sub = rng.fork("fpt");
      FptWrapperResult res = rounding_guessing_eps_approximation(
          a, cfg.k, cfg.eps, cfg.p, cfg.budget, sub, cfg.fpt_f, cfg.blockenum);
      achieved = res.factors.achieved_error_p;
      rep["rank_of_output"] = numerical_rank(res.factors.left);
      rep["initializer_error"] = res.initializer_error;
      rep["svd_error_of_residual"] = res.svd_error;
      rep["opt_grid_size"] = static_cast<int>(res.opt_grid.size());
      rep["chosen_grid_index"] = res.chosen_grid_index;
      maybe_write_factors(cfg, res.factors.left, res.factors.right);
    } else {  // oracle
      SeededRng sub = rng.fork("oracle");
      achieved = brute_force_opt(a, cfg.k, cfg.p, cfg.oracle_restarts, sub);
      rep["oracle_opt"] = achieved;
      rep["rank_of_output"] = cfg.k;
    }

    rep["achieved_error_p"] = achieved;
    // A baseline at numerical zero makes the ratio meaningless noise.
    if (svd_err > 1e-12 * a_norm) rep["ratio_vs_svd"] = achieved / svd_err;
    if (cfg.with_oracle && cfg.algorithm != "oracle") {
      SeededRng sub = rng.fork("oracle");
      const double opt = brute_force_opt(a, cfg.k, cfg.p, cfg.oracle_restarts, sub);
      rep["oracle_opt"] = opt;
      if (opt > 0.0) rep["ratio_vs_oracle"] = achieved / opt;
    }
  }

  const auto t1 = std::chrono::steady_clock::now();
  rep["wall_time"] = std::chrono::duration<double>(t1 - t0).count();
  rep["seed"] = cfg.seed;
  rep["config"] = config_echo(cfg);
  return rep;
}

RunConfig load_config_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(path + ": cannot open config file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw InvalidInput(path + ": bad JSON: " + e.what());
  }
  RunConfig cfg;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "algorithm") cfg.algorithm = it->get<std::string>();
    else if (key == "input") cfg.input_path = it->get<std::string>();
    else if (key == "gen") cfg.generator = it->get<std::string>();
    else if (key == "k") cfg.k = it->get<Index>();
    else if (key == "p") cfg.p = it->get<double>();
    else if (key == "eps") cfg.eps = it->get<double>();
    else if (key == "seed") cfg.seed = it->get<std::uint64_t>();
    else if (key == "out") cfg.out_path = it->get<std::string>();
    else if (key == "factors_out") cfg.factors_out = it->get<std::string>();
    else if (key == "with_oracle") cfg.with_oracle = it->get<bool>();
    else if (key == "oracle_restarts") cfg.oracle_restarts = it->get<int>();
    else if (key == "fpt_f") cfg.fpt_f = it->get<double>();
    else if (key == "css_r_constant") cfg.css.r_constant = it->get<double>();
    else if (key == "css_discard_fraction") cfg.css.discard_fraction = it->get<double>();
    else if (key == "css_repeats") cfg.css.repeats = it->get<int>();
    else if (key == "css_round_cap") cfg.css.round_cap = it->get<int>();
    else if (key == "css_fast_sketch") cfg.css.fast_sketch = it->get<bool>();
    else if (key == "blockenum_epsilon") cfg.blockenum.epsilon = it->get<double>();
    else if (key == "blockenum_big_c") cfg.blockenum.big_constant_C = it->get<double>();
    else if (key == "blockenum_shared_sketch") cfg.blockenum.shared_sketch = it->get<bool>();
    else if (key == "blockenum_subset_budget") cfg.blockenum.subset_budget = it->get<long>();
    else if (key == "budget_sketch_rows") cfg.budget.sketch_rows = it->get<Index>();
    else if (key == "budget_grid_cap") cfg.budget.grid_values_per_entry = it->get<int>();
    else if (key == "budget_max_guesses") cfg.budget.max_guesses = it->get<long>();
    else if (key == "budget_q") cfg.budget.q_norm_constant = it->get<double>();
    else if (key == "budget_subset_cap") cfg.budget.median_subset_cap = it->get<int>();
    else if (key == "budget_mode") {
      const std::string mode = it->get<std::string>();
      if (mode == "full_enumeration") cfg.budget.mode = FptBudget::Mode::kFullEnumeration;
      else if (mode == "oracle_guided") cfg.budget.mode = FptBudget::Mode::kOracleGuided;
      else throw InvalidInput("budget_mode must be full_enumeration or oracle_guided");
    } else if (key == "scan_ks") cfg.scan_ks = it->get<std::vector<Index>>();
    else if (key == "scan_subsets") cfg.scan_subsets = it->get<int>();
    else if (key == "scan_seeds") cfg.scan_seeds = it->get<int>();
    else throw InvalidInput(path + ": unknown config key '" + key + "'");
  }
  return cfg;
}

}  // namespace lpra
