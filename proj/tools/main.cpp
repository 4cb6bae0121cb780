// Command-line front end. Links only the public C API.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adherence/capi.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRunError = 1;
constexpr int kExitConfigError = 2;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) {
  throw CliError{code, message};
}

void check(adh_status status, const std::string& what) {
  if (status == ADH_OK) return;
  const int code = status == ADH_ERR_IO ? kExitRunError : kExitConfigError;
  fail(code, what + ": " + adh_status_message(status));
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

using ParamsPtr = std::unique_ptr<adh_params, decltype(&adh_params_free)>;

ParamsPtr make_params(const std::string& spec) {
  std::vector<double> values;
  std::stringstream stream(spec);
  std::string field;
  while (std::getline(stream, field, ',')) {
    try {
      values.push_back(std::stod(field));
    } catch (const std::exception&) {
      fail(kExitConfigError, "--params expects comma-separated numbers, got '" + spec + "'");
    }
  }
  if (values.size() != 4 && values.size() != 5)
    fail(kExitConfigError, "--params expects p,q,r,beta[,cost]");
  adh_params* raw = nullptr;
  check(adh_params_create(values[0], values[1], values[2], values[3],
                          values.size() == 5 ? values[4] : 0.0, &raw),
        "invalid --params");
  return ParamsPtr(raw, &adh_params_free);
}

using CohortPtr = std::unique_ptr<adh_cohort, decltype(&adh_cohort_free)>;

CohortPtr make_cohort(const std::vector<std::string>& specs, std::int64_t count) {
  adh_cohort* raw = nullptr;
  check(adh_cohort_create(&raw), "cohort");
  CohortPtr cohort(raw, &adh_cohort_free);
  for (const std::string& spec : specs) {
    ParamsPtr params = make_params(spec);
    double p, q, r, beta, cost;
    adh_params_get(params.get(), &p, &q, &r, &beta, &cost, nullptr, nullptr);
    for (std::int64_t i = 0; i < count; ++i)
      check(adh_cohort_add(cohort.get(), p, q, r, beta, cost), "cohort add");
  }
  return cohort;
}

std::ostream& open_sink(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path, std::ios::binary | std::ios::trunc);
  if (!file) fail(kExitRunError, "cannot write " + path);
  return file;
}

int policy_id(const std::string& name) {
  static const std::map<std::string, int> ids = {{"whittle", ADH_POLICY_WHITTLE},
                                                 {"whittle_avg", ADH_POLICY_WHITTLE_AVG},
                                                 {"myopic", ADH_POLICY_MYOPIC},
                                                 {"round_robin", ADH_POLICY_ROUND_ROBIN},
                                                 {"random", ADH_POLICY_RANDOM}};
  const auto it = ids.find(name);
  if (it == ids.end()) fail(kExitConfigError, "unknown policy '" + name + "'");
  return it->second;
}

std::uint32_t policy_mask(const std::string& csv) {
  if (csv.empty()) return 0;
  std::uint32_t mask = 0;
  std::stringstream stream(csv);
  std::string name;
  while (std::getline(stream, name, ',')) mask |= 1u << policy_id(name);
  return mask;
}

// ---- subcommand bodies ----------------------------------------------------

int run_index(const std::string& params_spec, int points, const std::string& out_path) {
  ParamsPtr params = make_params(params_spec);
  std::ofstream file;
  std::ostream& out = open_sink(out_path, file);
  out << "x,whittle_index,avg_index\n";
  for (int i = 0; i < points; ++i) {
    const double x = points == 1 ? 0.0 : double(i) / (points - 1);
    double index = 0.0, avg = 0.0;
    check(adh_mp_index(params.get(), x, &index), "index");
    check(adh_avg_mp_index(params.get(), x, &avg), "avg index");
    out << num(x) << ',' << num(index) << ',' << num(avg) << '\n';
  }
  return kExitOk;
}

int run_threshold_map(const std::string& params_spec, int points,
                      const std::string& out_path) {
  ParamsPtr params = make_params(params_spec);
  adh_index_table* table = nullptr;
  check(adh_index_table_create(params.get(), 0, &table), "index table");
  double lambda_max = 0.0;
  adh_index_table_lambda_max(table, &lambda_max);
  adh_index_table_free(table);
  std::ofstream file;
  std::ostream& out = open_sink(out_path, file);
  out << "lambda,z_star\n";
  for (int i = 0; i < points; ++i) {
    const double lambda = points == 1 ? 0.0 : lambda_max * i / (points - 1);
    double z = 0.0;
    check(adh_optimal_threshold(params.get(), lambda, &z), "threshold map");
    out << num(lambda) << ',' << num(z) << '\n';
  }
  return kExitOk;
}

int run_metrics(const std::string& params_spec, double x, double z) {
  ParamsPtr params = make_params(params_spec);
  double reward = 0.0, work = 0.0;
  check(adh_threshold_metrics(params.get(), x, z, &reward, &work), "metrics");
  std::cout << "reward " << num(reward) << "\nwork " << num(work) << '\n';
  check(adh_marginal_metrics(params.get(), x, z, &reward, &work), "marginal metrics");
  std::cout << "marginal_reward " << num(reward) << "\nmarginal_work " << num(work) << '\n';
  double metric = 0.0;
  check(adh_mp_metric(params.get(), x, z, &metric), "mp metric");
  std::cout << "mp_metric " << num(metric) << '\n';
  check(adh_avg_metrics(params.get(), z, &reward, &work), "avg metrics");
  std::cout << "avg_reward_rate " << num(reward) << "\navg_work_rate " << num(work) << '\n';
  check(adh_uniform_metrics(params.get(), z, &reward, &work), "uniform metrics");
  std::cout << "uniform_reward " << num(reward) << "\nuniform_work " << num(work) << '\n';
  return kExitOk;
}

int run_dual_bound(const std::vector<std::string>& params_specs, std::int64_t count,
                   std::int64_t capacity, double epsilon, const std::string& initial,
                   const std::vector<double>& x0) {
  CohortPtr cohort = make_cohort(params_specs, count);
  size_t n = 0;
  adh_cohort_size(cohort.get(), &n);
  const int kind = initial == "fixed" ? ADH_INITIAL_FIXED : ADH_INITIAL_UNIFORM;
  std::vector<double> beliefs = x0;
  if (kind == ADH_INITIAL_FIXED && beliefs.size() != n)
    fail(kExitConfigError, "--x0 must supply one belief per patient");
  adh_dual_result result{};
  check(adh_dual_bound(cohort.get(), capacity, epsilon, kind,
                       beliefs.empty() ? nullptr : beliefs.data(), &result),
        "dual bound");
  const char* modes[] = {"at-zero", "at-max", "interior"};
  std::cout << "lambda_star " << num(result.lambda_star) << '\n'
            << "bound " << num(result.bound) << '\n'
            << "bound_midpoint " << num(result.bound_midpoint) << '\n'
            << "bracket_width " << num(result.bracket_width) << '\n'
            << "derivative_at_star " << num(result.derivative_at_star) << '\n'
            << "iterations " << result.iterations << '\n'
            << "mode " << modes[result.mode] << '\n';
  return kExitOk;
}

int run_simulate(const std::vector<std::string>& params_specs, std::int64_t count,
                 const adh_sim_config& config) {
  CohortPtr cohort = make_cohort(params_specs, count);
  adh_sim_result result{};
  check(adh_simulate(cohort.get(), &config, &result), "simulate");
  std::cout << "vbar_mean " << num(result.vbar_mean) << '\n'
            << "vbar_stderr " << num(result.vbar_stderr) << '\n'
            << "truncation_bias " << num(result.truncation_bias) << '\n'
            << "total_actions " << result.total_actions << '\n'
            << "max_actions_per_period " << result.max_actions_per_period << '\n'
            << "elapsed_seconds " << num(result.elapsed_seconds) << '\n';
  return kExitOk;
}

using GridPtr = std::unique_ptr<adh_instance_grid, decltype(&adh_instance_grid_free)>;

GridPtr make_grid(const std::string& profile, const std::string& grid_file,
                  std::int64_t n_patients, std::uint64_t seed, std::int64_t samples) {
  adh_instance_grid* raw = nullptr;
  if (!grid_file.empty()) {
    std::ifstream in(grid_file, std::ios::binary);
    if (!in) fail(kExitConfigError, "cannot read --grid-file " + grid_file);
    std::stringstream buf;
    buf << in.rdbuf();
    check(adh_instance_grid_from_json(buf.str().c_str(), &raw), "grid file");
  } else {
    adh_grid_config config{};
    config.n_patients = n_patients;
    config.seed = seed;
    if (profile == "paper") {
      if (n_patients <= 0) config.n_patients = 1000;
      check(adh_instance_grid_build(&config, &raw), "instance grid");
    } else if (profile == "desk") {
      if (n_patients <= 0) config.n_patients = 200;
      check(adh_instance_grid_desk(&config, samples, &raw), "desk profile");
    } else {
      fail(kExitConfigError, "--profile must be desk or paper");
    }
  }
  return GridPtr(raw, &adh_instance_grid_free);
}

int run_study_cmd(const GridPtr& grid, const adh_study_config& config,
                  const std::string& out_dir) {
  size_t count = 0;
  adh_instance_grid_count(grid.get(), &count);
  std::cerr << "study: " << count << " instances -> " << out_dir << '\n';
  const adh_status status = adh_study_run(grid.get(), &config, out_dir.c_str());
  if (status == ADH_ERR_IO) {
    std::cerr << "study: completed with per-instance errors (see study.csv)\n";
    return kExitRunError;
  }
  check(status, "study");
  return kExitOk;
}

int run_summarize(const std::string& records, const std::string& report,
                  const std::string& out_path) {
  int kind = ADH_REPORT_GAPS;
  if (report == "gaps")
    kind = ADH_REPORT_GAPS;
  else if (report == "ratios")
    kind = ADH_REPORT_RATIOS;
  else if (report == "worst-myopic")
    kind = ADH_REPORT_WORST_MYOPIC;
  else
    fail(kExitConfigError, "--report must be gaps, ratios or worst-myopic");
  if (!out_path.empty()) {
    check(adh_summarize_file(records.c_str(), kind, out_path.c_str()), "summarize");
    return kExitOk;
  }
  // No destination file: stage through a temporary and stream to stdout.
  const std::string tmp = records + ".summary.tmp";
  check(adh_summarize_file(records.c_str(), kind, tmp.c_str()), "summarize");
  std::ifstream in(tmp, std::ios::binary);
  std::cout << in.rdbuf();
  in.close();
  std::remove(tmp.c_str());
  return kExitOk;
}

int run_verify(const std::string& params_spec, double tolerance, std::uint64_t seed) {
  ParamsPtr params = make_params(params_spec);
  adh_grid_spec spec{};
  spec.tolerance = tolerance;
  spec.seed = seed;
  adh_verification_report pcl{};
  check(adh_verify_pcl(params.get(), &spec, &pcl), "verify");
  adh_apcli_report apcli{};
  check(adh_verify_apcli(params.get(), &spec, &apcli), "verify");

  const auto line = [](const char* name, bool ok, double value) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << " (" << num(value) << ")\n";
  };
  line("positive marginal work", pcl.positive_work_ok, pcl.min_marginal_work);
  line("index monotone and continuous", pcl.index_monotone_ok, pcl.max_continuity_residual);
  line("threshold jump identity", pcl.integral_ok, pcl.max_integral_residual);
  line("avg positive marginal work", apcli.core.positive_work_ok,
       apcli.core.min_marginal_work);
  line("avg index monotone and continuous", apcli.core.index_monotone_ok,
       apcli.core.max_continuity_residual);
  line("avg threshold jump identity", apcli.core.integral_ok,
       apcli.core.max_integral_residual);
  line("discounted-to-average bridge", apcli.bridge_ok, apcli.bridge_max_residual[2]);
  const bool all = pcl.positive_work_ok && pcl.index_monotone_ok && pcl.integral_ok &&
                   apcli.core.positive_work_ok && apcli.core.index_monotone_ok &&
                   apcli.core.integral_ok && apcli.bridge_ok;
  return all ? kExitOk : kExitRunError;
}

int run_curves(const std::string& params_spec, const std::string& out_dir, int points,
               std::vector<double> xs) {
  ParamsPtr params = make_params(params_spec);
  if (xs.empty()) xs = {0.25, 0.5, 0.75};
  const auto open = [&](const std::string& name, std::ofstream& file) -> std::ofstream& {
    file.open(out_dir + "/" + name, std::ios::binary | std::ios::trunc);
    if (!file) fail(kExitRunError, "cannot write " + out_dir + "/" + name);
    return file;
  };

  std::ofstream index_file;
  open("index.csv", index_file) << "x,whittle_index,avg_index\n";
  for (int i = 0; i < points; ++i) {
    const double x = double(i) / (points - 1);
    double w = 0.0, a = 0.0;
    check(adh_mp_index(params.get(), x, &w), "curves");
    check(adh_avg_mp_index(params.get(), x, &a), "curves");
    index_file << num(x) << ',' << num(w) << ',' << num(a) << '\n';
  }

  adh_index_table* table = nullptr;
  check(adh_index_table_create(params.get(), 0, &table), "curves");
  double lambda_max = 0.0;
  adh_index_table_lambda_max(table, &lambda_max);
  adh_index_table_free(table);
  std::ofstream map_file;
  open("threshold_map.csv", map_file) << "lambda,z_star\n";
  for (int i = 0; i < points; ++i) {
    const double lambda = lambda_max * i / (points - 1);
    double z = 0.0;
    check(adh_optimal_threshold(params.get(), lambda, &z), "curves");
    map_file << num(lambda) << ',' << num(z) << '\n';
  }

  std::ofstream stair_file;
  open("metrics_staircase.csv", stair_file)
      << "x,z,reward,work,marginal_reward,marginal_work\n";
  for (double x : xs) {
    for (int i = 0; i < points; ++i) {
      const double z = double(i) / (points - 1);
      double reward = 0.0, work = 0.0, mf = 0.0, mg = 0.0;
      check(adh_threshold_metrics(params.get(), x, z, &reward, &work), "curves");
      check(adh_marginal_metrics(params.get(), x, z, &mf, &mg), "curves");
      stair_file << num(x) << ',' << num(z) << ',' << num(reward) << ',' << num(work) << ','
                 << num(mf) << ',' << num(mg) << '\n';
    }
  }

  double p, q, r, beta, cost;
  adh_params_get(params.get(), &p, &q, &r, &beta, &cost, nullptr, nullptr);
  std::ofstream sp_file;
  open("sensitivity_p.csv", sp_file) << "x,p,index\n";
  for (double x : xs) {
    for (int i = 0; i < points; ++i) {
      const double pv = 0.01 + (1.0 - q - 0.03) * i / (points - 1);
      adh_params* varied = nullptr;
      if (adh_params_create(pv, q, r, beta, cost, &varied) != ADH_OK) continue;
      double w = 0.0;
      adh_mp_index(varied, x, &w);
      adh_params_free(varied);
      sp_file << num(x) << ',' << num(pv) << ',' << num(w) << '\n';
    }
  }
  std::ofstream sq_file;
  open("sensitivity_q.csv", sq_file) << "x,q,index\n";
  for (double x : xs) {
    for (int i = 0; i < points; ++i) {
      const double qv = 0.01 + (1.0 - p - 0.03) * i / (points - 1);
      adh_params* varied = nullptr;
      if (adh_params_create(p, qv, r, beta, cost, &varied) != ADH_OK) continue;
      double w = 0.0;
      adh_mp_index(varied, x, &w);
      adh_params_free(varied);
      sq_file << num(x) << ',' << num(qv) << ',' << num(w) << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Belief-state restless-bandit adherence planning toolkit"};
  app.require_subcommand(1);

  std::string params_spec;
  std::vector<std::string> cohort_specs;
  std::string out_path, out_dir, grid_file, records_path;
  std::string policy_name = "whittle", policies_csv, report_kind = "gaps";
  std::string initial = "uniform", profile = "desk";
  std::vector<double> x0;
  std::vector<double> xs;
  double x = 0.5, z = 0.5, epsilon = 1e-6, tolerance = 1e-6;
  std::int64_t count = 1, capacity = 0, runs = 0, horizon = 0, n_patients = 0, samples = 20;
  std::uint64_t seed = 20240515;
  int points = 201, threads = 1;

  CLI::App* cmd_index = app.add_subcommand("index", "Tabulate the Whittle/MP index");
  cmd_index->add_option("--params", params_spec, "p,q,r,beta[,cost]")->required();
  cmd_index->add_option("--points", points);
  cmd_index->add_option("--out", out_path);

  CLI::App* cmd_map = app.add_subcommand("threshold-map", "Tabulate z*(lambda)");
  cmd_map->add_option("--params", params_spec)->required();
  cmd_map->add_option("--points", points);
  cmd_map->add_option("--out", out_path);

  CLI::App* cmd_metrics = app.add_subcommand("metrics", "Point metrics at (x, z)");
  cmd_metrics->add_option("--params", params_spec)->required();
  cmd_metrics->add_option("--x", x)->required();
  cmd_metrics->add_option("--z", z)->required();

  CLI::App* cmd_dual = app.add_subcommand("dual-bound", "Lagrangian dual bound");
  cmd_dual->add_option("--params", cohort_specs)->required();
  cmd_dual->add_option("--count", count, "replicate each --params this many times");
  cmd_dual->add_option("--capacity", capacity)->required();
  cmd_dual->add_option("--eps", epsilon);
  cmd_dual->add_option("--initial", initial)->check(CLI::IsMember({"uniform", "fixed"}));
  cmd_dual->add_option("--x0", x0, "per-patient initial beliefs for --initial fixed");

  CLI::App* cmd_sim = app.add_subcommand("simulate", "Monte-Carlo policy simulation");
  cmd_sim->add_option("--params", cohort_specs)->required();
  cmd_sim->add_option("--count", count);
  cmd_sim->add_option("--capacity", capacity)->required();
  cmd_sim->add_option("--policy", policy_name);
  cmd_sim->add_option("--runs", runs);
  cmd_sim->add_option("--horizon", horizon);
  cmd_sim->add_option("--seed", seed);
  cmd_sim->add_option("--threads", threads);

  CLI::App* cmd_study = app.add_subcommand("study", "Instance-grid study");
  cmd_study->add_option("--profile", profile)->check(CLI::IsMember({"desk", "paper"}));
  cmd_study->add_option("--grid-file", grid_file, "JSON grid configuration");
  cmd_study->add_option("--out-dir", out_dir)->required();
  cmd_study->add_option("--seed", seed);
  cmd_study->add_option("--eps", epsilon);
  cmd_study->add_option("--runs", runs);
  cmd_study->add_option("--horizon", horizon);
  cmd_study->add_option("--n-patients", n_patients);
  cmd_study->add_option("--samples", samples, "sampled grid instances in the desk profile");
  cmd_study->add_option("--policies", policies_csv, "comma-separated policy names");
  cmd_study->add_option("--threads", threads);

  CLI::App* cmd_sum = app.add_subcommand("summarize", "Summarize study records");
  cmd_sum->add_option("--records", records_path)->required();
  cmd_sum->add_option("--report", report_kind);
  cmd_sum->add_option("--out", out_path);

  CLI::App* cmd_verify = app.add_subcommand("verify", "Indexability condition suites");
  cmd_verify->add_option("--params", params_spec)->required();
  cmd_verify->add_option("--tol", tolerance);
  cmd_verify->add_option("--seed", seed);

  CLI::App* cmd_curves = app.add_subcommand("curves", "Emit columnar curve data");
  cmd_curves->add_option("--params", params_spec)->required();
  cmd_curves->add_option("--out-dir", out_dir)->required();
  cmd_curves->add_option("--points", points);
  cmd_curves->add_option("--x", xs, "belief values for the staircase curves");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (cmd_index->parsed()) return run_index(params_spec, points, out_path);
    if (cmd_map->parsed()) return run_threshold_map(params_spec, points, out_path);
    if (cmd_metrics->parsed()) return run_metrics(params_spec, x, z);
    if (cmd_dual->parsed())
      return run_dual_bound(cohort_specs, count, capacity, epsilon, initial, x0);
    if (cmd_sim->parsed()) {
      adh_sim_config config{};
      config.horizon = horizon > 0 ? horizon : 300;
      config.runs = runs > 0 ? runs : 200;
      config.capacity = capacity;
      config.seed = seed;
      config.policy = policy_id(policy_name);
      config.threads = threads;
      config.initial_beliefs = nullptr;
      return run_simulate(cohort_specs, count, config);
    }
    if (cmd_study->parsed()) {
      const GridPtr grid =
          make_grid(profile, grid_file, n_patients, seed, samples);
      adh_study_config config{};
      config.runs = runs;
      config.horizon = horizon;
      config.epsilon = epsilon;
      config.threads = threads;
      config.policies = policy_mask(policies_csv);
      return run_study_cmd(grid, config, out_dir);
    }
    if (cmd_sum->parsed()) return run_summarize(records_path, report_kind, out_path);
    if (cmd_verify->parsed()) return run_verify(params_spec, tolerance, seed);
    if (cmd_curves->parsed()) return run_curves(params_spec, out_dir, points, xs);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRunError;
  }
  return kExitConfigError;
}
