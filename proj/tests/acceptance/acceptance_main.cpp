// Acceptance suite: runs every performance and correctness criterion at its
// pinned tolerance and prints one pass/fail line per criterion. Exit status
// is nonzero when any criterion fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "adherence/avg_criterion.hpp"
#include "adherence/dual_bound.hpp"
#include "adherence/dynamics.hpp"
#include "adherence/experiment.hpp"
#include "adherence/rng.hpp"
#include "adherence/simulator.hpp"
#include "adherence/threshold_metrics.hpp"
#include "adherence/whittle.hpp"
#include "support/oracles.hpp"

using namespace adherence;
namespace fs = std::filesystem;

namespace {

// Twelve unit-reward parameter sets spanning both p/q orderings, discount
// factors up to 0.999, and the beta == rho critical case.
const std::vector<PatientParams>& acceptance_sets() {
  static const std::vector<PatientParams> sets = {
      {0.30, 0.20, 1.0, 0.95}, {0.03, 0.02, 1.0, 0.95},  // beta == rho
      {0.10, 0.05, 1.0, 0.99}, {0.35, 0.01, 1.0, 0.99},
      {0.01, 0.01, 1.0, 0.90}, {0.20, 0.30, 1.0, 0.95},
      {0.05, 0.05, 1.0, 0.99}, {0.30, 0.35, 1.0, 0.85},
      {0.01, 0.35, 1.0, 0.99}, {0.35, 0.35, 1.0, 0.95},
      {0.10, 0.20, 1.0, 0.999}, {0.25, 0.10, 1.0, 0.92},
  };
  return sets;
}

int hardware_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 4 : static_cast<int>(std::min(n, 16u));
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

double elapsed_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// Criterion 1: closed-form threshold metrics against the truncated-recursion
// oracle on a 100 x 100 grid per parameter set, within beta^T/(1-beta)+1e-9
// componentwise, in under ten seconds.
Outcome criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  const auto& sets = acceptance_sets();
  std::atomic<bool> ok{true};
  std::vector<double> worst_ratio(sets.size(), 0.0);  // residual / tolerance
  std::vector<std::thread> pool;
  std::atomic<std::size_t> cursor{0};
  const int workers = std::min<int>(hardware_threads(), static_cast<int>(sets.size()));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const std::size_t k = cursor.fetch_add(1);
        if (k >= sets.size()) break;
        const PatientParams& pp = sets[k];
        const std::int64_t horizon = 2000;
        const double tol =
            std::pow(pp.beta, double(horizon)) / (1.0 - pp.beta) + 1e-9;
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
          const double x = i / 99.0;
          for (int j = 0; j < 100; ++j) {
            const Threshold z = Threshold::finite(j / 99.0);
            const MetricPair closed = threshold_metrics(pp, x, z);
            const MetricPair oracle = truncated_oracle(pp, x, z, horizon);
            worst = std::max({worst, std::abs(closed.reward - oracle.reward),
                              std::abs(closed.work - oracle.work)});
          }
        }
        worst_ratio[k] = worst / tol;
        if (worst > tol) ok = false;
      }
    });
  }
  for (std::thread& th : pool) th.join();
  const double seconds = elapsed_since(start);
  const double max_ratio = *std::max_element(worst_ratio.begin(), worst_ratio.end());
  Outcome out;
  out.pass = ok && seconds < 10.0;
  out.detail = "max residual/tolerance " + fmt(max_ratio) + ", runtime " + fmt(seconds) + " s";
  return out;
}

// Criterion 2: marginal work bounded below by 1 - beta on the same grids.
Outcome criterion_2() {
  Outcome out;
  double worst_slack = 1e300;
  for (const PatientParams& pp : acceptance_sets()) {
    double min_work = 1e300;
    for (int i = 0; i < 100; ++i) {
      const double x = i / 99.0;
      min_work = std::min(min_work, marginal_metrics(pp, x, Threshold::always_active()).work);
      min_work = std::min(min_work, marginal_metrics(pp, x, Threshold::always_passive()).work);
      for (int j = 0; j < 100; ++j)
        min_work = std::min(min_work, marginal_metrics(pp, x, Threshold::finite(j / 99.0)).work);
    }
    worst_slack = std::min(worst_slack, min_work - (1.0 - pp.beta));
    if (min_work < 1.0 - pp.beta - 1e-12) out.pass = false;
  }
  out.detail = "worst slack above 1-beta " + fmt(worst_slack);
  return out;
}

// Criterion 3: index agrees with the diagonal MP metric within 1e-10 on 2000
// points, is nondecreasing, and its branches are continuous within 1e-10.
Outcome criterion_3() {
  Outcome out;
  double worst_diag = 0.0, worst_mono = 0.0, worst_cont = 0.0;
  for (const PatientParams& pp : acceptance_sets()) {
    double prev = -1e300;
    for (int i = 0; i <= 2000; ++i) {
      const double x = i / 2000.0;
      const double index = mp_index_raw(pp, x);
      worst_diag =
          std::max(worst_diag, std::abs(index - mp_metric(pp, x, Threshold::finite(x))));
      worst_mono = std::max(worst_mono, prev - index);
      prev = index;
    }
    std::int64_t depth = 1;
    const double shrink = std::max(pp.rho, pp.beta);
    for (double s = shrink; s >= 1e-12 && depth < 50000; s *= shrink) ++depth;
    worst_cont = std::max(worst_cont, index_continuity_residual(pp, depth));
  }
  out.pass = worst_diag <= 1e-10 && worst_mono <= 1e-12 && worst_cont <= 1e-10;
  out.detail = "diagonal " + fmt(worst_diag) + ", monotone slack " + fmt(worst_mono) +
               ", continuity " + fmt(worst_cont);
  return out;
}

// Criterion 4: threshold-map round trips within 1e-9 on 2000-point grids.
Outcome criterion_4() {
  Outcome out;
  double worst_x = 0.0, worst_lambda = 0.0;
  for (const PatientParams& pp : acceptance_sets()) {
    for (int i = 0; i <= 2000; ++i) {
      const double x = i / 2000.0;
      const Threshold z = optimal_threshold(pp, mp_index_raw(pp, x));
      worst_x = std::max(worst_x, std::abs(z.value() - x));
    }
    const double lambda_max = mp_index_raw(pp, 1.0);
    for (int i = 0; i <= 2000; ++i) {
      const double lambda = lambda_max * i / 2000.0;
      const Threshold z = optimal_threshold(pp, lambda);
      worst_lambda = std::max(worst_lambda, std::abs(mp_index_raw(pp, z.value()) - lambda));
    }
  }
  out.pass = worst_x <= 1e-9 && worst_lambda <= 1e-9;
  out.detail = "x round trip " + fmt(worst_x) + ", price round trip " + fmt(worst_lambda);
  return out;
}

// Criterion 5: Stieltjes jump identity within 1e-6 over 200 sampled triples
// per parameter set (run through the full condition suite).
Outcome criterion_5() {
  Outcome out;
  double worst = 0.0;
  for (const PatientParams& pp : acceptance_sets()) {
    GridSpec spec;  // defaults: 100 x 100 grid, 200 triples, 1e-6
    const VerificationReport report = verify_pcl(pp, spec);
    worst = std::max(worst, report.max_integral_residual);
    if (!report.pass()) out.pass = false;
  }
  out.detail = "max integral residual " + fmt(worst);
  return out;
}

// Criterion 6: index sensitivity patterns in p and q on 50-point grids.
Outcome criterion_6() {
  Outcome out;
  std::int64_t pairs = 0;
  for (double x : {0.2, 0.5, 0.8}) {
    for (double q : {0.05, 0.2}) {
      const PatientParams base(0.3, q, 1.0, 0.95);
      std::vector<double> grid;
      const double hi = 1.0 - q - 0.02;
      for (int i = 0; i < 50; ++i) grid.push_back(0.01 + (hi - 0.01) * i / 49.0);
      const MonotonicityReport report = sensitivity_p(base, x, grid);
      pairs += report.checked_pairs;
      if (!report.pass) out.pass = false;
    }
    for (double p : {0.1, 0.3}) {
      const PatientParams base(p, 0.1, 1.0, 0.95);
      std::vector<double> grid;
      const double hi = 1.0 - p - 0.02;
      for (int i = 0; i < 50; ++i) grid.push_back(0.01 + (hi - 0.01) * i / 49.0);
      const MonotonicityReport report = sensitivity_q(base, x, grid);
      pairs += report.checked_pairs;
      if (!report.pass) out.pass = false;
    }
  }
  out.detail = std::to_string(pairs) + " finite-difference sign checks";
  return out;
}

// Criterion 7: uniform-initial metrics against quadrature of the pointwise
// metrics, within 1e-6 on 200 thresholds per set (beta == rho included).
Outcome criterion_7() {
  Outcome out;
  std::atomic<std::size_t> cursor{0};
  const auto& sets = acceptance_sets();
  std::vector<double> worst_by_set(sets.size(), 0.0);
  std::vector<std::thread> pool;
  const int workers = std::min<int>(hardware_threads(), static_cast<int>(sets.size()));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const std::size_t k = cursor.fetch_add(1);
        if (k >= sets.size()) break;
        const PatientParams& pp = sets[k];
        double local = 0.0;
        for (int j = 0; j < 200; ++j) {
          const double z = j / 199.0;
          const Threshold thr = Threshold::finite(z);
          const UniformMetricPair closed = uniform_metrics(pp, thr);
          const MetricPair quad = testsupport::quadrature_uniform(pp, thr, 400);
          local = std::max({local, std::abs(closed.reward - quad.reward),
                            std::abs(closed.work - quad.work)});
        }
        worst_by_set[k] = local;
      }
    });
  }
  for (std::thread& th : pool) th.join();
  const double worst = *std::max_element(worst_by_set.begin(), worst_by_set.end());
  out.pass = worst <= 1e-6;
  out.detail = "max quadrature residual " + fmt(worst);
  return out;
}

// Criterion 8: average criterion. Cycle-simulation match within 1e-6, the
// Abelian bridge within 1e-2 at beta = 0.9999 and shrinking along the
// ladder, and index branch continuity within 1e-10.
Outcome criterion_8() {
  Outcome out;
  double worst_cycle = 0.0, worst_bridge = 0.0, worst_cont = 0.0;
  for (const PatientParams& pp : acceptance_sets()) {
    for (int j = 0; j < 24; ++j) {
      const double z = (j + 0.5) / 24.0;
      const Threshold thr = Threshold::finite(z);
      const AvgMetricPair closed = avg_metrics(pp, thr);
      const MetricPair sim = testsupport::cycle_average(pp, thr);
      worst_cycle = std::max({worst_cycle, std::abs(closed.reward_rate - sim.reward),
                              std::abs(closed.work_rate - sim.work)});
    }
    GridSpec spec;
    spec.x_points = 40;
    spec.z_points = 60;
    spec.stieltjes_samples = 40;
    const ApcliReport report = verify_apcli(pp, spec);
    worst_bridge = std::max(worst_bridge, report.bridge_max_residual[2]);
    if (!report.bridge_ok) out.pass = false;
    if (!(report.bridge_max_residual[1] <= report.bridge_max_residual[0] + 1e-12 &&
          report.bridge_max_residual[2] <= report.bridge_max_residual[1] + 1e-12))
      out.pass = false;

    const auto middle = [&](std::int64_t t, double x) {
      return pp.r * ((double(t) + 1.0) * x + avg_passive_sum(pp, pp.p, t) - double(t));
    };
    // The middle-to-last seam of the average index closes like (t+1) rho^t.
    std::int64_t depth = 1;
    for (double s = pp.rho; (double(depth) + 1.0) * s >= 1e-11 && depth < 200000;
         s *= pp.rho)
      ++depth;
    double cont = std::abs(pp.r * pp.p - middle(1, pp.p));
    for (std::int64_t t = 1; t <= depth; ++t) {
      const double z_t = state_breakpoint(pp, t);
      cont = std::max(cont, std::abs(middle(t, z_t) - middle(t + 1, z_t)));
    }
    const double z_deep = state_breakpoint(pp, depth);
    cont = std::max(cont,
                    std::abs(middle(depth + 1, z_deep) - pp.r * z_deep / (1.0 - pp.rho)));
    worst_cont = std::max(worst_cont, cont);
  }
  if (worst_cycle > 1e-6 || worst_bridge > 1e-2 || worst_cont > 1e-10) out.pass = false;
  out.detail = "cycle " + fmt(worst_cycle) + ", bridge@0.9999 " + fmt(worst_bridge) +
               ", continuity " + fmt(worst_cont);
  return out;
}

// Criterion 9: bisection iteration budget, monotone right derivative, and
// weak duality against simulation on ten desk-scale instances.
Outcome criterion_9() {
  Outcome out;
  std::int64_t max_excess = -1000;
  for (const PatientParams& pp : acceptance_sets()) {
    std::vector<PatientParams> cohort(7, pp);
    for (double eps : {1e-6, 1e-9}) {
      const DualResult result = dual_bound(cohort, 3, eps);
      const double lambda_max = pp.r / (1.0 - pp.beta * pp.rho);
      const auto budget =
          static_cast<std::int64_t>(std::ceil(std::log2(lambda_max / eps))) + 2;
      max_excess = std::max(max_excess, result.iterations - budget);
      if (result.iterations > budget) out.pass = false;
    }
    std::vector<PatientParams> mixed = {pp, PatientParams(0.22, 0.11, 1.0, pp.beta), pp};
    double prev = -1e300;
    const double top = std::max(mp_index_raw(pp, 1.0), mp_index_raw(mixed[1], 1.0));
    for (int i = 0; i <= 1000; ++i) {
      const double d = dual_derivative(mixed, 1, top * i / 1000.0);
      if (d < prev - 1e-9) out.pass = false;
      prev = d;
    }
  }

  GridConfig grid;
  grid.n_patients = 100;
  grid.beta = 0.99;
  const std::vector<InstanceSpec> instances = desk_profile_instances(grid, 0);
  double worst_margin = 1e300;
  for (const InstanceSpec& spec : instances) {
    const Cohort cohort = spec.make_cohort();
    const DualResult dual = dual_bound(cohort.patients, spec.capacity(), 1e-6);
    const double dbar = (1.0 - spec.beta) / double(spec.n_patients) * dual.bound;
    SimConfig sim;
    sim.horizon = 300;
    sim.runs = 200;
    sim.capacity = spec.capacity();
    sim.seed = spec.seed;
    sim.threads = hardware_threads();
    for (Policy policy :
         {Policy::Whittle, Policy::Myopic, Policy::RoundRobin, Policy::Random}) {
      sim.policy = policy;
      const SimResult result = simulate(sim, cohort);
      const double margin = dbar - (result.vbar_mean - 3.0 * result.vbar_stderr);
      worst_margin = std::min(worst_margin, margin);
      if (margin < 0.0) out.pass = false;
    }
  }
  out.detail = "iteration budget slack " + std::to_string(-max_excess) +
               ", weak-duality margin " + fmt(worst_margin);
  return out;
}

// Criterion 10: scaled replication on the desk profile.
Outcome criterion_10(const fs::path& dir) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  GridConfig grid;
  grid.n_patients = 200;
  grid.beta = 0.99;
  const std::vector<InstanceSpec> instances = desk_profile_instances(grid, 20);

  StudyConfig config;
  config.runs = 200;
  config.horizon = 300;
  config.epsilon = 1e-6;
  config.threads = hardware_threads();

  fs::remove_all(dir);
  const std::vector<StudyRecord> records = run_study(instances, config, dir.string());
  double sum_w = 0.0, sum_rr = 0.0, sum_rand = 0.0;
  std::int64_t n = 0;
  for (const StudyRecord& record : records) {
    if (!record.error.empty()) {
      out.pass = false;
      out.detail = "per-instance error: " + record.error;
      return out;
    }
    sum_w += record.outcome(Policy::Whittle).gamma;
    sum_rr += record.outcome(Policy::RoundRobin).gamma;
    sum_rand += record.outcome(Policy::Random).gamma;
    ++n;
  }
  const double mean_w = sum_w / double(n);
  const double mean_rr = sum_rr / double(n);
  const double mean_rand = sum_rand / double(n);

  const StudyRecord& flagship = records.front();  // first reference row
  const double gap_w = flagship.outcome(Policy::Whittle).gamma;
  const double gap_m = flagship.outcome(Policy::Myopic).gamma;
  const double ratio_gaps = gap_m / gap_w;
  const double ratio_reward =
      flagship.outcome(Policy::Whittle).vbar / flagship.outcome(Policy::Myopic).vbar;

  const bool order_ok = mean_w < mean_rr && mean_rr < mean_rand;
  const bool flagship_ok = ratio_gaps >= 2.0;
  const bool band_ok = mean_w >= 0.03 && mean_w <= 0.09;
  const bool reward_ok = ratio_reward >= 1.05;
  const double seconds = elapsed_since(start);
  out.pass = order_ok && flagship_ok && band_ok && reward_ok && seconds < 900.0;
  out.detail = "mean gaps w/rr/rand " + fmt(mean_w * 100) + "/" + fmt(mean_rr * 100) + "/" +
               fmt(mean_rand * 100) + "%, flagship gap ratio " + fmt(ratio_gaps) +
               ", reward ratio " + fmt(ratio_reward) + ", runtime " + fmt(seconds) + " s";
  return out;
}

// Criterion 11: byte-identical study CSVs across thread counts.
Outcome criterion_11(const fs::path& base) {
  Outcome out;
  GridConfig grid;
  grid.p_grid = {0.05, 0.2};
  grid.q_grid = {0.05, 0.2};
  grid.prop_grid = {0.5, 0.7};
  grid.capacity_grid = {0.1, 0.3};
  grid.n_patients = 60;
  grid.beta = 0.99;
  grid.seed = 777;
  std::vector<InstanceSpec> instances = build_instance_grid(grid);

  StudyConfig config;
  config.runs = 64;
  config.horizon = 150;
  config.policies = {Policy::Whittle, Policy::WhittleAvg, Policy::Myopic, Policy::RoundRobin,
                     Policy::Random};

  std::string first;
  for (int threads : {1, 4}) {
    const fs::path dir = base / ("threads_" + std::to_string(threads));
    fs::remove_all(dir);
    config.threads = threads;
    run_study(instances, config, dir.string());
    std::ifstream in(dir / "study.csv", std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    if (first.empty())
      first = buf.str();
    else if (buf.str() != first)
      out.pass = false;
  }
  out.detail = std::to_string(instances.size()) + " instances, " +
               std::to_string(first.size()) + " csv bytes compared";
  return out;
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "adherence_acceptance";
  fs::create_directories(work);

  struct Entry {
    int id;
    const char* label;
    Outcome outcome;
  };
  std::vector<Entry> entries;
  entries.push_back({1, "closed-form metrics vs truncated oracle", criterion_1()});
  entries.push_back({2, "marginal work lower bound", criterion_2()});
  entries.push_back({3, "index consistency and continuity", criterion_3()});
  entries.push_back({4, "threshold-map round trips", criterion_4()});
  entries.push_back({5, "Stieltjes jump identity", criterion_5()});
  entries.push_back({6, "index sensitivity patterns", criterion_6()});
  entries.push_back({7, "uniform metrics vs quadrature", criterion_7()});
  entries.push_back({8, "average criterion and Abelian bridge", criterion_8()});
  entries.push_back({9, "dual bound: iterations, monotonicity, weak duality", criterion_9()});
  entries.push_back({10, "desk-profile replication", criterion_10(work / "study")});
  entries.push_back({11, "byte-identical studies across thread counts",
                     criterion_11(work / "determinism")});

  bool all_pass = true;
  for (const Entry& entry : entries) {
    std::printf("[%s] criterion %2d: %s (%s)\n", entry.outcome.pass ? "PASS" : "FAIL",
                entry.id, entry.label, entry.outcome.detail.c_str());
    if (!entry.outcome.pass) all_pass = false;
  }
  std::fflush(stdout);
  fs::remove_all(work);
  return all_pass ? 0 : 1;
}
