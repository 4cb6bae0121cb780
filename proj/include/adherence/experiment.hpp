#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adherence/simulator.hpp"

namespace adherence {

/// One two-type cohort instance: type A is the more self-healing type
/// (pA < pB and qA > qB).
struct InstanceSpec {
  std::string id;
  double p_a, q_a, p_b, q_b;
  double prop_a;          ///< type-A fraction, rounded with >= 1 patient each
  double capacity_ratio;  ///< M / N
  std::int64_t n_patients;
  double r;
  double beta;
  std::uint64_t seed;

  std::int64_t count_a() const;
  std::int64_t capacity() const;
  Cohort make_cohort() const;
};

/// Grid configuration; defaults reproduce the full two-type instance design
/// (225 ordered type pairs x 5 mixes x 6 capacity ratios = 6750 instances).
struct GridConfig {
  std::vector<double> p_grid = {0.01, 0.05, 0.10, 0.20, 0.30, 0.35};
  std::vector<double> q_grid = {0.01, 0.05, 0.10, 0.20, 0.30, 0.35};
  std::vector<double> prop_grid = {0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<double> capacity_grid = {0.05, 0.10, 0.20, 0.30, 0.40, 0.50};
  std::int64_t n_patients = 1000;
  double r = 1.0;
  double beta = 0.99;
  double delta_rho = 0.05;  ///< feasibility margin: p + q <= 1 - delta_rho
  std::uint64_t seed = 20240515;

  std::int64_t filtered_pairs = 0;  ///< infeasible (p, q) pairs dropped, set by the builder
};

/// Enumerates all feasible ordered two-type instances from the grids.
/// Rejects configurations whose feasible (p, q) set is empty.
std::vector<InstanceSpec> build_instance_grid(GridConfig& config);

/// Desk-scale profile: the ten hardest-for-myopic reference instances plus
/// `sample_count` pseudo-randomly sampled grid instances (seeded), all sized
/// to config.n_patients.
std::vector<InstanceSpec> desk_profile_instances(const GridConfig& config,
                                                 std::int64_t sample_count);

constexpr std::array<Policy, 5> kAllPolicies = {Policy::Whittle, Policy::WhittleAvg,
                                                Policy::Myopic, Policy::RoundRobin,
                                                Policy::Random};

struct PolicyOutcome {
  bool run = false;
  double vbar = 0.0;
  double stderr_ = 0.0;
  double gamma = 0.0;           ///< raw relative Lagrangian gap
  double gamma_adjusted = 0.0;  ///< gap after crediting the horizon-truncation slack
};

struct StudyRecord {
  InstanceSpec spec;
  double dbar = 0.0;         ///< normalized dual bound (1 - beta)/N x bound
  double lambda_star = 0.0;
  double truncation_bias = 0.0;
  std::array<PolicyOutcome, kAllPolicies.size()> policies;
  double runtime_seconds = 0.0;  ///< reported in the timing sidecar only
  std::string error;

  const PolicyOutcome& outcome(Policy policy) const;
  PolicyOutcome& outcome(Policy policy);
};

struct StudyConfig {
  std::int64_t runs = 200;
  std::int64_t horizon = 300;
  double epsilon = 1e-6;
  int threads = 1;
  std::vector<Policy> policies = {Policy::Whittle, Policy::Myopic, Policy::RoundRobin,
                                  Policy::Random};
};

/// Runs dual bound + policy simulations per instance with common random
/// numbers across policies. Records stream to <out_dir>/records/<id>.csvline
/// as they finish, so an interrupted study resumes by recomputing only the
/// missing ids; the final study.csv is assembled in instance order and is
/// byte-identical across reruns and thread counts. Per-instance failures are
/// recorded in the record's error field, never thrown.
std::vector<StudyRecord> run_study(std::span<const InstanceSpec> instances,
                                   const StudyConfig& config, const std::string& out_dir);

enum class ReportKind : std::uint8_t { Gaps, Ratios, WorstMyopic };

ReportKind parse_report_kind(const std::string& name);

/// Summary statistics (mean, sample std, min, quartiles by linear
/// interpolation, max) rendered as CSV text. Gaps are in percent.
/// Rejects an empty record set.
std::string summarize(std::span<const StudyRecord> records, ReportKind kind);

/// Round-trips for the CSV artifacts.
std::string study_csv_header();
std::string study_record_to_csv_line(const StudyRecord& record);
StudyRecord study_record_from_csv_line(const std::string& line);
std::vector<StudyRecord> read_study_csv(const std::string& path);

}  // namespace adherence
