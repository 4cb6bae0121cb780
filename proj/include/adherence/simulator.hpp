#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adherence/params.hpp"
#include "adherence/rng.hpp"

namespace adherence {

enum class Policy : std::uint8_t { Whittle, WhittleAvg, Myopic, RoundRobin, Random };

const char* policy_name(Policy policy);
/// Parses "whittle", "whittle_avg", "myopic", "round_robin", "random";
/// throws std::invalid_argument otherwise.
Policy parse_policy(const std::string& name);

/// An N-patient cohort: per-patient model constants plus current beliefs.
struct Cohort {
  std::vector<PatientParams> patients;
  std::vector<double> beliefs;

  std::size_t size() const { return patients.size(); }
};

struct SimConfig {
  std::int64_t horizon = 300;
  std::int64_t runs = 1;
  std::int64_t capacity = 0;
  std::uint64_t seed = 0;
  Policy policy = Policy::Whittle;
  /// Draw initial beliefs from Uniform[0, 1) per (run, patient) substream;
  /// when false, the cohort's belief vector is reused for every run.
  bool uniform_initial = true;
  int threads = 1;
};

struct SimResult {
  double vbar_mean = 0.0;    ///< (1 - beta)/N x discounted cohort reward, averaged over runs
  double vbar_stderr = 0.0;  ///< standard error across runs
  double truncation_bias = 0.0;  ///< max_n r_n * beta^T, the horizon-cutoff slack on vbar
  std::uint64_t total_actions = 0;
  std::int64_t max_actions_per_period = 0;
  double elapsed_seconds = 0.0;
  std::int64_t runs = 0;
  std::int64_t horizon = 0;
};

/// Chooses the action vector for one period: exactly min(capacity, #eligible)
/// patients are activated. Whittle ranks by the cost-adjusted index,
/// WhittleAvg by the average-criterion index minus cost, Myopic by r_n x_n;
/// index policies require a nonnegative index for eligibility. Round-robin
/// activates the cyclic block starting at (period * capacity) mod N; Random
/// draws capacity distinct patients from rng. Ties break by ascending id.
std::vector<std::uint8_t> select_actions(Policy policy, std::span<const PatientParams> patients,
                                         std::span<const double> beliefs, std::int64_t capacity,
                                         std::int64_t period, SplitMix64& rng);

/// Monte-Carlo estimate of the normalized reward under `config.policy`.
/// Deterministic given the seed and independent of `config.threads`.
SimResult simulate(const SimConfig& config, const Cohort& cohort_template);

/// Relative Lagrangian gap (dbar - vbar) / dbar; may come out slightly
/// negative within Monte-Carlo noise and is reported unclamped.
/// Rejects dbar <= 0.
double relative_gap(double vbar, double dbar);

}  // namespace adherence
