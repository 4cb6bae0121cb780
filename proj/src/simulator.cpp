#include "adherence/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "adherence/avg_criterion.hpp"
#include "adherence/dynamics.hpp"
#include "adherence/whittle.hpp"

namespace adherence {

namespace {

constexpr std::uint64_t kInitStream = 0x1717;
constexpr std::uint64_t kRandomPolicyStream = 0x5A5A;

double policy_score(Policy policy, const PatientParams& pp, double belief) {
  switch (policy) {
    case Policy::Whittle: return mp_index(pp, belief);
    case Policy::WhittleAvg: return avg_mp_index(pp, belief) - pp.cost;
    case Policy::Myopic: return pp.r * belief;
    default: return 0.0;
  }
}

bool is_index_policy(Policy policy) {
  return policy == Policy::Whittle || policy == Policy::WhittleAvg || policy == Policy::Myopic;
}

// Top-capacity selection among eligible ids by (score desc, id asc); writes
// the action vector in place.
void pick_top(std::span<const double> scores, std::vector<int>& eligible, std::int64_t capacity,
              std::vector<std::uint8_t>& actions) {
  std::fill(actions.begin(), actions.end(), std::uint8_t{0});
  const auto m = static_cast<std::size_t>(capacity);
  const auto better = [&scores](int a, int b) {
    return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)] ||
           (scores[static_cast<std::size_t>(a)] == scores[static_cast<std::size_t>(b)] && a < b);
  };
  if (eligible.size() > m)
    std::nth_element(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(m),
                     eligible.end(), better);
  const std::size_t take = std::min(m, eligible.size());
  for (std::size_t i = 0; i < take; ++i) actions[static_cast<std::size_t>(eligible[i])] = 1;
}

void select_round_robin(std::size_t n, std::int64_t capacity, std::int64_t period,
                        std::vector<std::uint8_t>& actions) {
  std::fill(actions.begin(), actions.end(), std::uint8_t{0});
  const auto m = std::min<std::int64_t>(capacity, static_cast<std::int64_t>(n));
  const std::int64_t start = (period * capacity) % static_cast<std::int64_t>(n);
  for (std::int64_t j = 0; j < m; ++j)
    actions[static_cast<std::size_t>((start + j) % static_cast<std::int64_t>(n))] = 1;
}

void select_random(std::size_t n, std::int64_t capacity, SplitMix64& rng,
                   std::vector<int>& scratch, std::vector<std::uint8_t>& actions) {
  std::fill(actions.begin(), actions.end(), std::uint8_t{0});
  scratch.resize(n);
  std::iota(scratch.begin(), scratch.end(), 0);
  const auto m = std::min<std::size_t>(static_cast<std::size_t>(capacity), n);
  for (std::size_t i = 0; i < m; ++i) {  // partial Fisher-Yates
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
    std::swap(scratch[i], scratch[j]);
    actions[static_cast<std::size_t>(scratch[i])] = 1;
  }
}

// Per-parameter-set score cache along the post-reset trajectory. The beliefs
// are produced by the same passive_step iteration the simulator applies, so a
// cached score is bitwise identical to recomputing it from the live belief.
struct ResetPathCache {
  std::vector<double> beliefs;
  std::vector<double> scores;

  void build(Policy policy, const PatientParams& pp, std::int64_t horizon) {
    beliefs.resize(static_cast<std::size_t>(horizon) + 1);
    scores.resize(beliefs.size());
    double b = pp.p;
    for (std::size_t k = 0; k < beliefs.size(); ++k) {
      beliefs[k] = b;
      scores[k] = policy_score(policy, pp, b);
      b = passive_step(pp, b);
    }
  }
};

struct RunOutput {
  double vbar = 0.0;
  std::uint64_t actions = 0;
  std::int64_t max_actions_per_period = 0;
};

struct TypeRef {
  const PatientParams* params;
  const ResetPathCache* cache;
};

bool same_params(const PatientParams& a, const PatientParams& b) {
  return a.p == b.p && a.q == b.q && a.r == b.r && a.beta == b.beta && a.cost == b.cost;
}

}  // namespace

const char* policy_name(Policy policy) {
  switch (policy) {
    case Policy::Whittle: return "whittle";
    case Policy::WhittleAvg: return "whittle_avg";
    case Policy::Myopic: return "myopic";
    case Policy::RoundRobin: return "round_robin";
    default: return "random";
  }
}

Policy parse_policy(const std::string& name) {
  if (name == "whittle") return Policy::Whittle;
  if (name == "whittle_avg") return Policy::WhittleAvg;
  if (name == "myopic") return Policy::Myopic;
  if (name == "round_robin") return Policy::RoundRobin;
  if (name == "random") return Policy::Random;
  throw std::invalid_argument("unknown policy: " + name);
}

std::vector<std::uint8_t> select_actions(Policy policy, std::span<const PatientParams> patients,
                                         std::span<const double> beliefs, std::int64_t capacity,
                                         std::int64_t period, SplitMix64& rng) {
  const std::size_t n = patients.size();
  if (beliefs.size() != n)
    throw std::invalid_argument("select_actions: beliefs size must match cohort");
  if (capacity < 0 || capacity > static_cast<std::int64_t>(n))
    throw std::invalid_argument("select_actions: capacity must lie in [0, N]");
  std::vector<std::uint8_t> actions(n, 0);
  if (capacity == 0 || n == 0) return actions;

  switch (policy) {
    case Policy::RoundRobin:
      select_round_robin(n, capacity, period, actions);
      return actions;
    case Policy::Random: {
      std::vector<int> scratch;
      select_random(n, capacity, rng, scratch, actions);
      return actions;
    }
    default:
      break;
  }

  std::vector<double> scores(n);
  std::vector<int> eligible;
  eligible.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = policy_score(policy, patients[i], beliefs[i]);
    if (scores[i] >= 0.0) eligible.push_back(static_cast<int>(i));
  }
  pick_top(scores, eligible, capacity, actions);
  return actions;
}

namespace {

RunOutput simulate_one_run(const SimConfig& config, const Cohort& cohort,
                           std::span<const TypeRef> type_of, std::int64_t run) {
  const std::size_t n = cohort.size();
  const double beta = cohort.patients.front().beta;

  std::vector<double> beliefs(n);
  if (config.uniform_initial) {
    for (std::size_t i = 0; i < n; ++i)
      beliefs[i] = SplitMix64(mix_seed(config.seed, kInitStream, static_cast<std::uint64_t>(run),
                                       static_cast<std::uint64_t>(i)))
                       .next_double();
  } else {
    beliefs = cohort.beliefs;
  }
  // Steps since the last reset; -1 while a patient has never been activated.
  std::vector<std::int64_t> since_reset(n, -1);
  // One-slot memo for the pre-reset phase (the trajectory converges, so the
  // belief eventually stops changing bitwise).
  std::vector<double> memo_belief(n, -1.0);
  std::vector<double> memo_score(n, 0.0);

  std::vector<double> scores(n);
  std::vector<int> eligible;
  eligible.reserve(n);
  std::vector<int> scratch;
  std::vector<std::uint8_t> actions(n, 0);

  const bool scored = is_index_policy(config.policy);
  RunOutput out;
  double total = 0.0;
  double discount = 1.0;

  for (std::int64_t t = 0; t < config.horizon; ++t) {
    if (config.policy == Policy::RoundRobin) {
      select_round_robin(n, config.capacity, t, actions);
    } else if (config.policy == Policy::Random) {
      SplitMix64 rng(mix_seed(config.seed, kRandomPolicyStream, static_cast<std::uint64_t>(run),
                              static_cast<std::uint64_t>(t)));
      select_random(n, config.capacity, rng, scratch, actions);
    } else if (scored) {
      eligible.clear();
      for (std::size_t i = 0; i < n; ++i) {
        double s;
        if (since_reset[i] >= 0) {
          s = type_of[i].cache->scores[static_cast<std::size_t>(since_reset[i])];
        } else if (beliefs[i] == memo_belief[i]) {
          s = memo_score[i];
        } else {
          s = policy_score(config.policy, *type_of[i].params, beliefs[i]);
          memo_belief[i] = beliefs[i];
          memo_score[i] = s;
        }
        scores[i] = s;
        if (s >= 0.0) eligible.push_back(static_cast<int>(i));
      }
      if (config.capacity == 0)
        std::fill(actions.begin(), actions.end(), std::uint8_t{0});
      else
        pick_top(scores, eligible, config.capacity, actions);
    }

    std::int64_t active_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const PatientParams& pp = *type_of[i].params;
      if (actions[i]) {
        total += discount * pp.r;
        beliefs[i] = pp.p;
        since_reset[i] = 0;
        ++active_count;
      } else {
        total += discount * pp.r * (1.0 - beliefs[i]);
        beliefs[i] = passive_step(pp, beliefs[i]);
        if (since_reset[i] >= 0) ++since_reset[i];
      }
    }
    out.actions += static_cast<std::uint64_t>(active_count);
    out.max_actions_per_period = std::max(out.max_actions_per_period, active_count);
    discount *= beta;
  }

  out.vbar = (1.0 - beta) / static_cast<double>(n) * total;
  return out;
}

}  // namespace

SimResult simulate(const SimConfig& config, const Cohort& cohort_template) {
  const auto start_time = std::chrono::steady_clock::now();
  const std::size_t n = cohort_template.size();
  if (n == 0) throw std::invalid_argument("simulate: cohort must be nonempty");
  if (config.horizon <= 0) throw std::invalid_argument("simulate: horizon must be positive");
  if (config.runs <= 0) throw std::invalid_argument("simulate: runs must be positive");
  if (config.capacity < 0 || config.capacity > static_cast<std::int64_t>(n))
    throw std::invalid_argument("simulate: capacity must lie in [0, N]");
  if (!config.uniform_initial && cohort_template.beliefs.size() != n)
    throw std::invalid_argument("simulate: explicit beliefs must match cohort size");
  for (const PatientParams& pp : cohort_template.patients) {
    if (pp.beta != cohort_template.patients.front().beta)
      throw std::invalid_argument("simulate: cohort must share one discount factor");
  }

  // Deduplicate parameter sets and precompute per-set score caches.
  std::vector<PatientParams> unique_params;
  std::vector<std::size_t> type_index(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = 0;
    for (; k < unique_params.size(); ++k)
      if (same_params(unique_params[k], cohort_template.patients[i])) break;
    if (k == unique_params.size()) unique_params.push_back(cohort_template.patients[i]);
    type_index[i] = k;
  }
  std::vector<ResetPathCache> caches(unique_params.size());
  if (is_index_policy(config.policy)) {
    for (std::size_t k = 0; k < unique_params.size(); ++k)
      caches[k].build(config.policy, unique_params[k], config.horizon);
  }
  std::vector<TypeRef> type_of(n);
  for (std::size_t i = 0; i < n; ++i)
    type_of[i] = {&unique_params[type_index[i]], &caches[type_index[i]]};

  std::vector<RunOutput> outputs(static_cast<std::size_t>(config.runs));
  const int threads = std::max(1, std::min<int>(config.threads,
                                                static_cast<int>(config.runs)));
  if (threads == 1) {
    for (std::int64_t run = 0; run < config.runs; ++run)
      outputs[static_cast<std::size_t>(run)] =
          simulate_one_run(config, cohort_template, type_of, run);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w]() {
        for (std::int64_t run = w; run < config.runs; run += threads)
          outputs[static_cast<std::size_t>(run)] =
              simulate_one_run(config, cohort_template, type_of, run);
      });
    }
    for (std::thread& th : pool) th.join();
  }

  SimResult result;
  result.runs = config.runs;
  result.horizon = config.horizon;
  double sum = 0.0;
  for (const RunOutput& out : outputs) {  // ordered reduction by run index
    sum += out.vbar;
    result.total_actions += out.actions;
    result.max_actions_per_period =
        std::max(result.max_actions_per_period, out.max_actions_per_period);
  }
  result.vbar_mean = sum / static_cast<double>(config.runs);
  if (config.runs > 1) {
    double ss = 0.0;
    for (const RunOutput& out : outputs) {
      const double d = out.vbar - result.vbar_mean;
      ss += d * d;
    }
    result.vbar_stderr = std::sqrt(ss / static_cast<double>(config.runs - 1)) /
                         std::sqrt(static_cast<double>(config.runs));
  }
  double r_max = 0.0;
  for (const PatientParams& pp : cohort_template.patients) r_max = std::max(r_max, pp.r);
  result.truncation_bias =
      r_max * std::pow(cohort_template.patients.front().beta,
                       static_cast<double>(config.horizon));
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  return result;
}

double relative_gap(double vbar, double dbar) {
  if (!(dbar > 0.0)) throw std::invalid_argument("relative_gap: dbar must be positive");
  return (dbar - vbar) / dbar;
}

}  // namespace adherence
