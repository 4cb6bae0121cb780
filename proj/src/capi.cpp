#include "adherence/capi.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "adherence/avg_criterion.hpp"
#include "adherence/dual_bound.hpp"
#include "adherence/dynamics.hpp"
#include "adherence/experiment.hpp"
#include "adherence/simulator.hpp"
#include "adherence/threshold_metrics.hpp"
#include "adherence/whittle.hpp"

using namespace adherence;

struct adh_params {
  PatientParams value;
};

struct adh_index_table {
  IndexTable value;
};

struct adh_cohort {
  std::vector<PatientParams> patients;
};

struct adh_instance_grid {
  std::vector<InstanceSpec> instances;
};

namespace {

Threshold decode_threshold(double z) {
  if (z < 0.0) return Threshold::always_active();
  if (z >= 1.0) return Threshold::always_passive();
  return Threshold::finite(z);
}

double encode_threshold(const Threshold& z) {
  switch (z.kind()) {
    case Threshold::Kind::AlwaysActive: return ADH_THRESHOLD_ALWAYS_ACTIVE;
    case Threshold::Kind::AlwaysPassive: return ADH_THRESHOLD_ALWAYS_PASSIVE;
    default: return z.value();
  }
}

bool valid_belief(double x) { return x >= 0.0 && x <= 1.0; }

template <class Fn>
adh_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument&) {
    return ADH_ERR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    return ADH_ERR_OUT_OF_MEMORY;
  } catch (const std::ios_base::failure&) {
    return ADH_ERR_IO;
  } catch (const std::exception&) {
    return ADH_ERR_INTERNAL;
  }
}

GridSpec decode_grid_spec(const adh_grid_spec* spec) {
  GridSpec out;
  if (!spec) return out;
  if (spec->x_points > 0) out.x_points = spec->x_points;
  if (spec->z_points > 0) out.z_points = spec->z_points;
  if (spec->stieltjes_samples > 0) out.stieltjes_samples = spec->stieltjes_samples;
  if (spec->tolerance > 0.0) out.tolerance = spec->tolerance;
  if (spec->seed != 0) out.seed = spec->seed;
  return out;
}

void encode_report(const VerificationReport& in, adh_verification_report* out) {
  out->positive_work_ok = in.positive_work_ok ? 1 : 0;
  out->min_marginal_work = in.min_marginal_work;
  out->index_monotone_ok = in.index_monotone_ok ? 1 : 0;
  out->max_monotonicity_violation = in.max_monotonicity_violation;
  out->max_continuity_residual = in.max_continuity_residual;
  out->integral_ok = in.integral_ok ? 1 : 0;
  out->max_integral_residual = in.max_integral_residual;
}

GridConfig decode_grid_config(const adh_grid_config* config) {
  GridConfig out;
  if (!config) return out;
  if (config->p_grid) out.p_grid.assign(config->p_grid, config->p_grid + config->p_count);
  if (config->q_grid) out.q_grid.assign(config->q_grid, config->q_grid + config->q_count);
  if (config->prop_grid)
    out.prop_grid.assign(config->prop_grid, config->prop_grid + config->prop_count);
  if (config->capacity_grid)
    out.capacity_grid.assign(config->capacity_grid,
                             config->capacity_grid + config->capacity_count);
  if (config->n_patients > 0) out.n_patients = config->n_patients;
  if (config->r > 0.0) out.r = config->r;
  if (config->beta > 0.0) out.beta = config->beta;
  if (config->seed != 0) out.seed = config->seed;
  return out;
}

}  // namespace

extern "C" {

const char* adh_status_message(adh_status status) {
  switch (status) {
    case ADH_OK: return "ok";
    case ADH_ERR_NULL_POINTER: return "null pointer";
    case ADH_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ADH_ERR_OUT_OF_MEMORY: return "out of memory";
    case ADH_ERR_IO: return "i/o error";
    default: return "internal error";
  }
}

const char* adh_version(void) { return "1.0.0"; }

adh_status adh_params_create(double p, double q, double r, double beta, double cost,
                             adh_params** out) {
  if (!out) return ADH_ERR_NULL_POINTER;
  *out = nullptr;
  return guarded([&]() {
    *out = new adh_params{PatientParams(p, q, r, beta, cost)};
    return ADH_OK;
  });
}

void adh_params_free(adh_params* params) { delete params; }

adh_status adh_params_get(const adh_params* params, double* p, double* q, double* r,
                          double* beta, double* cost, double* rho, double* z_inf) {
  if (!params) return ADH_ERR_NULL_POINTER;
  if (p) *p = params->value.p;
  if (q) *q = params->value.q;
  if (r) *r = params->value.r;
  if (beta) *beta = params->value.beta;
  if (cost) *cost = params->value.cost;
  if (rho) *rho = params->value.rho;
  if (z_inf) *z_inf = params->value.z_inf;
  return ADH_OK;
}

adh_status adh_passive_step(const adh_params* params, double x, double* out) {
  if (!params || !out) return ADH_ERR_NULL_POINTER;
  if (!valid_belief(x)) return ADH_ERR_INVALID_ARGUMENT;
  *out = passive_step(params->value, x);
  return ADH_OK;
}

adh_status adh_trajectory_point(const adh_params* params, double x, int64_t t, double* out) {
  if (!params || !out) return ADH_ERR_NULL_POINTER;
  if (!valid_belief(x) || t < 0) return ADH_ERR_INVALID_ARGUMENT;
  *out = trajectory_point(params->value, x, t);
  return ADH_OK;
}

adh_status adh_crossing_time(const adh_params* params, double x, double z, int* finite,
                             int64_t* t) {
  if (!params || !finite || !t) return ADH_ERR_NULL_POINTER;
  if (!valid_belief(x)) return ADH_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    const CrossingTime ct = crossing_time(params->value, x, decode_threshold(z));
    *finite = ct.has_value() ? 1 : 0;
    *t = ct.value_or(0);
    return ADH_OK;
  });
}

adh_status adh_state_breakpoint(const adh_params* params, int64_t t, double* out) {
  if (!params || !out) return ADH_ERR_NULL_POINTER;
  if (t < -1) return ADH_ERR_INVALID_ARGUMENT;
  *out = state_breakpoint(params->value, t);
  return ADH_OK;
}

adh_status adh_disc_passive_sum(const adh_params* params, double x, int64_t t, double* out) {
  if (!params || !out) return ADH_ERR_NULL_POINTER;
  if (!valid_belief(x) || t < 0) return ADH_ERR_INVALID_ARGUMENT;
  *out = disc_passive_sum(params->value, x, t);
  return ADH_OK;
}

adh_status adh_disc_passive_sum_inf(const adh_params* params, double x, double* out) {
  if (!params || !out) return ADH_ERR_NULL_POINTER;
  if (!valid_belief(x)) return ADH_ERR_INVALID_ARGUMENT;
  *out = disc_passive_sum_inf(params->value, x);
  return ADH_OK;
}

adh_status adh_avg_passive_sum(const adh_params* params, double x, int64_t t, double* out) {
  if (!params || !out) return ADH_ERR_NULL_POINTER;
  if (!valid_belief(x) || t < 0) return ADH_ERR_INVALID_ARGUMENT;
  *out = avg_passive_sum(params->value, x, t);
  return ADH_OK;
}

adh_status adh_classify_threshold(const adh_params* params, double z, int* regime,
                                  int64_t* t) {
  if (!params || !regime || !t) return ADH_ERR_NULL_POINTER;
  return guarded([&]() {
    const Regime result = classify_threshold(params->value, decode_threshold(z));
    *regime = static_cast<int>(result.kind);
    *t = result.t;
    return ADH_OK;
  });
}

adh_status adh_threshold_metrics(const adh_params* params, double x, double z, double* reward,
                                 double* work) {
  if (!params || !reward || !work) return ADH_ERR_NULL_POINTER;
  if (!valid_belief(x)) return ADH_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    const MetricPair m = threshold_metrics(params->value, x, decode_threshold(z));
    *reward = m.reward;
    *work = m.work;
    return ADH_OK;
  });
}

adh_status adh_marginal_metrics(const adh_params* params, double x, double z, double* reward,
                                double* work) {
  if (!params || !reward || !work) return ADH_ERR_NULL_POINTER;
  if (!valid_belief(x)) return ADH_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    const MetricPair m = marginal_metrics(params->value, x, decode_threshold(z));
    *reward = m.reward;
    *work = m.work;
    return ADH_OK;
  });
}

adh_status adh_mp_metric(const adh_params* params, double x, double z, double* out) {
  if (!params || !out) return ADH_ERR_NULL_POINTER;
  if (!valid_belief(x)) return ADH_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    *out = mp_metric(params->value, x, decode_threshold(z));
    return ADH_OK;
  });
}

adh_status adh_truncated_oracle(const adh_params* params, double x, double z, int64_t horizon,
                                double* reward, double* work) {
  if (!params || !reward || !work) return ADH_ERR_NULL_POINTER;
  if (!valid_belief(x)) return ADH_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    const MetricPair m = truncated_oracle(params->value, x, decode_threshold(z), horizon);
    *reward = m.reward;
    *work = m.work;
    return ADH_OK;
  });
}

adh_status adh_mp_index(const adh_params* params, double x, double* out) {
  if (!params || !out) return ADH_ERR_NULL_POINTER;
  if (!valid_belief(x)) return ADH_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    *out = mp_index(params->value, x);
    return ADH_OK;
  });
}

adh_status adh_optimal_threshold(const adh_params* params, double lambda, double* out) {
  if (!params || !out) return ADH_ERR_NULL_POINTER;
  return guarded([&]() {
    *out = encode_threshold(optimal_threshold(params->value, lambda));
    return ADH_OK;
  });
}

adh_status adh_index_table_create(const adh_params* params, int64_t t_max,
                                  adh_index_table** out) {
  if (!params || !out) return ADH_ERR_NULL_POINTER;
  *out = nullptr;
  return guarded([&]() {
    const std::int64_t depth = t_max > 0 ? t_max : default_table_depth(params->value);
    *out = new adh_index_table{build_index_table(params->value, depth)};
    return ADH_OK;
  });
}

void adh_index_table_free(adh_index_table* table) { delete table; }

adh_status adh_index_table_breakpoints(const adh_index_table* table, size_t* count) {
  if (!table || !count) return ADH_ERR_NULL_POINTER;
  *count = table->value.price_breakpoints.size();
  return ADH_OK;
}

adh_status adh_index_table_row(const adh_index_table* table, size_t i, double* z,
                               double* lambda) {
  if (!table) return ADH_ERR_NULL_POINTER;
  if (i >= table->value.price_breakpoints.size()) return ADH_ERR_INVALID_ARGUMENT;
  if (z) *z = table->value.state_breakpoints[i + 1];
  if (lambda) *lambda = table->value.price_breakpoints[i];
  return ADH_OK;
}

adh_status adh_index_table_lambda_max(const adh_index_table* table, double* out) {
  if (!table || !out) return ADH_ERR_NULL_POINTER;
  *out = table->value.lambda_max;
  return ADH_OK;
}

adh_status adh_reachable_set(const adh_params* params, double x, double tol, double* buffer,
                             size_t capacity, size_t* count) {
  if (!params || !count) return ADH_ERR_NULL_POINTER;
  if (!valid_belief(x)) return ADH_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    const ReachableSet set = reachable_set(params->value, x, tol);
    *count = set.points.size();
    if (buffer) {
      const size_t n = capacity < set.points.size() ? capacity : set.points.size();
      std::memcpy(buffer, set.points.data(), n * sizeof(double));
    }
    return ADH_OK;
  });
}

adh_status adh_verify_pcl(const adh_params* params, const adh_grid_spec* spec,
                          adh_verification_report* out) {
  if (!params || !out) return ADH_ERR_NULL_POINTER;
  return guarded([&]() {
    encode_report(verify_pcl(params->value, decode_grid_spec(spec)), out);
    return ADH_OK;
  });
}

adh_status adh_verify_apcli(const adh_params* params, const adh_grid_spec* spec,
                            adh_apcli_report* out) {
  if (!params || !out) return ADH_ERR_NULL_POINTER;
  return guarded([&]() {
    const ApcliReport report = verify_apcli(params->value, decode_grid_spec(spec));
    encode_report(report.core, &out->core);
    out->bridge_ok = report.bridge_ok ? 1 : 0;
    for (int k = 0; k < 3; ++k) out->bridge_max_residual[k] = report.bridge_max_residual[k];
    return ADH_OK;
  });
}

adh_status adh_sensitivity_p(const adh_params* base, double x, const double* p_grid,
                             size_t count, adh_monotonicity_report* out) {
  if (!base || !p_grid || !out) return ADH_ERR_NULL_POINTER;
  if (!valid_belief(x)) return ADH_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    const MonotonicityReport report =
        sensitivity_p(base->value, x, std::span<const double>(p_grid, count));
    out->pass = report.pass ? 1 : 0;
    out->checked_pairs = report.checked_pairs;
    out->violations = report.violations;
    out->max_violation = report.max_violation;
    return ADH_OK;
  });
}

adh_status adh_sensitivity_q(const adh_params* base, double x, const double* q_grid,
                             size_t count, adh_monotonicity_report* out) {
  if (!base || !q_grid || !out) return ADH_ERR_NULL_POINTER;
  if (!valid_belief(x)) return ADH_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    const MonotonicityReport report =
        sensitivity_q(base->value, x, std::span<const double>(q_grid, count));
    out->pass = report.pass ? 1 : 0;
    out->checked_pairs = report.checked_pairs;
    out->violations = report.violations;
    out->max_violation = report.max_violation;
    return ADH_OK;
  });
}

adh_status adh_avg_metrics(const adh_params* params, double z, double* reward_rate,
                           double* work_rate) {
  if (!params || !reward_rate || !work_rate) return ADH_ERR_NULL_POINTER;
  return guarded([&]() {
    const AvgMetricPair m = avg_metrics(params->value, decode_threshold(z));
    *reward_rate = m.reward_rate;
    *work_rate = m.work_rate;
    return ADH_OK;
  });
}

adh_status adh_avg_marginal_metrics(const adh_params* params, double x, double z,
                                    double* reward_rate, double* work_rate) {
  if (!params || !reward_rate || !work_rate) return ADH_ERR_NULL_POINTER;
  if (!valid_belief(x)) return ADH_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    const AvgMetricPair m = avg_marginal_metrics(params->value, x, decode_threshold(z));
    *reward_rate = m.reward_rate;
    *work_rate = m.work_rate;
    return ADH_OK;
  });
}

adh_status adh_avg_mp_index(const adh_params* params, double x, double* out) {
  if (!params || !out) return ADH_ERR_NULL_POINTER;
  if (!valid_belief(x)) return ADH_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    *out = avg_mp_index(params->value, x);
    return ADH_OK;
  });
}

adh_status adh_uniform_metrics(const adh_params* params, double z, double* reward,
                               double* work) {
  if (!params || !reward || !work) return ADH_ERR_NULL_POINTER;
  return guarded([&]() {
    const UniformMetricPair m = uniform_metrics(params->value, decode_threshold(z));
    *reward = m.reward;
    *work = m.work;
    return ADH_OK;
  });
}

adh_status adh_cohort_create(adh_cohort** out) {
  if (!out) return ADH_ERR_NULL_POINTER;
  return guarded([&]() {
    *out = new adh_cohort();
    return ADH_OK;
  });
}

void adh_cohort_free(adh_cohort* cohort) { delete cohort; }

adh_status adh_cohort_add(adh_cohort* cohort, double p, double q, double r, double beta,
                          double cost) {
  if (!cohort) return ADH_ERR_NULL_POINTER;
  return guarded([&]() {
    cohort->patients.emplace_back(p, q, r, beta, cost);
    return ADH_OK;
  });
}

adh_status adh_cohort_size(const adh_cohort* cohort, size_t* out) {
  if (!cohort || !out) return ADH_ERR_NULL_POINTER;
  *out = cohort->patients.size();
  return ADH_OK;
}

adh_status adh_patient_lagrangian(const adh_params* params, double lambda, int initial_kind,
                                  double x0, double* out) {
  if (!params || !out) return ADH_ERR_NULL_POINTER;
  if (initial_kind == ADH_INITIAL_FIXED && !valid_belief(x0)) return ADH_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    const InitialBelief init = initial_kind == ADH_INITIAL_FIXED ? InitialBelief::fixed(x0)
                                                                 : InitialBelief::uniform();
    *out = patient_lagrangian(params->value, lambda, init);
    return ADH_OK;
  });
}

adh_status adh_dual_derivative(const adh_cohort* cohort, int64_t capacity, double lambda,
                               int initial_kind, const double* x0, double* out) {
  if (!cohort || !out) return ADH_ERR_NULL_POINTER;
  if (initial_kind == ADH_INITIAL_FIXED && !x0) return ADH_ERR_NULL_POINTER;
  return guarded([&]() {
    const std::span<const double> fixed =
        initial_kind == ADH_INITIAL_FIXED
            ? std::span<const double>(x0, cohort->patients.size())
            : std::span<const double>();
    *out = dual_derivative(cohort->patients, capacity, lambda, fixed);
    return ADH_OK;
  });
}

adh_status adh_dual_bound(const adh_cohort* cohort, int64_t capacity, double epsilon,
                          int initial_kind, const double* x0, adh_dual_result* out) {
  if (!cohort || !out) return ADH_ERR_NULL_POINTER;
  if (initial_kind == ADH_INITIAL_FIXED && !x0) return ADH_ERR_NULL_POINTER;
  return guarded([&]() {
    const std::span<const double> fixed =
        initial_kind == ADH_INITIAL_FIXED
            ? std::span<const double>(x0, cohort->patients.size())
            : std::span<const double>();
    const DualResult result = dual_bound(cohort->patients, capacity, epsilon, fixed);
    out->lambda_star = result.lambda_star;
    out->bound = result.bound;
    out->bound_midpoint = result.bound_midpoint;
    out->bracket_width = result.bracket_width;
    out->derivative_at_star = result.derivative_at_star;
    out->iterations = result.iterations;
    out->mode = static_cast<int>(result.mode);
    return ADH_OK;
  });
}

adh_status adh_simulate(const adh_cohort* cohort, const adh_sim_config* config,
                        adh_sim_result* out) {
  if (!cohort || !config || !out) return ADH_ERR_NULL_POINTER;
  if (config->policy < 0 || config->policy > 4) return ADH_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    Cohort cc;
    cc.patients = cohort->patients;
    SimConfig sim;
    sim.horizon = config->horizon;
    sim.runs = config->runs;
    sim.capacity = config->capacity;
    sim.seed = config->seed;
    sim.policy = static_cast<Policy>(config->policy);
    sim.threads = config->threads > 0 ? config->threads : 1;
    if (config->initial_beliefs) {
      sim.uniform_initial = false;
      cc.beliefs.assign(config->initial_beliefs,
                        config->initial_beliefs + cohort->patients.size());
    } else {
      cc.beliefs.assign(cohort->patients.size(), 0.0);
    }
    const SimResult result = simulate(sim, cc);
    out->vbar_mean = result.vbar_mean;
    out->vbar_stderr = result.vbar_stderr;
    out->truncation_bias = result.truncation_bias;
    out->total_actions = result.total_actions;
    out->max_actions_per_period = result.max_actions_per_period;
    out->elapsed_seconds = result.elapsed_seconds;
    return ADH_OK;
  });
}

adh_status adh_relative_gap(double vbar, double dbar, double* out) {
  if (!out) return ADH_ERR_NULL_POINTER;
  return guarded([&]() {
    *out = relative_gap(vbar, dbar);
    return ADH_OK;
  });
}

adh_status adh_instance_grid_build(const adh_grid_config* config, adh_instance_grid** out) {
  if (!out) return ADH_ERR_NULL_POINTER;
  *out = nullptr;
  return guarded([&]() {
    GridConfig gc = decode_grid_config(config);
    *out = new adh_instance_grid{build_instance_grid(gc)};
    return ADH_OK;
  });
}

adh_status adh_instance_grid_desk(const adh_grid_config* config, int64_t sample_count,
                                  adh_instance_grid** out) {
  if (!out) return ADH_ERR_NULL_POINTER;
  *out = nullptr;
  if (sample_count < 0) return ADH_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    const GridConfig gc = decode_grid_config(config);
    *out = new adh_instance_grid{desk_profile_instances(gc, sample_count)};
    return ADH_OK;
  });
}

adh_status adh_instance_grid_from_json(const char* json_text, adh_instance_grid** out) {
  if (!json_text || !out) return ADH_ERR_NULL_POINTER;
  *out = nullptr;
  return guarded([&]() {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception&) {
      return ADH_ERR_INVALID_ARGUMENT;
    }
    GridConfig gc;
    if (doc.contains("p_grid")) gc.p_grid = doc["p_grid"].get<std::vector<double>>();
    if (doc.contains("q_grid")) gc.q_grid = doc["q_grid"].get<std::vector<double>>();
    if (doc.contains("prop_grid")) gc.prop_grid = doc["prop_grid"].get<std::vector<double>>();
    if (doc.contains("capacity_grid"))
      gc.capacity_grid = doc["capacity_grid"].get<std::vector<double>>();
    if (doc.contains("n_patients")) gc.n_patients = doc["n_patients"].get<std::int64_t>();
    if (doc.contains("r")) gc.r = doc["r"].get<double>();
    if (doc.contains("beta")) gc.beta = doc["beta"].get<double>();
    if (doc.contains("seed")) gc.seed = doc["seed"].get<std::uint64_t>();
    *out = new adh_instance_grid{build_instance_grid(gc)};
    return ADH_OK;
  });
}

void adh_instance_grid_free(adh_instance_grid* grid) { delete grid; }

adh_status adh_instance_grid_count(const adh_instance_grid* grid, size_t* out) {
  if (!grid || !out) return ADH_ERR_NULL_POINTER;
  *out = grid->instances.size();
  return ADH_OK;
}

adh_status adh_instance_grid_get(const adh_instance_grid* grid, size_t index,
                                 adh_instance_spec* out) {
  if (!grid || !out) return ADH_ERR_NULL_POINTER;
  if (index >= grid->instances.size()) return ADH_ERR_INVALID_ARGUMENT;
  const InstanceSpec& spec = grid->instances[index];
  std::memset(out, 0, sizeof(*out));
  std::snprintf(out->id, sizeof(out->id), "%s", spec.id.c_str());
  out->p_a = spec.p_a;
  out->q_a = spec.q_a;
  out->p_b = spec.p_b;
  out->q_b = spec.q_b;
  out->prop_a = spec.prop_a;
  out->capacity_ratio = spec.capacity_ratio;
  out->n_patients = spec.n_patients;
  out->r = spec.r;
  out->beta = spec.beta;
  out->seed = spec.seed;
  return ADH_OK;
}

adh_status adh_study_run(const adh_instance_grid* grid, const adh_study_config* config,
                         const char* out_dir) {
  if (!grid || !out_dir) return ADH_ERR_NULL_POINTER;
  return guarded([&]() {
    StudyConfig sc;
    if (config) {
      if (config->runs > 0) sc.runs = config->runs;
      if (config->horizon > 0) sc.horizon = config->horizon;
      if (config->epsilon > 0.0) sc.epsilon = config->epsilon;
      if (config->threads > 0) sc.threads = config->threads;
      if (config->policies != 0) {
        sc.policies.clear();
        for (Policy policy : kAllPolicies) {
          if (config->policies & (1u << static_cast<unsigned>(policy)))
            sc.policies.push_back(policy);
        }
      }
    }
    const std::vector<StudyRecord> records = run_study(grid->instances, sc, out_dir);
    for (const StudyRecord& record : records)
      if (!record.error.empty()) return ADH_ERR_IO;
    return ADH_OK;
  });
}

adh_status adh_summarize_file(const char* study_csv_path, int report_kind,
                              const char* out_csv_path) {
  if (!study_csv_path || !out_csv_path) return ADH_ERR_NULL_POINTER;
  if (report_kind < 0 || report_kind > 2) return ADH_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    const std::vector<StudyRecord> records = read_study_csv(study_csv_path);
    const std::string csv = summarize(records, static_cast<ReportKind>(report_kind));
    std::ofstream out(out_csv_path, std::ios::binary | std::ios::trunc);
    if (!out) return ADH_ERR_IO;
    out << csv;
    return ADH_OK;
  });
}

}  // extern "C"
