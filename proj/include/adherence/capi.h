/* C API for the adherence restless-bandit library.
 *
 * All entry points return an adh_status; results come back through out
 * pointers. Handles are opaque and must be released with the matching
 * _free function. Thresholds travel as plain doubles: a value in [0, 1] is a
 * finite threshold (activate when belief > z), any negative value means
 * "always active" and any value >= 1 means "always passive";
 * ADH_THRESHOLD_ALWAYS_ACTIVE / ADH_THRESHOLD_ALWAYS_PASSIVE are convenient
 * canonical encodings. All functions are thread-safe on distinct handles;
 * handles themselves are immutable after creation.
 */

#ifndef ADHERENCE_CAPI_H
#define ADHERENCE_CAPI_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ADH_API __declspec(dllexport)
#else
#define ADH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum adh_status {
  ADH_OK = 0,
  ADH_ERR_NULL_POINTER = 1,
  ADH_ERR_INVALID_ARGUMENT = 2,
  ADH_ERR_OUT_OF_MEMORY = 3,
  ADH_ERR_IO = 4,
  ADH_ERR_INTERNAL = 5
} adh_status;

ADH_API const char* adh_status_message(adh_status status);
ADH_API const char* adh_version(void);

#define ADH_THRESHOLD_ALWAYS_ACTIVE (-1.0)
#define ADH_THRESHOLD_ALWAYS_PASSIVE (2.0)

/* ---- patient parameters ------------------------------------------------ */

typedef struct adh_params adh_params;

ADH_API adh_status adh_params_create(double p, double q, double r, double beta, double cost,
                                     adh_params** out);
ADH_API void adh_params_free(adh_params* params);
/* Any out pointer may be NULL to skip that field. */
ADH_API adh_status adh_params_get(const adh_params* params, double* p, double* q, double* r,
                                  double* beta, double* cost, double* rho, double* z_inf);

/* ---- passive dynamics --------------------------------------------------- */

ADH_API adh_status adh_passive_step(const adh_params* params, double x, double* out);
ADH_API adh_status adh_trajectory_point(const adh_params* params, double x, int64_t t,
                                        double* out);
/* *finite is 1 with *t set when the trajectory crosses, 0 when it never does. */
ADH_API adh_status adh_crossing_time(const adh_params* params, double x, double z, int* finite,
                                     int64_t* t);
ADH_API adh_status adh_state_breakpoint(const adh_params* params, int64_t t, double* out);
ADH_API adh_status adh_disc_passive_sum(const adh_params* params, double x, int64_t t,
                                        double* out);
ADH_API adh_status adh_disc_passive_sum_inf(const adh_params* params, double x, double* out);
ADH_API adh_status adh_avg_passive_sum(const adh_params* params, double x, int64_t t,
                                       double* out);

/* ---- discounted threshold-policy metrics -------------------------------- */

#define ADH_REGIME_BELOW_P 0
#define ADH_REGIME_MIDDLE 1
#define ADH_REGIME_ABOVE_Z_INF 2
#define ADH_REGIME_ALWAYS_PASSIVE 3

/* *t receives the crossing index for the middle regime, 0 otherwise. */
ADH_API adh_status adh_classify_threshold(const adh_params* params, double z, int* regime,
                                          int64_t* t);

ADH_API adh_status adh_threshold_metrics(const adh_params* params, double x, double z,
                                         double* reward, double* work);
ADH_API adh_status adh_marginal_metrics(const adh_params* params, double x, double z,
                                        double* reward, double* work);
ADH_API adh_status adh_mp_metric(const adh_params* params, double x, double z, double* out);
ADH_API adh_status adh_truncated_oracle(const adh_params* params, double x, double z,
                                        int64_t horizon, double* reward, double* work);

/* ---- Whittle/MP index and threshold map ---------------------------------- */

/* Cost-adjusted index m(x) - cost. */
ADH_API adh_status adh_mp_index(const adh_params* params, double x, double* out);
/* Inverse of the raw (cost-free) index; callers fold costs into lambda. */
ADH_API adh_status adh_optimal_threshold(const adh_params* params, double lambda, double* out);

typedef struct adh_index_table adh_index_table;

/* t_max <= 0 selects the default depth (smallest t with rho^t < 1e-14). */
ADH_API adh_status adh_index_table_create(const adh_params* params, int64_t t_max,
                                          adh_index_table** out);
ADH_API void adh_index_table_free(adh_index_table* table);
ADH_API adh_status adh_index_table_breakpoints(const adh_index_table* table, size_t* count);
/* Row i pairs state_breakpoints[i+1] (skipping the leading 0) with
 * price_breakpoints[i]; either out pointer may be NULL. */
ADH_API adh_status adh_index_table_row(const adh_index_table* table, size_t i, double* z,
                                       double* lambda);
ADH_API adh_status adh_index_table_lambda_max(const adh_index_table* table, double* out);

/* Fills up to capacity points; *count receives the total available. */
ADH_API adh_status adh_reachable_set(const adh_params* params, double x, double tol,
                                     double* buffer, size_t capacity, size_t* count);

typedef struct adh_verification_report {
  int positive_work_ok;
  double min_marginal_work;
  int index_monotone_ok;
  double max_monotonicity_violation;
  double max_continuity_residual;
  int integral_ok;
  double max_integral_residual;
} adh_verification_report;

typedef struct adh_grid_spec {
  int x_points;          /* <= 0 selects the default 100 */
  int z_points;          /* <= 0 selects the default 100 */
  int stieltjes_samples; /* <= 0 selects the default 200 */
  double tolerance;      /* <= 0 selects the default 1e-6 */
  uint64_t seed;         /* 0 selects the default */
} adh_grid_spec;

ADH_API adh_status adh_verify_pcl(const adh_params* params, const adh_grid_spec* spec,
                                  adh_verification_report* out);

typedef struct adh_apcli_report {
  adh_verification_report core;
  int bridge_ok;
  double bridge_max_residual[3]; /* at beta = 0.99, 0.999, 0.9999 */
} adh_apcli_report;

ADH_API adh_status adh_verify_apcli(const adh_params* params, const adh_grid_spec* spec,
                                    adh_apcli_report* out);

typedef struct adh_monotonicity_report {
  int pass;
  int64_t checked_pairs;
  int64_t violations;
  double max_violation;
} adh_monotonicity_report;

ADH_API adh_status adh_sensitivity_p(const adh_params* base, double x, const double* p_grid,
                                     size_t count, adh_monotonicity_report* out);
ADH_API adh_status adh_sensitivity_q(const adh_params* base, double x, const double* q_grid,
                                     size_t count, adh_monotonicity_report* out);

/* ---- long-run average criterion ------------------------------------------ */

ADH_API adh_status adh_avg_metrics(const adh_params* params, double z, double* reward_rate,
                                   double* work_rate);
ADH_API adh_status adh_avg_marginal_metrics(const adh_params* params, double x, double z,
                                            double* reward_rate, double* work_rate);
ADH_API adh_status adh_avg_mp_index(const adh_params* params, double x, double* out);

/* ---- Lagrangian dual bound ------------------------------------------------ */

ADH_API adh_status adh_uniform_metrics(const adh_params* params, double z, double* reward,
                                       double* work);

typedef struct adh_cohort adh_cohort;

ADH_API adh_status adh_cohort_create(adh_cohort** out);
ADH_API void adh_cohort_free(adh_cohort* cohort);
ADH_API adh_status adh_cohort_add(adh_cohort* cohort, double p, double q, double r, double beta,
                                  double cost);
ADH_API adh_status adh_cohort_size(const adh_cohort* cohort, size_t* out);

#define ADH_INITIAL_UNIFORM 0
#define ADH_INITIAL_FIXED 1

/* initial_kind ADH_INITIAL_FIXED uses x0 (per-patient values for the cohort
 * variants, one value for the single-patient variant). */
ADH_API adh_status adh_patient_lagrangian(const adh_params* params, double lambda,
                                          int initial_kind, double x0, double* out);
ADH_API adh_status adh_dual_derivative(const adh_cohort* cohort, int64_t capacity, double lambda,
                                       int initial_kind, const double* x0, double* out);

typedef struct adh_dual_result {
  double lambda_star;
  double bound;
  double bound_midpoint;
  double bracket_width;
  double derivative_at_star;
  int64_t iterations;
  int mode; /* 0 at-zero, 1 at-max, 2 interior */
} adh_dual_result;

ADH_API adh_status adh_dual_bound(const adh_cohort* cohort, int64_t capacity, double epsilon,
                                  int initial_kind, const double* x0, adh_dual_result* out);

/* ---- Monte-Carlo policy simulation ---------------------------------------- */

#define ADH_POLICY_WHITTLE 0
#define ADH_POLICY_WHITTLE_AVG 1
#define ADH_POLICY_MYOPIC 2
#define ADH_POLICY_ROUND_ROBIN 3
#define ADH_POLICY_RANDOM 4

typedef struct adh_sim_config {
  int64_t horizon;
  int64_t runs;
  int64_t capacity;
  uint64_t seed;
  int policy;
  int threads;              /* <= 0 selects 1 */
  const double* initial_beliefs; /* NULL draws Uniform[0,1) per (run, patient) */
} adh_sim_config;

typedef struct adh_sim_result {
  double vbar_mean;
  double vbar_stderr;
  double truncation_bias;
  uint64_t total_actions;
  int64_t max_actions_per_period;
  double elapsed_seconds;
} adh_sim_result;

ADH_API adh_status adh_simulate(const adh_cohort* cohort, const adh_sim_config* config,
                                adh_sim_result* out);
ADH_API adh_status adh_relative_gap(double vbar, double dbar, double* out);

/* ---- instance grids and studies ------------------------------------------- */

typedef struct adh_instance_grid adh_instance_grid;

typedef struct adh_grid_config {
  const double* p_grid;        /* NULL selects the default 6-point grid */
  size_t p_count;
  const double* q_grid;        /* NULL selects the default 6-point grid */
  size_t q_count;
  const double* prop_grid;     /* NULL selects {0.1, 0.3, 0.5, 0.7, 0.9} */
  size_t prop_count;
  const double* capacity_grid; /* NULL selects {0.05, 0.1, 0.2, 0.3, 0.4, 0.5} */
  size_t capacity_count;
  int64_t n_patients;          /* <= 0 selects 1000 */
  double r;                    /* <= 0 selects 1.0 */
  double beta;                 /* <= 0 selects 0.99 */
  uint64_t seed;
} adh_grid_config;

ADH_API adh_status adh_instance_grid_build(const adh_grid_config* config,
                                           adh_instance_grid** out);
/* Ten reference instances plus sample_count pseudo-random grid draws. */
ADH_API adh_status adh_instance_grid_desk(const adh_grid_config* config, int64_t sample_count,
                                          adh_instance_grid** out);
/* Parses the same JSON schema as the CLI --grid-file flag. */
ADH_API adh_status adh_instance_grid_from_json(const char* json_text, adh_instance_grid** out);
ADH_API void adh_instance_grid_free(adh_instance_grid* grid);
ADH_API adh_status adh_instance_grid_count(const adh_instance_grid* grid, size_t* out);

typedef struct adh_instance_spec {
  char id[32];
  double p_a, q_a, p_b, q_b;
  double prop_a;
  double capacity_ratio;
  int64_t n_patients;
  double r;
  double beta;
  uint64_t seed;
} adh_instance_spec;

ADH_API adh_status adh_instance_grid_get(const adh_instance_grid* grid, size_t index,
                                         adh_instance_spec* out);

typedef struct adh_study_config {
  int64_t runs;     /* <= 0 selects 200 */
  int64_t horizon;  /* <= 0 selects 300 */
  double epsilon;   /* <= 0 selects 1e-6 */
  int threads;      /* <= 0 selects 1 */
  /* Bitmask of (1 << ADH_POLICY_*); 0 selects whittle|myopic|round_robin|random. */
  uint32_t policies;
} adh_study_config;

/* Runs the study into out_dir (study.csv, timings.csv, metadata.json,
 * records/); resume-safe by instance id. Returns ADH_ERR_IO when any
 * per-instance record carries an error, with the batch still completed. */
ADH_API adh_status adh_study_run(const adh_instance_grid* grid, const adh_study_config* config,
                                 const char* out_dir);

#define ADH_REPORT_GAPS 0
#define ADH_REPORT_RATIOS 1
#define ADH_REPORT_WORST_MYOPIC 2

ADH_API adh_status adh_summarize_file(const char* study_csv_path, int report_kind,
                                      const char* out_csv_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ADHERENCE_CAPI_H */
