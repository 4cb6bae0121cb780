#include "adherence/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "adherence/csv.hpp"
#include "adherence/dual_bound.hpp"
#include "adherence/rng.hpp"

namespace adherence {

namespace fs = std::filesystem;
using nlohmann::json;

std::int64_t InstanceSpec::count_a() const {
  const auto n = n_patients;
  const auto raw = std::llround(prop_a * static_cast<double>(n));
  return std::clamp<std::int64_t>(raw, 1, n - 1);  // at least one patient of each type
}

std::int64_t InstanceSpec::capacity() const {
  const auto raw = std::llround(capacity_ratio * static_cast<double>(n_patients));
  return std::clamp<std::int64_t>(raw, 0, n_patients);
}

Cohort InstanceSpec::make_cohort() const {
  Cohort cohort;
  cohort.patients.reserve(static_cast<std::size_t>(n_patients));
  const std::int64_t n_a = count_a();
  for (std::int64_t i = 0; i < n_patients; ++i) {
    if (i < n_a)
      cohort.patients.emplace_back(p_a, q_a, r, beta);
    else
      cohort.patients.emplace_back(p_b, q_b, r, beta);
  }
  cohort.beliefs.assign(static_cast<std::size_t>(n_patients), 0.0);
  return cohort;
}

namespace {

std::string instance_id(const char* prefix, std::int64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%06lld", prefix, static_cast<long long>(index));
  return buf;
}

}  // namespace

std::vector<InstanceSpec> build_instance_grid(GridConfig& config) {
  if (config.n_patients < 2)
    throw std::invalid_argument("build_instance_grid: need at least two patients");
  struct TypePair {
    double p, q;
  };
  std::vector<TypePair> feasible;
  config.filtered_pairs = 0;
  for (double p : config.p_grid) {
    for (double q : config.q_grid) {
      if (p > 0.0 && q > 0.0 && p + q <= 1.0 - config.delta_rho)
        feasible.push_back({p, q});
      else
        ++config.filtered_pairs;
    }
  }
  if (feasible.empty())
    throw std::invalid_argument("build_instance_grid: no feasible (p, q) grid pair");

  std::vector<InstanceSpec> instances;
  std::int64_t index = 0;
  for (const TypePair& a : feasible) {
    for (const TypePair& b : feasible) {
      if (!(a.p < b.p && a.q > b.q)) continue;  // type A must be more self-healing
      for (double prop : config.prop_grid) {
        for (double cap : config.capacity_grid) {
          InstanceSpec spec;
          spec.id = instance_id("i", index);
          spec.p_a = a.p;
          spec.q_a = a.q;
          spec.p_b = b.p;
          spec.q_b = b.q;
          spec.prop_a = prop;
          spec.capacity_ratio = cap;
          spec.n_patients = config.n_patients;
          spec.r = config.r;
          spec.beta = config.beta;
          spec.seed = mix_seed(config.seed, static_cast<std::uint64_t>(index));
          instances.push_back(std::move(spec));
          ++index;
        }
      }
    }
  }
  return instances;
}

namespace {

// Tight-capacity, fragile-minority reference instances used by the desk
// profile: (p_a, q_a, p_b, q_b, prop_a, capacity ratio).
constexpr double kReferenceInstances[10][6] = {
    {0.10, 0.05, 0.35, 0.01, 0.70, 0.10}, {0.05, 0.05, 0.35, 0.01, 0.70, 0.10},
    {0.05, 0.05, 0.35, 0.01, 0.90, 0.05}, {0.05, 0.05, 0.30, 0.01, 0.70, 0.10},
    {0.10, 0.05, 0.35, 0.01, 0.70, 0.05}, {0.05, 0.05, 0.30, 0.01, 0.90, 0.05},
    {0.05, 0.05, 0.35, 0.01, 0.50, 0.20}, {0.05, 0.05, 0.30, 0.01, 0.50, 0.20},
    {0.10, 0.05, 0.35, 0.01, 0.50, 0.10}, {0.05, 0.10, 0.35, 0.05, 0.70, 0.30},
};

}  // namespace

std::vector<InstanceSpec> desk_profile_instances(const GridConfig& config,
                                                 std::int64_t sample_count) {
  std::vector<InstanceSpec> instances;
  for (std::int64_t i = 0; i < 10; ++i) {
    const double* row = kReferenceInstances[i];
    InstanceSpec spec;
    spec.id = instance_id("ref", i);
    spec.p_a = row[0];
    spec.q_a = row[1];
    spec.p_b = row[2];
    spec.q_b = row[3];
    spec.prop_a = row[4];
    spec.capacity_ratio = row[5];
    spec.n_patients = config.n_patients;
    spec.r = config.r;
    spec.beta = config.beta;
    spec.seed = mix_seed(config.seed, 0xAEF0, static_cast<std::uint64_t>(i));
    instances.push_back(std::move(spec));
  }
  GridConfig grid = config;
  std::vector<InstanceSpec> full = build_instance_grid(grid);
  // Sample distinct grid indices, then keep them in grid order.
  SplitMix64 rng(mix_seed(config.seed, 0x5a3717));
  std::vector<std::int64_t> chosen;
  const std::int64_t want = std::min<std::int64_t>(sample_count,
                                                   static_cast<std::int64_t>(full.size()));
  while (static_cast<std::int64_t>(chosen.size()) < want) {
    const auto idx = static_cast<std::int64_t>(rng.next_below(full.size()));
    if (std::find(chosen.begin(), chosen.end(), idx) == chosen.end()) chosen.push_back(idx);
  }
  std::sort(chosen.begin(), chosen.end());
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    InstanceSpec spec = full[static_cast<std::size_t>(chosen[k])];
    spec.id = instance_id("smp", static_cast<std::int64_t>(k));
    instances.push_back(std::move(spec));
  }
  return instances;
}

const PolicyOutcome& StudyRecord::outcome(Policy policy) const {
  return policies[static_cast<std::size_t>(policy)];
}

PolicyOutcome& StudyRecord::outcome(Policy policy) {
  return policies[static_cast<std::size_t>(policy)];
}

std::string study_csv_header() {
  std::vector<std::string> cols = {"instance_id", "p_a",  "q_a",  "p_b",
                                   "q_b",         "prop_a", "capacity_ratio", "n_patients",
                                   "capacity",    "r",    "beta", "seed",
                                   "dbar",        "lambda_star", "truncation_bias"};
  for (Policy policy : kAllPolicies) {
    const std::string name = policy_name(policy);
    cols.push_back(name + "_vbar");
    cols.push_back(name + "_stderr");
    cols.push_back(name + "_gamma");
    cols.push_back(name + "_gamma_adj");
  }
  cols.push_back("error");
  return csv_join(cols);
}

std::string study_record_to_csv_line(const StudyRecord& record) {
  std::vector<std::string> fields;
  const InstanceSpec& s = record.spec;
  fields.push_back(s.id);
  for (double v : {s.p_a, s.q_a, s.p_b, s.q_b, s.prop_a, s.capacity_ratio})
    fields.push_back(format_double(v));
  fields.push_back(format_int(s.n_patients));
  fields.push_back(format_int(s.capacity()));
  fields.push_back(format_double(s.r));
  fields.push_back(format_double(s.beta));
  char seed_buf[24];
  std::snprintf(seed_buf, sizeof(seed_buf), "%llu", static_cast<unsigned long long>(s.seed));
  fields.push_back(seed_buf);
  fields.push_back(format_double(record.dbar));
  fields.push_back(format_double(record.lambda_star));
  fields.push_back(format_double(record.truncation_bias));
  for (Policy policy : kAllPolicies) {
    const PolicyOutcome& out = record.outcome(policy);
    if (out.run) {
      fields.push_back(format_double(out.vbar));
      fields.push_back(format_double(out.stderr_));
      fields.push_back(format_double(out.gamma));
      fields.push_back(format_double(out.gamma_adjusted));
    } else {
      fields.insert(fields.end(), 4, "");
    }
  }
  fields.push_back(record.error);
  return csv_join(fields);
}

StudyRecord study_record_from_csv_line(const std::string& line) {
  const std::vector<std::string> f = csv_split(line);
  if (f.size() != 36) throw std::invalid_argument("study record line: wrong field count");
  StudyRecord record;
  InstanceSpec& s = record.spec;
  s.id = f[0];
  s.p_a = std::stod(f[1]);
  s.q_a = std::stod(f[2]);
  s.p_b = std::stod(f[3]);
  s.q_b = std::stod(f[4]);
  s.prop_a = std::stod(f[5]);
  s.capacity_ratio = std::stod(f[6]);
  s.n_patients = std::stoll(f[7]);
  s.r = std::stod(f[9]);
  s.beta = std::stod(f[10]);
  s.seed = std::stoull(f[11]);
  record.dbar = std::stod(f[12]);
  record.lambda_star = std::stod(f[13]);
  record.truncation_bias = std::stod(f[14]);
  std::size_t col = 15;
  for (Policy policy : kAllPolicies) {
    PolicyOutcome& out = record.outcome(policy);
    if (!f[col].empty()) {
      out.run = true;
      out.vbar = std::stod(f[col]);
      out.stderr_ = std::stod(f[col + 1]);
      out.gamma = std::stod(f[col + 2]);
      out.gamma_adjusted = std::stod(f[col + 3]);
    }
    col += 4;
  }
  record.error = f[col];
  return record;
}

std::vector<StudyRecord> read_study_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty study csv: " + path);
  std::vector<StudyRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(study_record_from_csv_line(line));
  }
  return records;
}

namespace {

StudyRecord compute_record(const InstanceSpec& spec, const StudyConfig& config,
                           int sim_threads) {
  const auto start = std::chrono::steady_clock::now();
  StudyRecord record;
  record.spec = spec;
  try {
    const Cohort cohort = spec.make_cohort();
    const std::int64_t capacity = spec.capacity();
    const DualResult dual = dual_bound(cohort.patients, capacity, config.epsilon);
    const double normalizer = (1.0 - spec.beta) / static_cast<double>(spec.n_patients);
    record.dbar = normalizer * dual.bound;
    record.lambda_star = dual.lambda_star;
    record.truncation_bias =
        spec.r * std::pow(spec.beta, static_cast<double>(config.horizon));

    SimConfig sim;
    sim.horizon = config.horizon;
    sim.runs = config.runs;
    sim.capacity = capacity;
    sim.seed = spec.seed;  // common random numbers across policies
    sim.uniform_initial = true;
    sim.threads = sim_threads;
    for (Policy policy : config.policies) {
      sim.policy = policy;
      const SimResult res = simulate(sim, cohort);
      PolicyOutcome& out = record.outcome(policy);
      out.run = true;
      out.vbar = res.vbar_mean;
      out.stderr_ = res.vbar_stderr;
      out.gamma = relative_gap(res.vbar_mean, record.dbar);
      out.gamma_adjusted = relative_gap(res.vbar_mean + res.truncation_bias, record.dbar);
    }
  } catch (const std::exception& e) {
    record.error = e.what();
  }
  record.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

json study_metadata(std::span<const InstanceSpec> instances, const StudyConfig& config) {
  json meta;
  meta["format"] = "study-v1";
  json policies = json::array();
  for (Policy policy : config.policies) policies.push_back(policy_name(policy));
  meta["study"] = {{"runs", config.runs},
                   {"horizon", config.horizon},
                   {"epsilon", config.epsilon},
                   {"policies", policies}};
  meta["conventions"] = {
      {"quantiles", "linear interpolation"},
      {"std", "sample standard deviation (n-1)"},
      {"gamma", "(dbar - vbar)/dbar, raw fraction; summaries report percent"},
      {"gamma_adj", "gap after adding the beta^T truncation slack to vbar"},
      {"determinism", "study.csv and summaries are byte-stable; timings.csv is not"}};
  meta["instances"] = json::array();
  for (const InstanceSpec& s : instances) {
    meta["instances"].push_back({{"id", s.id},
                                 {"p_a", s.p_a},
                                 {"q_a", s.q_a},
                                 {"p_b", s.p_b},
                                 {"q_b", s.q_b},
                                 {"prop_a", s.prop_a},
                                 {"capacity_ratio", s.capacity_ratio},
                                 {"n_patients", s.n_patients},
                                 {"r", s.r},
                                 {"beta", s.beta},
                                 {"seed", s.seed}});
  }
  return meta;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

}  // namespace

std::vector<StudyRecord> run_study(std::span<const InstanceSpec> instances,
                                   const StudyConfig& config, const std::string& out_dir) {
  if (instances.empty()) throw std::invalid_argument("run_study: instance list is empty");
  const fs::path root(out_dir);
  const fs::path records_dir = root / "records";
  fs::create_directories(records_dir);

  const std::string meta_text = study_metadata(instances, config).dump(2) + "\n";
  const fs::path meta_path = root / "metadata.json";
  if (fs::exists(meta_path)) {
    std::ifstream in(meta_path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    if (buf.str() != meta_text)
      throw std::invalid_argument("run_study: " + out_dir +
                                  " holds a study with a different configuration");
  } else {
    write_file_atomic(meta_path, meta_text);
  }

  const std::size_t count = instances.size();
  std::vector<StudyRecord> records(count);
  std::vector<std::uint8_t> loaded(count, 0);
  for (std::size_t i = 0; i < count; ++i) {
    const fs::path line_path = records_dir / (instances[i].id + ".csvline");
    if (!fs::exists(line_path)) continue;
    std::ifstream in(line_path, std::ios::binary);
    std::string line;
    if (in && std::getline(in, line) && !line.empty()) {
      try {
        StudyRecord parsed = study_record_from_csv_line(line);
        if (parsed.spec.id == instances[i].id) {
          records[i] = std::move(parsed);
          loaded[i] = 1;
        }
      } catch (const std::exception&) {
        // unreadable record: recompute below
      }
    }
  }

  const int workers =
      std::max(1, std::min<int>(config.threads, static_cast<int>(count)));
  const int sim_threads = std::max(1, config.threads / workers);
  std::atomic<std::size_t> cursor{0};
  auto work = [&]() {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= count) break;
      if (loaded[i]) continue;
      StudyRecord record = compute_record(instances[i], config, sim_threads);
      write_file_atomic(records_dir / (instances[i].id + ".csvline"),
                        study_record_to_csv_line(record) + "\n");
      records[i] = std::move(record);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }

  std::string csv = study_csv_header() + "\n";
  for (const StudyRecord& record : records) csv += study_record_to_csv_line(record) + "\n";
  write_file_atomic(root / "study.csv", csv);

  std::string timings = "instance_id,runtime_seconds\n";
  for (const StudyRecord& record : records)
    timings += record.spec.id + "," + format_double(record.runtime_seconds) + "\n";
  write_file_atomic(root / "timings.csv", timings);

  return records;
}

namespace {

struct Stats {
  double mean, std_dev, min, q25, median, q75, max;
};

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = q * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

Stats compute_stats(std::vector<double> values) {
  Stats s{};
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std_dev = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.min = values.front();
  s.max = values.back();
  s.q25 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.50);
  s.q75 = quantile_sorted(values, 0.75);
  return s;
}

std::string stats_fields(const Stats& s) {
  return format_double(s.mean) + "," + format_double(s.std_dev) + "," + format_double(s.min) +
         "," + format_double(s.q25) + "," + format_double(s.median) + "," +
         format_double(s.q75) + "," + format_double(s.max);
}

}  // namespace

ReportKind parse_report_kind(const std::string& name) {
  if (name == "gaps") return ReportKind::Gaps;
  if (name == "ratios") return ReportKind::Ratios;
  if (name == "worst-myopic") return ReportKind::WorstMyopic;
  throw std::invalid_argument("unknown report kind: " + name);
}

std::string summarize(std::span<const StudyRecord> records, ReportKind kind) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  switch (kind) {
    case ReportKind::Gaps: {
      std::string csv = "policy,mean,std,min,q25,median,q75,max\n";
      for (Policy policy : kAllPolicies) {
        std::vector<double> gaps;
        for (const StudyRecord& record : records) {
          if (!record.error.empty()) continue;
          const PolicyOutcome& out = record.outcome(policy);
          if (out.run) gaps.push_back(out.gamma * 100.0);
        }
        if (gaps.empty()) continue;
        csv += std::string(policy_name(policy)) + "," + stats_fields(compute_stats(gaps)) + "\n";
      }
      return csv;
    }
    case ReportKind::Ratios: {
      std::vector<double> ratios;
      for (const StudyRecord& record : records) {
        if (!record.error.empty()) continue;
        const PolicyOutcome& w = record.outcome(Policy::Whittle);
        const PolicyOutcome& m = record.outcome(Policy::Myopic);
        if (w.run && m.run && m.vbar > 0.0) ratios.push_back(w.vbar / m.vbar);
      }
      if (ratios.empty()) throw std::invalid_argument("summarize: no whittle/myopic pairs");
      return "mean,std,min,q25,median,q75,max\n" + stats_fields(compute_stats(ratios)) + "\n";
    }
    default: {
      struct Row {
        double ratio;
        const StudyRecord* record;
      };
      std::vector<Row> rows;
      for (const StudyRecord& record : records) {
        if (!record.error.empty()) continue;
        const PolicyOutcome& w = record.outcome(Policy::Whittle);
        const PolicyOutcome& m = record.outcome(Policy::Myopic);
        if (w.run && m.run && w.gamma > 0.0) rows.push_back({m.gamma / w.gamma, &record});
      }
      if (rows.empty()) throw std::invalid_argument("summarize: no whittle/myopic pairs");
      std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.ratio != b.ratio) return a.ratio > b.ratio;
        return a.record->spec.id < b.record->spec.id;
      });
      if (rows.size() > 10) rows.resize(10);
      std::string csv =
          "instance_id,p_a,q_a,p_b,q_b,prop_a,capacity_ratio,gamma_whittle,gamma_myopic,"
          "gamma_random,gamma_round_robin,myopic_to_whittle_ratio\n";
      for (const Row& row : rows) {
        const StudyRecord& record = *row.record;
        const InstanceSpec& s = record.spec;
        std::vector<std::string> fields = {s.id,
                                           format_double(s.p_a),
                                           format_double(s.q_a),
                                           format_double(s.p_b),
                                           format_double(s.q_b),
                                           format_double(s.prop_a),
                                           format_double(s.capacity_ratio)};
        for (Policy policy : {Policy::Whittle, Policy::Myopic, Policy::Random,
                              Policy::RoundRobin}) {
          const PolicyOutcome& out = record.outcome(policy);
          fields.push_back(out.run ? format_double(out.gamma * 100.0) : "");
        }
        fields.push_back(format_double(row.ratio));
        csv += csv_join(fields) + "\n";
      }
      return csv;
    }
  }
}

}  // namespace adherence
