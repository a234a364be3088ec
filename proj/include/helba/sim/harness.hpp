#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "helba/bandit/helba.hpp"
#include "helba/sim/environment.hpp"

namespace helba::sim {

enum class Algo { kHelba, kOful, kRsoful, kRsofulTr };

std::string algo_name(Algo a);
Algo algo_from_name(const std::string& name);

struct StepRecord {
  int t;
  int arm;
  double regret_step;
  double regret_cum;
  bool updated;
  int depth_used;
};

struct RegretTrace {
  Algo algo = Algo::kOful;
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;
  std::vector<int> update_times;
  // telemetry
  int max_depth_used = 0;
  long user_decrypts = 0;
  long server_decrypts = 0;
  long sqrt_calls = 0;
  long acomp_calls = 0;
  long masked_recrypts = 0;
  long plain_reencrypts = 0;
  double wall_ms = 0.0;
  std::vector<bandit::KernelDepthRecord> depth_ledger;

  double final_regret() const { return steps.empty() ? 0.0 : steps.back().regret_cum; }
  double regret_at(int t) const;
  int update_count() const { return static_cast<int>(update_times.size()); }
};

struct SuiteConfig {
  bandit::BanditConfig bandit;
  he::BackendConfig backend;
  EnvironmentConfig environment;
  std::vector<Algo> algos{Algo::kHelba, Algo::kOful, Algo::kRsoful, Algo::kRsofulTr};
  int seeds = 25;
  std::uint64_t seed_base = 1;
  std::string out_dir = "out";
  bool emit_csv = true;
  bool emit_json = false;
  int workers = 0;  // 0 = hardware concurrency
};

// One fully deterministic episode: same (algo, env, cfg, seed) gives the
// same trace byte for byte.
RegretTrace run_episode(Algo algo, const Environment& env, const bandit::BanditConfig& cfg,
                        const he::BackendConfig& backend_cfg, std::uint64_t seed);

struct SuiteResult {
  std::vector<RegretTrace> traces;
  std::vector<std::string> trace_files;
  std::string aggregate_file;
};

// Fans episodes out over a worker pool and writes per-run traces plus the
// per-step aggregate (mean and standard deviation across seeds).
SuiteResult run_suite(const SuiteConfig& cfg);

std::string trace_to_csv(const RegretTrace& trace, const std::string& run_id);
std::string aggregate_to_csv(const std::vector<RegretTrace>& traces, int horizon);

// JSON configuration mirroring BanditConfig/BackendConfig/EnvironmentConfig.
SuiteConfig parse_suite_config(const std::string& json_text);
SuiteConfig load_suite_config(const std::string& path);

}  // namespace helba::sim
