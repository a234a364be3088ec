#include "helba/sim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "helba/bandit/baselines.hpp"

namespace helba::sim {

using nlohmann::json;

std::string algo_name(Algo a) {
  switch (a) {
    case Algo::kHelba: return "helba";
    case Algo::kOful: return "oful";
    case Algo::kRsoful: return "rsoful";
    case Algo::kRsofulTr: return "rsoful-tr";
  }
  return "?";
}

Algo algo_from_name(const std::string& name) {
  if (name == "helba") return Algo::kHelba;
  if (name == "oful") return Algo::kOful;
  if (name == "rsoful") return Algo::kRsoful;
  if (name == "rsoful-tr") return Algo::kRsofulTr;
  throw ConfigError("unknown algorithm: " + name);
}

double RegretTrace::regret_at(int t) const {
  double last = 0.0;
  for (const auto& s : steps) {
    if (s.t > t) break;
    last = s.regret_cum;
  }
  return last;
}

namespace {

std::mt19937_64 reward_rng_for(std::uint64_t seed) {
  // Distinct stream from the backend PRNG.
  return std::mt19937_64(seed ^ 0x9e3779b97f4a7c15ull);
}

RegretTrace run_helba(const Environment& env, const bandit::BanditConfig& cfg,
                      const he::BackendConfig& backend_cfg, std::uint64_t seed) {
  he::BackendConfig bc = backend_cfg;
  bc.seed = seed;
  he::Backend backend(bc);
  bandit::UserParty user(backend);
  bandit::HelbaServer server(backend, cfg, user);
  std::mt19937_64 rng = reward_rng_for(seed);

  RegretTrace trace;
  trace.algo = Algo::kHelba;
  trace.seed = seed;
  double cum = 0.0;
  for (int t = 1; t <= cfg.horizon; ++t) {
    backend.reset_depth_window();
    const auto& contexts = env.contexts_at(t);
    const auto encrypted = user.encrypt_context_set(contexts);

    const double beta = bandit::beta_tilde(t, server.state().t_j, cfg);
    he::Ciphertext rho = server.compute_indexes(encrypted, t, beta);
    he::Ciphertext rho_hat = server.rescale_indexes(rho, t, beta);
    he::Ciphertext b = server.select_arm(rho_hat, t);
    const int arm = user.decode_action(b, t, cfg.num_arms);

    const double inst = env.best_mean(t) - env.mean_reward(contexts[static_cast<std::size_t>(arm)]);
    cum += inst;
    const double reward = env.sample_reward(contexts[static_cast<std::size_t>(arm)], rng);

    server.observe(user.encrypt_context(contexts[static_cast<std::size_t>(arm)]),
                   user.encrypt_reward(reward), t);
    bool updated = false;
    if (server.check_batch_end(t)) {
      server.refresh(t);
      updated = true;
      trace.update_times.push_back(t);
    }
    trace.steps.push_back({t, arm, inst, cum, updated, backend.depth_window_max()});
    trace.max_depth_used = std::max(trace.max_depth_used, backend.depth_window_max());
  }

  const auto& tel = server.telemetry();
  trace.sqrt_calls = tel.sqrt_calls;
  trace.acomp_calls = tel.acomp_calls;
  trace.masked_recrypts = tel.masked_recrypts;
  trace.plain_reencrypts = tel.plain_reencrypts;
  trace.depth_ledger = tel.depth_ledger;
  trace.user_decrypts = backend.audit().user_decrypts;
  trace.server_decrypts = backend.audit().server_decrypts;
  return trace;
}

RegretTrace run_baseline(Algo algo, const Environment& env, const bandit::BanditConfig& cfg,
                         std::uint64_t seed) {
  bandit::SwitchRule rule = bandit::SwitchRule::kNone;
  if (algo == Algo::kRsoful) rule = bandit::SwitchRule::kDeterminant;
  if (algo == Algo::kRsofulTr) rule = bandit::SwitchRule::kTrace;
  bandit::PlainLinUcb policy(cfg, rule);
  std::mt19937_64 rng = reward_rng_for(seed);

  RegretTrace trace;
  trace.algo = algo;
  trace.seed = seed;
  double cum = 0.0;
  for (int t = 1; t <= cfg.horizon; ++t) {
    const auto& contexts = env.contexts_at(t);
    const int arm = policy.select_arm(contexts, t);
    const double inst = env.best_mean(t) - env.mean_reward(contexts[static_cast<std::size_t>(arm)]);
    cum += inst;
    const double reward = env.sample_reward(contexts[static_cast<std::size_t>(arm)], rng);
    const bool updated = policy.observe(contexts[static_cast<std::size_t>(arm)], reward, t);
    if (updated) trace.update_times.push_back(t);
    trace.steps.push_back({t, arm, inst, cum, updated, 0});
  }
  return trace;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

RegretTrace run_episode(Algo algo, const Environment& env, const bandit::BanditConfig& cfg,
                        const he::BackendConfig& backend_cfg, std::uint64_t seed) {
  cfg.validate();
  if (!cfg.batch_bound_hypothesis_holds())
    std::fprintf(stderr, "warning: batch-count hypothesis violated (C - L*eta/sqrt(lambda+L^2) <= 1/4)\n");
  const auto start = std::chrono::steady_clock::now();
  RegretTrace trace = (algo == Algo::kHelba) ? run_helba(env, cfg, backend_cfg, seed)
                                             : run_baseline(algo, env, cfg, seed);
  trace.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

std::string trace_to_csv(const RegretTrace& trace, const std::string& run_id) {
  std::ostringstream out;
  out << "run_id,algo,t,arm,regret_step,regret_cum,updated,depth_used\n";
  for (const auto& s : trace.steps) {
    out << run_id << ',' << algo_name(trace.algo) << ',' << s.t << ',' << s.arm << ','
        << fmt_double(s.regret_step) << ',' << fmt_double(s.regret_cum) << ','
        << (s.updated ? 1 : 0) << ',' << s.depth_used << '\n';
  }
  return out.str();
}

std::string aggregate_to_csv(const std::vector<RegretTrace>& traces, int horizon) {
  std::ostringstream out;
  out << "algo,t,regret_cum_mean,regret_cum_std\n";
  std::vector<Algo> order{Algo::kHelba, Algo::kOful, Algo::kRsoful, Algo::kRsofulTr};
  for (Algo a : order) {
    std::vector<const RegretTrace*> group;
    for (const auto& tr : traces)
      if (tr.algo == a) group.push_back(&tr);
    if (group.empty()) continue;
    for (int t = 1; t <= horizon; ++t) {
      double mean = 0.0;
      for (const auto* tr : group) mean += tr->regret_at(t);
      mean /= static_cast<double>(group.size());
      double var = 0.0;
      for (const auto* tr : group) {
        const double d = tr->regret_at(t) - mean;
        var += d * d;
      }
      var /= static_cast<double>(group.size());
      out << algo_name(a) << ',' << t << ',' << fmt_double(mean) << ',' << fmt_double(std::sqrt(var)) << '\n';
    }
  }
  return out.str();
}

namespace {

json trace_to_json(const RegretTrace& trace, const std::string& run_id) {
  json steps = json::array();
  for (const auto& s : trace.steps)
    steps.push_back({{"t", s.t},
                     {"arm", s.arm},
                     {"regret_step", s.regret_step},
                     {"regret_cum", s.regret_cum},
                     {"updated", s.updated},
                     {"depth_used", s.depth_used}});
  return json{{"run_id", run_id},
              {"algo", algo_name(trace.algo)},
              {"seed", trace.seed},
              {"updates", trace.update_times},
              {"telemetry",
               {{"max_depth_used", trace.max_depth_used},
                {"sqrt_calls", trace.sqrt_calls},
                {"acomp_calls", trace.acomp_calls},
                {"masked_recrypts", trace.masked_recrypts},
                {"plain_reencrypts", trace.plain_reencrypts},
                {"user_decrypts", trace.user_decrypts},
                {"server_decrypts", trace.server_decrypts},
                {"wall_ms", trace.wall_ms}}},
              {"steps", steps}};
}

}  // namespace

SuiteResult run_suite(const SuiteConfig& cfg) {
  cfg.bandit.validate();
  if (!cfg.bandit.batch_bound_hypothesis_holds())
    std::fprintf(stderr, "warning: batch-count hypothesis violated for this configuration\n");

  Environment env(cfg.bandit, cfg.environment);

  struct Job {
    Algo algo;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (Algo a : cfg.algos)
    for (int s = 0; s < cfg.seeds; ++s) jobs.push_back({a, cfg.seed_base + static_cast<std::uint64_t>(s)});

  SuiteResult result;
  result.traces.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) break;
      result.traces[i] = run_episode(jobs[i].algo, env, cfg.bandit, cfg.backend, jobs[i].seed);
    }
  };
  unsigned n_workers = cfg.workers > 0 ? static_cast<unsigned>(cfg.workers)
                                       : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min<unsigned>(n_workers, static_cast<unsigned>(std::max<std::size_t>(jobs.size(), 1)));
  std::vector<std::thread> threads;
  for (unsigned w = 0; w < n_workers; ++w) threads.emplace_back(worker);
  for (auto& th : threads) th.join();

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const std::string run_id = algo_name(jobs[i].algo) + "_s" + std::to_string(jobs[i].seed);
    if (cfg.emit_csv) {
      const std::string path = (fs::path(cfg.out_dir) / ("trace_" + run_id + ".csv")).string();
      std::ofstream f(path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + path);
      f << trace_to_csv(result.traces[i], run_id);
      result.trace_files.push_back(path);
    }
    if (cfg.emit_json) {
      const std::string path = (fs::path(cfg.out_dir) / ("trace_" + run_id + ".json")).string();
      std::ofstream f(path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + path);
      f << trace_to_json(result.traces[i], run_id).dump(2) << '\n';
      result.trace_files.push_back(path);
    }
  }
  if (cfg.emit_csv) {
    const std::string agg_path = (fs::path(cfg.out_dir) / "aggregate.csv").string();
    std::ofstream agg(agg_path, std::ios::binary);
    if (!agg) throw std::runtime_error("cannot write " + agg_path);
    agg << aggregate_to_csv(result.traces, cfg.bandit.horizon);
    result.aggregate_file = agg_path;
  }
  if (cfg.emit_json) {
    const std::string agg_path = (fs::path(cfg.out_dir) / "aggregate.json").string();
    std::ofstream agg(agg_path, std::ios::binary);
    if (!agg) throw std::runtime_error("cannot write " + agg_path);
    json j = json::array();
    for (const auto& tr : result.traces)
      j.push_back(trace_to_json(tr, algo_name(tr.algo) + "_s" + std::to_string(tr.seed)));
    agg << j.dump(2) << '\n';
    if (result.aggregate_file.empty()) result.aggregate_file = agg_path;
  }
  return result;
}

namespace {
template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config field '") + key + "': " + e.what());
  }
}
}  // namespace

SuiteConfig parse_suite_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  SuiteConfig cfg;
  if (j.contains("bandit")) {
    const json& b = j["bandit"];
    read_field(b, "horizon", cfg.bandit.horizon);
    read_field(b, "arms", cfg.bandit.num_arms);
    read_field(b, "dim", cfg.bandit.dim);
    read_field(b, "lambda", cfg.bandit.lambda);
    read_field(b, "delta", cfg.bandit.delta);
    read_field(b, "feature_bound", cfg.bandit.feature_bound);
    read_field(b, "param_bound", cfg.bandit.param_bound);
    read_field(b, "sigma", cfg.bandit.sigma);
    read_field(b, "trace_threshold", cfg.bandit.trace_threshold);
    read_field(b, "eta", cfg.bandit.eta);
    read_field(b, "r_min", cfg.bandit.r_min);
    read_field(b, "r_max", cfg.bandit.r_max);
    read_field(b, "beta_uses_lambda_d", cfg.bandit.beta_uses_lambda_d);
    read_field(b, "batch_start_next_step", cfg.bandit.batch_start_next_step);
  }
  if (j.contains("backend")) {
    const json& b = j["backend"];
    read_field(b, "slots", cfg.backend.n_slots);
    read_field(b, "depth", cfg.backend.depth_budget);
    read_field(b, "scale_bits", cfg.backend.scale_bits);
    read_field(b, "pt_mult_costs_level", cfg.backend.pt_mult_costs_level);
    read_field(b, "noise_std", cfg.backend.noise_std);
    read_field(b, "modulus_q", cfg.backend.modulus_q);
  }
  if (j.contains("environment")) {
    const json& e = j["environment"];
    read_field(e, "context_sets", cfg.environment.context_sets);
    read_field(e, "context_radius", cfg.environment.context_radius);
    read_field(e, "theta_norm", cfg.environment.theta_norm);
    read_field(e, "seed", cfg.environment.seed);
  }
  if (j.contains("run")) {
    const json& r = j["run"];
    if (r.contains("algos")) {
      cfg.algos.clear();
      for (const auto& name : r.at("algos")) cfg.algos.push_back(algo_from_name(name.get<std::string>()));
    }
    read_field(r, "seeds", cfg.seeds);
    read_field(r, "seed_base", cfg.seed_base);
    read_field(r, "out", cfg.out_dir);
    if (r.contains("emit")) {
      cfg.emit_csv = false;
      cfg.emit_json = false;
      for (const auto& fmt : r.at("emit")) {
        const std::string f = fmt.get<std::string>();
        if (f == "csv") cfg.emit_csv = true;
        else if (f == "json") cfg.emit_json = true;
        else throw ConfigError("unknown emit format: " + f);
      }
    }
    read_field(r, "workers", cfg.workers);
  }
  return cfg;
}

SuiteConfig load_suite_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_suite_config(ss.str());
}

}  // namespace helba::sim
