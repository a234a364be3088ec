// Command-line driver: runs the encrypted bandit and its plaintext
// baselines on a toy problem and emits per-run traces plus an aggregate.

#include <cxxabi.h>

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "helba/sim/harness.hpp"

namespace {
std::string type_name(const std::exception& e) {
  int status = 0;
  std::unique_ptr<char, void (*)(void*)> demangled(
      abi::__cxa_demangle(typeid(e).name(), nullptr, nullptr, &status), std::free);
  return status == 0 && demangled ? demangled.get() : typeid(e).name();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linear contextual bandits over emulated leveled homomorphic arithmetic"};

  std::string config_path;
  std::string algo = "all";
  int seeds = -1;
  std::string out_dir;
  std::string backend_mode;
  std::vector<std::string> emit;

  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--algo", algo, "helba|oful|rsoful|rsoful-tr|all")->default_val("all");
  app.add_option("--seeds", seeds, "number of repetitions");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--backend", backend_mode, "exact|noisy")->check(CLI::IsMember({"exact", "noisy"}));
  app.add_option("--emit", emit, "csv and/or json")->check(CLI::IsMember({"csv", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    helba::sim::SuiteConfig cfg;
    if (!config_path.empty()) cfg = helba::sim::load_suite_config(config_path);

    if (algo != "all") cfg.algos = {helba::sim::algo_from_name(algo)};
    if (seeds > 0) cfg.seeds = seeds;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (backend_mode == "exact") cfg.backend.noise_std = 0.0;
    if (backend_mode == "noisy" && cfg.backend.noise_std <= 0.0) cfg.backend.noise_std = 1e-10;
    if (!emit.empty()) {
      cfg.emit_csv = false;
      cfg.emit_json = false;
      for (const auto& f : emit) (f == "csv" ? cfg.emit_csv : cfg.emit_json) = true;
    }

    const auto result = helba::sim::run_suite(cfg);
    std::printf("wrote %zu trace file(s) and %s\n", result.trace_files.size(),
                result.aggregate_file.c_str());
    return 0;
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", {{"type", type_name(e)}, {"message", e.what()}}}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 1;
  }
}
