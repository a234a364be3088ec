// Acceptance suite: runs every acceptance check at its stated tolerance,
// prints one PASS/FAIL line per criterion, and exits nonzero on failure.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "helba/bandit/helba.hpp"
#include "helba/kernels/compare.hpp"
#include "helba/kernels/inverse.hpp"
#include "helba/kernels/sqrt_iter.hpp"
#include "helba/sim/harness.hpp"

using namespace helba;
using he::Backend;
using he::BackendConfig;
using he::Party;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail, double seconds) {
  std::printf("[%s] criterion %d: %s (%s, %.2fs)\n", pass ? "PASS" : "FAIL", idx, name,
              detail.c_str(), seconds);
  if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

Eigen::MatrixXd random_spd(Eigen::Index d, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = uni(rng);
  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  Eigen::VectorXd eigs(d);
  std::uniform_real_distribution<double> spread(lo, hi);
  for (Eigen::Index i = 0; i < d; ++i) eigs(i) = spread(rng);
  return q * eigs.asDiagonal() * q.transpose();
}

BackendConfig kernel_backend(std::size_t slots, int depth, int scale_bits = 48) {
  BackendConfig cfg;
  cfg.n_slots = slots;
  cfg.depth_budget = depth;
  cfg.scale_bits = scale_bits;
  cfg.seed = 2024;
  return cfg;
}

// ---------------------------------------------------------------- 1
void criterion_inverse() {
  const auto start = Clock::now();
  std::mt19937_64 rng(11);
  int checked = 0;
  double worst_ratio = 0.0;
  bool pass = true;
  const Eigen::Index dims[] = {2, 4, 8};
  for (int i = 0; i < 50 && pass; ++i) {
    const Eigen::Index d = dims[i % 3];
    Backend be(kernel_backend(static_cast<std::size_t>(2 * d * d), 64));
    Eigen::MatrixXd v = random_spd(d, 0.6, 2.5, rng);
    const double c = v.trace();
    const double lam = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(v).eigenvalues().minCoeff();
    const Eigen::MatrixXd exact = v.inverse();
    for (double eps : {1e-3, 1e-6}) {
      auto params = kernels::make_inverse_params(eps, lam, c);
      auto out = kernels::newton_inverse(be, linalg::encode_matrix(be, v), params);
      const double err = (linalg::decode_matrix(be, out, Party::kOracle) - exact).operatorNorm();
      worst_ratio = std::max(worst_ratio, err / eps);
      if (err > eps) pass = false;
      ++checked;
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  pass = pass && secs < 5.0;
  report(1, "inverse iteration accuracy", pass,
         fmt("%d cases, worst err/eps %.3g", checked, worst_ratio), secs);
}

// ---------------------------------------------------------------- 2
void criterion_sqrt() {
  const auto start = Clock::now();
  Backend be(kernel_backend(8, 80));
  bool pass = true;
  double worst_ratio = 0.0;
  const std::pair<double, double> ranges[] = {{0.25, 1.0}, {0.01, 1.0}, {1.0, 100.0}};
  for (auto [c1, c2] : ranges) {
    for (double eps : {1e-2, 1e-4}) {
      auto params = kernels::make_sqrt_params(eps, c1, c2);
      for (int i = 0; i <= 50; ++i) {
        const double z = c1 + (c2 - c1) * i / 50.0;
        auto out = kernels::he_sqrt(be, be.encrypt({z}), params);
        const double err = std::abs(be.decrypt(out, Party::kOracle)[0] - std::sqrt(z));
        worst_ratio = std::max(worst_ratio, err / eps);
        if (err > eps) pass = false;
      }
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  pass = pass && secs < 1.0;
  report(2, "square-root iteration accuracy", pass, fmt("worst err/eps %.3g", worst_ratio), secs);
}

// ---------------------------------------------------------------- 3
void criterion_comparators() {
  const auto start = Clock::now();
  bool pass = true;
  std::string detail;

  {  // margin grids
    Backend be(kernel_backend(8, 128));
    for (double eps : {1e-2, 1e-3}) {
      const int d = kernels::new_comp_depth_for(eps, 1);
      const int n_pts = 26;
      for (int i = 0; i < n_pts && pass; ++i) {
        for (int j = 0; j < n_pts; ++j) {
          const double a = i / static_cast<double>(n_pts - 1);
          const double b = j / static_cast<double>(n_pts - 1);
          if (std::abs(a - b) < eps) continue;
          auto out = kernels::new_comp(be, be.encrypt({a}), be.encrypt({b}), 1, d);
          const double got = be.decrypt(out, Party::kOracle)[0];
          if (std::abs(got - (a > b ? 1.0 : 0.0)) > eps) {
            pass = false;
            detail = fmt("margin grid fails at a=%.3f b=%.3f eps=%g", a, b, eps);
            break;
          }
        }
      }
    }
  }

  if (pass) {  // selection guarantees on random lists
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uniform_int_distribution<int> ksize(1, 8);
    const double eps = 0.01;
    const double quant = std::ldexp(1.0, -40);
    const double bstar_bound =
        0.5 - std::pow(1.5, kernels::acomp_compare_depth(eps, 1)) *
                  std::pow(eps, kernels::comparator_alpha(1)) / 2.0;
    for (int trial = 0; trial < 200 && pass; ++trial) {
      Backend be(kernel_backend(8, 256, 40));
      const int k = ksize(rng);
      std::vector<double> plain(static_cast<std::size_t>(k));
      std::vector<he::Ciphertext> vals;
      for (auto& v : plain) {
        v = uni(rng);
        vals.push_back(be.encrypt({v}));
      }
      auto b = be.decrypt(kernels::acomp(be, vals, eps), Party::kOracle);
      const double mx = *std::max_element(plain.begin(), plain.end());
      const std::size_t istar =
          static_cast<std::size_t>(std::max_element(plain.begin(), plain.end()) - plain.begin());
      bool any = false;
      for (int i = 0; i < k; ++i) {
        if (b[static_cast<std::size_t>(i)] >= eps) {
          any = true;
          if (plain[static_cast<std::size_t>(i)] < mx - 2.0 * eps - quant) {
            pass = false;
            detail = fmt("2eps-argmax violated on trial %d", trial);
          }
        }
      }
      if (!any) {
        pass = false;
        detail = fmt("no selectable index on trial %d", trial);
      }
      if (b[istar] < bstar_bound - quant) {
        pass = false;
        detail = fmt("argmax entry below its bound on trial %d", trial);
      }
    }
  }

  if (pass) {  // ties stay in the 1/2 neighborhood
    Backend be(kernel_backend(8, 256, 40));
    const double eps = 0.01;
    std::vector<he::Ciphertext> vals{be.encrypt({0.5}), be.encrypt({0.5})};
    auto b = be.decrypt(kernels::acomp(be, vals, eps), Party::kOracle);
    const double slack = std::pow(1.5, kernels::acomp_compare_depth(eps, 1)) * eps / 2.0;
    if (std::abs(b[0] - 0.5) > slack || std::abs(b[1] - 0.5) > slack) {
      pass = false;
      detail = "tie case escaped the 1/2 neighborhood";
    }
  }

  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  pass = pass && secs < 10.0;
  if (detail.empty()) detail = "margin grids, 200 selection lists, tie case";
  report(3, "comparator suite", pass, detail, secs);
}

// ---------------------------------------------------------------- 4
void criterion_ridge() {
  const auto start = Clock::now();
  bool pass = true;
  double worst = 0.0;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int batch = 0; batch < 20; ++batch) {
    bandit::BanditConfig cfg;  // d=2, lambda=1, L=5.5
    Backend be(BackendConfig{8, 100, 40, true, 0.0, 1ull << 20, 900 + static_cast<std::uint64_t>(batch)});
    bandit::UserParty user(be);
    bandit::HelbaServer server(be, cfg, user);

    const int t = 2 + (128 * batch) / 19;  // spreads over 2..130
    Eigen::MatrixXd v = cfg.lambda * Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(2);
    for (int l = 1; l < t; ++l) {
      Eigen::VectorXd x(2);
      x << uni(rng), uni(rng);
      const double r = std::clamp(uni(rng), -1.0, 1.0);
      v += x * x.transpose();
      g += r * x;
      server.observe(user.encrypt_context(x), user.encrypt_reward(r), l);
    }
    server.refresh(t - 1);

    const Eigen::VectorXd ridge = v.ldlt().solve(g);
    auto slots = be.decrypt(server.state().omega.ct, Party::kOracle);
    Eigen::VectorXd omega(2);
    omega << slots[0], slots[1];
    const Eigen::VectorXd diff = omega - ridge;
    const double err = std::sqrt(diff.dot(v * diff));
    const double tol = 1.0 / std::sqrt(static_cast<double>(t)) + 10.0 * std::ldexp(1.0, -20);
    worst = std::max(worst, err / tol);
    if (err > tol) pass = false;
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  pass = pass && secs < 30.0;
  report(4, "ridge coupling", pass, fmt("20 batches, worst err/tol %.3g", worst), secs);
}

// ------------------------------------------------------- 5, 6, 7, 8
void criteria_toy_experiment() {
  const auto start = Clock::now();
  sim::SuiteConfig cfg;  // toy-problem defaults everywhere
  cfg.out_dir = "acceptance_out";
  cfg.emit_csv = false;
  cfg.emit_json = false;
  cfg.seeds = 25;
  auto suite_start = Clock::now();

  std::vector<sim::RegretTrace> traces;
  std::string run_error;
  try {
    sim::Environment env(cfg.bandit, cfg.environment);
    for (auto algo : {sim::Algo::kHelba, sim::Algo::kOful, sim::Algo::kRsoful, sim::Algo::kRsofulTr})
      for (int s = 0; s < cfg.seeds; ++s)
        traces.push_back(sim::run_episode(algo, env, cfg.bandit, cfg.backend,
                                          cfg.seed_base + static_cast<std::uint64_t>(s)));
  } catch (const std::exception& e) {
    run_error = e.what();
  }
  const double suite_secs = std::chrono::duration<double>(Clock::now() - suite_start).count();

  auto mean_of = [&](sim::Algo a, auto&& f) {
    double acc = 0.0;
    int n = 0;
    for (const auto& tr : traces)
      if (tr.algo == a) {
        acc += f(tr);
        ++n;
      }
    return n ? acc / n : 0.0;
  };

  {  // 5: batch-count envelope on every seed
    bool pass = run_error.empty();
    const double bound = cfg.bandit.batch_count_bound();
    int worst = 0;
    for (const auto& tr : traces)
      if (tr.algo == sim::Algo::kHelba) {
        const int batches = tr.update_count() + 1;
        worst = std::max(worst, batches);
        if (batches > bound) pass = false;
      }
    report(5, "batch-count envelope", pass,
           run_error.empty() ? fmt("max batches %d <= %.1f", worst, bound) : run_error,
           std::chrono::duration<double>(Clock::now() - start).count());
  }

  {  // 6: toy-experiment reproduction
    bool pass = run_error.empty();
    std::string detail = run_error;
    if (pass) {
      const double rsoful_updates =
          mean_of(sim::Algo::kRsoful, [](const sim::RegretTrace& t) { return t.update_count(); });
      const double helba_updates =
          mean_of(sim::Algo::kHelba, [](const sim::RegretTrace& t) { return t.update_count(); });
      const double helba_final =
          mean_of(sim::Algo::kHelba, [](const sim::RegretTrace& t) { return t.final_regret(); });
      const double helba_half = mean_of(
          sim::Algo::kHelba, [&](const sim::RegretTrace& t) { return t.regret_at(cfg.bandit.horizon / 2); });
      const double oful_final =
          mean_of(sim::Algo::kOful, [](const sim::RegretTrace& t) { return t.final_regret(); });
      const double rsoful_final =
          mean_of(sim::Algo::kRsoful, [](const sim::RegretTrace& t) { return t.final_regret(); });
      const double rsoful_tr_final =
          mean_of(sim::Algo::kRsofulTr, [](const sim::RegretTrace& t) { return t.final_regret(); });

      const bool a = rsoful_updates >= 7.0 && rsoful_updates <= 15.0;
      const bool b = helba_updates >= 14.0 && helba_updates <= 26.0;
      const double t_full = cfg.bandit.horizon, t_half = cfg.bandit.horizon / 2;
      const bool sublinear = helba_final / t_full <= 0.8 * (helba_half / t_half);
      const bool c = sublinear && helba_final <= 4.0 * oful_final;
      const double base_max = std::max({oful_final, rsoful_final, rsoful_tr_final});
      const double base_min = std::min({oful_final, rsoful_final, rsoful_tr_final});
      const bool d = base_max <= 1.5 * base_min;
      pass = a && b && c && d && suite_secs < 600.0;
      detail = fmt("rsoful upd %.1f%s, helba upd %.1f%s, R/T ratio %.2f%s, helba/oful %.2f, base spread %.2f%s",
                   rsoful_updates, a ? "" : "(!)", helba_updates, b ? "" : "(!)",
                   (helba_final / t_full) / (helba_half / t_half), sublinear ? "" : "(!)",
                   helba_final / oful_final, base_max / base_min, d ? "" : "(!)");
    }
    report(6, "toy-experiment reproduction", pass, detail,
           std::chrono::duration<double>(Clock::now() - start).count());
  }

  {  // 7: depth budget and ledger
    bool pass = run_error.empty();
    std::string detail = run_error;
    if (pass) {
      long entries = 0, mismatches = 0;
      int max_depth = 0;
      for (const auto& tr : traces)
        if (tr.algo == sim::Algo::kHelba) {
          max_depth = std::max(max_depth, tr.max_depth_used);
          for (const auto& rec : tr.depth_ledger) {
            ++entries;
            if (rec.predicted != rec.measured) ++mismatches;
          }
        }
      pass = mismatches == 0 && max_depth <= cfg.backend.depth_budget;
      detail = fmt("%ld kernel calls, %ld mismatches, max depth %d/%d", entries, mismatches,
                   max_depth, cfg.backend.depth_budget);
    }
    report(7, "depth ledger", pass, detail,
           std::chrono::duration<double>(Clock::now() - start).count());
  }

  {  // 8: protocol hygiene
    bool pass = run_error.empty();
    std::string detail = run_error;
    if (pass) {
      long server_decrypts = 0;
      for (const auto& tr : traces) server_decrypts += tr.server_decrypts;

      // mask round trip on 10^4 values
      Backend be(kernel_backend(8, 32, 40));
      std::mt19937_64 rng(99);
      std::uniform_real_distribution<double> uni(0.0, 1.0 - 1e-9);
      bool round_trip = true;
      const double tol = 1.0 / static_cast<double>(be.config().modulus_q);
      for (int i = 0; i < 1250 && round_trip; ++i) {
        std::vector<double> vals(8);
        for (auto& v : vals) v = uni(rng);
        auto [masked, tok] = be.mask(be.encrypt(vals));
        auto rec = be.unmask(be.decrypt(masked, Party::kOracle), tok);
        for (std::size_t j = 0; j < 8; ++j)
          if (std::abs(rec[j] - vals[j]) > tol) round_trip = false;
      }

      // uniformity at q = 257
      BackendConfig mc = kernel_backend(8, 32, 40);
      mc.modulus_q = 257;
      Backend mbe(mc);
      std::vector<long> counts(257, 0);
      long total = 0;
      auto ct = mbe.encrypt(std::vector<double>(8, 0.37));
      for (int i = 0; i < 1250; ++i) {
        auto [masked, tok] = mbe.mask(ct);
        for (double slot : mbe.decrypt(masked, Party::kOracle)) {
          counts[static_cast<std::size_t>(slot)] += 1;
          ++total;
        }
      }
      double stat = 0.0;
      const double expected = static_cast<double>(total) / 257.0;
      for (long c : counts) stat += (c - expected) * (c - expected) / expected;
      // Wilson-Hilferty 0.99 quantile for 256 degrees of freedom
      const double df = 256.0, z = 2.3263478740;
      const double aa = 2.0 / (9.0 * df);
      const double crit = df * std::pow(1.0 - aa + z * std::sqrt(aa), 3.0);

      pass = server_decrypts == 0 && round_trip && stat < crit;
      detail = fmt("server decrypts %ld, round trip %s, chi2 %.1f < %.1f", server_decrypts,
                   round_trip ? "ok" : "broken", stat, crit);
    }
    report(8, "protocol hygiene", pass, detail,
           std::chrono::duration<double>(Clock::now() - start).count());
  }
}

// ---------------------------------------------------------------- 9
void criterion_packed() {
  const auto start = Clock::now();
  bool pass = true;
  std::string detail = "plaintext identity x100, encrypted products";
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  for (int trial = 0; trial < 100 && pass; ++trial) {
    const Eigen::Index p = 2 + static_cast<Eigen::Index>(rng() % 7);
    Eigen::MatrixXd m(p, p), n(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index j = 0; j < p; ++j) {
        m(i, j) = uni(rng);
        n(i, j) = uni(rng);
      }
    if (!linalg::plain_permutation_product(m, n).isApprox(m * n, 1e-12)) {
      pass = false;
      detail = fmt("plaintext identity fails at p=%ld", static_cast<long>(p));
    }
  }

  const double tol = std::ldexp(1.0, -40 + 6);
  for (int trial = 0; trial < 20 && pass; ++trial) {
    const Eigen::Index p = 2 + static_cast<Eigen::Index>(rng() % 7);
    Backend be(kernel_backend(128, 16, 40));
    Eigen::MatrixXd m(p, p), n(p, p);
    Eigen::VectorXd y(p);
    for (Eigen::Index i = 0; i < p; ++i) {
      y(i) = uni(rng);
      for (Eigen::Index j = 0; j < p; ++j) {
        m(i, j) = uni(rng);
        n(i, j) = uni(rng);
      }
    }
    auto prod = linalg::mat_mul(be, linalg::encode_matrix(be, m), linalg::encode_matrix(be, n));
    if (((linalg::decode_matrix(be, prod, Party::kOracle) - m * n).cwiseAbs().maxCoeff()) > tol) {
      pass = false;
      detail = fmt("encrypted mat_mul beyond tolerance at p=%ld", static_cast<long>(p));
    }
    auto mv = linalg::mat_vec(be, linalg::encode_matrix(be, m),
                              linalg::encode_vector(be, y, static_cast<std::size_t>(p)));
    Eigen::VectorXd got = linalg::decode_matvec(be, mv, static_cast<std::size_t>(p),
                                                static_cast<std::size_t>(p), Party::kOracle);
    if (((got - m * y).cwiseAbs().maxCoeff()) > tol) {
      pass = false;
      detail = fmt("encrypted mat_vec beyond tolerance at p=%ld", static_cast<long>(p));
    }
  }

  report(9, "packed linear algebra", pass, detail,
         std::chrono::duration<double>(Clock::now() - start).count());
}

}  // namespace

int main() {
  criterion_inverse();
  criterion_sqrt();
  criterion_comparators();
  criterion_ridge();
  criteria_toy_experiment();
  criterion_packed();
  if (failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", failures);
  return 1;
}
