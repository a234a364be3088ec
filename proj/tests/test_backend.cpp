#include <doctest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"

using namespace helba;
using he::Backend;
using he::BackendConfig;
using he::Ciphertext;
using he::Party;
using testutil::oracle_decrypt;

namespace {
BackendConfig small_cfg(int depth = 32, int scale_bits = 40) {
  BackendConfig cfg;
  cfg.n_slots = 8;
  cfg.depth_budget = depth;
  cfg.scale_bits = scale_bits;
  cfg.seed = 7;
  return cfg;
}
}  // namespace

TEST_CASE("encrypt/decrypt round trips") {
  Backend be(small_cfg());

  SUBCASE("zero is exact") {
    auto out = oracle_decrypt(be, be.encrypt({0.0}));
    CHECK(out[0] == 0.0);
    for (std::size_t i = 1; i < out.size(); ++i) CHECK(out[i] == 0.0);  // unused slots zero
  }

  SUBCASE("dyadic rationals are exact at scale 30") {
    Backend be30(small_cfg(32, 30));
    auto out = oracle_decrypt(be30, be30.encrypt({1.5, -2.25}));
    CHECK(out[0] == doctest::Approx(1.5).epsilon(1e-8));
    CHECK(out[1] == doctest::Approx(-2.25).epsilon(1e-8));
  }

  SUBCASE("pi within quantization at scale 30") {
    Backend be30(small_cfg(32, 30));
    auto out = oracle_decrypt(be30, be30.encrypt({std::numbers::pi}));
    CHECK(std::abs(out[0] - std::numbers::pi) <= std::ldexp(1.0, -28));
  }

  SUBCASE("fresh ciphertext sits at full level") {
    CHECK(be.encrypt({1.0}).level() == be.depth_budget());
  }

  SUBCASE("overflow raises") {
    CHECK_THROWS_AS(be.encrypt({1e10}), OverflowError);
  }

  SUBCASE("too many values raises") {
    CHECK_THROWS_AS(be.encrypt(std::vector<double>(9, 0.0)), ShapeError);
  }
}

TEST_CASE("addition") {
  Backend be(small_cfg());

  auto out = oracle_decrypt(be, be.add(be.encrypt({1.0}), be.encrypt({2.0})));
  CHECK(out[0] == doctest::Approx(3.0).epsilon(1e-10));

  SUBCASE("additive identity") {
    auto x = be.encrypt({0.5, -0.25, 4.0});
    auto same = oracle_decrypt(be, be.add(x, be.encrypt(std::vector<double>(8, 0.0))));
    auto orig = oracle_decrypt(be, x);
    CHECK(same == orig);
  }

  SUBCASE("random vectors match the plaintext sum") {
    std::mt19937_64 rng(3);
    auto u = testutil::random_vector(8, rng, -5.0, 5.0);
    auto v = testutil::random_vector(8, rng, -5.0, 5.0);
    auto out2 = oracle_decrypt(be, be.add(be.encrypt(u), be.encrypt(v)));
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(out2[i] - (u[i] + v[i])) <= std::ldexp(1.0, -37));
  }

  SUBCASE("level is the min of the operands and never increases") {
    auto a = be.encrypt({1.0});
    auto b = be.mult(be.encrypt({1.0}), be.encrypt({1.0}));  // one level down
    CHECK(be.add(a, b).level() == b.level());
  }
}

TEST_CASE("ciphertext multiplication") {
  Backend be(small_cfg(4));

  auto out = oracle_decrypt(be, be.mult(be.encrypt({2.0}), be.encrypt({3.0})));
  CHECK(out[0] == doctest::Approx(6.0).epsilon(1e-10));

  SUBCASE("level drops by one even against all-ones") {
    auto x = be.encrypt({0.7, -0.3});
    auto ones = be.encrypt(std::vector<double>(8, 1.0));
    auto y = be.mult(x, ones);
    CHECK(y.level() == x.level() - 1);
    auto xs = oracle_decrypt(be, x);
    auto ys = oracle_decrypt(be, y);
    for (std::size_t i = 0; i < 8; ++i) CHECK(ys[i] == doctest::Approx(xs[i]).epsilon(1e-9));
  }

  SUBCASE("budget boundary: D+1 squarings fail on the last") {
    auto x = be.encrypt({1.0});
    for (int i = 0; i < 4; ++i) x = be.mult(x, x);
    CHECK(x.level() == 0);
    CHECK_THROWS_AS(be.mult(x, x), DepthExhaustedError);
  }
}

TEST_CASE("plaintext multiplication") {
  Backend be(small_cfg());

  auto out = oracle_decrypt(be, be.mult_plain(be.encrypt({4.0}), std::vector<double>{0.5, 0, 0, 0, 0, 0, 0, 0}));
  CHECK(out[0] == doctest::Approx(2.0).epsilon(1e-10));

  SUBCASE("identity plaintext, level still charged by default") {
    auto x = be.encrypt({1.25, -2.5});
    auto y = be.mult_plain(x, std::vector<double>(8, 1.0));
    CHECK(y.level() == x.level() - 1);
    CHECK(oracle_decrypt(be, y) == oracle_decrypt(be, x));
  }

  SUBCASE("free when the rescale toggle is off") {
    auto cfg = small_cfg();
    cfg.pt_mult_costs_level = false;
    Backend be2(cfg);
    auto x = be2.encrypt({1.0});
    CHECK(be2.mult_plain(x, 2.0).level() == x.level());
  }

  SUBCASE("random pair matches the slotwise oracle") {
    std::mt19937_64 rng(11);
    auto u = testutil::random_vector(8, rng, -3.0, 3.0);
    auto p = testutil::random_vector(8, rng, -3.0, 3.0);
    auto got = oracle_decrypt(be, be.mult_plain(be.encrypt(u), p));
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(got[i] - u[i] * p[i]) <= std::ldexp(1.0, -37));
  }
}

TEST_CASE("rotation") {
  Backend be(small_cfg());
  auto x = be.encrypt({1, 2, 3, 4, 5, 6, 7, 8});

  auto r1 = oracle_decrypt(be, be.rotate(x, 1));
  CHECK(r1 == std::vector<double>{2, 3, 4, 5, 6, 7, 8, 1});

  CHECK(oracle_decrypt(be, be.rotate(x, 0)) == oracle_decrypt(be, x));
  CHECK(be.rotate(x, 3).level() == x.level());

  SUBCASE("group inverse") {
    for (long k = 0; k < 8; ++k) {
      auto back = be.rotate(be.rotate(x, k), static_cast<long>(8 - k) % 8);
      CHECK(oracle_decrypt(be, back) == oracle_decrypt(be, x));
    }
  }

  CHECK_THROWS_AS(be.rotate(x, 8), ShapeError);
}

TEST_CASE("column sums") {
  Backend be(small_cfg());

  SUBCASE("single row") {
    auto out = oracle_decrypt(be, be.sum_cols(be.encrypt({1, 2, 3, 4}), 1, 4));
    CHECK(out[0] == 10.0);
    CHECK(out[1] == 10.0);
    CHECK(out[2] == 10.0);
    CHECK(out[3] == 10.0);
  }

  SUBCASE("two blocks") {
    auto out = oracle_decrypt(be, be.sum_cols(be.encrypt({1, 2, 3, 4}), 2, 2));
    CHECK(out[0] == 3.0);
    CHECK(out[1] == 3.0);
    CHECK(out[2] == 7.0);
    CHECK(out[3] == 7.0);
  }

  SUBCASE("zeros stay zero") {
    auto out = oracle_decrypt(be, be.sum_cols(be.encrypt({0, 0, 0, 0}), 2, 2));
    for (int i = 0; i < 4; ++i) CHECK(out[static_cast<std::size_t>(i)] == 0.0);
  }

  SUBCASE("level unchanged and shape checked") {
    auto x = be.encrypt({1, 2, 3, 4});
    CHECK(be.sum_cols(x, 2, 2).level() == x.level());
    CHECK_THROWS_AS(be.sum_cols(x, 3, 3), ShapeError);
  }

  SUBCASE("random blocks match the rowwise oracle") {
    std::mt19937_64 rng(5);
    auto u = testutil::random_vector(8, rng, -2.0, 2.0);
    auto out = oracle_decrypt(be, be.sum_cols(be.encrypt(u), 2, 4));
    for (std::size_t i = 0; i < 2; ++i) {
      double expect = u[4 * i] + u[4 * i + 1] + u[4 * i + 2] + u[4 * i + 3];
      for (std::size_t j = 0; j < 4; ++j) CHECK(out[4 * i + j] == doctest::Approx(expect).epsilon(1e-9));
    }
  }
}

TEST_CASE("masking") {
  SUBCASE("round trip within the mask grid") {
    Backend be(small_cfg());
    auto [masked, tok] = be.mask(be.encrypt({0.7}));
    auto recovered = be.unmask(be.decrypt(masked, Party::kOracle), tok);
    CHECK(std::abs(recovered[0] - 0.7) <= 1.0 / static_cast<double>(be.config().modulus_q));
  }

  SUBCASE("round trip on 10^4 random values") {
    Backend be(small_cfg());
    std::mt19937_64 rng(19);
    const double tol = 1.0 / static_cast<double>(be.config().modulus_q);
    for (int i = 0; i < 1250; ++i) {
      auto vals = testutil::random_vector(8, rng, 0.0, 1.0 - 1e-9);
      auto [masked, tok] = be.mask(be.encrypt(vals));
      auto rec = be.unmask(be.decrypt(masked, Party::kOracle), tok);
      for (std::size_t j = 0; j < 8; ++j) CHECK(std::abs(rec[j] - vals[j]) <= tol);
    }
  }

  SUBCASE("masked slots are uniform over Z_q for distinct inputs") {
    // Same seeded offset stream, two different messages: both masked
    // streams must pass the uniformity test.
    for (double input : {0.3, 0.77}) {
      auto cfg = small_cfg();
      cfg.modulus_q = 257;
      cfg.seed = 99;
      Backend be(cfg);
      std::vector<long> counts(257, 0);
      long total = 0;
      auto ct = be.encrypt(std::vector<double>(8, input));
      for (int i = 0; i < 1250; ++i) {
        auto [masked, tok] = be.mask(ct);
        for (double slot : be.decrypt(masked, Party::kOracle)) {
          counts[static_cast<std::size_t>(slot)] += 1;
          ++total;
        }
      }
      const double stat = testutil::chi2_uniform_stat(counts, total);
      CHECK(stat < testutil::chi2_quantile(256.0, 0.99));  // p > 0.01
    }
  }

  SUBCASE("q = 2 behaves like a fair coin on input 0") {
    auto cfg = small_cfg();
    cfg.modulus_q = 2;
    cfg.seed = 123;
    Backend be(cfg);
    auto ct = be.encrypt({0.0});
    long ones = 0, total = 0;
    for (int i = 0; i < 10000; ++i) {
      auto [masked, tok] = be.mask(ct);
      const double slot = be.decrypt(masked, Party::kOracle)[0];
      CHECK((slot == 0.0 || slot == 1.0));
      ones += slot == 1.0 ? 1 : 0;
      ++total;
    }
    const double freq = static_cast<double>(ones) / total;
    CHECK(freq == doctest::Approx(0.5).epsilon(0.1));  // 0.5 +/- 0.05
  }

  SUBCASE("unmask_ct restores values at unchanged level") {
    Backend be(small_cfg());
    auto x = be.encrypt({0.25, 0.5});
    auto [masked, tok] = be.mask(x);
    auto fresh = be.encrypt(be.decrypt(masked, Party::kOracle));
    auto restored = be.unmask_ct(fresh, tok);
    CHECK(restored.level() == be.depth_budget());
    auto rec = oracle_decrypt(be, restored);
    CHECK(rec[0] == doctest::Approx(0.25).epsilon(1e-5));
    CHECK(rec[1] == doctest::Approx(0.5).epsilon(1e-5));
  }
}

TEST_CASE("level monotonicity and homomorphism over random programs") {
  Backend be(small_cfg(64, 40));
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> op_pick(0, 3);

  for (int trial = 0; trial < 20; ++trial) {
    auto u = testutil::random_vector(8, rng, -1.0, 1.0);
    auto v = testutil::random_vector(8, rng, -1.0, 1.0);
    Ciphertext a = be.encrypt(u);
    std::vector<double> plain = u;
    int last_level = a.level();
    const int ops = 50;
    for (int i = 0; i < ops; ++i) {
      switch (op_pick(rng)) {
        case 0: {
          a = be.add(a, be.encrypt(v));
          for (std::size_t j = 0; j < 8; ++j) plain[j] += v[j];
          break;
        }
        case 1: {
          a = be.mult_plain(a, v);
          for (std::size_t j = 0; j < 8; ++j) plain[j] *= v[j];
          break;
        }
        case 2: {
          a = be.rotate(a, 1);
          std::rotate(plain.begin(), plain.begin() + 1, plain.end());
          break;
        }
        default: {
          a = be.mult(a, be.encrypt(v));
          for (std::size_t j = 0; j < 8; ++j) plain[j] *= v[j];
          break;
        }
      }
      CHECK(a.level() <= last_level);
      last_level = a.level();
    }
    const double tol = std::ldexp(1.0, -40 + 6 + 2);  // 2^(-scale + ceil(log2 ops) + 2)
    auto got = oracle_decrypt(be, a);
    for (std::size_t j = 0; j < 8; ++j) CHECK(std::abs(got[j] - plain[j]) <= tol);
  }
}

TEST_CASE("depth accounting is exact along the deepest path") {
  Backend be(small_cfg(16));
  auto x = be.encrypt({0.5});
  auto y = be.encrypt({0.25});
  // deepest path: two ct-ct mults plus one charged plaintext mult
  auto z = be.mult(be.mult_plain(be.mult(x, y), 0.5), be.mult(x, y));
  CHECK(z.level() == 16 - 2 - 1);
}

TEST_CASE("decrypt audit") {
  Backend be(small_cfg());
  auto x = be.encrypt({1.0});
  (void)be.decrypt(x, Party::kUser);
  (void)be.decrypt(x, Party::kOracle);
  CHECK(be.audit().user_decrypts == 1);
  CHECK(be.audit().oracle_decrypts == 1);
  CHECK(be.audit().server_decrypts == 0);
  CHECK_THROWS_AS(be.decrypt(x, Party::kServer), ProtocolError);
  CHECK(be.audit().server_decrypts == 1);
}

TEST_CASE("ciphertexts from different backends do not mix") {
  Backend a(small_cfg());
  Backend b(small_cfg());
  CHECK_THROWS_AS(a.add(a.encrypt({1.0}), b.encrypt({1.0})), ShapeError);
}
