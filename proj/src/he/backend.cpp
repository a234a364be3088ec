#include "helba/he/backend.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>

namespace helba::he {

namespace {
std::uint64_t next_backend_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
}  // namespace

EvalBackend::EvalBackend(const BackendConfig& cfg) : cfg_(cfg), id_(next_backend_id()), rng_(cfg.seed) {
  if (!is_power_of_two(cfg_.n_slots)) throw InvalidParams("n_slots must be a power of two");
  if (cfg_.depth_budget < 1) throw InvalidParams("depth budget must be >= 1");
  if (cfg_.scale_bits < 8) throw InvalidParams("scale_bits must be >= 8");
  if (cfg_.noise_std < 0.0) throw InvalidParams("noise_std must be >= 0");
  if (cfg_.modulus_q < 2) throw InvalidParams("modulus_q must be >= 2");
  grid_ = std::ldexp(1.0, -cfg_.scale_bits);
  // Beyond 2^53 the scaled integer no longer fits a double mantissa and
  // rounding would silently corrupt slots. Masked slots are Z_q integers,
  // which stay exact, so the modulus is always admitted.
  max_abs_ = std::max(std::ldexp(1.0, 53 - cfg_.scale_bits), static_cast<double>(cfg_.modulus_q));
}

Ciphertext EvalBackend::make_ct(std::vector<double> slots, int level) const {
  int used = cfg_.depth_budget - level;
  if (used > window_max_depth_) window_max_depth_ = used;
  return Ciphertext(std::move(slots), level, cfg_.scale_bits, id_);
}

void EvalBackend::check_owned(const Ciphertext& a) const {
  if (a.backend_id_ != id_) throw ShapeError("ciphertext belongs to a different backend");
  if (a.size() != cfg_.n_slots) throw ShapeError("slot count mismatch");
}

void EvalBackend::check_same_backend(const Ciphertext& a, const Ciphertext& b) const {
  check_owned(a);
  check_owned(b);
}

double EvalBackend::quantize(double x) const {
  if (!std::isfinite(x) || std::abs(x) > max_abs_) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "value %g not representable at scale 2^-%d", x, cfg_.scale_bits);
    throw OverflowError(buf);
  }
  return std::round(x / grid_) * grid_;
}

void EvalBackend::require_level(const Ciphertext& a, const char* op) const {
  if (a.level() < 1) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s: multiplicative depth exhausted (level 0)", op);
    throw DepthExhaustedError(buf);
  }
}

Ciphertext EvalBackend::encrypt(const std::vector<double>& values) const {
  if (values.size() > cfg_.n_slots) throw ShapeError("encrypt: too many values for slot count");
  std::vector<double> slots(cfg_.n_slots, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) slots[i] = quantize(values[i]);
  ++ops_.encrypts;
  return make_ct(std::move(slots), cfg_.depth_budget);
}

Ciphertext EvalBackend::add(const Ciphertext& a, const Ciphertext& b) const {
  check_same_backend(a, b);
  std::vector<double> out(cfg_.n_slots);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = quantize(a.raw_slots()[i] + b.raw_slots()[i]);
  return make_ct(std::move(out), std::min(a.level(), b.level()));
}

Ciphertext EvalBackend::negate(const Ciphertext& a) const {
  check_owned(a);
  std::vector<double> out(cfg_.n_slots);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -a.raw_slots()[i];
  return make_ct(std::move(out), a.level());
}

Ciphertext EvalBackend::sub(const Ciphertext& a, const Ciphertext& b) const { return add(a, negate(b)); }

Ciphertext EvalBackend::add_plain(const Ciphertext& a, const std::vector<double>& p) const {
  check_owned(a);
  if (p.size() > cfg_.n_slots) throw ShapeError("add_plain: plaintext too long");
  std::vector<double> out = a.raw_slots();
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = quantize(out[i] + quantize(p[i]));
  return make_ct(std::move(out), a.level());
}

Ciphertext EvalBackend::add_plain(const Ciphertext& a, double scalar) const {
  return add_plain(a, std::vector<double>(cfg_.n_slots, scalar));
}

Ciphertext EvalBackend::mult(const Ciphertext& a, const Ciphertext& b) const {
  check_same_backend(a, b);
  require_level(a, "mult");
  require_level(b, "mult");
  std::normal_distribution<double> noise(0.0, cfg_.noise_std);
  std::vector<double> out(cfg_.n_slots);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double v = a.raw_slots()[i] * b.raw_slots()[i];
    if (cfg_.noise_std > 0.0) v += noise(rng_);
    out[i] = quantize(v);
  }
  ++ops_.ct_mults;
  return make_ct(std::move(out), std::min(a.level(), b.level()) - 1);
}

Ciphertext EvalBackend::mult_plain(const Ciphertext& a, const std::vector<double>& p) const {
  check_owned(a);
  if (p.size() != cfg_.n_slots) throw ShapeError("mult_plain: plaintext length mismatch");
  int level = a.level();
  if (cfg_.pt_mult_costs_level) {
    require_level(a, "mult_plain");
    level -= 1;
  }
  std::vector<double> out(cfg_.n_slots);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = quantize(a.raw_slots()[i] * quantize(p[i]));
  ++ops_.pt_mults;
  return make_ct(std::move(out), level);
}

Ciphertext EvalBackend::mult_plain(const Ciphertext& a, double scalar) const {
  return mult_plain(a, std::vector<double>(cfg_.n_slots, scalar));
}

Ciphertext EvalBackend::rotate(const Ciphertext& a, long k) const {
  check_owned(a);
  long n = static_cast<long>(cfg_.n_slots);
  if (k <= -n || k >= n) throw ShapeError("rotate: |k| must be < n_slots");
  long shift = ((k % n) + n) % n;
  std::vector<double> out(cfg_.n_slots);
  for (long i = 0; i < n; ++i) out[i] = a.raw_slots()[(i + shift) % n];
  ++ops_.rotations;
  return make_ct(std::move(out), a.level());
}

Ciphertext EvalBackend::sum_cols(const Ciphertext& a, std::size_t p, std::size_t q) const {
  check_owned(a);
  if (p == 0 || q == 0 || p * q > cfg_.n_slots) throw ShapeError("sum_cols: p*q exceeds slot count");
  std::vector<double> out(cfg_.n_slots, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < q; ++j) s += a.raw_slots()[i * q + j];
    s = quantize(s);
    for (std::size_t j = 0; j < q; ++j) out[i * q + j] = s;
  }
  return make_ct(std::move(out), a.level());
}

Ciphertext EvalBackend::permute(const Ciphertext& a, const std::vector<std::size_t>& perm) const {
  check_owned(a);
  if (perm.size() != cfg_.n_slots) throw ShapeError("permute: table length mismatch");
  std::vector<double> out(cfg_.n_slots);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (perm[i] >= cfg_.n_slots) throw ShapeError("permute: index out of range");
    out[i] = a.raw_slots()[perm[i]];
  }
  return make_ct(std::move(out), a.level());
}

std::pair<Ciphertext, MaskToken> EvalBackend::mask(const Ciphertext& a, double lo, double hi) const {
  check_owned(a);
  if (!(hi > lo)) throw InvalidParams("mask: window must satisfy hi > lo");
  const std::uint64_t q = cfg_.modulus_q;
  const double span = hi - lo;
  std::uniform_int_distribution<std::uint64_t> uni(0, q - 1);
  MaskToken tok;
  tok.offsets.resize(cfg_.n_slots);
  tok.modulus_q = q;
  tok.lo = lo;
  tok.span = span;
  std::vector<double> out(cfg_.n_slots);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double u = (a.raw_slots()[i] - lo) / span;
    long long m = static_cast<long long>(std::llround(u * static_cast<double>(q)));
    std::uint64_t mi = static_cast<std::uint64_t>(((m % static_cast<long long>(q)) + static_cast<long long>(q))) % q;
    std::uint64_t r = uni(rng_);
    tok.offsets[i] = r;
    out[i] = static_cast<double>((mi + r) % q);
  }
  ++ops_.masks;
  // Masked slots are raw Z_q integers, not fixed-point payload; built
  // directly so large q does not trip the overflow check.
  return {make_ct(std::move(out), a.level()), tok};
}

std::vector<double> EvalBackend::unmask(const std::vector<double>& decrypted, const MaskToken& tok) const {
  if (decrypted.size() != tok.offsets.size()) throw ShapeError("unmask: length mismatch");
  const std::uint64_t q = tok.modulus_q;
  std::vector<double> out(decrypted.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    long long v = std::llround(decrypted[i]);
    std::uint64_t vi = static_cast<std::uint64_t>(((v % static_cast<long long>(q)) + static_cast<long long>(q))) % q;
    std::uint64_t m = (vi + q - (tok.offsets[i] % q)) % q;
    out[i] = tok.lo + (static_cast<double>(m) / static_cast<double>(q)) * tok.span;
  }
  return out;
}

Ciphertext EvalBackend::unmask_ct(const Ciphertext& a, const MaskToken& tok) const {
  check_owned(a);
  std::vector<double> recovered = unmask(a.raw_slots(), tok);
  for (double& v : recovered) v = quantize(v);
  return make_ct(std::move(recovered), a.level());
}

std::vector<double> Backend::decrypt(const Ciphertext& a, Party who) const {
  check_owned(a);
  switch (who) {
    case Party::kUser:
      ++audit_.user_decrypts;
      break;
    case Party::kOracle:
      ++audit_.oracle_decrypts;
      break;
    case Party::kServer:
      ++audit_.server_decrypts;
      throw ProtocolError("server-side decrypt attempted");
  }
  return a.raw_slots();
}

}  // namespace helba::he
