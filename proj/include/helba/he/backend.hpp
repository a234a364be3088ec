#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "helba/he/errors.hpp"

namespace helba::he {

// Which party is asking for a decryption. The server must never decrypt;
// the audit counters make that checkable across a whole run.
enum class Party { kUser, kOracle, kServer };

struct BackendConfig {
  std::size_t n_slots = 8;          // power of two
  int depth_budget = 100;           // D: ct-ct multiplications supported
  int scale_bits = 40;              // fixed-point fractional bits
  bool pt_mult_costs_level = true;  // plaintext mult rescales like ct mult
  double noise_std = 0.0;           // per-slot Gaussian noise per ct mult; 0 = exact
  std::uint64_t modulus_q = 1ull << 20;  // masking modulus
  std::uint64_t seed = 0;           // backend PRNG (mask offsets, noise)
};

// Slot vector of fixed-point reals plus the remaining multiplicative level.
// Immutable value type; every operation returns a new ciphertext.
class Ciphertext {
 public:
  Ciphertext() = default;

  int level() const { return level_; }
  int scale_bits() const { return scale_bits_; }
  std::size_t size() const { return slots_.size(); }
  // Raw slot access for test oracles; decryption goes through Backend.
  const std::vector<double>& raw_slots() const { return slots_; }

 private:
  friend class EvalBackend;
  friend class Backend;
  Ciphertext(std::vector<double> slots, int level, int scale_bits, std::uint64_t backend_id)
      : slots_(std::move(slots)), level_(level), scale_bits_(scale_bits), backend_id_(backend_id) {}

  std::vector<double> slots_;
  int level_ = 0;
  int scale_bits_ = 0;
  std::uint64_t backend_id_ = 0;
};

// Offsets needed to undo a modular masking. `lo`/`span` record the value
// window the mask quantized over (defaults give the plain [0,1) case).
struct MaskToken {
  std::vector<std::uint64_t> offsets;
  std::uint64_t modulus_q = 0;
  double lo = 0.0;
  double span = 1.0;
};

struct AuditCounters {
  long user_decrypts = 0;
  long oracle_decrypts = 0;
  long server_decrypts = 0;
};

struct OpCounters {
  long encrypts = 0;
  long ct_mults = 0;
  long pt_mults = 0;
  long rotations = 0;
  long masks = 0;
};

// Homomorphic-evaluation surface: everything a key-less party may do.
// Encryption uses the public key, so it lives here too. Decryption does not.
class EvalBackend {
 public:
  explicit EvalBackend(const BackendConfig& cfg);
  virtual ~EvalBackend() = default;

  EvalBackend(const EvalBackend&) = delete;
  EvalBackend& operator=(const EvalBackend&) = delete;

  const BackendConfig& config() const { return cfg_; }
  std::size_t n_slots() const { return cfg_.n_slots; }
  int depth_budget() const { return cfg_.depth_budget; }

  Ciphertext encrypt(const std::vector<double>& values) const;

  Ciphertext add(const Ciphertext& a, const Ciphertext& b) const;
  Ciphertext sub(const Ciphertext& a, const Ciphertext& b) const;
  Ciphertext negate(const Ciphertext& a) const;
  Ciphertext add_plain(const Ciphertext& a, const std::vector<double>& p) const;
  Ciphertext add_plain(const Ciphertext& a, double scalar) const;

  Ciphertext mult(const Ciphertext& a, const Ciphertext& b) const;
  Ciphertext mult_plain(const Ciphertext& a, const std::vector<double>& p) const;
  Ciphertext mult_plain(const Ciphertext& a, double scalar) const;

  // Cyclic left rotation by k slots (k may be negative). Level unchanged.
  Ciphertext rotate(const Ciphertext& a, long k) const;

  // Partial sums over row blocks: for each i < p every slot of block i
  // ends up holding sum_{j<q} slot[i*q+j]. Rotations and additions only,
  // so the level is unchanged. Slots at or beyond p*q are zeroed.
  Ciphertext sum_cols(const Ciphertext& a, std::size_t p, std::size_t q) const;

  // Applies a slot permutation: result[i] = a[perm[i]]. Realizable with
  // rotations plus binary maskings, hence level-free.
  Ciphertext permute(const Ciphertext& a, const std::vector<std::size_t>& perm) const;

  // Modular masking. Each slot x is quantized to round((x-lo)/span * q) mod q
  // and a fresh uniform offset in {0,..,q-1} is added mod q. The masked slots
  // are the raw integers, statistically uniform over Z_q whatever the input.
  std::pair<Ciphertext, MaskToken> mask(const Ciphertext& a, double lo = 0.0,
                                        double hi = 1.0) const;

  // Undoes a mask on decrypted slot values.
  std::vector<double> unmask(const std::vector<double>& decrypted, const MaskToken& tok) const;

  // Undoes a mask directly on a ciphertext holding masked integers (used
  // after a user re-encrypted masked slots at fresh level). Offset removal
  // is ring-layer arithmetic, so no level is consumed.
  Ciphertext unmask_ct(const Ciphertext& a, const MaskToken& tok) const;

  const AuditCounters& audit() const { return audit_; }
  const OpCounters& ops() const { return ops_; }

  // Deepest point (D - level) reached by any ciphertext created since the
  // last reset; per-step telemetry for the harness.
  int depth_window_max() const { return window_max_depth_; }
  void reset_depth_window() const { window_max_depth_ = 0; }

 protected:
  Ciphertext make_ct(std::vector<double> slots, int level) const;
  void check_same_backend(const Ciphertext& a, const Ciphertext& b) const;
  void check_owned(const Ciphertext& a) const;
  double quantize(double x) const;
  void require_level(const Ciphertext& a, const char* op) const;

  BackendConfig cfg_;
  std::uint64_t id_;
  double grid_;      // 2^-scale_bits
  double max_abs_;   // largest magnitude exactly representable at this scale
  mutable std::mt19937_64 rng_;
  mutable AuditCounters audit_;
  mutable OpCounters ops_;
  mutable int window_max_depth_ = 0;
};

// Full backend: adds decryption. Only the user party and test oracles
// should ever hold a reference to this type; the server gets EvalBackend.
class Backend final : public EvalBackend {
 public:
  explicit Backend(const BackendConfig& cfg) : EvalBackend(cfg) {}

  std::vector<double> decrypt(const Ciphertext& a, Party who) const;
};

}  // namespace helba::he
