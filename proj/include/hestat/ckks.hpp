/* Copyright (C) 2026 The hestat authors.
 * Licensed under the Apache License, Version 2.0; see the LICENSE file.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hestat/errors.hpp"

namespace hestat {

/// Global emulator configuration. Mirrors a leveled CKKS instance: a fixed
/// number of SIMD slots, a multiplicative level budget that bootstrapping
/// resets, and a fixed-point scale of 2^scale_bits.
struct CkksParams {
  std::size_t slot_count = 32768;
  int max_level = 11;
  int scale_bits = 40;
  /// Round every slot to the nearest multiple of 2^-scale_bits after each
  /// operation. This is the only numerical error source the emulator models.
  bool quantize = true;
  /// Insert a bootstrap automatically when an operation needs more levels
  /// than remain. When false the operation throws level_exhausted instead.
  bool auto_bootstrap = true;
  /// Enable emulator-side diagnostics (domain checks, padding checks,
  /// divergence guards). These peek at slot values and exist for debugging
  /// and validation only.
  bool debug_checks = false;

  void validate() const {
    if (slot_count == 0 || (slot_count & (slot_count - 1)) != 0)
      throw error("CkksParams: slot_count must be a power of two");
    if (max_level < 1) throw error("CkksParams: max_level must be >= 1");
    if (scale_bits < 1) throw error("CkksParams: scale_bits must be >= 1");
  }

  double quantum() const { return std::ldexp(1.0, -scale_bits); }
};

/// Running operation counts for one evaluation context. Bootstrap count is
/// the number that matters for cost claims; the rest make circuits auditable.
struct CostMeter {
  std::uint64_t mul_ct = 0;
  std::uint64_t mul_pt = 0;
  std::uint64_t add = 0;
  std::uint64_t rotate = 0;
  std::uint64_t bootstrap = 0;

  void merge(const CostMeter& o) {
    mul_ct += o.mul_ct;
    mul_pt += o.mul_pt;
    add += o.add;
    rotate += o.rotate;
    bootstrap += o.bootstrap;
  }
};

/// A slot vector plus its remaining multiplicative level. Immutable value
/// type: every operation returns a fresh ciphertext.
class Ciphertext {
 public:
  Ciphertext() = default;
  Ciphertext(std::vector<double> slots, int level)
      : slots_(std::move(slots)), level_(level) {}

  const std::vector<double>& slots() const { return slots_; }
  int level() const { return level_; }
  std::size_t size() const { return slots_.size(); }

 private:
  friend class EvalContext;
  std::vector<double> slots_;
  int level_ = 0;
};

/// Owns the parameters and the cost meter; every homomorphic operation goes
/// through exactly one context. Contexts are single-threaded; run parallel
/// work on independent contexts and merge the meters afterwards.
class EvalContext {
 public:
  explicit EvalContext(CkksParams params = {}, std::uint64_t rng_seed = 0)
      : params_(params), rng_seed_(rng_seed) {
    params_.validate();
  }

  const CkksParams& params() const { return params_; }
  CostMeter& meter() { return meter_; }
  const CostMeter& meter() const { return meter_; }
  std::uint64_t rng_seed() const { return rng_seed_; }

  /// Pack a vector into a fresh ciphertext at max_level, zero-padding the
  /// remaining slots. Emulated encryption is identity packing.
  Ciphertext encrypt(std::span<const double> values) const {
    if (values.size() > params_.slot_count)
      throw too_many_values("encrypt: more values than slots");
    std::vector<double> slots(params_.slot_count, 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) slots[i] = values[i];
    quantize_inplace(slots);
    return Ciphertext(std::move(slots), params_.max_level);
  }

  /// First n slot values.
  std::vector<double> decrypt(const Ciphertext& ct, std::size_t n) const {
    if (n > params_.slot_count)
      throw too_many_values("decrypt: n exceeds slot count");
    return std::vector<double>(ct.slots().begin(), ct.slots().begin() + n);
  }

  Ciphertext add_ct(const Ciphertext& a, const Ciphertext& b) {
    check_shape(a);
    check_shape(b);
    std::vector<double> out(params_.slot_count);
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = a.slots()[i] + b.slots()[i];
    quantize_inplace(out);
    ++meter_.add;
    return Ciphertext(std::move(out), std::min(a.level(), b.level()));
  }

  Ciphertext sub_ct(const Ciphertext& a, const Ciphertext& b) {
    check_shape(a);
    check_shape(b);
    std::vector<double> out(params_.slot_count);
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = a.slots()[i] - b.slots()[i];
    quantize_inplace(out);
    ++meter_.add;
    return Ciphertext(std::move(out), std::min(a.level(), b.level()));
  }

  /// Plaintext addition with a broadcast scalar. Metered as an add and free
  /// of level cost, like ciphertext addition.
  Ciphertext add_pt(const Ciphertext& a, double c) {
    check_shape(a);
    std::vector<double> out(params_.slot_count);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.slots()[i] + c;
    quantize_inplace(out);
    ++meter_.add;
    return Ciphertext(std::move(out), a.level());
  }

  /// Ciphertext-ciphertext multiplication. Consumes one level below the
  /// minimum input level; with auto_bootstrap an input at level 0 is
  /// refreshed first (and counted).
  Ciphertext mul_ct(Ciphertext a, Ciphertext b) {
    check_shape(a);
    check_shape(b);
    if (std::min(a.level(), b.level()) < 1) {
      if (!params_.auto_bootstrap)
        throw level_exhausted("mul_ct: no multiplicative level left");
      if (a.level() < 1) a = bootstrap(a);
      if (b.level() < 1) b = bootstrap(b);
    }
    std::vector<double> out(params_.slot_count);
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = a.slots()[i] * b.slots()[i];
    quantize_inplace(out);
    ++meter_.mul_ct;
    return Ciphertext(std::move(out), std::min(a.level(), b.level()) - 1);
  }

  /// Ciphertext-plaintext multiplication with a broadcast scalar. Also
  /// consumes one level (a rescale), matching CKKS practice.
  Ciphertext mul_pt(Ciphertext a, double c) {
    check_shape(a);
    a = prepare_mul_pt(std::move(a));
    std::vector<double> out(params_.slot_count);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.slots()[i] * c;
    quantize_inplace(out);
    ++meter_.mul_pt;
    return Ciphertext(std::move(out), a.level() - 1);
  }

  /// Ciphertext-plaintext multiplication with an aligned vector.
  Ciphertext mul_pt(Ciphertext a, std::span<const double> p) {
    check_shape(a);
    if (p.size() != params_.slot_count)
      throw length_mismatch("mul_pt: plaintext vector length != slot count");
    a = prepare_mul_pt(std::move(a));
    std::vector<double> out(params_.slot_count);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.slots()[i] * p[i];
    quantize_inplace(out);
    ++meter_.mul_pt;
    return Ciphertext(std::move(out), a.level() - 1);
  }

  /// Cyclic slot rotation by k positions to the left. Level-free; key
  /// material is not modeled.
  Ciphertext rotate(const Ciphertext& a, long k) {
    check_shape(a);
    const long n = static_cast<long>(params_.slot_count);
    long shift = ((k % n) + n) % n;
    std::vector<double> out(params_.slot_count);
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = a.slots()[(i + static_cast<std::size_t>(shift)) % out.size()];
    ++meter_.rotate;
    return Ciphertext(std::move(out), a.level());
  }

  /// Level refresh. Values are preserved exactly (re-quantized when the
  /// quantization mode is on); the real scheme's bootstrap error is out of
  /// the emulation's scope.
  Ciphertext bootstrap(const Ciphertext& a) {
    check_shape(a);
    std::vector<double> out = a.slots();
    quantize_inplace(out);
    ++meter_.bootstrap;
    return Ciphertext(std::move(out), params_.max_level);
  }

  /// Replicates the sum of all slots into every slot via log2(slot_count)
  /// rotate-and-add steps. Requires the slots beyond n_valid to be zero so
  /// the cyclic sum equals the sum of the valid prefix.
  Ciphertext sum_all_slots(const Ciphertext& a, std::size_t n_valid) {
    check_shape(a);
    if (params_.debug_checks) {
      const double eps = std::ldexp(1.0, -(params_.scale_bits - 1));
      for (std::size_t i = n_valid; i < params_.slot_count; ++i)
        if (std::abs(a.slots()[i]) > eps)
          throw dirty_padding("sum_all_slots: nonzero padding slot");
    }
    Ciphertext acc = a;
    for (std::size_t step = 1; step < params_.slot_count; step <<= 1)
      acc = add_ct(acc, rotate(acc, static_cast<long>(step)));
    return acc;
  }

 private:
  Ciphertext prepare_mul_pt(Ciphertext a) {
    if (a.level() < 1) {
      if (!params_.auto_bootstrap)
        throw level_exhausted("mul_pt: no multiplicative level left");
      a = bootstrap(a);
    }
    return a;
  }

  void check_shape(const Ciphertext& a) const {
    if (a.size() != params_.slot_count)
      throw length_mismatch("ciphertext slot count does not match context");
  }

  void quantize_inplace(std::vector<double>& v) const {
    if (!params_.quantize) return;
    const double s = std::ldexp(1.0, params_.scale_bits);
    const double inv = std::ldexp(1.0, -params_.scale_bits);
    for (double& x : v) x = std::nearbyint(x * s) * inv;
  }

  CkksParams params_;
  CostMeter meter_;
  std::uint64_t rng_seed_ = 0;
};

}  // namespace hestat
