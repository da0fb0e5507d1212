/* Copyright (C) 2026 The hestat authors.
 * Licensed under the Apache License, Version 2.0; see the LICENSE file.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "hestat/chebyshev.hpp"
#include "hestat/ckks.hpp"
#include "hestat/errors.hpp"

namespace hestat {

inline constexpr std::size_t all_slots = std::numeric_limits<std::size_t>::max();

/// Configuration of the inverse n-th root primitives.
struct InvRootConfig {
  int n = 2;                  // 1 = inverse, 2 = inverse square root
  int cheb_degree = 511;      // seed polynomial degree (2^9 - 1)
  int newton_iters = 6;
  bool baseline_mode = false; // fixed y0 = 1 instead of the Chebyshev seed
  int baseline_iters = 0;     // 0 = default (21 for n = 2, 25 for n = 1)

  int effective_baseline_iters() const {
    if (baseline_iters > 0) return baseline_iters;
    return n == 1 ? 25 : 21;
  }
  void validate() const {
    if (n != 1 && n != 2)
      throw error("InvRootConfig: n must be 1 or 2");
    if (newton_iters < 0) throw error("InvRootConfig: newton_iters < 0");
    if (cheb_degree < 0) throw error("InvRootConfig: cheb_degree < 0");
  }
};

inline void to_json(nlohmann::json& j, const InvRootConfig& c) {
  j = nlohmann::json{{"n", c.n},
                     {"cheb_degree", c.cheb_degree},
                     {"newton_iters", c.newton_iters},
                     {"baseline_mode", c.baseline_mode},
                     {"baseline_iters", c.baseline_iters}};
}

inline void from_json(const nlohmann::json& j, InvRootConfig& c) {
  j.at("n").get_to(c.n);
  j.at("cheb_degree").get_to(c.cheb_degree);
  j.at("newton_iters").get_to(c.newton_iters);
  j.at("baseline_mode").get_to(c.baseline_mode);
  j.at("baseline_iters").get_to(c.baseline_iters);
}

/// Configuration of the composite-polynomial sign primitive.
struct SignConfig {
  enum class Mode { G3Composition, CustomComposite };
  Mode mode = Mode::G3Composition;
  int folds = 7;
  /// For CustomComposite: one power-basis coefficient vector per fold stage,
  /// cycled over the fold count. Even-index coefficients must be zero.
  std::vector<std::vector<double>> custom_polys;

  std::string mode_name() const {
    return mode == Mode::G3Composition ? "g3_composition" : "custom_composite";
  }
};

inline void to_json(nlohmann::json& j, const SignConfig& c) {
  j = nlohmann::json{{"mode", c.mode_name()},
                     {"folds", c.folds},
                     {"custom_polys", c.custom_polys}};
}

inline void from_json(const nlohmann::json& j, SignConfig& c) {
  const std::string m = j.at("mode").get<std::string>();
  if (m == "g3_composition") c.mode = SignConfig::Mode::G3Composition;
  else if (m == "custom_composite") c.mode = SignConfig::Mode::CustomComposite;
  else throw error("SignConfig: unknown mode " + m);
  j.at("folds").get_to(c.folds);
  j.at("custom_polys").get_to(c.custom_polys);
}

namespace detail {

inline void check_divergence(const EvalContext& ctx, const Ciphertext& y,
                             std::size_t n_valid) {
  if (!ctx.params().debug_checks) return;
  const std::size_t n = std::min<std::size_t>(n_valid, y.size());
  for (std::size_t i = 0; i < n; ++i)
    if (!(std::abs(y.slots()[i]) <= 1e6))
      throw divergence("newton iterate exceeded the divergence guard");
}

/// The Newton loop shared by the Chebyshev-seeded and fixed-seed paths.
/// x_op already carries the iteration constant (operand * scale / n for
/// n >= 2, operand * scale for n = 1), so each iteration is
///   y <- ((n+1)/n) * y - x_op * y^(n+1)
/// with the product evaluated as a balanced tree: ceil(log2(n+2)) levels per
/// iteration instead of the n+2 a left-to-right chain would cost. When the
/// iterate runs out of budget it is refreshed at the iteration boundary.
inline Ciphertext newton_loop(EvalContext& ctx, const Ciphertext& x_op,
                              Ciphertext y, int n, int iters,
                              std::size_t n_valid) {
  const int per_iter = cheb_eval_depth(n + 1);  // ceil(log2(n+2))
  Ciphertext x = x_op;
  if (x.level() < per_iter && ctx.params().auto_bootstrap)
    x = ctx.bootstrap(x);
  for (int i = 0; i < iters; ++i) {
    if (y.level() < per_iter && ctx.params().auto_bootstrap)
      y = ctx.bootstrap(y);
    std::vector<Ciphertext> factors;
    factors.reserve(static_cast<std::size_t>(n) + 2);
    factors.push_back(x);
    for (int j = 0; j < n + 1; ++j) factors.push_back(y);
    while (factors.size() > 1) {
      std::vector<Ciphertext> next;
      next.reserve(factors.size() / 2 + 1);
      for (std::size_t k = 0; k + 1 < factors.size(); k += 2)
        next.push_back(ctx.mul_ct(factors[k], factors[k + 1]));
      if (factors.size() % 2 == 1) next.push_back(factors.back());
      factors = std::move(next);
    }
    Ciphertext linear = ctx.mul_pt(y, (n + 1.0) / n);
    y = ctx.sub_ct(linear, factors.front());
    check_divergence(ctx, y, n_valid);
  }
  return y;
}

inline void check_open_domain(const EvalContext& ctx, const Ciphertext& ct,
                              std::size_t n_valid, double lo, double hi,
                              const char* who) {
  if (!ctx.params().debug_checks) return;
  const std::size_t n = std::min<std::size_t>(n_valid, ct.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double t = ct.slots()[i];
    if (!(t > lo) || !(t <= hi))
      throw domain_violation(std::string(who) + ": scaled slot outside domain");
  }
}

}  // namespace detail

/// HE Newton refinement for x^(-1/n), following the reference recurrence
/// y <- ((n+1)/n) y - (x/n) y^(n+1). ct_x holds the unscaled operand; ct_y0
/// the initial approximation. Costs 1 plaintext and n+1 ciphertext
/// multiplications per iteration.
inline Ciphertext newton_refine(EvalContext& ctx, const Ciphertext& ct_x,
                                const Ciphertext& ct_y0, int n, int iters,
                                std::size_t n_valid = all_slots) {
  if (n < 1) throw error("newton_refine: n must be >= 1");
  Ciphertext x_op = n >= 2 ? ctx.mul_pt(ct_x, 1.0 / n) : ct_x;
  return detail::newton_loop(ctx, x_op, ct_y0, n, iters, n_valid);
}

/// Inverse square root of x from a ciphertext holding t = x/S, t in (0, 2].
/// Seeds Newton with a Chebyshev approximation of the scale-folded target
/// 1/(sqrt(S) sqrt(t+1)), bootstraps once after the seed, then refines. The
/// scale S is folded into the Newton constant (iterate
/// y <- 1.5 y - (S/2) t y^3), so undoing the input scaling costs no level.
/// Two bootstraps total under the defaults.
inline Ciphertext crypto_invsqrt(EvalContext& ctx, const Ciphertext& ct,
                                 double S, const InvRootConfig& cfg = {},
                                 std::size_t n_valid = all_slots);

/// Fixed-initial-value reference: Newton from y0 = 1 on a pre-scaled input
/// t = x/S in (0, 1], then the output is rescaled by 1/sqrt(S) to undo the
/// input scaling.
inline Ciphertext baseline_invsqrt(EvalContext& ctx, const Ciphertext& ct,
                                   double S, int iters = 21,
                                   std::size_t n_valid = all_slots) {
  detail::check_open_domain(ctx, ct, n_valid, 0.0, 1.0, "baseline_invsqrt");
  std::vector<double> ones(ctx.params().slot_count, 1.0);
  Ciphertext y = ctx.encrypt(ones);
  if (iters > 0) {
    Ciphertext x_op = ctx.mul_pt(ct, 0.5);  // pre-multiplication by 1/n, n = 2
    y = detail::newton_loop(ctx, x_op, std::move(y), 2, iters, n_valid);
  }
  return ctx.mul_pt(y, 1.0 / std::sqrt(S));
}

inline Ciphertext crypto_invsqrt(EvalContext& ctx, const Ciphertext& ct,
                                 double S, const InvRootConfig& cfg,
                                 std::size_t n_valid) {
  cfg.validate();
  if (S <= 0.0) throw error("crypto_invsqrt: scale must be positive");
  if (cfg.baseline_mode)
    return baseline_invsqrt(ctx, ct, S, cfg.effective_baseline_iters(),
                            n_valid);
  detail::check_open_domain(ctx, ct, n_valid, 0.0, 2.0, "crypto_invsqrt");
  ChebyshevSeries seed_series =
      fit([S](double t) {
        return scaled_target(ScaledTargetKind::InvSqrtShifted, S, t);
      }, cfg.cheb_degree);
  Ciphertext arg = ctx.add_pt(ct, -1.0);
  Ciphertext y = eval_encrypted(ctx, seed_series, arg);
  y = ctx.bootstrap(y);
  if (cfg.newton_iters > 0) {
    Ciphertext x_op = ctx.mul_pt(ct, S / 2.0);  // S and 1/n folded together
    y = detail::newton_loop(ctx, x_op, std::move(y), 2, cfg.newton_iters,
                            n_valid);
  }
  return y;
}

/// Inverse via squaring the inverse square root.
inline Ciphertext crypto_inv(EvalContext& ctx, const Ciphertext& ct, double S,
                             const InvRootConfig& cfg = {},
                             std::size_t n_valid = all_slots) {
  Ciphertext y = crypto_invsqrt(ctx, ct, S, cfg, n_valid);
  if (y.level() < 1 && ctx.params().auto_bootstrap) y = ctx.bootstrap(y);
  return ctx.mul_ct(y, y);
}

/// Square root of x from t = x/S, t in [0, 2], as a single Chebyshev
/// evaluation of the scaled target sqrt(S) sqrt(t+1). The target is smooth
/// on the closed domain, so no Newton refinement is applied.
inline Ciphertext crypto_sqrt(EvalContext& ctx, const Ciphertext& ct, double S,
                              int degree = 511,
                              std::size_t n_valid = all_slots) {
  if (S <= 0.0) throw error("crypto_sqrt: scale must be positive");
  if (ctx.params().debug_checks) {
    const std::size_t n = std::min<std::size_t>(n_valid, ct.size());
    for (std::size_t i = 0; i < n; ++i) {
      const double t = ct.slots()[i];
      if (t < -1e-9 || t > 2.0 + 1e-9)
        throw domain_violation("crypto_sqrt: scaled slot outside [0, 2]");
    }
  }
  ChebyshevSeries s = fit([S](double t) {
    return scaled_target(ScaledTargetKind::SqrtShifted, S, t);
  }, degree);
  return eval_encrypted(ctx, s, ctx.add_pt(ct, -1.0));
}

namespace detail {

/// T-basis coefficients of g3(x) = (35 x - 35 x^3 + 21 x^5 - 5 x^7) / 16,
/// exactly: 1225/1024 T1 - 245/1024 T3 + 49/1024 T5 - 5/1024 T7.
inline ChebyshevSeries g3_series() {
  ChebyshevSeries s;
  s.coeffs = {0.0, 1225.0 / 1024.0, 0.0, -245.0 / 1024.0,
              0.0, 49.0 / 1024.0,   0.0, -5.0 / 1024.0};
  return s;
}

/// Convert an odd power-basis polynomial to the Chebyshev basis. The
/// projection of a degree-d polynomial at d+1 nodes is exact, and the even
/// coefficients (zero for an odd polynomial) are zeroed explicitly so the
/// evaluation stays odd bit-for-bit.
inline ChebyshevSeries odd_poly_series(const std::vector<double>& power) {
  if (power.empty()) throw error("sign: empty component polynomial");
  for (std::size_t i = 0; i < power.size(); i += 2)
    if (power[i] != 0.0)
      throw error("sign: component polynomial must be odd");
  const int d = static_cast<int>(power.size()) - 1;
  ChebyshevSeries s = fit([&power](double x) {
    double acc = 0.0;
    for (std::size_t i = power.size(); i-- > 0;) acc = acc * x + power[i];
    return acc;
  }, d);
  for (std::size_t i = 0; i < s.coeffs.size(); i += 2) {
    if (std::abs(s.coeffs[i]) > 1e-9)
      throw error("sign: conversion produced a non-odd series");
    s.coeffs[i] = 0.0;
  }
  return s;
}

}  // namespace detail

/// Slot-wise sign approximation on [-1, 1] by repeated odd-polynomial
/// folding. The default is the 7-fold composition of the degree-7 g3; the
/// output is odd by construction and 0 maps to 0 exactly.
inline Ciphertext crypto_sign(EvalContext& ctx, const Ciphertext& ct,
                              const SignConfig& cfg = {}) {
  if (cfg.folds < 1) throw error("crypto_sign: folds must be >= 1");
  if (ctx.params().debug_checks) {
    for (double v : ct.slots())
      if (v < -1.0 - 1e-9 || v > 1.0 + 1e-9)
        throw domain_violation("crypto_sign: slot outside [-1, 1]");
  }
  std::vector<ChebyshevSeries> stages;
  if (cfg.mode == SignConfig::Mode::G3Composition) {
    stages.push_back(detail::g3_series());
  } else {
    if (cfg.custom_polys.empty())
      throw error("crypto_sign: custom mode needs component polynomials");
    for (const auto& p : cfg.custom_polys)
      stages.push_back(detail::odd_poly_series(p));
  }
  Ciphertext y = ct;
  for (int f = 0; f < cfg.folds; ++f)
    y = eval_encrypted(ctx, stages[f % stages.size()], y);
  return y;
}

}  // namespace hestat
