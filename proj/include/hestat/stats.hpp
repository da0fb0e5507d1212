/* Copyright (C) 2026 The hestat authors.
 * Licensed under the Apache License, Version 2.0; see the LICENSE file.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "hestat/column.hpp"
#include "hestat/errors.hpp"
#include "hestat/primitives.hpp"

namespace hestat {

/// Shared mean/variance intermediates. All moments are population moments
/// (normalized by n_valid). Decrypted ct_var must stay >= -1e-9.
struct MomentSet {
  Ciphertext ct_mu;   // mean at the caller's mean scale, replicated
  Ciphertext ct_var;  // variance at the caller's variance scale, replicated
  std::size_t n_valid = 0;
};

namespace detail {

inline void require_nonempty(const EncryptedColumn& col) {
  if (col.n_valid == 0 || col.chunks.empty())
    throw empty_column("statistic on an empty column");
}

/// Number of valid slots in chunk i.
inline std::size_t chunk_valid(const EvalContext& ctx,
                               const EncryptedColumn& col, std::size_t i) {
  const std::size_t sc = ctx.params().slot_count;
  const std::size_t off = i * sc;
  return off >= col.n_valid ? 0 : std::min(sc, col.n_valid - off);
}

/// Applies mul_pt(chunk, c) to every chunk, accumulates them slot-wise and
/// replicates the grand total in every slot. One level.
inline Ciphertext scaled_slot_sum(EvalContext& ctx, const EncryptedColumn& col,
                                  double c) {
  Ciphertext acc;
  for (std::size_t i = 0; i < col.chunks.size(); ++i) {
    Ciphertext term = ctx.mul_pt(col.chunks[i], c);
    acc = i == 0 ? std::move(term) : ctx.add_ct(acc, term);
  }
  // The cross-chunk accumulation is dense: every slot of acc is data, so the
  // rotate-and-add reduction runs with no padding requirement.
  return ctx.sum_all_slots(acc, ctx.params().slot_count);
}

/// X - mu per chunk. For the final, partially filled chunk the replicated
/// mean is masked to the valid prefix first so padding slots stay zero;
/// full chunks subtract the mean directly.
inline std::vector<Ciphertext> centered_chunks(EvalContext& ctx,
                                               const EncryptedColumn& col,
                                               const Ciphertext& mu,
                                               bool mask_padding) {
  const std::size_t sc = ctx.params().slot_count;
  std::vector<Ciphertext> out;
  out.reserve(col.chunks.size());
  for (std::size_t i = 0; i < col.chunks.size(); ++i) {
    const std::size_t valid = chunk_valid(ctx, col, i);
    if (mask_padding && valid < sc) {
      std::vector<double> mask(sc, 0.0);
      for (std::size_t k = 0; k < valid; ++k) mask[k] = 1.0;
      Ciphertext mu_masked = ctx.mul_pt(mu, mask);
      out.push_back(ctx.sub_ct(col.chunks[i], mu_masked));
    } else {
      out.push_back(ctx.sub_ct(col.chunks[i], mu));
    }
  }
  return out;
}

/// Mean over n_valid of already-transformed chunks whose padding is zero.
inline Ciphertext mean_of_chunks(EvalContext& ctx,
                                 const std::vector<Ciphertext>& chunks,
                                 std::size_t n_valid) {
  Ciphertext acc;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    Ciphertext term = ctx.mul_pt(chunks[i], 1.0 / static_cast<double>(n_valid));
    acc = i == 0 ? std::move(term) : ctx.add_ct(acc, term);
  }
  return ctx.sum_all_slots(acc, ctx.params().slot_count);
}

inline double replicated_value(const EvalContext& ctx, const Ciphertext& ct) {
  return ctx.decrypt(ct, 1)[0];
}

}  // namespace detail

/// Mean(x, B) = sum x_i / (B N): the 1/B pre-normalization folds into the
/// plaintext coefficient, so exactly one level is consumed.
inline Ciphertext mean_scaled(EvalContext& ctx, const EncryptedColumn& col,
                              double B) {
  detail::require_nonempty(col);
  if (B <= 0.0) throw error("mean_scaled: B must be positive");
  return detail::scaled_slot_sum(ctx, col,
                                 1.0 / (B * static_cast<double>(col.n_valid)));
}

/// Var(x)/S replicated in every slot, computed as
///   sum (x_i / sqrt(S N))^2 - (sum x_i / (N sqrt(S)))^2.
/// The scale folds into the two plaintext coefficients, so exactly two
/// levels are consumed before any inverse-root call. S is an explicit output
/// scale; every measure in this module passes S = B^2.
inline Ciphertext variance_to_scale(EvalContext& ctx,
                                    const EncryptedColumn& col, double S) {
  detail::require_nonempty(col);
  if (S <= 0.0) throw error("variance_to_scale: scale must be positive");
  const double n = static_cast<double>(col.n_valid);
  Ciphertext sq_sum;  // E[X^2]/S
  for (std::size_t i = 0; i < col.chunks.size(); ++i) {
    Ciphertext a = ctx.mul_pt(col.chunks[i], 1.0 / std::sqrt(S * n));
    Ciphertext sq = ctx.mul_ct(a, a);
    sq_sum = i == 0 ? std::move(sq) : ctx.add_ct(sq_sum, sq);
  }
  sq_sum = ctx.sum_all_slots(sq_sum, ctx.params().slot_count);
  Ciphertext mean_part =
      detail::scaled_slot_sum(ctx, col, 1.0 / (n * std::sqrt(S)));
  Ciphertext mean_sq = ctx.mul_ct(mean_part, mean_part);  // E[X]^2/S
  return ctx.sub_ct(sq_sum, mean_sq);
}

/// Variance(x, B) = Var(x)/B^2, the pre-normalized variance fed to the
/// inverse square root.
inline Ciphertext variance_scaled(EvalContext& ctx, const EncryptedColumn& col,
                                  double B) {
  if (B <= 0.0) throw error("variance_scaled: B must be positive");
  return variance_to_scale(ctx, col, B * B);
}

/// Unscaled mean and B^2-scaled variance, shared by the standardized
/// moments.
inline MomentSet moments(EvalContext& ctx, const EncryptedColumn& col,
                         double B) {
  MomentSet m;
  m.ct_mu = mean_scaled(ctx, col, 1.0);
  m.ct_var = variance_scaled(ctx, col, B);
  m.n_valid = col.n_valid;
  if (ctx.params().debug_checks &&
      detail::replicated_value(ctx, m.ct_var) < -1e-9)
    throw degenerate_variance("moments: negative scaled variance");
  return m;
}

/// Z-score normalization (X - mu) / sigma. The reciprocal standard deviation
/// comes from crypto_invsqrt on the B^2-scaled variance; two bootstraps
/// under the defaults.
inline EncryptedColumn znorm(EvalContext& ctx, const EncryptedColumn& col,
                             double B, const InvRootConfig& cfg = {}) {
  MomentSet m = moments(ctx, col, B);
  if (ctx.params().debug_checks &&
      detail::replicated_value(ctx, m.ct_var) * B * B < 1e-9)
    throw degenerate_variance("znorm: variance below 1e-9");
  Ciphertext inv_sigma = crypto_invsqrt(ctx, m.ct_var, B * B, cfg);
  EncryptedColumn out;
  out.n_valid = col.n_valid;
  out.name = col.name;
  for (const Ciphertext& chunk : col.chunks)
    out.chunks.push_back(ctx.mul_ct(ctx.sub_ct(chunk, m.ct_mu), inv_sigma));
  return out;
}

/// Fourth standardized moment E[(X-mu)^4] / Var^2 as the raw ratio;
/// subtracting 3 for excess kurtosis is a plaintext reporting step.
inline Ciphertext kurtosis(EvalContext& ctx, const EncryptedColumn& col,
                           double B, const InvRootConfig& cfg = {}) {
  MomentSet m = moments(ctx, col, B);
  if (ctx.params().debug_checks &&
      detail::replicated_value(ctx, m.ct_var) * B * B < 1e-9)
    throw degenerate_variance("kurtosis: variance below 1e-9");
  auto centered = detail::centered_chunks(ctx, col, m.ct_mu, true);
  std::vector<Ciphertext> fourth;
  fourth.reserve(centered.size());
  for (const Ciphertext& c : centered) {
    Ciphertext sq = ctx.mul_ct(c, c);
    fourth.push_back(ctx.mul_ct(sq, sq));
  }
  Ciphertext numerator = detail::mean_of_chunks(ctx, fourth, col.n_valid);
  Ciphertext inv = crypto_invsqrt(ctx, m.ct_var, B * B, cfg);
  Ciphertext inv2 = ctx.mul_ct(inv, inv);
  Ciphertext inv4 = ctx.mul_ct(inv2, inv2);
  return ctx.mul_ct(numerator, inv4);
}

/// Third standardized moment E[(X-mu)^3] / sigma^3; mirrors the kurtosis
/// pipeline with inv^3 = (inv^2) * inv.
inline Ciphertext skewness(EvalContext& ctx, const EncryptedColumn& col,
                           double B, const InvRootConfig& cfg = {}) {
  MomentSet m = moments(ctx, col, B);
  if (ctx.params().debug_checks &&
      detail::replicated_value(ctx, m.ct_var) * B * B < 1e-9)
    throw degenerate_variance("skewness: variance below 1e-9");
  auto centered = detail::centered_chunks(ctx, col, m.ct_mu, true);
  std::vector<Ciphertext> third;
  third.reserve(centered.size());
  for (const Ciphertext& c : centered) {
    Ciphertext sq = ctx.mul_ct(c, c);
    third.push_back(ctx.mul_ct(sq, c));
  }
  Ciphertext numerator = detail::mean_of_chunks(ctx, third, col.n_valid);
  Ciphertext inv = crypto_invsqrt(ctx, m.ct_var, B * B, cfg);
  Ciphertext inv2 = ctx.mul_ct(inv, inv);
  Ciphertext inv3 = ctx.mul_ct(inv2, inv);
  return ctx.mul_ct(numerator, inv3);
}

/// Coefficient of variation sigma/mu with the mean's sign extracted by the
/// composite sign function: cv = sigma * (1/|mu|) * sign(mu). The variance
/// keeps the B^2 output scale of the other measures, so crypto_sqrt with
/// scale B^2 returns sigma directly and the valid domain stays Var <= 2 B^2.
inline Ciphertext coeff_variation(EvalContext& ctx, const EncryptedColumn& col,
                                  double B, const SignConfig& sign_cfg = {},
                                  const InvRootConfig& cfg = {}) {
  detail::require_nonempty(col);
  Ciphertext mu_b = mean_scaled(ctx, col, B);
  if (ctx.params().debug_checks &&
      std::abs(detail::replicated_value(ctx, mu_b)) < 0.01)
    throw near_zero_mean("coeff_variation: |mean| < 0.01 B");
  Ciphertext sgn = crypto_sign(ctx, mu_b, sign_cfg);
  Ciphertext mu_pos = ctx.mul_ct(mu_b, sgn);
  Ciphertext inv_mu = crypto_inv(ctx, mu_pos, B, cfg);  // 1/|mu|
  Ciphertext var_b = variance_scaled(ctx, col, B);
  Ciphertext sigma = crypto_sqrt(ctx, var_b, B * B, cfg.cheb_degree);
  if (sigma.level() < 1 && ctx.params().auto_bootstrap)
    sigma = ctx.bootstrap(sigma);
  Ciphertext ratio = ctx.mul_ct(sigma, inv_mu);
  return ctx.mul_ct(ratio, sgn);
}

/// Pearson correlation Cov(X, Y) / (sigma_X sigma_Y). The covariance mean
/// uses the plaintext coefficient 1/N directly: the B^2 that would scale the
/// covariance cancels against the B^2 the two inverse roots would otherwise
/// have to undo, so both are folded away.
inline Ciphertext pearson(EvalContext& ctx, const EncryptedColumn& col_x,
                          const EncryptedColumn& col_y, double B,
                          const InvRootConfig& cfg = {}) {
  detail::require_nonempty(col_x);
  detail::require_nonempty(col_y);
  if (col_x.n_valid != col_y.n_valid)
    throw length_mismatch("pearson: columns differ in element count");
  MomentSet mx = moments(ctx, col_x, B);
  MomentSet my = moments(ctx, col_y, B);
  if (ctx.params().debug_checks) {
    if (detail::replicated_value(ctx, mx.ct_var) * B * B < 1e-9 ||
        detail::replicated_value(ctx, my.ct_var) * B * B < 1e-9)
      throw degenerate_variance("pearson: degenerate column variance");
  }
  Ciphertext inv_x = crypto_invsqrt(ctx, mx.ct_var, B * B, cfg);
  Ciphertext inv_y = crypto_invsqrt(ctx, my.ct_var, B * B, cfg);
  // Mask one centered factor so padding slots contribute zero to the sum.
  auto cx = detail::centered_chunks(ctx, col_x, mx.ct_mu, true);
  auto cy = detail::centered_chunks(ctx, col_y, my.ct_mu, false);
  std::vector<Ciphertext> prods;
  prods.reserve(cx.size());
  for (std::size_t i = 0; i < cx.size(); ++i)
    prods.push_back(ctx.mul_ct(cx[i], cy[i]));
  Ciphertext cov = detail::mean_of_chunks(ctx, prods, col_x.n_valid);
  Ciphertext r = ctx.mul_ct(cov, inv_x);
  return ctx.mul_ct(r, inv_y);
}

}  // namespace hestat
