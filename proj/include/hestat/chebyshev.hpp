/* Copyright (C) 2026 The hestat authors.
 * Licensed under the Apache License, Version 2.0; see the LICENSE file.
 */
#pragma once

#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <vector>

#include <json.hpp>

#include "hestat/ckks.hpp"
#include "hestat/errors.hpp"

namespace hestat {

/// A fitted Chebyshev expansion p(x) = sum_i coeffs[i] * T_i(x) over
/// [domain_lo, domain_hi]. Coefficients are stored plain-sum ready: fit()
/// already applies the halved-c0 convention, so no special casing is needed
/// at evaluation time.
struct ChebyshevSeries {
  std::vector<double> coeffs;
  double domain_lo = -1.0;
  double domain_hi = 1.0;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  bool native_domain() const { return domain_lo == -1.0 && domain_hi == 1.0; }
};

/// The two scaled targets used by the inverse-root primitives. The scale S
/// folds a pre-normalization constant into the approximated function itself:
///   InvSqrtShifted: t -> 1/(sqrt(S) * sqrt(t+1)) for t > -1, else 0
///   SqrtShifted:    t -> sqrt(S) * sqrt(t+1)     for t >= -1, else 0
enum class ScaledTargetKind { InvSqrtShifted, SqrtShifted };

inline double scaled_target(ScaledTargetKind kind, double S, double t) {
  switch (kind) {
    case ScaledTargetKind::InvSqrtShifted:
      return t > -1.0 ? 1.0 / (std::sqrt(S) * std::sqrt(t + 1.0)) : 0.0;
    case ScaledTargetKind::SqrtShifted:
      return t >= -1.0 ? std::sqrt(S) * std::sqrt(t + 1.0) : 0.0;
  }
  return 0.0;
}

/// Levels consumed by the encrypted evaluation of a degree-d series on the
/// native [-1, 1] domain.
inline int cheb_eval_depth(int degree) {
  if (degree <= 0) return 0;
  return static_cast<int>(std::bit_width(static_cast<unsigned>(degree)));
}

/// Fit a series of the given degree by discrete cosine projection over the
/// degree+1 first-kind Chebyshev nodes cos(pi (k+1/2)/(degree+1)). The nodes
/// are interior, so targets singular at an endpoint are sampled safely.
inline ChebyshevSeries fit(const std::function<double(double)>& target,
                           int degree, double domain_lo = -1.0,
                           double domain_hi = 1.0) {
  if (degree < 0) throw error("fit: degree must be >= 0");
  const int n = degree + 1;
  std::vector<double> theta(n), samples(n);
  for (int k = 0; k < n; ++k) {
    theta[k] = std::numbers::pi * (k + 0.5) / n;
    const double x = std::cos(theta[k]);
    const double arg = 0.5 * (domain_lo + domain_hi) +
                       0.5 * (domain_hi - domain_lo) * x;
    samples[k] = target(arg);
    if (!std::isfinite(samples[k]))
      throw non_finite_target("fit: target not finite at a Chebyshev node");
  }
  ChebyshevSeries s;
  s.domain_lo = domain_lo;
  s.domain_hi = domain_hi;
  s.coeffs.resize(n);
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += samples[k] * std::cos(j * theta[k]);
    s.coeffs[j] = 2.0 * acc / n;
  }
  s.coeffs[0] *= 0.5;
  return s;
}

/// Clenshaw evaluation; the reference oracle for the encrypted path.
/// Arguments outside the domain are evaluated anyway (the recurrence is
/// defined everywhere); *extrapolated is set when that happens.
inline double eval_plain(const ChebyshevSeries& s, double x,
                         bool* extrapolated = nullptr) {
  if (extrapolated)
    *extrapolated = (x < s.domain_lo || x > s.domain_hi);
  const double u = s.native_domain()
                       ? x
                       : (2.0 * x - (s.domain_lo + s.domain_hi)) /
                             (s.domain_hi - s.domain_lo);
  double b1 = 0.0, b2 = 0.0;
  for (int k = s.degree(); k >= 1; --k) {
    const double next = s.coeffs[k] + 2.0 * u * b1 - b2;
    b2 = b1;
    b1 = next;
  }
  return s.coeffs[0] + u * b1 - b2;
}

namespace detail {

/// Baby-step/giant-step evaluation in the Chebyshev basis. The polynomial is
/// split recursively as p = q * T_g + r at the giant steps g = 2^(K-1), ...,
/// down to linear baby polynomials in T_1, which keeps the level consumption
/// at exactly ceil(log2(degree+1)).
class ChebEncryptedEval {
 public:
  ChebEncryptedEval(EvalContext& ctx, const Ciphertext& x) : ctx_(ctx), x_(x) {}

  Ciphertext run(const std::vector<double>& coeffs) {
    const int d = static_cast<int>(coeffs.size()) - 1;
    if (d <= 0) {
      // Constant series: zero out the input, add the constant. Level-free.
      return ctx_.add_pt(ctx_.sub_ct(x_, x_), coeffs.empty() ? 0.0 : coeffs[0]);
    }
    build_powers(cheb_eval_depth(d));
    return eval(coeffs);
  }

 private:
  // T_2g = 2 T_g^2 - 1, with the doubling done by addition so each power of
  // two costs exactly one level.
  void build_powers(int depth) {
    int g = 1;
    while (2 * g < (1 << depth)) {
      const Ciphertext& tg = g == 1 ? x_ : powers_.at(g);
      Ciphertext sq = ctx_.mul_ct(tg, tg);
      powers_.emplace(2 * g, ctx_.add_pt(ctx_.add_ct(sq, sq), -1.0));
      g *= 2;
    }
  }

  Ciphertext eval(const std::vector<double>& c) {
    const int d = static_cast<int>(c.size()) - 1;
    if (d <= 1) {
      Ciphertext r = ctx_.mul_pt(x_, d == 1 ? c[1] : 0.0);
      return ctx_.add_pt(r, c[0]);
    }
    const int g = 1 << (cheb_eval_depth(d) - 1);
    // p = q * T_g + r with the product rule T_i T_g = (T_{i+g} + T_{g-i})/2.
    std::vector<double> q(static_cast<std::size_t>(d - g) + 1);
    q[0] = c[g];
    for (int j = 1; j <= d - g; ++j) q[j] = 2.0 * c[g + j];
    std::vector<double> r(c.begin(), c.begin() + g);
    for (int j = 1; j <= d - g; ++j) r[g - j] -= c[g + j];

    const Ciphertext& tg = powers_.at(g);
    Ciphertext head = q.size() == 1 ? ctx_.mul_pt(tg, q[0])
                                    : ctx_.mul_ct(eval(q), tg);
    return ctx_.add_ct(head, eval(r));
  }

  EvalContext& ctx_;
  const Ciphertext& x_;
  std::map<int, Ciphertext> powers_;
};

}  // namespace detail

/// Homomorphic evaluation of a series. Consumes exactly
/// cheb_eval_depth(degree) levels on the native [-1, 1] domain (one more
/// when a domain transform is required); bootstraps the input first when the
/// remaining budget is short and auto_bootstrap is on.
inline Ciphertext eval_encrypted(EvalContext& ctx, const ChebyshevSeries& s,
                                 const Ciphertext& ct) {
  if (s.coeffs.empty()) throw error("eval_encrypted: empty series");
  if (ctx.params().debug_checks) {
    const double eps = 1e-9;
    for (double v : ct.slots())
      if (v < s.domain_lo - eps || v > s.domain_hi + eps)
        throw domain_violation("eval_encrypted: slot outside series domain");
  }
  const int need = cheb_eval_depth(s.degree()) + (s.native_domain() ? 0 : 1);
  Ciphertext x = ct;
  if (x.level() < need && ctx.params().auto_bootstrap) x = ctx.bootstrap(x);
  if (!s.native_domain()) {
    const double span = s.domain_hi - s.domain_lo;
    x = ctx.add_pt(ctx.mul_pt(x, 2.0 / span),
                   -(s.domain_lo + s.domain_hi) / span);
  }
  return detail::ChebEncryptedEval(ctx, x).run(s.coeffs);
}

/// JSON round-trip for reproducibility: {degree, coeffs[], domain:[lo,hi]}.
inline nlohmann::json to_json(const ChebyshevSeries& s) {
  return nlohmann::json{{"degree", s.degree()},
                        {"coeffs", s.coeffs},
                        {"domain", {s.domain_lo, s.domain_hi}}};
}

inline ChebyshevSeries series_from_json(const nlohmann::json& j) {
  ChebyshevSeries s;
  s.coeffs = j.at("coeffs").get<std::vector<double>>();
  s.domain_lo = j.at("domain").at(0).get<double>();
  s.domain_hi = j.at("domain").at(1).get<double>();
  if (s.coeffs.empty()) throw error("series_from_json: empty coefficients");
  if (j.contains("degree") && j.at("degree").get<int>() != s.degree())
    throw error("series_from_json: degree field disagrees with coeffs");
  return s;
}

}  // namespace hestat
