/* Copyright (C) 2026 The hestat authors.
 * Licensed under the Apache License, Version 2.0; see the LICENSE file.
 */
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "hestat/chebyshev.hpp"

using namespace hestat;

namespace {

CkksParams eval_params(std::size_t slots = 64, bool quantize = false) {
  CkksParams p;
  p.slot_count = slots;
  p.max_level = 11;
  p.quantize = quantize;
  return p;
}

double tail_bound(const std::function<double(double)>& f, int degree,
                  int extra = 64) {
  ChebyshevSeries wide = fit(f, degree + extra);
  double acc = 0.0;
  for (std::size_t i = static_cast<std::size_t>(degree) + 1;
       i < wide.coeffs.size(); ++i)
    acc += std::abs(wide.coeffs[i]);
  return acc;
}

}  // namespace

TEST(Fit, RecoversLinearTarget) {
  ChebyshevSeries s = fit([](double x) { return x; }, 3);
  ASSERT_EQ(s.coeffs.size(), 4u);
  EXPECT_NEAR(s.coeffs[1], 1.0, 1e-12);
  EXPECT_NEAR(s.coeffs[0], 0.0, 1e-12);
  EXPECT_NEAR(s.coeffs[2], 0.0, 1e-12);
  EXPECT_NEAR(s.coeffs[3], 0.0, 1e-12);
}

TEST(Fit, RecoversSquareTarget) {
  // x^2 = (T0 + T2) / 2 with the halved-c0 convention applied at fit time.
  ChebyshevSeries s = fit([](double x) { return x * x; }, 2);
  EXPECT_NEAR(s.coeffs[0], 0.5, 1e-12);
  EXPECT_NEAR(s.coeffs[1], 0.0, 1e-12);
  EXPECT_NEAR(s.coeffs[2], 0.5, 1e-12);
}

TEST(Fit, ConstantTargetStoresPlainSumCoefficient) {
  // The raw projection of f = 1 is 2; the stored c0 is the halved value, so
  // a plain sum over coefficients evaluates to 1 everywhere.
  ChebyshevSeries s = fit([](double) { return 1.0; }, 5);
  EXPECT_NEAR(s.coeffs[0], 1.0, 1e-12);
  EXPECT_NEAR(eval_plain(s, 0.37), 1.0, 1e-12);
}

TEST(Fit, InvSqrtShiftedHitsScaledValueAtZero) {
  const double S = 100.0;
  auto target = [S](double t) {
    return scaled_target(ScaledTargetKind::InvSqrtShifted, S, t);
  };
  ChebyshevSeries s = fit(target, 511);
  const double bound = tail_bound(target, 511);
  EXPECT_NEAR(eval_plain(s, 0.0), 0.1, bound);  // 1/(10 sqrt(1)) = 0.1
}

TEST(Fit, RejectsNonFiniteTarget) {
  EXPECT_THROW(fit([](double x) { return std::sqrt(x); }, 8),
               non_finite_target);
}

TEST(EvalPlain, IdentitySeries) {
  ChebyshevSeries s = fit([](double x) { return x; }, 3);
  EXPECT_NEAR(eval_plain(s, 0.7), 0.7, 1e-13);
}

TEST(EvalPlain, ReproducesNodeSamples) {
  // Projection at n nodes interpolates the samples. The residual scales with
  // the sample magnitude, so the tolerance is relative for large targets.
  auto check = [](const std::function<double(double)>& f, int degree) {
    ChebyshevSeries s = fit(f, degree);
    const int n = degree + 1;
    for (int k = 0; k < n; k += std::max(1, n / 97)) {
      const double x = std::cos(std::numbers::pi * (k + 0.5) / n);
      const double want = f(x);
      EXPECT_NEAR(eval_plain(s, x), want,
                  1e-10 * std::max(1.0, std::abs(want)));
    }
  };
  check([](double x) { return std::exp(x); }, 63);
  check([](double x) { return std::cos(3.0 * x); }, 255);
  check([](double t) {
    return scaled_target(ScaledTargetKind::InvSqrtShifted, 100.0, t);
  }, 1023);
}

TEST(EvalPlain, FlagsExtrapolation) {
  ChebyshevSeries s = fit([](double x) { return x; }, 3);
  bool flag = false;
  eval_plain(s, 0.5, &flag);
  EXPECT_FALSE(flag);
  eval_plain(s, 1.5, &flag);
  EXPECT_TRUE(flag);
}

TEST(EvalPlain, MapsGeneralDomains) {
  ChebyshevSeries s = fit([](double x) { return x * x; }, 4, 0.0, 2.0);
  EXPECT_NEAR(eval_plain(s, 1.3), 1.69, 1e-10);
}

TEST(EvalEncrypted, Degree511ConsumesNineLevels) {
  EvalContext ctx(eval_params(8));
  ChebyshevSeries s = fit([S = 100.0](double t) {
    return scaled_target(ScaledTargetKind::InvSqrtShifted, S, t);
  }, 511);
  auto ct = ctx.encrypt(std::vector<double>{-0.5, 0.0, 0.25});
  auto r = eval_encrypted(ctx, s, ct);
  EXPECT_EQ(ct.level() - r.level(), 9);
  EXPECT_EQ(ctx.meter().bootstrap, 0u);
}

TEST(EvalEncrypted, IdentitySeriesReturnsInputSlots) {
  EvalContext ctx(eval_params(8));
  ChebyshevSeries s = fit([](double x) { return x; }, 1);
  std::vector<double> v = {-0.9, -0.1, 0.0, 0.3, 0.99};
  auto r = eval_encrypted(ctx, s, ctx.encrypt(v));
  auto got = ctx.decrypt(r, v.size());
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(got[i], v[i], 1e-12);
}

TEST(EvalEncrypted, MatchesPlainOracleOnRandomDegree31) {
  EvalContext ctx(eval_params(64));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coeff(-1, 1), arg(-1, 1);
  ChebyshevSeries s;
  s.coeffs.resize(32);
  for (auto& c : s.coeffs) c = coeff(rng);
  std::vector<double> v(64);
  for (auto& x : v) x = arg(rng);
  auto got = ctx.decrypt(eval_encrypted(ctx, s, ctx.encrypt(v)), 64);
  for (std::size_t i = 0; i < v.size(); ++i)
    EXPECT_NEAR(got[i], eval_plain(s, v[i]), 1e-9);
}

TEST(EvalEncrypted, ConstantSeriesIsLevelFree) {
  EvalContext ctx(eval_params(8));
  ChebyshevSeries s;
  s.coeffs = {2.5};
  auto ct = ctx.encrypt(std::vector<double>{0.1, -0.4});
  auto r = eval_encrypted(ctx, s, ct);
  EXPECT_EQ(r.level(), ct.level());
  EXPECT_EQ(ctx.decrypt(r, 2), (std::vector<double>{2.5, 2.5}));
}

TEST(EvalEncrypted, AutoBootstrapsShortInputs) {
  CkksParams p = eval_params(8);
  EvalContext ctx(p);
  ChebyshevSeries s = fit([](double x) { return std::exp(x); }, 255);
  auto ct = ctx.encrypt(std::vector<double>{0.5});
  while (ct.level() > 3) ct = ctx.mul_pt(ct, 1.0);
  auto r = eval_encrypted(ctx, s, ct);  // needs 8 levels, has 3
  EXPECT_EQ(ctx.meter().bootstrap, 1u);
  EXPECT_NEAR(ctx.decrypt(r, 1)[0], std::exp(0.5), 1e-9);
}

TEST(EvalEncrypted, GeneralDomainCostsOneExtraLevel) {
  EvalContext ctx(eval_params(8));
  ChebyshevSeries s = fit([](double x) { return std::exp(x); }, 15, 0.0, 2.0);
  auto ct = ctx.encrypt(std::vector<double>{0.4, 1.9});
  auto r = eval_encrypted(ctx, s, ct);
  EXPECT_EQ(ct.level() - r.level(), cheb_eval_depth(15) + 1);
  auto got = ctx.decrypt(r, 2);
  EXPECT_NEAR(got[0], std::exp(0.4), 1e-9);
  EXPECT_NEAR(got[1], std::exp(1.9), 1e-9);
}

TEST(EvalEncrypted, DebugModeRejectsOutOfDomainSlots) {
  CkksParams p = eval_params(8);
  p.debug_checks = true;
  EvalContext ctx(p);
  ChebyshevSeries s = fit([](double x) { return x; }, 3);
  EXPECT_THROW(eval_encrypted(ctx, s, ctx.encrypt(std::vector<double>{1.5})),
               domain_violation);
}

// ---------------------------------------------------------------------------
// Properties.
// ---------------------------------------------------------------------------

TEST(Properties, DepthLawAcrossDegrees) {
  for (int degree : {1, 2, 3, 5, 7, 15, 63, 100, 255, 511}) {
    EvalContext ctx(eval_params(8));
    ChebyshevSeries s = fit([](double x) { return std::exp(x); }, degree);
    auto ct = ctx.encrypt(std::vector<double>{0.33});
    auto r = eval_encrypted(ctx, s, ct);
    EXPECT_EQ(ct.level() - r.level(), cheb_eval_depth(degree))
        << "degree " << degree;
  }
}

TEST(Properties, EncryptedAgreesWithPlainUpToDegree1023) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> arg(-1, 1);
  for (int degree : {15, 127, 1023}) {
    EvalContext ctx(eval_params(16));
    ChebyshevSeries s = fit([](double x) { return 1.0 / (2.0 + x); }, degree);
    std::vector<double> v(16);
    for (auto& x : v) x = arg(rng);
    auto got = ctx.decrypt(eval_encrypted(ctx, s, ctx.encrypt(v)), 16);
    for (std::size_t i = 0; i < v.size(); ++i)
      EXPECT_NEAR(got[i], eval_plain(s, v[i]), 5e-12 * (degree + 1))
          << "degree " << degree;
  }
}

TEST(Properties, QuantizedEvalStaysWithinDegreeScaledBound) {
  for (int degree : {63, 511}) {
    CkksParams p = eval_params(16, true);
    EvalContext ctx(p);
    ChebyshevSeries s = fit([](double x) { return std::cos(2 * x); }, degree);
    std::vector<double> v = {-0.8, -0.25, 0.0, 0.4, 0.9};
    auto got = ctx.decrypt(eval_encrypted(ctx, s, ctx.encrypt(v)), v.size());
    const double bound = degree * std::ldexp(1.0, -(40 - 6));
    for (std::size_t i = 0; i < v.size(); ++i)
      EXPECT_NEAR(got[i], eval_plain(s, v[i]), bound);
  }
}

TEST(Properties, TailBoundCoversRestrictedDomainError) {
  // Verified for x_min/S >= 1e-4. Closer to the singularity the true
  // coefficient tail decays too slowly for a 64-term partial sum to bound
  // the pointwise error.
  const double S = 100.0;
  auto target = [S](double t) {
    return scaled_target(ScaledTargetKind::InvSqrtShifted, S, t);
  };
  ChebyshevSeries s = fit(target, 511);
  const double bound = tail_bound(target, 511);
  const double lo = 2.0 * 1e-4 - 1.0;
  double worst = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double t = lo + (1.0 - lo) * i / 20000.0;
    worst = std::max(worst, std::abs(eval_plain(s, t) - target(t)));
  }
  EXPECT_LE(worst, bound);
}

TEST(Properties, FitIsLinear) {
  auto f = [](double x) { return std::exp(x); };
  auto g = [](double x) { return std::cos(3.0 * x); };
  const double a = 2.5, b = -1.25;
  ChebyshevSeries lhs = fit([&](double x) { return a * f(x) + b * g(x); }, 40);
  ChebyshevSeries fa = fit(f, 40), gb = fit(g, 40);
  for (std::size_t i = 0; i < lhs.coeffs.size(); ++i)
    EXPECT_NEAR(lhs.coeffs[i], a * fa.coeffs[i] + b * gb.coeffs[i], 1e-12);
}

TEST(SeriesJson, RoundTrips) {
  ChebyshevSeries s = fit([](double x) { return std::exp(x); }, 12, -1.0, 1.0);
  nlohmann::json j = to_json(s);
  EXPECT_EQ(j.at("degree").get<int>(), 12);
  ChebyshevSeries back = series_from_json(j);
  EXPECT_EQ(back.coeffs, s.coeffs);
  EXPECT_EQ(back.domain_lo, s.domain_lo);
  EXPECT_EQ(back.domain_hi, s.domain_hi);
}
