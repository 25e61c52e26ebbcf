#include <cmath>

#include <gtest/gtest.h>

#include "mongelab/norms.hpp"
#include "mongelab/pogorelov.hpp"

namespace mongelab {
namespace {

TEST(CriticalExponents, RationalValues) {
  CriticalExponents real31 = critical_exponent(Field::Setting::Real, 3, 1);
  EXPECT_DOUBLE_EQ(real31.p_crit.value(), 3.0);
  EXPECT_DOUBLE_EQ(real31.holder_q.value(), 4.0 / 3.0);

  CriticalExponents real52 = critical_exponent(Field::Setting::Real, 5, 2);
  EXPECT_DOUBLE_EQ(real52.p_crit.value(), 15.0 / 4.0);
  EXPECT_DOUBLE_EQ(real52.holder_q.value(), 6.0 / 5.0);

  CriticalExponents cplx21 = critical_exponent(Field::Setting::Complex, 2, 1);
  EXPECT_DOUBLE_EQ(cplx21.p_crit.value(), 2.0);
  EXPECT_DOUBLE_EQ(cplx21.holder_q.value(), 1.0);

  CriticalExponents cplx31 = critical_exponent(Field::Setting::Complex, 3, 1);
  EXPECT_DOUBLE_EQ(cplx31.p_crit.value(), 6.0);
  EXPECT_DOUBLE_EQ(cplx31.holder_q.value(), 4.0 / 3.0);
}

TEST(CriticalExponents, DimensionPreconditions) {
  EXPECT_THROW(critical_exponent(Field::Setting::Real, 4, 2), std::invalid_argument);
  EXPECT_THROW(critical_exponent(Field::Setting::Real, 3, 0), std::invalid_argument);
  EXPECT_THROW(critical_exponent(Field::Setting::Complex, 3, 3), std::invalid_argument);
  EXPECT_NO_THROW(critical_exponent(Field::Setting::Complex, 3, 2));
}

TEST(OrliczGauge, PowerAndPowerLogEvaluation) {
  OrliczGauge cube = OrliczGauge::power(3.0);
  EXPECT_TRUE(cube.pure_power());
  EXPECT_DOUBLE_EQ(cube(2.0), 8.0);
  EXPECT_DOUBLE_EQ(cube(0.0), 0.0);
  EXPECT_DOUBLE_EQ(cube(-1.0), 0.0);

  OrliczGauge pl = OrliczGauge::power_log(3.0, 1.0);
  EXPECT_FALSE(pl.pure_power());
  // Continuous and C^1 across the splice at t = e.
  double e = M_E;
  EXPECT_NEAR(pl(e), std::pow(e, 3.0), 1e-12);
  double below = (pl(e) - pl(e - 1e-6)) / 1e-6;
  double above = (pl(e + 1e-6) - pl(e)) / 1e-6;
  EXPECT_NEAR(below, above, 1e-4);
  // Above the splice: t^m (log t)^{-s}.
  EXPECT_NEAR(pl(10.0), 1000.0 / std::log(10.0), 1e-12);
}

TEST(OrliczGauge, TangentParabolaClampsAtZero) {
  // m - s > 2 makes the parabola dip below zero near the origin; the gauge
  // clamps it so it stays a gauge.
  OrliczGauge g = OrliczGauge::power_log(4.0, 1.0);
  EXPECT_DOUBLE_EQ(g(1.0), 0.0);
  EXPECT_GT(g(M_E), 0.0);
}

TEST(OrliczGauge, ConvexityCertificates) {
  EXPECT_TRUE(OrliczGauge::power(3.0).convexity_certified());
  EXPECT_TRUE(OrliczGauge::power(1.0).convexity_certified());
  EXPECT_FALSE(OrliczGauge::power(0.5).convexity_certified());
  EXPECT_TRUE(OrliczGauge::power_log(3.0, 1.0).convexity_certified());
  EXPECT_TRUE(OrliczGauge::power_log(3.0, 2.0).convexity_certified());
  EXPECT_FALSE(OrliczGauge::power_log(2.0, 1.5).convexity_certified());  // m - s < 1
}

TEST(OrliczDivergence, TruthTableAtTheRealCriticalExponent) {
  // Critical tail integral for Real (3,1) where p_crit = 3: diverges iff
  // m > 3, or m = 3 with s <= 1.
  auto verdict = [](const OrliczGauge& g) {
    return orlicz_divergence_test(g, Field::Setting::Real, 3, 1);
  };
  EXPECT_EQ(verdict(OrliczGauge::power(3.5)), OrliczVerdict::Diverges);
  EXPECT_EQ(verdict(OrliczGauge::power(3.0)), OrliczVerdict::Diverges);
  EXPECT_EQ(verdict(OrliczGauge::power(2.5)), OrliczVerdict::Converges);
  EXPECT_EQ(verdict(OrliczGauge::power_log(3.0, 0.5)), OrliczVerdict::Diverges);
  EXPECT_EQ(verdict(OrliczGauge::power_log(3.0, 1.0)), OrliczVerdict::Diverges);
  EXPECT_EQ(verdict(OrliczGauge::power_log(3.0, 1.5)), OrliczVerdict::Converges);
  EXPECT_EQ(verdict(OrliczGauge::power_log(3.2, 5.0)), OrliczVerdict::Diverges);
  EXPECT_EQ(verdict(OrliczGauge::power_log(2.9, -3.0)), OrliczVerdict::Converges);

  EXPECT_EQ(orlicz_divergence_test(OrliczGauge::power(2.0), Field::Setting::Complex, 2, 1),
            OrliczVerdict::Diverges);
  EXPECT_EQ(orlicz_divergence_test(OrliczGauge::power_log(2.0, 2.0), Field::Setting::Complex,
                                   2, 1),
            OrliczVerdict::Converges);
}

TEST(Luxemburg, PurePowerGaugeReproducesTheLpNorm) {
  // || Delta |x|^{4/3} ||_{L^3} over 0.01 < |x| < 1 has the closed form
  // (28/9) (4 pi 0.99)^{1/3}.
  Field f = builtin::power_norm(3, 4.0 / 3.0);
  auto g = [&f](const Vector& x) { return std::abs(f.jet(x).laplacian()); };
  Domain dom = Domain::annulus(3, 0.01, 1.0);
  const int budget = 200000;
  double lux = luxemburg_norm(g, dom, OrliczGauge::power(3.0), budget, 2026);
  double lp = sampled_lp_norm(g, dom, 3.0, budget, 2026);
  EXPECT_NEAR(lux, lp, 2e-6 * lp);  // same cached samples, bisection tolerance only
  const double closed = (28.0 / 9.0) * std::cbrt(4.0 * M_PI * 0.99);
  EXPECT_NEAR(lp, closed, 0.01 * closed);
}

TEST(Luxemburg, HomogeneityAndZeroFunction) {
  auto g = [](const Vector& x) { return x.squaredNorm(); };
  Domain dom = Domain::ball(2, 1.0);
  double n1 = luxemburg_norm(g, dom, OrliczGauge::power(2.0), 20000, 5);
  auto g3 = [](const Vector& x) { return 3.0 * x.squaredNorm(); };
  double n3 = luxemburg_norm(g3, dom, OrliczGauge::power(2.0), 20000, 5);
  EXPECT_NEAR(n3, 3.0 * n1, 1e-5 * n3);  // Luxemburg norms are 1-homogeneous

  auto zero = [](const Vector&) { return 0.0; };
  EXPECT_DOUBLE_EQ(luxemburg_norm(zero, dom, OrliczGauge::power(2.0), 1000, 5), 0.0);
}

TEST(Luxemburg, PowerLogGaugeStaysOrderedAboveTheSplice) {
  // On a domain small enough that the modular balances above t = e, the
  // (log t)^{-1} factor shrinks the gauge, so the Luxemburg norm shrinks too.
  auto g = [](const Vector& x) { return 5.0 + x[0]; };
  Domain dom = Domain::ball(2, 0.1);
  double pure = luxemburg_norm(g, dom, OrliczGauge::power(3.0), 20000, 7);
  double weakened = luxemburg_norm(g, dom, OrliczGauge::power_log(3.0, 1.0), 20000, 7);
  EXPECT_GT(pure, 0.0);
  // Check the balance point really sits above the splice, then the ordering.
  EXPECT_GT(5.0 / pure, M_E);
  EXPECT_LT(weakened, pure);
}

TEST(Scaling, RealRescalingIsExactForPurePowers) {
  Field w = builtin::power_norm(3, 4.0 / 3.0);
  ScalingCheck chk = scaling_invariance_real(w, 4.0 / 3.0, 3.0, {0.5, 0.25, 0.125}, 20000, 9);
  EXPECT_EQ(chk.direct.size(), 3u);
  EXPECT_LT(chk.max_rel_deviation, 1e-10);
  for (double v : chk.direct) EXPECT_GT(v, 0.0);
}

TEST(Scaling, ComplexRescalingIsExactForTheHomogeneousExample) {
  ExampleSpec spec;
  spec.setting = Field::Setting::Complex;
  spec.n = 2;
  spec.k = 1;
  spec.family = ExampleSpec::Family::PowerTimesQuadratic;
  Field u = build_complex_example(spec);
  ScalingCheck chk = scaling_invariance_complex(u, 2, 1, {0.4, 0.2, 0.1}, 10000, 9);
  EXPECT_LT(chk.max_rel_deviation, 1e-10);
}

TEST(Scaling, RescaledFieldIsPointwiseIdenticalForHomogeneousInput) {
  Field w = builtin::power_norm(3, 4.0 / 3.0);
  Field wr = rescale_field(w, 0.5, 4.0 / 3.0);
  Vector x(3);
  x << 0.4, -0.2, 0.6;
  EXPECT_NEAR(wr.raw(x), w.raw(x), 1e-12);
  EXPECT_NEAR((wr.jet(x).hess - w.jet(x).hess).norm(), 0.0, 1e-10);
}

AnnulusProfile synthetic_profile(const std::vector<double>& masses, double rel_stderr) {
  AnnulusProfile prof;
  prof.field_name = "synthetic";
  prof.quantity = "laplacian";
  prof.power = 3.0;
  double cumulative = 0.0;
  for (std::size_t j = 0; j < masses.size(); ++j) {
    AnnulusBin bin;
    bin.j = static_cast<int>(j);
    bin.r_outer = std::pow(2.0, -static_cast<double>(j));
    bin.r_inner = 0.5 * bin.r_outer;
    bin.mass = masses[j];
    bin.stderr_ = rel_stderr * masses[j];
    cumulative += masses[j];
    bin.cumulative = cumulative;
    prof.bins.push_back(bin);
  }
  return prof;
}

TEST(Classification, FlatMassesAreLogDivergent) {
  AnnulusProfile prof = synthetic_profile({1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0}, 0.0);
  MembershipReport rep = classify_membership(prof);
  EXPECT_EQ(rep.verdict, Membership::Divergent);
  EXPECT_EQ(rep.log_fit.verdict, "log-divergent");
  EXPECT_NEAR(rep.log_fit.slope, 1.0 / std::log(2.0), 1e-9);
  EXPECT_NEAR(rep.log_fit.mass_flatness, 0.0, 1e-12);
  EXPECT_NEAR(rep.per_annulus_ratio, 1.0, 1e-9);
}

TEST(Classification, GeometricDecayIsFinite) {
  std::vector<double> masses;
  for (int j = 0; j < 8; ++j) masses.push_back(std::pow(2.0, -0.5 * j));
  MembershipReport rep = classify_membership(synthetic_profile(masses, 0.0));
  EXPECT_EQ(rep.verdict, Membership::Finite);
  EXPECT_NEAR(rep.decay_exponent, 0.5, 1e-9);
  EXPECT_NEAR(rep.per_annulus_ratio, std::pow(2.0, -0.5), 1e-9);
  EXPECT_EQ(rep.log_fit.verdict, "not-log-divergent");
}

TEST(Classification, GrowingMassesAreDivergent) {
  std::vector<double> masses;
  for (int j = 0; j < 8; ++j) masses.push_back(std::pow(2.0, 0.4 * j));
  MembershipReport rep = classify_membership(synthetic_profile(masses, 0.0));
  EXPECT_EQ(rep.verdict, Membership::Divergent);
  EXPECT_LT(rep.decay_exponent, 0.0);
}

TEST(Classification, NoisyAlternationIsInconclusive) {
  MembershipReport rep = classify_membership(
      synthetic_profile({1.0, 1.3, 0.7, 1.25, 0.75, 1.2, 0.8}, 0.01));
  EXPECT_EQ(rep.verdict, Membership::Inconclusive);
  EXPECT_GT(rep.log_fit.mass_flatness, 0.10);
}

TEST(Classification, GuardsOnProfileQuality) {
  EXPECT_THROW(classify_membership(synthetic_profile({1.0, 1.0, 1.0}, 0.0)), QuadratureError);
  EXPECT_THROW(log_divergence_fit(synthetic_profile({1.0, 1.0, 1.0, 1.0, 1.0}, 0.2)),
               QuadratureError);
}

TEST(Membership, NamesForReports) {
  EXPECT_EQ(membership_name(Membership::Finite), "finite");
  EXPECT_EQ(membership_name(Membership::Divergent), "divergent");
  EXPECT_EQ(membership_name(Membership::Inconclusive), "inconclusive");
}

}  // namespace
}  // namespace mongelab
