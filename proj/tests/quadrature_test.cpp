#include <cmath>

#include <gtest/gtest.h>

#include "mongelab/field.hpp"
#include "mongelab/quadrature.hpp"

namespace mongelab {
namespace {

TEST(IntegrateRegion, ConstantIntegrandsAreExact) {
  auto one = [](const Vector&) { return 1.0; };
  IntegralEstimate ball = integrate_region(one, Domain::ball(3, 1.0), 5000, 1, "const");
  EXPECT_NEAR(ball.value, 4.0 * M_PI / 3.0, 1e-12);
  EXPECT_NEAR(ball.stderr_, 0.0, 1e-12);

  IntegralEstimate ann = integrate_region(one, Domain::annulus(2, 1.0, 2.0), 5000, 1, "const");
  EXPECT_NEAR(ann.value, 3.0 * M_PI, 1e-12);
  EXPECT_NEAR(ann.cutoff_radius, 1.0, 1e-15);
}

TEST(IntegrateRegion, ConstantLaplacianMassesOnPlaneAnnulus) {
  Field bowl = builtin::paraboloid(2, 3.0);
  Field sq = builtin::squared_norm(2, 3.0);
  auto lap = [](const Field& f) {
    return [&f](const Vector& x) { return f.jet(x).laplacian(); };
  };
  IntegralEstimate a = integrate_region(lap(bowl), Domain::annulus(2, 1.0, 2.0), 4000, 3, "lap");
  IntegralEstimate b = integrate_region(lap(sq), Domain::annulus(2, 1.0, 2.0), 4000, 3, "lap");
  EXPECT_NEAR(a.value, 6.0 * M_PI, 1e-10);
  EXPECT_NEAR(b.value, 12.0 * M_PI, 1e-10);
}

TEST(IntegrateRegion, RadialPowerOnShell) {
  auto g = [](const Vector& x) { return std::pow(x.norm(), -3.0); };
  IntegralEstimate est =
      integrate_region(g, Domain::annulus(3, 0.5, 1.0), 60000, 7, "radialpow");
  const double truth = 4.0 * M_PI * std::log(2.0);
  EXPECT_NEAR(est.value, truth, 4.0 * est.stderr_ + 1e-9);
  EXPECT_NEAR(est.value, truth, 0.01 * truth);
  EXPECT_GT(est.stderr_, 0.0);
  EXPECT_LT(est.relative_stderr(), 0.01);
}

TEST(IntegrateRegion, DeterministicForFixedSeedAndLabel) {
  auto g = [](const Vector& x) { return std::cos(x[0]) + x.squaredNorm(); };
  IntegralEstimate a = integrate_region(g, Domain::ball(2, 1.0), 20000, 99, "det");
  IntegralEstimate b = integrate_region(g, Domain::ball(2, 1.0), 20000, 99, "det");
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.stderr_, b.stderr_);
  IntegralEstimate c = integrate_region(g, Domain::ball(2, 1.0), 20000, 100, "det");
  EXPECT_NE(a.value, c.value);
}

TEST(IntegrateRegion, GuardsBudgetAndNonFiniteSamples) {
  auto one = [](const Vector&) { return 1.0; };
  EXPECT_THROW(integrate_region(one, Domain::ball(2, 1.0), 8, 1, "tiny"), QuadratureError);
  auto half_nan = [](const Vector& x) {
    return x[0] > 0 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
  };
  EXPECT_THROW(integrate_region(half_nan, Domain::ball(2, 1.0), 5000, 1, "nan"),
               QuadratureError);
}

TEST(DyadicProfile, ExactFlatnessAtTheCriticalScalingPower) {
  // (Delta |x|^{4/3})^{4.5} ~ r^{-3} in d = 3: every dyadic annulus carries
  // the same mass, and the shared sample shapes make the bins agree to
  // rounding rather than to Monte Carlo accuracy.
  Field f = builtin::power_norm(3, 4.0 / 3.0);
  AnnulusScheme scheme;
  scheme.r_outer = 1.0;
  scheme.annuli = 6;
  scheme.budget = 20000;
  scheme.seed = 20260823;
  AnnulusProfile prof = dyadic_annulus_profile(f, DerivedQuantity::Laplacian, 4.5, scheme);
  ASSERT_EQ(prof.usable(), 6);
  const double c = std::pow(28.0 / 9.0, 4.5);
  const double truth = c * 4.0 * M_PI * std::log(2.0);
  double cumulative = 0.0;
  for (const auto& bin : prof.bins) {
    ASSERT_FALSE(bin.dropped);
    EXPECT_NEAR(bin.mass, prof.bins[0].mass, 1e-9 * prof.bins[0].mass);
    EXPECT_NEAR(bin.mass, truth, 4.0 * bin.stderr_ + 1e-9);
    EXPECT_NEAR(bin.mass, truth, 0.02 * truth);
    cumulative += bin.mass;
    EXPECT_NEAR(bin.cumulative, cumulative, 1e-12 * cumulative);
    EXPECT_NEAR(bin.r_inner, 0.5 * bin.r_outer, 1e-15);
  }
  EXPECT_EQ(prof.quantity, "laplacian");
}

TEST(DyadicProfile, PointwiseOracleForTheCriticalLaplacian) {
  Field f = builtin::power_norm(3, 4.0 / 3.0);
  Vector x(3);
  x << 0.5, 0.0, 0.0;
  EXPECT_NEAR(derived_quantity(f, DerivedQuantity::Laplacian, x),
              (28.0 / 9.0) * std::pow(2.0, 2.0 / 3.0), 1e-12);
  x << 0.3, -0.2, 0.1;
  double r = x.norm();
  EXPECT_NEAR(derived_quantity(f, DerivedQuantity::Laplacian, x),
              (28.0 / 9.0) * std::pow(r, -2.0 / 3.0), 1e-12);
}

TEST(DyadicProfile, BinsInsideTheExcisionTubeAreDropped) {
  Field f = builtin::paraboloid(3);
  AnnulusScheme scheme;
  scheme.r_outer = 1e-3;
  scheme.annuli = 10;
  scheme.budget = 2000;
  scheme.seed = 5;
  AnnulusProfile prof = dyadic_annulus_profile(f, DerivedQuantity::Laplacian, 2.0, scheme);
  ASSERT_EQ(static_cast<int>(prof.bins.size()), 10);
  EXPECT_EQ(prof.usable(), 6);
  for (const auto& bin : prof.bins) EXPECT_EQ(bin.dropped, bin.r_inner < kExcisionRadius);
}

TEST(DyadicProfile, ProductDomainsGetAnnuliInTheFirstFactorOnly) {
  // Constant-Hessian field on B^2 x B^1: masses scale exactly with the
  // annulus area, i.e. decay by 4 per dyadic step.
  auto value = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  auto jet = [](const Vector& x) {
    Jet2 j;
    j.value = 0.5 * x.squaredNorm();
    j.grad = x;
    j.hess = Matrix::Identity(x.size(), x.size());
    return j;
  };
  Field f = Field::analytic("product_bowl", Domain::product_of_balls(2, 1.0, 1, 0.5), value, jet);
  AnnulusScheme scheme;
  scheme.r_outer = 0.5;
  scheme.annuli = 5;
  scheme.budget = 4000;
  scheme.seed = 11;
  AnnulusProfile prof = dyadic_annulus_profile(f, DerivedQuantity::HessFrobenius, 1.0, scheme);
  ASSERT_EQ(prof.usable(), 5);
  const double frob = std::sqrt(3.0);
  for (const auto& bin : prof.bins) {
    double area = M_PI * (bin.r_outer * bin.r_outer - bin.r_inner * bin.r_inner);
    EXPECT_NEAR(bin.mass, frob * area * 1.0, 1e-10 * bin.mass);
  }
  for (std::size_t j = 1; j < prof.bins.size(); ++j)
    EXPECT_NEAR(prof.bins[j].mass / prof.bins[j - 1].mass, 0.25, 1e-10);
}

TEST(SphereSup, ExactOnSymmetricAndLinearFields) {
  SphereSup bowl = sphere_sup(builtin::paraboloid(3), 1.0, 256, 2, 13);
  EXPECT_NEAR(bowl.value, 0.5, 1e-12);
  EXPECT_NEAR(bowl.argmax.norm(), 1.0, 1e-9);

  Vector a(2);
  a << 0.6, 0.8;
  SphereSup lin = sphere_sup(builtin::linear(a, 0.1), 1.0, 512, 3, 13);
  EXPECT_NEAR(lin.value, 1.1, 1e-4);
  EXPECT_NEAR((lin.argmax - a).norm(), 0.0, 0.05);
}

TEST(SphereSup, SubspaceSpheresWithFrozenComplement) {
  Vector complement(1);
  complement << 0.5;
  SphereSup s = sphere_sup(builtin::paraboloid(3), 1.0, 256, 2, 17, 2, complement);
  EXPECT_NEAR(s.value, 0.5 * (1.0 + 0.25), 1e-12);
  EXPECT_THROW(sphere_sup(builtin::paraboloid(3), 1.0, 64, 1, 17, 2, Vector()),
               std::invalid_argument);
}

}  // namespace
}  // namespace mongelab
