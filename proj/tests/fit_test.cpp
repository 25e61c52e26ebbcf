#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "mongelab/fit.hpp"
#include "mongelab/rng.hpp"

namespace mongelab {
namespace {

TEST(FitLine, ExactRecoveryOnNoiselessData) {
  std::vector<double> xs, ys;
  for (int i = 0; i < 10; ++i) {
    xs.push_back(0.3 * i - 1.0);
    ys.push_back(2.0 * xs.back() + 1.0);
  }
  LineFit fit = fit_line(xs, ys);
  EXPECT_NEAR(fit.slope, 2.0, 1e-12);
  EXPECT_NEAR(fit.intercept, 1.0, 1e-12);
  EXPECT_NEAR(fit.r2, 1.0, 1e-12);
  EXPECT_NEAR(fit.slope_stderr, 0.0, 1e-10);
  EXPECT_EQ(fit.n, 10);
}

TEST(FitLine, NoisySlopeWithinErrorBars) {
  Rng rng(314159);
  std::vector<double> xs, ys;
  for (int i = 0; i < 200; ++i) {
    xs.push_back(i * 0.05);
    ys.push_back(-0.7 * xs.back() + 0.2 + 0.05 * rng.normal());
  }
  LineFit fit = fit_line(xs, ys);
  EXPECT_NEAR(fit.slope, -0.7, 5.0 * fit.slope_stderr);
  EXPECT_NEAR(fit.intercept, 0.2, 5.0 * fit.intercept_stderr);
  EXPECT_GT(fit.slope_stderr, 0.0);
  EXPECT_LT(fit.r2, 1.0);
  EXPECT_GT(fit.r2, 0.9);
}

TEST(FitLine, DegenerateInputsRejected) {
  EXPECT_THROW(fit_line({1.0}, {2.0}), std::invalid_argument);
  EXPECT_THROW(fit_line({1.0, 2.0}, {2.0}), std::invalid_argument);
  EXPECT_THROW(fit_line({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST(FitPowerLaw, RecoversExponentAndConstant) {
  std::vector<double> xs, ys;
  for (double x : {0.5, 0.25, 0.125, 0.0625, 0.03125}) {
    xs.push_back(x);
    ys.push_back(3.0 * std::pow(x, 1.7));
  }
  LineFit fit = fit_power_law(xs, ys);
  EXPECT_NEAR(fit.slope, 1.7, 1e-12);
  EXPECT_NEAR(std::exp(fit.intercept), 3.0, 1e-12);
  EXPECT_NEAR(fit.r2, 1.0, 1e-12);
}

TEST(FitPowerLaw, RejectsNonPositiveData) {
  EXPECT_THROW(fit_power_law({1.0, -2.0}, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(fit_power_law({1.0, 2.0}, {0.0, 1.0}), std::invalid_argument);
}

}  // namespace
}  // namespace mongelab
