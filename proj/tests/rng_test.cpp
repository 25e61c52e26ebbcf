#include <cmath>
#include <cstdint>

#include <gtest/gtest.h>

#include "mongelab/domain.hpp"
#include "mongelab/rng.hpp"

namespace mongelab {
namespace {

TEST(StreamSeed, DeterministicAndLabelSeparated) {
  EXPECT_EQ(stream_seed(42, "alpha"), stream_seed(42, "alpha"));
  EXPECT_NE(stream_seed(42, "alpha"), stream_seed(42, "beta"));
  EXPECT_NE(stream_seed(42, "alpha", 0), stream_seed(42, "alpha", 1));
  EXPECT_NE(stream_seed(42, "alpha"), stream_seed(43, "alpha"));
}

TEST(Rng, ReproducibleSequences) {
  Rng a(7), b(7), c(8);
  bool all_equal = true, any_differs = false;
  for (int i = 0; i < 100; ++i) {
    double xa = a.uniform(), xb = b.uniform(), xc = c.uniform();
    all_equal = all_equal && xa == xb;
    any_differs = any_differs || xa != xc;
  }
  EXPECT_TRUE(all_equal);
  EXPECT_TRUE(any_differs);
}

TEST(Rng, UniformRangeAndMean) {
  Rng rng(123);
  const int n = 50000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // Mean 1/2, sd of the mean = 1/sqrt(12 n); allow 5 sigma.
  EXPECT_NEAR(sum / n, 0.5, 5.0 / std::sqrt(12.0 * n));
}

TEST(Rng, UniformIntervalRespectsBounds) {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    double u = rng.uniform(-2.0, 3.0);
    ASSERT_GE(u, -2.0);
    ASSERT_LE(u, 3.0);
  }
}

TEST(Rng, NormalMomentsLoose) {
  Rng rng(99);
  const int n = 50000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double g = rng.normal();
    s1 += g;
    s2 += g * g;
  }
  EXPECT_NEAR(s1 / n, 0.0, 5.0 / std::sqrt(static_cast<double>(n)));
  EXPECT_NEAR(s2 / n, 1.0, 0.05);
}

TEST(Rng, UnitVectorsLieOnSphere) {
  Rng rng(11);
  for (int d : {1, 2, 3, 5}) {
    for (int i = 0; i < 50; ++i) {
      EXPECT_NEAR(rng.unit_vector(d).norm(), 1.0, 1e-12);
    }
  }
}

TEST(Rng, BallPointsVolumeDistributed) {
  Rng rng(17);
  const int d = 3, n = 20000;
  double sum_rd = 0.0;
  for (int i = 0; i < n; ++i) {
    Vector x = rng.ball_point(d, 1.0);
    double r = x.norm();
    ASSERT_LE(r, 1.0 + 1e-12);
    sum_rd += std::pow(r, d);
  }
  // r^d is uniform on [0, 1] for the volume measure.
  EXPECT_NEAR(sum_rd / n, 0.5, 5.0 / std::sqrt(12.0 * n));
}

TEST(Rng, ShellPointsStayInShellAndVolumeDistributed) {
  Rng rng(23);
  const int d = 2, n = 20000;
  const double a = 0.5, b = 1.0;
  double sum_rd = 0.0;
  for (int i = 0; i < n; ++i) {
    Vector x = rng.shell_point(d, a, b);
    double r = x.norm();
    ASSERT_GE(r, a - 1e-12);
    ASSERT_LE(r, b + 1e-12);
    sum_rd += std::pow(r, d);
  }
  double lo = std::pow(a, d), hi = std::pow(b, d);
  EXPECT_NEAR(sum_rd / n, 0.5 * (lo + hi), 5.0 * (hi - lo) / std::sqrt(12.0 * n));
}

}  // namespace
}  // namespace mongelab
