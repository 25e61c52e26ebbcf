#include <cmath>

#include <gtest/gtest.h>

#include "mongelab/domain.hpp"

namespace mongelab {
namespace {

TEST(UnitBallVolume, LowDimensions) {
  EXPECT_NEAR(unit_ball_volume(1), 2.0, 1e-14);
  EXPECT_NEAR(unit_ball_volume(2), M_PI, 1e-14);
  EXPECT_NEAR(unit_ball_volume(3), 4.0 * M_PI / 3.0, 1e-13);
  EXPECT_NEAR(unit_ball_volume(4), M_PI * M_PI / 2.0, 1e-13);
}

TEST(UnitSphereArea, LowDimensions) {
  EXPECT_NEAR(unit_sphere_area(1), 2.0, 1e-14);
  EXPECT_NEAR(unit_sphere_area(2), 2.0 * M_PI, 1e-14);
  EXPECT_NEAR(unit_sphere_area(3), 4.0 * M_PI, 1e-13);
  // d/dr of the ball volume recovers the sphere area.
  for (int d = 1; d <= 6; ++d)
    EXPECT_NEAR(unit_sphere_area(d), d * unit_ball_volume(d), 1e-12 * unit_sphere_area(d));
}

TEST(Box, VolumeAndContainment) {
  Vector lo(2), hi(2);
  lo << -1.0, 0.0;
  hi << 1.0, 3.0;
  Domain box = Domain::box(lo, hi);
  EXPECT_EQ(box.kind(), Domain::Kind::Box);
  EXPECT_EQ(box.dim(), 2);
  EXPECT_NEAR(box.volume(), 6.0, 1e-14);
  Vector in(2), out(2);
  in << 0.5, 2.9;
  out << 1.5, 1.0;
  EXPECT_TRUE(box.contains(in));
  EXPECT_FALSE(box.contains(out));
  // Boundary points count as inside within slack.
  Vector edge(2);
  edge << 1.0, 3.0;
  EXPECT_TRUE(box.contains(edge));
}

TEST(Ball, VolumeContainmentDistance) {
  Domain ball = Domain::ball(3, 2.0);
  EXPECT_EQ(ball.dim(), 3);
  EXPECT_NEAR(ball.volume(), unit_ball_volume(3) * 8.0, 1e-12);
  Vector x(3);
  x << 1.0, 0.0, 0.0;
  EXPECT_TRUE(ball.contains(x));
  EXPECT_NEAR(ball.boundary_distance(x), 1.0, 1e-12);
  x << 3.0, 0.0, 0.0;
  EXPECT_FALSE(ball.contains(x));
}

TEST(Annulus, VolumeContainmentDistance) {
  Domain ann = Domain::annulus(3, 0.5, 1.0);
  EXPECT_NEAR(ann.volume(), unit_ball_volume(3) * (1.0 - 0.125), 1e-12);
  Vector x(3);
  x << 0.75, 0.0, 0.0;
  EXPECT_TRUE(ann.contains(x));
  EXPECT_NEAR(ann.boundary_distance(x), 0.25, 1e-12);
  x << 0.4, 0.0, 0.0;
  EXPECT_FALSE(ann.contains(x));
  x << 1.1, 0.0, 0.0;
  EXPECT_FALSE(ann.contains(x));
}

TEST(Product, FactorsComposeVolumeAndContainment) {
  Domain prod = Domain::product_of_balls(2, 1.0, 1, 0.5);
  EXPECT_EQ(prod.kind(), Domain::Kind::Product);
  EXPECT_EQ(prod.dim(), 3);
  ASSERT_EQ(prod.factors().size(), 2u);
  EXPECT_EQ(prod.factors()[0].dim(), 2);
  EXPECT_EQ(prod.factors()[1].dim(), 1);
  EXPECT_NEAR(prod.volume(), M_PI * 1.0, 1e-12);  // pi * (2 * 0.5)
  Vector x(3);
  x << 0.5, 0.5, 0.25;
  EXPECT_TRUE(prod.contains(x));
  x << 0.5, 0.5, 0.75;  // second factor violated
  EXPECT_FALSE(prod.contains(x));
  x << 0.9, 0.9, 0.0;  // first factor violated
  EXPECT_FALSE(prod.contains(x));
}

TEST(Product, BoundaryDistanceIsFactorMinimum) {
  Domain prod = Domain::product_of_balls(2, 1.0, 1, 0.5);
  Vector x(3);
  x << 0.6, 0.0, 0.1;
  EXPECT_NEAR(prod.boundary_distance(x), std::min(1.0 - 0.6, 0.5 - 0.1), 1e-12);
}

TEST(Scale, CharacteristicRadius) {
  EXPECT_NEAR(Domain::ball(3, 2.0).scale(), 2.0, 1e-14);
  EXPECT_NEAR(Domain::annulus(2, 0.5, 1.5).scale(), 1.5, 1e-14);
  // Products report the tightest factor radius (used for safety margins).
  EXPECT_NEAR(Domain::product_of_balls(2, 1.0, 1, 0.5).scale(), 0.5, 1e-14);
  Vector lo(2), hi(2);
  lo << -1.0, 0.0;
  hi << 1.0, 3.0;
  EXPECT_NEAR(Domain::box(lo, hi).scale(), 1.0, 1e-14);
}

TEST(Product, RejectsNestedProductsAndBoxes) {
  Vector lo(1), hi(1);
  lo << 0.0;
  hi << 1.0;
  EXPECT_THROW(Domain::product({Domain::ball(2, 1.0), Domain::box(lo, hi)}),
               std::invalid_argument);
  Domain inner = Domain::product_of_balls(1, 1.0, 1, 1.0);
  EXPECT_THROW(Domain::product({inner, Domain::ball(1, 1.0)}), std::invalid_argument);
}

}  // namespace
}  // namespace mongelab
