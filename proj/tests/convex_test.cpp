// Tests for the convex-analysis engine: random max-of-affine samples and
// their mollification, the annulus mass bound, supporting planes, sections,
// sub-level growth, singularity growth fits, and enclosing ellipsoids.

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "mongelab/convex.hpp"
#include "mongelab/field.hpp"
#include "mongelab/pogorelov.hpp"

namespace mongelab {
namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

Field ode_exact_n3() {
  ExampleSpec spec;  // defaults: real, n = 3, k = 1, ode-exact
  return build_example(spec);
}

Field ptq_real_52() {
  ExampleSpec spec;
  spec.setting = Field::Setting::Real;
  spec.n = 5;
  spec.k = 2;
  spec.family = ExampleSpec::Family::PowerTimesQuadratic;
  return build_example(spec);
}

// ---------------------------------------------------------------------------
// ConvexSample basics.

TEST(ConvexSampleTest, SinglePieceEvaluatesAsHingeOfAffine) {
  ConvexSample s = ConvexSample::single_piece(vec2(3.0, 4.0));
  EXPECT_DOUBLE_EQ(s.value(vec2(0.0, 0.0)), 0.0);
  EXPECT_DOUBLE_EQ(s.value(vec2(1.0, 1.0)), 7.0);
  EXPECT_DOUBLE_EQ(s.value(vec2(-1.0, -1.0)), 0.0);  // clamped at zero
  EXPECT_DOUBLE_EQ(s.sup_on_unit_sphere(), 5.0);     // |a| + b = 5 + 0
  Vector g = s.subgradient(vec2(1.0, 1.0));
  EXPECT_DOUBLE_EQ(g[0], 3.0);
  EXPECT_DOUBLE_EQ(g[1], 4.0);
  // In the zero region the active piece is the implicit zero piece.
  Vector g0 = s.subgradient(vec2(-1.0, -1.0));
  EXPECT_DOUBLE_EQ(g0.norm(), 0.0);
}

TEST(ConvexSampleTest, RandomSampleIsNormalizedExactly) {
  for (std::uint64_t seed : {1u, 2u, 77u}) {
    ConvexSample s = random_convex(3, 9, seed);
    ASSERT_EQ(s.d, 3);
    ASSERT_EQ(s.slopes.size(), 9u);
    // w(0) = 0 exactly: all offsets <= 0 and at least one is exactly 0.
    EXPECT_DOUBLE_EQ(s.value(Vector::Zero(3)), 0.0);
    double max_b = -1.0;
    for (double b : s.offsets) {
      EXPECT_LE(b, 0.0);
      max_b = std::max(max_b, b);
    }
    EXPECT_DOUBLE_EQ(max_b, 0.0);
    // sup over the unit sphere is exactly 1 by construction.
    EXPECT_DOUBLE_EQ(s.sup_on_unit_sphere(), 1.0);
    // Convexity of the max: midpoint inequality at random probes.
    Rng rng(seed + 1000);
    for (int i = 0; i < 50; ++i) {
      Vector x = rng.ball_point(3, 2.0), y = rng.ball_point(3, 2.0);
      EXPECT_LE(s.value((0.5 * (x + y)).eval()),
                0.5 * s.value(x) + 0.5 * s.value(y) + 1e-12);
    }
  }
}

TEST(ConvexSampleTest, RandomSampleRejectsTooFewPieces) {
  EXPECT_THROW(random_convex(3, 3, 1), ConvexError);
}

TEST(ConvexSampleTest, MollifiedFieldBoundsAndConvexity) {
  ConvexSample s = random_convex(2, 7, 5);
  const double tau = 1e-2;
  Field lse = s.mollified_field(tau);
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    Vector x = rng.ball_point(2, 1.8);
    double w = s.value(x);
    double v = lse.value(x);
    EXPECT_GE(v, w - 1e-12);
    EXPECT_LE(v, w + tau * std::log(8.0) + 1e-12);  // pieces + 1 = 8
    Jet2 j = lse.jet(x);
    EXPECT_GE(j.min_eigenvalue(), -1e-9);  // smoothed max stays convex
  }
}

TEST(ConvexSampleTest, MollifiedJetMatchesFiniteDifferences) {
  ConvexSample s = random_convex(2, 6, 11);
  Field lse = s.mollified_field(5e-2);
  Vector x = vec2(0.31, -0.22);
  Jet2 analytic = lse.jet(x);
  Jet2 fd = richardson_jet([&](const Vector& y) { return lse.value(y); }, x, 1e-3);
  EXPECT_NEAR((analytic.grad - fd.grad).norm(), 0.0, 1e-6);
  EXPECT_NEAR((analytic.hess - fd.hess).norm(), 0.0, 1e-4 * (1.0 + analytic.hess.norm()));
}

// ---------------------------------------------------------------------------
// Annulus mass bound.

TEST(MassBoundTest, ProofConstantMatchesClosedForms) {
  // d = 2: quarter of the cap length 4 * (pi/3)  ->  pi/3.
  EXPECT_NEAR(annulus_mass_proof_bound(2), M_PI / 3.0, 1e-8);
  // d = 3: cap area = 2 pi * 4 * (1 - cos(pi/3)) / 2 ... = 4 pi  ->  pi.
  EXPECT_NEAR(annulus_mass_proof_bound(3), M_PI, 1e-8);
  // d = 4: 0.25 * 4 pi * 8 * int_0^{pi/3} sin^2 = 8 pi (pi/6 - sqrt(3)/8).
  EXPECT_NEAR(annulus_mass_proof_bound(4), 8.0 * M_PI * (M_PI / 6.0 - std::sqrt(3.0) / 8.0),
              1e-8);
  EXPECT_THROW(annulus_mass_proof_bound(1), ConvexError);
}

TEST(MassBoundTest, ConeSaturatesTheLaplacianMassComputation) {
  // Delta |x| = (d-1)/|x|; over B_2 \ B_1 in d = 3 the mass is
  // 2 * 4 pi * int_1^2 r dr = 12 pi.
  MassBoundReport rep = annulus_mass_bound_check(builtin::cone(3), 40000, 2026);
  EXPECT_NEAR(rep.mass, 12.0 * M_PI, std::max(4.0 * rep.mass_stderr, 0.01 * 12.0 * M_PI));
  EXPECT_TRUE(rep.pass);
  EXPECT_GT(rep.mass, rep.bound);
  // In d = 2 the mass is 1 * 2 pi * int_1^2 dr = 2 pi > pi/3.
  MassBoundReport rep2 = annulus_mass_bound_check(builtin::cone(2), 40000, 2026);
  EXPECT_NEAR(rep2.mass, 2.0 * M_PI, std::max(4.0 * rep2.mass_stderr, 0.01 * 2.0 * M_PI));
  EXPECT_TRUE(rep2.pass);
}

TEST(MassBoundTest, RandomConvexCorpusPassesTheBound) {
  for (int i = 0; i < 6; ++i) {
    ConvexSample s = random_convex(2 + (i % 2), 6 + i, 100 + i);
    MassBoundReport rep = annulus_mass_bound_check(s, 20000, 300 + i);
    EXPECT_DOUBLE_EQ(rep.sup_unit_sphere, 1.0);  // exact normalization
    EXPECT_GE(rep.mass, rep.bound) << "draw " << i;
    EXPECT_TRUE(rep.pass) << "draw " << i;
  }
}

// ---------------------------------------------------------------------------
// Supporting planes.

TEST(SupportingPlaneTest, ParaboloidPlaneIsTheTangent) {
  Field u = builtin::paraboloid(2);
  Vector base = vec2(0.3, 0.4);
  SupportingPlane p = supporting_plane(u, base, 20000, 3);
  EXPECT_NEAR((p.slope - base).norm(), 0.0, 1e-9);  // grad of |x|^2/2 is x
  EXPECT_NEAR(p.at(base), u.value(base), 1e-12);
  EXPECT_GE(p.min_gap, -1e-9);
  EXPECT_GT(p.samples, 1000u);
}

TEST(SupportingPlaneTest, ConeVertexFallsBackToZeroSlope) {
  Field u = builtin::cone(2);
  SupportingPlane p = supporting_plane(u, Vector::Zero(2), 20000, 3);
  EXPECT_DOUBLE_EQ(p.slope.norm(), 0.0);
  EXPECT_DOUBLE_EQ(p.offset, 0.0);
  EXPECT_GE(p.min_gap, 0.0);  // |y| >= 0 everywhere
}

TEST(SupportingPlaneTest, SaddleHasNoSupportingPlane) {
  EXPECT_THROW(supporting_plane(builtin::saddle(), Vector::Zero(2), 20000, 3), ConvexError);
}

// ---------------------------------------------------------------------------
// Sections.

TEST(SectionTest, ParaboloidSectionIsARoundDisc) {
  // {|x|^2/2 < h} at base 0 is the disc of radius sqrt(2h):
  // volume 2 pi h, diameter 2 sqrt(2h).
  Field u = builtin::paraboloid(2);
  const double h = 0.02;
  Section sec = section_extract(u, Vector::Zero(2), h, 200000, 7);
  EXPECT_FALSE(sec.empty);
  EXPECT_TRUE(sec.compactly_contained);
  EXPECT_NEAR(sec.volume, 2.0 * M_PI * h,
              std::max(4.0 * sec.volume_stderr, 0.02 * 2.0 * M_PI * h));
  EXPECT_NEAR(sec.diameter, 2.0 * std::sqrt(2.0 * h), 0.03 * 2.0 * std::sqrt(2.0 * h));
  for (const auto& m : sec.members) {
    EXPECT_LT(u.value(m), sec.plane.at(m) + h);
    EXPECT_LE(m.norm(), std::sqrt(2.0 * h) + 1e-9);
  }
}

TEST(SectionTest, SectionVolumeGrowsWithHeight) {
  Field u = builtin::paraboloid(2);
  Section lo = section_extract(u, Vector::Zero(2), 0.02, 60000, 7);
  Section hi = section_extract(u, Vector::Zero(2), 0.05, 60000, 7);
  EXPECT_GT(hi.volume, lo.volume);
}

TEST(SectionTest, FullDomainSectionIsNotCompactlyContained) {
  // With h larger than sup u the section is the whole ball and touches the
  // boundary.
  Field u = builtin::paraboloid(2);
  Section sec = section_extract(u, Vector::Zero(2), 10.0, 40000, 7);
  EXPECT_FALSE(sec.compactly_contained);
  EXPECT_FALSE(sec.boundary_witnesses.empty());
  EXPECT_NEAR(sec.volume, 4.0 * M_PI, 0.02 * 4.0 * M_PI);
}

TEST(SectionTest, SingularFamilySectionsAtTheOriginLeakAlongTheZeroSet) {
  // The tangent plane at the origin is zero, and {u < h} then contains the
  // entire zero segment {x' = 0}, which reaches the domain boundary: these
  // sections are never compactly contained, no matter how small h is.
  Field u = ode_exact_n3();
  for (double h : {1e-3, 1e-2}) {
    Section sec = section_extract(u, Vector::Zero(3), h, 30000, 7);
    EXPECT_FALSE(sec.compactly_contained) << "h = " << h;
    EXPECT_FALSE(sec.boundary_witnesses.empty()) << "h = " << h;
  }
}

// ---------------------------------------------------------------------------
// Sub-level growth.

TEST(GrowthTest, ParaboloidSublevelVolumeScalesWithExponentHalfDim) {
  std::vector<double> heights = {0.002, 0.004, 0.008, 0.016, 0.032};
  GrowthCheck g2 = sublevel_growth_check(builtin::paraboloid(2), heights, 40000, 11);
  // |{|x|^2/2 < h}| = 2 pi h: the box-normalized estimator makes the
  // acceptance fraction height-independent, so the fitted exponent is exact.
  EXPECT_NEAR(g2.exponent, 1.0, 1e-6);
  EXPECT_TRUE(g2.pass);
  GrowthCheck g3 = sublevel_growth_check(builtin::paraboloid(3), heights, 40000, 11);
  EXPECT_NEAR(g3.exponent, 1.5, 1e-6);
  EXPECT_TRUE(g3.pass);
}

TEST(GrowthTest, SingularFamilySublevelGrowthIsExactlyCritical) {
  // u = |x'|^{4/3} f(t): the x'-section radius scales as h^{3/4} while the
  // zero-direction extent is height-independent, so |{u < h}| ~ h^{3/2},
  // exactly the d/2 = 1.5 boundary of the admissible range.
  Field u = ode_exact_n3();
  std::vector<double> heights = {0.002, 0.004, 0.008, 0.016};
  GrowthCheck g = sublevel_growth_check(u, heights, 40000, 11);
  EXPECT_NEAR(g.exponent, 1.5, 1e-6);
  EXPECT_TRUE(g.pass);
}

TEST(GrowthTest, SublevelValidation) {
  EXPECT_THROW(sublevel_growth_check(builtin::paraboloid(2), {0.1, 0.2}, 1000, 1), ConvexError);
}

TEST(GrowthTest, SingularityGrowthExponentMatchesTheAnsatz) {
  // sup_{|x'| = r} u = r^{4/3} f(y) is radially exact, and inf over the
  // y-grid just picks the grid point nearest the origin, so the power-law
  // fit recovers 4/3 to machine accuracy.
  Field u = ode_exact_n3();
  GrowthCheck g = growth_exponent_fit(u, 4.0 / 3.0, {0.5, 0.25, 0.125, 0.0625});
  EXPECT_NEAR(g.exponent, 4.0 / 3.0, 1e-9);
  EXPECT_TRUE(g.pass);
  ASSERT_EQ(g.values.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_NEAR(g.values[i] / std::pow(g.abscissae[i], 4.0 / 3.0),
                g.values[0] / std::pow(g.abscissae[0], 4.0 / 3.0), 1e-9);
}

TEST(GrowthTest, PowerFamilyGrowthExponent) {
  // (n, k) = (5, 2): u = |x|^{6/5} (1 + |y|^2), exponent 6/5.
  Field u = ptq_real_52();
  GrowthCheck g = growth_exponent_fit(u, 1.2, {0.4, 0.2, 0.1, 0.05});
  EXPECT_NEAR(g.exponent, 1.2, 1e-6);
  EXPECT_TRUE(g.pass);
}

TEST(GrowthTest, GrowthFitRequiresASingularSplit) {
  EXPECT_THROW(growth_exponent_fit(builtin::paraboloid(2), 1.0, {0.5, 0.25, 0.125, 0.0625}),
               ConvexError);
  Field u = ode_exact_n3();
  EXPECT_THROW(growth_exponent_fit(u, 4.0 / 3.0, {0.5, 0.25}, 8), ConvexError);
}

// ---------------------------------------------------------------------------
// Enclosing ellipsoids.

TEST(EllipsoidTest, CircleCloudGivesTheUnitDisc) {
  std::vector<Vector> cloud;
  for (int i = 0; i < 200; ++i) {
    double th = 2.0 * M_PI * i / 200.0;
    cloud.push_back(vec2(std::cos(th), std::sin(th)));
  }
  EllipsoidApprox ell = john_ellipsoid(cloud);
  EXPECT_NEAR(ell.center.norm(), 0.0, 1e-3);
  EXPECT_NEAR(ell.axis_ratio(), 1.0, 1e-2);
  EXPECT_DOUBLE_EQ(ell.enclose_factor, 1.0);
  EXPECT_DOUBLE_EQ(ell.enclosed_factor, 0.5);
  for (const auto& p : cloud)
    EXPECT_LE((p - ell.center).dot(ell.shape * (p - ell.center)), 1.0 + 1e-9);
}

TEST(EllipsoidTest, StretchedCloudReportsTheAxisRatio) {
  std::vector<Vector> cloud;
  for (int i = 0; i < 400; ++i) {
    double th = 2.0 * M_PI * i / 400.0;
    cloud.push_back(vec2(2.0 * std::cos(th), std::sin(th)));
  }
  EllipsoidApprox ell = john_ellipsoid(cloud);
  EXPECT_NEAR(ell.axis_ratio(), 2.0, 0.04);
  for (const auto& p : cloud)
    EXPECT_LE((p - ell.center).dot(ell.shape * (p - ell.center)), 1.0 + 1e-9);
}

TEST(EllipsoidTest, RandomCloudIsAlwaysEnclosed) {
  Rng rng(4242);
  std::vector<Vector> cloud;
  for (int i = 0; i < 300; ++i) cloud.push_back(rng.ball_point(3, 1.5));
  EllipsoidApprox ell = john_ellipsoid(cloud);
  for (const auto& p : cloud)
    EXPECT_LE((p - ell.center).dot(ell.shape * (p - ell.center)), 1.0 + 1e-9);
  EXPECT_GE(ell.axis_ratio(), 1.0);
}

TEST(EllipsoidTest, CollinearCloudThrowsWithTheFlatDirection) {
  Vector dir = vec3(1.0, 1.0, 1.0).normalized();
  std::vector<Vector> cloud;
  for (int i = 0; i < 50; ++i) cloud.push_back(((i / 50.0) * dir).eval());
  try {
    john_ellipsoid(cloud);
    FAIL() << "expected DegenerateCloudError";
  } catch (const DegenerateCloudError& e) {
    ASSERT_EQ(e.deficient_direction.size(), 3);
    // The reported deficient direction is orthogonal to the line.
    EXPECT_NEAR(std::abs(e.deficient_direction.dot(dir)), 0.0, 1e-6);
    EXPECT_NEAR(e.deficient_direction.norm(), 1.0, 1e-9);
  }
  EXPECT_THROW(john_ellipsoid({}), ConvexError);
  EXPECT_THROW(john_ellipsoid({vec2(0, 0), vec2(1, 1)}), ConvexError);
}

}  // namespace
}  // namespace mongelab
