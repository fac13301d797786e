#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace helfrich;

namespace {

double sphere_bound(double c0, double r) { return 0.25 * std::pow(c0 * r - 2.0, 2) + c0 * r; }

template <class F>
void expect_code(ErrorCode code, F fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace

TEST(LiYau, UnitSphereFiveQuarters) {
  auto c = liyau_bound(sphere(1.0, 4), -1.0, Vec3(1, 0, 0));
  EXPECT_NEAR(c.bound, 1.25, 0.02 * 1.25);
  EXPECT_EQ(c.measured_multiplicity, 1);
  EXPECT_EQ(c.multiplicity_bound, 1);
  EXPECT_EQ(c.verdict, Verdict::Consistent);
  EXPECT_EQ(c.density_at_infinity, 0.0);
}

TEST(LiYau, SmallSpheresApproachOne) {
  double prev = 1e9;
  for (double r : {0.4, 0.2, 0.1, 0.05}) {
    auto s = sphere(r, 4);
    double b = liyau_bound(s, -1.0, s.vertex(0)).bound;
    EXPECT_NEAR(b, sphere_bound(-1.0, r), 0.02 * sphere_bound(-1.0, r));
    EXPECT_LT(b, prev);
    prev = b;
  }
  EXPECT_NEAR(sphere_bound(-1.0, 0.1), 1.0025, 1e-12);
}

TEST(LiYau, TouchingSpheresReachTwo) {
  auto m = dumbbell(0.02, 0.0, 1.0);
  auto c = liyau_bound(m, 0.0, Vec3::Zero());
  EXPECT_NEAR(c.bound, 2.0, 0.05);
  EXPECT_EQ(c.measured_multiplicity, 2);
  EXPECT_EQ(c.verdict, Verdict::Consistent);
}

TEST(LiYau, ViolationIsReportedNotClipped) {
  // a closed sphere cannot violate, so feed it a boundary measure with the wrong sign
  auto s = sphere(1.0, 3);
  const Vec3 x0 = s.vertex(0);
  BoundaryAtoms beta;
  beta.x.push_back(2.0 * x0);
  beta.eta.push_back(-x0);
  beta.w.push_back(2.0 * kPi);
  LiYauOptions opt;
  opt.boundary = &beta;
  auto c = liyau_bound(s, 0.0, x0, opt);
  EXPECT_NEAR(c.boundary_term, -1.0, 1e-12);
  EXPECT_LT(c.bound, 1.0 - c.slack);
  EXPECT_NEAR(c.bound, c.helfrich_over_4pi + c.cvol_term + c.boundary_term, 1e-12);
  EXPECT_EQ(c.verdict, Verdict::Violated);
  EXPECT_EQ(c.multiplicity_bound, 0);
  auto r = reversed(s);
  EXPECT_EQ(liyau_bound(r, 2.0, r.vertex(0)).verdict, Verdict::Consistent);
}

TEST(BoundaryTerm, LensCircle) {
  Lens L = lens();
  EXPECT_NEAR(boundary_term(L.boundary, Vec3(0, 0, 0.5)), 3.0 * std::sqrt(3.0) / 4.0, 0.01 * 1.299);
  EXPECT_EQ(boundary_term(BoundaryAtoms{}, Vec3::Zero()), 0.0);
  double far = boundary_term(L.boundary, Vec3(0, 0, 10));
  double direct = 0.0;
  for (std::size_t i = 0; i < L.boundary.size(); ++i) {
    Vec3 d = L.boundary.x[i] - Vec3(0, 0, 10);
    direct += L.boundary.w[i] * d.dot(L.boundary.eta[i]) / d.squaredNorm();
  }
  EXPECT_NEAR(far, direct / (2.0 * kPi), 1e-14);
  EXPECT_LT(std::abs(far), 0.03);
  expect_code(ErrorCode::PointOnBoundary, [&] { boundary_term(L.boundary, L.boundary.x[3]); });
}

TEST(ScaleInvariant, SphereGivesOne) {
  auto s = sphere(1.0, 4);
  auto c = scale_invariant_bound(s, Vec3(1, 0, 0));
  EXPECT_NEAR(c.bound, 1.0, 0.02);
  ASSERT_TRUE(c.c0_star.has_value());
}

TEST(ScaleInvariant, ScalingAndReversal) {
  auto m = oracle::perturbed(capped_cylinder(1.0, 0.6, 0.08), 0.01, 9);
  const Vec3 x0 = m.vertex(40);
  const double tol = 1e-4;
  LiYauOptions opt;
  opt.tol = tol;
  double b = scale_invariant_bound(m, x0, opt).bound;
  double scaled = scale_invariant_bound(transform(m, 3.0, Vec3(1, 2, 3)), 3.0 * x0 + Vec3(1, 2, 3), opt).bound;
  double rev = scale_invariant_bound(reversed(m), x0, opt).bound;
  EXPECT_NEAR(scaled, b, 2.0 * tol * std::abs(b));
  EXPECT_NEAR(rev, b, 2.0 * tol * std::abs(b));
}

TEST(ScaleInvariant, MinimisesTheQuadraticInC0) {
  auto m = torus(0.5, 0.1);
  Vec3 x0 = m.vertex(7);
  auto c = scale_invariant_bound(m, x0);
  for (double c0 : {*c.c0_star - 0.3, *c.c0_star + 0.2, 0.0, -1.0})
    EXPECT_GE(liyau_bound(m, c0, x0).bound, c.bound - 1e-9);
}

TEST(Monotonicity, UnitSphereIsConstantPi) {
  std::vector<double> rhos;
  for (int k = 0; k < 9; ++k) rhos.push_back(0.3 + 0.2 * k);
  auto p = monotonicity_profile(sphere(1.0, 4), 0.0, Vec3(1, 0, 0), rhos);
  for (const auto& r : p.rows) EXPECT_NEAR(r.gamma, kPi, 0.03 * kPi) << r.rho;
  EXPECT_NEAR(p.rows.front().gamma, kPi, 0.05 * kPi);
}

TEST(Monotonicity, TorusNondecreasing) {
  auto m = torus(0.5);
  std::vector<double> rhos;
  for (int k = 0; k < 9; ++k) rhos.push_back(0.2 + 0.4 * k);
  auto p = monotonicity_profile(m, -1.0, Vec3(2, 0, 0), rhos);
  EXPECT_TRUE(p.nondecreasing(1e-3));
}

TEST(Monotonicity, LargeRadiusLimit) {
  // past the diameter only the energy and concentrated terms survive
  auto m = capped_cylinder(1.0, 0.5, 0.05);
  const double c0 = -0.7;
  Vec3 x0 = m.vertex(3);
  auto p = monotonicity_profile(m, c0, x0, {5.0, 50.0});
  double expected = helfrich_energy(m, c0) / 4.0 + 0.5 * c0 * concentrated_volume(m, x0).value;
  EXPECT_NEAR(p.rows.back().gamma, expected, 0.01 * std::abs(expected));
}

TEST(Monotonicity, RejectsUnresolvedRadii) {
  auto s = sphere(1.0, 4);
  expect_code(ErrorCode::RhoBelowResolution, [&] { monotonicity_profile(s, 0.0, Vec3(1, 0, 0), {0.05, 0.5}); });
  expect_code(ErrorCode::InvalidInput, [&] { monotonicity_profile(s, 0.0, Vec3(1, 0, 0), {0.5, 0.4}); });
}

TEST(Embeddedness, Verdicts) {
  auto s = embeddedness_certificate(sphere(1.0, 4), -0.1);
  EXPECT_EQ(s.verdict, EmbeddingVerdict::EmbeddedCertified);
  EXPECT_NEAR(s.energy, 0.25 * 2.1 * 2.1 * 4.0 * kPi, 0.02 * s.energy);
  auto t = embeddedness_certificate(touching_spheres(4), 0.0);
  EXPECT_EQ(t.verdict, EmbeddingVerdict::Inconclusive);
  EXPECT_EQ(t.worst_multiplicity, 2);
  expect_code(ErrorCode::PositiveC0, [] { embeddedness_certificate(sphere(1.0, 1), 1.0); });
}

TEST(Diameter, SphereBounds) {
  auto s = sphere(1.0, 4);
  auto b = diameter_bounds(s, 0.0);
  EXPECT_NEAR(b.lower, 1.0, 0.01);
  ASSERT_TRUE(b.upper.has_value());
  EXPECT_NEAR(*b.upper, 18.0, 0.18);
  EXPECT_FALSE(b.lower_violated || b.upper_violated);

  auto m = diameter_bounds(s, -1.0);
  EXPECT_NEAR(m.lower, 1.0, 0.01);
  double up = 9.0 / (2.0 * kPi) * std::sqrt(9.0 * kPi * (4.0 * kPi + 2.0 / 3.0 * 4.0 * kPi / 3.0));
  EXPECT_NEAR(*m.upper, up, 0.01 * up);
  expect_code(ErrorCode::ZeroEnergy, [&] { diameter_bounds(s, 2.0); });
}

TEST(LowerBound, FourPi) {
  auto s = helfrich_lower_bound_check(sphere(1.0, 4), -0.5);
  EXPECT_NEAR(s.energy, 6.25 * kPi, 0.01 * 6.25 * kPi);
  EXPECT_TRUE(s.passes);
  EXPECT_TRUE(helfrich_lower_bound_check(dumbbell(0.05, 1.0, 1.0), -0.5).passes);
  expect_code(ErrorCode::NonNegativeC0, [] { helfrich_lower_bound_check(sphere(1.0, 1), 0.0); });
}

TEST(GammaThreshold, Values) {
  auto z = gamma_threshold(0.0, 4.0 * kPi, 4.0 * kPi / 3.0);
  EXPECT_EQ(z.gamma, 0.0);
  EXPECT_FALSE(std::signbit(z.gamma));
  EXPECT_DOUBLE_EQ(z.threshold, 8.0 * kPi);
  auto n = gamma_threshold(-1.0, 4.0 * kPi, 4.0 * kPi / 3.0);
  EXPECT_NEAR(n.gamma, 4.0 * kPi * (std::sqrt(1.0 + 1.0 / 594.0) - 1.0), 1e-12 * n.gamma);
  EXPECT_NEAR(n.gamma, 1.057e-2, 1e-5);
  auto p = gamma_threshold(1.0, 4.0 * kPi, 4.0 * kPi / 3.0);
  EXPECT_NEAR(p.gamma, -6.0 * std::cbrt(16.0 * std::pow(kPi, 3) / 3.0), 1e-12);
  EXPECT_NEAR(p.gamma, -32.93, 0.01);
  expect_code(ErrorCode::IsoperimetricViolation, [] { gamma_threshold(-1.0, 1.0, 1.0); });
}

TEST(Minkowski, SphereEqualityAndDumbbell) {
  auto s = minkowski_check(sphere(1.0, 4), Vec3(1, 0, 0));
  ASSERT_TRUE(s.applicable);
  EXPECT_NEAR(s.lhs, 4.0 * kPi, 0.01 * 4.0 * kPi);
  EXPECT_NEAR(s.lhs, s.rhs, 0.01 * s.rhs);
  EXPECT_TRUE(s.passes);
  auto m = dumbbell(0.05, 1.0, 1.0);
  int top = 0;
  for (std::size_t v = 0; v < m.num_vertices(); ++v)
    if (m.vertex(static_cast<int>(v)).z() > m.vertex(top).z()) top = static_cast<int>(v);
  auto d = minkowski_check(m, m.vertex(top));
  EXPECT_TRUE(d.applicable);
  EXPECT_TRUE(d.passes);
}

TEST(Minkowski, GateClosesForLargeDeficit) {
  // opposite curvature signs on the two components push the deficit far above 4 pi
  auto m = sphere_torus_mixed(0.4, 0.06);
  auto k = minkowski_check(m, m.vertex(0));
  EXPECT_GT(cmc_deficit(m).deficit, 4.0 * kPi * k.multiplicity);
  EXPECT_FALSE(k.applicable);
  EXPECT_FALSE(k.passes);
}

TEST(Probes, DensityProbesAreDeterministic) {
  auto m = touching_spheres(3);
  auto a = density_probes(m, 64), b = density_probes(m, 64);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), 64u);
}

TEST(Certificate, JsonShape) {
  nlohmann::ordered_json j = liyau_bound(sphere(1.0, 2), -1.0, Vec3(1, 0, 0));
  for (const char* k : {"x0", "components", "bound", "multiplicity_bound", "measured", "verdict"})
    EXPECT_TRUE(j.contains(k)) << k;
  for (const char* k : {"density_at_infinity", "helfrich_over_4pi", "cvol_term", "boundary_term"})
    EXPECT_TRUE(j["components"].contains(k)) << k;
}
