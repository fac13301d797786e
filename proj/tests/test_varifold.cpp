#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace helfrich;

namespace {

TestField constant_field(const Vec3& c) {
  return {[c](const Vec3&) { return c; }, [](const Vec3&) { return Eigen::Matrix3d::Zero().eval(); }};
}

TestField position_field() {
  return {[](const Vec3& x) { return x; }, [](const Vec3&) { return Eigen::Matrix3d::Identity().eval(); }};
}

std::vector<Vec3> atom_H(const OrientedVarifoldAtoms& V) { return V.H; }

}  // namespace

TEST(QuadratureVarifold, AtomCountsAndWeights) {
  auto ico = sphere(1.0, 0);
  auto V1 = quadrature_varifold(ico, 1);
  EXPECT_EQ(V1.size(), 20u);
  EXPECT_NEAR(V1.total_weight(), total_area(ico), 1e-12);

  auto s = sphere(1.0, 4);
  auto V3 = quadrature_varifold(s, 3);
  EXPECT_EQ(V3.size(), 3u * 20u * 256u);
  EXPECT_NEAR(V3.total_weight(), total_area(s), 1e-12 * total_area(s));
}

TEST(QuadratureVarifold, MomentMatchesAlgebraicVolume) {
  for (const auto& m : {sphere(1.0, 3), torus(0.5, 0.1), capped_cylinder(1.0, 0.7, 0.1)}) {
    auto V = quadrature_varifold(m, 1, false);
    double sum = 0.0;
    for (std::size_t i = 0; i < V.size(); ++i) sum += V.w[i] * V.x[i].dot(V.n[i]);
    EXPECT_NEAR(-sum / 3.0, algebraic_volume(m), 1e-10 * std::abs(algebraic_volume(m)));
  }
}

TEST(WeightInBall, Limits) {
  auto V = quadrature_varifold(sphere(1.0, 4), 3, false);
  EXPECT_NEAR(weight_in_ball(V, Vec3(1, 0, 0), 3.0), V.total_weight(), 1e-12);
  EXPECT_NEAR(weight_in_ball(V, Vec3(1, 0, 0), 0.2), kPi * 0.04, 0.05 * kPi * 0.04);
  EXPECT_EQ(weight_in_ball(V, Vec3(5, 0, 0), 3.9), 0.0);
}

TEST(DensityProfile, EmbeddedAndDoublePoints) {
  auto V = quadrature_varifold(sphere(1.0, 4), 3, false);
  for (const auto& d : density_profile(V, Vec3(1, 0, 0), {0.4, 0.3, 0.25})) EXPECT_NEAR(d.density, 1.0, 0.1);
  auto T = quadrature_varifold(touching_spheres(4), 3, false);
  for (const auto& d : density_profile(T, Vec3::Zero(), {0.4, 0.3, 0.25})) EXPECT_NEAR(d.density, 2.0, 0.2);
  for (const auto& d : density_profile(V, Vec3(6, 0, 0), {3.9, 1.0, 0.5})) EXPECT_EQ(d.density, 0.0);
  try {
    density_profile(V, Vec3(1, 0, 0), {0.01});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RhoBelowResolution);
  }
}

TEST(Reversal, EnergyIdentities) {
  auto V = quadrature_varifold(oracle::perturbed(sphere(1.0, 3), 0.03, 11), 3);
  auto R = reverse_orientation(V);
  for (double c0 : {-1.5, 0.0, 0.7}) EXPECT_DOUBLE_EQ(helfrich_energy(V, c0), helfrich_energy(R, -c0));
  EXPECT_DOUBLE_EQ(willmore_energy(V), willmore_energy(R));
  auto RR = reverse_orientation(R);
  EXPECT_EQ(RR.n, V.n);
  EXPECT_EQ(RR.x, V.x);
  EXPECT_EQ(RR.w, V.w);
}

TEST(FirstVariation, Residuals) {
  auto V = quadrature_varifold(sphere(1.0, 4), 3);
  auto H = atom_H(V);
  EXPECT_LT(first_variation_residual(V, H, {constant_field(Vec3(1, 0, 0)), constant_field(Vec3(0.3, -0.2, 1))}),
            1e-2);
  EXPECT_LT(first_variation_residual(V, H, {position_field()}), 2e-2);
  std::vector<Vec3> zero(V.size(), Vec3::Zero());
  EXPECT_NEAR(first_variation_residual(V, zero, {position_field()}), 1.0, 1e-9);
  try {
    first_variation_residual(V, std::vector<Vec3>(3), {position_field()});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MismatchedFieldLength);
  }
}

TEST(FirstVariation, DivergenceIdentityMatchesArea) {
  // div_T x = 2 on a surface, so int <x, H> = -2 A
  auto V = quadrature_varifold(sphere(1.0, 4), 3);
  double s = 0.0;
  for (std::size_t i = 0; i < V.size(); ++i) s += V.w[i] * V.x[i].dot(V.H[i]);
  EXPECT_NEAR(s, -2.0 * V.total_weight(), 0.02 * 2.0 * V.total_weight());
}
