#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace helfrich;

namespace {

TriangleImmersion tetrahedron() {
  const double s = 1.0 / std::sqrt(8.0);
  std::vector<Vec3> v{{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  // outward winding, flipped below
  std::vector<Face> f{{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  for (auto& t : f) std::swap(t[1], t[2]);
  return build_immersion(v, f);
}

void expect_code(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace

TEST(BuildImmersion, TetrahedronIsValidAndInnerOriented) {
  auto m = tetrahedron();
  EXPECT_EQ(m.num_faces(), 4u);
  EXPECT_NEAR(total_area(m), std::sqrt(3.0), 1e-12);
  EXPECT_GT(algebraic_volume(m), 0.0);
  EXPECT_NEAR(diameter(m), 1.0, 1e-12);
}

TEST(BuildImmersion, FlippedFaceIsInconsistent) {
  auto v = detail::icosahedron_vertices();
  auto f = detail::icosahedron_faces();
  std::swap(f[7][0], f[7][1]);
  expect_code(ErrorCode::InconsistentOrientation, [&] { build_immersion(v, f); });
}

TEST(BuildImmersion, TwoIcosahedraGiveTwoComponents) {
  auto a = sphere(1.0, 0);
  auto m = disjoint_union(a, transform(a, 1.0, Vec3(5, 0, 0)));
  EXPECT_EQ(m.component_count(), 2);
  EXPECT_EQ(oracle::component_count(m), 2);
  auto mixed = sphere_torus_mixed(0.4, 0.1);
  EXPECT_EQ(mixed.component_count(), oracle::component_count(mixed));
}

TEST(BuildImmersion, RejectsBadInput) {
  auto v = detail::icosahedron_vertices();
  auto f = detail::icosahedron_faces();
  auto g = f;
  g[0][0] = 99;
  expect_code(ErrorCode::InvalidInput, [&] { build_immersion(v, g); });
  g = f;
  g.pop_back();
  expect_code(ErrorCode::NonManifoldEdge, [&] { build_immersion(v, g); });
  g = f;
  g.push_back(f[0]);
  expect_code(ErrorCode::NonManifoldEdge, [&] { build_immersion(v, g); });
  auto w = v;
  w[f[0][0]] = w[f[0][1]];
  expect_code(ErrorCode::DegenerateFace, [&] { build_immersion(w, f); });
  g = f;
  g[0][1] = g[0][0];
  expect_code(ErrorCode::DegenerateFace, [&] { build_immersion(v, g); });
}

TEST(MeanCurvature, UnitSphere) {
  auto m = sphere(1.0, 4);
  auto cf = mean_curvature(m);
  double mean = pairwise_sum(cf.H_sc) / static_cast<double>(cf.H_sc.size());
  EXPECT_GE(mean, 1.98);
  EXPECT_LE(mean, 2.02);
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    ASSERT_GT(cf.H_sc[v], 0.0);
    EXPECT_LE((cf.H[v] - cf.H_sc[v] * cf.normal[v]).norm(), 0.05 * cf.H[v].norm());
  }
}

TEST(MeanCurvature, RadiusTwo) {
  auto cf = mean_curvature(sphere(2.0, 4));
  double mean = pairwise_sum(cf.H_sc) / static_cast<double>(cf.H_sc.size());
  EXPECT_NEAR(mean, 1.0, 0.01);
}

TEST(MeanCurvature, ScalesInversely) {
  auto m = oracle::perturbed(sphere(1.0, 2), 0.05, 3);
  auto a = mean_curvature(m), b = mean_curvature(transform(m, 3.0, Vec3(1, 2, 3)));
  for (std::size_t v = 0; v < m.num_vertices(); ++v) EXPECT_NEAR(b.H_sc[v], a.H_sc[v] / 3.0, 1e-12);
}

TEST(Area, ClosedForms) {
  EXPECT_NEAR(total_area(sphere(1.0, 4)), 4.0 * kPi, 0.002 * 4.0 * kPi);
  EXPECT_NEAR(total_area(torus(0.5)), 4.0 * kPi * kPi * 0.75, 0.01 * 4.0 * kPi * kPi * 0.75);
}

TEST(Volume, ClosedForms) {
  EXPECT_NEAR(algebraic_volume(sphere(1.0, 4)), 4.0 * kPi / 3.0, 0.005 * 4.0 * kPi / 3.0);
  for (double r : {0.3, 0.5}) {
    double exact = 2.0 * kPi * kPi * r * r * (1.0 + r);
    EXPECT_NEAR(algebraic_volume(torus(r)), exact, 0.01 * exact);
    double mixed = -4.0 * kPi / 3.0 + exact;
    EXPECT_NEAR(algebraic_volume(sphere_torus_mixed(r)), mixed, 0.01 * std::abs(mixed));
  }
}

TEST(Diameter, ClosedForms) {
  EXPECT_NEAR(diameter(sphere(1.0, 4)), 2.0, 0.01);
  EXPECT_NEAR(diameter(capped_cylinder(2.0, 1.0)), 4.0, 0.04);
  EXPECT_NEAR(diameter(tetrahedron()), 1.0, 1e-12);
}

TEST(Multiplicity, SpherePointsAndTouchingSpheres) {
  auto s = sphere(1.0, 4);
  EXPECT_EQ(multiplicity_at(s, Vec3(1, 0, 0), 0.05 * 2), 1);
  EXPECT_EQ(multiplicity_at(s, Vec3(3, 0, 0), 0.05), 0);
  EXPECT_EQ(multiplicity_at(dumbbell(0.02, 0.0, 1.0), Vec3::Zero(), 0.1), 2);
  EXPECT_EQ(multiplicity_at(touching_spheres(4), Vec3::Zero(), 0.1), 2);
}

TEST(Transform, IdentityAndScaling) {
  auto m = sphere(1.0, 3);
  auto id = transform(m, 1.0, Vec3::Zero());
  EXPECT_EQ(id.vertices(), m.vertices());
  EXPECT_EQ(id.faces(), m.faces());
  auto big = transform(m, 2.0, Vec3::Zero());
  EXPECT_NEAR(total_area(big), 4.0 * total_area(m), 1e-10);
  EXPECT_NEAR(helfrich_energy(m, 1.3), helfrich_energy(big, 0.65), 1e-10);
  expect_code(ErrorCode::NonPositiveScale, [&] { transform(m, 0.0, Vec3::Zero()); });
}

TEST(Io, ObjAndOffRoundTrip) {
  auto m = oracle::perturbed(sphere(1.0, 2), 0.1, 7);
  for (const char* ext : {".obj", ".off"}) {
    auto path = std::filesystem::temp_directory_path() / (std::string("helfrich_rt") + ext);
    save_mesh(path.string(), m);
    auto back = load_mesh(path.string());
    EXPECT_EQ(back.faces(), m.faces());
    EXPECT_EQ(back.vertices(), m.vertices());
    std::filesystem::remove(path);
  }
  expect_code(ErrorCode::IoError, [] { load_mesh("/nonexistent/mesh.obj"); });
}

TEST(Io, ObjQuadsAndSlashes) {
  std::istringstream in("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0.5 0.5 1\n"
                        "f 1/1 2/2 3/3 4/4\nf 2//2 1//1 5//5\nf 3 2 5\nf 4 3 5\nf -5 -2 -1\n");
  auto m = read_obj(in);
  EXPECT_EQ(m.num_faces(), 6u);
  EXPECT_NEAR(algebraic_volume(m), 1.0 / 3.0, 1e-12);
}
