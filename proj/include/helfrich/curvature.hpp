#pragma once

#include "helfrich/mesh.hpp"

namespace helfrich {

struct CurvatureField {
  std::vector<Vec3> H;        // mean curvature vector, 1/length
  std::vector<double> H_sc;   // <H, n>
  std::vector<double> area;   // barycentric vertex area
  std::vector<Vec3> normal;   // area-weighted vertex normal (winding side)
};

inline constexpr double kCotangentCap = 1e8;

// Cotangents of the interior angles at the three corners of face f.
inline std::array<double, 3> corner_cotangents(const TriangleImmersion& m, int f) {
  std::array<double, 3> c{};
  const Face& t = m.face(f);
  for (int k = 0; k < 3; ++k) {
    const Vec3& p = m.vertex(t[k]);
    Vec3 u = m.vertex(t[(k + 1) % 3]) - p;
    Vec3 w = m.vertex(t[(k + 2) % 3]) - p;
    double s = u.cross(w).norm();
    double cot = u.dot(w) / s;
    if (!std::isfinite(cot) || std::abs(cot) > kCotangentCap)
      throw Error(ErrorCode::NumericalDegeneracy, "cotangent weight exceeds cap on face " + std::to_string(f));
    c[k] = cot;
  }
  return c;
}

// H_i = (1/(2 A_i)) sum_j (cot a_ij + cot b_ij)(x_j - x_i); equals 2/r times the
// inner normal on a round sphere of radius r.
inline CurvatureField mean_curvature(const TriangleImmersion& m) {
  const std::size_t nf = m.num_faces(), nv = m.num_vertices();
  std::vector<std::array<double, 3>> cots(nf);
  parallel::for_each_index(nf, [&](std::size_t f) { cots[f] = corner_cotangents(m, static_cast<int>(f)); });

  CurvatureField cf;
  cf.H.resize(nv);
  cf.H_sc.resize(nv);
  cf.area.resize(nv);
  cf.normal.resize(nv);
  parallel::for_each_index(nv, [&](std::size_t vi) {
    const int v = static_cast<int>(vi);
    Vec3 lap = Vec3::Zero(), nrm = Vec3::Zero();
    double a = 0.0;
    for (int f : m.vertex_faces(v)) {
      const Face& t = m.face(f);
      int k = t[0] == v ? 0 : (t[1] == v ? 1 : 2);
      int j = t[(k + 1) % 3], l = t[(k + 2) % 3];
      const Vec3& xi = m.vertex(v);
      // edge (v, j) is opposite corner l; edge (v, l) is opposite corner j
      lap += cots[f][(k + 2) % 3] * (m.vertex(j) - xi) + cots[f][(k + 1) % 3] * (m.vertex(l) - xi);
      Vec3 cr = (m.vertex(j) - xi).cross(m.vertex(l) - xi);
      a += cr.norm() / 6.0;
      nrm += 0.5 * cr;
    }
    cf.area[v] = a;
    cf.H[v] = lap / (2.0 * a);
    cf.normal[v] = nrm.normalized();
    cf.H_sc[v] = cf.H[v].dot(cf.normal[v]);
  });
  return cf;
}

}  // namespace helfrich
