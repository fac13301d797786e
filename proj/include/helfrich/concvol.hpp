#pragma once

#include "helfrich/varifold.hpp"

#include <json.hpp>

#include <memory>
#include <variant>

namespace helfrich {

struct ConcVolResult {
  double value = 0.0;
  double abs_error_est = 0.0;
  int depth = 0;
  std::string route;
};

inline void to_json(nlohmann::ordered_json& j, const ConcVolResult& r) {
  j = nlohmann::ordered_json{
      {"value", r.value}, {"abs_error_est", r.abs_error_est}, {"depth", r.depth}, {"route", r.route}};
}

inline void check_tol(double tol) {
  if (!(tol > 1e-8 && tol < 1e-1)) throw Error(ErrorCode::TolOutOfRange, "tol must lie in (1e-8, 1e-1)");
}

namespace detail {

// area/3 * sum over edge midpoints of |m - x0|^-2
inline double inv_sq_rule(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& x0) {
  double area = 0.5 * (b - a).cross(c - a).norm();
  Vec3 m[3] = {0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)};
  double s = 0.0;
  for (const auto& p : m) s += 1.0 / (p - x0).squaredNorm();
  return area * s / 3.0;
}

struct SingularQuad {
  Vec3 x0;
  double prefactor;  // |<x - x0, n>|, constant on the face
  double fail_limit;
  int max_depth = 12;
  int depth_used = 0;
  double err = 0.0;
  bool failed = false;

  static bool near(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& x0) {
    Triangle t{a, b, c};
    return point_triangle_distance(x0, t) < 3.0 * t.circumradius();
  }

  double refine(const Vec3& a, const Vec3& b, const Vec3& c, double coarse, int depth, double local_tol) {
    Vec3 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
    const Vec3 kids[4][3] = {{a, ab, ca}, {ab, b, bc}, {ca, bc, c}, {ab, bc, ca}};
    double q[4], fine = 0.0;
    for (int k = 0; k < 4; ++k) {
      q[k] = inv_sq_rule(kids[k][0], kids[k][1], kids[k][2], x0);
      fine += q[k];
    }
    double diff = prefactor * std::abs(fine - coarse);
    if (diff <= local_tol || depth >= max_depth) {
      if (depth >= max_depth && diff > fail_limit) failed = true;
      depth_used = std::max(depth_used, depth);
      err += diff;
      return fine;
    }
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) sum += refine(kids[k][0], kids[k][1], kids[k][2], q[k], depth + 1, 0.5 * local_tol);
    return sum;
  }
};

struct FaceCvol {
  double value = 0.0, err = 0.0;
  int depth = 0;
  bool failed = false;
};

}  // namespace detail

// -int <x - x0, n> / |x - x0|^2 over the mesh. On a flat face <x - x0, n> is
// constant, so only int |x - x0|^-2 needs the adaptive rule.
inline ConcVolResult concentrated_volume(const TriangleImmersion& m, const Vec3& x0, double tol = 1e-4) {
  check_tol(tol);
  const std::size_t nf = m.num_faces();
  std::vector<double> pref(nf), coarse(nf);
  std::vector<char> is_near(nf);
  parallel::for_each_index(nf, [&](std::size_t f) {
    Triangle t = triangle(m, static_cast<int>(f));
    Vec3 nrm = t.normal();
    const Vec3* v[3] = {&t.a, &t.b, &t.c};
    const Vec3* best = v[0];
    for (auto p : v)
      if ((*p - x0).squaredNorm() < (*best - x0).squaredNorm()) best = p;
    double c = -(*best - x0).dot(nrm);
    if (std::abs(c) <= 1e-13 * t.circumradius()) c = 0.0;
    pref[f] = c;
    is_near[f] = detail::SingularQuad::near(t.a, t.b, t.c, x0);
    coarse[f] = c == 0.0 ? 0.0 : c * detail::inv_sq_rule(t.a, t.b, t.c, x0);
  });
  std::vector<double> absc(nf);
  for (std::size_t f = 0; f < nf; ++f) absc[f] = std::abs(coarse[f]);
  const double scale = std::max(std::abs(pairwise_sum(coarse)), 1e-3 * pairwise_sum(absc));
  std::size_t n_active = 0;
  for (std::size_t f = 0; f < nf; ++f) n_active += pref[f] != 0.0;
  const double face_tol = tol * scale / static_cast<double>(std::max<std::size_t>(1, n_active));

  auto per_face = parallel::map<detail::FaceCvol>(nf, [&](std::size_t f) {
    detail::FaceCvol out;
    if (pref[f] == 0.0) return out;
    Triangle t = triangle(m, static_cast<int>(f));
    detail::SingularQuad q{x0, std::abs(pref[f]), 10.0 * tol * scale};
    if (!is_near[f]) {
      out.value = (pref[f] > 0 ? 1.0 : -1.0) * q.prefactor * q.refine(t.a, t.b, t.c, coarse[f] / pref[f], 1, face_tol);
      out.err = q.err;
      out.depth = q.depth_used;
      out.failed = q.failed;
      return out;
    }
    // split at the point of the face closest to x0 so the peak sits on a corner
    Vec3 p = closest_point_on_triangle(x0, t.a, t.b, t.c);
    const double R = t.circumradius();
    std::vector<std::array<Vec3, 3>> pieces;
    const Vec3 corners[3] = {t.a, t.b, t.c};
    bool at_vertex = false;
    for (const auto& cpt : corners) at_vertex = at_vertex || (p - cpt).norm() <= 1e-9 * R;
    if (at_vertex) {
      pieces.push_back({t.a, t.b, t.c});
    } else {
      for (int k = 0; k < 3; ++k) {
        std::array<Vec3, 3> s{p, corners[k], corners[(k + 1) % 3]};
        if (Triangle{s[0], s[1], s[2]}.area() > 1e-14 * t.area()) pieces.push_back(s);
      }
    }
    double sum = 0.0;
    for (const auto& s : pieces) {
      double c0 = detail::inv_sq_rule(s[0], s[1], s[2], x0);
      sum += q.refine(s[0], s[1], s[2], c0, 1, face_tol);
    }
    out.value = (pref[f] > 0 ? 1.0 : -1.0) * q.prefactor * sum;
    out.err = q.err;
    out.depth = q.depth_used;
    out.failed = q.failed;
    return out;
  });

  ConcVolResult r;
  r.route = "surface-quadrature";
  std::vector<double> vals(nf), errs(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    vals[f] = per_face[f].value;
    errs[f] = per_face[f].err;
    r.depth = std::max(r.depth, per_face[f].depth);
    if (per_face[f].failed)
      throw Error(ErrorCode::NonConvergent, "face " + std::to_string(f) + " did not converge at depth 12");
  }
  r.value = pairwise_sum(vals);
  r.abs_error_est = pairwise_sum(errs);
  return r;
}

// Plain atom sum; atoms within 1e-14 of x0 are skipped.
inline double concentrated_volume(const OrientedVarifoldAtoms& V, const Vec3& x0) {
  std::vector<double> t(V.size(), 0.0);
  for (std::size_t i = 0; i < V.size(); ++i) {
    Vec3 d = V.x[i] - x0;
    double r2 = d.squaredNorm();
    if (r2 > 1e-28) t[i] = -V.w[i] * d.dot(V.n[i]) / r2;
  }
  return pairwise_sum(t);
}

// -(1/3) int <x - x0, n> dV
inline double algebraic_volume_at(const OrientedVarifoldAtoms& V, const Vec3& x0) {
  std::vector<double> t(V.size());
  for (std::size_t i = 0; i < V.size(); ++i) t[i] = -V.w[i] * (V.x[i] - x0).dot(V.n[i]) / 3.0;
  return pairwise_sum(t);
}

inline double cvol_upper_bound(double volume) {
  if (volume < 0.0) throw Error(ErrorCode::NegativeVolume, "volume must be nonnegative");
  return 3.0 * std::cbrt(4.0 * kPi * kPi * volume);
}

struct Ball {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

// Tube radius r around the circle of radius 1 + r in the xy plane.
struct SolidTorus {
  double r = 0.5;
};

// Points within r of the z-axis segment [-length/2, length/2].
struct CappedCylinderSolid {
  double length = 0.0;
  double r = 1.0;
};

struct WeightedPart;

struct WeightedUnion {
  std::vector<WeightedPart> parts;
};

struct SolidRegion {
  std::variant<Ball, SolidTorus, CappedCylinderSolid, WeightedUnion> shape;
};

struct WeightedPart {
  SolidRegion region;
  int multiplicity = 1;
};

namespace detail {

struct Box {
  Vec3 lo, hi;
};

inline double sdf(const Ball& b, const Vec3& x) { return (x - b.center).norm() - b.radius; }

inline double sdf(const SolidTorus& t, const Vec3& x) {
  double q = std::hypot(x.x(), x.y()) - (1.0 + t.r);
  return std::hypot(q, x.z()) - t.r;
}

inline double sdf(const CappedCylinderSolid& c, const Vec3& x) {
  double z = std::clamp(x.z(), -0.5 * c.length, 0.5 * c.length);
  return (x - Vec3(0, 0, z)).norm() - c.r;
}

inline Box bounds(const Ball& b) {
  Vec3 e = Vec3::Constant(b.radius);
  return {b.center - e, b.center + e};
}
inline Box bounds(const SolidTorus& t) {
  double R = 1.0 + 2.0 * t.r;
  return {Vec3(-R, -R, -t.r), Vec3(R, R, t.r)};
}
inline Box bounds(const CappedCylinderSolid& c) {
  double h = 0.5 * c.length + c.r;
  return {Vec3(-c.r, -c.r, -h), Vec3(c.r, c.r, h)};
}

inline double gauss_inv_sq(const Vec3& center, double h, const Vec3& x0) {
  const double g = 0.5 * h / std::sqrt(3.0);
  double s = 0.0;
  for (int i = 0; i < 8; ++i) {
    Vec3 p = center + Vec3((i & 1) ? g : -g, (i & 2) ? g : -g, (i & 4) ? g : -g);
    s += 1.0 / (p - x0).squaredNorm();
  }
  return s * h * h * h / 8.0;
}

template <class Shape>
struct OctreeQuad {
  const Shape& shape;
  Vec3 x0;
  int boundary_depth;
  int near_depth = 10;

  double cell(const Vec3& c, double h, int depth) const {
    const double diag = std::sqrt(3.0) * h;
    double d = sdf(shape, c);
    if (d >= 0.5 * diag) return 0.0;
    bool cut = d > -0.5 * diag;
    bool near = (c - x0).norm() < 2.0 * diag;
    bool split = (cut && depth < boundary_depth) || (near && depth < near_depth);
    if (!split) {
      double frac = cut ? std::clamp(0.5 - d / h, 0.0, 1.0) : 1.0;
      return frac == 0.0 ? 0.0 : frac * gauss_inv_sq(c, h, x0);
    }
    double s = 0.0, q = 0.25 * h;
    for (int i = 0; i < 8; ++i)
      s += cell(c + Vec3((i & 1) ? q : -q, (i & 2) ? q : -q, (i & 4) ? q : -q), 0.5 * h, depth + 1);
    return s;
  }

  double integrate(const Box& box) const {
    Vec3 ext = box.hi - box.lo;
    double h = ext.maxCoeff() / 8.0 * 1.0001;
    int nx = std::max(1, static_cast<int>(std::ceil(ext.x() / h)));
    int ny = std::max(1, static_cast<int>(std::ceil(ext.y() / h)));
    int nz = std::max(1, static_cast<int>(std::ceil(ext.z() / h)));
    Vec3 origin = 0.5 * (box.lo + box.hi) - 0.5 * h * Vec3(nx, ny, nz);
    const std::size_t n = static_cast<std::size_t>(nx) * ny * nz;
    auto vals = parallel::map<double>(n, [&](std::size_t k) {
      int i = static_cast<int>(k % nx), j = static_cast<int>((k / nx) % ny), l = static_cast<int>(k / (nx * ny));
      return cell(origin + h * Vec3(i + 0.5, j + 0.5, l + 0.5), h, 0);
    });
    return pairwise_sum(vals);
  }
};

template <class Shape>
ConcVolResult octree_cvol(const Shape& s, const Vec3& x0, double tol) {
  double prev = 0.0;
  for (int D = 2; D <= 8; ++D) {
    double v = OctreeQuad<Shape>{s, x0, D}.integrate(bounds(s));
    double diff = std::abs(v - prev);
    if (D > 2 && diff < tol * std::abs(v)) return {v, diff, D, "solid-integral"};
    if (D == 8) {
      if (diff > 10.0 * tol * std::abs(v))
        throw Error(ErrorCode::NonConvergent, "solid quadrature did not converge at depth 8");
      return {v, diff, D, "solid-integral"};
    }
    prev = v;
  }
  return {};
}

}  // namespace detail

// int_E Theta / |x - x0|^2 over the solid.
inline ConcVolResult concentrated_volume_solid(const SolidRegion& region, const Vec3& x0, double tol = 1e-3) {
  check_tol(tol);
  return std::visit(
      [&](const auto& s) -> ConcVolResult {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, WeightedUnion>) {
          ConcVolResult r{0.0, 0.0, 0, "solid-integral"};
          for (const auto& part : s.parts) {
            if (part.multiplicity < 1) throw Error(ErrorCode::InvalidInput, "multiplicity must be >= 1");
            ConcVolResult p = concentrated_volume_solid(part.region, x0, tol);
            r.value += part.multiplicity * p.value;
            r.abs_error_est += part.multiplicity * p.abs_error_est;
            r.depth = std::max(r.depth, p.depth);
          }
          return r;
        } else {
          if constexpr (std::is_same_v<S, Ball>) {
            if (!(s.radius > 0.0)) throw Error(ErrorCode::InvalidInput, "ball radius must be positive");
            double d = (x0 - s.center).norm();
            if (d == 0.0) return {4.0 * kPi * s.radius, 0.0, 0, "solid-integral"};
            if (std::abs(d - s.radius) <= 1e-12 * s.radius) return {2.0 * kPi * s.radius, 0.0, 0, "solid-integral"};
          } else if constexpr (std::is_same_v<S, SolidTorus>) {
            if (!(s.r > 0.0)) throw Error(ErrorCode::InvalidInput, "tube radius must be positive");
          } else {
            if (!(s.r > 0.0) || !(s.length >= 0.0)) throw Error(ErrorCode::InvalidInput, "bad capped cylinder");
          }
          return detail::octree_cvol(s, x0, tol);
        }
      },
      region.shape);
}

}  // namespace helfrich
