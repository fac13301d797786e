#pragma once

#include "helfrich/mesh.hpp"

#include <functional>
#include <map>

namespace helfrich {

inline constexpr double kFineResolution = 0.03;

// Boundary part of a varifold: points with unit direction eta and line weight.
struct BoundaryAtoms {
  std::vector<Vec3> x;
  std::vector<Vec3> eta;
  std::vector<double> w;
  double total_mass() const { return pairwise_sum(w); }
  std::size_t size() const { return x.size(); }
};

namespace detail {

inline std::vector<Vec3> icosahedron_vertices() {
  // 0 north pole, 1..5 upper ring, 6..10 lower ring, 11 south pole
  std::vector<Vec3> v;
  const double z = 1.0 / std::sqrt(5.0), rho = 2.0 / std::sqrt(5.0);
  v.emplace_back(0, 0, 1);
  for (int k = 0; k < 5; ++k) v.emplace_back(rho * std::cos(2 * kPi * k / 5), rho * std::sin(2 * kPi * k / 5), z);
  for (int k = 0; k < 5; ++k)
    v.emplace_back(rho * std::cos(2 * kPi * (k + 0.5) / 5), rho * std::sin(2 * kPi * (k + 0.5) / 5), -z);
  v.emplace_back(0, 0, -1);
  return v;
}

inline std::vector<Face> icosahedron_faces() {
  std::vector<Face> f;
  for (int k = 0; k < 5; ++k) {
    int u0 = 1 + k, u1 = 1 + (k + 1) % 5, l0 = 6 + k, l1 = 6 + (k + 1) % 5;
    f.push_back({0, u1, u0});
    f.push_back({u0, u1, l0});
    f.push_back({u1, l1, l0});
    f.push_back({11, l0, l1});
  }
  return f;
}

struct ProfileSample {
  double rho, z, h;  // h: target edge length here
};

using ProfileCurve = std::function<Eigen::Vector2d(double)>;  // u in [0,1] -> (rho, z)
using SpacingFn = std::function<double(const Eigen::Vector2d&)>;

// Points along c about spacing(p) apart; skip_first drops u = 0.
inline void sample_curve(const ProfileCurve& c, const SpacingFn& spacing, bool skip_first,
                         std::vector<ProfileSample>& out) {
  const int dense = 4000;
  std::vector<double> cum(dense + 1, 0.0);
  Eigen::Vector2d prev = c(0.0);
  for (int i = 1; i <= dense; ++i) {
    Eigen::Vector2d p = c(static_cast<double>(i) / dense);
    cum[i] = cum[i - 1] + (p - prev).norm() / spacing(0.5 * (p + prev));
    prev = p;
  }
  int n = std::max(1, static_cast<int>(std::ceil(cum[dense] - 1e-9)));
  for (int s = skip_first ? 1 : 0; s <= n; ++s) {
    double u;
    if (s == 0) {
      u = 0.0;
    } else if (s == n) {
      u = 1.0;
    } else {
      double target = cum[dense] * s / n;
      int i = static_cast<int>(std::lower_bound(cum.begin(), cum.end(), target) - cum.begin());
      i = std::clamp(i, 1, dense);
      double t = (target - cum[i - 1]) / (cum[i] - cum[i - 1]);
      u = (i - 1 + std::clamp(t, 0.0, 1.0)) / dense;
    }
    Eigen::Vector2d p = c(u);
    out.push_back({p.x(), p.y(), spacing(p)});
  }
}

inline ProfileCurve arc(double zc, double radius, double th0, double th1) {
  return [=](double u) {
    double th = th0 + u * (th1 - th0);
    return Eigen::Vector2d(radius * std::cos(th), zc + radius * std::sin(th));
  };
}

inline ProfileCurve segment(Eigen::Vector2d p, Eigen::Vector2d q) {
  return [=](double u) { return Eigen::Vector2d(p + u * (q - p)); };
}

struct RingMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<int> ring_start, ring_size;  // per profile sample; size 1 for poles
};

// Revolves a profile about the z axis. Open profiles must start and end on
// the axis (poles); closed profiles wrap around. Profiles are traversed with
// the enclosed region on the left, and the winding is chosen so the face
// normal points into that region.
inline RingMesh revolve(const std::vector<ProfileSample>& prof, bool closed) {
  RingMesh rm;
  const int n = static_cast<int>(prof.size());
  std::vector<double> offset(n, 0.0);
  for (int k = 0; k < n; ++k) {
    const auto& s = prof[k];
    rm.ring_start.push_back(static_cast<int>(rm.vertices.size()));
    bool pole = !closed && (k == 0 || k == n - 1);
    if (pole) {
      rm.vertices.emplace_back(0.0, 0.0, s.z);
      rm.ring_size.push_back(1);
      continue;
    }
    int count = std::max(6, static_cast<int>(std::lround(2 * kPi * s.rho / s.h)));
    offset[k] = (k % 2) * 0.5;
    for (int j = 0; j < count; ++j) {
      double phi = 2 * kPi * (j + offset[k]) / count;
      rm.vertices.emplace_back(s.rho * std::cos(phi), s.rho * std::sin(phi), s.z);
    }
    rm.ring_size.push_back(count);
  }
  auto join = [&](int ka, int kb) {
    int na = rm.ring_size[ka], nb = rm.ring_size[kb];
    int sa = rm.ring_start[ka], sb = rm.ring_start[kb];
    if (na == 1) {
      for (int j = 0; j < nb; ++j) rm.faces.push_back({sa, sb + j, sb + (j + 1) % nb});
      return;
    }
    if (nb == 1) {
      for (int i = 0; i < na; ++i) rm.faces.push_back({sa + (i + 1) % na, sa + i, sb});
      return;
    }
    int i = 0, j = 0;
    while (i < na || j < nb) {
      double a_next = (i + 1 + offset[ka]) / na, b_next = (j + 1 + offset[kb]) / nb;
      bool advance_a = j == nb || (i < na && a_next <= b_next);
      int a0 = sa + i % na, b0 = sb + j % nb;
      if (advance_a) {
        rm.faces.push_back({a0, b0, sa + (i + 1) % na});
        ++i;
      } else {
        rm.faces.push_back({a0, b0, sb + (j + 1) % nb});
        ++j;
      }
    }
  };
  for (int k = 0; k + 1 < n; ++k) join(k, k + 1);
  if (closed) join(n - 1, 0);
  return rm;
}

inline TriangleImmersion to_immersion(RingMesh rm) {
  return build_immersion(std::move(rm.vertices), std::move(rm.faces));
}

struct DumbbellProfile {
  std::vector<ProfileSample> samples;
  double neck_bottom_z = 0, neck_top_z = 0;
};

}  // namespace detail

inline TriangleImmersion sphere(double r, int subdivisions) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidInput, "sphere radius must be positive");
  if (subdivisions < 0 || subdivisions > 7) throw Error(ErrorCode::InvalidInput, "subdivisions must be in [0,7]");
  auto v = detail::icosahedron_vertices();
  auto f = detail::icosahedron_faces();
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      int id = static_cast<int>(v.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<Face> g;
    g.reserve(4 * f.size());
    for (const auto& t : f) {
      int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
      g.push_back({t[0], ab, ca});
      g.push_back({ab, t[1], bc});
      g.push_back({ca, bc, t[2]});
      g.push_back({ab, bc, ca});
    }
    f = std::move(g);
  }
  for (auto& p : v) p *= r;
  return build_immersion(std::move(v), std::move(f));
}

inline TriangleImmersion sphere_at(const Vec3& center, double r, int subdivisions) {
  return transform(sphere(r, subdivisions), 1.0, center);
}

inline TriangleImmersion capped_cylinder(double l, double r, double resolution = kFineResolution) {
  if (!(l >= 0.0) || !(r > 0.0) || !(resolution > 0.0))
    throw Error(ErrorCode::InvalidInput, "capped_cylinder needs l >= 0, r > 0, resolution > 0");
  using namespace detail;
  SpacingFn h = [=](const Eigen::Vector2d&) { return resolution; };
  std::vector<ProfileSample> prof;
  sample_curve(arc(-0.5 * l, r, -kPi / 2, 0.0), h, false, prof);
  if (l > 0.0) sample_curve(segment({r, -0.5 * l}, {r, 0.5 * l}), h, true, prof);
  sample_curve(arc(0.5 * l, r, 0.0, kPi / 2), h, true, prof);
  return to_immersion(revolve(prof, false));
}

namespace detail {

inline DumbbellProfile dumbbell_profile(double a, double l, double r, double resolution) {
  if (!(a > 0.0) || !(r > 0.0) || r > 1.0 || !(l >= 0.0) || !(resolution > 0.0))
    throw Error(ErrorCode::InvalidInput, "dumbbell needs a > 0, 0 < r <= 1, l >= 0, resolution > 0");
  if (!(a < std::min(1.0, r) / 4.0)) throw Error(ErrorCode::NeckTooLarge, "neck a must be below min(1, r)/4");
  // Catenoid rho = a cosh(z/a) meets a sphere of radius R tangentially where cosh t = sqrt(R/a).
  auto junction = [a](double R) { return std::acosh(std::sqrt(R / a)); };
  const double t1 = junction(1.0), tr = junction(r);
  const double zc_up = a * t1 + std::tanh(t1);          // center of the capsule's lower cap
  const double zc_lo = -(a * tr + r * std::tanh(tr));   // center of the small sphere
  const double th_up = std::atan2(-std::tanh(t1), 1.0 / std::cosh(t1));
  const double th_lo = std::atan2(std::tanh(tr), 1.0 / std::cosh(tr));

  SpacingFn body = [=](const Eigen::Vector2d&) { return resolution; };
  SpacingFn neck = [=](const Eigen::Vector2d& p) { return std::min(resolution, 2 * kPi * p.x() / 24.0); };
  ProfileCurve cat = [=](double u) {
    double t = -tr + u * (tr + t1);
    return Eigen::Vector2d(a * std::cosh(t), a * t);
  };
  DumbbellProfile d;
  sample_curve(arc(zc_lo, r, -kPi / 2, th_lo), body, false, d.samples);
  sample_curve(cat, neck, true, d.samples);
  sample_curve(arc(zc_up, 1.0, th_up, 0.0), body, true, d.samples);
  if (l > 0.0) sample_curve(segment({1.0, zc_up}, {1.0, zc_up + l}), body, true, d.samples);
  sample_curve(arc(zc_up + l, 1.0, 0.0, kPi / 2), body, true, d.samples);
  d.neck_bottom_z = -a * tr;
  d.neck_top_z = a * t1;
  return d;
}

}  // namespace detail

// Capsule of radius 1 and cylinder length l above a sphere of radius r, joined
// by a catenoid neck of waist radius a centred at the origin.
inline TriangleImmersion dumbbell(double a, double l, double r, double resolution = kFineResolution) {
  return detail::to_immersion(detail::revolve(detail::dumbbell_profile(a, l, r, resolution).samples, false));
}

// Tube radius r around the circle of radius 1 + r in the xy plane.
inline TriangleImmersion torus(double r, double resolution = kFineResolution) {
  if (!(r > 0.0) || !(resolution > 0.0)) throw Error(ErrorCode::InvalidInput, "torus needs r > 0");
  using namespace detail;
  SpacingFn h = [=](const Eigen::Vector2d&) { return resolution; };
  std::vector<ProfileSample> prof;
  ProfileCurve loop = [=](double u) {
    double th = 2 * kPi * u;
    return Eigen::Vector2d(1 + r + r * std::cos(th), r * std::sin(th));
  };
  sample_curve(loop, h, false, prof);
  prof.pop_back();  // u = 1 repeats u = 0
  return to_immersion(revolve(prof, true));
}

// Unit sphere with outer normals plus torus(r) with inner normals; they touch
// along the equator.
inline TriangleImmersion sphere_torus_mixed(double r, double resolution = kFineResolution) {
  return disjoint_union(reversed(capped_cylinder(0.0, 1.0, resolution)), torus(r, resolution));
}

// Two unit icospheres touching at the origin.
inline TriangleImmersion touching_spheres(int subdivisions) {
  return disjoint_union(sphere_at(Vec3(0, 0, 1), 1.0, subdivisions), sphere_at(Vec3(0, 0, -1), 1.0, subdivisions));
}

struct Lens {
  TriangleImmersion mesh;
  BoundaryAtoms boundary;
};

// Caps z >= 0 of the unit sphere about (0,0,-1/2) and its mirror image, glued
// along the circle of radius sqrt(3)/2 in z = 0.
inline Lens lens(double resolution = kFineResolution) {
  using namespace detail;
  SpacingFn h = [=](const Eigen::Vector2d&) { return resolution; };
  std::vector<ProfileSample> prof;
  sample_curve(arc(0.5, 1.0, -kPi / 2, -kPi / 6), h, false, prof);
  const std::size_t crease = prof.size() - 1;
  sample_curve(arc(-0.5, 1.0, kPi / 6, kPi / 2), h, true, prof);
  RingMesh rm = revolve(prof, false);

  BoundaryAtoms b;
  const int n = rm.ring_size[crease];
  const double R = std::sqrt(3.0) / 2.0;
  for (int j = 0; j < n; ++j) {
    double phi = 2 * kPi * (j + 0.5) / n;
    Vec3 dir(std::cos(phi), std::sin(phi), 0.0);
    b.x.push_back(R * dir);
    b.eta.push_back(dir);
    b.w.push_back(std::sqrt(3.0) * 2 * kPi * R / n);
  }
  return {to_immersion(std::move(rm)), std::move(b)};
}

struct DumbbellParams {
  double a, l, r;
};

inline double dumbbell_isoperimetric_ratio(double a, double l, double r, double resolution) {
  return isoperimetric_ratio(dumbbell(a, l, r, resolution));
}

// Neck fixed at its floor; bisect on r when the unit-body dumbbell already
// exceeds the target, otherwise on the cylinder length l.
inline DumbbellParams match_isoperimetric(double I_target, double tol, double resolution = 0.05) {
  constexpr double a = 0.02;
  if (!(I_target >= 36 * kPi)) throw Error(ErrorCode::Unreachable, "target below 36 pi");
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidInput, "tol must be positive");
  auto I = [&](double l, double r) { return dumbbell_isoperimetric_ratio(a, l, r, resolution); };
  auto close = [&](double v) { return std::abs(v - I_target) <= tol * I_target; };

  double base = I(0.0, 1.0);
  if (close(base)) return {a, 0.0, 1.0};
  double lo, hi;
  std::function<double(double)> g;
  bool on_r = base > I_target;
  if (on_r) {
    lo = 4 * a * 1.001;
    hi = 1.0;
    g = [&](double r) { return I(0.0, r); };
  } else {
    lo = 0.0;
    hi = 1.0;
    g = [&](double l) { return I(l, 1.0); };
    while (g(hi) < I_target) {
      hi *= 2;
      if (hi > 256) throw Error(ErrorCode::Unreachable, "cylinder length bracket exceeded");
    }
  }
  double glo = g(lo), ghi = g(hi);
  if ((glo - I_target) * (ghi - I_target) > 0)
    throw Error(ErrorCode::Unreachable, "target outside the dumbbell family at the neck floor");
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi), gm = g(mid);
    if (close(gm)) return on_r ? DumbbellParams{a, 0.0, mid} : DumbbellParams{a, mid, 1.0};
    if ((gm - I_target) * (glo - I_target) > 0) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  throw Error(ErrorCode::Unreachable, "bisection did not reach tolerance");
}

}  // namespace helfrich
