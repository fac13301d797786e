#pragma once

#include "helfrich/core.hpp"

#include <array>
#include <cstdint>
#include <numeric>
#include <queue>
#include <span>
#include <sstream>
#include <utility>

namespace helfrich {

using Face = std::array<int, 3>;

// Closed, consistently oriented triangle surface. The face normal is the
// right-hand normal of the winding; constructors in shapes.hpp wind faces so
// that it is the inner normal.
class TriangleImmersion {
 public:
  static TriangleImmersion build(std::vector<Vec3> vertices, std::vector<Face> faces) {
    TriangleImmersion m;
    m.vertices_ = std::move(vertices);
    m.faces_ = std::move(faces);
    m.validate_indices();
    m.check_degenerate();
    m.build_topology();
    return m;
  }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_faces() const { return faces_.size(); }
  const Vec3& vertex(int i) const { return vertices_[i]; }
  const Face& face(int f) const { return faces_[f]; }

  // Neighbour across edge (v_k, v_{k+1}) of face f.
  const std::array<int, 3>& face_neighbors(int f) const { return adjacency_[f]; }

  std::span<const int> vertex_faces(int v) const {
    return {vf_index_.data() + vf_offset_[v], vf_index_.data() + vf_offset_[v + 1]};
  }

  int component_count() const { return n_components_; }
  int face_component(int f) const { return face_component_[f]; }

  // Same topology, new positions. Only the degeneracy check is repeated.
  TriangleImmersion with_vertices(std::vector<Vec3> vertices) const {
    if (vertices.size() != vertices_.size())
      throw Error(ErrorCode::InvalidInput, "vertex count changed");
    TriangleImmersion m = *this;
    m.vertices_ = std::move(vertices);
    m.check_degenerate();
    return m;
  }

 private:
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<std::array<int, 3>> adjacency_;
  std::vector<int> vf_offset_, vf_index_;
  std::vector<int> face_component_;
  int n_components_ = 0;

  void validate_indices() const {
    if (vertices_.empty() || faces_.empty())
      throw Error(ErrorCode::InvalidInput, "empty vertex or face list");
    const int nv = static_cast<int>(vertices_.size());
    std::vector<char> used(nv, 0);
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      for (int k = 0; k < 3; ++k) {
        int v = faces_[f][k];
        if (v < 0 || v >= nv)
          throw Error(ErrorCode::InvalidInput, "face " + std::to_string(f) + " has index " +
                                                   std::to_string(v) + " out of range");
        used[v] = 1;
      }
      const auto& t = faces_[f];
      if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
        throw Error(ErrorCode::DegenerateFace, "face " + std::to_string(f) + " repeats a vertex");
    }
    for (int v = 0; v < nv; ++v)
      if (!used[v])
        throw Error(ErrorCode::InvalidInput, "vertex " + std::to_string(v) + " is not used by any face");
  }

  void check_degenerate() const {
    std::vector<double> areas(faces_.size());
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      const auto& t = faces_[f];
      areas[f] = 0.5 * (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]).norm();
      if (!std::isfinite(areas[f]))
        throw Error(ErrorCode::DegenerateFace, "face " + std::to_string(f) + " has non-finite area");
    }
    double mean = pairwise_sum(areas) / static_cast<double>(areas.size());
    for (std::size_t f = 0; f < faces_.size(); ++f)
      if (areas[f] <= 1e-12 * mean)
        throw Error(ErrorCode::DegenerateFace, "face " + std::to_string(f) + " has area " +
                                                   std::to_string(areas[f]));
  }

  void build_topology() {
    struct HalfEdge {
      std::uint64_t key;
      int a, b, face, slot;
    };
    const std::size_t nf = faces_.size();
    std::vector<HalfEdge> he;
    he.reserve(3 * nf);
    for (std::size_t f = 0; f < nf; ++f)
      for (int k = 0; k < 3; ++k) {
        int a = faces_[f][k], b = faces_[f][(k + 1) % 3];
        std::uint64_t lo = std::min(a, b), hi = std::max(a, b);
        he.push_back({(lo << 32) | hi, a, b, static_cast<int>(f), k});
      }
    std::sort(he.begin(), he.end(), [](const HalfEdge& x, const HalfEdge& y) {
      return x.key != y.key ? x.key < y.key : x.face < y.face;
    });
    adjacency_.assign(nf, {-1, -1, -1});
    for (std::size_t i = 0; i < he.size();) {
      std::size_t j = i;
      while (j < he.size() && he[j].key == he[i].key) ++j;
      if (j - i != 2) {
        std::ostringstream os;
        os << "edge (" << he[i].a << "," << he[i].b << ") is shared by " << (j - i) << " face(s)";
        throw Error(ErrorCode::NonManifoldEdge, os.str());
      }
      const HalfEdge& x = he[i];
      const HalfEdge& y = he[i + 1];
      if (x.a != y.b || x.b != y.a) {
        std::ostringstream os;
        os << "faces " << x.face << " and " << y.face << " traverse edge (" << x.a << "," << x.b
           << ") in the same direction";
        throw Error(ErrorCode::InconsistentOrientation, os.str());
      }
      adjacency_[x.face][x.slot] = y.face;
      adjacency_[y.face][y.slot] = x.face;
      i = j;
    }

    const std::size_t nv = vertices_.size();
    vf_offset_.assign(nv + 1, 0);
    for (const auto& t : faces_)
      for (int v : t) ++vf_offset_[v + 1];
    for (std::size_t v = 0; v < nv; ++v) vf_offset_[v + 1] += vf_offset_[v];
    vf_index_.assign(vf_offset_.back(), 0);
    std::vector<int> fill(vf_offset_.begin(), vf_offset_.end() - 1);
    for (std::size_t f = 0; f < nf; ++f)
      for (int v : faces_[f]) vf_index_[fill[v]++] = static_cast<int>(f);

    face_component_.assign(nf, -1);
    n_components_ = 0;
    for (std::size_t s = 0; s < nf; ++s) {
      if (face_component_[s] >= 0) continue;
      std::queue<int> q;
      q.push(static_cast<int>(s));
      face_component_[s] = n_components_;
      while (!q.empty()) {
        int f = q.front();
        q.pop();
        for (int g : adjacency_[f])
          if (face_component_[g] < 0) {
            face_component_[g] = n_components_;
            q.push(g);
          }
      }
      ++n_components_;
    }
  }
};

inline TriangleImmersion build_immersion(std::vector<Vec3> vertices, std::vector<Face> faces) {
  return TriangleImmersion::build(std::move(vertices), std::move(faces));
}

struct Triangle {
  Vec3 a, b, c;
  Vec3 cross() const { return (b - a).cross(c - a); }
  double area() const { return 0.5 * cross().norm(); }
  Vec3 normal() const { return cross().normalized(); }
  Vec3 centroid() const { return (a + b + c) / 3.0; }
  double circumradius() const {
    double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
    return la * lb * lc / (4.0 * area());
  }
};

inline Triangle triangle(const TriangleImmersion& m, int f) {
  const Face& t = m.face(f);
  return {m.vertex(t[0]), m.vertex(t[1]), m.vertex(t[2])};
}

inline double face_area(const TriangleImmersion& m, int f) { return triangle(m, f).area(); }
inline Vec3 face_normal(const TriangleImmersion& m, int f) { return triangle(m, f).normal(); }

inline double total_area(const TriangleImmersion& m) {
  return pairwise_sum(parallel::map<double>(m.num_faces(), [&](std::size_t f) { return face_area(m, f); }));
}

// -(1/3) sum <centroid, n> area = -(1/6) sum det(a, b, c)
inline double algebraic_volume(const TriangleImmersion& m) {
  auto terms = parallel::map<double>(m.num_faces(), [&](std::size_t f) {
    Triangle t = triangle(m, f);
    return -t.a.dot(t.b.cross(t.c)) / 6.0;
  });
  return pairwise_sum(terms);
}

inline double isoperimetric_ratio(const TriangleImmersion& m) {
  double a = total_area(m), v = algebraic_volume(m);
  return a * a * a / (v * v);
}

inline double mean_edge_length(const TriangleImmersion& m) {
  auto terms = parallel::map<double>(m.num_faces(), [&](std::size_t f) {
    Triangle t = triangle(m, f);
    return (t.b - t.a).norm() + (t.c - t.b).norm() + (t.a - t.c).norm();
  });
  return pairwise_sum(terms) / (3.0 * static_cast<double>(m.num_faces()));
}

inline double diameter(const TriangleImmersion& m) {
  const auto& v = m.vertices();
  auto best = parallel::map<double>(v.size(), [&](std::size_t i) {
    double d = 0.0;
    for (std::size_t j = i + 1; j < v.size(); ++j) d = std::max(d, (v[i] - v[j]).squaredNorm());
    return d;
  });
  return std::sqrt(*std::max_element(best.begin(), best.end()));
}

inline TriangleImmersion transform(const TriangleImmersion& m, double scale, const Vec3& translation) {
  if (!(scale > 0.0)) throw Error(ErrorCode::NonPositiveScale, "scale must be positive");
  std::vector<Vec3> v(m.vertices());
  for (auto& x : v) x = scale * x + translation;
  return m.with_vertices(std::move(v));
}

inline TriangleImmersion reversed(const TriangleImmersion& m) {
  std::vector<Face> f(m.faces());
  for (auto& t : f) std::swap(t[1], t[2]);
  return build_immersion(m.vertices(), std::move(f));
}

inline TriangleImmersion disjoint_union(const TriangleImmersion& x, const TriangleImmersion& y) {
  std::vector<Vec3> v(x.vertices());
  v.insert(v.end(), y.vertices().begin(), y.vertices().end());
  std::vector<Face> f(x.faces());
  const int off = static_cast<int>(x.num_vertices());
  for (auto t : y.faces()) f.push_back({t[0] + off, t[1] + off, t[2] + off});
  return build_immersion(std::move(v), std::move(f));
}

// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection 5.1.5).
inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  Vec3 ab = b - a, ac = c - a, ap = p - a;
  double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  Vec3 bp = p - b;
  double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;
  Vec3 cp = p - c;
  double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;
  double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

inline double point_triangle_distance(const Vec3& p, const Triangle& t) {
  return (p - closest_point_on_triangle(p, t.a, t.b, t.c)).norm();
}

// Sheet count at x0: faces meeting the shell eps/2 <= |x - x0| < eps, grouped
// by edge adjacency. Using the shell instead of the full ball separates two
// sheets joined by a neck narrower than eps/2.
inline int multiplicity_at(const TriangleImmersion& m, const Vec3& x0, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidInput, "eps must be positive");
  const std::size_t nf = m.num_faces();
  std::vector<char> in(nf, 0);
  for (std::size_t f = 0; f < nf; ++f) {
    Triangle t = triangle(m, f);
    double far = std::max({(t.a - x0).norm(), (t.b - x0).norm(), (t.c - x0).norm()});
    if (far < 0.5 * eps) continue;
    if (point_triangle_distance(x0, t) < eps) in[f] = 1;
  }
  int clusters = 0;
  std::vector<char> seen(nf, 0);
  for (std::size_t s = 0; s < nf; ++s) {
    if (!in[s] || seen[s]) continue;
    ++clusters;
    std::vector<int> stack{static_cast<int>(s)};
    seen[s] = 1;
    while (!stack.empty()) {
      int f = stack.back();
      stack.pop_back();
      for (int g : m.face_neighbors(f))
        if (in[g] && !seen[g]) {
          seen[g] = 1;
          stack.push_back(g);
        }
    }
  }
  return clusters;
}

inline int multiplicity_at(const TriangleImmersion& m, const Vec3& x0) {
  return multiplicity_at(m, x0, 2.0 * mean_edge_length(m));
}

}  // namespace helfrich
