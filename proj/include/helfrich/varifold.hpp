#pragma once

#include "helfrich/curvature.hpp"
#include "helfrich/mesh_io.hpp"

#include <functional>
#include <ostream>

namespace helfrich {

struct OrientedVarifoldAtoms {
  std::vector<Vec3> x;
  std::vector<Vec3> n;       // unit normal
  std::vector<double> w;     // area weight
  std::vector<Vec3> H;       // mean curvature vector at the atom; may be empty
  std::string source;
  double resolution = 0.0;   // mean edge length of the source mesh, 0 if unknown

  std::size_t size() const { return x.size(); }
  double total_weight() const { return pairwise_sum(w); }
  bool has_curvature() const { return H.size() == x.size(); }
  double H_sc(std::size_t i) const { return H[i].dot(n[i]); }
};

// order 1: one centroid atom per face; order 3: three edge-midpoint atoms of
// weight area/3. H is interpolated linearly from the vertex field.
inline OrientedVarifoldAtoms quadrature_varifold(const TriangleImmersion& m, int order, bool with_curvature = true) {
  if (order != 1 && order != 3) throw Error(ErrorCode::InvalidInput, "order must be 1 or 3");
  CurvatureField cf;
  if (with_curvature) cf = mean_curvature(m);
  OrientedVarifoldAtoms V;
  V.source = "mesh/order" + std::to_string(order);
  V.resolution = mean_edge_length(m);
  const std::size_t nf = m.num_faces();
  const std::size_t k = static_cast<std::size_t>(order);
  V.x.resize(k * nf);
  V.n.resize(k * nf);
  V.w.resize(k * nf);
  if (with_curvature) V.H.resize(k * nf);
  parallel::for_each_index(nf, [&](std::size_t f) {
    Triangle t = triangle(m, static_cast<int>(f));
    const Face& ids = m.face(static_cast<int>(f));
    Vec3 nrm = t.normal();
    double a = t.area();
    if (order == 1) {
      V.x[f] = t.centroid();
      V.n[f] = nrm;
      V.w[f] = a;
      if (with_curvature) V.H[f] = (cf.H[ids[0]] + cf.H[ids[1]] + cf.H[ids[2]]) / 3.0;
      return;
    }
    const Vec3 p[3] = {t.a, t.b, t.c};
    for (int e = 0; e < 3; ++e) {
      std::size_t i = 3 * f + e;
      V.x[i] = 0.5 * (p[e] + p[(e + 1) % 3]);
      V.n[i] = nrm;
      V.w[i] = a / 3.0;
      if (with_curvature) V.H[i] = 0.5 * (cf.H[ids[e]] + cf.H[ids[(e + 1) % 3]]);
    }
  });
  return V;
}

inline OrientedVarifoldAtoms reverse_orientation(const OrientedVarifoldAtoms& V) {
  OrientedVarifoldAtoms R = V;
  for (auto& v : R.n) v = -v;
  return R;
}

// Distances sorted once; mass_within answers any radius by binary search.
class RadialIndex {
 public:
  RadialIndex(const std::vector<Vec3>& x, const std::vector<double>& w, const Vec3& x0) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = (x[i] - x0).norm();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    dist_.resize(x.size());
    prefix_.assign(x.size() + 1, 0.0);
    for (std::size_t k = 0; k < order.size(); ++k) {
      dist_[k] = d[order[k]];
      prefix_[k + 1] = prefix_[k] + w[order[k]];
    }
  }
  double mass_within(double rho) const {
    auto it = std::upper_bound(dist_.begin(), dist_.end(), rho);
    return prefix_[it - dist_.begin()];
  }

 private:
  std::vector<double> dist_, prefix_;
};

inline double weight_in_ball(const OrientedVarifoldAtoms& V, const Vec3& x0, double rho) {
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidInput, "rho must be positive");
  return RadialIndex(V.x, V.w, x0).mass_within(rho);
}

struct DensitySample {
  double rho, density;
};

inline std::vector<DensitySample> density_profile(const OrientedVarifoldAtoms& V, const Vec3& x0,
                                                  const std::vector<double>& rhos) {
  for (double r : rhos)
    if (!(r >= 3.0 * V.resolution))
      throw Error(ErrorCode::RhoBelowResolution,
                  "rho " + format_double(r) + " below 3x mean edge " + format_double(V.resolution));
  RadialIndex idx(V.x, V.w, x0);
  std::vector<DensitySample> out;
  for (double r : rhos) out.push_back({r, idx.mass_within(r) / (kPi * r * r)});
  return out;
}

struct TestField {
  std::function<Vec3(const Vec3&)> X;
  std::function<Eigen::Matrix3d(const Vec3&)> jacobian;
};

// |dV(X) + int <X, H>| relative to sum w |div_T X| + sum w |<X, H>|.
inline double first_variation_residual(const OrientedVarifoldAtoms& V, const std::vector<Vec3>& H_field,
                                       const std::vector<TestField>& fields) {
  if (H_field.size() != V.size())
    throw Error(ErrorCode::MismatchedFieldLength, "H field has " + std::to_string(H_field.size()) +
                                                      " entries for " + std::to_string(V.size()) + " atoms");
  double worst = 0.0;
  for (const auto& tf : fields) {
    std::vector<double> num(V.size()), den(V.size());
    parallel::for_each_index(V.size(), [&](std::size_t i) {
      const Vec3& n = V.n[i];
      Eigen::Matrix3d J = tf.jacobian(V.x[i]);
      double div = J.trace() - n.dot(J * n);
      double xh = tf.X(V.x[i]).dot(H_field[i]);
      num[i] = V.w[i] * (div + xh);
      den[i] = V.w[i] * (std::abs(div) + std::abs(xh));
    });
    worst = std::max(worst, std::abs(pairwise_sum(num)) / (pairwise_sum(den) + 1e-300));
  }
  return worst;
}

inline void write_atoms_csv(std::ostream& out, const OrientedVarifoldAtoms& V) {
  out << "x,y,z,nx,ny,nz,w\n";
  for (std::size_t i = 0; i < V.size(); ++i)
    out << format_double(V.x[i].x()) << ',' << format_double(V.x[i].y()) << ',' << format_double(V.x[i].z()) << ','
        << format_double(V.n[i].x()) << ',' << format_double(V.n[i].y()) << ',' << format_double(V.n[i].z()) << ','
        << format_double(V.w[i]) << '\n';
}

}  // namespace helfrich
