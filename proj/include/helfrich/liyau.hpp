#pragma once

#include "helfrich/concvol.hpp"
#include "helfrich/functionals.hpp"
#include "helfrich/shapes.hpp"

#include <optional>
#include <unordered_map>

namespace helfrich {

enum class Verdict { Consistent, Violated };

inline const char* to_string(Verdict v) { return v == Verdict::Consistent ? "consistent" : "violated"; }

struct LiYauCertificate {
  Vec3 x0 = Vec3::Zero();
  double c0 = 0.0;
  double density_at_infinity = 0.0;  // always 0 for compact meshes
  double helfrich_over_4pi = 0.0;
  double cvol_term = 0.0;
  double boundary_term = 0.0;
  double bound = 0.0;
  int multiplicity_bound = 0;
  int measured_multiplicity = 0;
  double slack = 0.05;
  Verdict verdict = Verdict::Consistent;
  ConcVolResult cvol;
  std::optional<double> c0_star;  // scale-invariant variant only
};

inline void to_json(nlohmann::ordered_json& j, const LiYauCertificate& c) {
  j = nlohmann::ordered_json{
      {"x0", {c.x0.x(), c.x0.y(), c.x0.z()}},
      {"components",
       {{"density_at_infinity", c.density_at_infinity},
        {"helfrich_over_4pi", c.helfrich_over_4pi},
        {"cvol_term", c.cvol_term},
        {"boundary_term", c.boundary_term}}},
      {"bound", c.bound},
      {"multiplicity_bound", c.multiplicity_bound},
      {"measured", c.measured_multiplicity},
      {"verdict", to_string(c.verdict)}};
  if (c.c0_star) j["c0_star"] = *c.c0_star;
}

// (1/2pi) sum w <x - x0, eta> / |x - x0|^2
inline double boundary_term(const BoundaryAtoms& beta, const Vec3& x0) {
  std::vector<double> t(beta.size());
  for (std::size_t i = 0; i < beta.size(); ++i) {
    Vec3 d = beta.x[i] - x0;
    if (d.norm() <= 1e-9) throw Error(ErrorCode::PointOnBoundary, "x0 lies on boundary atom " + std::to_string(i));
    t[i] = beta.w[i] * d.dot(beta.eta[i]) / d.squaredNorm();
  }
  return pairwise_sum(t) / (2.0 * kPi);
}

inline void finish_certificate(LiYauCertificate& c) {
  c.bound = c.density_at_infinity + c.helfrich_over_4pi + c.cvol_term + c.boundary_term;
  c.multiplicity_bound = static_cast<int>(std::floor(c.bound + c.slack));
  c.verdict = c.measured_multiplicity > c.bound + c.slack ? Verdict::Violated : Verdict::Consistent;
}

struct LiYauOptions {
  double tol = 1e-4;
  double slack = 0.05;
  double eps = 0.0;  // multiplicity radius; 0 means 2x mean edge
  const BoundaryAtoms* boundary = nullptr;
};

inline LiYauCertificate liyau_bound(const TriangleImmersion& m, const CurvatureField& cf, double c0, const Vec3& x0,
                                    const LiYauOptions& opt = {}) {
  LiYauCertificate c;
  c.x0 = x0;
  c.c0 = c0;
  c.slack = opt.slack;
  c.cvol = concentrated_volume(m, x0, opt.tol);
  c.helfrich_over_4pi = helfrich_energy(cf, c0) / (4.0 * kPi);
  c.cvol_term = c0 / (2.0 * kPi) * c.cvol.value;
  if (opt.boundary) c.boundary_term = boundary_term(*opt.boundary, x0);
  c.measured_multiplicity = opt.eps > 0 ? multiplicity_at(m, x0, opt.eps) : multiplicity_at(m, x0);
  finish_certificate(c);
  return c;
}

inline LiYauCertificate liyau_bound(const TriangleImmersion& m, double c0, const Vec3& x0,
                                    const LiYauOptions& opt = {}) {
  return liyau_bound(m, mean_curvature(m), c0, x0, opt);
}

// Minimum over c0 of the Li-Yau quadratic; attained at c0* = (int H - 4 Vc)/A.
inline LiYauCertificate scale_invariant_bound(const TriangleImmersion& m, const Vec3& x0,
                                              const LiYauOptions& opt = {}) {
  CurvatureField cf = mean_curvature(m);
  CmcDeficit d = cmc_deficit(cf);
  const double A = pairwise_sum(cf.area);
  const double intH = 2.0 * total_mean_curvature(cf);
  LiYauCertificate c;
  c.x0 = x0;
  c.slack = opt.slack;
  c.cvol = concentrated_volume(m, x0, opt.tol);
  const double vc = c.cvol.value;
  c.helfrich_over_4pi = d.deficit / (4.0 * kPi);
  c.cvol_term = d.average_H_sc * vc / (2.0 * kPi) - vc * vc / (kPi * A);
  if (opt.boundary) c.boundary_term = boundary_term(*opt.boundary, x0);
  c.measured_multiplicity = opt.eps > 0 ? multiplicity_at(m, x0, opt.eps) : multiplicity_at(m, x0);
  finish_certificate(c);

  const double cs = (intH - 4.0 * vc) / A;
  c.c0_star = cs;
  c.c0 = cs;
  double q = helfrich_energy(cf, cs) / (4.0 * kPi) + cs * vc / (2.0 * kPi) + c.boundary_term;
  if (std::abs(q - c.bound) > 1e-9 * std::max(1.0, std::abs(c.bound)))
    throw Error(ErrorCode::NumericalDegeneracy, "optimal c0 identity failed: " + format_double(q) + " vs " +
                                                    format_double(c.bound));
  return c;
}

struct MonotonicityRow {
  double rho, gamma, t1, t2, t3, t4, t5;
};

struct MonotonicityProfile {
  Vec3 x0 = Vec3::Zero();
  double c0 = 0.0;
  std::vector<MonotonicityRow> rows;

  double max_abs_gamma() const {
    double g = 0;
    for (const auto& r : rows) g = std::max(g, std::abs(r.gamma));
    return g;
  }
  // nondecreasing up to slack * max|gamma|
  bool nondecreasing(double slack = 1e-3) const {
    double s = slack * max_abs_gamma();
    for (std::size_t k = 1; k < rows.size(); ++k)
      if (rows[k].gamma < rows[k - 1].gamma - s) return false;
    return true;
  }
};

inline void write_profile_csv(std::ostream& out, const MonotonicityProfile& p) {
  out << "rho,gamma,term1,term2,term3,term4,term5\n";
  for (const auto& r : p.rows)
    out << format_double(r.rho) << ',' << format_double(r.gamma) << ',' << format_double(r.t1) << ','
        << format_double(r.t2) << ',' << format_double(r.t3) << ',' << format_double(r.t4) << ','
        << format_double(r.t5) << '\n';
}

namespace detail {

// Sums of v_i * clamp((rho - lo_i)/(hi_i - lo_i), 0, 1): each atom is spread
// uniformly over its radial extent, which keeps ball restrictions continuous in rho.
class RampPrefix {
 public:
  RampPrefix(const std::vector<double>& lo, const std::vector<double>& hi, std::vector<std::vector<double>> channels)
      : nch_(channels.size()) {
    const std::size_t n = lo.size();
    std::vector<std::size_t> by_lo(n), by_hi(n);
    std::iota(by_lo.begin(), by_lo.end(), 0);
    std::iota(by_hi.begin(), by_hi.end(), 0);
    std::stable_sort(by_lo.begin(), by_lo.end(), [&](auto a, auto b) { return lo[a] < lo[b]; });
    std::stable_sort(by_hi.begin(), by_hi.end(), [&](auto a, auto b) { return hi[a] < hi[b]; });
    lo_key_.resize(n);
    hi_key_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      lo_key_[k] = lo[by_lo[k]];
      hi_key_[k] = hi[by_hi[k]];
    }
    // per channel: prefix of v/D and v*key/D for ramps, v for steps (D == 0)
    auto build = [&](const std::vector<std::size_t>& order, const std::vector<double>& key, std::vector<double>& pa,
                     std::vector<double>& pb, std::vector<double>& ps, const std::vector<double>& v) {
      pa.assign(n + 1, 0.0);
      pb.assign(n + 1, 0.0);
      ps.assign(n + 1, 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        std::size_t i = order[k];
        double D = hi[i] - lo[i];
        double a = 0, b = 0, s = 0;
        if (D > 1e-12 * std::max(1.0, hi[i]))
          a = v[i] / D, b = v[i] * key[i] / D;
        else
          s = v[i];
        pa[k + 1] = pa[k] + a;
        pb[k + 1] = pb[k] + b;
        ps[k + 1] = ps[k] + s;
      }
    };
    lo_a_.resize(nch_);
    lo_b_.resize(nch_);
    lo_s_.resize(nch_);
    hi_a_.resize(nch_);
    hi_b_.resize(nch_);
    hi_s_.resize(nch_);
    for (std::size_t c = 0; c < nch_; ++c) {
      build(by_lo, lo, lo_a_[c], lo_b_[c], lo_s_[c], channels[c]);
      build(by_hi, hi, hi_a_[c], hi_b_[c], hi_s_[c], channels[c]);
    }
  }

  double sum(std::size_t c, double rho) const {
    std::size_t kl = std::upper_bound(lo_key_.begin(), lo_key_.end(), rho) - lo_key_.begin();
    std::size_t kh = std::upper_bound(hi_key_.begin(), hi_key_.end(), rho) - hi_key_.begin();
    double ramp_in = rho * lo_a_[c][kl] - lo_b_[c][kl];
    double ramp_out = rho * hi_a_[c][kh] - hi_b_[c][kh];
    return (ramp_in - ramp_out) + hi_s_[c][kh];
  }

 private:
  std::size_t nch_;
  std::vector<double> lo_key_, hi_key_;
  std::vector<std::vector<double>> lo_a_, lo_b_, lo_s_, hi_a_, hi_b_, hi_s_;
};

struct SubAtoms {
  std::vector<Vec3> x, n, H;
  std::vector<double> w, lo, hi;
};

inline void subdivide_into(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& Ha, const Vec3& Hb,
                           const Vec3& Hc, const Vec3& nrm, int depth, const Vec3& x0, SubAtoms& out) {
  if (depth == 0) {
    Triangle t{a, b, c};
    out.x.push_back(t.centroid());
    out.n.push_back(nrm);
    out.H.push_back((Ha + Hb + Hc) / 3.0);
    out.w.push_back(t.area());
    out.lo.push_back(point_triangle_distance(x0, t));
    out.hi.push_back(std::max({(a - x0).norm(), (b - x0).norm(), (c - x0).norm()}));
    return;
  }
  Vec3 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  Vec3 Hab = 0.5 * (Ha + Hb), Hbc = 0.5 * (Hb + Hc), Hca = 0.5 * (Hc + Ha);
  subdivide_into(a, ab, ca, Ha, Hab, Hca, nrm, depth - 1, x0, out);
  subdivide_into(ab, b, bc, Hab, Hb, Hbc, nrm, depth - 1, x0, out);
  subdivide_into(ca, bc, c, Hca, Hbc, Hc, nrm, depth - 1, x0, out);
  subdivide_into(ab, bc, ca, Hab, Hbc, Hca, nrm, depth - 1, x0, out);
}

inline double local_mean_edge(const TriangleImmersion& m, const Vec3& x0, double radius) {
  double s = 0.0;
  int k = 0;
  for (std::size_t f = 0; f < m.num_faces(); ++f) {
    Triangle t = triangle(m, static_cast<int>(f));
    if (point_triangle_distance(x0, t) > radius) continue;
    s += (t.b - t.a).norm() + (t.c - t.b).norm() + (t.a - t.c).norm();
    k += 3;
  }
  return k ? s / k : mean_edge_length(m);
}

}  // namespace detail

struct MonotonicityOptions {
  int near_depth = 6;
  int far_depth = 2;
};

inline MonotonicityProfile monotonicity_profile(const TriangleImmersion& m, double c0, const Vec3& x0,
                                                std::vector<double> rhos, const MonotonicityOptions& opt = {}) {
  if (rhos.empty()) throw Error(ErrorCode::InvalidInput, "no radii given");
  for (std::size_t k = 1; k < rhos.size(); ++k)
    if (!(rhos[k] > rhos[k - 1])) throw Error(ErrorCode::InvalidInput, "radii must be strictly ascending");
  const double global_edge = mean_edge_length(m);
  const double edge = detail::local_mean_edge(m, x0, 2.0 * global_edge);
  if (!(rhos.front() >= 3.0 * edge))
    throw Error(ErrorCode::RhoBelowResolution,
                "rho " + format_double(rhos.front()) + " below 3x local mean edge " + format_double(edge));

  CurvatureField cf = mean_curvature(m);
  const std::size_t nf = m.num_faces();
  std::vector<detail::SubAtoms> parts(nf);
  parallel::for_each_index(nf, [&](std::size_t f) {
    Triangle t = triangle(m, static_cast<int>(f));
    const Face& id = m.face(static_cast<int>(f));
    int depth = point_triangle_distance(x0, t) < 2.0 * global_edge ? opt.near_depth : opt.far_depth;
    detail::subdivide_into(t.a, t.b, t.c, cf.H[id[0]], cf.H[id[1]], cf.H[id[2]], t.normal(), depth, x0, parts[f]);
  });
  detail::SubAtoms all;
  for (auto& p : parts) {
    all.x.insert(all.x.end(), p.x.begin(), p.x.end());
    all.n.insert(all.n.end(), p.n.begin(), p.n.end());
    all.H.insert(all.H.end(), p.H.begin(), p.H.end());
    all.w.insert(all.w.end(), p.w.begin(), p.w.end());
    all.lo.insert(all.lo.end(), p.lo.begin(), p.lo.end());
    all.hi.insert(all.hi.end(), p.hi.begin(), p.hi.end());
  }
  const std::size_t na = all.w.size();
  std::vector<std::vector<double>> ch(5, std::vector<double>(na));
  for (std::size_t i = 0; i < na; ++i) {
    Vec3 d = all.x[i] - x0;
    Vec3 Hc = all.H[i] - c0 * all.n[i];
    double r2 = d.squaredNorm();
    ch[0][i] = all.w[i];
    ch[1][i] = all.w[i] * Hc.squaredNorm();
    ch[2][i] = r2 > 1e-28 ? all.w[i] * d.dot(all.n[i]) / r2 : 0.0;
    ch[3][i] = all.w[i] * d.dot(Hc);
    ch[4][i] = all.w[i] * d.dot(all.n[i]);
  }
  detail::RampPrefix rp(all.lo, all.hi, std::move(ch));

  MonotonicityProfile p;
  p.x0 = x0;
  p.c0 = c0;
  for (double rho : rhos) {
    MonotonicityRow r;
    r.rho = rho;
    double r2 = rho * rho;
    r.t1 = rp.sum(0, rho) / r2;
    r.t2 = rp.sum(1, rho) / 16.0;
    r.t3 = -0.5 * c0 * rp.sum(2, rho);
    r.t4 = rp.sum(3, rho) / (2.0 * r2);
    r.t5 = c0 * rp.sum(4, rho) / (2.0 * r2);
    r.gamma = r.t1 + r.t2 + r.t3 + r.t4 + r.t5;
    p.rows.push_back(r);
  }
  return p;
}

// Local density mu(B_eps(v)) / (pi eps^2) at each vertex from face centroids.
inline std::vector<double> vertex_density(const TriangleImmersion& m, double eps) {
  struct KeyHash {
    std::size_t operator()(const std::array<long long, 3>& k) const {
      return std::hash<long long>()(k[0] * 73856093LL ^ k[1] * 19349663LL ^ k[2] * 83492791LL);
    }
  };
  auto key = [eps](const Vec3& p) {
    return std::array<long long, 3>{static_cast<long long>(std::floor(p.x() / eps)),
                                    static_cast<long long>(std::floor(p.y() / eps)),
                                    static_cast<long long>(std::floor(p.z() / eps))};
  };
  std::unordered_map<std::array<long long, 3>, std::vector<int>, KeyHash> grid;
  std::vector<Vec3> cen(m.num_faces());
  std::vector<double> area(m.num_faces());
  for (std::size_t f = 0; f < m.num_faces(); ++f) {
    Triangle t = triangle(m, static_cast<int>(f));
    cen[f] = t.centroid();
    area[f] = t.area();
    grid[key(cen[f])].push_back(static_cast<int>(f));
  }
  return parallel::map<double>(m.num_vertices(), [&](std::size_t v) {
    const Vec3& p = m.vertex(static_cast<int>(v));
    auto k = key(p);
    double s = 0.0;
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy)
        for (long long dz = -1; dz <= 1; ++dz) {
          auto it = grid.find({k[0] + dx, k[1] + dy, k[2] + dz});
          if (it == grid.end()) continue;
          for (int f : it->second)
            if ((cen[f] - p).norm() < eps) s += area[f];
        }
    return s / (kPi * eps * eps);
  });
}

// Vertices of highest local density, ties broken by index.
inline std::vector<int> density_probes(const TriangleImmersion& m, int count) {
  auto dens = vertex_density(m, 2.0 * mean_edge_length(m));
  std::vector<int> idx(m.num_vertices());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return dens[a] > dens[b]; });
  idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(count)));
  return idx;
}

enum class EmbeddingVerdict { EmbeddedCertified, Inconclusive, Violated };

inline const char* to_string(EmbeddingVerdict v) {
  switch (v) {
    case EmbeddingVerdict::EmbeddedCertified: return "embedded-certified";
    case EmbeddingVerdict::Inconclusive: return "inconclusive";
    case EmbeddingVerdict::Violated: return "violated";
  }
  return "";
}

struct EmbeddednessResult {
  EmbeddingVerdict verdict;
  double energy;
  double threshold;  // 8 pi (1 - tol)
  Vec3 worst_x0;
  int worst_multiplicity;
  int probes;
};

inline EmbeddednessResult embeddedness_certificate(const TriangleImmersion& m, double c0, double tol = 0.02,
                                                   int probe_count = 64) {
  if (c0 > 0.0) throw Error(ErrorCode::PositiveC0, "embeddedness certificate needs c0 <= 0");
  EmbeddednessResult r{};
  r.energy = helfrich_energy(m, c0);
  r.threshold = 8.0 * kPi * (1.0 - tol);
  auto probes = density_probes(m, probe_count);
  r.probes = static_cast<int>(probes.size());
  const double eps = 2.0 * mean_edge_length(m);
  auto mult = parallel::map<int>(probes.size(),
                                 [&](std::size_t k) { return multiplicity_at(m, m.vertex(probes[k]), eps); });
  std::size_t worst = 0;
  for (std::size_t k = 1; k < probes.size(); ++k)
    if (mult[k] > mult[worst]) worst = k;
  r.worst_x0 = m.vertex(probes[worst]);
  r.worst_multiplicity = mult[worst];
  bool below = r.energy < r.threshold;
  if (below && r.worst_multiplicity <= 1)
    r.verdict = EmbeddingVerdict::EmbeddedCertified;
  else if (below)
    r.verdict = EmbeddingVerdict::Violated;
  else
    r.verdict = EmbeddingVerdict::Inconclusive;
  return r;
}

struct DiameterBounds {
  double lower;
  std::optional<double> upper;
  double measured;
  bool lower_violated;
  bool upper_violated;
};

inline constexpr double kZeroEnergy = 0.05;

inline DiameterBounds diameter_bounds(const TriangleImmersion& m, double c0, double slack = 0.02) {
  const double A = total_area(m), V = algebraic_volume(m), H = helfrich_energy(m, c0);
  if (!(H >= kZeroEnergy))
    throw Error(ErrorCode::ZeroEnergy, "Helfrich energy " + format_double(H) + " is numerically zero");
  DiameterBounds b{};
  b.measured = diameter(m);
  b.lower = std::abs(2.0 * A - 3.0 * c0 * V) / (2.0 * std::sqrt(A * H));
  if (c0 <= 0.0 && V > 0.0) b.upper = 9.0 / (2.0 * kPi) * std::sqrt(H * (A + 2.0 / 3.0 * std::abs(c0) * V));
  b.lower_violated = b.lower > b.measured * (1.0 + slack);
  b.upper_violated = b.upper && b.measured > *b.upper * (1.0 + slack);
  return b;
}

struct LowerBoundCheck {
  double energy;
  bool passes;
};

inline LowerBoundCheck helfrich_lower_bound_check(const TriangleImmersion& m, double c0) {
  if (c0 >= 0.0) throw Error(ErrorCode::NonNegativeC0, "the 4 pi lower bound needs c0 < 0");
  if (!(algebraic_volume(m) > 0.0)) throw Error(ErrorCode::InvalidInput, "mesh needs positive algebraic volume");
  double e = helfrich_energy(m, c0);
  return {e, e > 4.0 * kPi * (1.0 - 0.02)};
}

struct GammaThreshold {
  double gamma;
  double threshold;  // 8 pi + gamma
};

inline GammaThreshold gamma_threshold(double c0, double A0, double V0) {
  if (!(A0 > 0.0) || !(V0 > 0.0)) throw Error(ErrorCode::InvalidInput, "A0 and V0 must be positive");
  if (36.0 * kPi * V0 * V0 > A0 * A0 * A0 * (1.0 + 1e-9))
    throw Error(ErrorCode::IsoperimetricViolation, "36 pi V0^2 exceeds A0^3");
  double g;
  if (c0 < 0.0) {
    double a = std::abs(c0);
    double L = a * V0 / (2.0 * 81.0 * (A0 + 2.0 / 3.0 * a * V0));
    g = 4.0 * kPi * (std::sqrt(1.0 + L) - 1.0);
  } else {
    g = -6.0 * c0 * std::cbrt(4.0 * kPi * kPi * V0);
    if (g == 0.0) g = 0.0;  // no negative zero
  }
  return {g, 8.0 * kPi + g};
}

struct MinkowskiCheck {
  double lhs, rhs;
  bool passes, applicable;
  int multiplicity;
  double cvol;
};

inline MinkowskiCheck minkowski_check(const TriangleImmersion& m, const Vec3& x0, double tol = 0.01) {
  CurvatureField cf = mean_curvature(m);
  MinkowskiCheck k{};
  k.multiplicity = multiplicity_at(m, x0);
  k.cvol = concentrated_volume(m, x0).value;
  const double A = pairwise_sum(cf.area);
  const double defect = cmc_deficit(cf).deficit;
  k.lhs = total_mean_curvature(cf);
  k.applicable = k.cvol > 0.0 && defect <= 4.0 * kPi * k.multiplicity;
  k.rhs = k.applicable ? std::sqrt((4.0 * kPi * k.multiplicity - defect) * A) : std::nan("");
  k.passes = k.applicable && k.lhs >= k.rhs * (1.0 - tol);
  return k;
}

}  // namespace helfrich
