#pragma once

#include "helfrich/liyau.hpp"

#include <functional>
#include <limits>

namespace helfrich {

namespace detail {

inline std::vector<std::vector<int>> vertex_neighbors(const TriangleImmersion& m) {
  std::vector<std::vector<int>> nb(m.num_vertices());
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    for (int f : m.vertex_faces(static_cast<int>(v)))
      for (int u : m.face(f))
        if (u != static_cast<int>(v)) nb[v].push_back(u);
    std::sort(nb[v].begin(), nb[v].end());
    nb[v].erase(std::unique(nb[v].begin(), nb[v].end()), nb[v].end());
  }
  return nb;
}

// (1/4) A_v (H_sc,v - c0)^2 with vertex p moved to xp.
inline double vertex_energy(const TriangleImmersion& m, int v, int p, const Vec3& xp, double c0) {
  auto pos = [&](int i) -> const Vec3& { return i == p ? xp : m.vertex(i); };
  Vec3 lap = Vec3::Zero(), nrm = Vec3::Zero();
  double a = 0.0;
  const Vec3& xi = pos(v);
  for (int f : m.vertex_faces(v)) {
    const Face& t = m.face(f);
    int k = t[0] == v ? 0 : (t[1] == v ? 1 : 2);
    const Vec3& xj = pos(t[(k + 1) % 3]);
    const Vec3& xl = pos(t[(k + 2) % 3]);
    Vec3 cr = (xj - xi).cross(xl - xi);
    double s = cr.norm();
    // cot at corner l (opposite edge v-j) and at corner j (opposite edge v-l)
    Vec3 lj = xj - xl, lv = xi - xl, jv = xi - xj, jl = xl - xj;
    double cot_l = lj.dot(lv) / s, cot_j = jv.dot(jl) / s;
    lap += cot_l * (xj - xi) + cot_j * (xl - xi);
    a += s / 6.0;
    nrm += cr;
  }
  double h = (lap / (2.0 * a)).dot(nrm.normalized()) - c0;
  return 0.25 * a * h * h;
}

}  // namespace detail

// Central differences of the Helfrich energy, step h = rel_step * mean edge;
// only the 1-ring energy terms are recomputed.
inline std::vector<Vec3> discrete_gradient(const TriangleImmersion& m, double c0, double rel_step = 1e-5) {
  const double h = rel_step * mean_edge_length(m);
  auto nb = detail::vertex_neighbors(m);
  return parallel::map<Vec3>(m.num_vertices(), [&](std::size_t pi) {
    const int p = static_cast<int>(pi);
    Vec3 g;
    for (int ax = 0; ax < 3; ++ax) {
      Vec3 xp = m.vertex(p), xm = m.vertex(p);
      xp[ax] += h;
      xm[ax] -= h;
      double ep = detail::vertex_energy(m, p, p, xp, c0), em = detail::vertex_energy(m, p, p, xm, c0);
      for (int u : nb[p]) {
        ep += detail::vertex_energy(m, u, p, xp, c0);
        em += detail::vertex_energy(m, u, p, xm, c0);
      }
      g[ax] = (ep - em) / (2.0 * h);
    }
    return g;
  });
}

inline std::vector<Vec3> area_gradient(const TriangleImmersion& m) {
  std::vector<Vec3> g(m.num_vertices(), Vec3::Zero());
  for (std::size_t f = 0; f < m.num_faces(); ++f) {
    const Face& t = m.face(static_cast<int>(f));
    Vec3 n = triangle(m, static_cast<int>(f)).normal();
    for (int k = 0; k < 3; ++k)
      g[t[k]] += 0.5 * n.cross(m.vertex(t[(k + 2) % 3]) - m.vertex(t[(k + 1) % 3]));
  }
  return g;
}

inline std::vector<Vec3> volume_gradient(const TriangleImmersion& m) {
  std::vector<Vec3> g(m.num_vertices(), Vec3::Zero());
  for (std::size_t f = 0; f < m.num_faces(); ++f) {
    const Face& t = m.face(static_cast<int>(f));
    for (int k = 0; k < 3; ++k) g[t[k]] -= m.vertex(t[(k + 1) % 3]).cross(m.vertex(t[(k + 2) % 3])) / 6.0;
  }
  return g;
}

namespace detail {

inline double dot(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  std::vector<double> t(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) t[i] = a[i].dot(b[i]);
  return pairwise_sum(t);
}

inline std::vector<Vec3> axpy(const std::vector<Vec3>& x, double s, const std::vector<Vec3>& d) {
  std::vector<Vec3> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + s * d[i];
  return y;
}

inline double max_norm(const std::vector<Vec3>& d) {
  double s = 0.0;
  for (const auto& v : d) s = std::max(s, v.norm());
  return s;
}

}  // namespace detail

struct ProjectionOptions {
  double residual_tol = 1e-6;
  int max_newton = 100;
  double max_offset = 0.5;  // per Newton step, in mean edge lengths
};

struct Residuals {
  double area, volume;
  double max() const { return std::max(area, volume); }
};

inline Residuals constraint_residuals(const TriangleImmersion& m, double A0, double V0) {
  return {std::abs(total_area(m) - A0) / A0, std::abs(algebraic_volume(m) - V0) / V0};
}

// Newton on a normal offset (volume gradient with its area component removed)
// to reach I0 = A0^3/V0^2, then an exact scale about the centroid to reach A0.
inline TriangleImmersion project_constraints(const TriangleImmersion& m, double A0, double V0,
                                             const ProjectionOptions& opt = {}) {
  if (!(A0 > 0.0) || !(V0 > 0.0)) throw Error(ErrorCode::InvalidInput, "targets must be positive");
  if (36.0 * kPi * V0 * V0 > A0 * A0 * A0 * (1.0 + 1e-9))
    throw Error(ErrorCode::IsoperimetricViolation, "targets violate the isoperimetric inequality");
  Residuals r0 = constraint_residuals(m, A0, V0);
  if (r0.max() <= opt.residual_tol) return m;
  if (r0.max() > 0.2) throw Error(ErrorCode::ProjectionDiverged, "mesh is more than 20% from the targets");

  const double logI0 = 3.0 * std::log(A0) - 2.0 * std::log(V0);
  const double edge = mean_edge_length(m);
  std::vector<Vec3> x = m.vertices();
  TriangleImmersion cur = m;
  bool matched = false;
  for (int it = 0; it < opt.max_newton; ++it) {
    double A = total_area(cur), V = algebraic_volume(cur);
    if (!(V > 0.0)) throw Error(ErrorCode::ProjectionDiverged, "volume became nonpositive");
    double f = 3.0 * std::log(A) - 2.0 * std::log(V) - logI0;
    if (std::abs(f) <= 0.1 * opt.residual_tol) {
      matched = true;
      break;
    }
    auto gA = area_gradient(cur), gV = volume_gradient(cur);
    double aa = detail::dot(gA, gA);
    double av = detail::dot(gA, gV);
    std::vector<Vec3> d = detail::axpy(gV, -av / aa, gA);
    double slope = 3.0 * detail::dot(gA, d) / A - 2.0 * detail::dot(gV, d) / V;
    if (!(std::abs(slope) > 0.0) || !std::isfinite(slope))
      throw Error(ErrorCode::ProjectionDiverged, "isoperimetric correction has no descent direction");
    double beta = -f / slope;
    double cap = opt.max_offset * edge / detail::max_norm(d);
    beta = std::clamp(beta, -cap, cap);
    x = detail::axpy(x, beta, d);
    try {
      cur = m.with_vertices(x);
    } catch (const Error& e) {
      throw Error(ErrorCode::ProjectionDiverged, std::string("projection produced a degenerate mesh: ") + e.what());
    }
  }
  if (!matched) throw Error(ErrorCode::ProjectionDiverged, "isoperimetric ratio not matched");

  Vec3 c = pairwise_sum(x) / static_cast<double>(x.size());
  double s = std::sqrt(A0 / total_area(cur));
  for (auto& p : x) p = c + s * (p - c);
  cur = m.with_vertices(std::move(x));
  Residuals r = constraint_residuals(cur, A0, V0);
  if (!(r.max() <= opt.residual_tol))
    throw Error(ErrorCode::ProjectionDiverged, "residual " + format_double(r.max()) + " above tolerance");
  return cur;
}

// Max distance between the mesh and the sphere |x - center| = R.
inline double hausdorff_to_sphere(const TriangleImmersion& m, const Vec3& center, double R) {
  double d = 0.0;
  for (const auto& p : m.vertices()) d = std::max(d, std::abs((p - center).norm() - R));
  for (std::size_t f = 0; f < m.num_faces(); ++f)
    d = std::max(d, R - point_triangle_distance(center, triangle(m, static_cast<int>(f))));
  return d;
}

// Smallest distance from a probe to a sheet not connected to it inside a
// ball of radius `radius`; returns `radius` when there is none.
inline double sheet_distance(const TriangleImmersion& m, int probe, double radius) {
  const Vec3& x0 = m.vertex(probe);
  const std::size_t nf = m.num_faces();
  std::vector<double> dist(nf);
  std::vector<char> in(nf, 0), own(nf, 0);
  for (std::size_t f = 0; f < nf; ++f) {
    dist[f] = point_triangle_distance(x0, triangle(m, static_cast<int>(f)));
    in[f] = dist[f] < radius;
  }
  std::vector<int> stack(m.vertex_faces(probe).begin(), m.vertex_faces(probe).end());
  for (int f : stack) own[f] = 1;
  while (!stack.empty()) {
    int f = stack.back();
    stack.pop_back();
    for (int g : m.face_neighbors(f))
      if (in[g] && !own[g]) {
        own[g] = 1;
        stack.push_back(g);
      }
  }
  double best = radius;
  for (std::size_t f = 0; f < nf; ++f)
    if (in[f] && !own[f]) best = std::min(best, dist[f]);
  return best;
}

enum class Termination { Converged, MaxIter, MonitorAlarm, Stalled };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxIter: return "max_iter";
    case Termination::MonitorAlarm: return "monitor_alarm";
    case Termination::Stalled: return "stalled";
  }
  return "";
}

struct IterationLog {
  int iter;
  double energy, area_residual, volume_residual, step, worst_bound, min_sheet_dist;
};

struct FlowState {
  TriangleImmersion mesh;
  int iteration = 0;
  std::vector<double> energy_history;
  double area_residual = 0.0, volume_residual = 0.0;
  double max_residual_seen = 0.0;
  double step = 0.0;
  double worst_bound = std::numeric_limits<double>::quiet_NaN();
  double min_sheet_distance = std::numeric_limits<double>::quiet_NaN();
  Termination reason = Termination::MaxIter;
  std::vector<IterationLog> log;
};

inline void write_flow_log_csv(std::ostream& out, const FlowState& s) {
  out << "iter,energy,area_residual,volume_residual,step,worst_bound,min_sheet_dist\n";
  for (const auto& r : s.log)
    out << r.iter << ',' << format_double(r.energy) << ',' << format_double(r.area_residual) << ','
        << format_double(r.volume_residual) << ',' << format_double(r.step) << ',' << format_double(r.worst_bound)
        << ',' << format_double(r.min_sheet_dist) << '\n';
}

struct MinimizeOptions {
  int max_iter = 200;
  double step0 = 0.01;  // initial max vertex displacement
  double tol = 1e-6;    // on the projected gradient 2-norm
  double armijo = 1e-4;
  double min_step = 1e-12;
  int monitor_every = 10;
  int monitor_probes = 16;
  double alarm_bound = 1.9;
  int smooth_every = 25;
  double cvol_tol = 1e-4;
  ProjectionOptions projection;
  std::function<void(const FlowState&)> on_iteration;
};

namespace detail {

inline std::vector<Vec3> project_out(const std::vector<Vec3>& g, const std::vector<Vec3>& gA,
                                     const std::vector<Vec3>& gV) {
  Eigen::Matrix2d G;
  G << dot(gA, gA), dot(gA, gV), dot(gV, gA), dot(gV, gV);
  Eigen::Vector2d b(dot(gA, g), dot(gV, g));
  Eigen::Vector2d lam = G.completeOrthogonalDecomposition().solve(b);
  std::vector<Vec3> p(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) p[i] = g[i] - lam[0] * gA[i] - lam[1] * gV[i];
  return p;
}

// Half a uniform-Laplacian step with the normal component removed.
inline std::vector<Vec3> tangential_smooth(const TriangleImmersion& m) {
  auto nb = vertex_neighbors(m);
  CurvatureField cf = mean_curvature(m);
  std::vector<Vec3> x = m.vertices();
  for (std::size_t v = 0; v < x.size(); ++v) {
    Vec3 avg = Vec3::Zero();
    for (int u : nb[v]) avg += m.vertex(u);
    Vec3 d = avg / static_cast<double>(nb[v].size()) - m.vertex(static_cast<int>(v));
    const Vec3& n = cf.normal[v];
    x[v] += 0.5 * (d - d.dot(n) * n);
  }
  return x;
}

}  // namespace detail

inline void run_monitors(FlowState& s, double c0, const MinimizeOptions& opt) {
  auto probes = density_probes(s.mesh, opt.monitor_probes);
  CurvatureField cf = mean_curvature(s.mesh);
  const double h4 = helfrich_energy(cf, c0) / (4.0 * kPi);
  const double edge = mean_edge_length(s.mesh);
  std::vector<double> bounds(probes.size()), sheets(probes.size());
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const Vec3& x0 = s.mesh.vertex(probes[k]);
    bounds[k] = h4 + c0 / (2.0 * kPi) * concentrated_volume(s.mesh, x0, opt.cvol_tol).value;
    sheets[k] = sheet_distance(s.mesh, probes[k], 4.0 * edge);
  }
  s.worst_bound = *std::max_element(bounds.begin(), bounds.end());
  s.min_sheet_distance = *std::min_element(sheets.begin(), sheets.end());
}

// Projected gradient descent on the Helfrich energy with area and algebraic
// volume held at (A0, V0).
inline FlowState minimize_constrained(const TriangleImmersion& mesh0, double c0, double A0, double V0,
                                      const MinimizeOptions& opt = {}) {
  FlowState s{project_constraints(mesh0, A0, V0, opt.projection)};
  auto record = [&](double energy) {
    Residuals r = constraint_residuals(s.mesh, A0, V0);
    s.area_residual = r.area;
    s.volume_residual = r.volume;
    s.max_residual_seen = std::max(s.max_residual_seen, r.max());
    s.energy_history.push_back(energy);
    s.log.push_back({s.iteration, energy, r.area, r.volume, s.step, s.worst_bound, s.min_sheet_distance});
    if (opt.on_iteration) opt.on_iteration(s);
  };
  double E = helfrich_energy(s.mesh, c0);
  s.step = opt.step0;
  record(E);

  for (s.iteration = 1; s.iteration <= opt.max_iter; ++s.iteration) {
    auto g = discrete_gradient(s.mesh, c0);
    auto pg = detail::project_out(g, area_gradient(s.mesh), volume_gradient(s.mesh));
    double gnorm = std::sqrt(detail::dot(pg, pg));
    if (gnorm < opt.tol) {
      s.reason = Termination::Converged;
      --s.iteration;
      return s;
    }
    double inf = detail::max_norm(pg);
    std::vector<Vec3> dir(pg.size());
    for (std::size_t i = 0; i < pg.size(); ++i) dir[i] = -pg[i] / inf;
    const double decrease = gnorm * gnorm / inf;

    bool accepted = false;
    double tau = s.step;
    while (tau >= opt.min_step) {
      try {
        TriangleImmersion trial = project_constraints(
            s.mesh.with_vertices(detail::axpy(s.mesh.vertices(), tau, dir)), A0, V0, opt.projection);
        double Et = helfrich_energy(trial, c0);
        if (Et <= E - opt.armijo * tau * decrease) {
          s.mesh = std::move(trial);
          E = Et;
          accepted = true;
          break;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ProjectionDiverged && e.code() != ErrorCode::DegenerateFace &&
            e.code() != ErrorCode::NumericalDegeneracy)
          throw;
      }
      tau *= 0.5;
    }
    if (!accepted) {
      s.reason = Termination::Stalled;
      --s.iteration;
      return s;
    }
    s.step = std::min(2.0 * tau, 10.0 * opt.step0);

    if (opt.smooth_every > 0 && s.iteration % opt.smooth_every == 0) {
      try {
        TriangleImmersion sm =
            project_constraints(s.mesh.with_vertices(detail::tangential_smooth(s.mesh)), A0, V0, opt.projection);
        double Es = helfrich_energy(sm, c0);
        if (Es <= E) {
          s.mesh = std::move(sm);
          E = Es;
        }
      } catch (const Error&) {
      }
    }

    bool alarm = false;
    if (opt.monitor_every > 0 && s.iteration % opt.monitor_every == 0) {
      run_monitors(s, c0, opt);
      alarm = s.worst_bound >= opt.alarm_bound;
    }
    record(E);
    if (alarm) {
      s.reason = Termination::MonitorAlarm;
      return s;
    }
  }
  s.iteration = opt.max_iter;
  s.reason = Termination::MaxIter;
  return s;
}

}  // namespace helfrich
