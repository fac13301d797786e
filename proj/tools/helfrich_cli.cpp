#include "helfrich/helfrich.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace helfrich;
using ojson = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kVerdict = 1, kUsage = 2, kNumeric = 3 };

// nlohmann prints the shortest round-trip form; results here use %.17g.
void write_json(std::ostream& out, const ojson& j, int indent = 0) {
  auto pad = [&](int n) { out << std::string(static_cast<std::size_t>(n), ' '); };
  switch (j.type()) {
    case ojson::value_t::object: {
      out << "{\n";
      std::size_t k = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++k) {
        pad(indent + 2);
        out << ojson(it.key()).dump() << ": ";
        write_json(out, it.value(), indent + 2);
        out << (k + 1 < j.size() ? ",\n" : "\n");
      }
      pad(indent);
      out << '}';
      break;
    }
    case ojson::value_t::array: {
      out << '[';
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) out << ", ";
        write_json(out, j[k], indent);
      }
      out << ']';
      break;
    }
    case ojson::value_t::number_float: {
      double v = j.get<double>();
      if (std::isfinite(v))
        out << format_double(v);
      else
        out << "null";
      break;
    }
    default:
      out << j.dump();
  }
}

void print_json(const ojson& j) {
  write_json(std::cout, j);
  std::cout << '\n';
}

Vec3 parse_point(const std::vector<double>& v) {
  if (v.size() != 3) throw Error(ErrorCode::InvalidInput, "points take three comma-separated numbers");
  return {v[0], v[1], v[2]};
}

void write_boundary_csv(const std::string& path, const BoundaryAtoms& b) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << "x,y,z,etax,etay,etaz,w\n";
  for (std::size_t i = 0; i < b.size(); ++i)
    out << format_double(b.x[i].x()) << ',' << format_double(b.x[i].y()) << ',' << format_double(b.x[i].z()) << ','
        << format_double(b.eta[i].x()) << ',' << format_double(b.eta[i].y()) << ','
        << format_double(b.eta[i].z()) << ',' << format_double(b.w[i]) << '\n';
}

BoundaryAtoms read_boundary_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  BoundaryAtoms b;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double v[7];
    for (double& x : v)
      if (!(ls >> x)) throw Error(ErrorCode::IoError, "bad boundary row: " + line);
    b.x.emplace_back(v[0], v[1], v[2]);
    b.eta.emplace_back(v[3], v[4], v[5]);
    b.w.push_back(v[6]);
  }
  return b;
}

struct ShapeArgs {
  std::string name;
  double r = 1.0, l = 0.0, a = 0.05, resolution = kFineResolution;
  int subdiv = 4;
  std::string out, boundary;
};

int cmd_shape(const ShapeArgs& s) {
  TriangleImmersion m;
  std::optional<BoundaryAtoms> beta;
  if (s.name == "sphere") {
    m = sphere(s.r, s.subdiv);
  } else if (s.name == "capped_cylinder" || s.name == "capsule") {
    m = capped_cylinder(s.l, s.r, s.resolution);
  } else if (s.name == "dumbbell") {
    m = dumbbell(s.a, s.l, s.r, s.resolution);
  } else if (s.name == "torus") {
    m = torus(s.r, s.resolution);
  } else if (s.name == "sphere_torus_mixed") {
    m = sphere_torus_mixed(s.r, s.resolution);
  } else if (s.name == "touching_spheres") {
    m = touching_spheres(s.subdiv);
  } else if (s.name == "lens") {
    Lens L = lens(s.resolution);
    m = std::move(L.mesh);
    beta = std::move(L.boundary);
  } else {
    std::cerr << "UnknownShape: " << s.name << '\n';
    return kUsage;
  }
  save_mesh(s.out, m);
  if (!s.boundary.empty()) {
    if (!beta) {
      std::cerr << "BadParams: --boundary is only meaningful for lens\n";
      return kUsage;
    }
    write_boundary_csv(s.boundary, *beta);
  }
  std::cout << "faces=" << m.num_faces() << " vertices=" << m.num_vertices() << '\n';
  return kOk;
}

struct LiYauArgs {
  std::string mesh, boundary;
  double c0 = 0.0, tol = 1e-4;
  std::vector<double> x0;
  bool probe_auto = false, scale_invariant = false;
};

int cmd_liyau(const LiYauArgs& a) {
  TriangleImmersion m = load_mesh(a.mesh);
  std::optional<BoundaryAtoms> beta;
  if (!a.boundary.empty()) beta = read_boundary_csv(a.boundary);
  LiYauOptions opt;
  opt.tol = a.tol;
  if (beta) opt.boundary = &*beta;
  auto certify = [&](const Vec3& x0) {
    return a.scale_invariant ? scale_invariant_bound(m, x0, opt) : liyau_bound(m, a.c0, x0, opt);
  };
  if (!a.probe_auto) {
    if (a.x0.empty()) {
      std::cerr << "BadParams: give --x0 or --probe-auto\n";
      return kUsage;
    }
    LiYauCertificate c = certify(parse_point(a.x0));
    print_json(c);
    return c.verdict == Verdict::Violated ? kVerdict : kOk;
  }
  auto probes = density_probes(m, 64);
  ojson all = ojson::array();
  bool violated = false;
  std::size_t worst = 0;
  std::vector<LiYauCertificate> certs;
  for (int v : probes) certs.push_back(certify(m.vertex(v)));
  for (std::size_t k = 0; k < certs.size(); ++k) {
    violated = violated || certs[k].verdict == Verdict::Violated;
    if (certs[k].measured_multiplicity - certs[k].bound > certs[worst].measured_multiplicity - certs[worst].bound)
      worst = k;
    all.push_back(certs[k]);
  }
  print_json(ojson{{"probes", all.size()}, {"worst", certs[worst]}, {"certificates", all}});
  return violated ? kVerdict : kOk;
}

struct MonoArgs {
  std::string mesh;
  double c0 = 0.0, rho_min = 0.0, rho_max = 0.0;
  int n = 9;
  std::vector<double> x0;
};

int cmd_monotonicity(const MonoArgs& a) {
  if (a.n < 1 || !(a.rho_max >= a.rho_min) || (a.n > 1 && !(a.rho_max > a.rho_min))) {
    std::cerr << "BadParams: need n >= 1 and rho_max > rho_min\n";
    return kUsage;
  }
  TriangleImmersion m = load_mesh(a.mesh);
  std::vector<double> rhos;
  for (int k = 0; k < a.n; ++k) rhos.push_back(a.n == 1 ? a.rho_min : a.rho_min + (a.rho_max - a.rho_min) * k / (a.n - 1));
  write_profile_csv(std::cout, monotonicity_profile(m, a.c0, parse_point(a.x0), rhos));
  return kOk;
}

struct MinimizeArgs {
  std::string config, log, checkpoint_dir, out;
  int checkpoint_every = 10;
};

int cmd_minimize(const MinimizeArgs& a) {
  std::ifstream in(a.config);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + a.config);
  ojson cfg;
  try {
    cfg = ojson::parse(in);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::IoError, std::string("bad config JSON: ") + e.what());
  }
  for (const char* key : {"c0", "A0", "V0", "mesh"})
    if (!cfg.contains(key)) throw Error(ErrorCode::InvalidInput, std::string("config lacks '") + key + "'");
  std::filesystem::path mesh_path = cfg["mesh"].get<std::string>();
  if (mesh_path.is_relative()) mesh_path = std::filesystem::path(a.config).parent_path() / mesh_path;
  TriangleImmersion m = load_mesh(mesh_path.string());

  MinimizeOptions opt;
  opt.max_iter = cfg.value("max_iter", opt.max_iter);
  opt.step0 = cfg.value("step0", opt.step0);
  opt.tol = cfg.value("tol", opt.tol);
  if (!a.checkpoint_dir.empty()) {
    std::filesystem::create_directories(a.checkpoint_dir);
    opt.on_iteration = [&](const FlowState& s) {
      if (s.iteration % a.checkpoint_every == 0) {
        char name[32];
        std::snprintf(name, sizeof name, "iter_%05d.obj", s.iteration);
        save_mesh((std::filesystem::path(a.checkpoint_dir) / name).string(), s.mesh);
      }
    };
  }
  FlowState s = minimize_constrained(m, cfg["c0"].get<double>(), cfg["A0"].get<double>(), cfg["V0"].get<double>(), opt);
  if (a.log.empty()) {
    write_flow_log_csv(std::cout, s);
  } else {
    std::ofstream lo(a.log);
    if (!lo) throw Error(ErrorCode::IoError, "cannot write " + a.log);
    write_flow_log_csv(lo, s);
  }
  if (!a.out.empty()) save_mesh(a.out, s.mesh);
  ojson summary{{"iterations", s.iteration},
                {"reason", to_string(s.reason)},
                {"energy", s.energy_history.back()},
                {"area_residual", s.area_residual},
                {"volume_residual", s.volume_residual},
                {"worst_bound", s.worst_bound},
                {"min_sheet_dist", s.min_sheet_distance}};
  write_json(std::cerr, summary);
  std::cerr << '\n';
  return kOk;
}

int cmd_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  ojson cfg;
  try {
    cfg = ojson::parse(in);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::IoError, std::string("bad sweep JSON: ") + e.what());
  }
  if (!cfg.is_object() || cfg.empty() || !cfg.contains("kind"))
    throw Error(ErrorCode::InvalidInput, "sweep file is empty or lacks 'kind'");
  const std::string kind = cfg["kind"].get<std::string>();
  const double c0 = cfg.value("c0", 0.0);
  if (kind == "penalized_radius") {
    const double lambda = cfg.value("lambda", 0.0), p = cfg.value("p", 0.0);
    const int subdiv = cfg.value("subdiv", 4);
    auto radii = cfg.value("radii", std::vector<double>{});
    if (radii.empty()) throw Error(ErrorCode::InvalidInput, "sweep has no radii");
    std::cout << "r,penalized_energy\n";
    for (double r : radii)
      std::cout << format_double(r) << ',' << format_double(penalized_energy(sphere(r, subdiv), c0, lambda, p)) << '\n';
    return kOk;
  }
  if (kind == "dumbbell_neck") {
    const double l = cfg.value("l", 0.0), r = cfg.value("r", 1.0), res = cfg.value("resolution", kFineResolution);
    auto necks = cfg.value("necks", std::vector<double>{});
    if (necks.empty()) throw Error(ErrorCode::InvalidInput, "sweep has no neck sizes");
    std::cout << "a,helfrich\n";
    for (double a : necks)
      std::cout << format_double(a) << ',' << format_double(helfrich_energy(dumbbell(a, l, r, res), c0)) << '\n';
    return kOk;
  }
  throw Error(ErrorCode::InvalidInput, "unknown sweep kind '" + kind + "'");
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonConvergent:
    case ErrorCode::ProjectionDiverged:
    case ErrorCode::NumericalDegeneracy:
      return kNumeric;
    default:
      return kUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Helfrich-functional geometry of triangulated surfaces"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker thread cap (HELFRICH_THREADS is the fallback)");

  ShapeArgs sa;
  auto* shape = app.add_subcommand("shape", "build a surface and write it as OBJ/OFF");
  shape->add_option("name", sa.name, "sphere | capped_cylinder | dumbbell | torus | sphere_torus_mixed | lens | touching_spheres")
      ->required();
  shape->add_option("--r", sa.r);
  shape->add_option("--l", sa.l);
  shape->add_option("--a", sa.a);
  shape->add_option("--subdiv", sa.subdiv);
  shape->add_option("--resolution", sa.resolution, "target edge length");
  shape->add_option("--out", sa.out)->required();
  shape->add_option("--boundary", sa.boundary, "lens boundary atoms CSV");

  std::string report_mesh;
  double report_c0 = 0.0;
  auto* report = app.add_subcommand("report", "energy report as JSON");
  report->add_option("mesh", report_mesh)->required();
  report->add_option("--c0", report_c0);

  LiYauArgs la;
  auto* liy = app.add_subcommand("liyau", "Li-Yau certificate as JSON");
  liy->add_option("mesh", la.mesh)->required();
  liy->add_option("--c0", la.c0);
  liy->add_option("--x0", la.x0)->delimiter(',')->expected(3);
  liy->add_flag("--probe-auto", la.probe_auto, "certify the 64 vertices of highest density");
  liy->add_flag("--scale-invariant", la.scale_invariant);
  liy->add_option("--tol", la.tol);
  liy->add_option("--boundary", la.boundary, "boundary atoms CSV");

  MonoArgs ma;
  auto* mono = app.add_subcommand("monotonicity", "monotonicity profile as CSV");
  mono->add_option("mesh", ma.mesh)->required();
  mono->add_option("--c0", ma.c0);
  mono->add_option("--x0", ma.x0)->delimiter(',')->expected(3)->required();
  mono->add_option("--rho-min", ma.rho_min)->required();
  mono->add_option("--rho-max", ma.rho_max)->required();
  mono->add_option("--n", ma.n);

  MinimizeArgs mn;
  auto* mini = app.add_subcommand("minimize", "constrained minimization driven by a JSON config");
  mini->add_option("config", mn.config)->required();
  mini->add_option("--log", mn.log, "iteration log CSV (default stdout)");
  mini->add_option("--checkpoint-dir", mn.checkpoint_dir);
  mini->add_option("--checkpoint-every", mn.checkpoint_every);
  mini->add_option("--out", mn.out, "final mesh");

  std::string sweep_path;
  auto* sweep = app.add_subcommand("sweep", "parameter sweep as CSV");
  sweep->add_option("config", sweep_path, "sweep JSON")->required();

  std::string cv_mesh;
  std::vector<double> cv_x0;
  double cv_tol = 1e-4;
  auto* cvol = app.add_subcommand("cvol", "concentrated volume as JSON");
  cvol->add_option("mesh", cv_mesh)->required();
  cvol->add_option("--x0", cv_x0)->delimiter(',')->expected(3)->required();
  cvol->add_option("--tol", cv_tol);

  std::string at_mesh;
  int at_order = 3;
  auto* atoms = app.add_subcommand("atoms", "quadrature varifold atoms as CSV");
  atoms->add_option("mesh", at_mesh)->required();
  atoms->add_option("--order", at_order);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (threads > 0) parallel::set_thread_limit(threads);

  try {
    if (*shape) return cmd_shape(sa);
    if (*report) {
      print_json(energy_report(load_mesh(report_mesh), report_c0));
      return kOk;
    }
    if (*liy) return cmd_liyau(la);
    if (*mono) return cmd_monotonicity(ma);
    if (*mini) return cmd_minimize(mn);
    if (*sweep) return cmd_sweep(sweep_path);
    if (*cvol) {
      print_json(concentrated_volume(load_mesh(cv_mesh), parse_point(cv_x0), cv_tol));
      return kOk;
    }
    if (*atoms) {
      write_atoms_csv(std::cout, quadrature_varifold(load_mesh(at_mesh), at_order, false));
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
