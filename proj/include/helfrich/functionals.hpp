#pragma once

#include "helfrich/varifold.hpp"

#include <json.hpp>

namespace helfrich {

inline double helfrich_energy(const CurvatureField& cf, double c0) {
  std::vector<double> t(cf.H_sc.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    double d = cf.H_sc[i] - c0;
    t[i] = 0.25 * cf.area[i] * d * d;
  }
  return pairwise_sum(t);
}

inline double helfrich_energy(const TriangleImmersion& m, double c0) { return helfrich_energy(mean_curvature(m), c0); }

inline double helfrich_energy(const OrientedVarifoldAtoms& V, double c0) {
  if (!V.has_curvature()) throw Error(ErrorCode::InvalidInput, "atoms carry no curvature");
  std::vector<double> t(V.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    double d = V.H_sc(i) - c0;
    t[i] = 0.25 * V.w[i] * d * d;
  }
  return pairwise_sum(t);
}

inline double willmore_energy(const CurvatureField& cf) { return helfrich_energy(cf, 0.0); }
inline double willmore_energy(const TriangleImmersion& m) { return helfrich_energy(m, 0.0); }
inline double willmore_energy(const OrientedVarifoldAtoms& V) { return helfrich_energy(V, 0.0); }

struct CmcDeficit {
  double deficit;
  double average_H_sc;
};

inline CmcDeficit cmc_deficit(const CurvatureField& cf) {
  std::vector<double> ah(cf.H_sc.size());
  for (std::size_t i = 0; i < ah.size(); ++i) ah[i] = cf.area[i] * cf.H_sc[i];
  double hbar = pairwise_sum(ah) / pairwise_sum(cf.area);
  return {helfrich_energy(cf, hbar), hbar};
}

inline CmcDeficit cmc_deficit(const TriangleImmersion& m) { return cmc_deficit(mean_curvature(m)); }

// (1/2) int H_sc
inline double total_mean_curvature(const CurvatureField& cf) {
  std::vector<double> ah(cf.H_sc.size());
  for (std::size_t i = 0; i < ah.size(); ++i) ah[i] = cf.area[i] * cf.H_sc[i];
  return 0.5 * pairwise_sum(ah);
}

inline double total_mean_curvature(const TriangleImmersion& m) { return total_mean_curvature(mean_curvature(m)); }

inline double penalized_energy(const TriangleImmersion& m, double c0, double lambda, double p) {
  return helfrich_energy(m, c0) + lambda * total_area(m) + p * algebraic_volume(m);
}

struct EnergyReport {
  double area = 0, algebraic_volume = 0, helfrich = 0, willmore = 0, cmc_deficit = 0;
  double average_H_sc = 0, total_mean_curvature = 0, isoperimetric_ratio = 0, c0 = 0;
};

inline EnergyReport energy_report(const TriangleImmersion& m, double c0) {
  CurvatureField cf = mean_curvature(m);
  EnergyReport r;
  r.c0 = c0;
  r.area = total_area(m);
  r.algebraic_volume = algebraic_volume(m);
  r.helfrich = helfrich_energy(cf, c0);
  r.willmore = willmore_energy(cf);
  CmcDeficit d = cmc_deficit(cf);
  r.cmc_deficit = d.deficit;
  r.average_H_sc = d.average_H_sc;
  r.total_mean_curvature = total_mean_curvature(cf);
  r.isoperimetric_ratio = r.area * r.area * r.area / (r.algebraic_volume * r.algebraic_volume);
  return r;
}

inline void to_json(nlohmann::ordered_json& j, const EnergyReport& r) {
  j = nlohmann::ordered_json{{"area", r.area},
                             {"algebraic_volume", r.algebraic_volume},
                             {"helfrich", r.helfrich},
                             {"willmore", r.willmore},
                             {"cmc_deficit", r.cmc_deficit},
                             {"average_H_sc", r.average_H_sc},
                             {"total_mean_curvature", r.total_mean_curvature},
                             {"isoperimetric_ratio", r.isoperimetric_ratio},
                             {"c0", r.c0}};
}

}  // namespace helfrich
