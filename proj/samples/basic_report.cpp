// Energy report and Li-Yau bound for a unit icosphere.
#include "helfrich/helfrich.hpp"

#include <iostream>

int main() {
  using namespace helfrich;
  TriangleImmersion s = sphere(1.0, 4);
  EnergyReport r = energy_report(s, -1.0);
  std::cout << "area " << r.area << "  volume " << r.algebraic_volume << "  helfrich " << r.helfrich << '\n';

  LiYauCertificate c = liyau_bound(s, -1.0, Vec3(1, 0, 0));
  std::cout << "Li-Yau bound at (1,0,0): " << c.bound << " (measured multiplicity " << c.measured_multiplicity
            << ", " << to_string(c.verdict) << ")\n";
}
