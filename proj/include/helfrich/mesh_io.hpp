#pragma once

#include "helfrich/mesh.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <string>

namespace helfrich {

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline bool ends_with(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  return std::equal(suffix.rbegin(), suffix.rend(), s.rbegin(),
                    [](char a, char b) { return std::tolower(a) == std::tolower(b); });
}

inline int parse_obj_index(const std::string& tok, int nv) {
  std::string head = tok.substr(0, tok.find('/'));
  int i = std::stoi(head);
  return i < 0 ? nv + i : i - 1;
}

}  // namespace detail

inline TriangleImmersion read_obj(std::istream& in) {
  std::vector<Vec3> v;
  std::vector<Face> f;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) throw Error(ErrorCode::IoError, "bad vertex line: " + line);
      v.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) idx.push_back(detail::parse_obj_index(tok, static_cast<int>(v.size())));
      if (idx.size() < 3) throw Error(ErrorCode::IoError, "face with fewer than 3 vertices: " + line);
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) f.push_back({idx[0], idx[k], idx[k + 1]});
    }
  }
  return build_immersion(std::move(v), std::move(f));
}

inline TriangleImmersion read_off(std::istream& in) {
  std::string tok;
  auto next = [&]() {
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return true;
    }
    return false;
  };
  if (!next() || tok != "OFF") throw Error(ErrorCode::IoError, "missing OFF header");
  std::size_t nv = 0, nf = 0, ne = 0;
  if (!(in >> nv >> nf >> ne)) throw Error(ErrorCode::IoError, "bad OFF counts");
  std::vector<Vec3> v(nv);
  for (auto& p : v)
    if (!(in >> p.x() >> p.y() >> p.z())) throw Error(ErrorCode::IoError, "truncated OFF vertices");
  std::vector<Face> f;
  for (std::size_t i = 0; i < nf; ++i) {
    int k = 0;
    if (!(in >> k) || k < 3) throw Error(ErrorCode::IoError, "bad OFF face");
    std::vector<int> idx(k);
    for (auto& x : idx)
      if (!(in >> x)) throw Error(ErrorCode::IoError, "truncated OFF face");
    for (int j = 1; j + 1 < k; ++j) f.push_back({idx[0], idx[j], idx[j + 1]});
  }
  return build_immersion(std::move(v), std::move(f));
}

inline void write_obj(std::ostream& out, const TriangleImmersion& m) {
  for (const auto& p : m.vertices())
    out << "v " << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z()) << '\n';
  for (const auto& t : m.faces()) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

inline void write_off(std::ostream& out, const TriangleImmersion& m) {
  out << "OFF\n" << m.num_vertices() << ' ' << m.num_faces() << " 0\n";
  for (const auto& p : m.vertices())
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z()) << '\n';
  for (const auto& t : m.faces()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

inline TriangleImmersion load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return detail::ends_with(path, ".off") ? read_off(in) : read_obj(in);
}

inline void save_mesh(const std::string& path, const TriangleImmersion& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  if (detail::ends_with(path, ".off"))
    write_off(out, m);
  else
    write_obj(out, m);
}

}  // namespace helfrich
