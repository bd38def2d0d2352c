#include "apernet/pointset_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace apernet {

void write_pointset(std::ostream& os, const PointSet& ps) {
  nlohmann::json header;
  header["format_version"] = 1;
  header["kind"] = "pointset";
  header["dim"] = ps.dim;
  header["count"] = ps.pts.size();
  header["generator"] = ps.generator;
  header["window"] = {{"lo", std::vector<double>(ps.window.lo.data(), ps.window.lo.data() + ps.window.lo.size())},
                      {"hi", std::vector<double>(ps.window.hi.data(), ps.window.hi.data() + ps.window.hi.size())}};
  if (!ps.meta.is_null()) header["meta"] = ps.meta;
  if (!ps.boundary_flags.empty()) header["boundary_flags"] = ps.boundary_flags;
  os << header.dump() << "\n";
  char buf[64];
  for (const auto& p : ps.pts) {
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.12g", p[i]);
      if (i) os << ' ';
      os << buf;
    }
    os << '\n';
  }
}

void write_pointset_file(const std::string& path, const PointSet& ps) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write_pointset(f, ps);
}

PointSet read_pointset(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("pointset: empty stream");
  nlohmann::json header = nlohmann::json::parse(line);
  if (header.value("kind", "") != "pointset")
    throw std::runtime_error("pointset: bad header kind");
  PointSet ps;
  ps.dim = header.at("dim").get<int>();
  auto lo = header.at("window").at("lo").get<std::vector<double>>();
  auto hi = header.at("window").at("hi").get<std::vector<double>>();
  ps.window = Box(Eigen::Map<const Vec>(lo.data(), static_cast<Eigen::Index>(lo.size())),
                  Eigen::Map<const Vec>(hi.data(), static_cast<Eigen::Index>(hi.size())));
  ps.generator = header.value("generator", "");
  if (header.contains("meta")) ps.meta = header["meta"];
  if (header.contains("boundary_flags"))
    ps.boundary_flags = header["boundary_flags"].get<std::vector<std::size_t>>();
  std::size_t count = header.at("count").get<std::size_t>();
  ps.pts.reserve(count);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    Vec p(ps.dim);
    for (int i = 0; i < ps.dim; ++i)
      if (!(ss >> p[i])) throw std::runtime_error("pointset: malformed point line");
    ps.pts.push_back(p);
  }
  if (ps.pts.size() != count) throw std::runtime_error("pointset: point count mismatch");
  return ps;
}

PointSet read_pointset_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return read_pointset(f);
}

}  // namespace apernet
