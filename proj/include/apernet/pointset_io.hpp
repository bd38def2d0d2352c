#pragma once

#include "apernet/netgen.hpp"

#include <iosfwd>
#include <string>

namespace apernet {

// PointSet text format: one JSON header line (dimensions, generator, window,
// provenance, format version), then one point per line with coordinates
// printed to 12 significant digits, space separated.
void write_pointset(std::ostream& os, const PointSet& ps);
void write_pointset_file(const std::string& path, const PointSet& ps);
PointSet read_pointset(std::istream& is);
PointSet read_pointset_file(const std::string& path);

}  // namespace apernet
