#pragma once

#include <iosfwd>
#include <string>

#include "mslab/manifold.hpp"

namespace mslab {

// Text format: first line "# manifold=<S1|S2|T2> n=<count>", then one point
// per line, space-separated coordinates with 17 significant digits.
void write_pointset(std::ostream& out, const PointSet& ps);
void write_pointset_file(const std::string& path, const PointSet& ps);

// Rejects header/coordinate-count mismatches and invalid points.
PointSet read_pointset(std::istream& in, const std::string& context = "<stream>");
PointSet read_pointset_file(const std::string& path);

}  // namespace mslab
