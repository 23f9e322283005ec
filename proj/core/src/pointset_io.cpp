#include "mslab/pointset_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace mslab {

void write_pointset(std::ostream& out, const PointSet& ps) {
  out << "# manifold=" << ps.manifold.name() << " n=" << ps.size() << "\n";
  char buf[64];
  for (int j = 0; j < ps.size(); ++j) {
    for (int i = 0; i < ps.points.rows(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", ps.points(i, j));
      out << (i ? " " : "") << buf;
    }
    out << "\n";
  }
}

void write_pointset_file(const std::string& path, const PointSet& ps) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open for writing: " + path);
  write_pointset(out, ps);
}

PointSet read_pointset(std::istream& in, const std::string& context) {
  std::string header;
  if (!std::getline(in, header)) {
    throw std::invalid_argument(context + ": empty point-set input");
  }
  std::string manifold_name;
  long declared_n = -1;
  {
    std::istringstream hs(header);
    std::string tok;
    while (hs >> tok) {
      if (tok.rfind("manifold=", 0) == 0) manifold_name = tok.substr(9);
      if (tok.rfind("n=", 0) == 0) declared_n = std::stol(tok.substr(2));
    }
  }
  if (manifold_name.empty() || declared_n < 1) {
    throw std::invalid_argument(context + ": malformed point-set header: " + header);
  }
  Manifold m = Manifold::from_name(manifold_name);
  const int dim = m.embedding_dim();
  Eigen::MatrixXd pts(dim, declared_n);
  std::string line;
  long row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (row >= declared_n) {
      throw std::invalid_argument(context + ": more points than declared n");
    }
    std::istringstream ls(line);
    std::vector<double> coords;
    double v;
    while (ls >> v) coords.push_back(v);
    if (static_cast<int>(coords.size()) != dim) {
      throw std::invalid_argument(context + ": expected " + std::to_string(dim) +
                                  " coordinates, got " + std::to_string(coords.size()));
    }
    for (int i = 0; i < dim; ++i) pts(i, row) = coords[i];
    ++row;
  }
  if (row != declared_n) {
    throw std::invalid_argument(context + ": declared n=" + std::to_string(declared_n) +
                                " but read " + std::to_string(row) + " points");
  }
  return PointSet(m, std::move(pts), context);
}

PointSet read_pointset_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open point-set file: " + path);
  return read_pointset(in, path);
}

}  // namespace mslab
