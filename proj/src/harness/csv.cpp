#include <fstream>
#include <sstream>

#include "dpt/harness.hpp"

namespace dpt::harness {

const char* const kCsvHeader =
    "index,param,value,model,backend,n_atoms,vx,vy,omega,gamma_i,gamma_c,x,y,z,xi2,residual,converged,"
    "status,method,wall_time";

namespace {
std::string clean(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  return s;
}
}  // namespace

std::string csv_line(const Row& r, const RunConfig& cfg) {
  const ModelParams& p = r.params;
  std::ostringstream os;
  os << r.index << ',' << (cfg.sweep ? cfg.sweep->param : std::string("none")) << ',' << fmt(r.value) << ','
     << to_string(p.model) << ',' << to_string(cfg.backend) << ',' << p.n_atoms << ',' << fmt(p.vx) << ','
     << fmt(p.vy) << ',' << fmt(p.omega) << ',' << fmt(p.gamma_i) << ',' << fmt(p.gamma_c) << ',' << fmt(r.x)
     << ',' << fmt(r.y) << ',' << fmt(r.z) << ',' << fmt(r.xi2) << ',' << fmt(r.residual) << ','
     << (r.converged ? 1 : 0) << ',' << clean(r.status) << ',' << clean(r.method) << ',' << fmt(r.wall_time);
  return os.str();
}

std::map<std::size_t, std::string> read_csv_rows(const std::string& path) {
  std::map<std::size_t, std::string> rows;
  std::ifstream f(path);
  if (!f) return rows;
  std::string line;
  if (!std::getline(f, line) || line != kCsvHeader) return rows;
  while (std::getline(f, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos || comma == 0) continue;
    // A complete row has every column; a torn final write does not.
    std::size_t cols = 1;
    for (char c : line) cols += c == ',';
    if (cols != 20) continue;
    std::size_t idx = 0;
    try {
      idx = std::stoul(line.substr(0, comma));
    } catch (...) {
      continue;
    }
    rows.emplace(idx, line);
  }
  return rows;
}

}  // namespace dpt::harness
