#include "smoothwass/io.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "smoothwass/errors.hpp"

namespace smoothwass {

std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sample_to_csv(const Sample& s) {
  std::string out;
  out.reserve(static_cast<std::size_t>(s.n) * s.d * 20);
  for (int i = 0; i < s.n; ++i) {
    for (int a = 0; a < s.d; ++a) {
      if (a) out += ',';
      out += format_double(s.at(i, a));
    }
    out += '\n';
  }
  return out;
}

Sample sample_from_csv(const std::string& text) {
  Sample s;
  s.d = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int cols = 0;
    const char* ptr = line.data();
    const char* end = line.data() + line.size();
    while (ptr < end) {
      double v = 0.0;
      const auto res = std::from_chars(ptr, end, v);
      if (res.ec != std::errc{})
        throw ConfigError("bad numeric field in sample CSV: " + line);
      s.points.push_back(v);
      ++cols;
      ptr = res.ptr;
      if (ptr < end && *ptr == ',') ++ptr;
    }
    if (s.d == 0)
      s.d = cols;
    else if (cols != s.d)
      throw ConfigError("ragged sample CSV");
    ++s.n;
  }
  if (s.n == 0) throw ConfigError("empty sample CSV");
  s.validate();
  return s;
}

std::string plan_to_csv(const TransportPlan& plan) {
  std::string out = "i,j,mass\n";
  for (const auto& e : plan.entries) {
    out += std::to_string(e.i);
    out += ',';
    out += std::to_string(e.j);
    out += ',';
    out += format_double(e.mass);
    out += '\n';
  }
  return out;
}

std::string duals_to_csv(const DualPotentials& duals) {
  std::string out = "index,value,side\n";
  for (std::size_t i = 0; i < duals.g.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_double(duals.g[i]);
    out += ",g\n";
  }
  for (std::size_t j = 0; j < duals.gc.size(); ++j) {
    out += std::to_string(j);
    out += ',';
    out += format_double(duals.gc[j]);
    out += ",gc\n";
  }
  return out;
}

std::string grid_field_to_csv(const Grid& grid,
                              std::span<const double> values) {
  if (values.size() != static_cast<std::size_t>(grid.total_nodes()))
    throw ConfigError("grid_field_to_csv: size mismatch");
  std::string out;
  for (int ix = 0; ix < grid.nodes[0]; ++ix) {
    const int ny = grid.dim == 1 ? 1 : grid.nodes[1];
    for (int iy = 0; iy < ny; ++iy) {
      out += format_double(grid.coord(0, ix));
      if (grid.dim == 2) {
        out += ',';
        out += format_double(grid.coord(1, iy));
      }
      out += ',';
      out += format_double(values[grid.dim == 1 ? ix : grid.node_id(ix, iy)]);
      out += '\n';
    }
  }
  return out;
}

std::string values_to_csv(std::span<const double> values) {
  std::string out;
  for (double v : values) {
    out += format_double(v);
    out += '\n';
  }
  return out;
}

std::vector<double> values_from_csv(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double v = 0.0;
    const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
    if (res.ec != std::errc{})
      throw ConfigError("bad numeric line in CSV: " + line);
    out.push_back(v);
  }
  return out;
}

}  // namespace smoothwass
