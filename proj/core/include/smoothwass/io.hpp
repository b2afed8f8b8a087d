#ifndef SMOOTHWASS_IO_HPP_
#define SMOOTHWASS_IO_HPP_

#include <span>
#include <string>
#include <vector>

#include "smoothwass/measures.hpp"
#include "smoothwass/ot.hpp"
#include "smoothwass/sobolev.hpp"

namespace smoothwass {

// Locale-independent shortest round-trip formatting (std::to_chars).
std::string format_double(double x);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// One row per point, comma-separated coordinates, no header.
std::string sample_to_csv(const Sample& s);
Sample sample_from_csv(const std::string& text);

// i,j,mass triples.
std::string plan_to_csv(const TransportPlan& plan);

// index,value,side rows with side in {g, gc}.
std::string duals_to_csv(const DualPotentials& duals);

// Node coordinates then the value, one node per row.
std::string grid_field_to_csv(const Grid& grid, std::span<const double> values);

// Single column.
std::string values_to_csv(std::span<const double> values);
std::vector<double> values_from_csv(const std::string& text);

}  // namespace smoothwass

#endif  // SMOOTHWASS_IO_HPP_
