#include "lipc/grid_io.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

namespace lipc {

std::string grid_function_to_csv(const Grid& grid, const Eigen::Ref<const Vector>& v, const CsvMetadata* metadata) {
  grid.require(v.size(), "grid_function_to_csv");
  std::string out = grid.dim() == 1 ? "x1,value\n" : "x1,x2,value\n";
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    for (int axis = 0; axis < grid.dim(); ++axis) out += format_double(grid.coord(k, axis)) + ",";
    out += format_double(v(k)) + "\n";
  }
  if (metadata) out += metadata->render();
  return out;
}

GridFunction grid_function_from_csv(const Grid& grid, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  const std::string expected_header = grid.dim() == 1 ? "x1,value" : "x1,x2,value";
  bool header_seen = false;
  GridFunction out(grid.size());
  Eigen::Index k = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != expected_header)
        throw ParseError("grid CSV line " + std::to_string(line_no) + ": expected header \"" + expected_header + "\"");
      header_seen = true;
      continue;
    }
    std::vector<double> fields;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
      try {
        std::size_t used = 0;
        fields.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError("grid CSV line " + std::to_string(line_no) + ": not a number: \"" + cell + "\"");
      }
    }
    if (static_cast<int>(fields.size()) != grid.dim() + 1)
      throw ParseError("grid CSV line " + std::to_string(line_no) + ": expected " + std::to_string(grid.dim() + 1) +
                       " fields");
    if (k >= grid.size()) throw ParseError("grid CSV line " + std::to_string(line_no) + ": more rows than grid nodes");
    for (int axis = 0; axis < grid.dim(); ++axis)
      if (std::abs(fields[axis] - grid.coord(k, axis)) > 1e-9 * grid.spacing(axis))
        throw ParseError("grid CSV line " + std::to_string(line_no) + ": coordinate x" + std::to_string(axis + 1) +
                         " does not match node " + std::to_string(k));
    out(k++) = fields.back();
  }
  if (!header_seen) throw ParseError("grid CSV: missing header");
  if (k != grid.size())
    throw ParseError("grid CSV: " + std::to_string(k) + " rows for " + std::to_string(grid.size()) + " nodes");
  return out;
}

std::string grid_function_to_json(const Grid& grid, const Eigen::Ref<const Vector>& v) {
  grid.require(v.size(), "grid_function_to_json");
  nlohmann::json doc;
  doc["dim"] = grid.dim();
  nlohmann::json lower = nlohmann::json::array(), upper = nlohmann::json::array(), nodes = nlohmann::json::array();
  for (int axis = 0; axis < grid.dim(); ++axis) {
    lower.push_back(grid.lower(axis));
    upper.push_back(grid.upper(axis));
    nodes.push_back(grid.nodes(axis));
  }
  doc["lower"] = lower;
  doc["upper"] = upper;
  doc["nodes"] = nodes;
  doc["values"] = std::vector<double>(v.data(), v.data() + v.size());
  return doc.dump() + "\n";
}

GridFunction grid_function_from_json(const Grid& grid, const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("grid JSON: ") + e.what());
  }
  try {
    const int dim = doc.at("dim").get<int>();
    const auto lower = doc.at("lower").get<std::vector<double>>();
    const auto upper = doc.at("upper").get<std::vector<double>>();
    const auto nodes = doc.at("nodes").get<std::vector<int>>();
    if (dim != grid.dim() || static_cast<int>(nodes.size()) != dim)
      throw ParseError("grid JSON: dimension does not match grid");
    for (int axis = 0; axis < dim; ++axis)
      if (nodes[axis] != grid.nodes(axis) || lower[axis] != grid.lower(axis) || upper[axis] != grid.upper(axis))
        throw ParseError("grid JSON: axis " + std::to_string(axis) + " does not match grid");
    const auto values = doc.at("values").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(values.size()) != grid.size())
      throw ParseError("grid JSON: " + std::to_string(values.size()) + " values for " + std::to_string(grid.size()) +
                       " nodes");
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("grid JSON: ") + e.what());
  }
}

}  // namespace lipc
