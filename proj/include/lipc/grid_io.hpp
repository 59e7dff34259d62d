#pragma once

#include "lipc/grid.hpp"
#include "lipc/io_util.hpp"

#include <string>

namespace lipc {

// CSV: header "x1,value" or "x1,x2,value", one row per interior node in grid order, followed by the
// metadata block when given.
std::string grid_function_to_csv(const Grid& grid, const Eigen::Ref<const Vector>& v,
                                 const CsvMetadata* metadata = nullptr);
// Rows must list the grid's nodes in order; coordinates are checked to 1e-9 relative to spacing.
GridFunction grid_function_from_csv(const Grid& grid, const std::string& text);

// {"dim", "lower", "upper", "nodes", "values"} for exact machine round-trips.
std::string grid_function_to_json(const Grid& grid, const Eigen::Ref<const Vector>& v);
GridFunction grid_function_from_json(const Grid& grid, const std::string& text);

}  // namespace lipc
