#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gridsafe/types.hpp"

namespace gridsafe::detail {

struct ParsedMap {
  Grid grid;
  std::vector<Position> agents;  // indexed by agent number - 1
  std::vector<Target> targets;
};

/// Parses map rows. `first_line` is the 1-based line number of rows[0] in the
/// enclosing document, used for error positions.
ParsedMap parse_map(const std::vector<std::string>& rows, int first_line);

std::vector<std::string> split_lines(std::string_view text);

}  // namespace gridsafe::detail
