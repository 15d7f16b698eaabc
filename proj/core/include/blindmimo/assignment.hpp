#pragma once

#include <vector>

#include "blindmimo/types.hpp"

namespace blindmimo {

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method,
/// O(n^3)). Returns col_of_row: row r is matched to column col_of_row[r].
std::vector<int> min_cost_assignment(const RMatrix& cost);

}  // namespace blindmimo
