#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace stellar::detail {

/// Sparse row of a linear constraint: (variable index, integer coefficient).
using LinearRow = std::vector<std::pair<std::size_t, long>>;

/// Decides whether { x ≥ 0 : A x = b } is non-empty, exactly, with the
/// phase-one simplex method over rationals (Bland's rule, so it terminates).
bool feasible(const std::vector<LinearRow>& rows, const std::vector<long>& rhs, std::size_t variables);

}  // namespace stellar::detail
