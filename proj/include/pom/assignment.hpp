#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pom {

// Maximum-weight assignment on a dense rows x cols matrix (row-major) via the
// Hungarian method with potentials, O(n^2 m). Returns, for each row, the
// assigned column or npos. Exactly min(rows, cols) rows are assigned.
inline constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);

std::vector<std::size_t> max_weight_assignment(std::span<const double> weights,
                                               std::size_t rows, std::size_t cols);

} // namespace pom
