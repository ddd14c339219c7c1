#include "pom/assignment.hpp"

#include <limits>

#include "pom/errors.hpp"

namespace pom {

namespace {

// Minimum-cost assignment of every row when rows <= cols. 1-based arrays,
// slot 0 is the virtual start column.
std::vector<std::size_t> hungarian_min(const std::vector<double>& cost, std::size_t n,
                                       std::size_t m) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    auto c = [&](std::size_t i, std::size_t j) { return cost[(i - 1) * m + (j - 1)]; };

    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<bool> used(m + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = c(i0, j) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<std::size_t> row_to_col(n, kUnassigned);
    for (std::size_t j = 1; j <= m; ++j)
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

} // namespace

std::vector<std::size_t> max_weight_assignment(std::span<const double> weights,
                                               std::size_t rows, std::size_t cols) {
    if (weights.size() != rows * cols) throw UsageError("weight matrix size mismatch");
    if (rows == 0 || cols == 0) return std::vector<std::size_t>(rows, kUnassigned);

    if (rows <= cols) {
        std::vector<double> cost(weights.size());
        for (std::size_t k = 0; k < weights.size(); ++k) cost[k] = -weights[k];
        return hungarian_min(cost, rows, cols);
    }

    // More rows than columns: solve the transpose.
    std::vector<double> cost(weights.size());
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) cost[j * rows + i] = -weights[i * cols + j];
    const auto col_to_row = hungarian_min(cost, cols, rows);
    std::vector<std::size_t> row_to_col(rows, kUnassigned);
    for (std::size_t j = 0; j < cols; ++j)
        if (col_to_row[j] != kUnassigned) row_to_col[col_to_row[j]] = j;
    return row_to_col;
}

} // namespace pom
