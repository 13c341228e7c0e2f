#pragma once

#include <cstddef>
#include <vector>

#include "ota/cost_builder.hpp"

namespace ota {

struct ExactSolution {
  std::vector<int> assignment;  // supplier index per anchor; m is background
  double cost = 0.0;            // sum over j of c(assignment[j], j), in index order
};

inline constexpr std::size_t kDefaultExactLimit = 512;
inline constexpr std::size_t kEnumerateLimit = 10;

// Exact integral optimum for unit demands: every supplier is expanded into
// supply[i] slots and the resulting n x n assignment problem is solved with the
// Hungarian method. Among optima (within a 1e-12 relative margin) the
// lexicographically smallest assignment vector is returned.
// Throws UNBALANCED, TOO_LARGE, INVALID_ARGUMENT (non-integral supply or demand != 1).
ExactSolution solve_exact(const CostMatrix& cost, const SupplyDemand& sd,
                          std::size_t limit = kDefaultExactLimit);

// Exhaustive search over every feasible assignment, n <= 10. Strictly smaller
// costs win, so exact ties resolve to the lexicographically first vector.
ExactSolution enumerate_exact(const CostMatrix& cost, const SupplyDemand& sd);

// Sum over j of c(assignment[j], j).
double assignment_cost(const CostMatrix& cost, const std::vector<int>& assignment);

}  // namespace ota
