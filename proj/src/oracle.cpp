#include "ota/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ota/error.hpp"

namespace ota {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Integral supplies, unit demands, balanced totals.
std::vector<int> integral_supplies(const CostMatrix& cost, const SupplyDemand& sd) {
  const std::size_t rows = cost.values.rows();
  const std::size_t n = cost.n();
  if (sd.supply.size() != rows || sd.demand.size() != n) {
    throw Error(Errc::kInvalidArgument, "supply/demand shape does not match cost matrix");
  }
  for (double d : sd.demand) {
    if (d != 1.0) throw Error(Errc::kInvalidArgument, "exact oracle requires unit demands");
  }
  std::vector<int> caps(rows);
  long long total = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    const double s = sd.supply[i];
    if (!(s >= 0.0) || std::abs(s - std::round(s)) > 1e-9) {
      throw Error(Errc::kInvalidArgument, "exact oracle requires non-negative integral supplies");
    }
    caps[i] = static_cast<int>(std::llround(s));
    total += caps[i];
  }
  if (total != static_cast<long long>(n)) {
    throw Error(Errc::kUnbalanced, "total supply " + std::to_string(total) + " != n = " + std::to_string(n));
  }
  for (double c : cost.values.data()) {
    if (!std::isfinite(c)) throw Error(Errc::kNonfiniteInput, "cost matrix contains NaN or Inf");
  }
  return caps;
}

// Shortest-augmenting-path Hungarian method (potentials form), O(n^3).
// Returns the column matched to each row.
std::vector<std::size_t> hungarian(const MatrixD& a) {
  const std::size_t n = a.rows();
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0);    // p[col] = row matched to col (1-based, 0 = none)
  std::vector<std::size_t> way(n + 1, 0);
  std::vector<double> minv(n + 1);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
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
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

// Walks anchors in index order and moves each to the smallest supplier that
// keeps the assignment optimal. A move of anchor j from a to i < a is
// cost-neutral iff the residual supplier graph over anchors > j has an i -> a
// path cancelling c(i,j) - c(a,j). Shortest paths come from Bellman-Ford; the
// graph has no negative cycles because the incoming assignment is optimal.
void canonicalize(const CostMatrix& cost, std::vector<int>& assign) {
  const std::size_t rows = cost.values.rows();
  const std::size_t n = cost.n();
  double scale = 1.0;
  for (double c : cost.values.data()) scale = std::max(scale, std::abs(c));
  const double margin = 1e-12 * scale;

  std::vector<double> edge_w(rows * rows);
  std::vector<std::size_t> edge_anchor(rows * rows);
  std::vector<double> dist(rows);
  std::vector<std::size_t> pred(rows);

  for (std::size_t j = 0; j + 1 < n; ++j) {
    const auto current = static_cast<std::size_t>(assign[j]);
    if (current == 0) continue;

    // Cheapest single-anchor move between each supplier pair, anchors > j only.
    std::fill(edge_w.begin(), edge_w.end(), kInf);
    for (std::size_t jj = j + 1; jj < n; ++jj) {
      const auto from = static_cast<std::size_t>(assign[jj]);
      for (std::size_t to = 0; to < rows; ++to) {
        if (to == from) continue;
        const double w = cost(to, jj) - cost(from, jj);
        if (w < edge_w[from * rows + to]) {
          edge_w[from * rows + to] = w;
          edge_anchor[from * rows + to] = jj;
        }
      }
    }

    for (std::size_t target = 0; target < current; ++target) {
      std::fill(dist.begin(), dist.end(), kInf);
      dist[target] = 0.0;
      for (std::size_t round = 0; round + 1 < rows; ++round) {
        bool changed = false;
        for (std::size_t a = 0; a < rows; ++a) {
          if (dist[a] == kInf) continue;
          for (std::size_t b = 0; b < rows; ++b) {
            const double w = edge_w[a * rows + b];
            if (w == kInf || b == target) continue;
            if (dist[a] + w < dist[b]) {
              dist[b] = dist[a] + w;
              pred[b] = a;
              changed = true;
            }
          }
        }
        if (!changed) break;
      }
      if (dist[current] == kInf) continue;
      if (cost(target, j) - cost(current, j) + dist[current] > margin) continue;

      // Recover target -> ... -> current; reject anything non-simple.
      std::vector<std::size_t> path{current};
      while (path.back() != target && path.size() <= rows) path.push_back(pred[path.back()]);
      if (path.back() != target) continue;
      std::vector<char> seen(rows, 0);
      bool simple = true;
      for (std::size_t node : path) {
        if (seen[node]) simple = false;
        seen[node] = 1;
      }
      if (!simple) continue;
      std::reverse(path.begin(), path.end());
      std::vector<std::size_t> moved;
      for (std::size_t h = 0; h + 1 < path.size(); ++h) {
        moved.push_back(edge_anchor[path[h] * rows + path[h + 1]]);
      }
      for (std::size_t h = 0; h < moved.size(); ++h) assign[moved[h]] = static_cast<int>(path[h + 1]);
      assign[j] = static_cast<int>(target);
      break;
    }
  }
}

}  // namespace

double assignment_cost(const CostMatrix& cost, const std::vector<int>& assignment) {
  double total = 0.0;
  for (std::size_t j = 0; j < assignment.size(); ++j) {
    total += cost(static_cast<std::size_t>(assignment[j]), j);
  }
  return total;
}

ExactSolution solve_exact(const CostMatrix& cost, const SupplyDemand& sd, std::size_t limit) {
  const std::size_t n = cost.n();
  if (n > limit) {
    throw Error(Errc::kTooLarge, "exact oracle limited to n <= " + std::to_string(limit) +
                                     ", got " + std::to_string(n));
  }
  const std::vector<int> caps = integral_supplies(cost, sd);

  ExactSolution out;
  if (n == 0) return out;

  std::vector<int> slot_owner;
  slot_owner.reserve(n);
  for (std::size_t i = 0; i < caps.size(); ++i) slot_owner.insert(slot_owner.end(), caps[i], static_cast<int>(i));

  MatrixD expanded(n, n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto src = cost.values.row(static_cast<std::size_t>(slot_owner[s]));
    std::copy(src.begin(), src.end(), expanded.row(s).begin());
  }
  const std::vector<std::size_t> slot_col = hungarian(expanded);

  out.assignment.assign(n, 0);
  for (std::size_t s = 0; s < n; ++s) out.assignment[slot_col[s]] = slot_owner[s];
  canonicalize(cost, out.assignment);
  out.cost = assignment_cost(cost, out.assignment);
  return out;
}

ExactSolution enumerate_exact(const CostMatrix& cost, const SupplyDemand& sd) {
  const std::size_t n = cost.n();
  if (n > kEnumerateLimit) {
    throw Error(Errc::kTooLarge, "enumeration limited to n <= " + std::to_string(kEnumerateLimit));
  }
  std::vector<int> remaining = integral_supplies(cost, sd);
  const std::size_t rows = remaining.size();

  ExactSolution best;
  best.cost = kInf;
  std::vector<int> current(n, 0);

  // Depth-first in lexicographic order of the assignment vector.
  auto recurse = [&](auto&& self, std::size_t j) -> void {
    if (j == n) {
      const double c = assignment_cost(cost, current);
      if (c < best.cost) {
        best.cost = c;
        best.assignment = current;
      }
      return;
    }
    for (std::size_t i = 0; i < rows; ++i) {
      if (remaining[i] == 0) continue;
      --remaining[i];
      current[j] = static_cast<int>(i);
      self(self, j + 1);
      ++remaining[i];
    }
  };
  recurse(recurse, 0);
  if (n == 0) best.cost = 0.0;
  return best;
}

}  // namespace ota
