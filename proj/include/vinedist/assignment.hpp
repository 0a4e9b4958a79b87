#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace vinedist::assignment {

inline constexpr double kForbidden = std::numeric_limits<double>::infinity();

/// Dense square cost matrix; +inf marks a forbidden cell.
class CostMatrix {
 public:
  explicit CostMatrix(std::size_t n = 0, double fill = kForbidden) : n_(n), data_(n * n, fill) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }

  double max_finite() const {
    double m = 0.0;
    for (double c : data_)
      if (std::isfinite(c)) m = std::max(m, std::abs(c));
    return m;
  }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

struct Solution {
  std::vector<std::size_t> row_to_col;
  double value = 0.0;     // sum of costs, or the bottleneck value
  bool ambiguous = false;  // another optimal assignment differs on a preferred row
};

namespace detail {

// Shortest augmenting path with dual potentials (Kuhn-Munkres / Jonker-Volgenant
// style). Rows are inserted in index order and columns scanned in index order
// with strict comparisons, so the result is deterministic.
inline void hungarian(const CostMatrix& a, std::vector<std::size_t>& row_to_col, std::vector<double>& u,
                      std::vector<double>& v) {
  const std::size_t n = a.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  u.assign(n + 1, 0.0);
  v.assign(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<double> minv(n + 1);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double c = a(i0 - 1, j - 1);
        const double cur = std::isfinite(c) ? c - u[i0] - v[j] : inf;
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 == 0) throw std::runtime_error("assignment problem has no feasible perfect matching");
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
  row_to_col.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
}

// Tarjan SCC over rows; an edge a -> b exists when a has a tight, unmatched
// column currently owned by b. A preferred row on a cycle has an alternative
// optimal partner.
inline bool preferred_row_on_cycle(const std::vector<std::vector<std::size_t>>& adj, std::size_t preferred) {
  const std::size_t n = adj.size();
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  int counter = 0, comps = 0;
  std::vector<std::size_t> comp_size;
  std::function<void(std::size_t)> strong = [&](std::size_t x) {
    index[x] = low[x] = counter++;
    stack.push_back(x);
    on_stack[x] = 1;
    for (std::size_t y : adj[x]) {
      if (index[y] < 0) {
        strong(y);
        low[x] = std::min(low[x], low[y]);
      } else if (on_stack[y]) {
        low[x] = std::min(low[x], index[y]);
      }
    }
    if (low[x] == index[x]) {
      std::size_t size = 0;
      std::size_t y;
      do {
        y = stack.back();
        stack.pop_back();
        on_stack[y] = 0;
        comp[y] = comps;
        ++size;
      } while (y != x);
      comp_size.push_back(size);
      ++comps;
    }
  };
  for (std::size_t x = 0; x < n; ++x)
    if (index[x] < 0) strong(x);
  for (std::size_t x = 0; x < preferred && x < n; ++x)
    if (comp_size[static_cast<std::size_t>(comp[x])] > 1) return true;
  return false;
}

// Among optimal assignments (perfect matchings of the tight graph), pick the
// one whose preferred rows take the lexicographically smallest columns.
inline void lexicographic_refine(const std::vector<std::vector<char>>& tight, std::vector<std::size_t>& row_to_col,
                                 std::size_t preferred) {
  const std::size_t n = row_to_col.size();
  std::vector<std::size_t> col_to_row(n);
  for (std::size_t r = 0; r < n; ++r) col_to_row[row_to_col[r]] = r;
  std::vector<char> fixed(n, 0);
  std::vector<char> visited(n);

  // Re-route row b to some other column through unfixed rows, ending at `target`.
  std::function<bool(std::size_t, std::size_t)> reroute = [&](std::size_t b, std::size_t target) -> bool {
    for (std::size_t c = 0; c < n; ++c) {
      if (!tight[b][c] || visited[c] || c == row_to_col[b]) continue;
      visited[c] = 1;
      if (c == target) {
        row_to_col[b] = c;
        col_to_row[c] = b;
        return true;
      }
      const std::size_t owner = col_to_row[c];
      if (fixed[owner]) continue;
      if (reroute(owner, target)) {
        row_to_col[b] = c;
        col_to_row[c] = b;
        return true;
      }
    }
    return false;
  };

  for (std::size_t r = 0; r < preferred && r < n; ++r) {
    const std::size_t current = row_to_col[r];
    for (std::size_t c = 0; c < current; ++c) {
      if (!tight[r][c]) continue;
      const std::size_t owner = col_to_row[c];
      if (fixed[owner]) continue;
      std::fill(visited.begin(), visited.end(), 0);
      visited[c] = 1;
      fixed[r] = 1;
      const std::vector<std::size_t> saved_rc = row_to_col, saved_cr = col_to_row;
      if (reroute(owner, current)) {
        row_to_col[r] = c;
        col_to_row[c] = r;
        break;
      }
      row_to_col = saved_rc;
      col_to_row = saved_cr;
      fixed[r] = 0;
    }
    fixed[r] = 1;
  }
}

inline bool has_perfect_matching(const CostMatrix& a, double threshold, std::vector<std::size_t>& row_to_col) {
  // Hopcroft-Karp on edges with cost <= threshold.
  const std::size_t n = a.size();
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (a(i, j) <= threshold) adj[i].push_back(j);
  std::vector<std::size_t> match_row(n, none), match_col(n, none), dist(n);
  auto bfs = [&]() {
    std::queue<std::size_t> q;
    bool found = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (match_row[i] == none) {
        dist[i] = 0;
        q.push(i);
      } else {
        dist[i] = none;
      }
    }
    while (!q.empty()) {
      const std::size_t i = q.front();
      q.pop();
      for (std::size_t j : adj[i]) {
        const std::size_t r = match_col[j];
        if (r == none) {
          found = true;
        } else if (dist[r] == none) {
          dist[r] = dist[i] + 1;
          q.push(r);
        }
      }
    }
    return found;
  };
  std::function<bool(std::size_t)> dfs = [&](std::size_t i) -> bool {
    for (std::size_t j : adj[i]) {
      const std::size_t r = match_col[j];
      if (r == none || (dist[r] == dist[i] + 1 && dfs(r))) {
        match_row[i] = j;
        match_col[j] = i;
        return true;
      }
    }
    dist[i] = none;
    return false;
  };
  std::size_t matched = 0;
  while (bfs())
    for (std::size_t i = 0; i < n; ++i)
      if (match_row[i] == none && dfs(i)) ++matched;
  if (matched != n) return false;
  row_to_col = match_row;
  return true;
}

}  // namespace detail

/// Minimum-cost perfect assignment. Rows [0, preferred) are the rows whose
/// partners matter to the caller: if their optimal partners are not unique the
/// result is flagged ambiguous and re-chosen to give them the lexicographically
/// smallest columns among all optimal assignments.
inline Solution solve_min_cost(const CostMatrix& a, std::size_t preferred) {
  Solution s;
  const std::size_t n = a.size();
  if (n == 0) return s;
  std::vector<double> u, v;
  detail::hungarian(a, s.row_to_col, u, v);

  const double tol = 1e-10 * std::max(1.0, a.max_finite());
  std::vector<std::vector<char>> tight(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      tight[i][j] = std::isfinite(a(i, j)) && (a(i, j) - u[i + 1] - v[j + 1]) <= tol;
  std::vector<std::size_t> col_to_row(n);
  for (std::size_t r = 0; r < n; ++r) col_to_row[s.row_to_col[r]] = r;
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (tight[r][c] && c != s.row_to_col[r]) adj[r].push_back(col_to_row[c]);
  s.ambiguous = detail::preferred_row_on_cycle(adj, preferred);
  if (s.ambiguous) detail::lexicographic_refine(tight, s.row_to_col, preferred);

  for (std::size_t r = 0; r < n; ++r) s.value += a(r, s.row_to_col[r]);
  return s;
}

/// Assignment minimizing the largest cost used (binary search over the
/// distinct finite costs plus Hopcroft-Karp feasibility).
inline Solution solve_bottleneck(const CostMatrix& a) {
  Solution s;
  const std::size_t n = a.size();
  if (n == 0) return s;
  std::vector<double> levels;
  levels.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (std::isfinite(a(i, j))) levels.push_back(a(i, j));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::size_t lo = 0, hi = levels.size() - 1;
  std::vector<std::size_t> best;
  if (!detail::has_perfect_matching(a, levels[hi], best))
    throw std::runtime_error("assignment problem has no feasible perfect matching");
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    std::vector<std::size_t> trial;
    if (detail::has_perfect_matching(a, levels[mid], trial)) {
      hi = mid;
      best = std::move(trial);
    } else {
      lo = mid + 1;
    }
  }
  s.row_to_col = std::move(best);
  s.value = levels[hi];
  return s;
}

}  // namespace vinedist::assignment
