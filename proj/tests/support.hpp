#pragma once

// Reference implementations used as oracles by the unit and acceptance tests.
// They share no code with the library beyond the plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qitags/scheduler.hpp"

namespace qitags::oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Bellman-Ford longest path over the difference constraints of one complete
// orientation. A positive cycle or an active infinite edge is infeasible.
inline std::optional<double> bellman_ford_makespan(const ConstraintSet& cs,
                                                   const std::vector<int>& orient) {
  struct Arc {
    int from, to;
    double w;
  };
  const int m = static_cast<int>(cs.durations.size());
  std::vector<Arc> arcs;
  for (const auto& e : cs.precedence) arcs.push_back({e.from, e.to, cs.durations[e.from] + e.travel});
  for (std::size_t k = 0; k < cs.mutex_pairs.size(); ++k) {
    const auto& p = cs.mutex_pairs[k];
    if (orient[k])
      arcs.push_back({p.i, p.j, cs.durations[p.i] + p.travel_ij});
    else
      arcs.push_back({p.j, p.i, cs.durations[p.j] + p.travel_ji});
  }
  for (const auto& a : arcs)
    if (std::isinf(a.w)) return std::nullopt;
  std::vector<double> s(cs.initial_offsets);
  for (double x : s)
    if (std::isinf(x)) return std::nullopt;
  for (int round = 0; round <= m; ++round) {
    bool relaxed = false;
    for (const auto& a : arcs)
      if (s[a.from] + a.w > s[a.to]) {
        s[a.to] = s[a.from] + a.w;
        relaxed = true;
      }
    if (!relaxed) {
      double c = 0.0;
      for (int i = 0; i < m; ++i) c = std::max(c, s[i] + cs.durations[i]);
      return c;
    }
  }
  return std::nullopt;
}

// Minimum over all 2^k orientations; nullopt when none is consistent.
inline std::optional<double> enumerate_makespan(const ConstraintSet& cs) {
  const std::size_t k = cs.mutex_pairs.size();
  std::optional<double> best;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << k); ++code) {
    std::vector<int> orient(k);
    for (std::size_t b = 0; b < k; ++b) orient[b] = (code >> b) & 1;
    bool both_inf = false;
    for (const auto& p : cs.mutex_pairs)
      if (std::isinf(p.travel_ij) && std::isinf(p.travel_ji)) both_inf = true;
    if (both_inf) return std::nullopt;
    if (auto c = bellman_ford_makespan(cs, orient); c && (!best || *c < *best)) best = c;
  }
  return best;
}

// Random constraint set with a precedence DAG and up to `max_pairs`
// disjunctions; a few travel times are infinite.
inline ConstraintSet random_constraint_set(std::mt19937_64& rng, std::size_t max_pairs = 8) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int m = 2 + static_cast<int>(rng() % 6);
  ConstraintSet cs;
  for (int i = 0; i < m; ++i) {
    cs.durations.push_back(1.0 + std::floor(9.0 * unit(rng) * 4.0) / 4.0);
    cs.initial_offsets.push_back(unit(rng) < 0.3 ? 0.0 : std::floor(5.0 * unit(rng) * 2.0) / 2.0);
  }
  cs.initial_legs.resize(m);
  auto travel = [&] {
    const double r = unit(rng);
    if (r < 0.06) return kInf;
    if (r < 0.3) return 0.0;
    return std::floor(4.0 * unit(rng) * 4.0) / 4.0;
  };
  std::vector<std::pair<int, int>> free_pairs;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      if (unit(rng) < 0.2)
        cs.precedence.push_back({i, j, unit(rng) < 0.5 ? 0.0 : travel(), std::nullopt});
      else
        free_pairs.push_back({i, j});
    }
  for (auto& e : cs.precedence)
    if (std::isinf(e.travel) && unit(rng) < 0.7) e.travel = 1.0;
  std::shuffle(free_pairs.begin(), free_pairs.end(), rng);
  const std::size_t want = std::min<std::size_t>(free_pairs.size(), rng() % (max_pairs + 1));
  for (std::size_t k = 0; k < want; ++k) {
    MutexPair p{free_pairs[k].first, free_pairs[k].second, travel(), travel(), std::nullopt,
                std::nullopt};
    if (std::isinf(p.travel_ij) && std::isinf(p.travel_ji)) cs.infeasible_on_construction = true;
    cs.mutex_pairs.push_back(p);
  }
  cs.big_m = 1e6;
  return cs;
}

// Breadth-first shortest path length in moves; -1 when unreachable.
inline int bfs_distance(const WorldMap& w, GridCell from, GridCell to) {
  if (!w.free(from) || !w.free(to)) return -1;
  std::vector<int> dist(static_cast<std::size_t>(w.width()) * w.height(), -1);
  std::deque<GridCell> q{from};
  dist[w.index(from)] = 0;
  while (!q.empty()) {
    const GridCell c = q.front();
    q.pop_front();
    if (c == to) return dist[w.index(c)];
    const int dc[4] = {1, -1, 0, 0};
    const int dr[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const GridCell n{c.col + dc[k], c.row + dr[k]};
      if (w.free(n) && dist[w.index(n)] < 0) {
        dist[w.index(n)] = dist[w.index(c)] + 1;
        q.push_back(n);
      }
    }
  }
  return -1;
}

inline WorldMap random_world(std::mt19937_64& rng, int max_side = 20, double density = 0.3) {
  std::uniform_int_distribution<int> side(2, max_side);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  WorldMap w(side(rng), side(rng), 0.5 + unit(rng));
  for (int r = 0; r < w.height(); ++r)
    for (int c = 0; c < w.width(); ++c)
      if (unit(rng) < density) w.set_occupied({c, r}, true);
  return w;
}

// Dense GP posterior by explicit kernel matrix and Gaussian elimination with
// partial pivoting. Prior mean and RBF form follow the library's contract.
struct DenseGP {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  double sf2, ell, sn2, prior_mean;

  double k(const std::vector<double>& a, const std::vector<double>& b) const {
    double d = 0.0;
    for (std::size_t u = 0; u < a.size(); ++u) d += (a[u] - b[u]) * (a[u] - b[u]);
    return sf2 * std::exp(-d / (2.0 * ell * ell));
  }

  // Solves (K + sn2 I) z = rhs.
  std::vector<double> solve(std::vector<double> rhs) const {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> a(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a[i][j] = k(x[i], x[j]) + (i == j ? sn2 : 0.0);
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < n; ++r)
        if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
      std::swap(a[c], a[piv]);
      std::swap(rhs[c], rhs[piv]);
      for (std::size_t r = c + 1; r < n; ++r) {
        const double f = a[r][c] / a[c][c];
        for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
        rhs[r] -= f * rhs[c];
      }
    }
    std::vector<double> z(n);
    for (std::size_t i = n; i-- > 0;) {
      double s = rhs[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * z[j];
      z[i] = s / a[i][i];
    }
    return z;
  }

  std::pair<double, double> predict(const std::vector<double>& q) const {
    std::vector<double> kq(x.size()), centered(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) kq[i] = k(x[i], q);
    for (std::size_t i = 0; i < y.size(); ++i) centered[i] = y[i] - prior_mean;
    const auto alpha = solve(centered);
    const auto v = solve(kq);
    double mean = prior_mean, var = k(q, q);
    for (std::size_t i = 0; i < x.size(); ++i) {
      mean += kq[i] * alpha[i];
      var -= kq[i] * v[i];
    }
    return {mean, var};
  }
};

}  // namespace qitags::oracle
