#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qitags/errors.hpp"

namespace qitags {

// Grid coordinate. Ordered by (row, col) so ties in the planner resolve
// toward the upper-left cell.
struct GridCell {
  int col = 0;
  int row = 0;

  friend bool operator==(const GridCell&, const GridCell&) = default;
  friend std::strong_ordering operator<=>(const GridCell& a, const GridCell& b) {
    if (auto c = a.row <=> b.row; c != 0) return c;
    return a.col <=> b.col;
  }
};

struct GridCellHash {
  std::size_t operator()(const GridCell& c) const noexcept {
    return std::hash<std::int64_t>{}((static_cast<std::int64_t>(c.row) << 32) ^
                                     static_cast<std::uint32_t>(c.col));
  }
};

// Dense row-major matrix of doubles; just enough for trait algebra.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Robot {
  int id = 0;
  std::vector<double> traits;
  GridCell start_cell;
  double speed = 1.0;  // cells per second

  friend bool operator==(const Robot&, const Robot&) = default;
};

struct Task {
  int id = 0;
  double duration = 1.0;
  GridCell start_site;
  GridCell end_site;

  friend bool operator==(const Task&, const Task&) = default;
};

struct TaskNetwork {
  std::vector<Task> tasks;
  std::vector<std::pair<int, int>> precedence;  // (i, j): i before j
  std::vector<std::pair<int, int>> mutex;       // unordered

  std::size_t size() const { return tasks.size(); }

  bool has_precedence(int i, int j) const {
    return std::find(precedence.begin(), precedence.end(), std::pair{i, j}) !=
           precedence.end();
  }

  friend bool operator==(const TaskNetwork&, const TaskNetwork&) = default;
};

// Throws InvalidInput when indices are out of range, pairs are reflexive,
// or the precedence graph has a cycle.
inline void validate_network(const TaskNetwork& net) {
  const int m = static_cast<int>(net.tasks.size());
  auto in_range = [m](int i) { return i >= 0 && i < m; };
  for (const auto& t : net.tasks) require(t.duration > 0.0, "task duration must be positive");
  for (auto [i, j] : net.precedence) {
    require(in_range(i) && in_range(j), "precedence index out of range");
    require(i != j, "precedence self-pair");
  }
  for (auto [i, j] : net.mutex) {
    require(in_range(i) && in_range(j), "mutex index out of range");
    require(i != j, "mutex self-pair");
  }
  // Kahn's algorithm for acyclicity.
  std::vector<int> indeg(m, 0);
  std::vector<std::vector<int>> out(m);
  for (auto [i, j] : net.precedence) {
    out[i].push_back(j);
    ++indeg[j];
  }
  std::vector<int> ready;
  for (int i = 0; i < m; ++i)
    if (indeg[i] == 0) ready.push_back(i);
  int seen = 0;
  while (!ready.empty()) {
    int v = ready.back();
    ready.pop_back();
    ++seen;
    for (int w : out[v])
      if (--indeg[w] == 0) ready.push_back(w);
  }
  require(seen == m, "precedence graph contains a cycle");
}

class WorldMap {
 public:
  WorldMap() = default;
  WorldMap(int width, int height, double cell_size = 1.0)
      : width_(width), height_(height), cell_size_(cell_size),
        occupied_(static_cast<std::size_t>(std::max(width, 0) * std::max(height, 0)), 0) {
    require(width > 0 && height > 0, "map dimensions must be positive");
    require(cell_size > 0.0, "cell_size must be positive");
  }

  // '.' is free, '#' is occupied; first string is row 0.
  static WorldMap from_ascii(const std::vector<std::string>& rows, double cell_size) {
    require(!rows.empty() && !rows.front().empty(), "map must be non-empty");
    const int w = static_cast<int>(rows.front().size());
    WorldMap world(w, static_cast<int>(rows.size()), cell_size);
    for (int r = 0; r < world.height_; ++r) {
      require(static_cast<int>(rows[r].size()) == w, "map rows must have equal width");
      for (int c = 0; c < w; ++c) {
        const char ch = rows[r][c];
        require(ch == '.' || ch == '#', "map cells must be '.' or '#'");
        if (ch == '#') world.set_occupied({c, r}, true);
      }
    }
    return world;
  }

  std::vector<std::string> to_ascii() const {
    std::vector<std::string> out(height_, std::string(width_, '.'));
    for (int r = 0; r < height_; ++r)
      for (int c = 0; c < width_; ++c)
        if (occupied({c, r})) out[r][c] = '#';
    return out;
  }

  int width() const { return width_; }
  int height() const { return height_; }
  double cell_size() const { return cell_size_; }

  bool in_bounds(GridCell c) const {
    return c.col >= 0 && c.row >= 0 && c.col < width_ && c.row < height_;
  }
  bool occupied(GridCell c) const { return occupied_[index(c)] != 0; }
  bool free(GridCell c) const { return in_bounds(c) && !occupied(c); }

  void set_occupied(GridCell c, bool blocked) {
    require(in_bounds(c), "occupied cell outside map");
    occupied_[index(c)] = blocked ? 1 : 0;
  }

  std::size_t index(GridCell c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.col);
  }

  friend bool operator==(const WorldMap&, const WorldMap&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  double cell_size_ = 1.0;
  std::vector<std::uint8_t> occupied_;
};

// Binary M x N matrix; entry (m, n) = 1 iff robot n works on task m.
class Allocation {
 public:
  Allocation() = default;
  Allocation(std::size_t tasks, std::size_t robots, bool value = false)
      : tasks_(tasks), robots_(robots), bits_(tasks * robots, value ? 1 : 0) {}

  static Allocation root(std::size_t tasks, std::size_t robots) {
    return Allocation(tasks, robots, true);
  }
  static Allocation null(std::size_t tasks, std::size_t robots) {
    return Allocation(tasks, robots, false);
  }

  // Row-major bit pattern, entry (0,0) is the most significant bit.
  static Allocation from_code(std::size_t tasks, std::size_t robots, std::uint64_t code) {
    expects(tasks * robots <= 64, "allocation code limited to 64 entries");
    Allocation a(tasks, robots);
    const std::size_t n = tasks * robots;
    for (std::size_t k = 0; k < n; ++k) a.bits_[k] = (code >> (n - 1 - k)) & 1U;
    return a;
  }

  static Allocation from_rows(const std::vector<std::vector<int>>& rows) {
    require(!rows.empty(), "allocation needs at least one row");
    Allocation a(rows.size(), rows.front().size());
    for (std::size_t m = 0; m < rows.size(); ++m) {
      require(rows[m].size() == a.robots_, "ragged allocation rows");
      for (std::size_t n = 0; n < a.robots_; ++n) {
        require(rows[m][n] == 0 || rows[m][n] == 1, "allocation entries must be 0 or 1");
        a.set(m, n, rows[m][n] == 1);
      }
    }
    return a;
  }

  std::size_t tasks() const { return tasks_; }
  std::size_t robots() const { return robots_; }

  bool get(std::size_t m, std::size_t n) const { return bits_[m * robots_ + n] != 0; }
  void set(std::size_t m, std::size_t n, bool v) { bits_[m * robots_ + n] = v ? 1 : 0; }

  std::size_t popcount() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }

  std::vector<int> coalition(std::size_t m) const {
    std::vector<int> out;
    for (std::size_t n = 0; n < robots_; ++n)
      if (get(m, n)) out.push_back(static_cast<int>(n));
    return out;
  }

  std::uint64_t code() const {
    expects(bits_.size() <= 64, "allocation code limited to 64 entries");
    std::uint64_t c = 0;
    for (auto b : bits_) c = (c << 1) | b;
    return c;
  }

  std::size_t hash() const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto b : bits_) {
      h ^= b;
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h ^ (tasks_ << 20) ^ robots_);
  }

  std::vector<std::vector<int>> to_rows() const {
    std::vector<std::vector<int>> rows(tasks_, std::vector<int>(robots_, 0));
    for (std::size_t m = 0; m < tasks_; ++m)
      for (std::size_t n = 0; n < robots_; ++n) rows[m][n] = get(m, n) ? 1 : 0;
    return rows;
  }

  friend bool operator==(const Allocation&, const Allocation&) = default;
  // Lexicographic on the row-major bits; equals numeric order of code().
  friend std::strong_ordering operator<=>(const Allocation& a, const Allocation& b) {
    if (auto c = a.tasks_ <=> b.tasks_; c != 0) return c;
    if (auto c = a.robots_ <=> b.robots_; c != 0) return c;
    return a.bits_ <=> b.bits_;
  }

 private:
  std::size_t tasks_ = 0;
  std::size_t robots_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct AllocationHash {
  std::size_t operator()(const Allocation& a) const noexcept { return a.hash(); }
};

// Team trait matrix Q (N x U) assembled from the robots' trait rows.
inline Matrix team_trait_matrix(const std::vector<Robot>& robots) {
  require(!robots.empty(), "team needs at least one robot");
  const std::size_t u = robots.front().traits.size();
  require(u >= 1, "robots need at least one trait");
  Matrix q(robots.size(), u);
  for (std::size_t i = 0; i < robots.size(); ++i) {
    require(robots[i].traits.size() == u, "all robots must have the same trait count");
    for (std::size_t k = 0; k < u; ++k) {
      require(robots[i].traits[k] >= 0.0, "traits must be non-negative");
      q(i, k) = robots[i].traits[k];
    }
  }
  return q;
}

// Y = A Q.
inline Matrix aggregate_traits(const Allocation& alloc, const Matrix& traits) {
  require(alloc.robots() == traits.rows(), "allocation/trait dimension mismatch");
  Matrix y(alloc.tasks(), traits.cols());
  for (std::size_t m = 0; m < alloc.tasks(); ++m)
    for (std::size_t n = 0; n < alloc.robots(); ++n)
      if (alloc.get(m, n))
        for (std::size_t u = 0; u < traits.cols(); ++u) y(m, u) += traits(n, u);
  return y;
}

// One child per set bit, with that bit cleared, in row-major order.
inline std::vector<Allocation> successors(const Allocation& alloc) {
  std::vector<Allocation> out;
  out.reserve(alloc.popcount());
  for (std::size_t m = 0; m < alloc.tasks(); ++m)
    for (std::size_t n = 0; n < alloc.robots(); ++n)
      if (alloc.get(m, n)) {
        Allocation child = alloc;
        child.set(m, n, false);
        out.push_back(std::move(child));
      }
  return out;
}

}  // namespace qitags
