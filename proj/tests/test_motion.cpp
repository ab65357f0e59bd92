#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "qitags/motion.hpp"
#include "support.hpp"

using namespace qitags;

TEST(Euclidean, Examples) {
  EXPECT_EQ(euclidean_estimate({{0, 0}, {0, 0}}, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(euclidean_estimate({{0, 0}, {3, 4}}, 1.0), 5.0);
  EXPECT_DOUBLE_EQ(euclidean_estimate({{0, 0}, {2, 0}}, 0.5), 1.0);
}

TEST(PlanPath, EmptyGridIsManhattan) {
  const WorldMap w(5, 5, 1.0);
  const auto p = plan_path({{0, 0}, {2, 3}}, w);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->length, 5.0);
  EXPECT_EQ(p->cells.size(), 6u);
  EXPECT_EQ(p->cells.front(), (GridCell{0, 0}));
  EXPECT_EQ(p->cells.back(), (GridCell{2, 3}));
}

TEST(PlanPath, SameCell) {
  const WorldMap w(3, 3, 2.0);
  const auto p = plan_path({{1, 1}, {1, 1}}, w);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->length, 0.0);
  EXPECT_EQ(p->cells.size(), 1u);
}

TEST(PlanPath, BlockedColumnIsNoPath) {
  const auto w = WorldMap::from_ascii({".#.", ".#.", ".#."}, 1.0);
  EXPECT_FALSE(plan_path({{0, 0}, {2, 0}}, w));
  EXPECT_EQ(oracle::bfs_distance(w, {0, 0}, {2, 0}), -1);
  ASSERT_TRUE(plan_path({{0, 0}, {0, 2}}, w));
  EXPECT_EQ(plan_path({{0, 0}, {0, 2}}, w)->length, 2.0);
}

TEST(PlanPath, OccupiedEndpointRejected) {
  const auto w = WorldMap::from_ascii({".#", ".."}, 1.0);
  EXPECT_THROW(plan_path({{0, 0}, {1, 0}}, w), InvalidInput);
}

TEST(PlanPath, Deterministic) {
  const WorldMap w(8, 8, 1.0);
  const auto a = plan_path({{0, 0}, {7, 7}}, w);
  const auto b = plan_path({{0, 0}, {7, 7}}, w);
  EXPECT_EQ(*a, *b);
}

TEST(PlanPath, MatchesBfsOnRandomMaps) {
  std::mt19937_64 rng(17);
  int solvable = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto w = oracle::random_world(rng);
    for (int q = 0; q < 5; ++q) {
      const GridCell a{static_cast<int>(rng() % w.width()), static_cast<int>(rng() % w.height())};
      const GridCell b{static_cast<int>(rng() % w.width()), static_cast<int>(rng() % w.height())};
      if (!w.free(a) || !w.free(b)) continue;
      const int bfs = oracle::bfs_distance(w, a, b);
      const auto p = plan_path({a, b}, w);
      ASSERT_EQ(p.has_value(), bfs >= 0);
      if (!p) continue;
      ++solvable;
      EXPECT_DOUBLE_EQ(p->length, bfs * w.cell_size());
      EXPECT_LE(euclidean_estimate({a, b}, w.cell_size()), p->length + 1e-12);
      for (std::size_t k = 0; k < p->cells.size(); ++k) {
        EXPECT_TRUE(w.free(p->cells[k]));
        if (k > 0) {
          EXPECT_EQ(std::abs(p->cells[k].col - p->cells[k - 1].col) +
                        std::abs(p->cells[k].row - p->cells[k - 1].row),
                    1);
        }
      }
    }
  }
  EXPECT_GT(solvable, 100);
}

TEST(TravelTime, Examples) {
  EXPECT_EQ(travel_time(0.0, 1.0), 0.0);
  EXPECT_EQ(travel_time(10.0, 2.0), 5.0);
  EXPECT_EQ(travel_time(kInfinity, 2.0), kInfinity);
  EXPECT_THROW(travel_time(1.0, 0.0), InvalidInput);
}

TEST(PathCache, MemoizesQueries) {
  const WorldMap w(6, 6, 1.0);
  PathCache cache(w);
  const PathQuery q{{0, 0}, {5, 5}};
  const auto& first = memoized_plan(cache, q);
  const auto copy = first;
  const auto& second = memoized_plan(cache, q);
  EXPECT_EQ(cache.planner_calls(), 1u);
  EXPECT_EQ(&first, &second);
  EXPECT_EQ(copy, second);
  memoized_plan(cache, {{0, 0}, {4, 5}});
  EXPECT_EQ(cache.planner_calls(), 2u);
  EXPECT_EQ(cache.size(), 2u);
}

TEST(PathCache, NoPathIsCached) {
  const auto w = WorldMap::from_ascii({".#.", ".#.", ".#."}, 1.0);
  PathCache cache(w);
  EXPECT_EQ(cache.planned_length({{0, 0}, {2, 2}}), kInfinity);
  EXPECT_EQ(cache.lookup_length({{0, 0}, {2, 2}}), kInfinity);
  EXPECT_FALSE(cache.lookup_length({{0, 0}, {0, 2}}));
  EXPECT_EQ(cache.planner_calls(), 1u);
}

TEST(PathCache, ConcurrentReaders) {
  const WorldMap w(12, 12, 1.0);
  PathCache cache(w);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([&cache] {
      for (int k = 0; k < 50; ++k) cache.planned_length({{0, 0}, {k % 12, (k / 12) % 12}});
    });
  for (auto& t : threads) t.join();
  EXPECT_EQ(cache.size(), 50u);
  EXPECT_EQ(cache.planner_calls(), 50u);
}
