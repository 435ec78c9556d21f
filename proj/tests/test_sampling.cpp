#include <algorithm>
#include <doctest.h>

#include "signn/errors.hpp"
#include "signn/sampling.hpp"
#include "test_helpers.hpp"

using namespace signn;
using sampling::MtgPlan;

TEST_CASE("mtg_indices examples") {
  CHECK(sampling::mtg_indices(5, 2) == std::vector<std::size_t>{1, 3, 5});
  CHECK(sampling::mtg_indices(7, 1) == std::vector<std::size_t>{1, 2, 3, 4, 5, 6, 7});
  const auto idx = sampling::mtg_indices(27, 3);
  CHECK(idx == std::vector<std::size_t>{1, 4, 7, 10, 13, 16, 19, 22, 25});
  CHECK(idx.size() == 9);
  CHECK(sampling::mtg_indices(1, 1) == std::vector<std::size_t>{1});
  CHECK_THROWS_AS(sampling::mtg_indices(5, 0), ConfigError);
}

TEST_CASE("mtg_indices length is ceil(T/delta)") {
  for (std::size_t T = 1; T <= 200; ++T)
    for (std::size_t delta = 1; delta <= 10; ++delta)
      CHECK(sampling::mtg_indices(T, delta).size() == (T + delta - 1) / delta);
}

TEST_CASE("build_plan totals and validation") {
  MtgPlan plan = sampling::build_plan(10, {1, 2});
  CHECK(plan.step_index[0].size() == 10);
  CHECK(plan.step_index[1].size() == 5);
  CHECK(plan.total_snapshots() == 15);

  MtgPlan plan3 = sampling::build_plan(10, {1, 2, 3});
  CHECK(plan3.step_index[2].size() == 4);
  CHECK(plan3.total_snapshots() == 19);
  CHECK(plan3.total_snapshots() < 2 * 10);

  MtgPlan single = sampling::build_plan(1, {1});
  CHECK(single.step_index == std::vector<std::vector<std::size_t>>{{1}});

  CHECK_THROWS_AS(sampling::build_plan(10, {2, 3}), ConfigError);   // missing 1
  CHECK_THROWS_AS(sampling::build_plan(10, {1, 3, 2}), ConfigError);
  CHECK_THROWS_AS(sampling::build_plan(10, {}), ConfigError);
}

TEST_CASE("sample_neighbors fallbacks and exhaustive case") {
  auto g = test_helpers::two_community_graph(10, 1, 1.0, 0.0, 3);  // two cliques of five
  num::Rng rng(1);

  SUBCASE("zero degree falls back to the node itself") {
    graph::DynamicGraph empty;
    empty.num_nodes = 4;
    empty.num_steps = 1;
    empty.snapshots.resize(1);
    empty.snapshots[0].step = 1;
    empty.snapshots[0].adjacency.assign(4, {});
    const auto s = sampling::sample_neighbors(empty, 2, 1, 5, rng);
    CHECK(s.neighbors == std::vector<std::size_t>{2});
  }

  SUBCASE("degree equals fanout: full neighborhood") {
    // clique of 5 -> degree 4
    const auto s = sampling::sample_neighbors(g, 0, 1, 4, rng);
    auto sorted = s.neighbors;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == g.snapshot(1).adjacency[0]);
  }

  SUBCASE("degree below fanout: with replacement up to fanout") {
    const auto s = sampling::sample_neighbors(g, 0, 1, 7, rng);
    CHECK(s.neighbors.size() == 7);
    for (std::size_t u : s.neighbors) {
      const auto& full = g.snapshot(1).adjacency[0];
      CHECK(std::find(full.begin(), full.end(), u) != full.end());
    }
  }
}

TEST_CASE("sampled neighbors always lie in the snapshot adjacency") {
  graph::SbmConfig cfg;
  cfg.n = 40;
  cfg.T = 3;
  cfg.k_communities = 2;
  cfg.p_in = 0.3;
  cfg.p_out = 0.1;
  cfg.seed = 6;
  const auto g = graph::generate_sbm(cfg);
  for (std::size_t t = 1; t <= cfg.T; ++t) {
    for (std::size_t v = 0; v < cfg.n; ++v) {
      num::Rng rng = sampling::site_rng(123, v, t, 0);
      const auto s = sampling::sample_neighbors(g, v, t, 5, rng);
      const auto& full = g.snapshot(t).adjacency[v];
      for (std::size_t u : s.neighbors) {
        if (full.empty())
          CHECK(u == v);
        else
          CHECK(std::find(full.begin(), full.end(), u) != full.end());
      }
    }
  }
}

TEST_CASE("sampling is deterministic given (seed, v, t, fanout)") {
  auto g = test_helpers::two_community_graph(30, 2, 0.4, 0.1, 11);
  for (std::size_t v : {0u, 7u, 29u}) {
    num::Rng r1 = sampling::site_rng(42, v, 2, 1);
    num::Rng r2 = sampling::site_rng(42, v, 2, 1);
    const auto a = sampling::sample_neighbors(g, v, 2, 4, r1);
    const auto b = sampling::sample_neighbors(g, v, 2, 4, r2);
    CHECK(a.neighbors == b.neighbors);
  }
  // distinct sites get distinct streams
  num::Rng r1 = sampling::site_rng(42, 0, 1, 0);
  num::Rng r2 = sampling::site_rng(42, 0, 1, 1);
  CHECK(r1.next_u64() != r2.next_u64());
}

TEST_CASE("uniform sampling: neighbor frequencies within 4 sigma over 1e4 draws") {
  graph::DynamicGraph g;
  g.num_nodes = 101;
  g.num_steps = 1;
  g.snapshots.resize(1);
  g.snapshots[0].step = 1;
  g.snapshots[0].adjacency.assign(101, {});
  for (std::size_t u = 1; u <= 100; ++u) {
    g.snapshots[0].adjacency[0].push_back(u);
    g.snapshots[0].adjacency[u].push_back(0);
  }

  std::vector<std::size_t> counts(101, 0);
  num::Rng rng(2024);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const auto s = sampling::sample_neighbors(g, 0, 1, 10, rng);
    CHECK(s.neighbors.size() == 10);
    for (std::size_t u : s.neighbors) ++counts[u];
  }
  // inclusion probability 0.1 per draw; 4 sigma of Binomial(1e4, 0.1) is 120
  for (std::size_t u = 1; u <= 100; ++u) {
    CHECK(counts[u] > 1000 - 120);
    CHECK(counts[u] < 1000 + 120);
  }
}
