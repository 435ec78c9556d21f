#include "signn/sampling.hpp"

#include <algorithm>

#include "signn/errors.hpp"

namespace signn::sampling {

std::size_t MtgPlan::total_snapshots() const {
  std::size_t total = 0;
  for (const auto& idx : step_index) total += idx.size();
  return total;
}

std::vector<std::size_t> mtg_indices(std::size_t T, std::size_t delta) {
  if (delta < 1) throw ConfigError("mtg_indices: interval must be >= 1");
  if (T < 1) throw ConfigError("mtg_indices: T must be >= 1");
  std::vector<std::size_t> idx;
  for (std::size_t t = 1; t <= T; t += delta) idx.push_back(t);
  return idx;
}

MtgPlan build_plan(std::size_t T, const std::vector<std::size_t>& intervals) {
  if (intervals.empty() || intervals.front() != 1)
    throw ConfigError("build_plan: interval 1 (the reference granularity) is required");
  for (std::size_t i = 1; i < intervals.size(); ++i)
    if (intervals[i] <= intervals[i - 1])
      throw ConfigError("build_plan: intervals must be strictly increasing");
  MtgPlan plan;
  plan.intervals = intervals;
  for (std::size_t dt : intervals) plan.step_index.push_back(mtg_indices(T, dt));
  return plan;
}

NeighborSample sample_neighbors(const graph::DynamicGraph& g, std::size_t v,
                                std::size_t t, std::size_t fanout, num::Rng& rng) {
  if (fanout < 1) throw ConfigError("sample_neighbors: fanout must be >= 1");
  const auto& nbrs = g.snapshot(t).adjacency.at(v);
  NeighborSample sample;
  sample.node = v;
  sample.step = t;
  const std::size_t deg = nbrs.size();
  if (deg == 0) {
    sample.neighbors.push_back(v);  // zero-degree fallback: the node itself
  } else if (deg <= fanout) {
    if (deg == fanout) {
      sample.neighbors = nbrs;
    } else {
      // with replacement up to fanout
      sample.neighbors.reserve(fanout);
      for (std::size_t i = 0; i < fanout; ++i)
        sample.neighbors.push_back(nbrs[rng.uniform_index(deg)]);
    }
  } else {
    // partial Fisher-Yates: uniform without replacement
    std::vector<std::size_t> pool = nbrs;
    for (std::size_t i = 0; i < fanout; ++i) {
      const std::size_t j = i + rng.uniform_index(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(fanout);
    sample.neighbors = std::move(pool);
  }
  return sample;
}

}  // namespace signn::sampling
