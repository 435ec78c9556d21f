#pragma once

#include <cstdint>
#include <vector>

#include "signn/graph.hpp"
#include "signn/rng.hpp"

namespace signn::sampling {

/// Multi-time-granularity snapshot plan: for each sampling interval, the
/// 1-based step indices {1, 1+dt, 1+2dt, ...} clipped to T.  Interval 1 (the
/// reference granularity) is always present.
struct MtgPlan {
  std::vector<std::size_t> intervals;               // strictly increasing, starts at 1
  std::vector<std::vector<std::size_t>> step_index;  // one list per interval

  std::size_t channels() const { return intervals.size(); }
  std::size_t total_snapshots() const;
};

struct NeighborSample {
  std::size_t node = 0;
  std::size_t step = 0;
  std::vector<std::size_t> neighbors;  // length <= fanout (or 1 for the self-fallback)
};

/// [1, 1+delta, 1+2*delta, ...] clipped to T; length is ceil(T / delta).
std::vector<std::size_t> mtg_indices(std::size_t T, std::size_t delta);

MtgPlan build_plan(std::size_t T, const std::vector<std::size_t>& intervals);

/// Uniform neighborhood sample at (v, t): without replacement when the degree
/// covers the fanout, with replacement when 0 < deg < fanout, and the
/// singleton {v} when deg = 0.
NeighborSample sample_neighbors(const graph::DynamicGraph& g, std::size_t v,
                                std::size_t t, std::size_t fanout, num::Rng& rng);

/// Stream seed for the (v, t, layer) sampling site of a run, so a sample
/// depends only on this key and never on traversal order.
inline num::Rng site_rng(std::uint64_t seed, std::size_t v, std::size_t t,
                         std::size_t layer) {
  return num::Rng(num::mix_seed(seed, v, t, layer));
}

}  // namespace signn::sampling
