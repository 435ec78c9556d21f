#pragma once

#include <optional>
#include <string>
#include <vector>

#include "signn/graph.hpp"
#include "signn/model.hpp"
#include "signn/neuron.hpp"

namespace signn::analytics {

/// Firing rate vs. degree increment, aligned on steps 2..T (the increment is
/// undefined at step 1).  pearson is empty when either series has zero
/// variance.
struct SpikeDegreeSeries {
  std::vector<std::size_t> steps;
  std::vector<double> rate;
  std::vector<double> increment;
  std::optional<double> pearson;
};

std::optional<double> pearson(const std::vector<double>& a, const std::vector<double>& b);

/// Trace steps must align with the channel-1 step indices (one entry per step
/// 1..T); otherwise an alignment DataError is raised.
SpikeDegreeSeries spike_vs_degree(const neuron::SpikeTrace& trace,
                                  const graph::DynamicGraph& g);

/// `# correlation=<value|null>` comment line, then `step,rate,increment` rows.
void write_spike_vs_degree_csv(const SpikeDegreeSeries& series, const std::string& path);

/// Runs an evaluation forward pass and writes
///   embeddings_path: `node,e0..e{d-1},label` with 17-significant-digit floats
///   spikes_path:     per node, the final-layer channel-1 spike stack (d x T_1)
///                    flattened row-major as 0/1 fields (TA models only).
void export_embeddings(model::SignnModel& m, const graph::DynamicGraph& g,
                       const std::string& embeddings_path, const std::string& spikes_path);

}  // namespace signn::analytics
