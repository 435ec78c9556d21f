#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "signn/matrix.hpp"

namespace signn::graph {

/// One time step of a discrete dynamic graph.  Neighbor lists are sorted
/// ascending and duplicate-free; a node untouched at this step has an empty
/// list (the zero-degree convention).
struct Snapshot {
  std::size_t step = 0;  // 1-based
  std::vector<std::vector<std::size_t>> adjacency;
};

/// A sequence of snapshots over a common node set, with optional static node
/// features and per-node class labels.  Immutable after construction.
struct DynamicGraph {
  std::size_t num_nodes = 0;
  std::size_t num_steps = 0;
  std::vector<Snapshot> snapshots;
  std::optional<num::Matrix> features;  // n x d_in, static across steps
  std::vector<std::size_t> labels;      // empty when no labels file was given
  std::size_t num_classes = 0;
  bool directed = false;

  bool has_labels() const { return !labels.empty(); }
  const Snapshot& snapshot(std::size_t t) const;  // 1-based, range-checked
};

struct EdgeStreamFormat {
  bool directed = false;
  bool allow_self_loops = false;
  std::optional<std::size_t> num_nodes;    // overrides 1 + max id
  std::optional<std::size_t> num_steps;    // overrides max t
  std::optional<std::size_t> num_classes;  // overrides 1 + max label
};

/// Drifting stochastic block model, the bundled dataset substitute.
struct SbmConfig {
  std::size_t n = 0;
  std::size_t T = 1;
  std::size_t k_communities = 2;
  double p_in = 0.1;
  double p_out = 0.01;
  double drift_fraction = 0.0;  // nodes resampling community per step
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

/// Parses `src dst t` triples (whitespace-delimited, 0-based ids, 1-based
/// steps).  Lines starting with '#' are comments; an optional first line
/// `# n=<int> T=<int> classes=<int>` declares sizes.  Malformed lines raise
/// DataError with the line number; steps outside [1, T] raise RangeError.
DynamicGraph load_edge_stream(const std::string& path, const EdgeStreamFormat& fmt = {});

/// Loads `node_id class_id` lines into an existing graph.
void load_labels(DynamicGraph& g, const std::string& path);

/// Writes the metadata header plus one canonical `src dst t` line per edge
/// (each undirected edge once, src < dst), sorted within each step.
void write_edge_stream(const DynamicGraph& g, const std::string& path);
void write_labels(const DynamicGraph& g, const std::string& path);

DynamicGraph generate_sbm(const SbmConfig& cfg);

/// Neighbor-list lengths at step t (1-based).
std::vector<std::size_t> degree(const DynamicGraph& g, std::size_t t);

/// For each t in [2, T]: sum_v max(deg_t(v) - deg_{t-1}(v), 0) / sum_v deg_t(v),
/// 0 when the denominator is 0.  Entry i corresponds to step i + 2.
std::vector<double> degree_increment_series(const DynamicGraph& g);

}  // namespace signn::graph
