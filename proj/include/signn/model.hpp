#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "signn/graph.hpp"
#include "signn/neuron.hpp"
#include "signn/sampling.hpp"
#include "signn/tape.hpp"

namespace signn::model {

enum class AggStrategy { Average, Max, Concat, Attention };

AggStrategy parse_strategy(const std::string& name);  // throws ConfigError
std::string strategy_name(AggStrategy s);

struct ModelConfig {
  std::size_t num_nodes = 0;
  std::size_t num_classes = 0;
  std::size_t d_in = 32;  // input feature width
  std::size_t d = 64;     // hidden/embedding width
  std::size_t layers = 2;
  std::vector<std::size_t> intervals = {1, 2, 3};
  std::vector<std::size_t> fanouts = {10, 10};  // one per layer
  neuron::NeuronKind neuron_kind = neuron::NeuronKind::Blif;
  bool ta_enabled = true;
  AggStrategy strategy = AggStrategy::Average;
  bool learn_features = true;  // trainable embedding table when the graph has none
  std::size_t num_steps = 0;   // T of the graph the model was built for
  double tau_init = 0.7;
  double gamma_init = 0.7;
  double v_reset = 0.0;
  double v_th_init = 1.0;
  double surrogate_width = 1.0;
  std::uint64_t init_seed = 0;
  std::uint64_t run_seed = 0;  // owning run's seed; drives sampling streams

  void validate() const;
};

/// One aggregation-update layer: dual pathways (sigmoid features, spike
/// gating) with four weight matrices and a neuron bank of width d_out per node.
struct TaLayer {
  num::Param w_h, b_h, w_s, b_s;  // each d_in x d_out
  std::unique_ptr<neuron::NeuronBank> neurons;
  bool ta_enabled = true;

  std::size_t d_in() const { return w_h.value.rows; }
  std::size_t d_out() const { return w_h.value.cols; }
};

/// Weights of one layer bound to a tape for one pass.
struct TaLayerVars {
  num::Var w_h, b_h, w_s, b_s;
};

/// Trainable temporal pooling weights for one granularity channel, d x T_g.
struct PoolParams {
  num::Param p;
};

/// Cross-granularity combiner.  Concat keeps a (G*d) x d projection;
/// Attention keeps score weights (d x d) and a query vector (d x 1).
struct MtgAggregator {
  AggStrategy strategy = AggStrategy::Average;
  num::Param concat_proj;
  num::Param attn_w;
  num::Param attn_q;
};

struct ClassifierHead {
  num::Param weights;  // d x C
  num::Param bias;     // 1 x C
};

/// Per-channel outputs of one forward pass.
struct ChannelOutput {
  std::vector<num::Var> step_outputs;  // spike-gated embeddings, n x d per step
  std::vector<num::Var> final_spikes;  // final-layer spike patterns (empty when no TA)
  num::Var pooled;                     // n x d
};

struct ForwardResult {
  std::vector<ChannelOutput> channels;
  num::Var combined;  // n x d
  num::Var scores;    // n x C
};

/// Per-node temporal embedding stack, d x T_g; entries are spike-gated.
struct EmbeddingMatrix {
  num::Matrix values;
};

/// Mean of sampled neighbor representations per node (spec-level wrapper).
num::Var aggregate_neighbors(
    num::Tape& t, num::Var h,
    std::shared_ptr<const std::vector<std::vector<std::size_t>>> samples);

/// One TA update: h~ = sigmoid(h_nbr W_h + h_self B_h), s = neurons(h_nbr W_s
/// + h_self B_s), out = s (.) h~.  With ta_enabled off the spike pathway is
/// bypassed and out = h~.
num::Var ta_update(num::Tape& t, TaLayer& layer, const TaLayerVars& vars,
                   num::Var h_self, num::Var h_nbr, const num::GradMode& mode,
                   num::Var* spikes_out = nullptr);
/// Convenience overload binding the layer's weights itself (tests, one-off use).
num::Var ta_update(num::Tape& t, TaLayer& layer, num::Var h_self, num::Var h_nbr,
                   const num::GradMode& mode);

/// z = (Z (.) P) * 1: row sums of the elementwise product, d x 1.
num::Matrix temporal_pool(const num::Matrix& z_stack, const num::Matrix& pool);

/// Affine readout, value level.
num::Matrix predict(const ClassifierHead& head, const num::Matrix& z);
std::size_t argmax_row(const num::Matrix& scores, std::size_t row);

class SignnModel {
 public:
  explicit SignnModel(ModelConfig cfg);

  const ModelConfig& config() const { return cfg_; }
  ModelConfig& config() { return cfg_; }

  /// All trainable params in a fixed order.
  std::vector<num::Param*> parameters();

  /// Full forward pass: every granularity channel, temporal pooling, MTG
  /// aggregation, classifier scores.  Neuron banks are reset per channel;
  /// neighbor samples are drawn from streams keyed by (sampling_seed, node,
  /// step, layer).
  ForwardResult forward(num::Tape& t, const graph::DynamicGraph& g,
                        const num::GradMode& mode, std::uint64_t sampling_seed);

  /// One channel's sequence pass over the given step indices.
  ChannelOutput forward_channel(num::Tape& t, const graph::DynamicGraph& g,
                                std::size_t channel, num::Var x,
                                const std::vector<std::size_t>& steps,
                                const num::GradMode& mode,
                                std::uint64_t sampling_seed);

  /// Combine per-channel pooled embeddings with the configured strategy.
  num::Var mtg_aggregate(num::Tape& t, const std::vector<num::Var>& z_list);

  EmbeddingMatrix embedding_stack(const num::Tape& t, const ChannelOutput& ch,
                                  std::size_t node) const;

  neuron::NeuronBank& bank(std::size_t channel, std::size_t layer);
  TaLayer& layer(std::size_t channel, std::size_t k);
  PoolParams& pool(std::size_t channel) { return pools_[channel]; }
  ClassifierHead& head() { return head_; }
  MtgAggregator& aggregator() { return agg_; }
  num::Param& feature_table() { return features_; }

  double mean_tau(std::size_t channel) const;    // over the channel's banks
  double mean_gamma(std::size_t channel) const;

  void save_checkpoint(const std::string& path) const;
  static SignnModel load_checkpoint(const std::string& path);

 private:
  ModelConfig cfg_;
  num::Param features_;  // n x d_in (bound only when learn_features)
  std::vector<std::vector<TaLayer>> channels_;  // [channel][layer]
  std::vector<PoolParams> pools_;
  MtgAggregator agg_;
  ClassifierHead head_;

  std::vector<const num::Param*> parameters_const() const;
};

}  // namespace signn::model
