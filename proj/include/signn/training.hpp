#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "signn/graph.hpp"
#include "signn/model.hpp"

namespace signn::train {

struct TrainConfig {
  double train_ratio = 0.6;
  std::size_t epochs = 100;
  double learning_rate = 0.01;
  // Adam moment decays; per-parameter scaling is required here because the
  // head and the feature table see gradients hundreds of times apart.
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 1;
  neuron::NeuronKind neuron_kind = neuron::NeuronKind::Blif;
  bool ta_enabled = true;
  std::vector<std::size_t> intervals = {1, 2, 3};
  model::AggStrategy strategy = model::AggStrategy::Average;
  std::vector<std::size_t> fanouts = {10, 10};
  std::size_t d = 64;
  std::size_t layers = 2;
  std::size_t d_in = 32;  // width of the synthesized feature table

  void validate() const;
};

struct EvalReport {
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  std::vector<double> per_class_precision;
  std::vector<double> per_class_recall;
  std::vector<std::vector<std::size_t>> confusion;  // rows = truth, cols = prediction
  std::vector<double> tau_means;    // per granularity channel
  std::vector<double> gamma_means;  // per granularity channel
  std::vector<double> spike_rates;  // channel-1 final layer, per step
  double seconds = 0.0;
  std::vector<double> loss_curve;       // per epoch
  std::vector<double> train_acc_curve;  // per epoch
};

/// Uniform shuffle under the seed; first floor(ratio*n) ids train, rest test.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_nodes(
    std::size_t n, double ratio, std::uint64_t seed);

/// Mean negative log softmax likelihood (value-level convenience).
double cross_entropy(const num::Matrix& scores, const std::vector<std::size_t>& labels);

std::vector<std::vector<std::size_t>> confusion_matrix(
    const std::vector<std::size_t>& y_true, const std::vector<std::size_t>& y_pred,
    std::size_t num_classes);

/// Unweighted mean of per-class F1 (class F1 = 0 when precision + recall = 0).
double macro_f1(const std::vector<std::vector<std::size_t>>& confusion);
/// Global TP / (TP + (FP + FN)/2); equals accuracy for single-label multiclass.
double micro_f1(const std::vector<std::vector<std::size_t>>& confusion);

std::vector<double> per_class_precision(const std::vector<std::vector<std::size_t>>& confusion);
std::vector<double> per_class_recall(const std::vector<std::vector<std::size_t>>& confusion);

struct TrainResult {
  model::SignnModel model;
  EvalReport report;
};

/// Full-batch BPTT training with momentum gradient descent, then a final
/// evaluation pass on the held-out nodes.  Deterministic under cfg.seed.
TrainResult train(const graph::DynamicGraph& g, const TrainConfig& cfg);

struct AblationArm {
  std::string name;
  std::function<void(TrainConfig&)> apply;
};

struct AblationRun {
  std::string arm;
  std::uint64_t seed;
  double macro_f1;
  double micro_f1;
  double seconds;
};

struct ArmSummary {
  std::string arm;
  std::size_t runs;
  double micro_mean, micro_std;
  double macro_mean, macro_std;
};

/// One run per (arm, seed); seeds are base.seed, base.seed+1, ...  Runs may
/// execute on up to max_threads workers; each owns its model and generators.
std::vector<AblationRun> run_ablation(const graph::DynamicGraph& g,
                                      const TrainConfig& base,
                                      const std::vector<AblationArm>& arms,
                                      std::size_t num_seeds, std::size_t max_threads = 1);

/// Mean and sample standard deviation per arm, in arm order of first appearance.
std::vector<ArmSummary> summarize_ablation(const std::vector<AblationRun>& runs);

void write_ablation_csv(const std::vector<AblationRun>& runs, const std::string& path);
void write_ablation_summary_csv(const std::vector<ArmSummary>& rows, const std::string& path);

/// JSON with keys {macro_f1, micro_f1, confusion, tau_means, gamma_means,
/// spike_rates, seconds}.
void write_metrics_json(const EvalReport& report, const std::string& path);
void write_history_csv(const EvalReport& report, const std::string& path);

}  // namespace signn::train
