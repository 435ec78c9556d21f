#include "signn/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "signn/errors.hpp"
#include "signn/rng.hpp"

namespace signn::train {

using num::GradMode;
using num::Matrix;
using num::Param;
using num::Tape;
using num::Var;

void TrainConfig::validate() const {
  if (!(train_ratio > 0.0 && train_ratio < 1.0))
    throw ConfigError("train: ratio must be in (0, 1)");
  if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (!(learning_rate > 0.0) && learning_rate != 0.0)
    throw ConfigError("train: learning rate must be >= 0");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
    throw ConfigError("train: Adam betas must be in [0, 1)");
  if (fanouts.size() != layers)
    throw ConfigError("train: fanouts count must match layer count");
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_nodes(
    std::size_t n, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split_nodes: ratio must be in (0, 1)");
  const std::size_t train_count = static_cast<std::size_t>(ratio * static_cast<double>(n));
  if (train_count == 0 || train_count == n)
    throw ConfigError("split_nodes: degenerate split (" + std::to_string(train_count) +
                      " of " + std::to_string(n) + " train)");
  std::vector<std::size_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  num::Rng rng(num::mix_seed(seed, 0x59117));
  rng.shuffle(ids);
  std::vector<std::size_t> train(ids.begin(), ids.begin() + train_count);
  std::vector<std::size_t> test(ids.begin() + train_count, ids.end());
  return {std::move(train), std::move(test)};
}

double cross_entropy(const Matrix& scores, const std::vector<std::size_t>& labels) {
  Tape t;
  Var s = t.constant(scores);
  return t.value(t.cross_entropy(s, labels)).data[0];
}

std::vector<std::vector<std::size_t>> confusion_matrix(
    const std::vector<std::size_t>& y_true, const std::vector<std::size_t>& y_pred,
    std::size_t num_classes) {
  if (y_true.size() != y_pred.size())
    throw DimensionError("confusion_matrix: size mismatch");
  std::vector<std::vector<std::size_t>> c(num_classes,
                                          std::vector<std::size_t>(num_classes, 0));
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] >= num_classes || y_pred[i] >= num_classes)
      throw RangeError("confusion_matrix: class id out of range");
    ++c[y_true[i]][y_pred[i]];
  }
  return c;
}

namespace {

struct ClassCounts {
  double tp = 0, fp = 0, fn = 0;
};

std::vector<ClassCounts> tally(const std::vector<std::vector<std::size_t>>& c) {
  const std::size_t k = c.size();
  std::vector<ClassCounts> counts(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (c[i].size() != k) throw DimensionError("confusion matrix must be square");
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) {
        counts[i].tp += static_cast<double>(c[i][j]);
      } else {
        counts[i].fn += static_cast<double>(c[i][j]);  // true i predicted j
        counts[j].fp += static_cast<double>(c[i][j]);  // predicted j, not j
      }
    }
  }
  return counts;
}

}  // namespace

double macro_f1(const std::vector<std::vector<std::size_t>>& confusion) {
  const auto counts = tally(confusion);
  double acc = 0.0;
  for (const auto& cc : counts) {
    const double prec = cc.tp + cc.fp > 0 ? cc.tp / (cc.tp + cc.fp) : 0.0;
    const double rec = cc.tp + cc.fn > 0 ? cc.tp / (cc.tp + cc.fn) : 0.0;
    acc += prec + rec > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
  }
  return counts.empty() ? 0.0 : acc / static_cast<double>(counts.size());
}

double micro_f1(const std::vector<std::vector<std::size_t>>& confusion) {
  const auto counts = tally(confusion);
  double tp = 0, fp = 0, fn = 0;
  for (const auto& cc : counts) tp += cc.tp, fp += cc.fp, fn += cc.fn;
  const double denom = tp + 0.5 * (fp + fn);
  return denom > 0 ? tp / denom : 0.0;
}

std::vector<double> per_class_precision(const std::vector<std::vector<std::size_t>>& confusion) {
  std::vector<double> out;
  for (const auto& cc : tally(confusion))
    out.push_back(cc.tp + cc.fp > 0 ? cc.tp / (cc.tp + cc.fp) : 0.0);
  return out;
}

std::vector<double> per_class_recall(const std::vector<std::vector<std::size_t>>& confusion) {
  std::vector<double> out;
  for (const auto& cc : tally(confusion))
    out.push_back(cc.tp + cc.fn > 0 ? cc.tp / (cc.tp + cc.fn) : 0.0);
  return out;
}

TrainResult train(const graph::DynamicGraph& g, const TrainConfig& cfg) {
  cfg.validate();
  if (!g.has_labels()) throw DataError("train: graph has no labels");
  const auto t0 = std::chrono::steady_clock::now();

  model::ModelConfig mc;
  mc.num_nodes = g.num_nodes;
  mc.num_classes = g.num_classes;
  mc.d = cfg.d;
  mc.layers = cfg.layers;
  mc.intervals = cfg.intervals;
  mc.fanouts = cfg.fanouts;
  mc.neuron_kind = cfg.neuron_kind;
  mc.ta_enabled = cfg.ta_enabled;
  mc.strategy = cfg.strategy;
  mc.learn_features = !g.features.has_value();
  mc.d_in = g.features ? g.features->cols : cfg.d_in;
  mc.num_steps = g.num_steps;
  mc.init_seed = num::mix_seed(cfg.seed, 0x1a17);
  mc.run_seed = cfg.seed;

  model::SignnModel model(mc);
  auto params = model.parameters();

  auto [train_ids, test_ids] = split_nodes(g.num_nodes, cfg.train_ratio, cfg.seed);
  std::vector<std::size_t> train_labels(train_ids.size());
  for (std::size_t i = 0; i < train_ids.size(); ++i)
    train_labels[i] = g.labels[train_ids[i]];

  std::vector<Matrix> moment1, moment2;
  moment1.reserve(params.size());
  moment2.reserve(params.size());
  for (Param* p : params) {
    moment1.push_back(Matrix::zeros(p->value.rows, p->value.cols));
    moment2.push_back(Matrix::zeros(p->value.rows, p->value.cols));
  }

  const GradMode mode = GradMode::surrogate(mc.surrogate_width);
  EvalReport report;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (Param* p : params) p->reset_grad();
    Tape tape;
    auto fw = model.forward(tape, g, mode, num::mix_seed(cfg.seed, 0xe90c, epoch));
    Var train_scores = tape.gather_rows(fw.scores, train_ids);
    Var loss = tape.cross_entropy(train_scores, train_labels);
    const double loss_val = tape.value(loss).data[0];
    if (!std::isfinite(loss_val))
      throw NumericError("train: non-finite loss " + std::to_string(loss_val) +
                         " at epoch " + std::to_string(epoch));
    tape.backward(loss);

    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(epoch));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(epoch));
    for (std::size_t i = 0; i < params.size(); ++i) {
      Matrix& m1 = moment1[i];
      Matrix& m2 = moment2[i];
      Param& p = *params[i];
      for (std::size_t k = 0; k < m1.data.size(); ++k) {
        const double gk = p.grad.data[k];
        m1.data[k] = cfg.beta1 * m1.data[k] + (1.0 - cfg.beta1) * gk;
        m2.data[k] = cfg.beta2 * m2.data[k] + (1.0 - cfg.beta2) * gk * gk;
        p.value.data[k] -= cfg.learning_rate * (m1.data[k] / bc1) /
                           (std::sqrt(m2.data[k] / bc2) + cfg.adam_eps);
      }
    }

    const Matrix& sc = tape.value(fw.scores);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < train_ids.size(); ++i)
      if (model::argmax_row(sc, train_ids[i]) == train_labels[i]) ++hits;
    report.loss_curve.push_back(loss_val);
    report.train_acc_curve.push_back(static_cast<double>(hits) /
                                     static_cast<double>(train_ids.size()));
  }

  // final evaluation pass: exhaustive neighborhoods (fanout >= max degree
  // makes the sampler return full neighbor lists, so no sampling noise)
  std::size_t max_degree = 1;
  for (std::size_t t = 1; t <= g.num_steps; ++t)
    for (std::size_t d : graph::degree(g, t)) max_degree = std::max(max_degree, d);
  const std::vector<std::size_t> train_fanouts = model.config().fanouts;
  model.config().fanouts.assign(cfg.layers, max_degree);
  Tape tape;
  auto fw = model.forward(tape, g, mode, num::mix_seed(cfg.seed, 0xe90c, 0));
  model.config().fanouts = train_fanouts;
  const Matrix& sc = tape.value(fw.scores);
  std::vector<std::size_t> y_true, y_pred;
  y_true.reserve(test_ids.size());
  for (std::size_t v : test_ids) {
    y_true.push_back(g.labels[v]);
    y_pred.push_back(model::argmax_row(sc, v));
  }
  report.confusion = confusion_matrix(y_true, y_pred, g.num_classes);
  report.macro_f1 = macro_f1(report.confusion);
  report.micro_f1 = micro_f1(report.confusion);
  report.per_class_precision = per_class_precision(report.confusion);
  report.per_class_recall = per_class_recall(report.confusion);
  for (std::size_t c = 0; c < mc.intervals.size(); ++c) {
    report.tau_means.push_back(model.mean_tau(c));
    report.gamma_means.push_back(model.mean_gamma(c));
  }
  if (mc.ta_enabled)
    report.spike_rates = neuron::firing_rate(model.bank(0, mc.layers - 1).trace());
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  return TrainResult{std::move(model), std::move(report)};
}

std::vector<AblationRun> run_ablation(const graph::DynamicGraph& g,
                                      const TrainConfig& base,
                                      const std::vector<AblationArm>& arms,
                                      std::size_t num_seeds, std::size_t max_threads) {
  if (arms.empty() || num_seeds == 0) throw ConfigError("run_ablation: nothing to run");
  struct Job {
    std::size_t arm_index;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t a = 0; a < arms.size(); ++a)
    for (std::size_t s = 0; s < num_seeds; ++s)
      jobs.push_back({a, base.seed + s});

  std::vector<AblationRun> results(jobs.size());
  std::mutex next_mutex;
  std::size_t next = 0;
  auto worker = [&]() {
    for (;;) {
      std::size_t j;
      {
        std::lock_guard<std::mutex> lock(next_mutex);
        if (next >= jobs.size()) return;
        j = next++;
      }
      TrainConfig cfg = base;
      arms[jobs[j].arm_index].apply(cfg);
      cfg.seed = jobs[j].seed;
      TrainResult r = train(g, cfg);
      results[j] = AblationRun{arms[jobs[j].arm_index].name, cfg.seed,
                               r.report.macro_f1, r.report.micro_f1, r.report.seconds};
    }
  };

  const std::size_t workers = std::max<std::size_t>(
      1, std::min({max_threads, jobs.size(),
                   static_cast<std::size_t>(std::thread::hardware_concurrency())}));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return results;
}

std::vector<ArmSummary> summarize_ablation(const std::vector<AblationRun>& runs) {
  std::vector<ArmSummary> rows;
  for (const AblationRun& r : runs) {
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const ArmSummary& s) { return s.arm == r.arm; });
    if (it == rows.end()) rows.push_back(ArmSummary{r.arm, 0, 0, 0, 0, 0});
  }
  for (ArmSummary& row : rows) {
    std::vector<double> micro, macro;
    for (const AblationRun& r : runs)
      if (r.arm == row.arm) micro.push_back(r.micro_f1), macro.push_back(r.macro_f1);
    auto mean = [](const std::vector<double>& v) {
      double acc = 0;
      for (double x : v) acc += x;
      return acc / static_cast<double>(v.size());
    };
    auto sd = [&](const std::vector<double>& v, double m) {
      if (v.size() < 2) return 0.0;
      double acc = 0;
      for (double x : v) acc += (x - m) * (x - m);
      return std::sqrt(acc / static_cast<double>(v.size() - 1));
    };
    row.runs = micro.size();
    row.micro_mean = mean(micro);
    row.micro_std = sd(micro, row.micro_mean);
    row.macro_mean = mean(macro);
    row.macro_std = sd(macro, row.macro_mean);
  }
  return rows;
}

namespace {
std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

void write_ablation_csv(const std::vector<AblationRun>& runs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "arm,seed,macro_f1,micro_f1\n";
  for (const auto& r : runs)
    out << r.arm << "," << r.seed << "," << fmt17(r.macro_f1) << ","
        << fmt17(r.micro_f1) << "\n";
}

void write_ablation_summary_csv(const std::vector<ArmSummary>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "arm,runs,micro_mean,micro_std,macro_mean,macro_std\n";
  for (const auto& r : rows)
    out << r.arm << "," << r.runs << "," << fmt17(r.micro_mean) << ","
        << fmt17(r.micro_std) << "," << fmt17(r.macro_mean) << ","
        << fmt17(r.macro_std) << "\n";
}

void write_metrics_json(const EvalReport& report, const std::string& path) {
  nlohmann::json j;
  j["macro_f1"] = report.macro_f1;
  j["micro_f1"] = report.micro_f1;
  j["confusion"] = report.confusion;
  j["tau_means"] = report.tau_means;
  j["gamma_means"] = report.gamma_means;
  j["spike_rates"] = report.spike_rates;
  j["seconds"] = report.seconds;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << j.dump(2) << "\n";
}

void write_history_csv(const EvalReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "epoch,loss,train_acc\n";
  for (std::size_t e = 0; e < report.loss_curve.size(); ++e)
    out << (e + 1) << "," << fmt17(report.loss_curve[e]) << ","
        << fmt17(report.train_acc_curve[e]) << "\n";
}

}  // namespace signn::train
