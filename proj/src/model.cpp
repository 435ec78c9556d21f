#include "signn/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "signn/errors.hpp"
#include "signn/rng.hpp"

namespace signn::model {

using num::GradMode;
using num::Matrix;
using num::Param;
using num::Rng;
using num::Tape;
using num::Var;

AggStrategy parse_strategy(const std::string& name) {
  if (name == "average" || name == "avg") return AggStrategy::Average;
  if (name == "max") return AggStrategy::Max;
  if (name == "concat") return AggStrategy::Concat;
  if (name == "attention") return AggStrategy::Attention;
  throw ConfigError("unknown aggregation strategy: " + name);
}

std::string strategy_name(AggStrategy s) {
  switch (s) {
    case AggStrategy::Average: return "average";
    case AggStrategy::Max: return "max";
    case AggStrategy::Concat: return "concat";
    case AggStrategy::Attention: return "attention";
  }
  return "?";
}

void ModelConfig::validate() const {
  if (num_nodes == 0) throw ConfigError("model: num_nodes must be positive");
  if (num_classes < 2) throw ConfigError("model: need at least 2 classes");
  if (d == 0 || d_in == 0) throw ConfigError("model: widths must be positive");
  if (layers == 0) throw ConfigError("model: need at least one layer");
  if (fanouts.size() != layers)
    throw ConfigError("model: fanouts count " + std::to_string(fanouts.size()) +
                      " != layers " + std::to_string(layers));
  if (num_steps == 0) throw ConfigError("model: num_steps must be positive");
  sampling::build_plan(num_steps, intervals);  // validates intervals
}

namespace {

Matrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (double& v : m.data) v = rng.uniform(-bound, bound);
  return m;
}

}  // namespace

SignnModel::SignnModel(ModelConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  Rng rng(num::mix_seed(cfg_.init_seed, 0x1217));

  {
    // near-zero start keeps untrained rows (test nodes get gradient only as
    // neighbors) from flooding the self pathway with noise
    constexpr double kFeatureInitScale = 0.05;
    Matrix table(cfg_.num_nodes, cfg_.d_in);
    for (double& v : table.data) v = rng.uniform(-kFeatureInitScale, kFeatureInitScale);
    features_ = Param("features", std::move(table));
  }

  const auto plan = sampling::build_plan(cfg_.num_steps, cfg_.intervals);
  channels_.resize(cfg_.intervals.size());
  for (std::size_t c = 0; c < channels_.size(); ++c) {
    const std::string ch = "ch" + std::to_string(cfg_.intervals[c]);
    for (std::size_t k = 0; k < cfg_.layers; ++k) {
      const std::size_t in = k == 0 ? cfg_.d_in : cfg_.d;
      const std::size_t out = cfg_.d;
      const std::string base = ch + ".layer" + std::to_string(k);
      TaLayer layer;
      layer.w_h = Param(base + ".w_h", glorot_uniform(in, out, rng));
      layer.b_h = Param(base + ".b_h", glorot_uniform(in, out, rng));
      layer.w_s = Param(base + ".w_s", glorot_uniform(in, out, rng));
      layer.b_s = Param(base + ".b_s", glorot_uniform(in, out, rng));
      layer.ta_enabled = cfg_.ta_enabled;
      layer.neurons = std::make_unique<neuron::NeuronBank>(
          cfg_.neuron_kind, cfg_.num_nodes, out, base + ".neurons", cfg_.tau_init,
          cfg_.gamma_init, cfg_.v_reset, cfg_.v_th_init);
      channels_[c].push_back(std::move(layer));
    }
    PoolParams pool;
    // all-ones start: pooling begins as a plain row sum
    pool.p = Param("pool." + ch, Matrix::ones(cfg_.d, plan.step_index[c].size()));
    pools_.push_back(std::move(pool));
  }

  agg_.strategy = cfg_.strategy;
  const std::size_t g_count = cfg_.intervals.size();
  agg_.concat_proj =
      Param("agg.concat_proj", glorot_uniform(g_count * cfg_.d, cfg_.d, rng));
  agg_.attn_w = Param("agg.attn_w", glorot_uniform(cfg_.d, cfg_.d, rng));
  // zero query: attention starts exactly as Average
  agg_.attn_q = Param("agg.attn_q", Matrix::zeros(cfg_.d, 1));

  head_.weights = Param("head.weights", glorot_uniform(cfg_.d, cfg_.num_classes, rng));
  head_.bias = Param("head.bias", Matrix::zeros(1, cfg_.num_classes));
}

std::vector<Param*> SignnModel::parameters() {
  std::vector<Param*> ps;
  if (cfg_.learn_features) ps.push_back(&features_);
  for (auto& channel : channels_) {
    for (auto& layer : channel) {
      ps.push_back(&layer.w_h);
      ps.push_back(&layer.b_h);
      ps.push_back(&layer.w_s);
      ps.push_back(&layer.b_s);
      ps.push_back(&layer.neurons->params().raw_tau);
      ps.push_back(&layer.neurons->params().raw_gamma);
    }
  }
  for (auto& pool : pools_) ps.push_back(&pool.p);
  if (agg_.strategy == AggStrategy::Concat) ps.push_back(&agg_.concat_proj);
  if (agg_.strategy == AggStrategy::Attention) {
    ps.push_back(&agg_.attn_w);
    ps.push_back(&agg_.attn_q);
  }
  ps.push_back(&head_.weights);
  ps.push_back(&head_.bias);
  return ps;
}

std::vector<const Param*> SignnModel::parameters_const() const {
  auto* self = const_cast<SignnModel*>(this);
  std::vector<Param*> ps = self->parameters();
  return {ps.begin(), ps.end()};
}

neuron::NeuronBank& SignnModel::bank(std::size_t channel, std::size_t layer) {
  return *channels_.at(channel).at(layer).neurons;
}

TaLayer& SignnModel::layer(std::size_t channel, std::size_t k) {
  return channels_.at(channel).at(k);
}

Var aggregate_neighbors(
    Tape& t, Var h, std::shared_ptr<const std::vector<std::vector<std::size_t>>> samples) {
  return t.neighbor_mean(h, std::move(samples));
}

Var ta_update(Tape& t, TaLayer& layer, const TaLayerVars& vars, Var h_self,
              Var h_nbr, const GradMode& mode, Var* spikes_out) {
  Var pre_h = t.add(t.matmul(h_nbr, vars.w_h), t.matmul(h_self, vars.b_h));
  Var h_tilde = t.sigmoid(pre_h);
  if (!layer.ta_enabled) return h_tilde;
  Var pre_s = t.add(t.matmul(h_nbr, vars.w_s), t.matmul(h_self, vars.b_s));
  Var spikes = layer.neurons->step(t, pre_s, mode);
  if (spikes_out) *spikes_out = spikes;
  return t.mul(spikes, h_tilde);
}

Var ta_update(Tape& t, TaLayer& layer, Var h_self, Var h_nbr, const GradMode& mode) {
  TaLayerVars vars{t.param(layer.w_h), t.param(layer.b_h), t.param(layer.w_s),
                   t.param(layer.b_s)};
  if (layer.ta_enabled) {
    layer.neurons->reset_state();
    layer.neurons->begin_pass(t);
  }
  return ta_update(t, layer, vars, h_self, h_nbr, mode, nullptr);
}

ChannelOutput SignnModel::forward_channel(Tape& t, const graph::DynamicGraph& g,
                                          std::size_t channel, Var x,
                                          const std::vector<std::size_t>& steps,
                                          const GradMode& mode,
                                          std::uint64_t sampling_seed) {
  auto& layers = channels_.at(channel);
  std::vector<TaLayerVars> vars;
  vars.reserve(layers.size());
  for (auto& layer : layers) {
    vars.push_back(TaLayerVars{t.param(layer.w_h), t.param(layer.b_h),
                               t.param(layer.w_s), t.param(layer.b_s)});
    if (layer.ta_enabled) {
      layer.neurons->reset_state();
      layer.neurons->begin_pass(t);
    }
  }

  ChannelOutput out;
  for (std::size_t step : steps) {
    Var h = x;
    for (std::size_t k = 0; k < layers.size(); ++k) {
      auto samples = std::make_shared<std::vector<std::vector<std::size_t>>>();
      samples->reserve(g.num_nodes);
      for (std::size_t v = 0; v < g.num_nodes; ++v) {
        Rng rng = sampling::site_rng(sampling_seed, v, step, k);
        samples->push_back(
            sampling::sample_neighbors(g, v, step, cfg_.fanouts[k], rng).neighbors);
      }
      Var h_nbr = t.neighbor_mean(h, samples);
      Var spikes{};
      h = ta_update(t, layers[k], vars[k], h, h_nbr, mode, &spikes);
      if (k + 1 == layers.size() && layers[k].ta_enabled)
        out.final_spikes.push_back(spikes);
    }
    out.step_outputs.push_back(h);
  }

  Var pool_var = t.param(pools_.at(channel).p);
  Var acc = t.pool_step(out.step_outputs[0], pool_var, 0);
  for (std::size_t j = 1; j < out.step_outputs.size(); ++j)
    acc = t.add(acc, t.pool_step(out.step_outputs[j], pool_var, j));
  out.pooled = acc;
  return out;
}

Var SignnModel::mtg_aggregate(Tape& t, const std::vector<Var>& z_list) {
  if (z_list.empty()) throw ConfigError("mtg_aggregate: no channels");
  switch (agg_.strategy) {
    case AggStrategy::Average: {
      Var acc = z_list[0];
      for (std::size_t i = 1; i < z_list.size(); ++i) acc = t.add(acc, z_list[i]);
      return t.mul_scalar(acc, 1.0 / static_cast<double>(z_list.size()));
    }
    case AggStrategy::Max: {
      Var acc = z_list[0];
      for (std::size_t i = 1; i < z_list.size(); ++i) acc = t.max_elem(acc, z_list[i]);
      return acc;
    }
    case AggStrategy::Concat: {
      Var cat = t.concat_cols(z_list);
      return t.matmul(cat, t.param(agg_.concat_proj));
    }
    case AggStrategy::Attention: {
      Var w = t.param(agg_.attn_w);
      Var q = t.param(agg_.attn_q);
      std::vector<Var> scores;
      scores.reserve(z_list.size());
      for (Var z : z_list) scores.push_back(t.matmul(t.tanh(t.matmul(z, w)), q));
      // softmax over channels, shifted by the per-row max (exact by shift
      // invariance, so the constant shift does not disturb gradients)
      const std::size_t n = t.value(scores[0]).rows;
      Matrix shift(n, 1);
      for (std::size_t i = 0; i < n; ++i) {
        double mx = t.value(scores[0])(i, 0);
        for (std::size_t g = 1; g < scores.size(); ++g)
          mx = std::max(mx, t.value(scores[g])(i, 0));
        shift(i, 0) = mx;
      }
      Var shift_c = t.constant(std::move(shift));
      std::vector<Var> exps;
      exps.reserve(scores.size());
      Var denom{};
      for (std::size_t g = 0; g < scores.size(); ++g) {
        exps.push_back(t.exp(t.sub(scores[g], shift_c)));
        denom = g == 0 ? exps[0] : t.add(denom, exps[g]);
      }
      Var out{};
      for (std::size_t g = 0; g < z_list.size(); ++g) {
        Var weight = t.div(exps[g], denom);
        Var term = t.row_scale(z_list[g], weight);
        out = g == 0 ? term : t.add(out, term);
      }
      return out;
    }
  }
  throw ConfigError("mtg_aggregate: bad strategy");
}

ForwardResult SignnModel::forward(Tape& t, const graph::DynamicGraph& g,
                                  const GradMode& mode, std::uint64_t sampling_seed) {
  if (g.num_nodes != cfg_.num_nodes)
    throw DimensionError("forward: graph has " + std::to_string(g.num_nodes) +
                         " nodes, model was built for " + std::to_string(cfg_.num_nodes));
  Var x;
  if (cfg_.learn_features) {
    x = t.param(features_);
  } else {
    if (!g.features) throw DataError("forward: graph carries no feature matrix");
    if (g.features->cols != cfg_.d_in)
      throw DimensionError("forward: feature width " + std::to_string(g.features->cols) +
                           " != configured d_in " + std::to_string(cfg_.d_in));
    x = t.constant(*g.features);
  }

  const auto plan = sampling::build_plan(g.num_steps, cfg_.intervals);
  ForwardResult result;
  std::vector<Var> pooled;
  for (std::size_t c = 0; c < plan.channels(); ++c) {
    result.channels.push_back(
        forward_channel(t, g, c, x, plan.step_index[c], mode, sampling_seed));
    pooled.push_back(result.channels.back().pooled);
  }
  result.combined = mtg_aggregate(t, pooled);
  result.scores = t.add_row_broadcast(t.matmul(result.combined, t.param(head_.weights)),
                                      t.param(head_.bias));
  return result;
}

Matrix temporal_pool(const Matrix& z_stack, const Matrix& pool) {
  num::require_same_shape(z_stack, pool, "temporal_pool");
  Matrix z(z_stack.rows, 1);
  for (std::size_t i = 0; i < z_stack.rows; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < z_stack.cols; ++j)
      acc += z_stack(i, j) * pool(i, j);
    z(i, 0) = acc;
  }
  return z;
}

Matrix predict(const ClassifierHead& head, const Matrix& z) {
  Matrix scores = num::matmul(z, head.weights.value);
  for (std::size_t i = 0; i < scores.rows; ++i)
    for (std::size_t j = 0; j < scores.cols; ++j)
      scores(i, j) += head.bias.value(0, j);
  return scores;
}

std::size_t argmax_row(const Matrix& scores, std::size_t row) {
  const double* r = scores.row_ptr(row);
  std::size_t best = 0;
  for (std::size_t j = 1; j < scores.cols; ++j)
    if (r[j] > r[best]) best = j;
  return best;
}

EmbeddingMatrix SignnModel::embedding_stack(const Tape& t, const ChannelOutput& ch,
                                            std::size_t node) const {
  EmbeddingMatrix em;
  em.values = Matrix(cfg_.d, ch.step_outputs.size());
  for (std::size_t j = 0; j < ch.step_outputs.size(); ++j) {
    const Matrix& h = t.value(ch.step_outputs[j]);
    for (std::size_t i = 0; i < cfg_.d; ++i) em.values(i, j) = h(node, i);
  }
  return em;
}

double SignnModel::mean_tau(std::size_t channel) const {
  double acc = 0.0;
  for (const auto& layer : channels_.at(channel)) acc += layer.neurons->params().tau();
  return acc / static_cast<double>(channels_.at(channel).size());
}

double SignnModel::mean_gamma(std::size_t channel) const {
  double acc = 0.0;
  for (const auto& layer : channels_.at(channel)) acc += layer.neurons->params().gamma();
  return acc / static_cast<double>(channels_.at(channel).size());
}

namespace {

constexpr char kCkptMagic[] = "SIGNN-CKPT-1\n";

void write_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t read_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw DataError("checkpoint: truncated file");
  return v;
}

}  // namespace

void SignnModel::save_checkpoint(const std::string& path) const {
  nlohmann::json j;
  j["num_nodes"] = cfg_.num_nodes;
  j["num_classes"] = cfg_.num_classes;
  j["d_in"] = cfg_.d_in;
  j["d"] = cfg_.d;
  j["layers"] = cfg_.layers;
  j["intervals"] = cfg_.intervals;
  j["fanouts"] = cfg_.fanouts;
  j["neuron_kind"] = cfg_.neuron_kind == neuron::NeuronKind::Blif ? "blif" : "lif";
  j["ta_enabled"] = cfg_.ta_enabled;
  j["strategy"] = strategy_name(cfg_.strategy);
  j["learn_features"] = cfg_.learn_features;
  j["num_steps"] = cfg_.num_steps;
  j["tau_init"] = cfg_.tau_init;
  j["gamma_init"] = cfg_.gamma_init;
  j["v_reset"] = cfg_.v_reset;
  j["v_th_init"] = cfg_.v_th_init;
  j["surrogate_width"] = cfg_.surrogate_width;
  j["init_seed"] = cfg_.init_seed;
  j["run_seed"] = cfg_.run_seed;
  const std::string header = j.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.write(kCkptMagic, sizeof(kCkptMagic) - 1);
  write_u64(out, header.size());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  const auto params = parameters_const();
  write_u64(out, params.size());
  for (const Param* p : params) {
    write_u64(out, p->name.size());
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    write_u64(out, p->value.rows);
    write_u64(out, p->value.cols);
    out.write(reinterpret_cast<const char*>(p->value.data.data()),
              static_cast<std::streamsize>(p->value.data.size() * sizeof(double)));
  }
  if (!out) throw DataError("checkpoint write failed: " + path);
}

SignnModel SignnModel::load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  char magic[sizeof(kCkptMagic) - 1];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kCkptMagic, sizeof magic) != 0)
    throw DataError("checkpoint: bad magic in " + path);

  const std::uint64_t hlen = read_u64(in);
  std::string header(hlen, '\0');
  in.read(header.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw DataError("checkpoint: truncated header");
  nlohmann::json j = nlohmann::json::parse(header);

  ModelConfig cfg;
  cfg.num_nodes = j.at("num_nodes").get<std::size_t>();
  cfg.num_classes = j.at("num_classes").get<std::size_t>();
  cfg.d_in = j.at("d_in").get<std::size_t>();
  cfg.d = j.at("d").get<std::size_t>();
  cfg.layers = j.at("layers").get<std::size_t>();
  cfg.intervals = j.at("intervals").get<std::vector<std::size_t>>();
  cfg.fanouts = j.at("fanouts").get<std::vector<std::size_t>>();
  cfg.neuron_kind = j.at("neuron_kind").get<std::string>() == "blif"
                        ? neuron::NeuronKind::Blif
                        : neuron::NeuronKind::Lif;
  cfg.ta_enabled = j.at("ta_enabled").get<bool>();
  cfg.strategy = parse_strategy(j.at("strategy").get<std::string>());
  cfg.learn_features = j.at("learn_features").get<bool>();
  cfg.num_steps = j.at("num_steps").get<std::size_t>();
  cfg.tau_init = j.at("tau_init").get<double>();
  cfg.gamma_init = j.at("gamma_init").get<double>();
  cfg.v_reset = j.at("v_reset").get<double>();
  cfg.v_th_init = j.at("v_th_init").get<double>();
  cfg.surrogate_width = j.at("surrogate_width").get<double>();
  cfg.init_seed = j.at("init_seed").get<std::uint64_t>();
  cfg.run_seed = j.at("run_seed").get<std::uint64_t>();

  SignnModel model(cfg);
  auto params = model.parameters();

  const std::uint64_t count = read_u64(in);
  if (count != params.size())
    throw DataError("checkpoint: " + std::to_string(count) + " params, expected " +
                    std::to_string(params.size()));
  for (Param* p : params) {
    const std::uint64_t nlen = read_u64(in);
    std::string name(nlen, '\0');
    in.read(name.data(), static_cast<std::streamsize>(nlen));
    const std::uint64_t rows = read_u64(in);
    const std::uint64_t cols = read_u64(in);
    if (!in || name != p->name || rows != p->value.rows || cols != p->value.cols)
      throw DataError("checkpoint: mismatch at param " + p->name + " (got " + name + ")");
    in.read(reinterpret_cast<char*>(p->value.data.data()),
            static_cast<std::streamsize>(rows * cols * sizeof(double)));
    if (!in) throw DataError("checkpoint: truncated values for " + name);
  }
  return model;
}

}  // namespace signn::model
