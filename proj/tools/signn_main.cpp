// signn command line: dataset generation, training, ablation sweeps and
// post-hoc analytics over discrete dynamic graphs.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "signn/analytics.hpp"
#include "signn/errors.hpp"
#include "signn/graph.hpp"
#include "signn/model.hpp"
#include "signn/training.hpp"

namespace fs = std::filesystem;
using namespace signn;

namespace {

std::vector<std::size_t> parse_interval_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(std::stoul(tok));
    } catch (const std::exception&) {
      throw ConfigError("bad integer list entry: '" + tok + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty integer list: '" + s + "'");
  return out;
}

graph::DynamicGraph load_dataset(const std::string& dir, bool need_labels) {
  const fs::path edges = fs::path(dir) / "edges.txt";
  const fs::path labels = fs::path(dir) / "labels.txt";
  graph::DynamicGraph g = graph::load_edge_stream(edges.string());
  if (fs::exists(labels)) {
    graph::load_labels(g, labels.string());
  } else if (need_labels) {
    throw DataError("missing labels file: " + labels.string());
  }
  return g;
}

std::size_t ablation_threads() {
  if (const char* env = std::getenv("SIGNN_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw ConfigError("SIGNN_THREADS must be a positive integer");
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

struct GenOptions {
  std::vector<std::string> params;
  std::string out_dir;
  bool sbm = false;
};

int cmd_gen(const GenOptions& opt) {
  if (!opt.sbm) throw ConfigError("gen: only --sbm generation is available");
  graph::SbmConfig cfg;
  cfg.n = 300;
  cfg.T = 10;
  cfg.k_communities = 3;
  for (const std::string& kv : opt.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("gen: expected key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    try {
      if (key == "n") cfg.n = std::stoul(val);
      else if (key == "k") cfg.k_communities = std::stoul(val);
      else if (key == "T") cfg.T = std::stoul(val);
      else if (key == "seed") cfg.seed = std::stoull(val);
      else if (key == "p-in" || key == "p_in") cfg.p_in = std::stod(val);
      else if (key == "p-out" || key == "p_out") cfg.p_out = std::stod(val);
      else if (key == "drift") cfg.drift_fraction = std::stod(val);
      else throw ConfigError("gen: unknown parameter '" + key + "'");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("gen: bad value for '" + key + "': '" + val + "'");
    }
  }
  graph::DynamicGraph g = graph::generate_sbm(cfg);
  fs::create_directories(opt.out_dir);
  graph::write_edge_stream(g, (fs::path(opt.out_dir) / "edges.txt").string());
  graph::write_labels(g, (fs::path(opt.out_dir) / "labels.txt").string());
  std::cout << "wrote " << opt.out_dir << ": n=" << g.num_nodes << " T=" << g.num_steps
            << " classes=" << g.num_classes << "\n";
  return 0;
}

struct TrainOptions {
  std::string data_dir;
  std::string out_dir = "run";
  double ratio = 0.6;
  std::string intervals = "1,2,3";
  std::string neuron = "blif";
  bool no_ta = false;
  std::string strategy = "average";
  std::size_t epochs = 100;
  std::uint64_t seed = 1;
  double lr = 0.01;
  std::size_t d = 64;
  std::size_t d_in = 32;
  std::size_t layers = 2;
  std::string fanouts = "10,10";
};

train::TrainConfig make_train_config(const TrainOptions& opt) {
  train::TrainConfig cfg;
  cfg.train_ratio = opt.ratio;
  cfg.epochs = opt.epochs;
  cfg.learning_rate = opt.lr;
  cfg.seed = opt.seed;
  cfg.neuron_kind = [&] {
    if (opt.neuron == "blif") return neuron::NeuronKind::Blif;
    if (opt.neuron == "lif") return neuron::NeuronKind::Lif;
    throw ConfigError("train: unknown neuron kind '" + opt.neuron + "'");
  }();
  cfg.ta_enabled = !opt.no_ta;
  cfg.intervals = parse_interval_list(opt.intervals);
  cfg.strategy = model::parse_strategy(opt.strategy);
  cfg.fanouts = parse_interval_list(opt.fanouts);
  cfg.d = opt.d;
  cfg.d_in = opt.d_in;
  cfg.layers = opt.layers;
  if (cfg.fanouts.size() == 1 && cfg.layers > 1)
    cfg.fanouts.assign(cfg.layers, cfg.fanouts[0]);
  return cfg;
}

int cmd_train(const TrainOptions& opt) {
  graph::DynamicGraph g = load_dataset(opt.data_dir, true);
  train::TrainConfig cfg = make_train_config(opt);
  train::TrainResult result = train::train(g, cfg);
  fs::create_directories(opt.out_dir);
  train::write_metrics_json(result.report, (fs::path(opt.out_dir) / "metrics.json").string());
  train::write_history_csv(result.report, (fs::path(opt.out_dir) / "history.csv").string());
  result.model.save_checkpoint((fs::path(opt.out_dir) / "model.ckpt").string());
  if (cfg.ta_enabled)
    neuron::write_trace_csv(result.model.bank(0, cfg.layers - 1).trace(),
                            (fs::path(opt.out_dir) / "spikes.csv").string());
  std::cout << "macro_f1=" << result.report.macro_f1
            << " micro_f1=" << result.report.micro_f1
            << " seconds=" << result.report.seconds << "\n";
  return 0;
}

struct AblateOptions {
  TrainOptions base;
  std::string arms = "ta";
  std::size_t seeds = 5;
  std::string out_dir = ".";
};

int cmd_ablate(const AblateOptions& opt) {
  graph::DynamicGraph g = load_dataset(opt.base.data_dir, true);
  const train::TrainConfig base = make_train_config(opt.base);

  std::vector<train::AblationArm> arms;
  std::stringstream ss(opt.arms);
  std::string kind;
  while (std::getline(ss, kind, ',')) {
    if (kind == "ta") {
      arms.push_back({"ta-blif", [](train::TrainConfig& c) {
                        c.neuron_kind = neuron::NeuronKind::Blif;
                        c.ta_enabled = true;
                      }});
      arms.push_back({"ta-lif", [](train::TrainConfig& c) {
                        c.neuron_kind = neuron::NeuronKind::Lif;
                        c.ta_enabled = true;
                      }});
      arms.push_back({"no-ta", [](train::TrainConfig& c) { c.ta_enabled = false; }});
    } else if (kind == "granularity") {
      for (std::size_t count = 1; count <= 5; ++count) {
        std::vector<std::size_t> intervals;
        for (std::size_t dt = 1; dt <= count; ++dt) intervals.push_back(dt);
        arms.push_back({"granularity-" + std::to_string(count),
                        [intervals](train::TrainConfig& c) { c.intervals = intervals; }});
      }
    } else if (kind == "strategy") {
      for (const char* name : {"average", "max", "concat", "attention"}) {
        const model::AggStrategy s = model::parse_strategy(name);
        arms.push_back({std::string("strategy-") + name,
                        [s](train::TrainConfig& c) { c.strategy = s; }});
      }
    } else if (!kind.empty()) {
      throw ConfigError("ablate: unknown arm group '" + kind + "'");
    }
  }

  auto runs = train::run_ablation(g, base, arms, opt.seeds, ablation_threads());
  auto summary = train::summarize_ablation(runs);
  fs::create_directories(opt.out_dir);
  train::write_ablation_csv(runs, (fs::path(opt.out_dir) / "ablation.csv").string());
  train::write_ablation_summary_csv(
      summary, (fs::path(opt.out_dir) / "ablation_summary.csv").string());
  for (const auto& row : summary)
    std::cout << row.arm << ": micro " << row.micro_mean << " +- " << row.micro_std
              << ", macro " << row.macro_mean << " +- " << row.macro_std << " ("
              << row.runs << " seeds)\n";
  return 0;
}

struct AnalyzeOptions {
  std::string run_dir;
  std::string data_dir;
};

int cmd_analyze(const AnalyzeOptions& opt) {
  const fs::path ckpt = fs::path(opt.run_dir) / "model.ckpt";
  if (!fs::exists(ckpt)) throw DataError("missing checkpoint: " + ckpt.string());
  model::SignnModel m = model::SignnModel::load_checkpoint(ckpt.string());
  graph::DynamicGraph g = load_dataset(opt.data_dir, true);

  analytics::export_embeddings(m, g, (fs::path(opt.run_dir) / "embeddings.csv").string(),
                               (fs::path(opt.run_dir) / "spike_stacks.csv").string());
  if (m.config().ta_enabled) {
    const auto series =
        analytics::spike_vs_degree(m.bank(0, m.config().layers - 1).trace(), g);
    analytics::write_spike_vs_degree_csv(
        series, (fs::path(opt.run_dir) / "spike_vs_degree.csv").string());
    std::cout << "correlation="
              << (series.pearson ? std::to_string(*series.pearson) : "null") << "\n";
  } else {
    std::cerr << "note: no-TA checkpoint has no spike pathway; spike analytics skipped\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SiGNN: spiking-gated graph networks over dynamic graph snapshots"};
  app.require_subcommand(1);

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a synthetic dataset");
  gen_cmd->add_flag("--sbm", gen.sbm, "drifting stochastic block model");
  gen_cmd->add_option("params", gen.params, "key=value pairs: n k T p-in p-out drift seed");
  gen_cmd->add_option("--out", gen.out_dir, "output directory")->required();

  TrainOptions tr;
  CLI::App* train_cmd = app.add_subcommand("train", "train a node classifier");
  train_cmd->add_option("--data", tr.data_dir, "dataset directory")->required();
  train_cmd->add_option("--out", tr.out_dir, "run output directory");
  train_cmd->add_option("--ratio", tr.ratio, "train split ratio");
  train_cmd->add_option("--intervals", tr.intervals, "granularity intervals, e.g. 1,2,3");
  train_cmd->add_option("--neuron", tr.neuron, "blif | lif");
  train_cmd->add_flag("--no-ta", tr.no_ta, "disable the temporal activation gating");
  train_cmd->add_option("--strategy", tr.strategy, "average | max | concat | attention");
  train_cmd->add_option("--epochs", tr.epochs, "training epochs");
  train_cmd->add_option("--seed", tr.seed, "run seed");
  train_cmd->add_option("--lr", tr.lr, "learning rate");
  train_cmd->add_option("--d", tr.d, "hidden width");
  train_cmd->add_option("--din", tr.d_in, "synthesized feature width");
  train_cmd->add_option("--layers", tr.layers, "aggregation-update layers");
  train_cmd->add_option("--fanouts", tr.fanouts, "per-layer neighbor fanouts");

  AblateOptions ab;
  CLI::App* ablate_cmd = app.add_subcommand("ablate", "run ablation arms over seeds");
  ablate_cmd->add_option("--data", ab.base.data_dir, "dataset directory")->required();
  ablate_cmd->add_option("--arms", ab.arms, "comma list: ta, granularity, strategy");
  ablate_cmd->add_option("--seeds", ab.seeds, "seeds per arm");
  ablate_cmd->add_option("--out", ab.out_dir, "output directory");
  ablate_cmd->add_option("--ratio", ab.base.ratio, "train split ratio");
  ablate_cmd->add_option("--epochs", ab.base.epochs, "training epochs");
  ablate_cmd->add_option("--seed", ab.base.seed, "base seed");
  ablate_cmd->add_option("--intervals", ab.base.intervals, "base granularity intervals");
  ablate_cmd->add_option("--lr", ab.base.lr, "learning rate");
  ablate_cmd->add_option("--d", ab.base.d, "hidden width");
  ablate_cmd->add_option("--din", ab.base.d_in, "synthesized feature width");
  ablate_cmd->add_option("--layers", ab.base.layers, "aggregation-update layers");
  ablate_cmd->add_option("--fanouts", ab.base.fanouts, "per-layer neighbor fanouts");

  AnalyzeOptions an;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "spike/degree and embedding exports");
  analyze_cmd->add_option("--run", an.run_dir, "run directory with model.ckpt")->required();
  analyze_cmd->add_option("--data", an.data_dir, "dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen);
    if (train_cmd->parsed()) return cmd_train(tr);
    if (ablate_cmd->parsed()) return cmd_ablate(ab);
    if (analyze_cmd->parsed()) return cmd_analyze(an);
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const RangeError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const DimensionError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
