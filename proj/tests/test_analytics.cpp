#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "signn/analytics.hpp"
#include "signn/errors.hpp"
#include "signn/training.hpp"
#include "test_helpers.hpp"

using namespace signn;
using num::Matrix;

namespace {

neuron::SpikeTrace trace_from_rates(const std::vector<double>& rates, std::size_t units) {
  neuron::SpikeTrace trace;
  for (double r : rates) {
    Matrix spikes = Matrix::zeros(1, units);
    const auto count = static_cast<std::size_t>(r * static_cast<double>(units));
    for (std::size_t i = 0; i < count; ++i) spikes.data[i] = 1.0;
    trace.record(spikes);
  }
  return trace;
}

}  // namespace

TEST_CASE("pearson corner cases") {
  CHECK(!analytics::pearson({1, 1, 1}, {0, 1, 2}).has_value());  // zero variance
  CHECK(!analytics::pearson({1, 2}, {1}).has_value());
  auto r = analytics::pearson({0, 1, 2, 5}, {0, 1, 2, 5});
  REQUIRE(r.has_value());
  CHECK(*r == doctest::Approx(1.0).epsilon(1e-12));
  auto neg = analytics::pearson({0, 1, 2}, {2, 1, 0});
  CHECK(*neg == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("spike_vs_degree: constant graph has null correlation") {
  test_helpers::TempFile f("0 1 1\n0 1 2\n0 1 3\n");
  auto g = graph::load_edge_stream(f.path());
  const auto trace = trace_from_rates({0.1, 0.4, 0.2}, 10);
  const auto series = analytics::spike_vs_degree(trace, g);
  CHECK(series.steps == std::vector<std::size_t>{2, 3});
  CHECK(series.increment == std::vector<double>{0.0, 0.0});
  CHECK(!series.pearson.has_value());
}

TEST_CASE("spike_vs_degree: co-moving series correlate positively") {
  // edges triple at step 5 of 8; the rate series bumps at the same step
  graph::DynamicGraph g;
  g.num_nodes = 12;
  g.num_steps = 8;
  g.num_classes = 2;
  g.snapshots.resize(8);
  auto base = test_helpers::two_community_graph(12, 1, 0.4, 0.1, 5).snapshots[0];
  auto burst = test_helpers::two_community_graph(12, 1, 0.95, 0.5, 6).snapshots[0];
  for (std::size_t t = 0; t < 8; ++t) {
    g.snapshots[t] = t < 4 ? base : burst;
    g.snapshots[t].step = t + 1;
  }
  std::vector<double> rates = {0.2, 0.2, 0.2, 0.2, 0.8, 0.3, 0.25, 0.2};
  const auto series = analytics::spike_vs_degree(trace_from_rates(rates, 100), g);
  REQUIRE(series.pearson.has_value());
  CHECK(*series.pearson > 0.0);
}

TEST_CASE("spike_vs_degree: misaligned trace raises a data error") {
  test_helpers::TempFile f("0 1 1\n0 1 2\n0 1 3\n");
  auto g = graph::load_edge_stream(f.path());
  CHECK_THROWS_AS(analytics::spike_vs_degree(trace_from_rates({0.1, 0.2}, 10), g),
                  DataError);
}

TEST_CASE("spike_vs_degree csv layout") {
  namespace fs = std::filesystem;
  test_helpers::TempFile f("0 1 1\n0 1 2\n1 2 2\n");
  auto g = graph::load_edge_stream(f.path());
  const auto series = analytics::spike_vs_degree(trace_from_rates({0.0, 0.5}, 10), g);
  const std::string path = (fs::temp_directory_path() / "svd.csv").string();
  analytics::write_spike_vs_degree_csv(series, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# correlation=", 0) == 0);
  std::getline(in, line);
  CHECK(line == "step,rate,increment");
  std::getline(in, line);
  CHECK(line.rfind("2,", 0) == 0);
  fs::remove(path);
}

TEST_CASE("export_embeddings: shapes, spike-file alphabet, round-trip") {
  namespace fs = std::filesystem;
  auto g = test_helpers::two_community_graph(10, 3, 0.5, 0.1, 9);
  train::TrainConfig cfg;
  cfg.epochs = 3;
  cfg.d = 6;
  cfg.d_in = 4;
  cfg.layers = 1;
  cfg.fanouts = {3};
  cfg.intervals = {1, 2};
  cfg.seed = 2;
  auto result = train::train(g, cfg);

  const std::string emb = (fs::temp_directory_path() / "emb.csv").string();
  const std::string spk = (fs::temp_directory_path() / "spk.csv").string();
  analytics::export_embeddings(result.model, g, emb, spk);

  // embeddings: header + n rows of node, d values, label
  std::ifstream ein(emb);
  std::string line;
  std::getline(ein, line);
  CHECK(line.rfind("node,", 0) == 0);
  std::size_t rows = 0;
  std::vector<std::vector<double>> values;
  while (std::getline(ein, line)) {
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> fields;
    while (std::getline(ss, tok, ',')) fields.push_back(tok);
    REQUIRE(fields.size() == 6 + 2);
    values.push_back({});
    for (std::size_t j = 1; j <= 6; ++j) values.back().push_back(std::stod(fields[j]));
    ++rows;
  }
  CHECK(rows == 10);

  // reload reproduces the in-memory embedding bit-for-bit (17 digits)
  num::Tape tape;
  auto fw = result.model.forward(tape, g, num::GradMode::surrogate(1.0),
                                 num::mix_seed(result.model.config().run_seed, 0xe90c, 0));
  const Matrix& z = tape.value(fw.combined);
  for (std::size_t v = 0; v < 10; ++v)
    for (std::size_t j = 0; j < 6; ++j) CHECK(values[v][j] == z(v, j));

  // spike stacks: body alphabet is exactly {0,1,comma}
  std::ifstream sin(spk);
  std::getline(sin, line);  // header
  std::size_t spike_rows = 0;
  while (std::getline(sin, line)) {
    for (char ch : line) CHECK((ch == '0' || ch == '1' || ch == ','));
    ++spike_rows;
  }
  CHECK(spike_rows == 10);

  fs::remove(emb);
  fs::remove(spk);
}

TEST_CASE("export is deterministic for a fixed model and graph") {
  namespace fs = std::filesystem;
  auto g = test_helpers::two_community_graph(8, 2, 0.5, 0.1, 15);
  train::TrainConfig cfg;
  cfg.epochs = 2;
  cfg.d = 4;
  cfg.d_in = 4;
  cfg.layers = 1;
  cfg.fanouts = {2};
  cfg.intervals = {1};
  cfg.seed = 3;
  auto result = train::train(g, cfg);

  auto dump = [&](const std::string& tag) {
    const std::string emb = (fs::temp_directory_path() / ("de_" + tag + ".csv")).string();
    const std::string spk = (fs::temp_directory_path() / ("ds_" + tag + ".csv")).string();
    analytics::export_embeddings(result.model, g, emb, spk);
    std::ifstream e(emb), s(spk);
    std::string all((std::istreambuf_iterator<char>(e)), {});
    all += std::string(std::istreambuf_iterator<char>(s), {});
    fs::remove(emb);
    fs::remove(spk);
    return all;
  };
  CHECK(dump("a") == dump("b"));
}
