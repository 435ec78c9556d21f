#include "signn/analytics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "signn/errors.hpp"
#include "signn/rng.hpp"

namespace signn::analytics {

using num::Matrix;

std::optional<double> pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) return std::nullopt;
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a[i], mb += b[i];
  ma /= n;
  mb /= n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return std::nullopt;  // zero variance: undefined
  return cov / std::sqrt(va * vb);
}

SpikeDegreeSeries spike_vs_degree(const neuron::SpikeTrace& trace,
                                  const graph::DynamicGraph& g) {
  if (trace.steps.size() != g.num_steps)
    throw DataError("spike_vs_degree: trace has " + std::to_string(trace.steps.size()) +
                    " steps, graph has " + std::to_string(g.num_steps) +
                    " (alignment requires the full-resolution channel)");
  const auto rates = neuron::firing_rate(trace);
  const auto increments = graph::degree_increment_series(g);

  SpikeDegreeSeries series;
  for (std::size_t t = 2; t <= g.num_steps; ++t) {
    series.steps.push_back(t);
    series.rate.push_back(rates[t - 1]);
    series.increment.push_back(increments[t - 2]);
  }
  series.pearson = pearson(series.rate, series.increment);
  return series;
}

namespace {
std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

void write_spike_vs_degree_csv(const SpikeDegreeSeries& series, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "# correlation=" << (series.pearson ? fmt17(*series.pearson) : "null") << "\n";
  out << "step,rate,increment\n";
  for (std::size_t i = 0; i < series.steps.size(); ++i)
    out << series.steps[i] << "," << fmt17(series.rate[i]) << ","
        << fmt17(series.increment[i]) << "\n";
}

void export_embeddings(model::SignnModel& m, const graph::DynamicGraph& g,
                       const std::string& embeddings_path, const std::string& spikes_path) {
  if (!g.has_labels()) throw DataError("export_embeddings: graph has no labels");
  num::Tape tape;
  const auto mode = num::GradMode::surrogate(m.config().surrogate_width);
  auto fw = m.forward(tape, g, mode, num::mix_seed(m.config().run_seed, 0xe90c, 0));

  {
    const Matrix& z = tape.value(fw.combined);
    std::ofstream out(embeddings_path);
    if (!out) throw DataError("cannot write " + embeddings_path);
    out << "node";
    for (std::size_t j = 0; j < z.cols; ++j) out << ",e" << j;
    out << ",label\n";
    for (std::size_t v = 0; v < z.rows; ++v) {
      out << v;
      for (std::size_t j = 0; j < z.cols; ++j) out << "," << fmt17(z(v, j));
      out << "," << g.labels[v] << "\n";
    }
  }

  if (!m.config().ta_enabled) return;  // no spike pathway to export

  const auto& ch1 = fw.channels.at(0);
  const std::size_t d = m.config().d;
  const std::size_t steps = ch1.final_spikes.size();
  std::ofstream out(spikes_path);
  if (!out) throw DataError("cannot write " + spikes_path);
  for (std::size_t j = 0; j < d * steps; ++j) out << (j ? "," : "") << "s" << j;
  out << "\n";
  for (std::size_t v = 0; v < g.num_nodes; ++v) {
    bool first = true;
    // row-major over the d x T_1 stack: feature index outer, step inner
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t t = 0; t < steps; ++t) {
        const double s = tape.value(ch1.final_spikes[t])(v, i);
        out << (first ? "" : ",") << (s != 0.0 ? '1' : '0');
        first = false;
      }
    }
    out << "\n";
  }
}

}  // namespace signn::analytics
