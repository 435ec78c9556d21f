#include "signn/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "signn/errors.hpp"
#include "signn/rng.hpp"

namespace signn::graph {

namespace {

struct RawEdge {
  std::size_t src, dst, step;
};

bool parse_size(std::string_view tok, std::size_t& out) {
  if (tok.empty()) return false;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

// `# n=28085 T=27 classes=10`; returns false when the line is a plain comment.
bool parse_metadata(const std::string& line, EdgeStreamFormat& fmt) {
  std::string_view v(line);
  v.remove_prefix(1);  // '#'
  bool any = false;
  for (std::string_view tok : split_ws(v)) {
    const auto eq = tok.find('=');
    if (eq == std::string_view::npos) continue;
    std::size_t val;
    if (!parse_size(tok.substr(eq + 1), val)) continue;
    const std::string_view key = tok.substr(0, eq);
    if (key == "n") fmt.num_nodes = val, any = true;
    else if (key == "T") fmt.num_steps = val, any = true;
    else if (key == "classes") fmt.num_classes = val, any = true;
  }
  return any;
}

void finalize_adjacency(DynamicGraph& g, std::vector<std::set<std::pair<std::size_t, std::size_t>>>& per_step) {
  g.snapshots.resize(g.num_steps);
  for (std::size_t t = 0; t < g.num_steps; ++t) {
    Snapshot& snap = g.snapshots[t];
    snap.step = t + 1;
    snap.adjacency.assign(g.num_nodes, {});
    for (const auto& [u, v] : per_step[t]) {
      snap.adjacency[u].push_back(v);
      if (!g.directed && u != v) snap.adjacency[v].push_back(u);
    }
    for (auto& nbrs : snap.adjacency) {
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
  }
}

}  // namespace

const Snapshot& DynamicGraph::snapshot(std::size_t t) const {
  if (t < 1 || t > num_steps)
    throw RangeError("snapshot: step " + std::to_string(t) + " outside [1, " +
                     std::to_string(num_steps) + "]");
  return snapshots[t - 1];
}

void SbmConfig::validate() const {
  if (n == 0 || T == 0 || k_communities == 0)
    throw ConfigError("sbm: n, T and k must be positive");
  if (k_communities > n) throw ConfigError("sbm: more communities than nodes");
  if (!(p_out >= 0.0 && p_out < p_in && p_in <= 1.0))
    throw ConfigError("sbm: need 0 <= p_out < p_in <= 1, got p_in=" +
                      std::to_string(p_in) + " p_out=" + std::to_string(p_out));
  if (drift_fraction < 0.0 || drift_fraction > 1.0)
    throw ConfigError("sbm: drift fraction outside [0, 1]");
}

DynamicGraph load_edge_stream(const std::string& path, const EdgeStreamFormat& fmt_in) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge stream: " + path);

  EdgeStreamFormat fmt = fmt_in;
  std::vector<RawEdge> edges;
  std::size_t max_id = 0, max_step = 0;
  bool saw_node = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line_no == 1) parse_metadata(line, fmt);
      continue;
    }
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    RawEdge e;
    if (toks.size() != 3 || !parse_size(toks[0], e.src) ||
        !parse_size(toks[1], e.dst) || !parse_size(toks[2], e.step))
      throw DataError(path + ": parse error at line " + std::to_string(line_no) +
                      ": '" + line + "'");
    if (e.step < 1)
      throw RangeError(path + ": step " + std::to_string(e.step) +
                       " < 1 at line " + std::to_string(line_no));
    if (fmt.num_steps && e.step > *fmt.num_steps)
      throw RangeError(path + ": step " + std::to_string(e.step) + " > declared T=" +
                       std::to_string(*fmt.num_steps) + " at line " + std::to_string(line_no));
    if (e.src == e.dst && !fmt.allow_self_loops)
      throw DataError(path + ": self-loop at line " + std::to_string(line_no));
    max_id = std::max({max_id, e.src, e.dst});
    max_step = std::max(max_step, e.step);
    saw_node = true;
    edges.push_back(e);
  }

  DynamicGraph g;
  g.directed = fmt.directed;
  g.num_nodes = fmt.num_nodes ? *fmt.num_nodes : (saw_node ? max_id + 1 : 0);
  g.num_steps = fmt.num_steps ? *fmt.num_steps : std::max<std::size_t>(max_step, 1);
  if (g.num_nodes == 0) throw DataError(path + ": empty stream and no declared n");
  if (fmt.num_classes) g.num_classes = *fmt.num_classes;

  for (const RawEdge& e : edges)
    if (e.src >= g.num_nodes || e.dst >= g.num_nodes)
      throw RangeError(path + ": node id outside declared n=" + std::to_string(g.num_nodes));

  std::vector<std::set<std::pair<std::size_t, std::size_t>>> per_step(g.num_steps);
  for (const RawEdge& e : edges) {
    auto [u, v] = std::minmax(e.src, e.dst);
    per_step[e.step - 1].insert(g.directed ? std::pair{e.src, e.dst} : std::pair{u, v});
  }
  finalize_adjacency(g, per_step);
  return g;
}

void load_labels(DynamicGraph& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open labels file: " + path);
  std::vector<std::size_t> labels(g.num_nodes, 0);
  std::vector<bool> seen(g.num_nodes, false);
  std::string line;
  std::size_t line_no = 0, max_label = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto toks = split_ws(line);
    std::size_t node, label;
    if (toks.size() != 2 || !parse_size(toks[0], node) || !parse_size(toks[1], label))
      throw DataError(path + ": parse error at line " + std::to_string(line_no));
    if (node >= g.num_nodes)
      throw RangeError(path + ": node " + std::to_string(node) + " >= n at line " +
                       std::to_string(line_no));
    labels[node] = label;
    seen[node] = true;
    max_label = std::max(max_label, label);
  }
  for (std::size_t v = 0; v < g.num_nodes; ++v)
    if (!seen[v]) throw DataError(path + ": missing label for node " + std::to_string(v));
  g.labels = std::move(labels);
  if (g.num_classes == 0) g.num_classes = max_label + 1;
  if (max_label >= g.num_classes)
    throw RangeError(path + ": label " + std::to_string(max_label) +
                     " >= declared classes " + std::to_string(g.num_classes));
}

void write_edge_stream(const DynamicGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write edge stream: " + path);
  out << "# n=" << g.num_nodes << " T=" << g.num_steps
      << " classes=" << g.num_classes << "\n";
  for (const Snapshot& snap : g.snapshots)
    for (std::size_t u = 0; u < g.num_nodes; ++u)
      for (std::size_t v : snap.adjacency[u])
        if (g.directed || u < v || u == v)
          out << u << " " << v << " " << snap.step << "\n";
}

void write_labels(const DynamicGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write labels file: " + path);
  for (std::size_t v = 0; v < g.labels.size(); ++v)
    out << v << " " << g.labels[v] << "\n";
}

DynamicGraph generate_sbm(const SbmConfig& cfg) {
  cfg.validate();
  num::Rng rng(num::mix_seed(cfg.seed, 0x5b3a));

  std::vector<std::size_t> community(cfg.n);
  for (std::size_t v = 0; v < cfg.n; ++v) community[v] = v % cfg.k_communities;

  DynamicGraph g;
  g.num_nodes = cfg.n;
  g.num_steps = cfg.T;
  g.num_classes = cfg.k_communities;
  g.snapshots.resize(cfg.T);

  const std::size_t drifters =
      static_cast<std::size_t>(cfg.drift_fraction * static_cast<double>(cfg.n));
  std::vector<std::size_t> ids(cfg.n);
  for (std::size_t v = 0; v < cfg.n; ++v) ids[v] = v;

  for (std::size_t t = 0; t < cfg.T; ++t) {
    if (t > 0 && drifters > 0) {
      rng.shuffle(ids);
      for (std::size_t i = 0; i < drifters; ++i)
        community[ids[i]] = rng.uniform_index(cfg.k_communities);
    }
    Snapshot& snap = g.snapshots[t];
    snap.step = t + 1;
    snap.adjacency.assign(cfg.n, {});
    for (std::size_t u = 0; u < cfg.n; ++u) {
      for (std::size_t v = u + 1; v < cfg.n; ++v) {
        const double p = community[u] == community[v] ? cfg.p_in : cfg.p_out;
        if (p > 0.0 && rng.bernoulli(p)) {
          snap.adjacency[u].push_back(v);
          snap.adjacency[v].push_back(u);
        }
      }
    }
    // pair loop emits v ascending for u, but the mirrored entries need sorting
    for (auto& nbrs : snap.adjacency) std::sort(nbrs.begin(), nbrs.end());
  }

  g.labels = std::move(community);  // final-step community
  return g;
}

std::vector<std::size_t> degree(const DynamicGraph& g, std::size_t t) {
  const Snapshot& snap = g.snapshot(t);
  std::vector<std::size_t> deg(g.num_nodes);
  for (std::size_t v = 0; v < g.num_nodes; ++v) deg[v] = snap.adjacency[v].size();
  return deg;
}

std::vector<double> degree_increment_series(const DynamicGraph& g) {
  if (g.num_steps < 2)
    throw ConfigError("degree_increment_series: needs at least 2 steps");
  std::vector<double> series;
  series.reserve(g.num_steps - 1);
  std::vector<std::size_t> prev = degree(g, 1);
  for (std::size_t t = 2; t <= g.num_steps; ++t) {
    std::vector<std::size_t> cur = degree(g, t);
    std::size_t increase = 0, total = 0;
    for (std::size_t v = 0; v < g.num_nodes; ++v) {
      if (cur[v] > prev[v]) increase += cur[v] - prev[v];
      total += cur[v];
    }
    series.push_back(total == 0 ? 0.0
                                : static_cast<double>(increase) / static_cast<double>(total));
    prev = std::move(cur);
  }
  return series;
}

}  // namespace signn::graph
