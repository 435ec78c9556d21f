#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "signn/graph.hpp"
#include "signn/matrix.hpp"
#include "signn/rng.hpp"

namespace test_helpers {

inline signn::num::Matrix random_matrix(std::size_t r, std::size_t c,
                                        signn::num::Rng& rng, double lo = -1.0,
                                        double hi = 1.0) {
  signn::num::Matrix m(r, c);
  for (double& v : m.data) v = rng.uniform(lo, hi);
  return m;
}

/// Unique temp file seeded with the given contents.
class TempFile {
 public:
  explicit TempFile(const std::string& contents, const std::string& tag = "signn_test") {
    static int counter = 0;
    path_ = (std::filesystem::temp_directory_path() /
             (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".txt"))
                .string();
    std::ofstream out(path_);
    out << contents;
  }
  ~TempFile() { std::filesystem::remove(path_); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Small two-community test graph builder: p_in/p_out per step, optional
/// burst multiplier applied from a given step on.
inline signn::graph::DynamicGraph two_community_graph(std::size_t n, std::size_t T,
                                                      double p_in, double p_out,
                                                      std::uint64_t seed) {
  signn::graph::SbmConfig cfg;
  cfg.n = n;
  cfg.T = T;
  cfg.k_communities = 2;
  cfg.p_in = p_in;
  cfg.p_out = p_out;
  cfg.drift_fraction = 0.0;
  cfg.seed = seed;
  return signn::graph::generate_sbm(cfg);
}

}  // namespace test_helpers
