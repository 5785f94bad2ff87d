#pragma once

// Shared helpers for the test binaries: small random instances built with
// std::mt19937 (independent of the library RNG) and brute-force reference
// implementations used as oracles.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mlgb/graph.hpp"
#include "mlgb/metrics.hpp"

namespace testing {

using mlgb::DenseMatrix;
using mlgb::MultiLabelGraph;

/// Erdos-Renyi graph with independent label memberships and Gaussian features.
MultiLabelGraph random_graph(std::size_t n, std::size_t num_labels, double edge_p, double label_p,
                             std::size_t num_features, std::uint32_t seed);

/// Random prediction set with scores rounded to `levels` distinct values when
/// levels > 0 (to force ties).
mlgb::PredictionSet random_predictions(std::size_t rows, std::size_t labels, std::uint32_t seed, int levels = 0);

double brute_homophily(const MultiLabelGraph& g);
DenseMatrix brute_ccns(const MultiLabelGraph& g);
double brute_clustering(const MultiLabelGraph& g);

double brute_micro_f1(const mlgb::PredictionSet& p, double threshold = 0.5);
double brute_macro_f1(const mlgb::PredictionSet& p, double threshold = 0.5);
/// Pairwise-comparison AUROC averaged over labels with both classes.
double brute_macro_auroc(const mlgb::PredictionSet& p);
/// Precision-at-each-positive AP with index tie-break, over labels with positives.
double brute_macro_ap(const mlgb::PredictionSet& p);

double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& file);

/// Runs a shell command, returning its exit status.
int run(const std::string& command);

}  // namespace testing
