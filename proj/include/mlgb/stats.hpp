#pragma once

#include <optional>
#include <span>

#include <json.hpp>

#include "mlgb/graph.hpp"

namespace mlgb {

struct DatasetStats {
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;
  std::size_t num_features = 0;
  std::size_t num_labels = 0;
  double clustering_coefficient = 0.0;
  std::optional<double> label_homophily;  ///< empty for edgeless graphs
  double label_count_median = 0.0;
  double label_count_mean = 0.0;
  double label_count_max = 0.0;
  double label_count_p25 = 0.0;
  double label_count_p50 = 0.0;
  double label_count_p75 = 0.0;
  double unlabeled_fraction = 0.0;
};

/// Mean local clustering coefficient; nodes with degree < 2 contribute 0.
double clustering_coefficient(const MultiLabelGraph& g);

/// Nearest-rank percentile of an ascending-sorted sample (0 for empty input).
double nearest_rank(std::span<const double> sorted, double percent);

DatasetStats dataset_stats(const MultiLabelGraph& g);

nlohmann::json to_json(const DatasetStats& s);

}  // namespace mlgb
