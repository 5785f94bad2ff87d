#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "mlgb/graph.hpp"

namespace mlgb {

struct SplitRatios {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
  friend bool operator==(const SplitRatios&, const SplitRatios&) = default;
};

struct DataSplit {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
  std::uint64_t seed = 0;
  SplitRatios ratios;

  friend bool operator==(const DataSplit&, const DataSplit&) = default;
};

/// Random permutation split. Val and test receive floor(r * n) nodes each;
/// the remainder goes to train. Throws DataError when ratios are not positive,
/// do not sum to 1 within 1e-9, or n == 0.
DataSplit make_splits(std::size_t num_nodes, SplitRatios ratios, std::uint64_t seed);
inline DataSplit make_splits(const MultiLabelGraph& g, SplitRatios ratios, std::uint64_t seed) {
  return make_splits(g.num_nodes(), ratios, seed);
}

/// Checks the partition invariant against n; throws DataError if violated.
void validate_split(const DataSplit& s, std::size_t num_nodes);

/// splits/<seed>.json: {"train": [...], "val": [...], "test": [...]}
void save_split(const DataSplit& s, const std::filesystem::path& file);
DataSplit load_split(const std::filesystem::path& file, std::size_t num_nodes);

/// Loads <dataset>/splits/<seed>.json if present, otherwise builds the default
/// 60/20/20 split for that seed.
DataSplit split_for_seed(const std::filesystem::path& dataset_dir, std::size_t num_nodes, std::uint64_t seed);

}  // namespace mlgb
