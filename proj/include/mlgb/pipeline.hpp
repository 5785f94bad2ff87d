#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mlgb/config.hpp"
#include "mlgb/graph.hpp"
#include "mlgb/metrics.hpp"
#include "mlgb/model_io.hpp"
#include "mlgb/splits.hpp"

namespace mlgb {

/// Output of training one model on one graph/split.
struct ModelRun {
  std::string model;
  std::uint64_t split_seed = 0;
  std::size_t num_nodes = 0;
  std::string config_echo;
  std::vector<NamedMatrix> params;
  /// Header plus one row per epoch, tab-separated.
  std::string train_log;
  /// Node embedding (lflf-*, deepwalk) or label scores (mlp, gcn).
  DenseMatrix output;
  bool output_is_scores = false;
  std::vector<double> mean_beta, mean_gamma;  ///< lflf only
};

/// Trains `model` with the given config entries applied, then `seed`.
ModelRun run_model(const std::string& model, const MultiLabelGraph& g, const DataSplit& split,
                   const std::vector<ConfigEntry>& overrides, std::uint64_t seed,
                   const std::filesystem::path& source = "<config>");

/// Test-split metrics; embeddings go through the logistic readout.
PredictionSet predictions_for(const ModelRun& run, const MultiLabelGraph& g, const DataSplit& split,
                              double readout_l2 = 1.0);

/// Model directory: config.txt, params.bin, embedding.bin or scores.bin,
/// train_log.tsv.
void save_model_dir(const ModelRun& run, const std::filesystem::path& dir);
ModelRun load_model_dir(const std::filesystem::path& dir);

}  // namespace mlgb
