#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlgb/graph.hpp"
#include "mlgb/numerics.hpp"
#include "mlgb/splits.hpp"

namespace mlgb {

enum class BaselineKind { kMlp, kGcn, kDeepWalk };

struct BaselineConfig {
  BaselineKind kind = BaselineKind::kMlp;
  std::size_t hidden_dim = 256;
  std::size_t num_layers = 2;
  double learning_rate = 0.01;
  double weight_decay = 5e-4;
  int patience = 100;
  int max_epochs = 1000;

  std::size_t num_walks = 10;
  std::size_t walk_length = 10;
  std::size_t window = 5;
  std::size_t embedding_dim = 64;
  std::size_t negatives = 5;
  std::size_t walk_epochs = 5;
  double walk_learning_rate = 0.025;

  std::uint64_t seed = 0;

  void validate() const;
};

/// Feed-forward multi-label classifier: MLP (features only) or GCN
/// (normalized-adjacency propagation before every weight layer). ReLU between
/// layers, sigmoid outputs.
class SupervisedNet {
 public:
  SupervisedNet(BaselineKind kind, const BaselineConfig& cfg, std::size_t num_features, std::size_t num_labels);

  BaselineKind kind() const noexcept { return kind_; }
  ParamSet& params() noexcept { return params_; }
  const ParamSet& params() const noexcept { return params_; }

  /// Operator used by the GCN variant (identity for MLP).
  SparseSym propagation(const MultiLabelGraph& g) const;

  DenseMatrix logits(const MultiLabelGraph& g, const SparseSym& op) const;
  DenseMatrix predict(const MultiLabelGraph& g) const;

  /// Mean per-cell binary cross-entropy over `rows`; fills gradients if asked.
  double bce_loss(const MultiLabelGraph& g, const SparseSym& op, const DenseMatrix& truth,
                  const std::vector<NodeId>& rows, bool want_grad);

 private:
  BaselineKind kind_;
  std::size_t num_layers_;
  ParamSet params_;
};

struct SupervisedResult {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  int best_epoch = 0;
  DenseMatrix scores;  ///< sigmoid outputs for all nodes, best-validation parameters
};

/// Adam on train-node BCE; early stopping on validation BCE with the given
/// patience, restoring the best-validation parameters.
SupervisedResult train_supervised(SupervisedNet& net, const MultiLabelGraph& g, const DataSplit& split,
                                  const BaselineConfig& cfg);

SupervisedResult train_mlp(const MultiLabelGraph& g, const DataSplit& split, const BaselineConfig& cfg);
SupervisedResult train_gcn(const MultiLabelGraph& g, const DataSplit& split, const BaselineConfig& cfg);

/// Uniform random walks: num_walks rounds over every start node. Walks from
/// isolated nodes have length 1.
std::vector<std::vector<NodeId>> random_walks(const MultiLabelGraph& g, std::size_t num_walks,
                                              std::size_t walk_length, std::uint64_t seed);

/// (center, context) pairs with 0 < |i - j| <= window.
std::vector<std::pair<NodeId, NodeId>> skipgram_pairs(const std::vector<NodeId>& walk, std::size_t window);

/// DeepWalk: skip-gram with negative sampling (unigram^0.75 noise) over
/// random walks. Returns n x embedding_dim. Reads only the graph structure.
DenseMatrix deepwalk_embed(const MultiLabelGraph& g, const BaselineConfig& cfg);

}  // namespace mlgb
