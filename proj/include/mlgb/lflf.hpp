#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mlgb/graph.hpp"
#include "mlgb/numerics.hpp"
#include "mlgb/splits.hpp"

namespace mlgb {

enum class Aggregation { kGcn, kSageMean };

struct LflfConfig {
  std::size_t num_layers = 2;
  std::size_t hidden_dim = 256;
  std::size_t attention_dim = 32;
  double learning_rate = 0.01;
  double weight_decay = 5e-4;
  int patience = 100;
  int max_epochs = 1000;
  std::size_t pos_samples = 20;
  std::size_t neg_samples = 60;
  Aggregation aggregation = Aggregation::kGcn;
  std::vector<std::size_t> sage_fanout{25, 10};
  /// Rebuild the label correlation from L_k at every layer instead of reusing
  /// the layer-0 operator.
  bool update_label_correlation = false;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Edge-supported label correlation: raw[u][v] = L0[u] . L0[v] for (u, v) in E,
/// and normalized = D^{-1/2} (raw + I) D^{-1/2}.
struct LabelCorrelation {
  SparseSym raw;
  SparseSym normalized;
};

LabelCorrelation label_correlation(const MultiLabelGraph& g, const DenseMatrix& label_rows);

/// Layer-0 label input: ground truth for train nodes, 1/|L| for every other
/// node. Only rows of train nodes are read from the graph.
DenseMatrix initial_label_matrix(const MultiLabelGraph& g, const DataSplit& split);

struct LabelInputs {
  DenseMatrix l0;
  LabelCorrelation correlation;
};
LabelInputs build_label_inputs(const MultiLabelGraph& g, const DataSplit& split);

/// Row-stochastic neighbor-mean operator: row i averages up to `fanout`
/// neighbors of i drawn without replacement (all neighbors when the degree is
/// at most `fanout`). Isolated nodes get an empty row.
SparseSym sample_mean_aggregator(const MultiLabelGraph& g, std::size_t fanout, std::uint64_t seed,
                                 std::uint32_t epoch, std::uint32_t layer);

/// Attention fusion for one layer. c_x = W2 tanh(W1 x + b1), c_y likewise;
/// (beta, gamma) = softmax(c_x, c_y); Z = ReLU(beta x + gamma y).
struct FusionResult {
  DenseMatrix z;
  Vector beta;
  Vector gamma;
};
FusionResult fuse(const DenseMatrix& x, const DenseMatrix& y, const DenseMatrix& w1, const DenseMatrix& b1,
                  const DenseMatrix& w2);

/// Sigmoid(Z theta).
DenseMatrix intermediate_predict(const DenseMatrix& z, const DenseMatrix& theta);

/// Positive and negative pairs for the reconstruction loss.
struct LossSamples {
  struct Pair {
    NodeId u, v;
    double weight;
  };
  std::vector<Pair> positives;
  std::vector<Pair> negatives;
};

/// For every node with at least one neighbor: pos_samples neighbors (with
/// replacement only when the degree is smaller) and neg_samples negatives drawn
/// uniformly from non-neighbors. Weights make the loss the mean over positive
/// pairs of [-log s(z_u.z_v) - (1/Q) sum log s(-z_u.z_n)]. Throws DataError on an
/// edgeless graph.
LossSamples sample_loss_pairs(const MultiLabelGraph& g, std::size_t pos_samples, std::size_t neg_samples,
                              std::uint64_t seed, std::uint32_t epoch);

/// Weighted negative-sampling loss; writes dL/dZ into grad when given.
double reconstruction_loss(const DenseMatrix& z, const LossSamples& samples, DenseMatrix* grad = nullptr);

/// Convenience overload sampling with epoch 0.
double reconstruction_loss(const DenseMatrix& z, const MultiLabelGraph& g, std::size_t pos_samples,
                           std::size_t neg_samples, std::uint64_t seed);

/// Layer-wise feature/label fusion network.
class LflfModel {
 public:
  LflfModel(LflfConfig cfg, std::size_t num_features, std::size_t num_labels);

  const LflfConfig& config() const noexcept { return cfg_; }
  ParamSet& params() noexcept { return params_; }
  const ParamSet& params() const noexcept { return params_; }

  /// Per-layer intermediate values of one forward pass.
  struct LayerState {
    DenseMatrix input;        ///< H_k (features for k = 0, Z_{k-1} afterwards)
    DenseMatrix aggregated;   ///< A H_k, or [H_k | M H_k] for the sampled variant
    DenseMatrix x;            ///< feature representation X_k
    DenseMatrix label_in;     ///< L_k
    SparseSym label_op;       ///< normalized label correlation used at this layer
    DenseMatrix label_agg;    ///< label_op * L_k
    DenseMatrix y;            ///< label representation Y_k
    DenseMatrix tx, ty;       ///< tanh(W1 x + b1), tanh(W1 y + b1)
    Vector beta, gamma;
    DenseMatrix pre;          ///< beta x + gamma y
    DenseMatrix z;            ///< ReLU(pre)
    DenseMatrix label_out;    ///< sigmoid(Z theta), absent for the last layer
    SparseSym sampler;        ///< sampled-mean operator (sage variant)
  };

  struct Context {
    const MultiLabelGraph* graph = nullptr;
    SparseSym feature_op;        ///< normalized adjacency (gcn variant)
    LabelInputs labels;
    std::vector<SparseSym> samplers;  ///< per layer (sage variant)
  };

  /// Builds propagation operators and layer-0 label inputs for a graph/split.
  Context make_context(const MultiLabelGraph& g, const DataSplit& split) const;

  /// Resamples the per-layer neighbor samplers (no-op for gcn).
  void resample(Context& ctx, std::uint32_t epoch) const;

  std::vector<LayerState> forward(const Context& ctx) const;

  /// Accumulates parameter gradients given dLoss/dZ of the last layer.
  void backward(const Context& ctx, const std::vector<LayerState>& states, const DenseMatrix& dz_last);

  /// Loss and (optionally) gradients for fixed samples.
  double loss(const Context& ctx, const LossSamples& samples, bool want_grad);

 private:
  struct LayerParams {
    std::size_t feature_w, label_w, att_w1, att_b1, att_w2;
    std::optional<std::size_t> theta;
  };

  LflfConfig cfg_;
  std::size_t num_labels_;
  ParamSet params_;
  std::vector<LayerParams> layers_;
};

struct TrainResult {
  std::vector<double> loss_history;
  int best_epoch = 0;
  int epochs_run = 0;
  DenseMatrix embedding;            ///< final-layer Z for all nodes
  std::vector<double> mean_beta;    ///< node-mean of beta per layer
  std::vector<double> mean_gamma;
};

/// Adam on the reconstruction loss with early stopping on the training loss;
/// restores the best-loss parameters and computes the embedding. Throws
/// DivergenceError on a non-finite loss.
TrainResult train_lflf(LflfModel& model, const MultiLabelGraph& g, const DataSplit& split);

/// Final-layer representation with label inputs rebuilt from train labels only.
/// Uses a fixed sampler draw for the sampled variant.
DenseMatrix embed(const LflfModel& model, const MultiLabelGraph& g, const DataSplit& split,
                  std::vector<double>* mean_beta = nullptr, std::vector<double>* mean_gamma = nullptr);

}  // namespace mlgb
