#include <cmath>
#include <limits>

#include "mlgb/baselines.hpp"
#include "mlgb/error.hpp"

namespace mlgb {

void BaselineConfig::validate() const {
  if (hidden_dim < 1 || num_layers < 1) throw DataError("baseline: hidden_dim and num_layers must be >= 1");
  if (!(learning_rate > 0.0) || !(weight_decay >= 0.0)) throw DataError("baseline: bad learning_rate/weight_decay");
  if (patience < 1 || max_epochs < 1) throw DataError("baseline: patience and max_epochs must be >= 1");
  if (num_walks < 1 || walk_length < 1 || window < 1 || embedding_dim < 1 || negatives < 1 || walk_epochs < 1)
    throw DataError("baseline: deepwalk counts must be >= 1");
  if (!(walk_learning_rate > 0.0)) throw DataError("baseline: walk_learning_rate must be > 0");
}

SupervisedNet::SupervisedNet(BaselineKind kind, const BaselineConfig& cfg, std::size_t num_features,
                             std::size_t num_labels)
    : kind_(kind), num_layers_(cfg.num_layers) {
  cfg.validate();
  if (kind == BaselineKind::kDeepWalk) throw std::invalid_argument("SupervisedNet: deepwalk is not supervised");
  if (num_features == 0) throw DataError("baseline: graph has no feature columns");
  std::size_t d_in = num_features;
  for (std::size_t l = 0; l < num_layers_; ++l) {
    const std::size_t d_out = l + 1 == num_layers_ ? num_labels : cfg.hidden_dim;
    params_.add("layer" + std::to_string(l) + ".w", glorot_uniform(d_in, d_out, cfg.seed, static_cast<std::uint32_t>(l)));
    params_.add("layer" + std::to_string(l) + ".b", DenseMatrix::Zero(1, static_cast<Eigen::Index>(d_out)));
    d_in = d_out;
  }
}

SparseSym SupervisedNet::propagation(const MultiLabelGraph& g) const {
  if (kind_ == BaselineKind::kGcn) return sym_normalize(g.adjacency(), true);
  return SparseSym::identity(g.num_nodes());
}

namespace {

struct ForwardCache {
  std::vector<DenseMatrix> agg;  // op * H_l
  std::vector<DenseMatrix> pre;  // agg W + b
};

DenseMatrix run_forward(const ParamSet& params, std::size_t layers, BaselineKind kind, const DenseMatrix& x,
                        const SparseSym& op, ForwardCache* cache) {
  DenseMatrix h = x;
  for (std::size_t l = 0; l < layers; ++l) {
    DenseMatrix agg = kind == BaselineKind::kGcn ? spmm(op, h) : h;
    DenseMatrix pre = (agg * params[2 * l].value).rowwise() + params[2 * l + 1].value.row(0);
    h = l + 1 == layers ? pre : DenseMatrix(pre.cwiseMax(0.0));
    if (cache) {
      cache->agg.push_back(std::move(agg));
      cache->pre.push_back(std::move(pre));
    }
  }
  return h;
}

}  // namespace

DenseMatrix SupervisedNet::logits(const MultiLabelGraph& g, const SparseSym& op) const {
  return run_forward(params_, num_layers_, kind_, g.features(), op, nullptr);
}

DenseMatrix SupervisedNet::predict(const MultiLabelGraph& g) const {
  return logits(g, propagation(g)).unaryExpr([](double v) { return sigmoid(v); });
}

double SupervisedNet::bce_loss(const MultiLabelGraph& g, const SparseSym& op, const DenseMatrix& truth,
                               const std::vector<NodeId>& rows, bool want_grad) {
  ForwardCache cache;
  const DenseMatrix z = run_forward(params_, num_layers_, kind_, g.features(), op, want_grad ? &cache : nullptr);
  const double scale = 1.0 / (static_cast<double>(rows.size()) * static_cast<double>(z.cols()));
  double loss = 0.0;
  DenseMatrix dz;
  if (want_grad) dz = DenseMatrix::Zero(z.rows(), z.cols());
  for (const NodeId i : rows)
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
      const double v = z(i, c);
      loss += softplus(v) - truth(i, c) * v;
      if (want_grad) dz(i, c) = (sigmoid(v) - truth(i, c)) * scale;
    }
  loss *= scale;
  if (!want_grad) return loss;

  params_.zero_grad();
  DenseMatrix d_pre = std::move(dz);
  for (std::size_t l = num_layers_; l-- > 0;) {
    params_[2 * l].grad.noalias() = cache.agg[l].transpose() * d_pre;
    params_[2 * l + 1].grad = d_pre.colwise().sum();
    if (l == 0) break;
    DenseMatrix d_agg = d_pre * params_[2 * l].value.transpose();
    DenseMatrix d_h = kind_ == BaselineKind::kGcn ? spmm_transposed(op, d_agg) : d_agg;
    d_pre = (cache.pre[l - 1].array() > 0.0).select(d_h.array(), 0.0);
  }
  return loss;
}

SupervisedResult train_supervised(SupervisedNet& net, const MultiLabelGraph& g, const DataSplit& split,
                                  const BaselineConfig& cfg) {
  const SparseSym op = net.propagation(g);
  DenseMatrix truth = DenseMatrix::Zero(static_cast<Eigen::Index>(g.num_nodes()),
                                        static_cast<Eigen::Index>(g.num_labels()));
  // Validation labels steer early stopping only; test rows stay zero.
  for (const auto* part : {&split.train, &split.val})
    for (const NodeId v : *part)
      for (const LabelId l : g.labels_of(v)) truth(v, l) = 1.0;

  Adam adam(cfg.learning_rate, cfg.weight_decay);
  SupervisedResult result;
  double best = std::numeric_limits<double>::infinity();
  std::vector<DenseMatrix> best_values;
  int since_best = 0;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const double train_loss = net.bce_loss(g, op, truth, split.train, true);
    if (!std::isfinite(train_loss))
      throw DivergenceError(epoch, "supervised training diverged at epoch " + std::to_string(epoch));
    const double val_loss = split.val.empty() ? train_loss : net.bce_loss(g, op, truth, split.val, false);
    result.train_loss.push_back(train_loss);
    result.val_loss.push_back(val_loss);
    if (val_loss < best - 1e-6) {
      best = val_loss;
      result.best_epoch = epoch;
      since_best = 0;
      best_values.clear();
      for (const auto& t : net.params()) best_values.push_back(t.value);
    } else if (++since_best >= cfg.patience) {
      break;
    }
    adam.step(net.params());
  }
  for (std::size_t p = 0; p < best_values.size(); ++p) net.params()[p].value = best_values[p];
  result.scores = net.predict(g);
  return result;
}

SupervisedResult train_mlp(const MultiLabelGraph& g, const DataSplit& split, const BaselineConfig& cfg) {
  SupervisedNet net(BaselineKind::kMlp, cfg, g.num_features(), g.num_labels());
  return train_supervised(net, g, split, cfg);
}

SupervisedResult train_gcn(const MultiLabelGraph& g, const DataSplit& split, const BaselineConfig& cfg) {
  SupervisedNet net(BaselineKind::kGcn, cfg, g.num_features(), g.num_labels());
  return train_supervised(net, g, split, cfg);
}

}  // namespace mlgb
