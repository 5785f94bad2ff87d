#include "mlgb/lflf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "mlgb/error.hpp"
#include "mlgb/random.hpp"

namespace mlgb {

namespace {

constexpr std::uint32_t kEmbedEpoch = 0xFFFFFFFFu;

DenseMatrix sigmoid_matrix(const DenseMatrix& logits) {
  return logits.unaryExpr([](double v) { return sigmoid(v); });
}

/// Normalized correlation operator built from arbitrary label rows.
SparseSym correlation_operator(const MultiLabelGraph& g, const DenseMatrix& rows, SparseSym* raw_out = nullptr) {
  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> t;
  t.reserve(2 * g.num_edges());
  for (const auto& [u, v] : g.edges()) {
    const double c = rows.row(u).dot(rows.row(v));
    t.emplace_back(u, v, c);
    t.emplace_back(v, u, c);
  }
  SparseSym raw = SparseSym::from_triplets(g.num_nodes(), std::move(t));
  SparseSym norm = sym_normalize(raw, true);
  if (raw_out) *raw_out = std::move(raw);
  return norm;
}

/// Gradient of LP = N(L) L with respect to L through the operator N(L) only
/// (the operand part is handled by the caller). N = D^{-1/2}(M)D^{-1/2},
/// M = raw(L) + I, raw_ij = L_i . L_j on edges.
void correlation_operator_backward(const SparseSym& op, const DenseMatrix& l_in, const DenseMatrix& d_lp,
                                   DenseMatrix& d_l) {
  const std::size_t n = op.n;
  // Recover s_i = d_i^{-1/2}: N_ii = M_ii s_i^2 = s_i^2 since M_ii = 1.
  std::vector<double> s(n), g_sum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) s[i] = std::sqrt(op.at(i, i));

  std::vector<double> d_op(op.nnz());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k) {
      const std::size_t j = op.col[k];
      d_op[k] = d_lp.row(static_cast<Eigen::Index>(i)).dot(l_in.row(static_cast<Eigen::Index>(j)));
      const double contrib = d_op[k] * op.val[k];
      g_sum[i] += contrib;
      g_sum[j] += contrib;
    }
  // dd_i = -0.5 s_i^3 ds_i with ds_i = g_sum_i / s_i.
  std::vector<double> d_deg(n);
  for (std::size_t i = 0; i < n; ++i) d_deg[i] = -0.5 * s[i] * s[i] * g_sum[i];

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k) {
      const std::size_t j = op.col[k];
      if (i == j) continue;
      const double d_m = d_op[k] * s[i] * s[j] + d_deg[i];
      d_l.row(static_cast<Eigen::Index>(i)) += d_m * l_in.row(static_cast<Eigen::Index>(j));
      d_l.row(static_cast<Eigen::Index>(j)) += d_m * l_in.row(static_cast<Eigen::Index>(i));
    }
}

}  // namespace

void LflfConfig::validate() const {
  if (num_layers < 1) throw DataError("lflf: num_layers must be >= 1");
  if (hidden_dim < 1 || attention_dim < 1) throw DataError("lflf: hidden_dim and attention_dim must be >= 1");
  if (neg_samples < 1 || pos_samples < 1) throw DataError("lflf: pos_samples and neg_samples must be >= 1");
  if (!(learning_rate > 0.0)) throw DataError("lflf: learning_rate must be > 0");
  if (!(weight_decay >= 0.0)) throw DataError("lflf: weight_decay must be >= 0");
  if (patience < 1 || max_epochs < 1) throw DataError("lflf: patience and max_epochs must be >= 1");
  if (aggregation == Aggregation::kSageMean && sage_fanout.size() != num_layers)
    throw DataError("lflf: sage_fanout needs one entry per layer");
}

DenseMatrix initial_label_matrix(const MultiLabelGraph& g, const DataSplit& split) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  const auto c = static_cast<Eigen::Index>(g.num_labels());
  DenseMatrix l0 = DenseMatrix::Constant(n, c, c > 0 ? 1.0 / static_cast<double>(c) : 0.0);
  for (const NodeId v : split.train) {
    l0.row(v).setZero();
    for (const LabelId l : g.labels_of(v)) l0(v, l) = 1.0;
  }
  return l0;
}

LabelCorrelation label_correlation(const MultiLabelGraph& g, const DenseMatrix& label_rows) {
  LabelCorrelation lc;
  lc.normalized = correlation_operator(g, label_rows, &lc.raw);
  return lc;
}

LabelInputs build_label_inputs(const MultiLabelGraph& g, const DataSplit& split) {
  LabelInputs in;
  in.l0 = initial_label_matrix(g, split);
  in.correlation = label_correlation(g, in.l0);
  return in;
}

SparseSym sample_mean_aggregator(const MultiLabelGraph& g, std::size_t fanout, std::uint64_t seed,
                                 std::uint32_t epoch, std::uint32_t layer) {
  RandomStream rng(seed, StreamTag::kNeighborSample, epoch, layer);
  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> t;
  std::vector<NodeId> scratch;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    const auto nb = g.neighbors(i);
    if (nb.empty()) continue;
    if (nb.size() <= fanout) {
      const double w = 1.0 / static_cast<double>(nb.size());
      for (const NodeId j : nb) t.emplace_back(i, j, w);
      continue;
    }
    scratch.assign(nb.begin(), nb.end());
    for (std::size_t k = 0; k < fanout; ++k) {
      const auto pick = k + static_cast<std::size_t>(rng.below(scratch.size() - k));
      std::swap(scratch[k], scratch[pick]);
      t.emplace_back(i, scratch[k], 1.0 / static_cast<double>(fanout));
    }
  }
  return SparseSym::from_triplets(g.num_nodes(), std::move(t));
}

FusionResult fuse(const DenseMatrix& x, const DenseMatrix& y, const DenseMatrix& w1, const DenseMatrix& b1,
                  const DenseMatrix& w2) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw std::invalid_argument("fuse: shape mismatch");
  const DenseMatrix tx = ((x * w1).rowwise() + b1.row(0)).array().tanh();
  const DenseMatrix ty = ((y * w1).rowwise() + b1.row(0)).array().tanh();
  const Vector cx = tx * w2;
  const Vector cy = ty * w2;
  FusionResult r;
  r.beta.resize(x.rows());
  r.gamma.resize(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    r.beta(i) = sigmoid(cx(i) - cy(i));
    r.gamma(i) = 1.0 - r.beta(i);
  }
  r.z = (r.beta.asDiagonal() * x + r.gamma.asDiagonal() * y).cwiseMax(0.0);
  return r;
}

DenseMatrix intermediate_predict(const DenseMatrix& z, const DenseMatrix& theta) {
  if (z.cols() != theta.rows()) throw std::invalid_argument("intermediate_predict: shape mismatch");
  return sigmoid_matrix(z * theta);
}

LossSamples sample_loss_pairs(const MultiLabelGraph& g, std::size_t pos_samples, std::size_t neg_samples,
                              std::uint64_t seed, std::uint32_t epoch) {
  if (g.num_edges() == 0) throw DataError("reconstruction loss is undefined for a graph without edges");
  const std::size_t n = g.num_nodes();
  RandomStream rng(seed, StreamTag::kLossSample, epoch);

  LossSamples s;
  struct NodeNegatives {
    NodeId u;
    std::size_t begin, end;
  };
  std::vector<NodeNegatives> negatives_of;
  std::vector<NodeId> pool;
  for (NodeId u = 0; u < n; ++u) {
    const auto nb = g.neighbors(u);
    if (nb.empty()) continue;
    if (nb.size() >= pos_samples) {
      pool.assign(nb.begin(), nb.end());
      for (std::size_t k = 0; k < pos_samples; ++k) {
        const auto pick = k + static_cast<std::size_t>(rng.below(pool.size() - k));
        std::swap(pool[k], pool[pick]);
        s.positives.push_back({u, pool[k], 1.0});
      }
    } else {
      for (std::size_t k = 0; k < pos_samples; ++k)
        s.positives.push_back({u, nb[static_cast<std::size_t>(rng.below(nb.size()))], 1.0});
    }

    const std::size_t free = n - 1 - nb.size();
    const std::size_t begin = s.negatives.size();
    if (free > 0) {
      if (4 * free >= n) {
        for (std::size_t k = 0; k < neg_samples; ++k) {
          NodeId v;
          do {
            v = static_cast<NodeId>(rng.below(n));
          } while (v == u || std::binary_search(nb.begin(), nb.end(), v));
          s.negatives.push_back({u, v, 1.0});
        }
      } else {
        pool.clear();
        for (NodeId v = 0; v < n; ++v)
          if (v != u && !std::binary_search(nb.begin(), nb.end(), v)) pool.push_back(v);
        for (std::size_t k = 0; k < neg_samples; ++k)
          s.negatives.push_back({u, pool[static_cast<std::size_t>(rng.below(pool.size()))], 1.0});
      }
    }
    negatives_of.push_back({u, begin, s.negatives.size()});
  }

  const double total_pairs = static_cast<double>(s.positives.size());
  for (auto& p : s.positives) p.weight = 1.0 / total_pairs;
  for (const auto& nn : negatives_of) {
    const std::size_t q = nn.end - nn.begin;
    if (q == 0) continue;
    const double w = static_cast<double>(pos_samples) / (total_pairs * static_cast<double>(q));
    for (std::size_t k = nn.begin; k < nn.end; ++k) s.negatives[k].weight = w;
  }
  return s;
}

double reconstruction_loss(const DenseMatrix& z, const LossSamples& samples, DenseMatrix* grad) {
  if (grad) *grad = DenseMatrix::Zero(z.rows(), z.cols());
  double loss = 0.0;
  for (const auto& p : samples.positives) {
    const double score = z.row(p.u).dot(z.row(p.v));
    loss += p.weight * softplus(-score);
    if (grad) {
      const double coeff = -p.weight * sigmoid(-score);
      grad->row(p.u) += coeff * z.row(p.v);
      grad->row(p.v) += coeff * z.row(p.u);
    }
  }
  for (const auto& p : samples.negatives) {
    const double score = z.row(p.u).dot(z.row(p.v));
    loss += p.weight * softplus(score);
    if (grad) {
      const double coeff = p.weight * sigmoid(score);
      grad->row(p.u) += coeff * z.row(p.v);
      grad->row(p.v) += coeff * z.row(p.u);
    }
  }
  return loss;
}

double reconstruction_loss(const DenseMatrix& z, const MultiLabelGraph& g, std::size_t pos_samples,
                           std::size_t neg_samples, std::uint64_t seed) {
  return reconstruction_loss(z, sample_loss_pairs(g, pos_samples, neg_samples, seed, 0));
}

LflfModel::LflfModel(LflfConfig cfg, std::size_t num_features, std::size_t num_labels)
    : cfg_(std::move(cfg)), num_labels_(num_labels) {
  cfg_.validate();
  const std::size_t h = cfg_.hidden_dim;
  const std::size_t a = cfg_.attention_dim;
  std::uint32_t stream = 0;
  auto glorot = [&](std::size_t r, std::size_t c) { return glorot_uniform(r, c, cfg_.seed, stream++); };
  for (std::size_t k = 0; k < cfg_.num_layers; ++k) {
    const std::size_t d_in = k == 0 ? num_features : h;
    const std::size_t agg_in = cfg_.aggregation == Aggregation::kSageMean ? 2 * d_in : d_in;
    const std::string prefix = "layer" + std::to_string(k) + ".";
    LayerParams lp{};
    lp.feature_w = params_.add(prefix + "feature_w", glorot(agg_in, h));
    lp.label_w = params_.add(prefix + "label_w", glorot(num_labels, h));
    lp.att_w1 = params_.add(prefix + "att_w1", glorot(h, a));
    lp.att_b1 = params_.add(prefix + "att_b1", DenseMatrix::Zero(1, static_cast<Eigen::Index>(a)));
    lp.att_w2 = params_.add(prefix + "att_w2", glorot(a, 1));
    if (k + 1 < cfg_.num_layers) lp.theta = params_.add(prefix + "theta", glorot(h, num_labels));
    layers_.push_back(lp);
  }
}

LflfModel::Context LflfModel::make_context(const MultiLabelGraph& g, const DataSplit& split) const {
  if (g.num_labels() != num_labels_) throw DataError("lflf: label count differs from the model");
  Context ctx;
  ctx.graph = &g;
  if (cfg_.aggregation == Aggregation::kGcn) ctx.feature_op = sym_normalize(g.adjacency(), true);
  ctx.labels = build_label_inputs(g, split);
  return ctx;
}

void LflfModel::resample(Context& ctx, std::uint32_t epoch) const {
  if (cfg_.aggregation != Aggregation::kSageMean) return;
  ctx.samplers.clear();
  for (std::size_t k = 0; k < cfg_.num_layers; ++k)
    ctx.samplers.push_back(
        sample_mean_aggregator(*ctx.graph, cfg_.sage_fanout[k], cfg_.seed, epoch, static_cast<std::uint32_t>(k)));
}

std::vector<LflfModel::LayerState> LflfModel::forward(const Context& ctx) const {
  const bool sage = cfg_.aggregation == Aggregation::kSageMean;
  if (sage && ctx.samplers.size() != cfg_.num_layers) throw std::logic_error("lflf: samplers not drawn");
  std::vector<LayerState> states(cfg_.num_layers);
  for (std::size_t k = 0; k < cfg_.num_layers; ++k) {
    auto& st = states[k];
    const auto& lp = layers_[k];
    st.input = k == 0 ? ctx.graph->features() : states[k - 1].z;
    if (sage) {
      st.sampler = ctx.samplers[k];
      st.aggregated.resize(st.input.rows(), 2 * st.input.cols());
      st.aggregated << st.input, spmm(st.sampler, st.input);
    } else {
      st.aggregated = spmm(ctx.feature_op, st.input);
    }
    st.x = st.aggregated * params_[lp.feature_w].value;

    st.label_in = k == 0 ? ctx.labels.l0 : states[k - 1].label_out;
    st.label_op = (k > 0 && cfg_.update_label_correlation) ? correlation_operator(*ctx.graph, st.label_in)
                                                           : ctx.labels.correlation.normalized;
    st.label_agg = spmm(st.label_op, st.label_in);
    st.y = st.label_agg * params_[lp.label_w].value;

    const auto& w1 = params_[lp.att_w1].value;
    const auto& b1 = params_[lp.att_b1].value;
    const auto& w2 = params_[lp.att_w2].value;
    st.tx = ((st.x * w1).rowwise() + b1.row(0)).array().tanh();
    st.ty = ((st.y * w1).rowwise() + b1.row(0)).array().tanh();
    const Vector cx = st.tx * w2;
    const Vector cy = st.ty * w2;
    st.beta.resize(cx.size());
    st.gamma.resize(cx.size());
    for (Eigen::Index i = 0; i < cx.size(); ++i) {
      st.beta(i) = sigmoid(cx(i) - cy(i));
      st.gamma(i) = 1.0 - st.beta(i);
    }
    st.pre = st.beta.asDiagonal() * st.x + st.gamma.asDiagonal() * st.y;
    st.z = st.pre.cwiseMax(0.0);
    if (lp.theta) st.label_out = intermediate_predict(st.z, params_[*lp.theta].value);
  }
  return states;
}

void LflfModel::backward(const Context& ctx, const std::vector<LayerState>& states, const DenseMatrix& dz_last) {
  const bool sage = cfg_.aggregation == Aggregation::kSageMean;
  DenseMatrix dz = dz_last;
  DenseMatrix d_label_out;  // gradient w.r.t. this layer's label_out, from layer k + 1
  for (std::size_t kk = cfg_.num_layers; kk-- > 0;) {
    const auto& st = states[kk];
    const auto& lp = layers_[kk];

    if (lp.theta && d_label_out.size() > 0) {
      const DenseMatrix d_logit =
          d_label_out.array() * st.label_out.array() * (1.0 - st.label_out.array());
      params_[*lp.theta].grad.noalias() += st.z.transpose() * d_logit;
      dz.noalias() += d_logit * params_[*lp.theta].value.transpose();
    }

    const DenseMatrix d_pre = (st.pre.array() > 0.0).select(dz.array(), 0.0);
    DenseMatrix dx = st.beta.asDiagonal() * d_pre;
    DenseMatrix dy = st.gamma.asDiagonal() * d_pre;
    const Vector d_beta = (d_pre.cwiseProduct(st.x - st.y)).rowwise().sum();
    const Vector d_cx = d_beta.cwiseProduct(st.beta).cwiseProduct(st.gamma);
    const Vector d_cy = -d_cx;

    const auto& w1 = params_[lp.att_w1].value;
    const auto& w2 = params_[lp.att_w2].value;
    params_[lp.att_w2].grad.noalias() += st.tx.transpose() * d_cx + st.ty.transpose() * d_cy;
    const DenseMatrix d_ax = (d_cx * w2.transpose()).array() * (1.0 - st.tx.array().square());
    const DenseMatrix d_ay = (d_cy * w2.transpose()).array() * (1.0 - st.ty.array().square());
    params_[lp.att_w1].grad.noalias() += st.x.transpose() * d_ax + st.y.transpose() * d_ay;
    params_[lp.att_b1].grad += (d_ax + d_ay).colwise().sum();
    dx.noalias() += d_ax * w1.transpose();
    dy.noalias() += d_ay * w1.transpose();

    // Label path.
    params_[lp.label_w].grad.noalias() += st.label_agg.transpose() * dy;
    if (kk > 0) {
      const DenseMatrix d_lagg = dy * params_[lp.label_w].value.transpose();
      d_label_out = spmm_transposed(st.label_op, d_lagg);
      if (cfg_.update_label_correlation) correlation_operator_backward(st.label_op, st.label_in, d_lagg, d_label_out);
    } else {
      d_label_out.resize(0, 0);
    }

    // Feature path.
    params_[lp.feature_w].grad.noalias() += st.aggregated.transpose() * dx;
    if (kk > 0) {
      const DenseMatrix d_agg = dx * params_[lp.feature_w].value.transpose();
      if (sage) {
        const Eigen::Index d_in = st.input.cols();
        dz = d_agg.leftCols(d_in) + spmm_transposed(st.sampler, d_agg.rightCols(d_in));
      } else {
        dz = spmm_transposed(ctx.feature_op, d_agg);
      }
    }
  }
}

double LflfModel::loss(const Context& ctx, const LossSamples& samples, bool want_grad) {
  const auto states = forward(ctx);
  if (!want_grad) return reconstruction_loss(states.back().z, samples);
  DenseMatrix dz;
  const double value = reconstruction_loss(states.back().z, samples, &dz);
  params_.zero_grad();
  backward(ctx, states, dz);
  return value;
}

DenseMatrix embed(const LflfModel& model, const MultiLabelGraph& g, const DataSplit& split,
                  std::vector<double>* mean_beta, std::vector<double>* mean_gamma) {
  auto ctx = model.make_context(g, split);
  model.resample(ctx, kEmbedEpoch);
  const auto states = model.forward(ctx);
  if (mean_beta) mean_beta->clear();
  if (mean_gamma) mean_gamma->clear();
  for (const auto& st : states) {
    if (mean_beta) mean_beta->push_back(st.beta.size() ? st.beta.mean() : 0.0);
    if (mean_gamma) mean_gamma->push_back(st.gamma.size() ? st.gamma.mean() : 0.0);
  }
  return states.back().z;
}

TrainResult train_lflf(LflfModel& model, const MultiLabelGraph& g, const DataSplit& split) {
  const auto& cfg = model.config();
  auto ctx = model.make_context(g, split);
  Adam adam(cfg.learning_rate, cfg.weight_decay);

  TrainResult result;
  double best = std::numeric_limits<double>::infinity();
  std::vector<DenseMatrix> best_values;
  int since_best = 0;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const auto e = static_cast<std::uint32_t>(epoch);
    model.resample(ctx, e);
    const auto samples = sample_loss_pairs(g, cfg.pos_samples, cfg.neg_samples, cfg.seed, e);
    const double value = model.loss(ctx, samples, true);
    if (!std::isfinite(value))
      throw DivergenceError(epoch, "lflf training diverged at epoch " + std::to_string(epoch));
    result.loss_history.push_back(value);
    result.epochs_run = epoch + 1;
    if (value < best - 1e-6) {
      best = value;
      result.best_epoch = epoch;
      since_best = 0;
      best_values.clear();
      for (const auto& t : model.params()) best_values.push_back(t.value);
    } else if (++since_best >= cfg.patience) {
      break;
    }
    adam.step(model.params());
  }
  for (std::size_t p = 0; p < best_values.size(); ++p) model.params()[p].value = best_values[p];
  result.embedding = embed(model, g, split, &result.mean_beta, &result.mean_gamma);
  return result;
}

}  // namespace mlgb
