#include "mlgb/readout.hpp"

#include <cmath>
#include <stdexcept>

namespace mlgb {

namespace {

// Tiny ridge on the intercept keeps the Hessian invertible when every
// training row saturates; its effect on the solution is far below tolerance.
constexpr double kBiasRidge = 1e-10;

Eigen::VectorXd margins(const DenseMatrix& x, const LogisticModel& m) {
  Eigen::VectorXd z = x * m.w;
  z.array() += m.bias;
  return z;
}

double log1pexp(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

}  // namespace

double LogisticModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return sigmoid(w.dot(x) + bias);
}

double logistic_objective(const DenseMatrix& x, const Eigen::VectorXd& y, double l2, const LogisticModel& m) {
  const Eigen::VectorXd z = margins(x, m);
  double f = 0.5 * l2 * m.w.squaredNorm() + 0.5 * kBiasRidge * m.bias * m.bias;
  for (Eigen::Index i = 0; i < z.size(); ++i) f += log1pexp(y(i) > 0.5 ? -z(i) : z(i));
  return f;
}

LogisticModel fit_logistic(const DenseMatrix& x, const Eigen::VectorXd& y, double l2,
                           const std::optional<LogisticModel>& init, double tol, int max_iter) {
  if (x.rows() != y.size()) throw std::invalid_argument("fit_logistic: row count mismatch");
  if (!x.allFinite()) throw std::invalid_argument("fit_logistic: non-finite input");
  if (l2 <= 0.0) throw std::invalid_argument("fit_logistic: l2 must be positive");
  const Eigen::Index d = x.cols();
  LogisticModel m;
  if (init) {
    if (init->w.size() != d) throw std::invalid_argument("fit_logistic: initial point has wrong dimension");
    m.w = init->w;
    m.bias = init->bias;
  } else {
    m.w = Eigen::VectorXd::Zero(d);
  }

  Eigen::VectorXd grad(d + 1);
  Eigen::MatrixXd hess(d + 1, d + 1);
  double f = logistic_objective(x, y, l2, m);
  for (m.iterations = 0; m.iterations < max_iter; ++m.iterations) {
    const Eigen::VectorXd z = margins(x, m);
    Eigen::VectorXd r(z.size()), weight(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double p = sigmoid(z(i));
      r(i) = p - (y(i) > 0.5 ? 1.0 : 0.0);
      weight(i) = p * (1.0 - p);
    }
    grad.head(d) = x.transpose() * r + l2 * m.w;
    grad(d) = r.sum() + kBiasRidge * m.bias;
    m.grad_norm = grad.norm();
    if (m.grad_norm < tol) break;

    hess.topLeftCorner(d, d) = x.transpose() * weight.asDiagonal() * x;
    hess.topLeftCorner(d, d).diagonal().array() += l2;
    const Eigen::VectorXd xw = x.transpose() * weight;
    hess.topRightCorner(d, 1) = xw;
    hess.bottomLeftCorner(1, d) = xw.transpose();
    hess(d, d) = weight.sum() + kBiasRidge;
    const Eigen::VectorXd step = hess.ldlt().solve(grad);

    // Backtracking on the objective (Armijo).
    const double slope = grad.dot(step);
    double t = 1.0;
    LogisticModel trial = m;
    for (int k = 0; k < 60; ++k) {
      trial.w = m.w - t * step.head(d);
      trial.bias = m.bias - t * step(d);
      const double ft = logistic_objective(x, y, l2, trial);
      if (ft <= f - 1e-4 * t * slope) {
        f = ft;
        break;
      }
      t *= 0.5;
    }
    if (t < std::ldexp(1.0, -59)) break;  // no further progress is representable
    m.w = trial.w;
    m.bias = trial.bias;
  }
  return m;
}

PredictionSet logistic_readout(const DenseMatrix& embeddings, const MultiLabelGraph& g, const DataSplit& split,
                               const ReadoutOptions& opts) {
  if (static_cast<std::size_t>(embeddings.rows()) != g.num_nodes())
    throw std::invalid_argument("logistic_readout: embedding row count does not match the graph");
  if (!embeddings.allFinite()) throw std::invalid_argument("logistic_readout: non-finite embeddings");
  validate_split(split, g.num_nodes());

  const auto train_n = static_cast<Eigen::Index>(split.train.size());
  DenseMatrix x_train(train_n, embeddings.cols());
  for (Eigen::Index r = 0; r < train_n; ++r) x_train.row(r) = embeddings.row(split.train[static_cast<std::size_t>(r)]);
  const DenseMatrix truth = g.label_matrix();

  DenseMatrix all_scores(embeddings.rows(), static_cast<Eigen::Index>(g.num_labels()));
  for (Eigen::Index c = 0; c < all_scores.cols(); ++c) {
    Eigen::VectorXd y(train_n);
    for (Eigen::Index r = 0; r < train_n; ++r) y(r) = truth(split.train[static_cast<std::size_t>(r)], c);
    const double positives = y.sum();
    if (positives == 0.0 || positives == static_cast<double>(train_n)) {
      all_scores.col(c).setConstant(train_n == 0 ? 0.0 : positives / static_cast<double>(train_n));
      continue;
    }
    const LogisticModel m = fit_logistic(x_train, y, opts.l2, opts.init);
    for (Eigen::Index i = 0; i < embeddings.rows(); ++i) all_scores(i, c) = m.predict(embeddings.row(i).transpose());
  }
  return make_prediction_set(g, all_scores, split.test);
}

}  // namespace mlgb
