#pragma once

#include <optional>
#include <vector>

#include "mlgb/graph.hpp"
#include "mlgb/metrics.hpp"
#include "mlgb/numerics.hpp"
#include "mlgb/splits.hpp"

namespace mlgb {

/// Binary logistic regression: weights plus unregularized intercept.
struct LogisticModel {
  Eigen::VectorXd w;
  double bias = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

/// Minimizes 0.5*l2*|w|^2 + sum_i log(1 + exp(-s_i (w.x_i + bias))) with
/// s_i = +1 for y_i > 0.5 and -1 otherwise. Damped Newton iterations until the
/// gradient norm drops below `tol` or `max_iter` is reached.
LogisticModel fit_logistic(const DenseMatrix& x, const Eigen::VectorXd& y, double l2 = 1.0,
                           const std::optional<LogisticModel>& init = std::nullopt, double tol = 1e-6,
                           int max_iter = 10000);

/// Objective value of `fit_logistic` at `m`.
double logistic_objective(const DenseMatrix& x, const Eigen::VectorXd& y, double l2, const LogisticModel& m);

struct ReadoutOptions {
  double l2 = 1.0;
  /// Starting point for every label's solver (zero when empty).
  std::optional<LogisticModel> init;
};

/// One-vs-rest readout: one classifier per label fit on the train rows of
/// `embeddings`; returns probabilities for the test rows. A label whose train
/// column is single-class predicts its train prior everywhere.
PredictionSet logistic_readout(const DenseMatrix& embeddings, const MultiLabelGraph& g, const DataSplit& split,
                               const ReadoutOptions& opts = {});

}  // namespace mlgb
