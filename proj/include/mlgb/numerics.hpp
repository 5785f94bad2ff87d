#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mlgb {

using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Square sparse matrix in CSR form with sorted column indices per row.
/// Used for the (structurally symmetric) propagation operators and for the
/// row-stochastic neighbor-sampling aggregator.
struct SparseSym {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  std::size_t nnz() const noexcept { return col.size(); }

  static SparseSym identity(std::size_t n);

  /// Builds from (row, col, value) triplets; duplicates are summed.
  static SparseSym from_triplets(std::size_t n,
                                 std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> triplets);

  /// Value at (i, j), 0 if not stored.
  double at(std::size_t i, std::size_t j) const;

  bool is_structurally_symmetric() const;
  DenseMatrix to_dense() const;
  SparseSym transposed() const;
};

/// (M + I) scaled by D^{-1/2} on both sides, D the row sums of (M + I).
/// When add_identity is false M itself is normalized (rows must be non-zero).
SparseSym sym_normalize(const SparseSym& m, bool add_identity = true);

/// S * X.
DenseMatrix spmm(const SparseSym& s, const DenseMatrix& x);

/// S^T * X without materializing the transpose.
DenseMatrix spmm_transposed(const SparseSym& s, const DenseMatrix& x);

/// Dominant |eigenvalue| estimate by power iteration.
double spectral_radius(const SparseSym& s, int iterations = 500);

bool all_finite(const DenseMatrix& m);

struct ParamTensor {
  std::string name;
  DenseMatrix value;
  DenseMatrix grad;

  ParamTensor(std::string name_, DenseMatrix value_)
      : name(std::move(name_)), value(std::move(value_)), grad(DenseMatrix::Zero(value.rows(), value.cols())) {}
};

/// Ordered collection of named trainable tensors.
class ParamSet {
 public:
  std::size_t add(std::string name, DenseMatrix value);

  ParamTensor& operator[](std::size_t i) { return tensors_[i]; }
  const ParamTensor& operator[](std::size_t i) const { return tensors_[i]; }
  std::size_t size() const noexcept { return tensors_.size(); }
  std::size_t total_entries() const;

  const ParamTensor* find(const std::string& name) const;

  void zero_grad();

  auto begin() { return tensors_.begin(); }
  auto end() { return tensors_.end(); }
  auto begin() const { return tensors_.begin(); }
  auto end() const { return tensors_.end(); }

 private:
  std::vector<ParamTensor> tensors_;
};

/// Glorot-uniform matrix: U(-a, a) with a = sqrt(6 / (rows + cols)).
DenseMatrix glorot_uniform(std::size_t rows, std::size_t cols, std::uint64_t seed, std::uint32_t stream);

/// Evaluates the loss; when want_grad is set, also overwrites every grad slot
/// with the analytic gradient.
using LossFn = std::function<double(ParamSet&, bool want_grad)>;

/// Compares analytic gradients against central differences. Per-entry error is
/// |g_a - g_n| / max(1, |g_a| + |g_n|); returns the maximum over all entries.
double grad_check(const LossFn& f, ParamSet& params, double eps = 1e-5);

/// Adam with L2 weight decay folded into the gradient.
class Adam {
 public:
  Adam(double learning_rate, double weight_decay, double beta1 = 0.9, double beta2 = 0.999,
       double epsilon = 1e-8)
      : lr_(learning_rate), wd_(weight_decay), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

  void step(ParamSet& params);

 private:
  double lr_, wd_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<DenseMatrix> m_, v_;
};

/// Numerically stable log(1 + exp(x)).
inline double softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace mlgb
