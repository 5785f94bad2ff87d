#include "mlgb/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "mlgb/random.hpp"

namespace mlgb {

SparseSym SparseSym::identity(std::size_t n) {
  SparseSym s;
  s.n = n;
  s.row_ptr.resize(n + 1);
  s.col.resize(n);
  s.val.assign(n, 1.0);
  for (std::size_t i = 0; i <= n; ++i) s.row_ptr[i] = i;
  for (std::size_t i = 0; i < n; ++i) s.col[i] = static_cast<std::uint32_t>(i);
  return s;
}

SparseSym SparseSym::from_triplets(std::size_t n,
                                   std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  SparseSym s;
  s.n = n;
  s.row_ptr.assign(n + 1, 0);
  for (const auto& [r, c, v] : triplets) {
    if (r >= n || c >= n) throw std::invalid_argument("sparse triplet index out of range");
    s.col.push_back(c);
    s.val.push_back(v);
    ++s.row_ptr[r + 1];
  }
  for (std::size_t i = 0; i < n; ++i) s.row_ptr[i + 1] += s.row_ptr[i];

  // Merge duplicates.
  SparseSym out;
  out.n = n;
  out.row_ptr.assign(n + 1, 0);
  out.col.reserve(s.col.size());
  out.val.reserve(s.val.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = s.row_ptr[i]; k < s.row_ptr[i + 1]; ++k) {
      if (out.col.size() > out.row_ptr[i] && out.col.back() == s.col[k]) {
        out.val.back() += s.val[k];
      } else {
        out.col.push_back(s.col[k]);
        out.val.push_back(s.val[k]);
      }
    }
    out.row_ptr[i + 1] = out.col.size();
  }
  return out;
}

double SparseSym::at(std::size_t i, std::size_t j) const {
  const auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
  const auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
  const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(j));
  if (it == last || *it != j) return 0.0;
  return val[static_cast<std::size_t>(it - col.begin())];
}

bool SparseSym::is_structurally_symmetric() const {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      const std::size_t j = col[k];
      const auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[j]);
      const auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[j + 1]);
      if (!std::binary_search(first, last, static_cast<std::uint32_t>(i))) return false;
    }
  }
  return true;
}

DenseMatrix SparseSym::to_dense() const {
  DenseMatrix d = DenseMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      d(static_cast<Eigen::Index>(i), col[k]) += val[k];
  return d;
}

SparseSym SparseSym::transposed() const {
  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> t;
  t.reserve(nnz());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      t.emplace_back(col[k], static_cast<std::uint32_t>(i), val[k]);
  return from_triplets(n, std::move(t));
}

SparseSym sym_normalize(const SparseSym& m, bool add_identity) {
  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> t;
  t.reserve(m.nnz() + (add_identity ? m.n : 0));
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
      if (m.val[k] < 0.0) throw std::invalid_argument("sym_normalize: negative entry");
      t.emplace_back(static_cast<std::uint32_t>(i), m.col[k], m.val[k]);
    }
    if (add_identity) t.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i), 1.0);
  }
  SparseSym out = SparseSym::from_triplets(m.n, std::move(t));

  std::vector<double> inv_sqrt_deg(m.n);
  for (std::size_t i = 0; i < m.n; ++i) {
    double d = 0.0;
    for (std::size_t k = out.row_ptr[i]; k < out.row_ptr[i + 1]; ++k) d += out.val[k];
    if (!(d > 0.0)) throw std::invalid_argument("sym_normalize: zero-degree row");
    inv_sqrt_deg[i] = 1.0 / std::sqrt(d);
  }
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t k = out.row_ptr[i]; k < out.row_ptr[i + 1]; ++k)
      out.val[k] *= inv_sqrt_deg[i] * inv_sqrt_deg[out.col[k]];
  return out;
}

DenseMatrix spmm(const SparseSym& s, const DenseMatrix& x) {
  if (static_cast<std::size_t>(x.rows()) != s.n) throw std::invalid_argument("spmm: shape mismatch");
  DenseMatrix out = DenseMatrix::Zero(x.rows(), x.cols());
  for (std::size_t i = 0; i < s.n; ++i) {
    auto row = out.row(static_cast<Eigen::Index>(i));
    for (std::size_t k = s.row_ptr[i]; k < s.row_ptr[i + 1]; ++k) row.noalias() += s.val[k] * x.row(s.col[k]);
  }
  return out;
}

DenseMatrix spmm_transposed(const SparseSym& s, const DenseMatrix& x) {
  if (static_cast<std::size_t>(x.rows()) != s.n) throw std::invalid_argument("spmm: shape mismatch");
  DenseMatrix out = DenseMatrix::Zero(x.rows(), x.cols());
  for (std::size_t i = 0; i < s.n; ++i) {
    const auto xi = x.row(static_cast<Eigen::Index>(i));
    for (std::size_t k = s.row_ptr[i]; k < s.row_ptr[i + 1]; ++k) out.row(s.col[k]).noalias() += s.val[k] * xi;
  }
  return out;
}

double spectral_radius(const SparseSym& s, int iterations) {
  if (s.n == 0) return 0.0;
  RandomStream rng(12345, StreamTag::kTest);
  DenseMatrix v(static_cast<Eigen::Index>(s.n), 1);
  for (Eigen::Index i = 0; i < v.rows(); ++i) v(i, 0) = rng.uniform() + 0.5;
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    // Iterate on S^2 so that a dominant negative eigenvalue cannot oscillate.
    DenseMatrix w = spmm(s, spmm(s, v));
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    lambda = std::sqrt(norm / v.norm());
    v = w / norm;
  }
  return lambda;
}

bool all_finite(const DenseMatrix& m) { return m.allFinite(); }

std::size_t ParamSet::add(std::string name, DenseMatrix value) {
  tensors_.emplace_back(std::move(name), std::move(value));
  return tensors_.size() - 1;
}

std::size_t ParamSet::total_entries() const {
  std::size_t total = 0;
  for (const auto& t : tensors_) total += static_cast<std::size_t>(t.value.size());
  return total;
}

const ParamTensor* ParamSet::find(const std::string& name) const {
  for (const auto& t : tensors_)
    if (t.name == name) return &t;
  return nullptr;
}

void ParamSet::zero_grad() {
  for (auto& t : tensors_) t.grad.setZero();
}

DenseMatrix glorot_uniform(std::size_t rows, std::size_t cols, std::uint64_t seed, std::uint32_t stream) {
  RandomStream rng(seed, StreamTag::kInit, stream);
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  DenseMatrix w(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = (2.0 * rng.uniform() - 1.0) * a;
  return w;
}

double grad_check(const LossFn& f, ParamSet& params, double eps) {
  const double base = f(params, true);
  if (!std::isfinite(base)) throw std::domain_error("grad_check: non-finite loss");
  std::vector<DenseMatrix> analytic;
  analytic.reserve(params.size());
  for (const auto& t : params) analytic.push_back(t.grad);

  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& value = params[p].value;
    for (Eigen::Index i = 0; i < value.size(); ++i) {
      const double saved = value.data()[i];
      value.data()[i] = saved + eps;
      const double up = f(params, false);
      value.data()[i] = saved - eps;
      const double down = f(params, false);
      value.data()[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) throw std::domain_error("grad_check: non-finite loss");
      const double numeric = (up - down) / (2.0 * eps);
      const double ga = analytic[p].data()[i];
      const double err = std::abs(ga - numeric) / std::max(1.0, std::abs(ga) + std::abs(numeric));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

void Adam::step(ParamSet& params) {
  if (m_.empty()) {
    for (const auto& t : params) {
      m_.push_back(DenseMatrix::Zero(t.value.rows(), t.value.cols()));
      v_.push_back(DenseMatrix::Zero(t.value.rows(), t.value.cols()));
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& t = params[p];
    const DenseMatrix g = t.grad + wd_ * t.value;
    m_[p] = beta1_ * m_[p] + (1.0 - beta1_) * g;
    v_[p] = beta2_ * v_[p] + (1.0 - beta2_) * g.cwiseProduct(g);
    t.value.array() -= lr_ * (m_[p].array() / c1) / ((v_[p].array() / c2).sqrt() + eps_);
  }
}

}  // namespace mlgb
