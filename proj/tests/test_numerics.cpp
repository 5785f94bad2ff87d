#include <doctest.h>

#include <cmath>

#include "mlgb/numerics.hpp"
#include "support.hpp"

using namespace mlgb;

namespace {

// Dense reference for D^{-1/2} (A + I) D^{-1/2}.
DenseMatrix dense_normalize(const DenseMatrix& a) {
  DenseMatrix m = a + DenseMatrix::Identity(a.rows(), a.cols());
  const Eigen::VectorXd d = m.rowwise().sum();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) /= std::sqrt(d(i) * d(j));
  return m;
}

DenseMatrix random_dense(Eigen::Index r, Eigen::Index c, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> z;
  DenseMatrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = z(rng);
  return m;
}

}  // namespace

TEST_CASE("sym_normalize hand cases") {
  MultiLabelGraph two(2, 1, {{0, 1}}, {{}, {}}, DenseMatrix::Zero(2, 1));
  const DenseMatrix a = sym_normalize(two.adjacency()).to_dense();
  CHECK((a.array() - 0.5).abs().maxCoeff() < 1e-15);

  MultiLabelGraph empty(4, 1, {}, {{}, {}, {}, {}}, DenseMatrix::Zero(4, 1));
  CHECK(sym_normalize(empty.adjacency()).to_dense() == DenseMatrix::Identity(4, 4));

  MultiLabelGraph path(3, 1, {{0, 1}, {1, 2}}, {{}, {}, {}}, DenseMatrix::Zero(3, 1));
  const DenseMatrix p = sym_normalize(path.adjacency()).to_dense();
  CHECK(p(0, 1) == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-15));
  CHECK(p(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p(0, 2) == 0.0);

  SparseSym neg = SparseSym::from_triplets(2, {{0, 1, -1.0}, {1, 0, -1.0}});
  CHECK_THROWS_AS(sym_normalize(neg), std::invalid_argument);
  CHECK_THROWS_AS(sym_normalize(SparseSym::from_triplets(2, {{0, 1, 1.0}}), false), std::invalid_argument);
}

TEST_CASE("sym_normalize agrees with the dense formula, spectral radius at most 1") {
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    const auto g = testing::random_graph(5 + 5 * (seed % 20), 1, 0.1, 0.0, 1, seed);
    const SparseSym s = sym_normalize(g.adjacency());
    const DenseMatrix dense = dense_normalize(g.adjacency().to_dense());
    CHECK((s.to_dense() - dense).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(s.is_structurally_symmetric());
    CHECK(spectral_radius(s) <= 1.0 + 1e-9);
  }
}

TEST_CASE("propagating ones stays positive on connected graphs") {
  std::vector<Edge> ring;
  for (NodeId i = 0; i < 12; ++i) ring.emplace_back(i, (i + 1) % 12);
  MultiLabelGraph g(12, 1, ring, std::vector<LabelSet>(12), DenseMatrix::Zero(12, 1));
  const DenseMatrix out = spmm(sym_normalize(g.adjacency()), DenseMatrix::Ones(12, 3));
  CHECK(out.minCoeff() > 0.0);
}

TEST_CASE("spmm matches dense multiplication") {
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    const auto g = testing::random_graph(2 + seed, 1, 0.3, 0.0, 1, seed);
    const SparseSym s = sym_normalize(g.adjacency());
    const DenseMatrix x = random_dense(static_cast<Eigen::Index>(g.num_nodes()), 4, seed);
    CHECK((spmm(s, x) - s.to_dense() * x).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((spmm_transposed(s, x) - s.to_dense().transpose() * x).cwiseAbs().maxCoeff() < 1e-12);
  }
  const DenseMatrix x = random_dense(5, 3, 1);
  CHECK(spmm(SparseSym::identity(5), x) == x);
  SparseSym zero;
  zero.n = 5;
  zero.row_ptr.assign(6, 0);
  CHECK(spmm(zero, x) == DenseMatrix::Zero(5, 3));
  CHECK_THROWS_AS(spmm(zero, random_dense(4, 3, 1)), std::invalid_argument);
}

TEST_CASE("sparse helpers") {
  const SparseSym s = SparseSym::from_triplets(3, {{2, 0, 1.0}, {0, 1, 2.0}, {0, 1, 0.5}, {1, 1, 4.0}});
  CHECK(s.at(0, 1) == 2.5);
  CHECK(s.at(1, 0) == 0.0);
  CHECK(s.nnz() == 3);
  CHECK(!s.is_structurally_symmetric());
  CHECK(s.transposed().to_dense() == s.to_dense().transpose());
}

TEST_CASE("grad_check on closed-form functions") {
  ParamSet ps;
  ps.add("w", random_dense(3, 4, 2));
  ps.add("v", random_dense(2, 2, 3));
  LossFn quadratic = [](ParamSet& p, bool want_grad) {
    double f = 0;
    for (auto& t : p) {
      f += t.value.squaredNorm();
      if (want_grad) t.grad = 2.0 * t.value;
    }
    return f;
  };
  CHECK(grad_check(quadratic, ps) < 1e-8);

  LossFn constant = [](ParamSet& p, bool want_grad) {
    if (want_grad) p.zero_grad();
    return 3.0;
  };
  CHECK(grad_check(constant, ps) == 0.0);

  LossFn wrong = [](ParamSet& p, bool want_grad) {
    double f = 0;
    for (auto& t : p) {
      f += t.value.squaredNorm();
      if (want_grad) t.grad = t.value;
    }
    return f;
  };
  CHECK(grad_check(wrong, ps) > 0.1);
}

TEST_CASE("glorot init is bounded and seed-determined") {
  const DenseMatrix a = glorot_uniform(10, 20, 4, 0);
  CHECK(a.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 30.0));
  CHECK(a == glorot_uniform(10, 20, 4, 0));
  CHECK(a != glorot_uniform(10, 20, 4, 1));
  CHECK(a != glorot_uniform(10, 20, 5, 0));
}

TEST_CASE("adam minimizes a quadratic") {
  ParamSet ps;
  ps.add("w", DenseMatrix::Constant(2, 2, 5.0));
  Adam adam(0.1, 0.0);
  for (int i = 0; i < 500; ++i) {
    ps[0].grad = 2.0 * ps[0].value;
    adam.step(ps);
  }
  CHECK(ps[0].value.cwiseAbs().maxCoeff() < 1e-2);
}

TEST_CASE("stable scalar helpers") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(softplus(-800.0) >= 0.0);
  CHECK(softplus(800.0) == 800.0);
  CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
}
