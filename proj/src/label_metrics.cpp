#include "mlgb/label_metrics.hpp"

#include <algorithm>
#include <iterator>

#include "mlgb/error.hpp"

namespace mlgb {

double jaccard(const LabelSet& a, const LabelSet& b) {
  std::size_t inter = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++inter;
      ++ia;
      ++ib;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double label_homophily(const MultiLabelGraph& g) {
  if (g.num_edges() == 0) throw MetricError("label homophily is undefined for a graph without edges");
  double sum = 0.0;
  for (const auto& [u, v] : g.edges()) sum += jaccard(g.labels_of(u), g.labels_of(v));
  return sum / static_cast<double>(g.num_edges());
}

DenseMatrix neighbor_label_histograms(const MultiLabelGraph& g) {
  DenseMatrix d = DenseMatrix::Zero(static_cast<Eigen::Index>(g.num_nodes()),
                                    static_cast<Eigen::Index>(g.num_labels()));
  for (const auto& [u, v] : g.edges()) {
    for (const LabelId l : g.labels_of(v)) d(u, l) += 1.0;
    for (const LabelId l : g.labels_of(u)) d(v, l) += 1.0;
  }
  return d;
}

CcnsMatrix ccns(const MultiLabelGraph& g) {
  const auto num_labels = static_cast<Eigen::Index>(g.num_labels());
  const DenseMatrix hist = neighbor_label_histograms(g);

  // Per-node weighted unit histogram u_i = d_i / (|d_i| |L_i|); cos(d_i, d_j)
  // / (|L_i||L_j|) = u_i . u_j, and zero histograms give zero vectors.
  DenseMatrix unit = DenseMatrix::Zero(hist.rows(), hist.cols());
  std::vector<double> self_dot(g.num_nodes(), 0.0);
  for (Eigen::Index i = 0; i < hist.rows(); ++i) {
    const auto& ls = g.labels_of(static_cast<NodeId>(i));
    const double norm = hist.row(i).norm();
    if (ls.empty() || norm == 0.0) continue;
    unit.row(i) = hist.row(i) / (norm * static_cast<double>(ls.size()));
    self_dot[static_cast<std::size_t>(i)] = unit.row(i).squaredNorm();
  }

  CcnsMatrix out;
  out.class_sizes.assign(g.num_labels(), 0);
  DenseMatrix class_sum = DenseMatrix::Zero(num_labels, num_labels);
  for (std::size_t i = 0; i < g.num_nodes(); ++i)
    for (const LabelId c : g.labels_of(static_cast<NodeId>(i))) {
      ++out.class_sizes[c];
      class_sum.row(c) += unit.row(static_cast<Eigen::Index>(i));
    }

  DenseMatrix raw = class_sum * class_sum.transpose();
  // Remove i == j terms: node i contributes to (c, c') for every c, c' in L_i.
  Eigen::MatrixXd overlap = Eigen::MatrixXd::Zero(num_labels, num_labels);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    const auto& ls = g.labels_of(static_cast<NodeId>(i));
    for (const LabelId c : ls)
      for (const LabelId c2 : ls) {
        raw(c, c2) -= self_dot[i];
        overlap(c, c2) += 1.0;
      }
  }

  out.s = DenseMatrix::Zero(num_labels, num_labels);
  for (Eigen::Index c = 0; c < num_labels; ++c)
    for (Eigen::Index c2 = c; c2 < num_labels; ++c2) {
      const double pairs = static_cast<double>(out.class_sizes[static_cast<std::size_t>(c)]) *
                           static_cast<double>(out.class_sizes[static_cast<std::size_t>(c2)]);
      if (pairs - overlap(c, c2) == 0.0) continue;
      // Cancellation in the self-term removal can leave tiny negatives.
      const double value = std::max(0.0, 0.5 * (raw(c, c2) + raw(c2, c))) / pairs;
      out.s(c, c2) = value;
      out.s(c2, c) = value;
    }
  return out;
}

double edge_density(const MultiLabelGraph& g) {
  const std::size_t n = g.num_nodes();
  if (n < 2) throw MetricError("edge density needs at least two nodes");
  return static_cast<double>(g.num_edges()) / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

}  // namespace mlgb
