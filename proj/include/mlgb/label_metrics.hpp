#pragma once

#include <vector>

#include "mlgb/graph.hpp"

namespace mlgb {

/// |a ∩ b| / |a ∪ b| for sorted label sets; 0 when both are empty.
double jaccard(const LabelSet& a, const LabelSet& b);

/// Mean Jaccard similarity of endpoint label sets over all edges, each
/// undirected edge counted once. Throws MetricError on an edgeless graph.
double label_homophily(const MultiLabelGraph& g);

/// Multi-label cross-class neighborhood similarity.
struct CcnsMatrix {
  DenseMatrix s;                         ///< |L| x |L|, symmetric
  std::vector<std::size_t> class_sizes;  ///< |V_c|
};

/// s(c, c') = 1/(|V_c||V_c'|) * sum_{i in V_c, j in V_c', i != j} cos(d_i, d_j) / (|L_i||L_j|)
/// with d_i the raw count histogram of neighbor labels. Exact; computed by
/// aggregating per-class sums of unit-normalized histograms and removing the
/// i == j terms.
CcnsMatrix ccns(const MultiLabelGraph& g);

/// Neighbor-label count histogram d_i (n x |L|).
DenseMatrix neighbor_label_histograms(const MultiLabelGraph& g);

/// |E| / (n(n-1)/2). Throws MetricError for n < 2.
double edge_density(const MultiLabelGraph& g);

}  // namespace mlgb
