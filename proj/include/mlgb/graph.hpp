#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mlgb/numerics.hpp"

namespace mlgb {

using NodeId = std::uint32_t;
using LabelId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;
using LabelSet = std::vector<LabelId>;

/// Immutable, undirected, simple graph with dense node features and
/// multi-hot labels. Edges are stored once as (u, v) with u < v, sorted.
/// Labels are kept as sorted index lists; an empty list is an unlabeled node.
class MultiLabelGraph {
 public:
  MultiLabelGraph() = default;

  /// Validates and canonicalizes the input. Throws DataError on self-loops,
  /// duplicate edges (in either orientation), out-of-range node or label
  /// indices, or a feature matrix whose row count differs from num_nodes.
  MultiLabelGraph(std::size_t num_nodes, std::size_t num_labels, std::vector<Edge> edges,
                  std::vector<LabelSet> labels, DenseMatrix features);

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  std::size_t num_labels() const noexcept { return num_labels_; }
  std::size_t num_features() const noexcept { return static_cast<std::size_t>(features_.cols()); }

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const DenseMatrix& features() const noexcept { return features_; }
  const std::vector<LabelSet>& labels() const noexcept { return labels_; }
  const LabelSet& labels_of(NodeId v) const { return labels_[v]; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {adj_.data() + adj_offsets_[v], adj_offsets_[v + 1] - adj_offsets_[v]};
  }
  std::size_t degree(NodeId v) const { return adj_offsets_[v + 1] - adj_offsets_[v]; }
  bool has_edge(NodeId u, NodeId v) const;

  /// Binary n x |L| label matrix.
  DenseMatrix label_matrix() const;

  /// 0/1 symmetric adjacency with zero diagonal.
  SparseSym adjacency() const;

  MultiLabelGraph with_features(DenseMatrix features) const;
  MultiLabelGraph with_labels(std::vector<LabelSet> labels) const;
  MultiLabelGraph with_edges(std::vector<Edge> edges) const;

 private:
  std::size_t num_nodes_ = 0;
  std::size_t num_labels_ = 0;
  std::vector<Edge> edges_;
  std::vector<LabelSet> labels_;
  DenseMatrix features_;
  std::vector<std::size_t> adj_offsets_{0};
  std::vector<NodeId> adj_;
};

/// Node-induced subgraph on `nodes` (renumbered in the given order).
MultiLabelGraph induced_subgraph(const MultiLabelGraph& g, std::span<const NodeId> nodes);

}  // namespace mlgb
