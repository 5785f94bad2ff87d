#include "mlgb/graph.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "mlgb/error.hpp"

namespace mlgb {

MultiLabelGraph::MultiLabelGraph(std::size_t num_nodes, std::size_t num_labels, std::vector<Edge> edges,
                                 std::vector<LabelSet> labels, DenseMatrix features)
    : num_nodes_(num_nodes), num_labels_(num_labels), edges_(std::move(edges)), labels_(std::move(labels)),
      features_(std::move(features)) {
  if (labels_.size() != num_nodes_)
    throw DataError("label rows (" + std::to_string(labels_.size()) + ") != num_nodes (" +
                    std::to_string(num_nodes_) + ")");
  if (static_cast<std::size_t>(features_.rows()) != num_nodes_)
    throw DataError("feature rows (" + std::to_string(features_.rows()) + ") != num_nodes (" +
                    std::to_string(num_nodes_) + ")");

  for (auto& [u, v] : edges_) {
    if (u == v) throw DataError("self-loop on node " + std::to_string(u));
    if (u >= num_nodes_ || v >= num_nodes_)
      throw DataError("edge (" + std::to_string(u) + ", " + std::to_string(v) + ") references node >= n");
    if (u > v) std::swap(u, v);
  }
  std::sort(edges_.begin(), edges_.end());
  const auto dup = std::adjacent_find(edges_.begin(), edges_.end());
  if (dup != edges_.end())
    throw DataError("duplicate edge (" + std::to_string(dup->first) + ", " + std::to_string(dup->second) + ")");

  for (std::size_t v = 0; v < num_nodes_; ++v) {
    auto& ls = labels_[v];
    std::sort(ls.begin(), ls.end());
    ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
    if (!ls.empty() && ls.back() >= num_labels_)
      throw DataError("node " + std::to_string(v) + " has label " + std::to_string(ls.back()) + " >= |L|");
  }

  adj_offsets_.assign(num_nodes_ + 1, 0);
  for (const auto& [u, v] : edges_) {
    ++adj_offsets_[u + 1];
    ++adj_offsets_[v + 1];
  }
  for (std::size_t i = 0; i < num_nodes_; ++i) adj_offsets_[i + 1] += adj_offsets_[i];
  adj_.resize(2 * edges_.size());
  std::vector<std::size_t> fill(adj_offsets_.begin(), adj_offsets_.end() - 1);
  for (const auto& [u, v] : edges_) {
    adj_[fill[u]++] = v;
    adj_[fill[v]++] = u;
  }
  for (std::size_t i = 0; i < num_nodes_; ++i)
    std::sort(adj_.begin() + static_cast<std::ptrdiff_t>(adj_offsets_[i]),
              adj_.begin() + static_cast<std::ptrdiff_t>(adj_offsets_[i + 1]));
}

bool MultiLabelGraph::has_edge(NodeId u, NodeId v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

DenseMatrix MultiLabelGraph::label_matrix() const {
  DenseMatrix y = DenseMatrix::Zero(static_cast<Eigen::Index>(num_nodes_), static_cast<Eigen::Index>(num_labels_));
  for (std::size_t v = 0; v < num_nodes_; ++v)
    for (const LabelId l : labels_[v]) y(static_cast<Eigen::Index>(v), l) = 1.0;
  return y;
}

SparseSym MultiLabelGraph::adjacency() const {
  SparseSym a;
  a.n = num_nodes_;
  a.row_ptr = adj_offsets_;
  a.col = adj_;
  a.val.assign(adj_.size(), 1.0);
  return a;
}

MultiLabelGraph MultiLabelGraph::with_features(DenseMatrix features) const {
  return MultiLabelGraph(num_nodes_, num_labels_, edges_, labels_, std::move(features));
}

MultiLabelGraph MultiLabelGraph::with_labels(std::vector<LabelSet> labels) const {
  return MultiLabelGraph(num_nodes_, num_labels_, edges_, std::move(labels), features_);
}

MultiLabelGraph MultiLabelGraph::with_edges(std::vector<Edge> edges) const {
  return MultiLabelGraph(num_nodes_, num_labels_, std::move(edges), labels_, features_);
}

MultiLabelGraph induced_subgraph(const MultiLabelGraph& g, std::span<const NodeId> nodes) {
  std::unordered_map<NodeId, NodeId> remap;
  for (std::size_t i = 0; i < nodes.size(); ++i) remap.emplace(nodes[i], static_cast<NodeId>(i));
  std::vector<Edge> edges;
  for (const auto& [u, v] : g.edges()) {
    const auto iu = remap.find(u);
    const auto iv = remap.find(v);
    if (iu != remap.end() && iv != remap.end()) edges.emplace_back(iu->second, iv->second);
  }
  std::vector<LabelSet> labels;
  DenseMatrix x(static_cast<Eigen::Index>(nodes.size()), g.features().cols());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    labels.push_back(g.labels_of(nodes[i]));
    x.row(static_cast<Eigen::Index>(i)) = g.features().row(nodes[i]);
  }
  return MultiLabelGraph(nodes.size(), g.num_labels(), std::move(edges), std::move(labels), std::move(x));
}

}  // namespace mlgb
