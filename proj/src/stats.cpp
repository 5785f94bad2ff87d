#include "mlgb/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "mlgb/label_metrics.hpp"

namespace mlgb {

namespace {

constexpr std::size_t kBitsetNodeLimit = 1u << 15;

std::size_t count_common_sorted(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::size_t count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

}  // namespace

double clustering_coefficient(const MultiLabelGraph& g) {
  const std::size_t n = g.num_nodes();
  if (n == 0) return 0.0;

  // Per-node count of edges among its neighbors (each triangle at v counted
  // twice through the ordered neighbor pairs).
  std::vector<std::size_t> links(n, 0);
  if (n <= kBitsetNodeLimit) {
    const std::size_t words = (n + 63) / 64;
    std::vector<std::uint64_t> bits(n * words, 0);
    for (const auto& [u, v] : g.edges()) {
      bits[u * words + v / 64] |= std::uint64_t{1} << (v % 64);
      bits[v * words + u / 64] |= std::uint64_t{1} << (u % 64);
    }
    for (NodeId v = 0; v < n; ++v) {
      if (g.degree(v) < 2) continue;
      const std::uint64_t* row_v = &bits[v * words];
      for (const NodeId w : g.neighbors(v)) {
        const std::uint64_t* row_w = &bits[w * words];
        for (std::size_t k = 0; k < words; ++k) links[v] += static_cast<std::size_t>(std::popcount(row_v[k] & row_w[k]));
      }
    }
  } else {
    for (NodeId v = 0; v < n; ++v) {
      if (g.degree(v) < 2) continue;
      for (const NodeId w : g.neighbors(v)) links[v] += count_common_sorted(g.neighbors(v), g.neighbors(w));
    }
  }

  double sum = 0.0;
  for (NodeId v = 0; v < n; ++v) {
    const double d = static_cast<double>(g.degree(v));
    if (d < 2) continue;
    sum += static_cast<double>(links[v]) / (d * (d - 1.0));
  }
  return sum / static_cast<double>(n);
}

double nearest_rank(std::span<const double> sorted, double percent) {
  if (sorted.empty()) return 0.0;
  const double rank = std::ceil(percent / 100.0 * static_cast<double>(sorted.size()));
  const auto idx = static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(sorted.size()))) - 1;
  return sorted[idx];
}

DatasetStats dataset_stats(const MultiLabelGraph& g) {
  DatasetStats s;
  s.num_nodes = g.num_nodes();
  s.num_edges = g.num_edges();
  s.num_features = g.num_features();
  s.num_labels = g.num_labels();
  s.clustering_coefficient = clustering_coefficient(g);
  if (g.num_edges() > 0) s.label_homophily = label_homophily(g);

  std::vector<double> counts;
  counts.reserve(g.num_nodes());
  std::size_t unlabeled = 0;
  for (const auto& ls : g.labels()) {
    counts.push_back(static_cast<double>(ls.size()));
    if (ls.empty()) ++unlabeled;
  }
  std::sort(counts.begin(), counts.end());
  if (!counts.empty()) {
    s.label_count_mean = std::accumulate(counts.begin(), counts.end(), 0.0) / static_cast<double>(counts.size());
    s.label_count_max = counts.back();
    s.unlabeled_fraction = static_cast<double>(unlabeled) / static_cast<double>(counts.size());
  }
  s.label_count_p25 = nearest_rank(counts, 25);
  s.label_count_p50 = nearest_rank(counts, 50);
  s.label_count_p75 = nearest_rank(counts, 75);
  s.label_count_median = s.label_count_p50;
  return s;
}

nlohmann::json to_json(const DatasetStats& s) {
  nlohmann::json j;
  j["num_nodes"] = s.num_nodes;
  j["num_edges"] = s.num_edges;
  j["num_features"] = s.num_features;
  j["num_labels"] = s.num_labels;
  j["clustering_coefficient"] = s.clustering_coefficient;
  j["label_homophily"] = s.label_homophily ? nlohmann::json(*s.label_homophily) : nlohmann::json(nullptr);
  j["label_count_median"] = s.label_count_median;
  j["label_count_mean"] = s.label_count_mean;
  j["label_count_max"] = s.label_count_max;
  j["label_count_percentile_25"] = s.label_count_p25;
  j["label_count_percentile_50"] = s.label_count_p50;
  j["label_count_percentile_75"] = s.label_count_p75;
  j["unlabeled_fraction"] = s.unlabeled_fraction;
  return j;
}

}  // namespace mlgb
