#include <algorithm>
#include <cmath>

#include "mlgb/baselines.hpp"
#include "mlgb/random.hpp"

namespace mlgb {

std::vector<std::vector<NodeId>> random_walks(const MultiLabelGraph& g, std::size_t num_walks,
                                              std::size_t walk_length, std::uint64_t seed) {
  std::vector<std::vector<NodeId>> walks;
  walks.reserve(num_walks * g.num_nodes());
  for (std::size_t r = 0; r < num_walks; ++r) {
    for (NodeId start = 0; start < g.num_nodes(); ++start) {
      RandomStream rng(seed, StreamTag::kWalk, static_cast<std::uint32_t>(r), start);
      std::vector<NodeId> walk{start};
      while (walk.size() < walk_length) {
        const auto nb = g.neighbors(walk.back());
        if (nb.empty()) break;
        walk.push_back(nb[static_cast<std::size_t>(rng.below(nb.size()))]);
      }
      walks.push_back(std::move(walk));
    }
  }
  return walks;
}

std::vector<std::pair<NodeId, NodeId>> skipgram_pairs(const std::vector<NodeId>& walk, std::size_t window) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  const std::size_t len = walk.size();
  for (std::size_t i = 0; i < len; ++i) {
    const std::size_t lo = i >= window ? i - window : 0;
    const std::size_t hi = std::min(len - 1, i + window);
    for (std::size_t j = lo; j <= hi; ++j)
      if (j != i) pairs.emplace_back(walk[i], walk[j]);
  }
  return pairs;
}

DenseMatrix deepwalk_embed(const MultiLabelGraph& g, const BaselineConfig& cfg) {
  cfg.validate();
  const std::size_t n = g.num_nodes();
  const auto dim = static_cast<Eigen::Index>(cfg.embedding_dim);
  const auto walks = random_walks(g, cfg.num_walks, cfg.walk_length, cfg.seed);

  // Noise distribution: walk-occurrence counts raised to 0.75.
  std::vector<double> cumulative(n);
  {
    std::vector<double> freq(n, 0.0);
    for (const auto& w : walks)
      for (const NodeId v : w) freq[v] += 1.0;
    double acc = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      acc += std::pow(freq[v], 0.75);
      cumulative[v] = acc;
    }
  }
  const double noise_total = cumulative.empty() ? 0.0 : cumulative.back();
  RandomStream rng(cfg.seed, StreamTag::kSkipGram);
  auto draw_noise = [&]() -> NodeId {
    const double u = rng.uniform() * noise_total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return static_cast<NodeId>(std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), n - 1));
  };

  DenseMatrix in(static_cast<Eigen::Index>(n), dim);
  for (Eigen::Index i = 0; i < in.size(); ++i)
    in.data()[i] = (rng.uniform() - 0.5) / static_cast<double>(dim);
  DenseMatrix out = DenseMatrix::Zero(static_cast<Eigen::Index>(n), dim);

  std::size_t pairs_per_epoch = 0;
  for (const auto& w : walks) pairs_per_epoch += skipgram_pairs(w, cfg.window).size();
  const double total = static_cast<double>(pairs_per_epoch * cfg.walk_epochs);
  double processed = 0.0;

  Eigen::RowVectorXd neu(dim);
  for (std::size_t epoch = 0; epoch < cfg.walk_epochs; ++epoch) {
    for (const auto& walk : walks) {
      for (const auto& [center, context] : skipgram_pairs(walk, cfg.window)) {
        const double lr = cfg.walk_learning_rate * std::max(1e-4, 1.0 - processed / std::max(1.0, total));
        processed += 1.0;
        neu.setZero();
        for (std::size_t k = 0; k <= cfg.negatives; ++k) {
          NodeId target;
          double label;
          if (k == 0) {
            target = context;
            label = 1.0;
          } else {
            target = draw_noise();
            if (target == context) continue;
            label = 0.0;
          }
          const double f = sigmoid(in.row(center).dot(out.row(target)));
          const double step = (label - f) * lr;
          neu.noalias() += step * out.row(target);
          out.row(target).noalias() += step * in.row(center);
        }
        in.row(center) += neu;
      }
    }
  }
  return in;
}

}  // namespace mlgb
