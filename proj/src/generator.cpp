#include "mlgb/generator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "mlgb/error.hpp"
#include "mlgb/label_metrics.hpp"
#include "mlgb/random.hpp"

namespace mlgb {

void GeneratorConfig::validate() const {
  if (num_nodes < 1) throw DataError("generator: num_nodes must be >= 1");
  if (num_labels < 1) throw DataError("generator: num_labels must be >= 1");
  if (num_features < 1) throw DataError("generator: num_features must be >= 1");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DataError("generator: alpha must be >= 0");
  if (!(b > 0.0) || !std::isfinite(b)) throw DataError("generator: b must be > 0");
  if (!(min_sphere_radius > 0.0) || !(max_sphere_radius >= min_sphere_radius) || max_sphere_radius > 1.0)
    throw DataError("generator: need 0 < min_sphere_radius <= max_sphere_radius <= 1");
}

bool LabelSphere::contains(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  return (x.transpose() - center).norm() <= radius;
}

namespace {

Vector random_direction(std::size_t dim, RandomStream& rng) {
  Vector v(static_cast<Eigen::Index>(dim));
  double norm = 0.0;
  do {
    for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = rng.normal();
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

/// (permutation[k] + U) / count for k = 0..count-1: one draw per stratum.
std::vector<double> stratified_uniform(std::size_t count, RandomStream& rng) {
  std::vector<std::uint32_t> perm(count);
  for (std::size_t k = 0; k < count; ++k) perm[k] = static_cast<std::uint32_t>(k);
  shuffle(std::span<std::uint32_t>(perm), rng);
  std::vector<double> u(count);
  for (std::size_t k = 0; k < count; ++k) u[k] = (perm[k] + rng.uniform()) / static_cast<double>(count);
  return u;
}

struct PackedLabels {
  std::size_t words = 0;
  std::vector<std::uint64_t> bits;
  std::vector<std::uint32_t> sizes;

  PackedLabels(const std::vector<LabelSet>& labels, std::size_t num_labels)
      : words((num_labels + 63) / 64), bits(labels.size() * words, 0), sizes(labels.size()) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      for (const LabelId l : labels[i]) {
        if (l >= num_labels) throw DataError("label index out of range");
        bits[i * words + l / 64] |= std::uint64_t{1} << (l % 64);
      }
      sizes[i] = static_cast<std::uint32_t>(labels[i].size());
    }
  }

  /// (hamming distance, intersection size)
  std::pair<std::uint32_t, std::uint32_t> compare(std::size_t i, std::size_t j) const {
    std::uint32_t diff = 0, inter = 0;
    const std::uint64_t* a = &bits[i * words];
    const std::uint64_t* c = &bits[j * words];
    for (std::size_t k = 0; k < words; ++k) {
      diff += static_cast<std::uint32_t>(std::popcount(a[k] ^ c[k]));
      inter += static_cast<std::uint32_t>(std::popcount(a[k] & c[k]));
    }
    return {diff, inter};
  }
};

/// Edge probability indexed by Hamming distance 0..num_labels.
std::vector<double> probability_table(std::size_t num_labels, double alpha, double b) {
  std::vector<double> p(num_labels + 1);
  for (std::size_t k = 0; k <= num_labels; ++k)
    p[k] = attachment_probability(static_cast<double>(k) / static_cast<double>(num_labels), alpha, b);
  return p;
}

/// Calls visit(i, j, inter) for every drawn edge i < j, rows in parallel.
/// Each row owns its output slot, so results never depend on scheduling.
template <typename RowResult, typename Visit>
std::vector<RowResult> for_each_drawn_edge(const PackedLabels& packed, const std::vector<double>& prob,
                                           std::uint64_t seed, Visit visit) {
  const std::size_t n = packed.sizes.size();
  std::vector<RowResult> rows(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(n); ++si) {
    const auto i = static_cast<std::size_t>(si);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto [diff, inter] = packed.compare(i, j);
      const double p = prob[diff];
      if (p <= 0.0) continue;
      if (p >= 1.0 || RandomStream::pair_uniform(seed, StreamTag::kEdges, static_cast<std::uint32_t>(i),
                                                 static_cast<std::uint32_t>(j)) < p)
        visit(rows[i], i, j, inter);
    }
  }
  return rows;
}

}  // namespace

MultiLabelPoints generate_multilabel_points(const GeneratorConfig& cfg) {
  cfg.validate();
  const std::size_t c = cfg.num_labels;
  const std::size_t m = cfg.num_features;
  const double dim = static_cast<double>(m);

  MultiLabelPoints out;
  RandomStream sphere_rng(cfg.seed, StreamTag::kSpheres);
  const auto radius_u = stratified_uniform(c, sphere_rng);
  const auto center_u = stratified_uniform(c, sphere_rng);
  for (std::size_t l = 0; l < c; ++l) {
    LabelSphere s;
    s.radius = cfg.min_sphere_radius + (cfg.max_sphere_radius - cfg.min_sphere_radius) * radius_u[l];
    // Uniform position inside the ball of radius 1 - r keeps the sphere in H.
    const double center_norm = (1.0 - s.radius) * std::pow(center_u[l], 1.0 / dim);
    s.center = random_direction(m, sphere_rng) * center_norm;
    out.spheres.push_back(std::move(s));
  }

  out.points.resize(static_cast<Eigen::Index>(cfg.num_nodes), static_cast<Eigen::Index>(m));
  out.labels.resize(cfg.num_nodes);
  for (std::size_t i = 0; i < cfg.num_nodes; ++i) {
    RandomStream rng(cfg.seed, StreamTag::kPoints, static_cast<std::uint32_t>(i));
    while (true) {
      const auto chosen = static_cast<std::size_t>(rng.below(c));
      const auto& s = out.spheres[chosen];
      const double rho = s.radius * std::pow(rng.uniform(), 1.0 / dim);
      const Vector x = s.center + random_direction(m, rng) * rho;
      LabelSet ls;
      for (std::size_t l = 0; l < c; ++l)
        if (out.spheres[l].contains(x.transpose())) ls.push_back(static_cast<LabelId>(l));
      // Rounding can push a boundary draw just outside its own sphere; redraw.
      if (!std::binary_search(ls.begin(), ls.end(), static_cast<LabelId>(chosen))) continue;
      out.points.row(static_cast<Eigen::Index>(i)) = x.transpose();
      out.labels[i] = std::move(ls);
      break;
    }
  }
  return out;
}

double attachment_probability(double d, double alpha, double b) {
  return 1.0 / (1.0 + std::pow(d / b, alpha));
}

MultiLabelGraph generate_graph(const DenseMatrix& features, const std::vector<LabelSet>& labels,
                               std::size_t num_labels, double alpha, double b, std::uint64_t seed) {
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw DataError("generate_graph: feature and label row counts differ");
  if (num_labels == 0) throw DataError("generate_graph: num_labels must be >= 1");
  const PackedLabels packed(labels, num_labels);
  const auto prob = probability_table(num_labels, alpha, b);
  const auto rows = for_each_drawn_edge<std::vector<NodeId>>(
      packed, prob, seed,
      [](std::vector<NodeId>& row, std::size_t, std::size_t j, std::uint32_t) { row.push_back(static_cast<NodeId>(j)); });

  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  std::vector<Edge> edges;
  edges.reserve(total);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const NodeId j : rows[i]) edges.emplace_back(static_cast<NodeId>(i), j);
  return MultiLabelGraph(labels.size(), num_labels, std::move(edges), labels, features);
}

AttachmentSummary summarize_attachment(const std::vector<LabelSet>& labels, std::size_t num_labels, double alpha,
                                       double b, std::uint64_t seed) {
  const PackedLabels packed(labels, num_labels);
  const auto prob = probability_table(num_labels, alpha, b);
  struct Row {
    std::size_t edges = 0;
    double jaccard = 0.0;
  };
  const auto rows = for_each_drawn_edge<Row>(
      packed, prob, seed, [&packed](Row& row, std::size_t i, std::size_t j, std::uint32_t inter) {
        ++row.edges;
        const std::uint32_t uni = packed.sizes[i] + packed.sizes[j] - inter;
        if (uni > 0) row.jaccard += static_cast<double>(inter) / static_cast<double>(uni);
      });
  AttachmentSummary s;
  double sum = 0.0;
  for (const auto& r : rows) {
    s.num_edges += r.edges;
    sum += r.jaccard;
  }
  s.homophily = s.num_edges > 0 ? sum / static_cast<double>(s.num_edges) : 0.0;
  return s;
}

std::pair<double, double> calibration_path(double t) {
  return {0.5 * (1.0 + t), 0.25 - 0.0125 * t};
}

CalibrationResult calibrate_homophily(const DenseMatrix& features, const std::vector<LabelSet>& labels,
                                      std::size_t num_labels, double target, std::uint64_t seed, double tolerance) {
  if (!(target > 0.0 && target <= 1.0)) throw DataError("calibration target must lie in (0, 1]");
  constexpr int kGridPoints = 20;

  struct Probe {
    double t;
    AttachmentSummary summary;
  };
  auto probe = [&](double t) {
    const auto [alpha, b] = calibration_path(t);
    return Probe{t, summarize_attachment(labels, num_labels, alpha, b, seed)};
  };

  std::vector<Probe> grid;
  for (int i = 0; i < kGridPoints; ++i) grid.push_back(probe(i));

  Probe best{-1.0, {}};
  auto consider = [&](const Probe& p) {
    if (p.summary.num_edges == 0) return;
    if (best.t < 0 || std::abs(p.summary.homophily - target) < std::abs(best.summary.homophily - target)) best = p;
  };
  for (const auto& p : grid) consider(p);

  for (int i = 0; i + 1 < kGridPoints; ++i) {
    const auto& lo = grid[static_cast<std::size_t>(i)];
    const auto& hi = grid[static_cast<std::size_t>(i) + 1];
    if (lo.summary.num_edges == 0 || hi.summary.num_edges == 0) continue;
    if ((lo.summary.homophily - target) * (hi.summary.homophily - target) > 0) continue;
    // Bisect on t; homophily rises along the path.
    double a = lo.t, c = hi.t;
    const bool rising = hi.summary.homophily >= lo.summary.homophily;
    for (int it = 0; it < 30 && std::abs(best.summary.homophily - target) > tolerance / 10; ++it) {
      const Probe mid = probe(0.5 * (a + c));
      consider(mid);
      if (mid.summary.num_edges == 0) break;
      if ((mid.summary.homophily < target) == rising) a = mid.t; else c = mid.t;
    }
    break;
  }

  if (best.t < 0 || std::abs(best.summary.homophily - target) > tolerance) {
    double lo = 1.0, hi = 0.0;
    for (const auto& p : grid)
      if (p.summary.num_edges > 0) {
        lo = std::min(lo, p.summary.homophily);
        hi = std::max(hi, p.summary.homophily);
      }
    std::ostringstream msg;
    msg << "homophily target " << target << " unreachable; achievable range on this data is [" << lo << ", " << hi
        << "]";
    throw CalibrationError(msg.str());
  }

  const auto [alpha, b] = calibration_path(best.t);
  CalibrationResult r{alpha, b, best.summary.homophily, generate_graph(features, labels, num_labels, alpha, b, seed)};
  return r;
}

std::size_t CorruptionConfig::retained(std::size_t num_features) const {
  return static_cast<std::size_t>(std::llround(original_ratio * static_cast<double>(num_features)));
}

MultiLabelGraph corrupt_features(const MultiLabelGraph& g, const CorruptionConfig& cc, std::uint64_t seed) {
  if (!(cc.original_ratio >= 0.0 && cc.original_ratio <= 1.0))
    throw DataError("corrupt: original ratio must lie in [0, 1]");
  const std::size_t keep = cc.retained(g.num_features());
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  DenseMatrix x(n, static_cast<Eigen::Index>(keep + cc.num_irrelevant));
  x.leftCols(static_cast<Eigen::Index>(keep)) = g.features().leftCols(static_cast<Eigen::Index>(keep));
  RandomStream rng(seed, StreamTag::kNoise);
  for (Eigen::Index i = 0; i < n; ++i)
    for (std::size_t k = 0; k < cc.num_irrelevant; ++k) x(i, static_cast<Eigen::Index>(keep + k)) = rng.normal();
  return g.with_features(std::move(x));
}

}  // namespace mlgb
