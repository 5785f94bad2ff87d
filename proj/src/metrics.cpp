#include "mlgb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mlgb/error.hpp"

namespace mlgb {

void PredictionSet::validate() const {
  if (scores.rows() != truth.rows() || scores.cols() != truth.cols())
    throw std::invalid_argument("prediction set: score/truth shape mismatch");
  if (!node_ids.empty() && node_ids.size() != static_cast<std::size_t>(scores.rows()))
    throw std::invalid_argument("prediction set: node id count mismatch");
  if (!scores.allFinite()) throw std::invalid_argument("prediction set: non-finite score");
}

PredictionSet make_prediction_set(const MultiLabelGraph& g, const DenseMatrix& all_scores,
                                  const std::vector<NodeId>& nodes) {
  PredictionSet p;
  p.node_ids = nodes;
  const auto rows = static_cast<Eigen::Index>(nodes.size());
  p.scores.resize(rows, all_scores.cols());
  p.truth = DenseMatrix::Zero(rows, static_cast<Eigen::Index>(g.num_labels()));
  for (Eigen::Index r = 0; r < rows; ++r) {
    const NodeId v = nodes[static_cast<std::size_t>(r)];
    p.scores.row(r) = all_scores.row(v);
    for (const LabelId l : g.labels_of(v)) p.truth(r, l) = 1.0;
  }
  p.validate();
  return p;
}

namespace {

double f1(double tp, double fp, double fn) {
  const double denom = 2.0 * tp + fp + fn;
  return denom == 0.0 ? 0.0 : 2.0 * tp / denom;
}

struct Counts {
  double tp = 0, fp = 0, fn = 0;
};

Counts label_counts(const PredictionSet& p, Eigen::Index c, double threshold) {
  Counts k;
  for (Eigen::Index i = 0; i < p.scores.rows(); ++i) {
    const bool pred = p.scores(i, c) >= threshold;
    const bool truth = p.truth(i, c) > 0.5;
    if (pred && truth) k.tp += 1;
    else if (pred) k.fp += 1;
    else if (truth) k.fn += 1;
  }
  return k;
}

double mean_of(const std::vector<std::optional<double>>& values, std::size_t* skipped, const char* what) {
  double sum = 0.0;
  std::size_t used = 0, skip = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++used;
    } else {
      ++skip;
    }
  }
  if (skipped) *skipped = skip;
  if (used == 0) throw MetricError(std::string(what) + " is undefined: every label was skipped");
  return sum / static_cast<double>(used);
}

}  // namespace

double micro_f1(const PredictionSet& p, double threshold) {
  Counts total;
  for (Eigen::Index c = 0; c < p.scores.cols(); ++c) {
    const auto k = label_counts(p, c, threshold);
    total.tp += k.tp;
    total.fp += k.fp;
    total.fn += k.fn;
  }
  return f1(total.tp, total.fp, total.fn);
}

double macro_f1(const PredictionSet& p, double threshold) {
  if (p.scores.cols() == 0) return 0.0;
  double sum = 0.0;
  for (Eigen::Index c = 0; c < p.scores.cols(); ++c) {
    const auto k = label_counts(p, c, threshold);
    sum += f1(k.tp, k.fp, k.fn);
  }
  return sum / static_cast<double>(p.scores.cols());
}

std::vector<std::optional<double>> per_label_auroc(const PredictionSet& p) {
  const auto n = static_cast<std::size_t>(p.scores.rows());
  std::vector<std::optional<double>> out;
  std::vector<std::size_t> order(n);
  std::vector<double> rank(n);
  for (Eigen::Index c = 0; c < p.scores.cols(); ++c) {
    double positives = 0;
    for (std::size_t i = 0; i < n; ++i) positives += p.truth(static_cast<Eigen::Index>(i), c) > 0.5 ? 1 : 0;
    const double negatives = static_cast<double>(n) - positives;
    if (positives == 0 || negatives == 0) {
      out.emplace_back();
      continue;
    }
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return p.scores(static_cast<Eigen::Index>(a), c) < p.scores(static_cast<Eigen::Index>(b), c);
    });
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j + 1 < n && p.scores(static_cast<Eigen::Index>(order[j + 1]), c) ==
                              p.scores(static_cast<Eigen::Index>(order[i]), c))
        ++j;
      const double mid = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based mid-rank
      for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
      i = j + 1;
    }
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (p.truth(static_cast<Eigen::Index>(i), c) > 0.5) rank_sum += rank[i];
    out.emplace_back((rank_sum - positives * (positives + 1) / 2.0) / (positives * negatives));
  }
  return out;
}

std::vector<std::optional<double>> per_label_ap(const PredictionSet& p) {
  const auto n = static_cast<std::size_t>(p.scores.rows());
  std::vector<std::optional<double>> out;
  std::vector<std::size_t> order(n);
  for (Eigen::Index c = 0; c < p.scores.cols(); ++c) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return p.scores(static_cast<Eigen::Index>(a), c) > p.scores(static_cast<Eigen::Index>(b), c);
    });
    // Extended precision so that the result is the correctly rounded mean of
    // the precisions in common cases (e.g. (1 + 2/3) / 2 == 5.0 / 6.0).
    long double hits = 0.0L, sum = 0.0L;
    for (std::size_t k = 0; k < n; ++k) {
      if (p.truth(static_cast<Eigen::Index>(order[k]), c) > 0.5) {
        hits += 1.0L;
        sum += hits / static_cast<long double>(k + 1);
      }
    }
    if (hits == 0.0L) {
      out.emplace_back();
    } else {
      out.emplace_back(static_cast<double>(sum / hits));
    }
  }
  return out;
}

double macro_auroc(const PredictionSet& p, std::size_t* skipped) {
  return mean_of(per_label_auroc(p), skipped, "macro AUROC");
}

double macro_ap(const PredictionSet& p, std::size_t* skipped) {
  return mean_of(per_label_ap(p), skipped, "macro AP");
}

MetricValues evaluate_predictions(const PredictionSet& p, double threshold) {
  p.validate();
  MetricValues m;
  m.micro_f1 = micro_f1(p, threshold);
  m.macro_f1 = macro_f1(p, threshold);
  m.macro_auroc = macro_auroc(p, &m.skipped_auroc);
  m.macro_ap = macro_ap(p, &m.skipped_ap);
  return m;
}

EvalReport summarize(std::vector<MetricValues> per_split, nlohmann::json config) {
  EvalReport r;
  r.per_split = std::move(per_split);
  r.config = std::move(config);
  auto stat = [&](double MetricValues::*field) {
    MetricSummary s;
    if (r.per_split.empty()) return s;
    for (const auto& m : r.per_split) s.mean += m.*field;
    s.mean /= static_cast<double>(r.per_split.size());
    double var = 0.0;
    for (const auto& m : r.per_split) var += (m.*field - s.mean) * (m.*field - s.mean);
    s.std = std::sqrt(var / static_cast<double>(r.per_split.size()));
    return s;
  };
  r.micro_f1 = stat(&MetricValues::micro_f1);
  r.macro_f1 = stat(&MetricValues::macro_f1);
  r.macro_auroc = stat(&MetricValues::macro_auroc);
  r.macro_ap = stat(&MetricValues::macro_ap);
  for (const auto& m : r.per_split) {
    r.skipped_auroc = std::max(r.skipped_auroc, m.skipped_auroc);
    r.skipped_ap = std::max(r.skipped_ap, m.skipped_ap);
  }
  return r;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  auto summary = [](const MetricSummary& s) { return nlohmann::json{{"mean", s.mean}, {"std", s.std}}; };
  j["micro_f1"] = summary(r.micro_f1);
  j["macro_f1"] = summary(r.macro_f1);
  j["macro_auroc"] = summary(r.macro_auroc);
  j["macro_ap"] = summary(r.macro_ap);
  j["skipped_labels_auroc"] = r.skipped_auroc;
  j["skipped_labels_ap"] = r.skipped_ap;
  j["f1_threshold"] = 0.5;
  auto splits = nlohmann::json::array();
  for (const auto& m : r.per_split)
    splits.push_back({{"micro_f1", m.micro_f1},
                      {"macro_f1", m.macro_f1},
                      {"macro_auroc", m.macro_auroc},
                      {"macro_ap", m.macro_ap},
                      {"skipped_labels_auroc", m.skipped_auroc},
                      {"skipped_labels_ap", m.skipped_ap}});
  j["per_split"] = splits;
  j["config"] = r.config;
  return j;
}

}  // namespace mlgb
