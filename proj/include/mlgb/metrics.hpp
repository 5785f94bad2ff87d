#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlgb/graph.hpp"
#include "mlgb/numerics.hpp"

namespace mlgb {

/// Scores and ground truth for the evaluated nodes (rows) and labels (columns).
struct PredictionSet {
  DenseMatrix scores;  ///< in [0, 1]
  DenseMatrix truth;   ///< 0/1
  std::vector<NodeId> node_ids;

  void validate() const;
};

/// Builds the truth matrix for `nodes` from the graph.
PredictionSet make_prediction_set(const MultiLabelGraph& g, const DenseMatrix& all_scores,
                                  const std::vector<NodeId>& nodes);

/// Global TP/FP/FN over all cells with score >= threshold; 0 when undefined.
double micro_f1(const PredictionSet& p, double threshold = 0.5);

/// Mean per-label F1 over all labels; a label with no positives in either
/// truth or prediction scores 0.
double macro_f1(const PredictionSet& p, double threshold = 0.5);

/// Per-label metric values with skipped labels marked empty.
std::vector<std::optional<double>> per_label_auroc(const PredictionSet& p);
std::vector<std::optional<double>> per_label_ap(const PredictionSet& p);

/// Mean over labels whose truth column has both classes (mid-rank ties).
/// Throws MetricError when every label is skipped.
double macro_auroc(const PredictionSet& p, std::size_t* skipped = nullptr);

/// Mean per-label average precision over labels with at least one positive;
/// ties in score keep the lower row first. Throws MetricError when every
/// label is skipped.
double macro_ap(const PredictionSet& p, std::size_t* skipped = nullptr);

struct MetricValues {
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double macro_auroc = 0.0;
  double macro_ap = 0.0;
  std::size_t skipped_auroc = 0;
  std::size_t skipped_ap = 0;
};

MetricValues evaluate_predictions(const PredictionSet& p, double threshold = 0.5);

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  ///< population standard deviation over splits
};

/// Per-split values plus mean/std over splits.
struct EvalReport {
  std::vector<MetricValues> per_split;
  MetricSummary micro_f1, macro_f1, macro_auroc, macro_ap;
  std::size_t skipped_auroc = 0;  ///< maximum over splits
  std::size_t skipped_ap = 0;
  nlohmann::json config;
};

EvalReport summarize(std::vector<MetricValues> per_split, nlohmann::json config = {});
nlohmann::json to_json(const EvalReport& r);

}  // namespace mlgb
