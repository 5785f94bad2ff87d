#pragma once

#include <cstdint>
#include <vector>

#include "mlgb/graph.hpp"

namespace mlgb {

struct GeneratorConfig {
  std::size_t num_nodes = 3000;
  std::size_t num_labels = 20;
  std::size_t num_features = 10;
  double alpha = 8.8;
  double b = 0.12;
  std::uint64_t seed = 0;
  /// Label-sphere radii are stratified over [min_sphere_radius, max_sphere_radius).
  double min_sphere_radius = 0.1;
  double max_sphere_radius = 0.78;

  /// Throws DataError describing the first violated constraint.
  void validate() const;
};

struct LabelSphere {
  Vector center;
  double radius = 0.0;

  bool contains(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
};

struct MultiLabelPoints {
  DenseMatrix points;              ///< n x m, inside the unit hypersphere
  std::vector<LabelSet> labels;    ///< sphere memberships, never empty
  std::vector<LabelSphere> spheres;
};

/// Stage 1: one sphere per label inside the unit hypersphere, then each point
/// is drawn uniformly inside a uniformly chosen sphere. Labels are all spheres
/// that contain the point.
MultiLabelPoints generate_multilabel_points(const GeneratorConfig& cfg);

/// Social-distance attachment: 1 / (1 + (d / b)^alpha), with 0^0 = 1.
double attachment_probability(double d, double alpha, double b);

/// Stage 2: every unordered pair (i, j) is joined independently with the
/// attachment probability of the normalized Hamming distance between label
/// vectors. The decision for (i, j) is a pure function of (seed, i, j).
MultiLabelGraph generate_graph(const DenseMatrix& features, const std::vector<LabelSet>& labels,
                               std::size_t num_labels, double alpha, double b, std::uint64_t seed);

/// Edge count and label homophily of the graph generate_graph would build,
/// without materializing it. Homophily is 0 when no edge is drawn.
struct AttachmentSummary {
  std::size_t num_edges = 0;
  double homophily = 0.0;
};
AttachmentSummary summarize_attachment(const std::vector<LabelSet>& labels, std::size_t num_labels, double alpha,
                                       double b, std::uint64_t seed);

struct CalibrationResult {
  double alpha = 0.0;
  double b = 0.0;
  double homophily = 0.0;
  MultiLabelGraph graph;
};

/// The 20-point (alpha, b) path: alpha = 0.5, 1.0, ..., 10 paired with
/// b = 0.25, 0.2375, ..., 0.0125. Position t in [0, 19] interpolates linearly.
std::pair<double, double> calibration_path(double t);

/// Sweeps the calibration path, brackets the target between adjacent grid
/// points and bisects. Throws CalibrationError (with the achievable range)
/// when no point within `tolerance` exists.
CalibrationResult calibrate_homophily(const DenseMatrix& features, const std::vector<LabelSet>& labels,
                                      std::size_t num_labels, double target, std::uint64_t seed,
                                      double tolerance = 0.05);

struct CorruptionConfig {
  std::size_t num_irrelevant = 10;
  double original_ratio = 1.0;

  std::size_t retained(std::size_t num_features) const;
};

/// Keeps the first round(original_ratio * m) feature columns and appends
/// num_irrelevant columns of standard-normal noise. Structure and labels are
/// unchanged.
MultiLabelGraph corrupt_features(const MultiLabelGraph& g, const CorruptionConfig& cc, std::uint64_t seed);

}  // namespace mlgb
