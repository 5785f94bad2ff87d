#pragma once

#include <filesystem>

#include "mlgb/graph.hpp"

namespace mlgb {

/// Reads a dataset directory:
///   meta.json     {"num_nodes", "num_labels", "num_features"}
///   edges.tsv     "u<TAB>v" per line
///   labels.tsv    "node<TAB>l1,l2,..." (empty list allowed; missing node = unlabeled)
///   features.tsv  "node<TAB>f1,...,fm" for every node
/// Throws FormatError naming file and line for malformed content.
MultiLabelGraph load_dataset(const std::filesystem::path& dir);

/// Writes the four files above. Features are written at 32-bit precision.
void save_dataset(const MultiLabelGraph& g, const std::filesystem::path& dir);

}  // namespace mlgb
