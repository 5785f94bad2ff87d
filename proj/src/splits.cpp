#include "mlgb/splits.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "mlgb/error.hpp"
#include "mlgb/random.hpp"

namespace mlgb {

namespace fs = std::filesystem;

DataSplit make_splits(std::size_t n, SplitRatios ratios, std::uint64_t seed) {
  if (!(ratios.train > 0 && ratios.val > 0 && ratios.test > 0))
    throw DataError("split ratios must be positive");
  if (std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9)
    throw DataError("split ratios must sum to 1");
  if (n == 0) throw DataError("cannot split an empty graph");

  std::vector<NodeId> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<NodeId>(i);
  RandomStream rng(seed, StreamTag::kSplit);
  shuffle(std::span<NodeId>(perm), rng);

  // Tiny epsilon so that e.g. 0.2 * 10 is not floored to 1 by representation error.
  const auto n_val = static_cast<std::size_t>(std::floor(ratios.val * static_cast<double>(n) + 1e-9));
  const auto n_test = static_cast<std::size_t>(std::floor(ratios.test * static_cast<double>(n) + 1e-9));
  const std::size_t n_train = n - n_val - n_test;

  DataSplit s;
  s.seed = seed;
  s.ratios = ratios;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
               perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), perm.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

void validate_split(const DataSplit& s, std::size_t n) {
  std::vector<int> count(n, 0);
  for (const auto* part : {&s.train, &s.val, &s.test})
    for (const NodeId v : *part) {
      if (v >= n) throw DataError("split references node " + std::to_string(v) + " >= n");
      ++count[v];
    }
  for (std::size_t v = 0; v < n; ++v)
    if (count[v] != 1)
      throw DataError("split is not a partition: node " + std::to_string(v) + " appears " +
                      std::to_string(count[v]) + " times");
}

void save_split(const DataSplit& s, const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  nlohmann::json j = {{"train", s.train}, {"val", s.val}, {"test", s.test}, {"seed", s.seed}};
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DataError("cannot write " + file.string());
  out << j.dump() << '\n';
}

DataSplit load_split(const fs::path& file, std::size_t n) {
  std::ifstream in(file);
  if (!in) throw DataError("missing file: " + file.string());
  DataSplit s;
  try {
    nlohmann::json j;
    in >> j;
    s.train = j.at("train").get<std::vector<NodeId>>();
    s.val = j.at("val").get<std::vector<NodeId>>();
    s.test = j.at("test").get<std::vector<NodeId>>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(file.filename().string() + ": " + e.what());
  }
  const double total = static_cast<double>(n);
  if (n > 0)
    s.ratios = {static_cast<double>(s.train.size()) / total, static_cast<double>(s.val.size()) / total,
                static_cast<double>(s.test.size()) / total};
  validate_split(s, n);
  return s;
}

DataSplit split_for_seed(const fs::path& dataset_dir, std::size_t n, std::uint64_t seed) {
  const auto file = dataset_dir / "splits" / (std::to_string(seed) + ".json");
  if (fs::exists(file)) return load_split(file, n);
  return make_splits(n, SplitRatios{}, seed);
}

}  // namespace mlgb
