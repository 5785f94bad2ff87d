#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mlgb/config.hpp"
#include "mlgb/metrics.hpp"

namespace mlgb {

/// One (model, dataset) cell of the benchmark matrix.
struct BenchRow {
  std::string model;
  std::string dataset;
  std::size_t seed_count = 0;
  EvalReport report;
  std::string error;  ///< empty on success
};

using LogFn = std::function<void(const std::string&)>;

/// Runs every (model, dataset) cell over all seeds. Cells run on up to `jobs`
/// worker threads; rows come back in config order (models outer, datasets
/// inner). A failing cell records its error and the matrix continues.
std::vector<BenchRow> run_benchmark(const BenchConfig& cfg, std::size_t jobs = 1, const LogFn& log = {});

/// CSV with a header row; metrics in fixed %.6f notation.
std::string benchmark_csv(const std::vector<BenchRow>& rows);

}  // namespace mlgb
