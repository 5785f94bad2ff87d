#include "mlgb/benchmark.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>
#include <optional>
#include <thread>

#include "mlgb/dataset_io.hpp"
#include "mlgb/pipeline.hpp"
#include "mlgb/splits.hpp"

namespace mlgb {

namespace fs = std::filesystem;

namespace {

std::string dataset_name(const fs::path& p) {
  auto norm = p.lexically_normal();
  if (norm.filename().empty()) norm = norm.parent_path();
  return norm.filename().string();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' || c == '\r' ? ' ' : c;
  }
  return out + "\"";
}

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::vector<BenchRow> run_benchmark(const BenchConfig& cfg, std::size_t jobs, const LogFn& log) {
  std::mutex log_mutex;
  auto say = [&](const std::string& msg) {
    if (!log) return;
    std::lock_guard lock(log_mutex);
    log(msg);
  };

  // Datasets are loaded once and shared read-only by all cells.
  struct Loaded {
    std::optional<MultiLabelGraph> graph;
    std::string error;
  };
  std::vector<Loaded> data(cfg.datasets.size());
  for (std::size_t d = 0; d < cfg.datasets.size(); ++d) {
    try {
      data[d].graph = load_dataset(cfg.datasets[d]);
    } catch (const std::exception& ex) {
      data[d].error = ex.what();
    }
  }

  std::vector<BenchRow> rows(cfg.models.size() * cfg.datasets.size());
  auto run_cell = [&](std::size_t cell) {
    const std::string& model = cfg.models[cell / cfg.datasets.size()];
    const std::size_t d = cell % cfg.datasets.size();
    BenchRow& row = rows[cell];
    row.model = model;
    row.dataset = dataset_name(cfg.datasets[d]);
    row.seed_count = cfg.seeds.size();
    if (!data[d].graph) {
      row.error = data[d].error;
      return;
    }
    const MultiLabelGraph& g = *data[d].graph;
    const auto it = cfg.overrides.find(model);
    const std::vector<ConfigEntry> none;
    const auto& overrides = it == cfg.overrides.end() ? none : it->second;
    try {
      std::vector<MetricValues> per_split;
      for (const std::uint64_t seed : cfg.seeds) {
        say("benchmark: " + model + " on " + row.dataset + " seed " + std::to_string(seed));
        const DataSplit split = split_for_seed(cfg.datasets[d], g.num_nodes(), seed);
        const ModelRun run = run_model(model, g, split, overrides, seed);
        per_split.push_back(evaluate_predictions(predictions_for(run, g, split, cfg.readout_l2)));
      }
      row.report = summarize(std::move(per_split));
    } catch (const std::exception& ex) {
      row.error = ex.what();
      say("benchmark: " + model + " on " + row.dataset + " failed: " + row.error);
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, rows.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t cell; (cell = next.fetch_add(1)) < rows.size();) run_cell(cell);
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return rows;
}

std::string benchmark_csv(const std::vector<BenchRow>& rows) {
  std::string out =
      "model,dataset,seed_count,micro_f1_mean,micro_f1_std,macro_f1_mean,macro_f1_std,macro_auroc_mean,"
      "macro_auroc_std,macro_ap_mean,macro_ap_std,skipped_labels_auroc,skipped_labels_ap,error\n";
  for (const auto& r : rows) {
    out += csv_field(r.model) + "," + csv_field(r.dataset) + "," + std::to_string(r.seed_count);
    if (r.error.empty()) {
      for (const MetricSummary* s : {&r.report.micro_f1, &r.report.macro_f1, &r.report.macro_auroc, &r.report.macro_ap})
        out += "," + fixed(s->mean) + "," + fixed(s->std);
      out += "," + std::to_string(r.report.skipped_auroc) + "," + std::to_string(r.report.skipped_ap) + ",";
    } else {
      out += ",,,,,,,,,,," + csv_field(r.error);
    }
    out += "\n";
  }
  return out;
}

}  // namespace mlgb
