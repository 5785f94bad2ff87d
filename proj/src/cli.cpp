#include "mlgb/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "mlgb/benchmark.hpp"
#include "mlgb/config.hpp"
#include "mlgb/dataset_io.hpp"
#include "mlgb/error.hpp"
#include "mlgb/generator.hpp"
#include "mlgb/label_metrics.hpp"
#include "mlgb/pipeline.hpp"
#include "mlgb/splits.hpp"
#include "mlgb/stats.hpp"

namespace mlgb {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void log(const std::string& msg) { std::cerr << "mlgb: " << msg << '\n'; }

void write_file(const fs::path& file, const std::string& text) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + file.string());
  out << text;
  out.flush();
  if (!out) throw DataError("failed writing " + file.string());
}

// --seed, else MLGB_SEED, else the fallback.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
  if (flag) return *flag;
  if (const char* env = std::getenv("MLGB_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || env[0] == '-') throw UsageError(std::string("MLGB_SEED is not an unsigned integer: ") + env);
    return v;
  }
  return fallback;
}

std::string ccns_csv(const CcnsMatrix& m) {
  std::string out = "class";
  for (Eigen::Index c = 0; c < m.s.cols(); ++c) out += "," + std::to_string(c);
  out += "\n";
  char buf[40];
  for (Eigen::Index r = 0; r < m.s.rows(); ++r) {
    out += std::to_string(r);
    for (Eigen::Index c = 0; c < m.s.cols(); ++c) {
      std::snprintf(buf, sizeof buf, ",%.10g", m.s(r, c));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

void check_ratio(double v, const char* flag) {
  if (!(v > 0.0 && v < 1.0)) throw UsageError(std::string(flag) + " must be in (0, 1), got " + std::to_string(v));
}

struct GenerateArgs {
  GeneratorConfig gen;
  std::optional<std::uint64_t> seed;
  std::optional<double> target;
  double tolerance = 0.05;
  std::string out;
};

void cmd_generate(const GenerateArgs& a) {
  GeneratorConfig cfg = a.gen;
  cfg.seed = resolve_seed(a.seed, 0);
  cfg.validate();
  log("generating " + std::to_string(cfg.num_nodes) + " nodes, " + std::to_string(cfg.num_labels) + " labels");
  const MultiLabelPoints pts = generate_multilabel_points(cfg);
  json info{{"num_nodes", cfg.num_nodes},
            {"num_labels", cfg.num_labels},
            {"num_features", cfg.num_features},
            {"seed", cfg.seed},
            {"min_sphere_radius", cfg.min_sphere_radius},
            {"max_sphere_radius", cfg.max_sphere_radius}};
  std::optional<MultiLabelGraph> g;
  if (a.target) {
    CalibrationResult r = calibrate_homophily(pts.points, pts.labels, cfg.num_labels, *a.target, cfg.seed, a.tolerance);
    log("calibrated alpha=" + std::to_string(r.alpha) + " b=" + std::to_string(r.b) +
        " homophily=" + std::to_string(r.homophily));
    info["alpha"] = r.alpha;
    info["b"] = r.b;
    info["target_homophily"] = *a.target;
    info["homophily"] = r.homophily;
    g = std::move(r.graph);
  } else {
    g = generate_graph(pts.points, pts.labels, cfg.num_labels, cfg.alpha, cfg.b, cfg.seed);
    info["alpha"] = cfg.alpha;
    info["b"] = cfg.b;
  }
  info["num_edges"] = g->num_edges();
  save_dataset(*g, a.out);
  write_file(fs::path(a.out) / "generator.json", info.dump(2) + "\n");
  log("wrote " + a.out + " (" + std::to_string(g->num_edges()) + " edges)");
}

struct CorruptArgs {
  CorruptionConfig cc;
  std::optional<std::uint64_t> seed;
  std::string in, out;
};

void cmd_corrupt(const CorruptArgs& a) {
  if (!(a.cc.original_ratio >= 0.0 && a.cc.original_ratio <= 1.0))
    throw UsageError("--ratio must be in [0, 1]");
  const MultiLabelGraph g = load_dataset(a.in);
  const MultiLabelGraph out = corrupt_features(g, a.cc, resolve_seed(a.seed, 0));
  save_dataset(out, a.out);
  log("wrote " + a.out + " (" + std::to_string(out.num_features()) + " features)");
}

struct AnalyzeArgs {
  std::string data, out;
};

void cmd_analyze(const AnalyzeArgs& a) {
  const MultiLabelGraph g = load_dataset(a.data);
  const fs::path out = a.out.empty() ? fs::path(a.data) : fs::path(a.out);
  fs::create_directories(out);
  write_file(out / "stats.json", to_json(dataset_stats(g)).dump(2) + "\n");
  write_file(out / "ccns.csv", ccns_csv(ccns(g)));
  log("wrote stats.json and ccns.csv to " + out.string());
}

struct SplitArgs {
  std::string data, out;
  SplitRatios ratios;
  std::optional<std::uint64_t> seed;
};

void cmd_split(const SplitArgs& a) {
  check_ratio(a.ratios.train, "--train");
  check_ratio(a.ratios.val, "--val");
  check_ratio(a.ratios.test, "--test");
  if (std::abs(a.ratios.train + a.ratios.val + a.ratios.test - 1.0) > 1e-9)
    throw UsageError("--train, --val and --test must sum to 1");
  const MultiLabelGraph g = load_dataset(a.data);
  const std::uint64_t seed = resolve_seed(a.seed, 0);
  const DataSplit s = make_splits(g, a.ratios, seed);
  const fs::path out = a.out.empty() ? fs::path(a.data) / "splits" / (std::to_string(seed) + ".json") : fs::path(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_split(s, out);
  log("wrote " + out.string());
}

struct TrainArgs {
  std::string model, data, config, out;
  std::uint64_t split = 0;
  std::optional<std::uint64_t> seed;
};

void cmd_train(const TrainArgs& a) {
  std::vector<ConfigEntry> entries;
  fs::path source = "<defaults>";
  std::optional<std::uint64_t> config_seed;
  if (!a.config.empty()) {
    const ConfigFile file = read_config(a.config);
    source = file.source;
    entries = *file.section("");
    if (const auto* s = file.section(a.model)) entries.insert(entries.end(), s->begin(), s->end());
    for (const auto& e : entries)
      if (e.key == "seed" && e.value.is_number_unsigned()) config_seed = e.value.get<std::uint64_t>();
  }
  const std::uint64_t seed = a.seed ? *a.seed : config_seed ? *config_seed : resolve_seed(std::nullopt, 0);
  const MultiLabelGraph g = load_dataset(a.data);
  const DataSplit split = split_for_seed(a.data, g.num_nodes(), a.split);
  log("training " + a.model + " on " + a.data + " (split " + std::to_string(a.split) + ", seed " +
      std::to_string(seed) + ")");
  const ModelRun run = run_model(a.model, g, split, entries, seed, source);
  save_model_dir(run, a.out);
  for (std::size_t k = 0; k < run.mean_beta.size(); ++k)
    log("layer " + std::to_string(k) + ": mean beta " + std::to_string(run.mean_beta[k]) + ", mean gamma " +
        std::to_string(run.mean_gamma[k]));
  log("wrote " + a.out);
}

struct EvaluateArgs {
  std::string model, data, out;
  std::uint64_t split = 0;
  double l2 = 1.0;
};

void cmd_evaluate(const EvaluateArgs& a) {
  if (!(a.l2 > 0.0)) throw UsageError("--l2 must be positive");
  const ModelRun run = load_model_dir(a.model);
  const MultiLabelGraph g = load_dataset(a.data);
  const DataSplit split = split_for_seed(a.data, g.num_nodes(), a.split);
  const MetricValues m = evaluate_predictions(predictions_for(run, g, split, a.l2));
  json cfg{{"model", run.model}, {"split", a.split}, {"readout_l2", a.l2}};
  json report = to_json(summarize({m}, cfg));
  write_file(a.out, report.dump(2) + "\n");
  log("macro AP " + std::to_string(m.macro_ap) + ", wrote " + a.out);
}

struct BenchmarkArgs {
  std::string config, out;
  std::size_t jobs = 1;
  std::optional<std::uint64_t> seed;
};

void cmd_benchmark(const BenchmarkArgs& a) {
  if (a.jobs == 0) throw UsageError("--jobs must be at least 1");
  BenchConfig cfg = validate_config(a.config);
  if (a.seed) cfg.seeds = {*a.seed};
  const auto rows = run_benchmark(cfg, a.jobs, log);
  fs::path out = a.out;
  if (out.empty()) {
    if (cfg.output_dir.empty()) throw UsageError("benchmark needs --out or output_dir in the config");
    out = cfg.output_dir / "results.csv";
  }
  write_file(out, benchmark_csv(rows));
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.error.empty() ? 0 : 1;
  log("wrote " + out.string() + " (" + std::to_string(rows.size()) + " rows, " + std::to_string(failed) +
      " failed)");
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Multi-label graph benchmark toolkit"};
  app.name("mlgb");
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic multi-label graph");
  generate->add_option("--nodes", gen.gen.num_nodes, "Number of nodes")->capture_default_str();
  generate->add_option("--labels", gen.gen.num_labels, "Number of labels")->capture_default_str();
  generate->add_option("--features", gen.gen.num_features, "Feature dimension")->capture_default_str();
  generate->add_option("--alpha", gen.gen.alpha, "Attachment exponent")->capture_default_str();
  generate->add_option("--b", gen.gen.b, "Attachment characteristic distance")->capture_default_str();
  generate->add_option("--min-radius", gen.gen.min_sphere_radius, "Smallest label-sphere radius")
      ->capture_default_str();
  generate->add_option("--max-radius", gen.gen.max_sphere_radius, "Largest label-sphere radius")
      ->capture_default_str();
  generate->add_option("--target-homophily", gen.target, "Calibrate alpha and b to this label homophily");
  generate->add_option("--tolerance", gen.tolerance, "Calibration tolerance")->capture_default_str();
  generate->add_option("--seed", gen.seed, "Random seed (default: MLGB_SEED or 0)");
  generate->add_option("--out", gen.out, "Output dataset directory")->required();

  CorruptArgs cor;
  auto* corrupt = app.add_subcommand("corrupt", "Replace features by a mix of original and noise columns");
  corrupt->add_option("--ratio", cor.cc.original_ratio, "Fraction of original feature columns kept")
      ->capture_default_str();
  corrupt->add_option("--irrelevant", cor.cc.num_irrelevant, "Number of noise columns")->capture_default_str();
  corrupt->add_option("--seed", cor.seed, "Random seed (default: MLGB_SEED or 0)");
  corrupt->add_option("--in", cor.in, "Input dataset directory")->required();
  corrupt->add_option("--out", cor.out, "Output dataset directory")->required();

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Write stats.json and ccns.csv for a dataset");
  analyze->add_option("data", an.data, "Dataset directory")->required();
  analyze->add_option("--out", an.out, "Output directory (default: the dataset directory)");

  SplitArgs sp;
  auto* split = app.add_subcommand("split", "Write a random train/val/test split");
  split->add_option("--data", sp.data, "Dataset directory")->required();
  split->add_option("--train", sp.ratios.train, "Train fraction")->capture_default_str();
  split->add_option("--val", sp.ratios.val, "Validation fraction")->capture_default_str();
  split->add_option("--test", sp.ratios.test, "Test fraction")->capture_default_str();
  split->add_option("--seed", sp.seed, "Split seed (default: MLGB_SEED or 0)");
  split->add_option("--out", sp.out, "Output file (default: DATA/splits/SEED.json)");

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Train a model and write a model directory");
  train->add_option("--model", tr.model, "Model name")->required()->check(CLI::IsMember(model_names()));
  train->add_option("--data", tr.data, "Dataset directory")->required();
  train->add_option("--split", tr.split, "Split seed")->capture_default_str();
  train->add_option("--config", tr.config, "Config file with hyperparameter overrides");
  train->add_option("--seed", tr.seed, "Model seed (default: config, then MLGB_SEED, then 0)");
  train->add_option("--out", tr.out, "Output model directory")->required();

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score a trained model on its test split");
  evaluate->add_option("--model", ev.model, "Model directory")->required();
  evaluate->add_option("--data", ev.data, "Dataset directory")->required();
  evaluate->add_option("--split", ev.split, "Split seed")->capture_default_str();
  evaluate->add_option("--l2", ev.l2, "Readout L2 strength")->capture_default_str();
  evaluate->add_option("--out", ev.out, "Report JSON file")->required();

  BenchmarkArgs be;
  auto* bench = app.add_subcommand("benchmark", "Run a model x dataset x seed matrix");
  bench->add_option("--config", be.config, "Benchmark config file")->required();
  bench->add_option("--out", be.out, "Results CSV (default: OUTPUT_DIR/results.csv)");
  bench->add_option("--jobs", be.jobs, "Worker threads")->capture_default_str();
  bench->add_option("--seed", be.seed, "Run a single seed instead of the configured list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "mlgb: " << e.what() << "\n\n";
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    std::cerr << sub->help();
    return 1;
  }

  try {
    if (generate->parsed()) cmd_generate(gen);
    else if (corrupt->parsed()) cmd_corrupt(cor);
    else if (analyze->parsed()) cmd_analyze(an);
    else if (split->parsed()) cmd_split(sp);
    else if (train->parsed()) cmd_train(tr);
    else if (evaluate->parsed()) cmd_evaluate(ev);
    else if (bench->parsed()) cmd_benchmark(be);
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "mlgb: " << e.what() << "\n\n" << app.get_subcommands().front()->help();
    return 1;
  } catch (const DataError& e) {
    std::cerr << "mlgb: error: " << e.what() << '\n';
    return 2;
  } catch (const DivergenceError& e) {
    std::cerr << "mlgb: error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "mlgb: error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mlgb: error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace mlgb
