#include "mlgb/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>

#include "mlgb/baselines.hpp"
#include "mlgb/error.hpp"
#include "mlgb/lflf.hpp"
#include "mlgb/readout.hpp"

namespace mlgb {

namespace fs = std::filesystem;

namespace {

std::string format_loss(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<NamedMatrix> named(const ParamSet& params) {
  std::vector<NamedMatrix> out;
  for (const auto& t : params) out.emplace_back(t.name, t.value);
  return out;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + file.string());
  out << text;
  out.flush();
  if (!out) throw DataError("failed writing " + file.string());
}

}  // namespace

ModelRun run_model(const std::string& model, const MultiLabelGraph& g, const DataSplit& split,
                   const std::vector<ConfigEntry>& overrides, std::uint64_t seed, const fs::path& source) {
  ModelRun run;
  run.model = model;
  run.split_seed = split.seed;
  run.num_nodes = g.num_nodes();
  validate_split(split, g.num_nodes());

  if (is_lflf_model(model)) {
    LflfConfig cfg = lflf_config_for(model, overrides, source);
    cfg.seed = seed;
    run.config_echo = echo(cfg);
    LflfModel net(cfg, g.num_features(), g.num_labels());
    TrainResult r = train_lflf(net, g, split);
    run.params = named(net.params());
    run.train_log = "epoch\tloss\n";
    for (std::size_t e = 0; e < r.loss_history.size(); ++e)
      run.train_log += std::to_string(e) + "\t" + format_loss(r.loss_history[e]) + "\n";
    run.output = std::move(r.embedding);
    run.mean_beta = std::move(r.mean_beta);
    run.mean_gamma = std::move(r.mean_gamma);
    return run;
  }

  BaselineConfig cfg = baseline_config_for(model, overrides, source);
  cfg.seed = seed;
  run.config_echo = echo(cfg);
  if (cfg.kind == BaselineKind::kDeepWalk) {
    run.output = deepwalk_embed(g, cfg);
    run.params = {{"embedding", run.output}};
    run.train_log = "epoch\tloss\n";
    return run;
  }
  SupervisedNet net(cfg.kind, cfg, g.num_features(), g.num_labels());
  SupervisedResult r = train_supervised(net, g, split, cfg);
  run.params = named(net.params());
  run.train_log = "epoch\tloss\tval_loss\n";
  for (std::size_t e = 0; e < r.train_loss.size(); ++e)
    run.train_log += std::to_string(e) + "\t" + format_loss(r.train_loss[e]) + "\t" + format_loss(r.val_loss[e]) + "\n";
  run.output = std::move(r.scores);
  run.output_is_scores = true;
  return run;
}

PredictionSet predictions_for(const ModelRun& run, const MultiLabelGraph& g, const DataSplit& split,
                              double readout_l2) {
  if (run.num_nodes != g.num_nodes() || static_cast<std::size_t>(run.output.rows()) != g.num_nodes())
    throw DataError("model was trained on a graph with " + std::to_string(run.num_nodes) + " nodes, dataset has " +
                    std::to_string(g.num_nodes()));
  if (run.split_seed != split.seed)
    throw DataError("model was trained on split " + std::to_string(run.split_seed) + ", not split " +
                    std::to_string(split.seed));
  if (run.output_is_scores) return make_prediction_set(g, run.output, split.test);
  ReadoutOptions opts;
  opts.l2 = readout_l2;
  return logistic_readout(run.output, g, split, opts);
}

void save_model_dir(const ModelRun& run, const fs::path& dir) {
  fs::create_directories(dir);
  std::string header;
  header += "model = \"" + run.model + "\"\n";
  header += "split_seed = " + std::to_string(run.split_seed) + "\n";
  header += "num_nodes = " + std::to_string(run.num_nodes) + "\n";
  header += "\n[" + run.model + "]\n";
  write_text(dir / "config.txt", header + run.config_echo);
  write_tensors(dir / "params.bin", run.params);
  const char* out_name = run.output_is_scores ? "scores.bin" : "embedding.bin";
  write_tensors(dir / out_name, {{run.output_is_scores ? "scores" : "embedding", run.output}});
  write_text(dir / "train_log.tsv", run.train_log);
}

ModelRun load_model_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("model directory not found: " + dir.string());
  const ConfigFile cfg = read_config(dir / "config.txt");
  ModelRun run;
  for (const auto& e : *cfg.section("")) {
    if (e.key == "model" && e.value.is_string()) run.model = e.value.get<std::string>();
    else if (e.key == "split_seed" && e.value.is_number_unsigned()) run.split_seed = e.value.get<std::uint64_t>();
    else if (e.key == "num_nodes" && e.value.is_number_unsigned()) run.num_nodes = e.value.get<std::size_t>();
  }
  if (run.model.empty()) throw FormatError((dir / "config.txt").string() + ": missing model name");
  if (const auto* s = cfg.section(run.model)) {
    // Re-validate the stored echo so a hand-edited directory fails early.
    if (is_lflf_model(run.model)) run.config_echo = echo(lflf_config_for(run.model, *s, cfg.source));
    else run.config_echo = echo(baseline_config_for(run.model, *s, cfg.source));
  }
  run.params = read_tensors(dir / "params.bin");
  run.output_is_scores = fs::exists(dir / "scores.bin");
  const auto out = read_tensors(dir / (run.output_is_scores ? "scores.bin" : "embedding.bin"));
  if (out.size() != 1) throw FormatError(dir.string() + ": output file must hold exactly one tensor");
  run.output = out.front().second;
  if (fs::exists(dir / "train_log.tsv")) {
    std::ifstream in(dir / "train_log.tsv", std::ios::binary);
    run.train_log.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return run;
}

}  // namespace mlgb
