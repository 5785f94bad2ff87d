#include "mlgb/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "mlgb/error.hpp"

namespace mlgb {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Drops a trailing comment that is not inside a double-quoted string.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

bool valid_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

std::string where(const fs::path& source, std::size_t line) {
  return source.string() + ":" + std::to_string(line) + ": ";
}

// Field setters keyed by name; each returns an error message or "".
template <class Cfg>
using Setter = std::function<std::string(Cfg&, const json&)>;

template <class T>
std::string read_count(const json& v, T& out) {
  if (!v.is_number_integer() || v.get<long long>() < 0) return "expected a non-negative integer";
  out = static_cast<T>(v.get<long long>());
  return {};
}

std::string read_int(const json& v, int& out) {
  if (!v.is_number_integer()) return "expected an integer";
  out = v.get<int>();
  return {};
}

std::string read_real(const json& v, double& out) {
  if (!v.is_number()) return "expected a number";
  out = v.get<double>();
  return {};
}

std::string read_bool(const json& v, bool& out) {
  if (!v.is_boolean()) return "expected true or false";
  out = v.get<bool>();
  return {};
}

std::string read_count_list(const json& v, std::vector<std::size_t>& out) {
  if (!v.is_array()) return "expected an array of integers";
  std::vector<std::size_t> tmp;
  for (const auto& x : v) {
    std::size_t k = 0;
    if (auto e = read_count(x, k); !e.empty()) return "expected an array of non-negative integers";
    tmp.push_back(k);
  }
  out = std::move(tmp);
  return {};
}

#define MLGB_FIELD(name, reader) \
  { #name, [](Cfg& c, const json& v) { return reader(v, c.name); } }

const std::map<std::string, Setter<LflfConfig>>& lflf_fields() {
  using Cfg = LflfConfig;
  static const std::map<std::string, Setter<Cfg>> fields{
      MLGB_FIELD(num_layers, read_count),
      MLGB_FIELD(hidden_dim, read_count),
      MLGB_FIELD(attention_dim, read_count),
      MLGB_FIELD(learning_rate, read_real),
      MLGB_FIELD(weight_decay, read_real),
      MLGB_FIELD(patience, read_int),
      MLGB_FIELD(max_epochs, read_int),
      MLGB_FIELD(pos_samples, read_count),
      MLGB_FIELD(neg_samples, read_count),
      MLGB_FIELD(sage_fanout, read_count_list),
      MLGB_FIELD(update_label_correlation, read_bool),
      MLGB_FIELD(seed, read_count),
  };
  return fields;
}

const std::map<std::string, Setter<BaselineConfig>>& baseline_fields() {
  using Cfg = BaselineConfig;
  static const std::map<std::string, Setter<Cfg>> fields{
      MLGB_FIELD(hidden_dim, read_count),
      MLGB_FIELD(num_layers, read_count),
      MLGB_FIELD(learning_rate, read_real),
      MLGB_FIELD(weight_decay, read_real),
      MLGB_FIELD(patience, read_int),
      MLGB_FIELD(max_epochs, read_int),
      MLGB_FIELD(num_walks, read_count),
      MLGB_FIELD(walk_length, read_count),
      MLGB_FIELD(window, read_count),
      MLGB_FIELD(embedding_dim, read_count),
      MLGB_FIELD(negatives, read_count),
      MLGB_FIELD(walk_epochs, read_count),
      MLGB_FIELD(walk_learning_rate, read_real),
      MLGB_FIELD(seed, read_count),
  };
  return fields;
}

#undef MLGB_FIELD

template <class Cfg>
std::vector<std::string> apply_fields(Cfg& cfg, const std::map<std::string, Setter<Cfg>>& fields,
                                      const std::vector<ConfigEntry>& entries, const fs::path& source) {
  std::vector<std::string> errors;
  for (const auto& e : entries) {
    const auto it = fields.find(e.key);
    if (it == fields.end()) {
      errors.push_back(where(source, e.line) + "unknown key '" + e.key + "'");
      continue;
    }
    if (auto msg = it->second(cfg, e.value); !msg.empty())
      errors.push_back(where(source, e.line) + e.key + ": " + msg);
  }
  return errors;
}

template <class Cfg>
void validate_into(const Cfg& cfg, const std::string& model, std::vector<std::string>& errors) {
  try {
    cfg.validate();
  } catch (const std::exception& ex) {
    errors.push_back(model + ": " + ex.what());
  }
}

std::string kv(const std::string& key, const json& value) { return key + " = " + value.dump() + "\n"; }

}  // namespace

const std::vector<ConfigEntry>* ConfigFile::section(const std::string& name) const {
  const auto it = sections.find(name);
  return it == sections.end() ? nullptr : &it->second;
}

ConfigFile parse_config(const std::string& text, const fs::path& source) {
  ConfigFile cfg;
  cfg.source = source;
  cfg.sections[""];
  std::vector<std::string> errors;
  std::istringstream in(text);
  std::string raw, current;
  for (std::size_t line_no = 1; std::getline(in, raw); ++line_no) {
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || !valid_name(trim(line.substr(1, line.size() - 2)))) {
        errors.push_back(where(source, line_no) + "malformed section header");
        continue;
      }
      current = trim(line.substr(1, line.size() - 2));
      if (cfg.sections.count(current)) {
        errors.push_back(where(source, line_no) + "duplicate section [" + current + "]");
        continue;
      }
      cfg.sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where(source, line_no) + "expected 'key = value'");
      continue;
    }
    ConfigEntry e;
    e.key = trim(line.substr(0, eq));
    e.line = line_no;
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_name(e.key)) {
      errors.push_back(where(source, line_no) + "invalid key '" + e.key + "'");
      continue;
    }
    if (value.empty()) {
      errors.push_back(where(source, line_no) + "missing value for '" + e.key + "'");
      continue;
    }
    e.value = json::parse(value, nullptr, false);
    if (e.value.is_discarded()) {
      if (!valid_name(value)) {
        errors.push_back(where(source, line_no) + "cannot parse value for '" + e.key + "'");
        continue;
      }
      e.value = value;
    }
    auto& entries = cfg.sections[current];
    if (std::any_of(entries.begin(), entries.end(), [&](const ConfigEntry& x) { return x.key == e.key; })) {
      errors.push_back(where(source, line_no) + "duplicate key '" + e.key + "'");
      continue;
    }
    entries.push_back(std::move(e));
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

ConfigFile read_config(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot read config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), file);
}

const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names{"mlp", "gcn", "deepwalk", "lflf-gcn", "lflf-sage"};
  return names;
}

bool is_lflf_model(const std::string& name) { return name == "lflf-gcn" || name == "lflf-sage"; }

std::vector<std::string> apply_overrides(LflfConfig& cfg, const std::vector<ConfigEntry>& entries,
                                         const fs::path& source) {
  return apply_fields(cfg, lflf_fields(), entries, source);
}

std::vector<std::string> apply_overrides(BaselineConfig& cfg, const std::vector<ConfigEntry>& entries,
                                         const fs::path& source) {
  return apply_fields(cfg, baseline_fields(), entries, source);
}

LflfConfig lflf_config_for(const std::string& model, const std::vector<ConfigEntry>& entries,
                           const fs::path& source) {
  if (!is_lflf_model(model)) throw UsageError("not an LFLF model: " + model);
  LflfConfig cfg;
  cfg.aggregation = model == "lflf-sage" ? Aggregation::kSageMean : Aggregation::kGcn;
  auto errors = apply_overrides(cfg, entries, source);
  if (errors.empty()) validate_into(cfg, model, errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

BaselineConfig baseline_config_for(const std::string& model, const std::vector<ConfigEntry>& entries,
                                   const fs::path& source) {
  BaselineConfig cfg;
  if (model == "mlp") cfg.kind = BaselineKind::kMlp;
  else if (model == "gcn") cfg.kind = BaselineKind::kGcn;
  else if (model == "deepwalk") cfg.kind = BaselineKind::kDeepWalk;
  else throw UsageError("not a baseline model: " + model);
  auto errors = apply_overrides(cfg, entries, source);
  if (errors.empty()) validate_into(cfg, model, errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

std::string echo(const LflfConfig& c) {
  std::string out;
  out += kv("num_layers", c.num_layers);
  out += kv("hidden_dim", c.hidden_dim);
  out += kv("attention_dim", c.attention_dim);
  out += kv("learning_rate", c.learning_rate);
  out += kv("weight_decay", c.weight_decay);
  out += kv("patience", c.patience);
  out += kv("max_epochs", c.max_epochs);
  out += kv("pos_samples", c.pos_samples);
  out += kv("neg_samples", c.neg_samples);
  out += kv("sage_fanout", c.sage_fanout);
  out += kv("update_label_correlation", c.update_label_correlation);
  out += kv("seed", c.seed);
  return out;
}

std::string echo(const BaselineConfig& c) {
  std::string out;
  out += kv("hidden_dim", c.hidden_dim);
  out += kv("num_layers", c.num_layers);
  out += kv("learning_rate", c.learning_rate);
  out += kv("weight_decay", c.weight_decay);
  out += kv("patience", c.patience);
  out += kv("max_epochs", c.max_epochs);
  out += kv("num_walks", c.num_walks);
  out += kv("walk_length", c.walk_length);
  out += kv("window", c.window);
  out += kv("embedding_dim", c.embedding_dim);
  out += kv("negatives", c.negatives);
  out += kv("walk_epochs", c.walk_epochs);
  out += kv("walk_learning_rate", c.walk_learning_rate);
  out += kv("seed", c.seed);
  return out;
}

BenchConfig validate_config(const fs::path& file) { return validate_config(read_config(file)); }

BenchConfig validate_config(const ConfigFile& file) {
  BenchConfig bc;
  std::vector<std::string> errors;
  const fs::path base = file.source.has_parent_path() ? file.source.parent_path() : fs::path(".");
  const auto& top = *file.section("");
  bool have_datasets = false, have_models = false, have_seeds = false;

  auto string_list = [&](const ConfigEntry& e, std::vector<std::string>& out) {
    if (e.value.is_string()) {
      out.push_back(e.value.get<std::string>());
      return true;
    }
    if (!e.value.is_array() || e.value.empty()) return false;
    for (const auto& x : e.value) {
      if (!x.is_string()) return false;
      out.push_back(x.get<std::string>());
    }
    return true;
  };

  for (const auto& e : top) {
    const std::string at = where(file.source, e.line);
    if (e.key == "datasets") {
      have_datasets = true;
      std::vector<std::string> names;
      if (!string_list(e, names)) {
        errors.push_back(at + "datasets: expected a non-empty list of paths");
        continue;
      }
      for (const auto& n : names) {
        const fs::path p = fs::path(n).is_absolute() ? fs::path(n) : base / n;
        if (!fs::is_directory(p)) errors.push_back(at + "dataset directory not found: " + p.string());
        bc.datasets.push_back(p);
      }
    } else if (e.key == "models") {
      have_models = true;
      if (!string_list(e, bc.models)) {
        errors.push_back(at + "models: expected a non-empty list of model names");
        continue;
      }
      for (const auto& m : bc.models)
        if (std::find(model_names().begin(), model_names().end(), m) == model_names().end())
          errors.push_back(at + "unknown model '" + m + "'");
    } else if (e.key == "seeds") {
      have_seeds = true;
      const json v = e.value.is_array() ? e.value : json::array({e.value});
      bool ok = !v.empty();
      for (const auto& x : v) {
        if (!x.is_number_integer() || x.get<long long>() < 0) {
          ok = false;
          break;
        }
        bc.seeds.push_back(x.get<std::uint64_t>());
      }
      if (!ok) errors.push_back(at + "seeds: expected a non-empty list of non-negative integers");
    } else if (e.key == "output_dir") {
      if (!e.value.is_string()) {
        errors.push_back(at + "output_dir: expected a string");
        continue;
      }
      const fs::path p = e.value.get<std::string>();
      bc.output_dir = p.is_absolute() ? p : base / p;
    } else if (e.key == "readout_l2") {
      if (!e.value.is_number() || !(e.value.get<double>() > 0.0))
        errors.push_back(at + "readout_l2: expected a positive number");
      else
        bc.readout_l2 = e.value.get<double>();
    } else {
      errors.push_back(at + "unknown key '" + e.key + "'");
    }
  }
  const std::string src = file.source.string() + ": ";
  if (!have_datasets) errors.push_back(src + "missing required key 'datasets'");
  if (!have_models) errors.push_back(src + "missing required key 'models'");
  if (!have_seeds) errors.push_back(src + "missing required key 'seeds'");

  for (const auto& [name, entries] : file.sections) {
    if (name.empty()) continue;
    if (std::find(model_names().begin(), model_names().end(), name) == model_names().end()) {
      errors.push_back(src + "section [" + name + "] does not name a model");
      continue;
    }
    if (is_lflf_model(name)) {
      LflfConfig cfg;
      auto e = apply_overrides(cfg, entries, file.source);
      if (e.empty()) validate_into(cfg, name, e);
      errors.insert(errors.end(), e.begin(), e.end());
    } else {
      BaselineConfig cfg;
      auto e = apply_overrides(cfg, entries, file.source);
      if (e.empty()) validate_into(cfg, name, e);
      errors.insert(errors.end(), e.begin(), e.end());
    }
    bc.overrides[name] = entries;
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return bc;
}

}  // namespace mlgb
