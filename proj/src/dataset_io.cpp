#include "mlgb/dataset_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mlgb/error.hpp"

namespace mlgb {

namespace fs = std::filesystem;

namespace {

class LineReader {
 public:
  explicit LineReader(const fs::path& path) : path_(path), in_(path) {
    if (!in_) throw DataError("missing file: " + path.string());
  }

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError(path_.filename().string() + ":" + std::to_string(line_no_) + ": " + what);
  }

 private:
  fs::path path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

template <typename T>
bool parse_number(std::string_view text, T& out) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size() && !text.empty();
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  if (text.empty()) return parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

/// Splits "node<TAB>rest" and validates the node index.
std::pair<NodeId, std::string_view> node_and_rest(const LineReader& r, std::string_view line, std::size_t n) {
  const auto tab = line.find('\t');
  const auto head = line.substr(0, tab);
  std::uint64_t node = 0;
  if (!parse_number(head, node)) r.fail("bad node index '" + std::string(head) + "'");
  if (node >= n) r.fail("node index " + std::to_string(node) + " >= num_nodes " + std::to_string(n));
  const auto rest = tab == std::string_view::npos ? std::string_view{} : line.substr(tab + 1);
  return {static_cast<NodeId>(node), rest};
}

}  // namespace

MultiLabelGraph load_dataset(const fs::path& dir) {
  const auto meta_path = dir / "meta.json";
  std::ifstream meta_in(meta_path);
  if (!meta_in) throw DataError("missing file: " + meta_path.string());
  nlohmann::json meta;
  try {
    meta_in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("meta.json: " + std::string(e.what()));
  }
  std::size_t n = 0, num_labels = 0, num_features = 0;
  try {
    n = meta.at("num_nodes").get<std::size_t>();
    num_labels = meta.at("num_labels").get<std::size_t>();
    num_features = meta.at("num_features").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("meta.json: " + std::string(e.what()));
  }

  std::vector<Edge> edges;
  {
    LineReader r(dir / "edges.tsv");
    std::set<Edge> seen;
    std::string line;
    while (r.next(line)) {
      const auto parts = split(line, '\t');
      std::uint64_t u = 0, v = 0;
      if (parts.size() != 2 || !parse_number(parts[0], u) || !parse_number(parts[1], v))
        r.fail("expected 'u<TAB>v', got '" + line + "'");
      if (u >= n || v >= n) r.fail("node index >= num_nodes " + std::to_string(n));
      if (u == v) r.fail("self-loop " + std::to_string(u) + "-" + std::to_string(v));
      const Edge e{static_cast<NodeId>(std::min(u, v)), static_cast<NodeId>(std::max(u, v))};
      if (!seen.insert(e).second)
        r.fail("duplicate edge " + std::to_string(e.first) + "-" + std::to_string(e.second));
      edges.push_back(e);
    }
  }

  std::vector<LabelSet> labels(n);
  {
    LineReader r(dir / "labels.tsv");
    std::vector<bool> seen(n, false);
    std::string line;
    while (r.next(line)) {
      const auto [node, rest] = node_and_rest(r, line, n);
      if (seen[node]) r.fail("duplicate label row for node " + std::to_string(node));
      seen[node] = true;
      for (const auto tok : split(rest, ',')) {
        std::uint64_t l = 0;
        if (!parse_number(tok, l)) r.fail("bad label index '" + std::string(tok) + "'");
        if (l >= num_labels) r.fail("label index " + std::to_string(l) + " >= num_labels " + std::to_string(num_labels));
        labels[node].push_back(static_cast<LabelId>(l));
      }
    }
  }

  DenseMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(num_features));
  {
    LineReader r(dir / "features.tsv");
    std::vector<bool> seen(n, false);
    std::string line;
    while (r.next(line)) {
      const auto [node, rest] = node_and_rest(r, line, n);
      if (seen[node]) r.fail("duplicate feature row for node " + std::to_string(node));
      seen[node] = true;
      const auto toks = split(rest, ',');
      if (toks.size() != num_features)
        r.fail("expected " + std::to_string(num_features) + " features, got " + std::to_string(toks.size()));
      for (std::size_t j = 0; j < toks.size(); ++j) {
        double value = 0.0;
        if (!parse_number(toks[j], value)) r.fail("non-numeric feature '" + std::string(toks[j]) + "'");
        x(node, static_cast<Eigen::Index>(j)) = value;
      }
    }
    for (std::size_t v = 0; v < n; ++v)
      if (!seen[v]) throw FormatError("features.tsv: missing row for node " + std::to_string(v));
  }

  return MultiLabelGraph(n, num_labels, std::move(edges), std::move(labels), std::move(x));
}

void save_dataset(const MultiLabelGraph& g, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());

  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw DataError("cannot write " + (dir / name).string());
    return out;
  };
  auto finish = [&](std::ofstream& out, const char* name) {
    out.flush();
    if (!out) throw DataError("I/O failure writing " + (dir / name).string());
  };

  {
    nlohmann::json meta = {{"num_nodes", g.num_nodes()},
                           {"num_labels", g.num_labels()},
                           {"num_features", g.num_features()}};
    auto out = open("meta.json");
    out << meta.dump(2) << '\n';
    finish(out, "meta.json");
  }
  {
    auto out = open("edges.tsv");
    for (const auto& [u, v] : g.edges()) out << u << '\t' << v << '\n';
    finish(out, "edges.tsv");
  }
  {
    auto out = open("labels.tsv");
    for (std::size_t v = 0; v < g.num_nodes(); ++v) {
      out << v << '\t';
      const auto& ls = g.labels_of(static_cast<NodeId>(v));
      for (std::size_t k = 0; k < ls.size(); ++k) out << (k ? "," : "") << ls[k];
      out << '\n';
    }
    finish(out, "labels.tsv");
  }
  {
    auto out = open("features.tsv");
    char buf[32];
    const auto& x = g.features();
    for (Eigen::Index v = 0; v < x.rows(); ++v) {
      out << v << '\t';
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(static_cast<float>(x(v, j))));
        out << (j ? "," : "") << buf;
      }
      out << '\n';
    }
    finish(out, "features.tsv");
  }
}

}  // namespace mlgb
