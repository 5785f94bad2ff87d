#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace testing {

namespace fs = std::filesystem;

MultiLabelGraph random_graph(std::size_t n, std::size_t num_labels, double edge_p, double label_p,
                             std::size_t num_features, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<mlgb::Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (u(rng) < edge_p) edges.emplace_back(static_cast<mlgb::NodeId>(i), static_cast<mlgb::NodeId>(j));
  std::vector<mlgb::LabelSet> labels(n);
  for (auto& ls : labels)
    for (std::size_t l = 0; l < num_labels; ++l)
      if (u(rng) < label_p) ls.push_back(static_cast<mlgb::LabelId>(l));
  DenseMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(num_features));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = z(rng);
  return MultiLabelGraph(n, num_labels, std::move(edges), std::move(labels), std::move(x));
}

mlgb::PredictionSet random_predictions(std::size_t rows, std::size_t labels, std::uint32_t seed, int levels) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  mlgb::PredictionSet p;
  p.scores.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(labels));
  p.truth.resize(p.scores.rows(), p.scores.cols());
  for (Eigen::Index c = 0; c < p.scores.cols(); ++c) {
    const double prevalence = u(rng);
    for (Eigen::Index i = 0; i < p.scores.rows(); ++i) {
      double s = u(rng);
      if (levels > 0) s = std::floor(s * levels) / levels;
      p.scores(i, c) = s;
      p.truth(i, c) = u(rng) < prevalence ? 1.0 : 0.0;
    }
  }
  for (std::size_t i = 0; i < rows; ++i) p.node_ids.push_back(static_cast<mlgb::NodeId>(i));
  return p;
}

double brute_homophily(const MultiLabelGraph& g) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t u = 0; u < g.num_nodes(); ++u)
    for (std::size_t v = u + 1; v < g.num_nodes(); ++v) {
      if (!g.has_edge(static_cast<mlgb::NodeId>(u), static_cast<mlgb::NodeId>(v))) continue;
      const std::set<mlgb::LabelId> a(g.labels()[u].begin(), g.labels()[u].end());
      const std::set<mlgb::LabelId> b(g.labels()[v].begin(), g.labels()[v].end());
      std::set<mlgb::LabelId> uni = a, inter;
      uni.insert(b.begin(), b.end());
      for (auto x : a)
        if (b.count(x)) inter.insert(x);
      sum += uni.empty() ? 0.0 : static_cast<double>(inter.size()) / static_cast<double>(uni.size());
      ++count;
    }
  return sum / static_cast<double>(count);
}

DenseMatrix brute_ccns(const MultiLabelGraph& g) {
  const std::size_t n = g.num_nodes(), c = g.num_labels();
  std::vector<std::vector<double>> d(n, std::vector<double>(c, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && g.has_edge(static_cast<mlgb::NodeId>(i), static_cast<mlgb::NodeId>(j)))
        for (auto l : g.labels()[j]) d[i][l] += 1.0;
  auto cosine = [&](std::size_t i, std::size_t j) {
    double dot = 0, ni = 0, nj = 0;
    for (std::size_t l = 0; l < c; ++l) {
      dot += d[i][l] * d[j][l];
      ni += d[i][l] * d[i][l];
      nj += d[j][l] * d[j][l];
    }
    return ni == 0 || nj == 0 ? 0.0 : dot / std::sqrt(ni * nj);
  };
  std::vector<double> size(c, 0.0);
  for (const auto& ls : g.labels())
    for (auto l : ls) size[l] += 1.0;
  DenseMatrix s = DenseMatrix::Zero(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c));
  for (std::size_t a = 0; a < c; ++a)
    for (std::size_t b = 0; b < c; ++b) {
      double sum = 0.0;
      bool any = false;
      for (std::size_t i = 0; i < n; ++i) {
        const auto& li = g.labels()[i];
        if (std::find(li.begin(), li.end(), a) == li.end()) continue;
        for (std::size_t j = 0; j < n; ++j) {
          const auto& lj = g.labels()[j];
          if (i == j || std::find(lj.begin(), lj.end(), b) == lj.end()) continue;
          any = true;
          sum += cosine(i, j) / static_cast<double>(li.size() * lj.size());
        }
      }
      s(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = any ? sum / (size[a] * size[b]) : 0.0;
    }
  return s;
}

double brute_clustering(const MultiLabelGraph& g) {
  const std::size_t n = g.num_nodes();
  if (n == 0) return 0.0;
  double total = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::size_t> nb;
    for (std::size_t u = 0; u < n; ++u)
      if (u != v && g.has_edge(static_cast<mlgb::NodeId>(u), static_cast<mlgb::NodeId>(v))) nb.push_back(u);
    if (nb.size() < 2) continue;
    double links = 0;
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b)
        if (g.has_edge(static_cast<mlgb::NodeId>(nb[a]), static_cast<mlgb::NodeId>(nb[b]))) links += 1;
    total += links / (0.5 * static_cast<double>(nb.size() * (nb.size() - 1)));
  }
  return total / static_cast<double>(n);
}

namespace {

struct Confusion {
  double tp = 0, fp = 0, fn = 0;
};

Confusion confusion(const mlgb::PredictionSet& p, Eigen::Index c, double t) {
  Confusion k;
  for (Eigen::Index i = 0; i < p.scores.rows(); ++i) {
    const bool pred = !(p.scores(i, c) < t);
    const bool truth = p.truth(i, c) == 1.0;
    k.tp += pred && truth;
    k.fp += pred && !truth;
    k.fn += !pred && truth;
  }
  return k;
}

double f1_of(const Confusion& k) {
  const double precision = k.tp + k.fp > 0 ? k.tp / (k.tp + k.fp) : 0.0;
  const double recall = k.tp + k.fn > 0 ? k.tp / (k.tp + k.fn) : 0.0;
  return precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
}

}  // namespace

double brute_micro_f1(const mlgb::PredictionSet& p, double t) {
  Confusion all;
  for (Eigen::Index c = 0; c < p.scores.cols(); ++c) {
    const auto k = confusion(p, c, t);
    all.tp += k.tp;
    all.fp += k.fp;
    all.fn += k.fn;
  }
  return f1_of(all);
}

double brute_macro_f1(const mlgb::PredictionSet& p, double t) {
  double sum = 0.0;
  for (Eigen::Index c = 0; c < p.scores.cols(); ++c) sum += f1_of(confusion(p, c, t));
  return sum / static_cast<double>(p.scores.cols());
}

double brute_macro_auroc(const mlgb::PredictionSet& p) {
  double sum = 0.0;
  int used = 0;
  for (Eigen::Index c = 0; c < p.scores.cols(); ++c) {
    double wins = 0.0, pairs = 0.0;
    for (Eigen::Index i = 0; i < p.scores.rows(); ++i) {
      if (p.truth(i, c) != 1.0) continue;
      for (Eigen::Index j = 0; j < p.scores.rows(); ++j) {
        if (p.truth(j, c) != 0.0) continue;
        pairs += 1.0;
        if (p.scores(i, c) > p.scores(j, c)) wins += 1.0;
        else if (p.scores(i, c) == p.scores(j, c)) wins += 0.5;
      }
    }
    if (pairs == 0.0) continue;
    sum += wins / pairs;
    ++used;
  }
  return sum / used;
}

double brute_macro_ap(const mlgb::PredictionSet& p) {
  double sum = 0.0;
  int used = 0;
  for (Eigen::Index c = 0; c < p.scores.cols(); ++c) {
    // Position of row i in a descending sweep where equal scores keep index order.
    auto ahead = [&](Eigen::Index j, Eigen::Index i) {
      return p.scores(j, c) > p.scores(i, c) || (p.scores(j, c) == p.scores(i, c) && j < i);
    };
    double ap = 0.0, positives = 0.0;
    for (Eigen::Index i = 0; i < p.scores.rows(); ++i) {
      if (p.truth(i, c) != 1.0) continue;
      positives += 1.0;
      double rank = 1.0, hits = 1.0;
      for (Eigen::Index j = 0; j < p.scores.rows(); ++j) {
        if (j == i || !ahead(j, i)) continue;
        rank += 1.0;
        hits += p.truth(j, c) == 1.0;
      }
      ap += hits / rank;
    }
    if (positives == 0.0) continue;
    sum += ap / positives;
    ++used;
  }
  return sum / used;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto x, auto y) { return v[x] < v[y]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j);
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

TempDir::TempDir(const std::string& tag) {
  std::string tmpl = (fs::temp_directory_path() / ("mlgb-" + tag + "-XXXXXX")).string();
  if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128;
}

}  // namespace testing
