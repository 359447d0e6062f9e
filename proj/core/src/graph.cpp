#include "cortexenc/graph.hpp"

#include <algorithm>
#include <numeric>

#include <spdlog/spdlog.h>

#include "cortexenc/error.hpp"
#include "cortexenc/parallel.hpp"
#include "cortexenc/rng.hpp"

namespace cortexenc::reprs {

std::size_t SimilarityGraph::edge_count() const {
  std::size_t directed = 0;
  for (const auto& adj : adjacency) directed += adj.size();
  return directed / 2;
}

double SimilarityGraph::weight(std::uint32_t a, std::uint32_t b) const {
  const auto& adj = adjacency.at(a);
  const auto it = std::lower_bound(adj.begin(), adj.end(), b,
                                   [](const Edge& e, std::uint32_t t) { return e.target < t; });
  return (it != adj.end() && it->target == b) ? it->weight : 0.0;
}

namespace {

constexpr Eigen::Index kBlockRows = 256;

Eigen::MatrixXd normalized_rows(const Eigen::MatrixXd& data, std::vector<bool>& zero) {
  Eigen::MatrixXd out = data;
  zero.assign(static_cast<std::size_t>(data.rows()), false);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const double norm = data.row(i).norm();
    if (norm == 0.0) {
      zero[static_cast<std::size_t>(i)] = true;
      out.row(i).setZero();
    } else {
      out.row(i) /= norm;
    }
  }
  return out;
}

double cosine(const Eigen::MatrixXd& unit, Eigen::Index a, Eigen::Index b) {
  // Fixed argument order so (a, b) and (b, a) give the same bits.
  if (a > b) std::swap(a, b);
  return unit.row(a).dot(unit.row(b));
}

}  // namespace

std::vector<std::vector<std::uint32_t>> knn_neighbors(const Eigen::MatrixXd& data, int k) {
  const Eigen::Index v = data.rows();
  require(v >= 2, ErrorKind::invalid_argument, "kNN graph needs at least 2 rows");
  require(k >= 1 && k < v, ErrorKind::invalid_argument,
          "kNN k must satisfy 1 <= k < V (k=" + std::to_string(k) + ", V=" + std::to_string(v) + ")");

  std::vector<bool> zero;
  const Eigen::MatrixXd unit = normalized_rows(data, zero);
  std::vector<std::vector<std::uint32_t>> out(static_cast<std::size_t>(v));

  const auto blocks = static_cast<std::size_t>((v + kBlockRows - 1) / kBlockRows);
  parallel_for(blocks, [&](std::size_t b) {
    const Eigen::Index begin = static_cast<Eigen::Index>(b) * kBlockRows;
    const Eigen::Index rows = std::min(kBlockRows, v - begin);
    const Eigen::MatrixXd sims = unit.middleRows(begin, rows) * unit.transpose();
    std::vector<std::uint32_t> candidates;
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Eigen::Index i = begin + r;
      if (zero[static_cast<std::size_t>(i)]) continue;
      candidates.clear();
      for (Eigen::Index j = 0; j < v; ++j) {
        if (j != i && !zero[static_cast<std::size_t>(j)]) candidates.push_back(static_cast<std::uint32_t>(j));
      }
      const auto keep = std::min<std::size_t>(static_cast<std::size_t>(k), candidates.size());
      auto better = [&](std::uint32_t a, std::uint32_t c) {
        const double sa = sims(r, a);
        const double sc = sims(r, c);
        return sa != sc ? sa > sc : a < c;
      };
      std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                        candidates.end(), better);
      out[static_cast<std::size_t>(i)].assign(candidates.begin(),
                                              candidates.begin() + static_cast<std::ptrdiff_t>(keep));
    }
  });
  return out;
}

SimilarityGraph cosine_knn_graph(const Eigen::MatrixXd& data, int k) {
  const auto neighbors = knn_neighbors(data, k);
  std::vector<bool> zero;
  const Eigen::MatrixXd unit = normalized_rows(data, zero);

  SimilarityGraph g;
  g.k = k;
  g.adjacency.resize(static_cast<std::size_t>(data.rows()));
  for (std::size_t i = 0; i < zero.size(); ++i) {
    if (zero[i]) {
      g.dropped_rows.push_back(static_cast<std::uint32_t>(i));
    } else {
      g.nodes.push_back(static_cast<std::uint32_t>(i));
    }
  }
  if (!g.dropped_rows.empty()) {
    spdlog::warn("cosine_knn_graph: dropped {} zero-norm rows", g.dropped_rows.size());
  }

  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    for (const auto j : neighbors[i]) {
      const double w = std::min(1.0, cosine(unit, static_cast<Eigen::Index>(i), j));
      if (w <= 0.0) continue;
      g.adjacency[i].push_back({j, w});
      g.adjacency[j].push_back({static_cast<std::uint32_t>(i), w});
    }
  }
  for (auto& adj : g.adjacency) {
    std::sort(adj.begin(), adj.end(), [](const Edge& a, const Edge& b) { return a.target < b.target; });
    adj.erase(std::unique(adj.begin(), adj.end(),
                          [](const Edge& a, const Edge& b) { return a.target == b.target; }),
              adj.end());
  }
  return g;
}

SimilarityGraph cosine_knn_graph(const EmbeddingMatrix& emb, int k) {
  emb.validate();
  return cosine_knn_graph(emb.data, k);
}

std::vector<std::vector<std::uint32_t>> random_walks(const SimilarityGraph& graph,
                                                     int walks_per_node, int walk_length,
                                                     std::uint64_t seed) {
  require(walks_per_node >= 1 && walk_length >= 1, ErrorKind::invalid_argument,
          "walks_per_node and walk_length must be >= 1");
  require(graph.edge_count() >= 1, ErrorKind::empty_input, "random walks on an empty graph");

  std::vector<std::vector<double>> cumulative(graph.node_count());
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    auto& c = cumulative[i];
    c.reserve(graph.adjacency[i].size());
    double run = 0.0;
    for (const auto& e : graph.adjacency[i]) {
      run += e.weight;
      c.push_back(run);
    }
  }

  const auto& starts = graph.nodes;
  const auto per = static_cast<std::size_t>(walks_per_node);
  std::vector<std::vector<std::uint32_t>> walks(starts.size() * per);
  parallel_for(starts.size(), [&](std::size_t s) {
    const auto start = starts[s];
    Rng rng(derive_seed(seed, start));
    for (std::size_t w = 0; w < per; ++w) {
      auto& walk = walks[s * per + w];
      walk.reserve(static_cast<std::size_t>(walk_length));
      walk.push_back(start);
      auto current = start;
      while (walk.size() < static_cast<std::size_t>(walk_length)) {
        const auto& c = cumulative[current];
        if (c.empty()) break;
        const double x = rng.uniform() * c.back();
        auto pos = static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), x) - c.begin());
        pos = std::min(pos, c.size() - 1);
        current = graph.adjacency[current][pos].target;
        walk.push_back(current);
      }
    }
  });
  return walks;
}

}  // namespace cortexenc::reprs
