#pragma once

#include <cstdint>
#include <vector>

#include "cortexenc/embedding.hpp"

namespace cortexenc::reprs {

struct Edge {
  std::uint32_t target;
  double weight;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Undirected word graph over embedding rows. adjacency[i] is sorted by
// target and holds only strictly positive weights.
struct SimilarityGraph {
  std::vector<std::vector<Edge>> adjacency;
  // Rows that took part in the kNN search (zero-norm rows are excluded).
  std::vector<std::uint32_t> nodes;
  std::vector<std::uint32_t> dropped_rows;
  int k = 0;

  std::size_t node_count() const { return adjacency.size(); }
  std::size_t edge_count() const;  // undirected edges
  double weight(std::uint32_t a, std::uint32_t b) const;
};

// For every non-zero row, the k rows with the highest cosine similarity,
// excluding itself and zero rows. Sorted by similarity descending, ties to
// the lower row index. Rows with zero norm get an empty list.
std::vector<std::vector<std::uint32_t>> knn_neighbors(const Eigen::MatrixXd& data, int k);

// kNN lists symmetrized by union. Edge weight is the cosine similarity,
// clamped to at most 1, and edges with non-positive similarity are removed.
SimilarityGraph cosine_knn_graph(const EmbeddingMatrix& emb, int k);
SimilarityGraph cosine_knn_graph(const Eigen::MatrixXd& data, int k);

// Weighted first-order walks, walks_per_node from every graph node in row
// order. A walk holds walk_length nodes; walks from isolated nodes hold only
// the start node. Node i draws from its own stream derive_seed(seed, i).
std::vector<std::vector<std::uint32_t>> random_walks(const SimilarityGraph& graph,
                                                     int walks_per_node, int walk_length,
                                                     std::uint64_t seed);

}  // namespace cortexenc::reprs
