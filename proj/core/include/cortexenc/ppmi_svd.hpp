#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "cortexenc/corpus.hpp"

namespace cortexenc::reprs {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// max(0, log(p(i,j) / (p(i) p(j)))) with marginals taken from the row and
// column sums of the counts. Zero counts stay structurally zero.
SparseMatrix ppmi_weight(const corpus::CooccurrenceMatrix& cooc);

enum class SvdMethod { automatic, dense, randomized };

std::optional<SvdMethod> parse_svd_method(std::string_view name);

struct SvdOptions {
  SvdMethod method = SvdMethod::automatic;
  // automatic picks the dense solver when min(rows, cols) is at most this.
  Eigen::Index dense_limit = 2000;
  // Randomized subspace iteration parameters.
  Eigen::Index oversample = 10;
  int max_iterations = 300;
  double tolerance = 1e-13;
};

struct SvdFactors {
  Eigen::MatrixXd left;             // rows x k
  Eigen::VectorXd singular_values;  // k, non-increasing
  Eigen::MatrixXd right;            // cols x k
  // Components appended as zeros because k exceeded min(rows, cols).
  Eigen::Index padded = 0;
  int iterations = 0;  // 0 for the dense path
};

// Top-k singular triplets. Each component is sign-normalized so its largest
// magnitude left entry is positive, which makes the result independent of
// solver-internal sign choices.
SvdFactors truncated_svd(const SparseMatrix& matrix, Eigen::Index k, std::uint64_t seed,
                         const SvdOptions& options = {});

// Rows of U_k * diag(s)^alpha.
Eigen::MatrixXd scaled_left_vectors(const SvdFactors& svd, double alpha);

}  // namespace cortexenc::reprs
