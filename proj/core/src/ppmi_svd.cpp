#include "cortexenc/ppmi_svd.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>
#include <spdlog/spdlog.h>

#include "cortexenc/error.hpp"
#include "cortexenc/rng.hpp"

namespace cortexenc::reprs {

SparseMatrix ppmi_weight(const corpus::CooccurrenceMatrix& cooc) {
  const auto n = static_cast<Eigen::Index>(cooc.vocab().size());
  const auto entries = cooc.entries();
  require(!entries.empty(), ErrorKind::empty_input, "co-occurrence matrix is empty");

  Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd col_sum = Eigen::VectorXd::Zero(n);
  double total = 0.0;
  for (const auto& e : entries) {
    require(e.value >= 0.0, ErrorKind::invalid_argument, "negative co-occurrence count");
    row_sum(e.row) += e.value;
    col_sum(e.col) += e.value;
    total += e.value;
  }
  require(total > 0.0, ErrorKind::empty_input, "co-occurrence matrix has zero mass");

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(entries.size());
  for (const auto& e : entries) {
    if (e.value <= 0.0) continue;
    const double pmi = std::log(e.value * total / (row_sum(e.row) * col_sum(e.col)));
    if (pmi > 0.0) triplets.emplace_back(e.row, e.col, pmi);
  }
  SparseMatrix out(n, n);
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.makeCompressed();
  return out;
}

std::optional<SvdMethod> parse_svd_method(std::string_view name) {
  if (name == "auto") return SvdMethod::automatic;
  if (name == "dense") return SvdMethod::dense;
  if (name == "randomized") return SvdMethod::randomized;
  return std::nullopt;
}

namespace {

Eigen::MatrixXd thin_q(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

SvdFactors dense_svd(const SparseMatrix& matrix, Eigen::Index k) {
  const Eigen::MatrixXd dense(matrix);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdFactors out;
  out.left = svd.matrixU().leftCols(k);
  out.singular_values = svd.singularValues().head(k);
  out.right = svd.matrixV().leftCols(k);
  return out;
}

SvdFactors randomized_svd(const SparseMatrix& matrix, Eigen::Index k, std::uint64_t seed,
                          const SvdOptions& options) {
  const Eigen::Index min_dim = std::min(matrix.rows(), matrix.cols());
  const Eigen::Index width = std::min(min_dim, k + std::max<Eigen::Index>(options.oversample, 0));

  Rng rng(seed);
  Eigen::MatrixXd omega(matrix.cols(), width);
  for (Eigen::Index j = 0; j < width; ++j) {
    for (Eigen::Index i = 0; i < matrix.cols(); ++i) omega(i, j) = rng.normal();
  }
  Eigen::MatrixXd q = thin_q(matrix * omega);

  Eigen::VectorXd previous;
  SvdFactors out;
  Eigen::JacobiSVD<Eigen::MatrixXd> small;
  int it = 0;
  for (; it < std::max(1, options.max_iterations); ++it) {
    const Eigen::MatrixXd bt = matrix.transpose() * q;  // cols x width
    small.compute(bt, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd s = small.singularValues().head(k);
    if (previous.size() == k) {
      const double scale = std::max(previous(0), 1e-300);
      if ((s - previous).cwiseAbs().maxCoeff() <= options.tolerance * scale) break;
    }
    previous = s;
    q = thin_q(matrix * thin_q(bt));
  }
  out.iterations = it + 1;
  // bt = Ub S Vb^T, so A ~ Q Vb S Ub^T.
  out.singular_values = small.singularValues().head(k);
  out.left = q * small.matrixV().leftCols(k);
  out.right = small.matrixU().leftCols(k);
  return out;
}

void normalize_signs(SvdFactors& f) {
  for (Eigen::Index c = 0; c < f.left.cols(); ++c) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index r = 0; r < f.left.rows(); ++r) {
      const double a = std::abs(f.left(r, c));
      if (a > best_abs * (1.0 + 1e-12)) {
        best_abs = a;
        best = r;
      }
    }
    if (f.left.rows() > 0 && f.left(best, c) < 0.0) {
      f.left.col(c) *= -1.0;
      f.right.col(c) *= -1.0;
    }
  }
}

}  // namespace

SvdFactors truncated_svd(const SparseMatrix& matrix, Eigen::Index k, std::uint64_t seed,
                         const SvdOptions& options) {
  require(k >= 1, ErrorKind::invalid_argument, "SVD rank k must be >= 1");
  require(matrix.rows() >= 1 && matrix.cols() >= 1, ErrorKind::empty_input, "SVD of empty matrix");
  const Eigen::Index min_dim = std::min(matrix.rows(), matrix.cols());
  const Eigen::Index solved = std::min(k, min_dim);

  SvdMethod method = options.method;
  if (method == SvdMethod::automatic) {
    method = (min_dim <= options.dense_limit || solved + options.oversample >= min_dim)
                 ? SvdMethod::dense
                 : SvdMethod::randomized;
  }
  SvdFactors f = method == SvdMethod::dense ? dense_svd(matrix, solved)
                                            : randomized_svd(matrix, solved, seed, options);
  normalize_signs(f);

  if (k > solved) {
    spdlog::warn("truncated_svd: k={} exceeds min(rows, cols)={}; padding {} zero components", k,
                 min_dim, k - solved);
    f.padded = k - solved;
    f.left.conservativeResizeLike(Eigen::MatrixXd::Zero(matrix.rows(), k));
    f.right.conservativeResizeLike(Eigen::MatrixXd::Zero(matrix.cols(), k));
    f.singular_values.conservativeResizeLike(Eigen::VectorXd::Zero(k));
  }
  return f;
}

Eigen::MatrixXd scaled_left_vectors(const SvdFactors& svd, double alpha) {
  Eigen::VectorXd scale(svd.singular_values.size());
  for (Eigen::Index i = 0; i < scale.size(); ++i) {
    const double s = svd.singular_values(i);
    scale(i) = s > 0.0 ? std::pow(s, alpha) : 0.0;
  }
  return svd.left * scale.asDiagonal();
}

}  // namespace cortexenc::reprs
