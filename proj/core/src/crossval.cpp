#include <algorithm>
#include <cmath>
#include <map>

#include "cortexenc/encode.hpp"
#include "cortexenc/error.hpp"
#include "cortexenc/parallel.hpp"
#include "cortexenc/rng.hpp"

namespace cortexenc::encode {

std::optional<Scoring> parse_scoring(std::string_view name) {
  if (name == "fold-mean") return Scoring::fold_mean;
  if (name == "concatenated") return Scoring::concatenated;
  return std::nullopt;
}

std::string_view to_string(Scoring scoring) {
  return scoring == Scoring::fold_mean ? "fold-mean" : "concatenated";
}

double EncodingResult::mean_r() const {
  return per_target_r.size() == 0 ? 0.0 : per_target_r.mean();
}

namespace {

using Eigen::all;

Eigen::VectorXd select_lambdas(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                               const CrossvalOptions& options, std::uint64_t seed,
                               FoldScheme scheme) {
  const auto& grid = options.lambda_grid;
  const auto inner = kfold_split(x.rows(), options.inner_folds, seed, scheme);
  Eigen::MatrixXd score = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.size()), y.cols());
  for (int f = 0; f < inner.folds; ++f) {
    const auto train = inner.train_indices(f);
    const auto test = inner.test_indices(f);
    require(test.size() >= 2, ErrorKind::invalid_argument,
            "inner fold has fewer than 2 samples; reduce inner_folds");
    const Eigen::MatrixXd xtr = x(train, all);
    const Eigen::MatrixXd ytr = y(train, all);
    const Eigen::MatrixXd xte = x(test, all);
    const Eigen::MatrixXd yte = y(test, all);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto model = fit_ridge(xtr, ytr, grid[g], options.ridge);
      const Eigen::MatrixXd pred = model.predict(xte);
      for (Eigen::Index t = 0; t < y.cols(); ++t) {
        score(static_cast<Eigen::Index>(g), t) += pearson(Eigen::VectorXd(pred.col(t)), Eigen::VectorXd(yte.col(t))).r;
      }
    }
  }
  Eigen::VectorXd chosen(y.cols());
  for (Eigen::Index t = 0; t < y.cols(); ++t) {
    Eigen::Index best = 0;
    for (Eigen::Index g = 1; g < score.rows(); ++g) {
      if (score(g, t) > score(best, t)) best = g;
    }
    chosen(t) = grid[static_cast<std::size_t>(best)];
  }
  return chosen;
}

}  // namespace

EncodingResult crossval_encode(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                               const FoldAssignment& folds, const CrossvalOptions& options) {
  require(x.rows() == y.rows() && x.rows() == folds.n, ErrorKind::mismatch,
          "X rows, Y rows and fold assignment size must agree");
  require(options.lambda_grid.empty() || options.inner_folds >= 2, ErrorKind::invalid_argument,
          "inner_folds must be >= 2");
  for (auto size : folds.fold_sizes()) {
    require(size >= 2, ErrorKind::invalid_argument,
            "a fold has fewer than 2 samples; correlation is undefined");
  }

  const auto k = folds.folds;
  const auto t_count = y.cols();
  EncodingResult result;
  result.fold_rs.resize(k, t_count);
  result.fold_lambdas.resize(k, t_count);
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> fold_degenerate(k, t_count);
  Eigen::MatrixXd held_out(x.rows(), t_count);

  parallel_for(static_cast<std::size_t>(k), [&](std::size_t fi) {
    const int f = static_cast<int>(fi);
    const auto train = folds.train_indices(f);
    const auto test = folds.test_indices(f);
    const Eigen::MatrixXd xtr = x(train, all);
    const Eigen::MatrixXd ytr = y(train, all);
    Eigen::VectorXd lambdas = Eigen::VectorXd::Constant(t_count, options.lambda);
    if (!options.lambda_grid.empty()) {
      lambdas = select_lambdas(xtr, ytr, options, derive_seed(folds.seed, fi), folds.scheme);
    }
    const auto model = fit_ridge(xtr, ytr, lambdas, options.ridge);
    const Eigen::MatrixXd pred = model.predict(x(test, all));
    const Eigen::MatrixXd truth = y(test, all);
    for (Eigen::Index t = 0; t < t_count; ++t) {
      const auto pr = pearson(Eigen::VectorXd(pred.col(t)), Eigen::VectorXd(truth.col(t)));
      result.fold_rs(f, t) = pr.r;
      fold_degenerate(f, t) = pr.degenerate ? 1 : 0;
    }
    result.fold_lambdas.row(f) = lambdas.transpose();
    for (std::size_t r = 0; r < test.size(); ++r) held_out.row(test[r]) = pred.row(static_cast<Eigen::Index>(r));
  });

  result.per_target_r.resize(t_count);
  result.degenerate.assign(static_cast<std::size_t>(t_count), 0);
  for (Eigen::Index t = 0; t < t_count; ++t) {
    if (options.scoring == Scoring::fold_mean) {
      double sum = 0.0;
      bool any = false;
      for (int f = 0; f < k; ++f) {
        sum += result.fold_rs(f, t);
        any = any || fold_degenerate(f, t) != 0;
      }
      result.per_target_r(t) = sum / static_cast<double>(k);
      result.degenerate[static_cast<std::size_t>(t)] = any ? 1 : 0;
    } else {
      const auto pr = pearson(Eigen::VectorXd(held_out.col(t)), Eigen::VectorXd(y.col(t)));
      result.per_target_r(t) = pr.r;
      result.degenerate[static_cast<std::size_t>(t)] = pr.degenerate ? 1 : 0;
    }
  }
  result.lambda = options.lambda;
  result.lambda_grid = options.lambda_grid;
  result.folds = k;
  result.seed = folds.seed;
  result.scheme = folds.scheme;
  result.scoring = options.scoring;
  for (Eigen::Index t = 0; t < t_count; ++t) result.target_names.push_back(std::to_string(t));
  return result;
}

int best_layer(std::span<const EncodingResult> results) {
  require(!results.empty(), ErrorKind::empty_input, "best_layer: no results");
  const auto& first = results.front();
  int best = -1;
  double best_score = 0.0;
  std::vector<const EncodingResult*> sorted;
  for (const auto& r : results) {
    require(r.model_name == first.model_name && r.subject_id == first.subject_id, ErrorKind::mismatch,
            "best_layer: results mix models or subjects");
    require(r.layer.has_value(), ErrorKind::invalid_argument, "best_layer: result without a layer");
    sorted.push_back(&r);
  }
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return *a->layer < *b->layer; });
  for (const auto* r : sorted) {
    const double score = r->mean_r();
    if (best < 0 || score > best_score + 1e-12) {
      best = *r->layer;
      best_score = score;
    }
  }
  return best;
}

}  // namespace cortexenc::encode
