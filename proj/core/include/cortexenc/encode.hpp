#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cortexenc::encode {

enum class FoldScheme { contiguous, shuffled };

std::optional<FoldScheme> parse_fold_scheme(std::string_view name);
std::string_view to_string(FoldScheme scheme);

struct FoldAssignment {
  Eigen::Index n = 0;
  int folds = 0;
  std::vector<int> fold_of;
  std::uint64_t seed = 0;
  FoldScheme scheme = FoldScheme::contiguous;

  std::vector<Eigen::Index> test_indices(int fold) const;
  std::vector<Eigen::Index> train_indices(int fold) const;
  std::vector<Eigen::Index> fold_sizes() const;
};

// Fold sizes differ by at most one; the first n % K folds are the larger
// ones. Contiguous keeps sample order; shuffled assigns blocks of a seeded
// permutation.
FoldAssignment kfold_split(Eigen::Index n, int folds, std::uint64_t seed, FoldScheme scheme);

struct ColumnStats {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;  // population sd, 1 for constant columns
};

ColumnStats column_stats(const Eigen::MatrixXd& m);

struct RidgeOptions {
  // Center and scale X and Y with training statistics. When false the
  // solve is on raw X and Y and intercepts are zero.
  bool standardize = true;
};

struct RidgeModel {
  Eigen::MatrixXd weights;        // d x T, original units
  Eigen::RowVectorXd intercepts;  // T
  Eigen::MatrixXd fitted_weights; // d x T in the solved (standardized) space
  Eigen::VectorXd lambdas;        // per target
  ColumnStats x_stats;
  ColumnStats y_stats;
  bool standardized = true;

  Eigen::MatrixXd predict(const Eigen::MatrixXd& x) const;

  // ||(X'X + lambda I) W - X'Y||_F / ||X'Y||_F in the solved space, maximised
  // over lambda groups.
  double normal_equation_residual(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) const;
};

// W = (X'X + lambda I)^-1 X'Y via Cholesky of the d x d Gram matrix.
RidgeModel fit_ridge(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double lambda,
                     const RidgeOptions& options = {});

// One lambda per target; targets sharing a lambda share a factorization.
RidgeModel fit_ridge(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                     const Eigen::VectorXd& lambdas, const RidgeOptions& options = {});

struct PearsonResult {
  double r = 0.0;
  bool degenerate = false;  // a zero-variance input; r is reported as 0
};

PearsonResult pearson(std::span<const double> a, std::span<const double> b);
PearsonResult pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

enum class Scoring {
  fold_mean,     // average of per-fold correlations
  concatenated,  // one correlation over all held-out predictions
};

std::optional<Scoring> parse_scoring(std::string_view name);
std::string_view to_string(Scoring scoring);

inline const std::vector<double>& default_lambda_grid() {
  static const std::vector<double> grid = {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0};
  return grid;
}

struct CrossvalOptions {
  double lambda = 1.0;
  // Non-empty: per-target lambda picked by inner K-fold CV on each training
  // split, maximising the mean inner correlation.
  std::vector<double> lambda_grid;
  int inner_folds = 5;
  Scoring scoring = Scoring::fold_mean;
  RidgeOptions ridge{};
};

struct EncodingResult {
  std::string subject_id;
  std::string model_name;
  std::optional<int> layer;
  Eigen::VectorXd per_target_r;
  Eigen::MatrixXd fold_rs;                // K x T
  std::vector<std::uint8_t> degenerate;   // per target
  std::vector<std::string> target_names;
  double lambda = 1.0;
  std::vector<double> lambda_grid;
  Eigen::MatrixXd fold_lambdas;           // K x T, chosen lambda per fold
  int folds = 0;
  std::uint64_t seed = 0;
  FoldScheme scheme = FoldScheme::contiguous;
  Scoring scoring = Scoring::fold_mean;
  std::string config_hash;

  Eigen::Index targets() const { return per_target_r.size(); }
  double mean_r() const;
};

// Fits on each training split, predicts its held-out fold and scores every
// target with pearson. Standardization statistics come from the training
// split only.
EncodingResult crossval_encode(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                               const FoldAssignment& folds, const CrossvalOptions& options = {});

// Layer with the highest mean per-target r; ties (within 1e-12) go to the
// lowest layer index.
int best_layer(std::span<const EncodingResult> results);

std::string format_result_json(const EncodingResult& result);
std::string format_result_csv(const EncodingResult& result);
EncodingResult parse_result_json(std::string_view text);

}  // namespace cortexenc::encode
