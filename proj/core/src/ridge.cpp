#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/Cholesky>

#include "cortexenc/encode.hpp"
#include "cortexenc/error.hpp"
#include "cortexenc/rng.hpp"

namespace cortexenc::encode {

std::optional<FoldScheme> parse_fold_scheme(std::string_view name) {
  if (name == "contiguous") return FoldScheme::contiguous;
  if (name == "shuffled") return FoldScheme::shuffled;
  return std::nullopt;
}

std::string_view to_string(FoldScheme scheme) {
  return scheme == FoldScheme::contiguous ? "contiguous" : "shuffled";
}

std::vector<Eigen::Index> FoldAssignment::test_indices(int fold) const {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (fold_of[static_cast<std::size_t>(i)] == fold) out.push_back(i);
  }
  return out;
}

std::vector<Eigen::Index> FoldAssignment::train_indices(int fold) const {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (fold_of[static_cast<std::size_t>(i)] != fold) out.push_back(i);
  }
  return out;
}

std::vector<Eigen::Index> FoldAssignment::fold_sizes() const {
  std::vector<Eigen::Index> sizes(static_cast<std::size_t>(folds), 0);
  for (int f : fold_of) ++sizes[static_cast<std::size_t>(f)];
  return sizes;
}

FoldAssignment kfold_split(Eigen::Index n, int folds, std::uint64_t seed, FoldScheme scheme) {
  require(folds >= 2, ErrorKind::invalid_argument, "K must be >= 2");
  require(folds <= n, ErrorKind::invalid_argument,
          "K (" + std::to_string(folds) + ") exceeds sample count (" + std::to_string(n) + ")");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  if (scheme == FoldScheme::shuffled) {
    Rng rng(seed);
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.below(i + 1));
      std::swap(order[i], order[j]);
    }
  }

  FoldAssignment out;
  out.n = n;
  out.folds = folds;
  out.seed = seed;
  out.scheme = scheme;
  out.fold_of.assign(static_cast<std::size_t>(n), 0);
  const Eigen::Index base = n / folds;
  const Eigen::Index extra = n % folds;
  Eigen::Index pos = 0;
  for (int f = 0; f < folds; ++f) {
    const Eigen::Index size = base + (f < extra ? 1 : 0);
    for (Eigen::Index k = 0; k < size; ++k) out.fold_of[static_cast<std::size_t>(order[static_cast<std::size_t>(pos++)])] = f;
  }
  return out;
}

ColumnStats column_stats(const Eigen::MatrixXd& m) {
  const auto n = static_cast<double>(m.rows());
  ColumnStats s;
  s.mean = m.colwise().sum() / n;
  s.scale.resize(m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double sd = std::sqrt((m.col(c).array() - s.mean(c)).square().sum() / n);
    s.scale(c) = sd > 1e-12 * std::max(1.0, std::abs(s.mean(c))) ? sd : 1.0;
  }
  return s;
}

namespace {

Eigen::MatrixXd apply_stats(const Eigen::MatrixXd& m, const ColumnStats& s) {
  return (m.rowwise() - s.mean).array().rowwise() / s.scale.array();
}

}  // namespace

RidgeModel fit_ridge(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                     const Eigen::VectorXd& lambdas, const RidgeOptions& options) {
  require(x.rows() == y.rows(), ErrorKind::mismatch, "X and Y differ in sample count");
  require(x.rows() >= 2, ErrorKind::invalid_argument, "ridge needs at least 2 samples");
  require(x.cols() >= 1 && y.cols() >= 1, ErrorKind::invalid_argument, "ridge needs d >= 1 and T >= 1");
  require(lambdas.size() == y.cols(), ErrorKind::mismatch, "one lambda per target required");
  require(x.allFinite() && y.allFinite(), ErrorKind::numeric, "ridge inputs contain NaN/Inf");
  for (Eigen::Index t = 0; t < lambdas.size(); ++t) {
    require(std::isfinite(lambdas(t)) && lambdas(t) >= 0.0, ErrorKind::invalid_argument,
            "lambda must be finite and >= 0");
  }

  RidgeModel model;
  model.standardized = options.standardize;
  model.lambdas = lambdas;
  const auto d = x.cols();
  const auto t_count = y.cols();
  Eigen::MatrixXd xs;
  Eigen::MatrixXd ys;
  if (options.standardize) {
    model.x_stats = column_stats(x);
    model.y_stats = column_stats(y);
    xs = apply_stats(x, model.x_stats);
    ys = apply_stats(y, model.y_stats);
  } else {
    model.x_stats = {Eigen::RowVectorXd::Zero(d), Eigen::RowVectorXd::Ones(d)};
    model.y_stats = {Eigen::RowVectorXd::Zero(t_count), Eigen::RowVectorXd::Ones(t_count)};
    xs = x;
    ys = y;
  }

  const Eigen::MatrixXd gram = xs.transpose() * xs;
  const Eigen::MatrixXd xty = xs.transpose() * ys;
  model.fitted_weights.resize(d, t_count);

  std::map<double, std::vector<Eigen::Index>> groups;
  for (Eigen::Index t = 0; t < t_count; ++t) groups[lambdas(t)].push_back(t);
  for (const auto& [lambda, cols] : groups) {
    Eigen::MatrixXd g = gram;
    g.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success || llt.rcond() < 1e-13) {
      fail(ErrorKind::numeric, lambda == 0.0
                                   ? "X'X is singular; use lambda > 0"
                                   : "ridge system is numerically singular");
    }
    const Eigen::MatrixXd rhs = xty(Eigen::all, cols);
    const Eigen::MatrixXd solution = llt.solve(rhs);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      model.fitted_weights.col(cols[c]) = solution.col(static_cast<Eigen::Index>(c));
    }
  }

  // Back to original units: y = x W + b.
  model.weights = (model.fitted_weights.array().colwise() / model.x_stats.scale.transpose().array())
                      .rowwise() *
                  model.y_stats.scale.array();
  model.intercepts = model.y_stats.mean - model.x_stats.mean * model.weights;
  return model;
}

RidgeModel fit_ridge(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double lambda,
                     const RidgeOptions& options) {
  return fit_ridge(x, y, Eigen::VectorXd::Constant(y.cols(), lambda), options);
}

Eigen::MatrixXd RidgeModel::predict(const Eigen::MatrixXd& x) const {
  require(x.cols() == fitted_weights.rows(), ErrorKind::mismatch, "predict: feature count mismatch");
  const Eigen::MatrixXd xs = apply_stats(x, x_stats);
  Eigen::MatrixXd ys = xs * fitted_weights;
  return (ys.array().rowwise() * y_stats.scale.array()).rowwise() + y_stats.mean.array();
}

double RidgeModel::normal_equation_residual(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) const {
  const Eigen::MatrixXd xs = apply_stats(x, x_stats);
  const Eigen::MatrixXd ys = apply_stats(y, y_stats);
  const Eigen::MatrixXd xty = xs.transpose() * ys;
  const Eigen::MatrixXd lhs = xs.transpose() * (xs * fitted_weights) + fitted_weights * lambdas.asDiagonal();
  const double denom = xty.norm();
  return denom > 0.0 ? (lhs - xty).norm() / denom : (lhs - xty).norm();
}

PearsonResult pearson(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorKind::mismatch, "pearson: length mismatch");
  require(a.size() >= 2, ErrorKind::invalid_argument, "pearson: need at least 2 values");
  const auto n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  auto flat = [n](double ss, double mean) {
    return std::sqrt(ss / n) <= 1e-14 * std::max(1.0, std::abs(mean));
  };
  if (flat(saa, ma) || flat(sbb, mb)) return {0.0, true};
  return {std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0), false};
}

PearsonResult pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return pearson(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                 std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
}

}  // namespace cortexenc::encode
