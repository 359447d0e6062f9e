#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "cortexenc/encode.hpp"

namespace cortexenc::stats {

// Regularized incomplete beta I_x(a, b), continued fraction evaluated to a
// relative tolerance of 1e-15 (well inside 1e-10).
double regularized_incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, double df);

// P(|T| >= |t|) for T ~ Student-t(df).
double student_t_two_sided_p(double t, double df);

struct RoiAtlas {
  std::unordered_map<std::string, int> roi_of_target;
  std::map<int, std::string> roi_name;
  std::map<int, std::string> roi_network;

  void add(const std::string& target, int roi, const std::string& name, const std::string& network);
};

// TSV with header "target<TAB>roi<TAB>name<TAB>network", one row per target.
// ROI ids are integers; each id keeps a single name and network.
RoiAtlas parse_atlas(std::string_view text);
std::string format_atlas(const RoiAtlas& atlas);

struct RoiScores {
  std::map<int, double> mean_r;
  std::map<int, int> target_count;
  int unmapped = 0;
};

RoiScores roi_aggregate(std::span<const double> per_target_r, std::span<const std::string> target_names,
                        const RoiAtlas& atlas);
RoiScores roi_aggregate(const encode::EncodingResult& result, const RoiAtlas& atlas);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  double df = 0.0;
  bool degenerate = false;  // zero-sd differences with a non-zero mean
};

// Two-sided paired t-test on d = a - b with n - 1 degrees of freedom.
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b);

struct FdrResult {
  std::vector<bool> rejected;
  std::vector<double> adjusted;
};

// Benjamini-Hochberg step-up at level q, outputs in input order.
FdrResult fdr_bh(std::span<const double> pvals, double q);

enum class Unit { roi, voxel, global };

std::optional<Unit> parse_unit(std::string_view name);
std::string_view to_string(Unit unit);

struct UnitComparison {
  std::string unit;
  double t = 0.0;
  double p_raw = 1.0;
  double p_adj = 1.0;
  bool rejected = false;
  bool degenerate = false;
  double mean_difference = 0.0;
};

struct GroupComparison {
  std::string model_a;
  std::string model_b;
  Unit unit = Unit::global;
  double q = 0.05;
  std::size_t n_subjects = 0;
  std::vector<UnitComparison> units;
};

// Subjects are paired by subject id. Per unit: paired t-test across
// subjects, then BH across units.
GroupComparison compare_models(std::span<const encode::EncodingResult> results_a,
                               std::span<const encode::EncodingResult> results_b, Unit unit, double q,
                               const RoiAtlas* atlas = nullptr);

enum class FdrFamily { comparison, joint };

std::optional<FdrFamily> parse_fdr_family(std::string_view name);

// Re-runs BH over the raw p-values of every unit in every comparison as
// one family, overwriting p_adj and rejected.
void fdr_bh_joint(std::span<GroupComparison> comparisons, double q);

std::string format_comparison_csv(const GroupComparison& cmp);
std::string format_comparison_json(const GroupComparison& cmp);

// Element-wise subject mean of per_target_r. All results must share targets.
Eigen::VectorXd subject_mean(std::span<const encode::EncodingResult> results);

struct LabelOptions {
  // Targets whose best score is below this are labelled "unlabeled".
  std::optional<double> r_min;
  double tie_tolerance = 1e-12;
};

inline constexpr std::string_view kUnlabeled = "unlabeled";

struct LabelMap {
  std::vector<std::string> targets;
  std::vector<std::string> winner;
  std::vector<double> score;
  std::vector<bool> tie;
};

// Winner per target is the model with the highest score. Models within the
// tie tolerance of the best are tied; the lexicographically first wins.
LabelMap label_voxels(const std::map<std::string, Eigen::VectorXd>& scores,
                      std::span<const std::string> target_names, const LabelOptions& options = {});

std::string format_label_csv(const LabelMap& map);
// {"overall": {model: count}, "rois": {roi name: {model: count}}}
std::string format_label_histogram(const LabelMap& map, const RoiAtlas* atlas);

}  // namespace cortexenc::stats
