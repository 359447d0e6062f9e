#include "cortexenc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "cortexenc/binary_io.hpp"
#include "cortexenc/corpus.hpp"
#include "cortexenc/error.hpp"

namespace cortexenc::stats {

using nlohmann::ordered_json;

void RoiAtlas::add(const std::string& target, int roi, const std::string& name,
                   const std::string& network) {
  require(roi_of_target.emplace(target, roi).second, ErrorKind::invalid_argument,
          "atlas maps target '" + target + "' more than once");
  const auto [it, inserted] = roi_name.emplace(roi, name);
  require(inserted || it->second == name, ErrorKind::invalid_argument,
          "atlas ROI " + std::to_string(roi) + " has conflicting names");
  const auto [nit, ninserted] = roi_network.emplace(roi, network);
  require(ninserted || nit->second == network, ErrorKind::invalid_argument,
          "atlas ROI " + std::to_string(roi) + " has conflicting networks");
  if (inserted) {
    for (const auto& [other, other_name] : roi_name) {
      require(other == roi || other_name != name, ErrorKind::invalid_argument,
              "atlas ROI name '" + name + "' is not unique");
    }
  }
}

RoiAtlas parse_atlas(std::string_view text) {
  corpus::validate_utf8(text);
  const auto lines = io::split_lines(text);
  require(!lines.empty(), ErrorKind::empty_input, "atlas is empty");
  const auto header = io::split_tabs(lines[0]);
  require(header.size() == 4 && header[0] == "target" && header[1] == "roi" && header[2] == "name" &&
              header[3] == "network",
          ErrorKind::schema, "atlas header must be target, roi, name, network");
  RoiAtlas atlas;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const auto f = io::split_tabs(lines[ln]);
    const std::string where = "atlas line " + std::to_string(ln + 1);
    require(f.size() == 4, ErrorKind::schema, where + ": expected 4 fields");
    atlas.add(std::string(f[0]), static_cast<int>(io::parse_int(f[1], where)), std::string(f[2]),
              std::string(f[3]));
  }
  return atlas;
}

std::string format_atlas(const RoiAtlas& atlas) {
  std::vector<std::pair<std::string, int>> rows(atlas.roi_of_target.begin(), atlas.roi_of_target.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  std::string out = "target\troi\tname\tnetwork\n";
  for (const auto& [target, roi] : rows) {
    out += target + "\t" + std::to_string(roi) + "\t" + atlas.roi_name.at(roi) + "\t" +
           atlas.roi_network.at(roi) + "\n";
  }
  return out;
}

RoiScores roi_aggregate(std::span<const double> per_target_r, std::span<const std::string> target_names,
                        const RoiAtlas& atlas) {
  require(per_target_r.size() == target_names.size(), ErrorKind::mismatch,
          "roi_aggregate: scores and target names differ in length");
  RoiScores out;
  std::map<int, double> sums;
  for (std::size_t t = 0; t < per_target_r.size(); ++t) {
    const auto it = atlas.roi_of_target.find(target_names[t]);
    if (it == atlas.roi_of_target.end()) {
      ++out.unmapped;
      continue;
    }
    sums[it->second] += per_target_r[t];
    ++out.target_count[it->second];
  }
  require(!sums.empty(), ErrorKind::empty_input, "atlas covers none of the result's targets");
  for (const auto& [roi, sum] : sums) out.mean_r[roi] = sum / out.target_count[roi];
  return out;
}

RoiScores roi_aggregate(const encode::EncodingResult& result, const RoiAtlas& atlas) {
  return roi_aggregate(std::span<const double>(result.per_target_r.data(),
                                               static_cast<std::size_t>(result.per_target_r.size())),
                       result.target_names, atlas);
}

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorKind::mismatch, "paired_ttest: length mismatch");
  require(a.size() >= 2, ErrorKind::invalid_argument, "paired_ttest: need at least 2 pairs");
  const auto n = static_cast<double>(a.size());
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];

  TTestResult out;
  out.df = n - 1.0;
  if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; })) return out;

  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (sd <= 1e-12 * std::abs(mean)) {
    out.t = std::copysign(std::numeric_limits<double>::infinity(), mean);
    out.p = 0.0;
    out.degenerate = true;
    return out;
  }
  out.t = mean / (sd / std::sqrt(n));
  out.p = student_t_two_sided_p(out.t, out.df);
  return out;
}

FdrResult fdr_bh(std::span<const double> pvals, double q) {
  require(q > 0.0 && q < 1.0 + 1e-15, ErrorKind::invalid_argument, "FDR level q must be in (0, 1]");
  for (double p : pvals) {
    require(p >= 0.0 && p <= 1.0, ErrorKind::invalid_argument, "p-value outside [0, 1]");
  }
  const std::size_t m = pvals.size();
  FdrResult out{std::vector<bool>(m, false), std::vector<double>(m, 1.0)};
  if (m == 0) return out;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pvals[x] < pvals[y]; });

  std::size_t cutoff = 0;  // number of rejections
  for (std::size_t i = 1; i <= m; ++i) {
    if (pvals[order[i - 1]] <= static_cast<double>(i) / static_cast<double>(m) * q) cutoff = i;
  }
  for (std::size_t i = 0; i < cutoff; ++i) out.rejected[order[i]] = true;

  double running = 1.0;
  for (std::size_t i = m; i >= 1; --i) {
    const double scaled = static_cast<double>(m) / static_cast<double>(i) * pvals[order[i - 1]];
    running = std::min(running, scaled);
    out.adjusted[order[i - 1]] = std::min(1.0, running);
  }
  return out;
}

std::optional<Unit> parse_unit(std::string_view name) {
  if (name == "roi") return Unit::roi;
  if (name == "voxel") return Unit::voxel;
  if (name == "global") return Unit::global;
  return std::nullopt;
}

std::optional<FdrFamily> parse_fdr_family(std::string_view name) {
  if (name == "comparison") return FdrFamily::comparison;
  if (name == "joint") return FdrFamily::joint;
  return std::nullopt;
}

void fdr_bh_joint(std::span<GroupComparison> comparisons, double q) {
  std::vector<double> pooled;
  for (const auto& cmp : comparisons) {
    for (const auto& u : cmp.units) pooled.push_back(u.p_raw);
  }
  const auto fdr = fdr_bh(pooled, q);
  std::size_t i = 0;
  for (auto& cmp : comparisons) {
    cmp.q = q;
    for (auto& u : cmp.units) {
      u.p_adj = fdr.adjusted[i];
      u.rejected = fdr.rejected[i];
      ++i;
    }
  }
}

std::string_view to_string(Unit unit) {
  switch (unit) {
    case Unit::roi: return "roi";
    case Unit::voxel: return "voxel";
    case Unit::global: return "global";
  }
  return "global";
}

namespace {

std::vector<const encode::EncodingResult*> by_subject(std::span<const encode::EncodingResult> results) {
  std::vector<const encode::EncodingResult*> out;
  for (const auto& r : results) out.push_back(&r);
  std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->subject_id < b->subject_id; });
  for (std::size_t i = 1; i < out.size(); ++i) {
    require(out[i]->subject_id != out[i - 1]->subject_id, ErrorKind::mismatch,
            "duplicate subject '" + out[i]->subject_id + "'");
  }
  return out;
}

}  // namespace

GroupComparison compare_models(std::span<const encode::EncodingResult> results_a,
                               std::span<const encode::EncodingResult> results_b, Unit unit, double q,
                               const RoiAtlas* atlas) {
  require(!results_a.empty() && !results_b.empty(), ErrorKind::empty_input, "compare_models: no results");
  const auto a = by_subject(results_a);
  const auto b = by_subject(results_b);
  require(a.size() == b.size(), ErrorKind::mismatch, "compare_models: subject sets differ");
  const auto& targets = a.front()->target_names;
  for (std::size_t s = 0; s < a.size(); ++s) {
    require(a[s]->subject_id == b[s]->subject_id, ErrorKind::mismatch,
            "compare_models: subject sets differ ('" + a[s]->subject_id + "' vs '" + b[s]->subject_id + "')");
    require(a[s]->model_name == a.front()->model_name && b[s]->model_name == b.front()->model_name,
            ErrorKind::mismatch, "compare_models: a result list mixes models");
    require(a[s]->target_names == targets && b[s]->target_names == targets, ErrorKind::mismatch,
            "compare_models: target sets differ");
  }
  require(unit != Unit::roi || atlas != nullptr, ErrorKind::invalid_argument, "roi comparison needs an atlas");

  GroupComparison out;
  out.model_a = a.front()->model_name;
  out.model_b = b.front()->model_name;
  out.unit = unit;
  out.q = q;
  out.n_subjects = a.size();

  std::vector<std::string> unit_names;
  std::vector<std::vector<double>> score_a;
  std::vector<std::vector<double>> score_b;
  auto push_subject = [&](const std::vector<double>& sa, const std::vector<double>& sb) {
    if (score_a.empty()) {
      score_a.resize(sa.size());
      score_b.resize(sb.size());
    }
    for (std::size_t u = 0; u < sa.size(); ++u) {
      score_a[u].push_back(sa[u]);
      score_b[u].push_back(sb[u]);
    }
  };
  for (std::size_t s = 0; s < a.size(); ++s) {
    std::vector<double> sa;
    std::vector<double> sb;
    if (unit == Unit::voxel) {
      sa.assign(a[s]->per_target_r.data(), a[s]->per_target_r.data() + a[s]->per_target_r.size());
      sb.assign(b[s]->per_target_r.data(), b[s]->per_target_r.data() + b[s]->per_target_r.size());
      if (s == 0) unit_names = targets;
    } else if (unit == Unit::global) {
      sa.push_back(a[s]->mean_r());
      sb.push_back(b[s]->mean_r());
      if (s == 0) unit_names = {"global"};
    } else {
      const auto ra = roi_aggregate(*a[s], *atlas);
      const auto rb = roi_aggregate(*b[s], *atlas);
      for (const auto& [roi, mean] : ra.mean_r) {
        sa.push_back(mean);
        sb.push_back(rb.mean_r.at(roi));
        if (s == 0) unit_names.push_back(atlas->roi_name.at(roi));
      }
    }
    push_subject(sa, sb);
  }

  std::vector<double> pvals;
  for (std::size_t u = 0; u < unit_names.size(); ++u) {
    const auto tt = paired_ttest(score_a[u], score_b[u]);
    UnitComparison uc;
    uc.unit = unit_names[u];
    uc.t = tt.t;
    uc.p_raw = tt.p;
    uc.degenerate = tt.degenerate;
    double diff = 0.0;
    for (std::size_t s = 0; s < score_a[u].size(); ++s) diff += score_a[u][s] - score_b[u][s];
    uc.mean_difference = diff / static_cast<double>(score_a[u].size());
    out.units.push_back(uc);
    pvals.push_back(tt.p);
  }
  const auto fdr = fdr_bh(pvals, q);
  for (std::size_t u = 0; u < out.units.size(); ++u) {
    out.units[u].p_adj = fdr.adjusted[u];
    out.units[u].rejected = fdr.rejected[u];
  }
  return out;
}

namespace {

std::string number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return io::format_double(v);
}

ordered_json json_number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

}  // namespace

std::string format_comparison_csv(const GroupComparison& cmp) {
  std::string out = "unit,t,p_raw,p_adj,rejected\n";
  for (const auto& u : cmp.units) {
    out += u.unit + "," + number_or_inf(u.t) + "," + io::format_double(u.p_raw) + "," +
           io::format_double(u.p_adj) + "," + (u.rejected ? "1" : "0") + "\n";
  }
  return out;
}

std::string format_comparison_json(const GroupComparison& cmp) {
  ordered_json j;
  j["model_a"] = cmp.model_a;
  j["model_b"] = cmp.model_b;
  j["unit"] = to_string(cmp.unit);
  j["q"] = cmp.q;
  j["n_subjects"] = cmp.n_subjects;
  std::size_t rejected = 0;
  auto units = ordered_json::array();
  for (const auto& u : cmp.units) {
    rejected += u.rejected ? 1 : 0;
    units.push_back({{"unit", u.unit},
                     {"t", json_number(u.t)},
                     {"p_raw", u.p_raw},
                     {"p_adj", u.p_adj},
                     {"rejected", u.rejected},
                     {"degenerate", u.degenerate},
                     {"mean_difference", u.mean_difference}});
  }
  j["n_units"] = cmp.units.size();
  j["n_rejected"] = rejected;
  j["units"] = units;
  return j.dump(1) + "\n";
}

Eigen::VectorXd subject_mean(std::span<const encode::EncodingResult> results) {
  require(!results.empty(), ErrorKind::empty_input, "subject_mean: no results");
  const auto& first = results.front();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(first.per_target_r.size());
  for (const auto& r : results) {
    require(r.target_names == first.target_names, ErrorKind::mismatch,
            "subject '" + r.subject_id + "' has a different target set");
    sum += r.per_target_r;
  }
  return sum / static_cast<double>(results.size());
}

LabelMap label_voxels(const std::map<std::string, Eigen::VectorXd>& scores,
                      std::span<const std::string> target_names, const LabelOptions& options) {
  require(scores.size() >= 2, ErrorKind::invalid_argument, "label_voxels needs at least 2 models");
  for (const auto& [name, s] : scores) {
    require(static_cast<std::size_t>(s.size()) == target_names.size(), ErrorKind::mismatch,
            "model '" + name + "' has a different target set");
  }
  LabelMap out;
  out.targets.assign(target_names.begin(), target_names.end());
  const auto n = target_names.size();
  out.winner.resize(n);
  out.score.resize(n);
  out.tie.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [name, s] : scores) best = std::max(best, s(ti));
    const std::string* winner = nullptr;
    int candidates = 0;
    for (const auto& [name, s] : scores) {  // std::map iterates lexicographically
      if (s(ti) >= best - options.tie_tolerance) {
        if (!winner) winner = &name;
        ++candidates;
      }
    }
    out.score[t] = best;
    out.tie[t] = candidates > 1;
    out.winner[t] = (options.r_min && best < *options.r_min) ? std::string(kUnlabeled) : *winner;
  }
  return out;
}

std::string format_label_csv(const LabelMap& map) {
  std::string out = "target,winner,score,tie\n";
  for (std::size_t t = 0; t < map.targets.size(); ++t) {
    out += map.targets[t] + "," + map.winner[t] + "," + io::format_double(map.score[t]) + "," +
           (map.tie[t] ? "1" : "0") + "\n";
  }
  return out;
}

std::string format_label_histogram(const LabelMap& map, const RoiAtlas* atlas) {
  std::map<std::string, int> overall;
  std::map<std::string, std::map<std::string, int>> per_roi;
  for (std::size_t t = 0; t < map.targets.size(); ++t) {
    ++overall[map.winner[t]];
    if (atlas) {
      const auto it = atlas->roi_of_target.find(map.targets[t]);
      if (it != atlas->roi_of_target.end()) ++per_roi[atlas->roi_name.at(it->second)][map.winner[t]];
    }
  }
  ordered_json j;
  j["overall"] = overall;
  j["rois"] = per_roi;
  return j.dump(1) + "\n";
}

}  // namespace cortexenc::stats
