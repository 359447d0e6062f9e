#include <algorithm>

#include <nlohmann/json.hpp>

#include "cortexenc/binary_io.hpp"
#include "cortexenc/error.hpp"
#include "cortexenc/stats.hpp"
#include "stages.hpp"

namespace cortexenc::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::optional<stats::RoiAtlas> load_atlas(Workspace& ws) {
  if (!ws.config().atlas) return std::nullopt;
  return stats::parse_atlas(ws.read_input(ws.resolve(*ws.config().atlas)));
}

// Subject-averaged results for one model/layer, with target sets checked.
encode::EncodingResult average(const std::vector<const encode::EncodingResult*>& subjects) {
  std::vector<encode::EncodingResult> copies;
  for (const auto* r : subjects) copies.push_back(*r);
  encode::EncodingResult mean = copies.front();
  mean.subject_id = "mean";
  mean.per_target_r = stats::subject_mean(copies);
  return mean;
}

void check_targets(const std::string& model, const std::vector<encode::EncodingResult>& results) {
  std::vector<std::string> offenders;
  for (const auto& r : results) {
    if (r.target_names != results.front().target_names) offenders.push_back(r.subject_id);
  }
  require(offenders.empty(), ErrorKind::mismatch, [&] {
    std::string msg = model + ": target sets differ from subject '" + results.front().subject_id + "' in";
    for (const auto& s : offenders) msg += " '" + s + "'";
    return msg;
  }());
}

std::vector<std::string> model_names(const std::map<std::string, std::vector<encode::EncodingResult>>& all) {
  std::vector<std::string> names;
  for (const auto& [name, results] : all) names.push_back(name);
  return names;
}

const std::vector<encode::EncodingResult>& results_for(
    const std::map<std::string, std::vector<encode::EncodingResult>>& all, const std::string& model) {
  const auto it = all.find(model);
  require(it != all.end(), ErrorKind::invalid_argument, "no encoding results for model '" + model + "'");
  return it->second;
}

// Mean of per-target r over the targets of each network.
std::map<std::string, double> network_means(const encode::EncodingResult& r, const stats::RoiAtlas& atlas) {
  std::map<std::string, double> sum;
  std::map<std::string, int> count;
  for (std::size_t t = 0; t < r.target_names.size(); ++t) {
    const auto it = atlas.roi_of_target.find(r.target_names[t]);
    if (it == atlas.roi_of_target.end()) continue;
    const auto& net = atlas.roi_network.at(it->second);
    sum[net] += r.per_target_r(static_cast<Eigen::Index>(t));
    ++count[net];
  }
  for (auto& [net, s] : sum) s /= count[net];
  return sum;
}

}  // namespace

std::map<std::string, std::vector<encode::EncodingResult>> load_results(Workspace& ws) {
  const auto dir = ws.resolve(ws.config().results);
  std::error_code ec;
  require(fs::is_directory(dir, ec), ErrorKind::io, "results directory " + dir.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::map<std::string, std::vector<encode::EncodingResult>> out;
  for (const auto& f : files) {
    auto r = encode::parse_result_json(ws.read_input(f));
    out[r.model_name].push_back(std::move(r));
  }
  require(!out.empty(), ErrorKind::empty_input, "no encoding results in " + dir.string());
  return out;
}

ModelResults select_layer(const std::string& model, const std::vector<encode::EncodingResult>& all) {
  std::map<std::optional<int>, std::vector<const encode::EncodingResult*>> by_layer;
  for (const auto& r : all) by_layer[r.layer].push_back(&r);
  require(!(by_layer.count(std::nullopt) && by_layer.size() > 1), ErrorKind::mismatch,
          model + ": results mix layered and unlayered entries");

  ModelResults out;
  out.model = model;
  if (by_layer.size() == 1 && !by_layer.begin()->first) {
    out.subjects = all;
    check_targets(model, out.subjects);
    return out;
  }
  std::vector<encode::EncodingResult> means;
  for (const auto& [layer, subjects] : by_layer) {
    std::vector<encode::EncodingResult> copies;
    for (const auto* r : subjects) copies.push_back(*r);
    check_targets(model_tag(model, layer), copies);
    means.push_back(average(subjects));
  }
  out.layer = encode::best_layer(means);
  for (const auto* r : by_layer.at(out.layer)) out.subjects.push_back(*r);
  return out;
}

void run_compare(Workspace& ws) {
  const auto& cc = ws.config().compare;
  const auto all = load_results(ws);
  const auto atlas = load_atlas(ws);
  require(cc.unit != stats::Unit::roi || atlas, ErrorKind::invalid_argument,
          "compare.unit = roi needs an atlas");

  auto pairs = cc.pairs;
  if (pairs.empty()) {
    const auto names = model_names(all);
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (std::size_t j = i + 1; j < names.size(); ++j) pairs.emplace_back(names[i], names[j]);
    }
  }
  require(!pairs.empty(), ErrorKind::invalid_argument, "compare needs results for at least two models");

  std::vector<stats::GroupComparison> cmps;
  std::vector<fs::path> stems;
  for (const auto& [a, b] : pairs) {
    const auto ra = select_layer(a, results_for(all, a));
    const auto rb = select_layer(b, results_for(all, b));
    cmps.push_back(stats::compare_models(ra.subjects, rb.subjects, cc.unit, cc.q, atlas ? &*atlas : nullptr));
    stems.push_back(fs::path("compare") / (model_tag(a, ra.layer) + "_vs_" + model_tag(b, rb.layer) + "." +
                                           std::string(stats::to_string(cc.unit))));
  }
  if (cc.fdr_family == stats::FdrFamily::joint) stats::fdr_bh_joint(cmps, cc.q);
  for (std::size_t i = 0; i < cmps.size(); ++i) {
    ws.write_output(stems[i].string() + ".csv", stats::format_comparison_csv(cmps[i]));
    ws.write_output(stems[i].string() + ".json", stats::format_comparison_json(cmps[i]));
  }
}

void run_label_map(Workspace& ws) {
  const auto& lc = ws.config().label_map;
  const auto all = load_results(ws);
  const auto atlas = load_atlas(ws);
  const auto names = lc.models.empty() ? model_names(all) : lc.models;

  std::map<std::string, Eigen::VectorXd> scores;
  std::vector<std::string> targets;
  for (const auto& name : names) {
    const auto sel = select_layer(name, results_for(all, name));
    if (targets.empty()) targets = sel.subjects.front().target_names;
    require(sel.subjects.front().target_names == targets, ErrorKind::mismatch,
            "model '" + name + "' has a different target set");
    scores[model_tag(name, sel.layer)] = stats::subject_mean(sel.subjects);
  }
  stats::LabelOptions opts;
  opts.r_min = lc.r_min;
  const auto map = stats::label_voxels(scores, targets, opts);
  ws.write_output("label_map/labels.csv", stats::format_label_csv(map));
  ws.write_output("label_map/histogram.json", stats::format_label_histogram(map, atlas ? &*atlas : nullptr));
}

void run_report(Workspace& ws) {
  const auto all = load_results(ws);
  const auto atlas = load_atlas(ws);

  std::string models_csv = "model,layer,mean_r,n_subjects\n";
  std::string layers_csv = "model,layer,mean_r,best\n";
  // Keyed so rows come out grouped by network (or ROI), then model.
  std::map<std::pair<std::string, std::string>, double> network_rows;
  std::map<std::pair<int, std::string>, double> roi_rows;
  bool any_layered = false;

  for (const auto& [name, results] : all) {
    const auto sel = select_layer(name, results);
    const auto tag = model_tag(name, sel.layer);
    const auto mean = stats::subject_mean(sel.subjects);
    models_csv += name + "," + (sel.layer ? std::to_string(*sel.layer) : "") + "," +
                  io::format_double(mean.size() ? mean.mean() : 0.0) + "," +
                  std::to_string(sel.subjects.size()) + "\n";

    if (sel.layer) {
      any_layered = true;
      std::map<int, std::vector<encode::EncodingResult>> by_layer;
      for (const auto& r : results) by_layer[*r.layer].push_back(r);
      for (const auto& [layer, subjects] : by_layer) {
        const auto m = stats::subject_mean(subjects);
        layers_csv += name + "," + std::to_string(layer) + "," + io::format_double(m.mean()) + "," +
                      (layer == *sel.layer ? "1" : "0") + "\n";
      }
    }

    if (!atlas) continue;
    std::map<std::string, double> net_sum;
    std::map<int, double> roi_sum;
    for (const auto& r : sel.subjects) {
      for (const auto& [net, m] : network_means(r, *atlas)) net_sum[net] += m;
      for (const auto& [roi, m] : stats::roi_aggregate(r, *atlas).mean_r) roi_sum[roi] += m;
    }
    const auto n = static_cast<double>(sel.subjects.size());
    for (const auto& [net, s] : net_sum) network_rows[{net, tag}] = s / n;
    for (const auto& [roi, s] : roi_sum) roi_rows[{roi, tag}] = s / n;
  }

  ws.write_output("report/models.csv", models_csv);
  if (any_layered) ws.write_output("report/layers.csv", layers_csv);
  if (atlas) {
    std::string networks_csv = "network,model,mean_r\n";
    for (const auto& [key, m] : network_rows) {
      networks_csv += key.first + "," + key.second + "," + io::format_double(m) + "\n";
    }
    std::string rois_csv = "roi,name,network,model,mean_r\n";
    for (const auto& [key, m] : roi_rows) {
      rois_csv += std::to_string(key.first) + "," + atlas->roi_name.at(key.first) + "," +
                  atlas->roi_network.at(key.first) + "," + key.second + "," + io::format_double(m) + "\n";
    }
    ws.write_output("report/networks.csv", networks_csv);
    ws.write_output("report/rois.csv", rois_csv);
  }
}

}  // namespace cortexenc::cli
