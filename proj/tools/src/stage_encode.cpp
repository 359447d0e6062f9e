#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "cortexenc/binary_io.hpp"
#include "cortexenc/error.hpp"
#include "stages.hpp"

namespace cortexenc::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Everything alignment needs apart from the embedding.
struct AlignInputs {
  std::vector<std::string> words;
  std::vector<align::BrainResponse> responses;
  align::StimulusSequence stimulus;
  align::EyeTable eye;
};

AlignInputs load_align_inputs(Workspace& ws) {
  const auto& ac = ws.config().align;
  AlignInputs in;
  if (ac.mode == AlignMode::eye) {
    in.eye = align::parse_eye_tsv(ws.read_input(ws.resolve(ac.eye)));
    return in;
  }
  for (const auto& pattern : ac.responses) {
    for (const auto& path : ws.expand(pattern)) {
      in.responses.push_back(align::parse_brain(ws.read_input(path)));
    }
  }
  for (std::size_t i = 0; i < in.responses.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      require(in.responses[i].subject_id != in.responses[j].subject_id, ErrorKind::mismatch,
              "subject '" + in.responses[i].subject_id + "' appears in two response files");
    }
  }
  if (ac.mode == AlignMode::word) {
    in.words = align::parse_word_list(ws.read_input(ws.resolve(ac.words)));
  } else {
    in.stimulus = align::parse_stimulus_tsv(ws.read_input(ws.resolve(ac.stimulus)));
  }
  return in;
}

std::vector<align::AlignedData> align_model(const AlignConfig& ac, const AlignInputs& in,
                                            const reprs::EmbeddingMatrix& emb) {
  std::vector<align::AlignedData> out;
  switch (ac.mode) {
    case AlignMode::eye:
      out.push_back(align::eye_targets(in.eye, emb));
      break;
    case AlignMode::word:
      for (const auto& r : in.responses) out.push_back(align::word_targets(in.words, r, emb));
      break;
    case AlignMode::discourse: {
      const auto series = align::build_feature_series(in.stimulus, emb, ac.dt);
      for (const auto& r : in.responses) {
        r.validate();
        require(r.kind == align::ResponseKind::discourse_bold && r.tr, ErrorKind::mismatch,
                "discourse alignment needs discourse-bold responses; subject '" + r.subject_id + "' is " +
                    std::string(align::to_string(r.kind)));
        align::AlignedData a;
        a.design = align::convolve_downsample(series, *r.tr, r.samples(), ac.hrf);
        a.response = r;
        a.dropped_words = series.missing_words;
        out.push_back(std::move(a));
      }
      break;
    }
  }
  return out;
}

std::string design_tsv(const align::DesignMatrix& design) {
  std::string out;
  for (Eigen::Index r = 0; r < design.rows(); ++r) {
    out += r < static_cast<Eigen::Index>(design.row_labels.size())
               ? design.row_labels[static_cast<std::size_t>(r)]
               : std::to_string(r);
    for (Eigen::Index c = 0; c < design.cols(); ++c) {
      out += '\t';
      out += io::format_double(design.data(r, c));
    }
    out += '\n';
  }
  return out;
}

}  // namespace

void run_align(Workspace& ws) {
  const auto& ac = ws.config().align;
  const auto models = load_models(ws, ws.config().encode.models);
  const auto inputs = load_align_inputs(ws);
  ordered_json report = ordered_json::array();
  for (const auto& emb : models) {
    const auto tag = model_tag(emb.model_name, emb.layer);
    const auto aligned = align_model(ac, inputs, emb);
    ws.write_output(fs::path("align") / (tag + ".design.tsv"), design_tsv(aligned.front().design));
    for (const auto& a : aligned) {
      ordered_json entry;
      entry["model"] = tag;
      entry["subject"] = a.response.subject_id;
      entry["mode"] = to_string(ac.mode);
      entry["samples"] = a.design.rows();
      entry["features"] = a.design.cols();
      entry["targets"] = a.response.targets();
      entry["dropped_words"] = a.dropped_words;
      if (ac.mode == AlignMode::discourse) {
        entry["dt"] = a.design.alignment.dt;
        entry["tr"] = a.design.alignment.tr;
      }
      report.push_back(entry);
    }
  }
  ws.write_output("align/alignment.json", report.dump(1) + "\n");
}

void run_encode(Workspace& ws) {
  const auto& cfg = ws.config();
  const auto& ec = cfg.encode;
  const auto models = load_models(ws, ec.models);
  const auto inputs = load_align_inputs(ws);

  encode::CrossvalOptions opts;
  opts.lambda = ec.lambda;
  opts.lambda_grid = ec.lambda_grid;
  opts.inner_folds = ec.inner_folds;
  opts.scoring = ec.scoring;
  opts.ridge.standardize = ec.standardize;

  const auto results_dir = ws.resolve(cfg.results);
  for (const auto& emb : models) {
    const auto tag = model_tag(emb.model_name, emb.layer);
    for (const auto& a : align_model(cfg.align, inputs, emb)) {
      if (!a.dropped_words.empty()) {
        spdlog::warn("encode: {} stimulus words missing from {} for {}", a.dropped_words.size(), tag,
                     a.response.subject_id);
      }
      require(a.design.rows() >= 2 * ec.folds, ErrorKind::invalid_argument,
              tag + "/" + a.response.subject_id + ": " + std::to_string(a.design.rows()) +
                  " samples are too few for K=" + std::to_string(ec.folds));
      const auto folds = encode::kfold_split(a.design.rows(), ec.folds, cfg.seed, ec.scheme);
      auto result = encode::crossval_encode(a.design.data, a.response.data, folds, opts);
      result.subject_id = a.response.subject_id;
      result.model_name = emb.model_name;
      result.layer = emb.layer;
      result.target_names = a.response.resolved_target_names();
      result.config_hash = cfg.config_hash;
      const auto stem = tag + "__" + result.subject_id;
      const auto rel = results_dir.lexically_relative(ws.out_dir());
      require(!rel.empty() && *rel.begin() != "..", ErrorKind::invalid_argument,
              "results directory must lie inside the output directory");
      ws.write_output(rel / (stem + ".json"), encode::format_result_json(result));
      ws.write_output(rel / (stem + ".csv"), encode::format_result_csv(result));
    }
  }
}

}  // namespace cortexenc::cli
