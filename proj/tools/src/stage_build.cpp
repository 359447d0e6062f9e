#include <cmath>
#include <cstdio>
#include <memory>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "cortexenc/binary_io.hpp"
#include "cortexenc/brain.hpp"
#include "cortexenc/builders.hpp"
#include "cortexenc/error.hpp"
#include "cortexenc/graph.hpp"
#include "cortexenc/rng.hpp"
#include "cortexenc/stats.hpp"
#include "cortexenc/synth.hpp"
#include "stages.hpp"

namespace cortexenc::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Stream ids for the synth stage.
enum SynthStream : std::uint64_t {
  kCentroids = 10,
  kWordNoise = 11,
  kSampleWords = 12,
  kTargetWeights = 13,
  kNormWeights = 14,
  kEyeTable = 15,
  kSubjectBase = 100,
  kDiscourseBase = 150,
  kLayerBase = 200,
};

constexpr double kEventSeconds = 0.5;
constexpr double kSynthTr = 2.0;
constexpr double kSynthDt = 0.1;
constexpr double kEyeNoise = 0.5;

std::string subject_name(int s) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "sub-%02d", s + 1);
  return buf;
}

std::string provenance_json(const reprs::EmbeddingMatrix& emb, const std::string& config_hash) {
  ordered_json j;
  j["model"] = emb.model_name;
  j["layer"] = emb.layer ? ordered_json(*emb.layer) : ordered_json(nullptr);
  j["rows"] = emb.rows();
  j["dim"] = emb.dim();
  j["config_hash"] = config_hash;
  j["provenance"] = emb.provenance;
  return j.dump(1) + "\n";
}

void write_embedding(Workspace& ws, reprs::EmbeddingMatrix& emb) {
  emb.provenance["config_hash"] = ws.config().config_hash;
  ws.write_output(fs::path("embeddings") / (emb.model_name + ".vec"), reprs::format_text_vec(emb));
  ws.write_output(fs::path("embeddings") / (emb.model_name + ".json"),
                  provenance_json(emb, ws.config().config_hash));
}

reprs::SvdOptions svd_options(reprs::SvdMethod method) {
  reprs::SvdOptions o;
  o.method = method;
  return o;
}

}  // namespace

std::string model_tag(const std::string& model, std::optional<int> layer) {
  return layer ? model + "_L" + std::to_string(*layer) : model;
}

std::vector<reprs::EmbeddingMatrix> load_models(Workspace& ws, const std::vector<std::string>& paths) {
  std::vector<reprs::EmbeddingMatrix> out;
  for (const auto& configured : paths) {
    for (const auto& path : ws.expand(configured)) {
      const auto bytes = ws.read_input(path);
      const auto name = path.stem().string();
      auto mats = path.extension() == ".embl" ? reprs::parse_per_layer_table(bytes, name)
                                              : reprs::parse_text_vec(bytes, name);
      for (auto& m : mats) out.push_back(std::move(m));
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      require(model_tag(out[i].model_name, out[i].layer) != model_tag(out[j].model_name, out[j].layer),
              ErrorKind::invalid_argument,
              "model '" + model_tag(out[i].model_name, out[i].layer) + "' is listed twice");
    }
  }
  return out;
}

corpus::Corpus load_corpus(Workspace& ws) {
  const auto& c = ws.config().corpus;
  const auto text = ws.read_input(ws.resolve(c.path));
  auto corp = corpus::read_corpus(text, c.tokenize, c.reset_at_lines);
  std::size_t tokens = 0;
  for (const auto& seq : corp) tokens += seq.size();
  require(tokens > 0, ErrorKind::empty_input, "empty corpus: " + ws.resolve(c.path).string());
  return corp;
}

void run_synth(Workspace& ws) {
  const auto& cfg = ws.config();
  const auto& sc = cfg.synth;
  synth::SynthSpec spec;
  spec.seed = cfg.seed;
  spec.vocab_size = sc.vocab_size;
  spec.dim = sc.dim;
  spec.n_samples = sc.n_samples;
  spec.n_targets = sc.n_targets;
  spec.clusters = sc.clusters;
  spec.p_in = sc.p_in;
  spec.n_tokens = sc.n_tokens;
  spec.sentence_length = sc.sentence_length;
  spec.validate();

  const auto corp = synth::gen_corpus(spec);
  ws.write_output("synth/corpus.txt", synth::format_corpus(corp));

  // Ground-truth embedding: cluster centroid plus word-specific jitter.
  auto truth = synth::random_embedding(spec, derive_seed(cfg.seed, kWordNoise), "truth");
  const Eigen::MatrixXd centroids = synth::random_matrix(sc.clusters, sc.dim, derive_seed(cfg.seed, kCentroids));
  for (int w = 0; w < sc.vocab_size; ++w) {
    truth.data.row(w) = centroids.row(synth::cluster_of(w, spec)) + sc.within_cluster_sd * truth.data.row(w);
  }
  ws.write_output("synth/truth.vec", reprs::format_text_vec(truth));

  Rng pick(derive_seed(cfg.seed, kSampleWords));
  std::vector<std::string> words;
  std::string word_list;
  Eigen::MatrixXd x(sc.n_samples, sc.dim);
  for (int i = 0; i < sc.n_samples; ++i) {
    const auto w = static_cast<Eigen::Index>(pick.below(static_cast<std::uint64_t>(sc.vocab_size)));
    words.push_back(truth.vocab->word(static_cast<std::size_t>(w)));
    word_list += words.back() + "\n";
    x.row(i) = truth.data.row(w);
  }
  ws.write_output("synth/words.txt", word_list);

  const Eigen::MatrixXd w0 = synth::random_matrix(sc.dim, sc.n_targets, derive_seed(cfg.seed, kTargetWeights));
  const double sd = synth::signal_sd(x, w0);
  const double sigma = sc.noise_sigma.value_or(sc.noise_fraction * sd);
  for (int s = 0; s < sc.subjects; ++s) {
    const auto brain = synth::gen_brain(x, w0, sigma, derive_seed(cfg.seed, kSubjectBase + s), subject_name(s));
    ws.write_output(fs::path("synth/responses") / (subject_name(s) + ".brn"), align::format_brain(brain));
  }

  const auto ceiling = synth::theoretical_ceiling(x, w0, sigma);
  std::string ceiling_csv = "target,ceiling\n";
  for (Eigen::Index t = 0; t < ceiling.size(); ++t) {
    ceiling_csv += std::to_string(t) + "," + io::format_double(ceiling(t)) + "\n";
  }
  ws.write_output("synth/ceiling.csv", ceiling_csv);

  // Discourse variant: back-to-back events, HRF convolved, sampled every TR.
  const auto stim = synth::gen_stimulus(words, sc.n_samples, kEventSeconds);
  ws.write_output("synth/stimulus.tsv", align::format_stimulus_tsv(stim));
  const auto series = align::build_feature_series(stim, truth, kSynthDt);
  const auto volumes = static_cast<Eigen::Index>(std::floor(stim.total_duration / kSynthTr));
  const auto design = align::convolve_downsample(series, kSynthTr, volumes);
  for (int s = 0; s < sc.subjects; ++s) {
    auto bold = synth::gen_brain(design.data, w0, sigma, derive_seed(cfg.seed, kDiscourseBase + s), subject_name(s));
    bold.kind = align::ResponseKind::discourse_bold;
    bold.tr = kSynthTr;
    ws.write_output(fs::path("synth/discourse") / (subject_name(s) + ".brn"), align::format_brain(bold));
  }

  stats::RoiAtlas atlas;
  for (int t = 0; t < sc.n_targets; ++t) {
    const int roi = static_cast<int>(static_cast<std::int64_t>(t) * sc.rois / sc.n_targets);
    const int net = roi * sc.networks / sc.rois;
    char roi_name[16];
    std::snprintf(roi_name, sizeof roi_name, "roi%02d", roi + 1);
    atlas.add(std::to_string(t), roi + 1, roi_name, "net" + std::to_string(net + 1));
  }
  ws.write_output("synth/atlas.tsv", stats::format_atlas(atlas));

  const Eigen::MatrixXd norm_weights =
      synth::random_matrix(sc.dim, reprs::kEmbodiedDim, derive_seed(cfg.seed, kNormWeights));
  const Eigen::MatrixXd ratings = truth.data * norm_weights;
  reprs::SemanticNormTable norms;
  for (int w = 0; w < sc.vocab_size; ++w) {
    std::array<double, 6> row{};
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = ratings(w, static_cast<Eigen::Index>(c));
    norms.add(truth.vocab->word(static_cast<std::size_t>(w)), row);
  }
  ws.write_output("synth/norms.tsv", reprs::format_norm_table(norms));

  ws.write_output("synth/eye.tsv",
                  align::format_eye_tsv(synth::gen_eye_table(truth, kEyeNoise, derive_seed(cfg.seed, kEyeTable))));

  // A layered stand-in for a language model: the truth plus noise that is
  // smallest in the middle layer.
  std::vector<reprs::EmbeddingMatrix> layers;
  const double middle = (sc.nlm_layers + 1) / 2.0;
  for (int l = 1; l <= sc.nlm_layers; ++l) {
    reprs::EmbeddingMatrix layer = truth;
    layer.model_name = "NLM";
    layer.layer = l;
    const double noise = 0.5 * std::abs(l - middle);
    layer.data += noise * synth::random_matrix(sc.vocab_size, sc.dim, derive_seed(cfg.seed, kLayerBase + l));
    layers.push_back(std::move(layer));
  }
  ws.write_output("synth/NLM.embl", reprs::format_per_layer_table(layers));

  ordered_json summary;
  summary["seed"] = cfg.seed;
  summary["vocab_size"] = sc.vocab_size;
  summary["dim"] = sc.dim;
  summary["n_samples"] = sc.n_samples;
  summary["n_targets"] = sc.n_targets;
  summary["subjects"] = sc.subjects;
  summary["signal_sd"] = sd;
  summary["noise_sigma"] = sigma;
  summary["mean_ceiling"] = ceiling.mean();
  summary["discourse_volumes"] = volumes;
  summary["config_hash"] = cfg.config_hash;
  ws.write_output("synth/synth.json", summary.dump(1) + "\n");
}

void run_build_cooc(Workspace& ws) {
  const auto& c = ws.config().corpus;
  const auto corp = load_corpus(ws);
  auto vocab = std::make_shared<const corpus::Vocabulary>(corpus::build_vocab(corp, c.min_count, c.max_vocab));
  const auto cooc = corpus::count_cooccurrences(corp, vocab, {c.window, c.weighting});
  ws.write_output("cooc/vocab.tsv", corpus::format_vocab(*vocab));
  ws.write_output("cooc/cooc.tsv", corpus::format_cooccurrence_triples(cooc));
  ws.write_output("cooc/cooc.json", corpus::format_cooccurrence_sidecar(cooc, "vocab.tsv"));
}

void run_build_lsm(Workspace& ws) {
  const auto& cfg = ws.config();
  reprs::LsmOptions opts;
  opts.min_count = cfg.corpus.min_count;
  opts.max_size = cfg.corpus.max_vocab;
  opts.cooccurrence = {cfg.corpus.window, cfg.corpus.weighting};
  opts.dim = cfg.lsm.dim;
  opts.alpha = cfg.lsm.alpha;
  opts.svd = svd_options(cfg.lsm.svd);
  opts.seed = cfg.seed;
  auto emb = reprs::build_lsm(load_corpus(ws), opts);
  emb.model_name = cfg.lsm.name;
  write_embedding(ws, emb);
}

void run_build_ntm(Workspace& ws) {
  const auto& cfg = ws.config();
  const auto& nc = cfg.ntm;
  auto bases = load_models(ws, {nc.base});
  require(bases.size() == 1, ErrorKind::invalid_argument,
          "ntm.base must name a single embedding matrix, got " + std::to_string(bases.size()));
  const auto& base = bases.front();
  base.validate();
  const auto v = static_cast<int>(base.rows());
  require(v >= 2, ErrorKind::invalid_argument, "NTM needs at least 2 words");
  int k = nc.neighbors;
  if (k >= v) {
    spdlog::warn("build-ntm: neighbors={} capped to V-1={}", k, v - 1);
    k = v - 1;
  }

  reprs::NtmOptions opts;
  opts.neighbors = k;
  opts.walks_per_node = nc.walks_per_node;
  opts.walk_length = nc.walk_length;
  opts.window = nc.window;
  opts.dim = nc.dim;
  opts.alpha = nc.alpha;
  opts.svd = svd_options(nc.svd);
  opts.seed = cfg.seed;

  const auto graph = reprs::cosine_knn_graph(base, k);
  auto emb = reprs::build_ntm_from_graph(graph, base.vocab, opts);
  emb.model_name = nc.name;
  emb.provenance["base_model"] = model_tag(base.model_name, base.layer);
  write_embedding(ws, emb);

  if (nc.write_walks) {
    const auto walks = reprs::random_walks(graph, opts.walks_per_node, opts.walk_length, opts.seed);
    std::string text;
    for (const auto& walk : walks) {
      for (std::size_t i = 0; i < walk.size(); ++i) {
        if (i) text += ' ';
        text += std::to_string(walk[i]);
      }
      text += '\n';
    }
    ws.write_output(fs::path("ntm") / (nc.name + ".walks.txt"), text);
  }
}

void run_build_ebm(Workspace& ws) {
  const auto& ec = ws.config().ebm;
  const auto norms = reprs::parse_norm_table(ws.read_input(ws.resolve(ec.norms)));
  const auto vocab = ec.vocab ? corpus::parse_vocab(ws.read_input(ws.resolve(*ec.vocab)))
                              : corpus::Vocabulary(norms.words);
  auto result = reprs::build_ebm(norms, vocab, ec.scaling);
  if (!result.coverage.missing.empty()) {
    spdlog::warn("build-ebm: {} of {} words have no norms and were excluded", result.coverage.missing.size(),
                 result.coverage.requested);
  }
  result.embedding.model_name = ec.name;
  write_embedding(ws, result.embedding);
  ordered_json cov;
  cov["retained"] = result.coverage.retained;
  cov["requested"] = result.coverage.requested;
  cov["missing"] = result.coverage.missing;
  ws.write_output(fs::path("embeddings") / (ec.name + ".coverage.json"), cov.dump(1) + "\n");
}

void run_import_emb(Workspace& ws) {
  const auto& ic = ws.config().import;
  const auto path = ws.resolve(ic.path);
  const auto bytes = ws.read_input(path);
  const auto name = ic.name.value_or(path.stem().string());
  auto layers = ic.format == reprs::EmbeddingFormat::per_layer_table ? reprs::parse_per_layer_table(bytes, name)
                                                                      : reprs::parse_text_vec(bytes, name);
  require(!layers.empty(), ErrorKind::empty_input, "no embedding matrices in " + path.string());
  ordered_json info;
  info["model"] = name;
  info["source"] = path.generic_string();
  info["layers"] = layers.size();
  info["rows"] = layers.front().rows();
  info["dim"] = layers.front().dim();
  info["config_hash"] = ws.config().config_hash;
  if (layers.size() == 1 && !layers.front().layer) {
    ws.write_output(fs::path("embeddings") / (name + ".vec"), reprs::format_text_vec(layers.front()));
  } else {
    ws.write_output(fs::path("embeddings") / (name + ".embl"), reprs::format_per_layer_table(layers));
  }
  ws.write_output(fs::path("embeddings") / (name + ".json"), info.dump(1) + "\n");
}

}  // namespace cortexenc::cli
