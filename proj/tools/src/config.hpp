#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cortexenc/align.hpp"
#include "cortexenc/builders.hpp"
#include "cortexenc/corpus.hpp"
#include "cortexenc/encode.hpp"
#include "cortexenc/ppmi_svd.hpp"
#include "cortexenc/stats.hpp"

namespace cortexenc::cli {

// Paths in a config are kept as written. Workspace::resolve turns them into
// real paths: "$OUT/..." lives under the output directory, anything else
// relative is taken from the config file's directory.

struct SynthConfig {
  int vocab_size = 500;
  int dim = 20;
  int n_samples = 1000;
  int n_targets = 1000;
  std::optional<double> noise_sigma;
  double noise_fraction = 0.1;  // of the pooled signal sd, used without noise_sigma
  int clusters = 2;
  double p_in = 0.9;
  int n_tokens = 10000;
  int sentence_length = 10;
  double within_cluster_sd = 0.5;
  int subjects = 3;
  int rois = 10;
  int networks = 3;
  int nlm_layers = 12;
};

struct CorpusConfig {
  std::string path = "$OUT/synth/corpus.txt";
  corpus::TokenizeMode tokenize = corpus::TokenizeMode::whitespace;
  bool reset_at_lines = false;
  std::int64_t min_count = 1;
  std::size_t max_vocab = 100000;
  int window = 2;
  corpus::Weighting weighting = corpus::Weighting::flat;
};

struct LsmConfig {
  std::string name = "LSM";
  Eigen::Index dim = reprs::kDefaultDim;
  double alpha = 0.5;
  reprs::SvdMethod svd = reprs::SvdMethod::automatic;
};

struct NtmConfig {
  std::string name = "NTM";
  std::string base = "$OUT/embeddings/LSM.vec";
  int neighbors = 50;
  int walks_per_node = 10;
  int walk_length = 40;
  int window = 5;
  Eigen::Index dim = reprs::kDefaultDim;
  double alpha = 0.5;
  reprs::SvdMethod svd = reprs::SvdMethod::automatic;
  bool write_walks = true;
};

struct EbmConfig {
  std::string name = "EBM";
  std::string norms = "$OUT/synth/norms.tsv";
  std::optional<std::string> vocab;  // vocab TSV; the norm table's own words when absent
  reprs::EbmScaling scaling = reprs::EbmScaling::zscore;
};

struct ImportConfig {
  std::string path = "$OUT/synth/NLM.embl";
  reprs::EmbeddingFormat format = reprs::EmbeddingFormat::per_layer_table;
  std::optional<std::string> name;
};

enum class AlignMode { word, discourse, eye };

struct AlignConfig {
  AlignMode mode = AlignMode::word;
  std::string words = "$OUT/synth/words.txt";
  std::vector<std::string> responses = {"$OUT/synth/responses/*.brn"};
  std::string stimulus;
  std::string eye;
  double dt = 0.1;
  align::HrfParams hrf{};
};

struct EncodeConfig {
  std::vector<std::string> models = {"$OUT/embeddings/LSM.vec", "$OUT/embeddings/NTM.vec"};
  int folds = 10;
  double lambda = 1.0;
  std::vector<double> lambda_grid;
  int inner_folds = 5;
  encode::FoldScheme scheme = encode::FoldScheme::contiguous;
  encode::Scoring scoring = encode::Scoring::fold_mean;
  bool standardize = true;
};

struct CompareConfig {
  std::vector<std::pair<std::string, std::string>> pairs;  // all model pairs when empty
  stats::Unit unit = stats::Unit::roi;
  double q = 0.05;
  stats::FdrFamily fdr_family = stats::FdrFamily::comparison;
};

struct LabelMapConfig {
  std::vector<std::string> models;  // every model in the results when empty
  std::optional<double> r_min;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::string results = "$OUT/results";
  std::optional<std::string> atlas = "$OUT/synth/atlas.tsv";
  SynthConfig synth;
  CorpusConfig corpus;
  LsmConfig lsm;
  NtmConfig ntm;
  EbmConfig ebm;
  ImportConfig import;
  AlignConfig align;
  EncodeConfig encode;
  CompareConfig compare;
  LabelMapConfig label_map;

  std::filesystem::path config_dir;
  std::string config_hash;  // FNV-1a 64 of the canonical document, hex
};

std::string_view to_string(AlignMode mode);

// Strict parse: unknown keys, wrong types and out-of-range values throw a
// schema or invalid_argument error naming the JSON path.
RunConfig parse_config(const nlohmann::json& doc, std::optional<std::uint64_t> seed_override = std::nullopt);
RunConfig load_config(const std::filesystem::path& path,
                      std::optional<std::uint64_t> seed_override = std::nullopt);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace cortexenc::cli
