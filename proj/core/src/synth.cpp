#include "cortexenc/synth.hpp"

#include <cmath>
#include <memory>

#include "cortexenc/error.hpp"
#include "cortexenc/parallel.hpp"
#include "cortexenc/rng.hpp"

namespace cortexenc::synth {

namespace {

// Stream ids for the independent parts of one spec.
constexpr std::uint64_t kCorpusStream = 1;
constexpr std::uint64_t kEyeWeightStream = 2;
constexpr std::uint64_t kEyeNoiseStream = 3;

}  // namespace

std::optional<GeneratorKind> parse_generator_kind(std::string_view name) {
  if (name == "planted-clusters") return GeneratorKind::planted_clusters;
  if (name == "linear-response") return GeneratorKind::linear_response;
  return std::nullopt;
}

std::string_view to_string(GeneratorKind kind) {
  return kind == GeneratorKind::planted_clusters ? "planted-clusters" : "linear-response";
}

void SynthSpec::validate() const {
  require(vocab_size >= 1 && dim >= 1 && n_samples >= 1 && n_targets >= 1, ErrorKind::invalid_argument,
          "synth sizes must all be >= 1");
  require(std::isfinite(noise_sigma) && noise_sigma >= 0.0, ErrorKind::invalid_argument,
          "noise_sigma must be finite and >= 0");
  require(clusters >= 1, ErrorKind::invalid_argument, "clusters must be >= 1");
  require(p_in >= 0.0 && p_in <= 1.0, ErrorKind::invalid_argument, "p_in must be in [0, 1]");
  require(n_tokens >= 1 && sentence_length >= 1, ErrorKind::invalid_argument,
          "n_tokens and sentence_length must be >= 1");
}

int cluster_of(int word, const SynthSpec& spec) {
  return static_cast<int>(static_cast<std::int64_t>(word) * spec.clusters / spec.vocab_size);
}

std::string word_name(int word, const SynthSpec& spec) {
  return "c" + std::to_string(cluster_of(word, spec)) + "w" + std::to_string(word);
}

corpus::Corpus gen_corpus(const SynthSpec& spec) {
  spec.validate();
  require(spec.vocab_size >= 2 * spec.clusters, ErrorKind::invalid_argument,
          "planted corpus needs vocab_size >= 2 * clusters");
  require(spec.clusters >= 2 || spec.p_in == 1.0, ErrorKind::invalid_argument,
          "a single cluster requires p_in = 1");

  std::vector<int> first(static_cast<std::size_t>(spec.clusters) + 1, spec.vocab_size);
  for (int w = spec.vocab_size - 1; w >= 0; --w) first[static_cast<std::size_t>(cluster_of(w, spec))] = w;

  std::vector<std::string> names(static_cast<std::size_t>(spec.vocab_size));
  for (int w = 0; w < spec.vocab_size; ++w) names[static_cast<std::size_t>(w)] = word_name(w, spec);

  Rng rng(derive_seed(spec.seed, kCorpusStream));
  auto draw_from = [&](int cluster) {
    const int lo = first[static_cast<std::size_t>(cluster)];
    const int hi = first[static_cast<std::size_t>(cluster) + 1];
    return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo)));
  };

  corpus::Corpus out;
  int remaining = spec.n_tokens;
  while (remaining > 0) {
    const int len = std::min(remaining, spec.sentence_length);
    const int home = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.clusters)));
    std::vector<std::string> sentence;
    sentence.reserve(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) {
      int cluster = home;
      if (rng.uniform() >= spec.p_in) {
        cluster = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.clusters - 1)));
        if (cluster >= home) ++cluster;
      }
      sentence.push_back(names[static_cast<std::size_t>(draw_from(cluster))]);
    }
    out.push_back(std::move(sentence));
    remaining -= len;
  }
  return out;
}

std::string format_corpus(const corpus::Corpus& corpus) {
  std::string out;
  for (const auto& sentence : corpus) {
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      if (i) out += ' ';
      out += sentence[i];
    }
    out += '\n';
  }
  return out;
}

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  require(rows >= 0 && cols >= 0, ErrorKind::invalid_argument, "random_matrix: negative size");
  Eigen::MatrixXd m(rows, cols);
  parallel_for(static_cast<std::size_t>(rows), [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    for (Eigen::Index j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), j) = rng.normal();
  });
  return m;
}

reprs::EmbeddingMatrix random_embedding(const SynthSpec& spec, std::uint64_t seed, std::string model_name) {
  spec.validate();
  std::vector<std::string> words;
  for (int w = 0; w < spec.vocab_size; ++w) words.push_back(word_name(w, spec));
  reprs::EmbeddingMatrix emb;
  emb.vocab = std::make_shared<const corpus::Vocabulary>(std::move(words));
  emb.data = random_matrix(spec.vocab_size, spec.dim, seed);
  emb.model_name = std::move(model_name);
  emb.provenance["generator"] = "synth.random_embedding";
  emb.provenance["seed"] = std::to_string(seed);
  return emb;
}

align::BrainResponse gen_brain(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w0, double noise_sigma,
                               std::uint64_t seed, std::string subject_id) {
  require(x.cols() == w0.rows(), ErrorKind::mismatch, "gen_brain: X columns must equal W0 rows");
  require(x.allFinite() && w0.allFinite() && std::isfinite(noise_sigma) && noise_sigma >= 0.0,
          ErrorKind::invalid_argument, "gen_brain: inputs must be finite and noise_sigma >= 0");
  align::BrainResponse out;
  out.subject_id = std::move(subject_id);
  out.kind = align::ResponseKind::word_tvalue;
  out.data = x * w0;
  if (noise_sigma > 0.0) {
    parallel_for(static_cast<std::size_t>(w0.cols()), [&](std::size_t t) {
      Rng rng(derive_seed(seed, t));
      const auto col = static_cast<Eigen::Index>(t);
      for (Eigen::Index i = 0; i < out.data.rows(); ++i) out.data(i, col) += noise_sigma * rng.normal();
    });
  }
  return out;
}

double signal_sd(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w0) {
  require(x.cols() == w0.rows(), ErrorKind::mismatch, "signal_sd: X columns must equal W0 rows");
  const Eigen::MatrixXd s = x * w0;
  require(s.size() > 0, ErrorKind::empty_input, "signal_sd: empty signal");
  const double mean = s.mean();
  return std::sqrt((s.array() - mean).square().mean());
}

Eigen::VectorXd theoretical_ceiling(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w0, double noise_sigma) {
  require(x.cols() == w0.rows(), ErrorKind::mismatch, "theoretical_ceiling: X columns must equal W0 rows");
  require(noise_sigma >= 0.0, ErrorKind::invalid_argument, "noise_sigma must be >= 0");
  const Eigen::MatrixXd s = x * w0;
  Eigen::VectorXd out(s.cols());
  for (Eigen::Index t = 0; t < s.cols(); ++t) {
    const double mean = s.col(t).mean();
    const double var = (s.col(t).array() - mean).square().mean();
    out(t) = var <= 0.0 ? 0.0 : std::sqrt(var / (var + noise_sigma * noise_sigma));
  }
  return out;
}

align::EyeTable gen_eye_table(const reprs::EmbeddingMatrix& emb, double noise_sigma, std::uint64_t seed) {
  emb.validate();
  const auto n_features = static_cast<Eigen::Index>(align::eye_feature_names().size());
  const Eigen::MatrixXd w0 = random_matrix(emb.dim(), n_features, derive_seed(seed, kEyeWeightStream));
  const auto brain = gen_brain(emb.data, w0, noise_sigma, derive_seed(seed, kEyeNoiseStream));
  align::EyeTable table;
  const auto words = emb.vocab->words();
  table.words.assign(words.begin(), words.end());
  table.features = brain.data;
  return table;
}

align::StimulusSequence gen_stimulus(std::span<const std::string> words, int n_events, double duration) {
  require(!words.empty(), ErrorKind::empty_input, "gen_stimulus: no words");
  require(n_events >= 1 && duration > 0.0, ErrorKind::invalid_argument,
          "gen_stimulus: need n_events >= 1 and duration > 0");
  align::StimulusSequence stim;
  for (int i = 0; i < n_events; ++i) {
    stim.events.push_back({words[static_cast<std::size_t>(i) % words.size()], i * duration, duration});
  }
  stim.total_duration = n_events * duration;
  return stim;
}

}  // namespace cortexenc::synth
