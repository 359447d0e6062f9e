#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cortexenc/align.hpp"
#include "cortexenc/brain.hpp"
#include "cortexenc/corpus.hpp"
#include "cortexenc/embedding.hpp"

namespace cortexenc::synth {

enum class GeneratorKind { planted_clusters, linear_response };

std::optional<GeneratorKind> parse_generator_kind(std::string_view name);
std::string_view to_string(GeneratorKind kind);

struct SynthSpec {
  std::uint64_t seed = 0;
  int vocab_size = 500;
  int dim = 20;
  int n_samples = 1000;
  int n_targets = 1000;
  double noise_sigma = 0.0;
  GeneratorKind kind = GeneratorKind::planted_clusters;

  // planted-cluster corpus
  int clusters = 2;
  double p_in = 0.9;  // probability a token comes from its sentence's cluster
  int n_tokens = 10000;
  int sentence_length = 10;

  void validate() const;
};

// Word i belongs to cluster i * clusters / vocab_size.
int cluster_of(int word, const SynthSpec& spec);
std::string word_name(int word, const SynthSpec& spec);

// Sentences of sentence_length tokens (the last may be shorter). Each
// sentence draws a home cluster; every token is drawn from the home cluster
// with probability p_in and from a different cluster otherwise.
corpus::Corpus gen_corpus(const SynthSpec& spec);

// One sentence per line, space separated.
std::string format_corpus(const corpus::Corpus& corpus);

// rows x cols iid N(0, 1), one RNG stream per row.
Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

// vocab_size x dim N(0, 1) embedding over the planted vocabulary.
reprs::EmbeddingMatrix random_embedding(const SynthSpec& spec, std::uint64_t seed,
                                        std::string model_name);

// Y = X * W0 + noise, noise iid N(0, noise_sigma^2). Target t draws its
// noise from its own stream, so columns are independent of each other.
align::BrainResponse gen_brain(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w0, double noise_sigma,
                               std::uint64_t seed, std::string subject_id = "synth");

// Population sd of all entries of X * W0.
double signal_sd(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w0);

// Per target sqrt(var(s) / (var(s) + noise_sigma^2)) for s = X * W0 column
// t; 0 when the signal is constant.
Eigen::VectorXd theoretical_ceiling(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w0, double noise_sigma);

// Eye features linear in the embedding of each word, plus noise.
align::EyeTable gen_eye_table(const reprs::EmbeddingMatrix& emb, double noise_sigma, std::uint64_t seed);

// Back-to-back events of fixed duration over the given words, cycling.
align::StimulusSequence gen_stimulus(std::span<const std::string> words, int n_events, double duration);

}  // namespace cortexenc::synth
