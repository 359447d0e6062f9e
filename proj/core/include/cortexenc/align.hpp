#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cortexenc/brain.hpp"
#include "cortexenc/embedding.hpp"

namespace cortexenc::align {

// Double-gamma: g(t; a1, b) - ratio * g(t; a2, b), g the gamma density with
// shape a and scale b.
struct HrfParams {
  double peak_shape = 6.0;
  double undershoot_shape = 16.0;
  double scale = 1.0;
  double undershoot_ratio = 1.0 / 6.0;
  double kernel_seconds = 32.0;  // support used when sampling the kernel
};

double hrf(double t, const HrfParams& params = {});

// h(0), h(dt), ... up to kernel_seconds inclusive.
Eigen::VectorXd sample_hrf(double dt, const HrfParams& params = {});

struct StimulusEvent {
  std::string word;
  double onset = 0.0;
  double duration = 0.0;
};

struct StimulusSequence {
  std::vector<StimulusEvent> events;
  double total_duration = 0.0;

  // Onsets non-decreasing, durations > 0, every event ends by total_duration.
  void validate() const;
};

// "word<TAB>onset_s<TAB>duration_s"; an optional header row starting with
// "word" is skipped. total_duration defaults to the last event end.
StimulusSequence parse_stimulus_tsv(std::string_view text,
                                    std::optional<double> total_duration = std::nullopt);
std::string format_stimulus_tsv(const StimulusSequence& stim);

// Fine-grid channels sampled at t = i * dt.
struct FeatureSeries {
  double dt = 0.1;
  Eigen::MatrixXd data;  // grid points x channels
  std::vector<std::string> missing_words;
};

// Channel c at grid time t sums emb[word][c] over events with
// onset <= t < onset + duration. Words absent from emb contribute zero.
FeatureSeries build_feature_series(const StimulusSequence& stim,
                                   const reprs::EmbeddingMatrix& emb, double dt);

struct AlignmentInfo {
  std::string mode;  // "discourse", "word", "eye"
  HrfParams hrf{};
  double dt = 0.0;
  double tr = 0.0;
};

struct DesignMatrix {
  Eigen::MatrixXd data;  // samples x embedding dims
  AlignmentInfo alignment;
  std::vector<std::string> row_labels;

  Eigen::Index rows() const { return data.rows(); }
  Eigen::Index cols() const { return data.cols(); }
};

// Causal discrete convolution with the HRF sampled at the series dt, zero
// initial conditions. Output length is the series length plus the kernel
// length minus one.
Eigen::MatrixXd convolve_hrf(const FeatureSeries& series, const HrfParams& params = {});

// Convolved values at t = k * tr for k < n_volumes. tr must be an integer
// multiple of dt (within 1e-9).
DesignMatrix convolve_downsample(const FeatureSeries& series, double tr, Eigen::Index n_volumes,
                                 const HrfParams& params = {});

struct AlignedData {
  DesignMatrix design;
  BrainResponse response;
  std::vector<std::string> dropped_words;
};

// Pairs row i of the response with the embedding of words[i]; words absent
// from the embedding drop the pair.
AlignedData word_targets(std::span<const std::string> words, const BrainResponse& responses,
                         const reprs::EmbeddingMatrix& emb);

struct EyeTable {
  std::vector<std::string> words;
  Eigen::MatrixXd features;  // rows x {TRT, GD, nFixations, FFD}
};

// Header must name exactly word, TRT, GD, nFixations, FFD in any order.
EyeTable parse_eye_tsv(std::string_view text);
std::string format_eye_tsv(const EyeTable& table);

AlignedData eye_targets(const EyeTable& table, const reprs::EmbeddingMatrix& emb,
                        std::string subject_id = "aggregate");

// One word per line, or the first column of a stimulus TSV.
std::vector<std::string> parse_word_list(std::string_view text);

}  // namespace cortexenc::align
