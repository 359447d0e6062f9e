#include "cortexenc/align.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "cortexenc/binary_io.hpp"
#include "cortexenc/error.hpp"
#include "cortexenc/parallel.hpp"

namespace cortexenc::align {

void StimulusSequence::validate() const {
  require(!events.empty(), ErrorKind::empty_input, "empty stimulus");
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    const std::string where = "stimulus event " + std::to_string(i) + " ('" + e.word + "')";
    require(std::isfinite(e.onset) && e.onset >= 0.0, ErrorKind::invalid_argument, where + ": bad onset");
    require(std::isfinite(e.duration) && e.duration > 0.0, ErrorKind::invalid_argument,
            where + ": duration must be > 0");
    require(i == 0 || e.onset >= events[i - 1].onset, ErrorKind::invalid_argument,
            where + ": onsets must be non-decreasing");
    require(e.onset + e.duration <= total_duration + 1e-9, ErrorKind::invalid_argument,
            where + ": ends after total duration");
  }
}

StimulusSequence parse_stimulus_tsv(std::string_view text, std::optional<double> total_duration) {
  corpus::validate_utf8(text);
  StimulusSequence stim;
  std::size_t lineno = 0;
  double end = 0.0;
  for (auto line : io::split_lines(text)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = io::split_tabs(line);
    if (lineno == 1 && fields[0] == "word") continue;
    const std::string where = "stimulus line " + std::to_string(lineno);
    require(fields.size() == 3, ErrorKind::schema, where + ": expected word, onset_s, duration_s");
    StimulusEvent e{std::string(fields[0]), io::parse_double(fields[1], where),
                    io::parse_double(fields[2], where)};
    end = std::max(end, e.onset + e.duration);
    stim.events.push_back(std::move(e));
  }
  stim.total_duration = total_duration.value_or(end);
  stim.validate();
  return stim;
}

std::string format_stimulus_tsv(const StimulusSequence& stim) {
  std::string out = "word\tonset_s\tduration_s\n";
  for (const auto& e : stim.events) {
    out += e.word + "\t" + io::format_double(e.onset) + "\t" + io::format_double(e.duration) + "\n";
  }
  return out;
}

namespace {

Eigen::Index grid_ceil(double seconds, double dt) {
  return static_cast<Eigen::Index>(std::ceil(seconds / dt - 1e-9));
}

}  // namespace

FeatureSeries build_feature_series(const StimulusSequence& stim, const reprs::EmbeddingMatrix& emb,
                                   double dt) {
  require(dt > 0.0, ErrorKind::invalid_argument, "dt must be > 0");
  stim.validate();
  emb.validate();

  FeatureSeries series;
  series.dt = dt;
  const Eigen::Index n = std::max<Eigen::Index>(1, grid_ceil(stim.total_duration, dt));
  series.data = Eigen::MatrixXd::Zero(n, emb.dim());
  std::set<std::string> missing;
  for (const auto& e : stim.events) {
    const auto row = emb.row_of(e.word);
    if (!row) {
      missing.insert(e.word);
      continue;
    }
    const Eigen::Index begin = std::max<Eigen::Index>(0, grid_ceil(e.onset, dt));
    const Eigen::Index end = std::min(n, grid_ceil(e.onset + e.duration, dt));
    for (Eigen::Index i = begin; i < end; ++i) series.data.row(i) += emb.data.row(*row);
  }
  series.missing_words.assign(missing.begin(), missing.end());
  if (!missing.empty()) {
    spdlog::warn("build_feature_series: {} stimulus words missing from '{}' contribute zeros",
                 missing.size(), emb.model_name);
  }
  return series;
}

namespace {

double convolve_at(const Eigen::MatrixXd& x, Eigen::Index col, const Eigen::VectorXd& h, Eigen::Index n) {
  const Eigen::Index len = x.rows();
  const Eigen::Index lo = std::max<Eigen::Index>(0, n - len + 1);
  const Eigen::Index hi = std::min<Eigen::Index>(n, h.size() - 1);
  double acc = 0.0;
  for (Eigen::Index m = lo; m <= hi; ++m) acc += h(m) * x(n - m, col);
  return acc;
}

}  // namespace

Eigen::MatrixXd convolve_hrf(const FeatureSeries& series, const HrfParams& params) {
  const Eigen::VectorXd h = sample_hrf(series.dt, params);
  const Eigen::Index out_len = series.data.rows() + h.size() - 1;
  Eigen::MatrixXd out(out_len, series.data.cols());
  parallel_for(static_cast<std::size_t>(series.data.cols()), [&](std::size_t c) {
    const auto col = static_cast<Eigen::Index>(c);
    for (Eigen::Index n = 0; n < out_len; ++n) out(n, col) = convolve_at(series.data, col, h, n);
  });
  return out;
}

DesignMatrix convolve_downsample(const FeatureSeries& series, double tr, Eigen::Index n_volumes,
                                 const HrfParams& params) {
  require(tr > 0.0, ErrorKind::invalid_argument, "tr must be > 0");
  require(n_volumes >= 1, ErrorKind::invalid_argument, "n_volumes must be >= 1");
  const double ratio = tr / series.dt;
  const auto step = static_cast<Eigen::Index>(std::llround(ratio));
  require(step >= 1 && std::abs(ratio - static_cast<double>(step)) <= 1e-9, ErrorKind::invalid_argument,
          "tr (" + io::format_double(tr) + ") is not an integer multiple of dt (" +
              io::format_double(series.dt) + ")");

  const Eigen::VectorXd h = sample_hrf(series.dt, params);
  const Eigen::Index padded = series.data.rows() + h.size() - 1;
  require((n_volumes - 1) * step < padded, ErrorKind::invalid_argument,
          std::to_string(n_volumes) + " volumes at tr=" + io::format_double(tr) +
              " exceed the padded series length");

  DesignMatrix design;
  design.data.resize(n_volumes, series.data.cols());
  parallel_for(static_cast<std::size_t>(series.data.cols()), [&](std::size_t c) {
    const auto col = static_cast<Eigen::Index>(c);
    for (Eigen::Index k = 0; k < n_volumes; ++k) {
      design.data(k, col) = convolve_at(series.data, col, h, k * step);
    }
  });
  design.alignment = {"discourse", params, series.dt, tr};
  return design;
}

AlignedData word_targets(std::span<const std::string> words, const BrainResponse& responses,
                         const reprs::EmbeddingMatrix& emb) {
  emb.validate();
  responses.validate();
  require(static_cast<Eigen::Index>(words.size()) == responses.samples(), ErrorKind::mismatch,
          "word list has " + std::to_string(words.size()) + " entries but response has " +
              std::to_string(responses.samples()) + " rows");

  std::vector<Eigen::Index> keep_rows;
  std::vector<Eigen::Index> emb_rows;
  AlignedData out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto row = emb.row_of(words[i]);
    if (!row) {
      out.dropped_words.push_back(words[i]);
      continue;
    }
    keep_rows.push_back(static_cast<Eigen::Index>(i));
    emb_rows.push_back(*row);
  }
  require(!keep_rows.empty(), ErrorKind::empty_input,
          "no stimulus word of subject '" + responses.subject_id + "' is covered by '" +
              emb.model_name + "'");

  const auto n = static_cast<Eigen::Index>(keep_rows.size());
  out.design.data.resize(n, emb.dim());
  out.response = responses;
  out.response.data.resize(n, responses.targets());
  for (Eigen::Index r = 0; r < n; ++r) {
    out.design.data.row(r) = emb.data.row(emb_rows[static_cast<std::size_t>(r)]);
    out.response.data.row(r) = responses.data.row(keep_rows[static_cast<std::size_t>(r)]);
    out.design.row_labels.push_back(words[static_cast<std::size_t>(keep_rows[static_cast<std::size_t>(r)])]);
  }
  out.design.alignment.mode = "word";
  return out;
}

EyeTable parse_eye_tsv(std::string_view text) {
  corpus::validate_utf8(text);
  const auto lines = io::split_lines(text);
  require(!lines.empty(), ErrorKind::empty_input, "eye-tracking table is empty");
  const auto header = io::split_tabs(lines[0]);
  const std::vector<std::string> expected = {"word", "TRT", "GD", "nFixations", "FFD"};
  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name(header[c]);
    require(std::find(expected.begin(), expected.end(), name) != expected.end(), ErrorKind::schema,
            "unexpected eye-tracking column '" + name + "'");
    require(column.emplace(name, c).second, ErrorKind::schema, "duplicate eye-tracking column '" + name + "'");
  }
  for (const auto& name : expected) {
    require(column.count(name) == 1, ErrorKind::schema, "eye-tracking table is missing column '" + name + "'");
  }

  EyeTable table;
  std::vector<std::array<double, 4>> rows;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const auto fields = io::split_tabs(lines[ln]);
    const std::string where = "eye-tracking line " + std::to_string(ln + 1);
    require(fields.size() == header.size(), ErrorKind::schema, where + ": wrong number of fields");
    table.words.emplace_back(fields[column["word"]]);
    std::array<double, 4> v{};
    for (std::size_t k = 0; k < 4; ++k) {
      v[k] = io::parse_double(fields[column[expected[k + 1]]], where);
    }
    rows.push_back(v);
  }
  table.features.resize(static_cast<Eigen::Index>(rows.size()), 4);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index k = 0; k < 4; ++k) table.features(static_cast<Eigen::Index>(r), k) = rows[r][static_cast<std::size_t>(k)];
  }
  return table;
}

std::string format_eye_tsv(const EyeTable& table) {
  std::string out = "word\tTRT\tGD\tnFixations\tFFD\n";
  for (std::size_t r = 0; r < table.words.size(); ++r) {
    out += table.words[r];
    for (Eigen::Index k = 0; k < 4; ++k) {
      out += '\t';
      out += io::format_double(table.features(static_cast<Eigen::Index>(r), k));
    }
    out += '\n';
  }
  return out;
}

AlignedData eye_targets(const EyeTable& table, const reprs::EmbeddingMatrix& emb,
                        std::string subject_id) {
  BrainResponse response;
  response.subject_id = std::move(subject_id);
  response.kind = ResponseKind::eye_features;
  response.target_names = eye_feature_names();
  response.data = table.features;
  auto out = word_targets(table.words, response, emb);
  out.design.alignment.mode = "eye";
  return out;
}

std::vector<std::string> parse_word_list(std::string_view text) {
  corpus::validate_utf8(text);
  std::vector<std::string> words;
  std::size_t lineno = 0;
  for (auto line : io::split_lines(text)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = io::split_tabs(line);
    if (lineno == 1 && fields[0] == "word" && fields.size() > 1) continue;
    words.emplace_back(fields[0]);
  }
  return words;
}

}  // namespace cortexenc::align
