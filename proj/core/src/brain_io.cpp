#include "cortexenc/brain.hpp"

#include "cortexenc/binary_io.hpp"
#include "cortexenc/error.hpp"

namespace cortexenc::align {

std::optional<ResponseKind> parse_response_kind(std::string_view name) {
  if (name == "word-tvalue") return ResponseKind::word_tvalue;
  if (name == "discourse-bold") return ResponseKind::discourse_bold;
  if (name == "eye-features") return ResponseKind::eye_features;
  return std::nullopt;
}

std::string_view to_string(ResponseKind kind) {
  switch (kind) {
    case ResponseKind::word_tvalue: return "word-tvalue";
    case ResponseKind::discourse_bold: return "discourse-bold";
    case ResponseKind::eye_features: return "eye-features";
  }
  return "unknown";
}

std::vector<std::string> BrainResponse::resolved_target_names() const {
  if (!target_names.empty()) return target_names;
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(targets()));
  for (Eigen::Index t = 0; t < targets(); ++t) names.push_back(std::to_string(t));
  return names;
}

void BrainResponse::validate() const {
  require(data.allFinite(), ErrorKind::numeric, "brain response '" + subject_id + "' has NaN/Inf");
  require(target_names.empty() || static_cast<Eigen::Index>(target_names.size()) == targets(),
          ErrorKind::mismatch, "target name table does not match target count");
  if (kind == ResponseKind::discourse_bold) {
    require(tr.has_value() && *tr > 0.0, ErrorKind::invalid_argument,
            "discourse-bold response requires tr > 0");
  } else {
    require(!tr.has_value(), ErrorKind::invalid_argument,
            "tr is only meaningful for discourse-bold responses");
  }
  if (kind == ResponseKind::eye_features) {
    require(target_names == eye_feature_names(), ErrorKind::schema,
            "eye-features response must have targets TRT, GD, nFixations, FFD");
  }
}

std::string format_brain(const BrainResponse& response) {
  response.validate();
  io::ByteWriter w;
  w.bytes("BRN1");
  w.u32(kBrainFormatVersion);
  w.u8(static_cast<std::uint8_t>(response.kind));
  w.string(response.subject_id);
  w.u32(static_cast<std::uint32_t>(response.samples()));
  w.u32(static_cast<std::uint32_t>(response.targets()));
  w.f64(response.tr.value_or(0.0));
  w.u32(static_cast<std::uint32_t>(response.target_names.size()));
  for (const auto& name : response.target_names) w.string(name);
  for (Eigen::Index i = 0; i < response.samples(); ++i) {
    for (Eigen::Index t = 0; t < response.targets(); ++t) w.f32(static_cast<float>(response.data(i, t)));
  }
  return w.buffer();
}

BrainResponse parse_brain(std::string_view bytes) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != "BRN1") {
    throw Error(ErrorKind::decode, "unknown magic bytes; expected BRN1", 0);
  }
  io::ByteReader in(bytes);
  in.bytes(4);
  const auto version = in.u32();
  require(version == kBrainFormatVersion, ErrorKind::decode,
          "unsupported brain format version " + std::to_string(version));
  const auto kind_byte = in.u8();
  require(kind_byte <= 2, ErrorKind::decode, "unknown response kind " + std::to_string(kind_byte));

  BrainResponse r;
  r.kind = static_cast<ResponseKind>(kind_byte);
  r.subject_id = in.string();
  const auto samples = in.u32();
  const auto targets = in.u32();
  const double tr = in.f64();
  if (tr != 0.0) r.tr = tr;
  const auto names = in.u32();
  require(names == 0 || names == targets, ErrorKind::decode, "target name table has wrong length");
  for (std::uint32_t i = 0; i < names; ++i) r.target_names.push_back(in.string());
  require(in.remaining() == std::size_t{samples} * targets * 4, ErrorKind::decode,
          "brain payload size does not match samples x targets");
  r.data.resize(samples, targets);
  for (std::uint32_t i = 0; i < samples; ++i) {
    for (std::uint32_t t = 0; t < targets; ++t) r.data(i, t) = static_cast<double>(in.f32());
  }
  r.validate();
  return r;
}

BrainResponse read_brain(const std::filesystem::path& path) { return parse_brain(io::read_file(path)); }

void write_brain(const std::filesystem::path& path, const BrainResponse& response) {
  io::write_file_atomic(path, format_brain(response));
}

}  // namespace cortexenc::align
