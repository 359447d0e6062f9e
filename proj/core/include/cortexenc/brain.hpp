#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cortexenc::align {

enum class ResponseKind : std::uint8_t {
  word_tvalue = 0,
  discourse_bold = 1,
  eye_features = 2,
};

std::optional<ResponseKind> parse_response_kind(std::string_view name);
std::string_view to_string(ResponseKind kind);

inline const std::vector<std::string>& eye_feature_names() {
  static const std::vector<std::string> names = {"TRT", "GD", "nFixations", "FFD"};
  return names;
}

// samples x targets. Targets are voxels, ROIs, or the four eye features.
struct BrainResponse {
  std::string subject_id;
  Eigen::MatrixXd data;
  ResponseKind kind = ResponseKind::word_tvalue;
  std::optional<double> tr;  // seconds, discourse-bold only
  std::vector<std::string> target_names;

  Eigen::Index samples() const { return data.rows(); }
  Eigen::Index targets() const { return data.cols(); }

  // Names if present, otherwise "0", "1", ...
  std::vector<std::string> resolved_target_names() const;

  // Finite data, tr present iff discourse-bold, eye-features has the four
  // named columns, name table empty or one per target.
  void validate() const;
};

inline constexpr std::uint32_t kBrainFormatVersion = 1;

// "BRN1" | version u32 | kind u8 | subject (u32 length + bytes) | samples u32
// | targets u32 | tr f64 (0 when absent) | name count u32 (0 or targets)
// followed by length-prefixed names | samples x targets little-endian f32.
std::string format_brain(const BrainResponse& response);
BrainResponse parse_brain(std::string_view bytes);

BrainResponse read_brain(const std::filesystem::path& path);
void write_brain(const std::filesystem::path& path, const BrainResponse& response);

}  // namespace cortexenc::align
