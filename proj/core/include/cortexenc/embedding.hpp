#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cortexenc/corpus.hpp"

namespace cortexenc::reprs {

using corpus::Vocabulary;

// Dense V x d word representation. Row i belongs to vocab->word(i).
struct EmbeddingMatrix {
  std::shared_ptr<const Vocabulary> vocab;
  Eigen::MatrixXd data;
  std::string model_name;
  std::optional<int> layer;
  // Build parameters and sources, copied into every downstream artifact.
  std::map<std::string, std::string> provenance;

  Eigen::Index dim() const { return data.cols(); }
  Eigen::Index rows() const { return data.rows(); }
  std::optional<Eigen::Index> row_of(std::string_view word) const;

  // Throws unless rows == vocab size and every entry is finite.
  void validate() const;
};

enum class EmbeddingFormat { text_vec, per_layer_table };

std::optional<EmbeddingFormat> parse_embedding_format(std::string_view name);

// "word v1 ... vd" lines, optionally preceded by a "V d" header.
std::vector<EmbeddingMatrix> parse_text_vec(std::string_view text, std::string model_name);

// "EMBL" | version u32 | layers u32 | V u32 | d u32 | V length-prefixed
// words | layers x V x d little-endian f32, layer-major and row-major.
std::vector<EmbeddingMatrix> parse_per_layer_table(std::string_view bytes, std::string model_name);

// Model name defaults to the file stem. Layers of a per-layer table are
// numbered from 1.
std::vector<EmbeddingMatrix> import_embeddings(const std::filesystem::path& path,
                                               EmbeddingFormat format,
                                               std::optional<std::string> model_name = std::nullopt);

// Full double precision, shortest round-trip formatting, with header.
std::string format_text_vec(const EmbeddingMatrix& emb);

// All layers must share one vocabulary and dimension.
std::string format_per_layer_table(std::span<const EmbeddingMatrix> layers);

inline constexpr std::uint32_t kPerLayerTableVersion = 1;

Eigen::VectorXd average_subwords(std::span<const Eigen::VectorXd> pieces);

}  // namespace cortexenc::reprs
