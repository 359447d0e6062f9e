#include "cortexenc/embedding.hpp"

#include <cmath>

#include "cortexenc/binary_io.hpp"
#include "cortexenc/error.hpp"

namespace cortexenc::reprs {

std::optional<Eigen::Index> EmbeddingMatrix::row_of(std::string_view word) const {
  if (!vocab) return std::nullopt;
  const auto id = vocab->find(word);
  if (!id) return std::nullopt;
  return static_cast<Eigen::Index>(*id);
}

void EmbeddingMatrix::validate() const {
  require(vocab != nullptr, ErrorKind::invalid_argument, "embedding has no vocabulary");
  require(static_cast<std::size_t>(data.rows()) == vocab->size(), ErrorKind::mismatch,
          "embedding rows (" + std::to_string(data.rows()) + ") != vocabulary size (" +
              std::to_string(vocab->size()) + ")");
  require(data.allFinite(), ErrorKind::numeric, "embedding '" + model_name + "' has NaN/Inf entries");
}

std::optional<EmbeddingFormat> parse_embedding_format(std::string_view name) {
  if (name == "text-vec") return EmbeddingFormat::text_vec;
  if (name == "per-layer-table") return EmbeddingFormat::per_layer_table;
  return std::nullopt;
}

namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const auto start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool is_integer(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace

std::vector<EmbeddingMatrix> parse_text_vec(std::string_view text, std::string model_name) {
  corpus::validate_utf8(text);
  const auto lines = io::split_lines(text);
  std::size_t first = 0;
  std::optional<std::size_t> header_rows;
  std::optional<Eigen::Index> dim;
  if (!lines.empty()) {
    const auto head = split_spaces(lines[0]);
    if (head.size() == 2 && is_integer(head[0]) && is_integer(head[1])) {
      header_rows = static_cast<std::size_t>(io::parse_int(head[0], "text-vec header"));
      dim = static_cast<Eigen::Index>(io::parse_int(head[1], "text-vec header"));
      first = 1;
    }
  }

  std::vector<std::string> words;
  std::vector<std::vector<double>> rows;
  for (std::size_t ln = first; ln < lines.size(); ++ln) {
    const auto fields = split_spaces(lines[ln]);
    if (fields.empty()) continue;
    const auto d = static_cast<Eigen::Index>(fields.size() - 1);
    const std::string where = "text-vec line " + std::to_string(ln + 1);
    if (!dim) dim = d;
    require(d == *dim && d > 0, ErrorKind::mismatch,
            "dimension mismatch at " + where + ": expected " + std::to_string(*dim) + ", got " +
                std::to_string(d));
    words.emplace_back(fields[0]);
    auto& row = rows.emplace_back();
    row.reserve(static_cast<std::size_t>(d));
    for (std::size_t k = 1; k < fields.size(); ++k) row.push_back(io::parse_double(fields[k], where));
  }
  require(!words.empty(), ErrorKind::empty_input, "text-vec file has no vectors");
  if (header_rows) {
    require(*header_rows == words.size(), ErrorKind::mismatch,
            "text-vec header declares " + std::to_string(*header_rows) + " rows, found " +
                std::to_string(words.size()));
  }

  EmbeddingMatrix emb;
  emb.data.resize(static_cast<Eigen::Index>(rows.size()), *dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index k = 0; k < *dim; ++k) emb.data(static_cast<Eigen::Index>(i), k) = rows[i][static_cast<std::size_t>(k)];
  }
  emb.vocab = std::make_shared<const Vocabulary>(std::move(words));
  emb.model_name = std::move(model_name);
  emb.provenance["format"] = "text-vec";
  emb.validate();
  std::vector<EmbeddingMatrix> out;
  out.push_back(std::move(emb));
  return out;
}

std::vector<EmbeddingMatrix> parse_per_layer_table(std::string_view bytes, std::string model_name) {
  io::ByteReader in(bytes);
  if (bytes.size() < 4 || bytes.substr(0, 4) != "EMBL") {
    throw Error(ErrorKind::decode, "unknown magic bytes; expected EMBL", 0);
  }
  in.bytes(4);
  const auto version = in.u32();
  require(version == kPerLayerTableVersion, ErrorKind::decode,
          "unsupported per-layer-table version " + std::to_string(version));
  const auto layers = in.u32();
  const auto v = in.u32();
  const auto d = in.u32();
  require(layers >= 1 && v >= 1 && d >= 1, ErrorKind::decode, "per-layer-table has an empty dimension");

  std::vector<std::string> words;
  words.reserve(v);
  for (std::uint32_t i = 0; i < v; ++i) {
    auto w = in.string();
    corpus::validate_utf8(w);
    words.push_back(std::move(w));
  }
  auto vocab = std::make_shared<const Vocabulary>(std::move(words));

  const std::size_t need = std::size_t{layers} * v * d * 4;
  require(in.remaining() == need, ErrorKind::decode,
          "per-layer-table payload is " + std::to_string(in.remaining()) + " bytes, expected " +
              std::to_string(need));

  std::vector<EmbeddingMatrix> out;
  out.reserve(layers);
  for (std::uint32_t l = 0; l < layers; ++l) {
    EmbeddingMatrix emb;
    emb.vocab = vocab;
    emb.data.resize(v, d);
    for (std::uint32_t i = 0; i < v; ++i) {
      for (std::uint32_t k = 0; k < d; ++k) emb.data(i, k) = static_cast<double>(in.f32());
    }
    emb.model_name = model_name;
    emb.layer = static_cast<int>(l) + 1;
    emb.provenance["format"] = "per-layer-table";
    emb.provenance["layer"] = std::to_string(l + 1);
    emb.validate();
    out.push_back(std::move(emb));
  }
  return out;
}

std::vector<EmbeddingMatrix> import_embeddings(const std::filesystem::path& path,
                                               EmbeddingFormat format,
                                               std::optional<std::string> model_name) {
  const auto contents = io::read_file(path);
  auto name = model_name.value_or(path.stem().string());
  auto out = format == EmbeddingFormat::text_vec ? parse_text_vec(contents, name)
                                                 : parse_per_layer_table(contents, name);
  for (auto& e : out) e.provenance["source"] = path.string();
  return out;
}

std::string format_text_vec(const EmbeddingMatrix& emb) {
  emb.validate();
  std::string out = std::to_string(emb.rows()) + " " + std::to_string(emb.dim()) + "\n";
  for (Eigen::Index i = 0; i < emb.rows(); ++i) {
    out += emb.vocab->word(static_cast<std::size_t>(i));
    for (Eigen::Index k = 0; k < emb.dim(); ++k) {
      out += ' ';
      out += io::format_double(emb.data(i, k));
    }
    out += '\n';
  }
  return out;
}

std::string format_per_layer_table(std::span<const EmbeddingMatrix> layers) {
  require(!layers.empty(), ErrorKind::empty_input, "no layers to write");
  const auto& first = layers.front();
  first.validate();
  io::ByteWriter w;
  w.bytes("EMBL");
  w.u32(kPerLayerTableVersion);
  w.u32(static_cast<std::uint32_t>(layers.size()));
  w.u32(static_cast<std::uint32_t>(first.rows()));
  w.u32(static_cast<std::uint32_t>(first.dim()));
  for (const auto& word : first.vocab->words()) w.string(word);
  for (const auto& layer : layers) {
    layer.validate();
    require(layer.rows() == first.rows() && layer.dim() == first.dim() &&
                *layer.vocab == *first.vocab,
            ErrorKind::mismatch, "layers disagree on vocabulary or dimension");
    for (Eigen::Index i = 0; i < layer.rows(); ++i) {
      for (Eigen::Index k = 0; k < layer.dim(); ++k) w.f32(static_cast<float>(layer.data(i, k)));
    }
  }
  return w.buffer();
}

Eigen::VectorXd average_subwords(std::span<const Eigen::VectorXd> pieces) {
  require(!pieces.empty(), ErrorKind::empty_input, "no sub-word pieces to average");
  const auto d = pieces.front().size();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  for (const auto& p : pieces) {
    require(p.size() == d, ErrorKind::mismatch, "sub-word pieces have mixed dimensions");
    sum += p;
  }
  return sum / static_cast<double>(pieces.size());
}

}  // namespace cortexenc::reprs
