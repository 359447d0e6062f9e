#include "cortexenc/builders.hpp"

#include <cmath>

#include <spdlog/spdlog.h>

#include "cortexenc/binary_io.hpp"
#include "cortexenc/error.hpp"

namespace cortexenc::reprs {

namespace {

std::string fmt_num(double v) { return io::format_double(v); }

void record_svd(EmbeddingMatrix& emb, const SvdFactors& svd, Eigen::Index dim, double alpha,
                std::uint64_t seed) {
  emb.provenance["dim"] = std::to_string(dim);
  emb.provenance["alpha"] = fmt_num(alpha);
  emb.provenance["seed"] = std::to_string(seed);
  emb.provenance["svd_padded"] = std::to_string(svd.padded);
}

}  // namespace

EmbeddingMatrix build_lsm(const corpus::Corpus& corpus, const LsmOptions& options) {
  auto vocab = std::make_shared<const Vocabulary>(
      corpus::build_vocab(corpus, options.min_count, options.max_size));
  const auto cooc = corpus::count_cooccurrences(corpus, vocab, options.cooccurrence);
  const auto ppmi = ppmi_weight(cooc);
  const auto svd = truncated_svd(ppmi, options.dim, options.seed, options.svd);

  EmbeddingMatrix emb;
  emb.vocab = vocab;
  emb.data = scaled_left_vectors(svd, options.alpha);
  emb.model_name = "LSM";
  emb.provenance["builder"] = "lsm";
  emb.provenance["min_count"] = std::to_string(options.min_count);
  emb.provenance["max_size"] = std::to_string(options.max_size);
  emb.provenance["window"] = std::to_string(options.cooccurrence.window);
  emb.provenance["weighting"] = std::string(corpus::to_string(options.cooccurrence.weighting));
  emb.provenance["total_pairs"] = std::to_string(cooc.total_pairs());
  record_svd(emb, svd, options.dim, options.alpha, options.seed);
  emb.validate();
  return emb;
}

corpus::CooccurrenceMatrix walk_cooccurrences(const std::vector<std::vector<std::uint32_t>>& walks,
                                              std::shared_ptr<const Vocabulary> vocab, int window) {
  std::vector<std::vector<std::int64_t>> sequences;
  sequences.reserve(walks.size());
  for (const auto& w : walks) sequences.emplace_back(w.begin(), w.end());
  return corpus::count_cooccurrences(std::span<const std::vector<std::int64_t>>(sequences),
                                     std::move(vocab), {window, corpus::Weighting::flat});
}

EmbeddingMatrix build_ntm_from_graph(const SimilarityGraph& graph,
                                     std::shared_ptr<const Vocabulary> vocab,
                                     const NtmOptions& options) {
  require(vocab != nullptr && vocab->size() == graph.node_count(), ErrorKind::mismatch,
          "graph node count does not match vocabulary size");
  const auto walks = random_walks(graph, options.walks_per_node, options.walk_length, options.seed);
  const auto cooc = walk_cooccurrences(walks, vocab, options.window);
  const auto ppmi = ppmi_weight(cooc);
  const auto svd = truncated_svd(ppmi, options.dim, options.seed, options.svd);

  EmbeddingMatrix emb;
  emb.vocab = std::move(vocab);
  emb.data = scaled_left_vectors(svd, options.alpha);
  emb.model_name = "NTM";
  emb.provenance["builder"] = "ntm";
  emb.provenance["neighbors"] = std::to_string(graph.k);
  emb.provenance["walks_per_node"] = std::to_string(options.walks_per_node);
  emb.provenance["walk_length"] = std::to_string(options.walk_length);
  emb.provenance["walk_window"] = std::to_string(options.window);
  emb.provenance["graph_edges"] = std::to_string(graph.edge_count());
  record_svd(emb, svd, options.dim, options.alpha, options.seed);
  emb.validate();
  return emb;
}

EmbeddingMatrix build_ntm(const EmbeddingMatrix& base, const NtmOptions& options) {
  base.validate();
  const auto v = static_cast<int>(base.rows());
  require(v >= 2, ErrorKind::invalid_argument, "NTM needs at least 2 words");
  int k = options.neighbors;
  if (k >= v) {
    spdlog::warn("build_ntm: neighbors={} capped to V-1={}", k, v - 1);
    k = v - 1;
  }
  const auto graph = cosine_knn_graph(base, k);
  auto emb = build_ntm_from_graph(graph, base.vocab, options);
  emb.provenance["base_model"] = base.model_name;
  if (base.layer) emb.provenance["base_layer"] = std::to_string(*base.layer);
  return emb;
}

void SemanticNormTable::add(std::string word, const std::array<double, 6>& values) {
  const auto [it, inserted] = index.emplace(word, words.size());
  require(inserted, ErrorKind::invalid_argument, "duplicate norm entry for '" + word + "'");
  words.push_back(std::move(word));
  ratings.push_back(values);
}

SemanticNormTable parse_norm_table(std::string_view text) {
  corpus::validate_utf8(text);
  SemanticNormTable table;
  std::size_t lineno = 0;
  for (auto line : io::split_lines(text)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = io::split_tabs(line);
    if (lineno == 1 && fields[0] == "word") {
      require(fields.size() == 7, ErrorKind::schema, "norm table header must have 7 columns");
      for (std::size_t c = 0; c < 6; ++c) {
        require(fields[c + 1] == SemanticNormTable::kColumns[c], ErrorKind::schema,
                "norm table column " + std::to_string(c + 2) + " must be '" +
                    std::string(SemanticNormTable::kColumns[c]) + "'");
      }
      continue;
    }
    const std::string where = "norm table line " + std::to_string(lineno);
    require(fields.size() == 7, ErrorKind::schema,
            where + ": expected 7 fields, got " + std::to_string(fields.size()));
    std::array<double, 6> values{};
    for (std::size_t c = 0; c < 6; ++c) {
      values[c] = io::parse_double(fields[c + 1], where);
      require(std::isfinite(values[c]), ErrorKind::numeric, where + ": non-finite rating");
    }
    table.add(std::string(fields[0]), values);
  }
  return table;
}

std::string format_norm_table(const SemanticNormTable& table) {
  std::string out = "word";
  for (auto c : SemanticNormTable::kColumns) {
    out += '\t';
    out += c;
  }
  out += '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out += table.words[i];
    for (double v : table.ratings[i]) {
      out += '\t';
      out += io::format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::optional<EbmScaling> parse_ebm_scaling(std::string_view name) {
  if (name == "zscore") return EbmScaling::zscore;
  if (name == "none") return EbmScaling::none;
  return std::nullopt;
}

EbmResult build_ebm(const SemanticNormTable& norms, const Vocabulary& vocab, EbmScaling scaling) {
  EbmResult result;
  result.coverage.requested = vocab.size();
  std::vector<std::string> words;
  std::vector<std::int64_t> counts;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const auto it = norms.index.find(vocab.word(i));
    if (it == norms.index.end()) {
      result.coverage.missing.push_back(vocab.word(i));
      continue;
    }
    words.push_back(vocab.word(i));
    counts.push_back(vocab.count(i));
    rows.push_back(it->second);
  }
  result.coverage.retained = words.size();
  require(!words.empty(), ErrorKind::empty_input, "semantic norms cover none of the vocabulary");
  if (!result.coverage.missing.empty()) {
    spdlog::warn("build_ebm: {} of {} words have no norms and are excluded",
                 result.coverage.missing.size(), vocab.size());
  }

  Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()), kEmbodiedDim);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index c = 0; c < kEmbodiedDim; ++c) {
      data(static_cast<Eigen::Index>(r), c) = norms.ratings[rows[r]][static_cast<std::size_t>(c)];
    }
  }
  if (scaling == EbmScaling::zscore) {
    const auto n = static_cast<double>(data.rows());
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      const double mean = data.col(c).sum() / n;
      data.col(c).array() -= mean;
      const double sd = std::sqrt(data.col(c).squaredNorm() / n);
      if (sd > 0.0) data.col(c) /= sd;
    }
  }

  auto& emb = result.embedding;
  emb.vocab = std::make_shared<const Vocabulary>(std::move(words), std::move(counts));
  emb.data = std::move(data);
  emb.model_name = "EBM";
  emb.provenance["builder"] = "ebm";
  emb.provenance["scaling"] = scaling == EbmScaling::zscore ? "zscore" : "none";
  emb.provenance["coverage"] =
      std::to_string(result.coverage.retained) + "/" + std::to_string(result.coverage.requested);
  emb.validate();
  return result;
}

}  // namespace cortexenc::reprs
