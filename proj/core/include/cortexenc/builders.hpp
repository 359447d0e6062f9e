#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cortexenc/corpus.hpp"
#include "cortexenc/embedding.hpp"
#include "cortexenc/graph.hpp"
#include "cortexenc/ppmi_svd.hpp"

namespace cortexenc::reprs {

inline constexpr Eigen::Index kDefaultDim = 300;
inline constexpr Eigen::Index kEmbodiedDim = 6;

struct LsmOptions {
  std::int64_t min_count = 1;
  std::size_t max_size = 100000;
  corpus::CooccurrenceOptions cooccurrence{};  // window 2, flat
  Eigen::Index dim = kDefaultDim;
  double alpha = 0.5;
  SvdOptions svd{};
  std::uint64_t seed = 0;
};

// count -> PPMI -> truncated SVD over the corpus.
EmbeddingMatrix build_lsm(const corpus::Corpus& corpus, const LsmOptions& options = {});

struct NtmOptions {
  int neighbors = 50;
  int walks_per_node = 10;
  int walk_length = 40;
  int window = 5;
  Eigen::Index dim = kDefaultDim;
  double alpha = 0.5;
  SvdOptions svd{};
  std::uint64_t seed = 0;
};

// Each walk is its own sequence, so windows never span two walks.
corpus::CooccurrenceMatrix walk_cooccurrences(const std::vector<std::vector<std::uint32_t>>& walks,
                                              std::shared_ptr<const Vocabulary> vocab, int window);

// Graph from the base embedding's cosine kNN (k is capped at V-1), then
// walks -> co-occurrence -> PPMI -> truncated SVD.
EmbeddingMatrix build_ntm(const EmbeddingMatrix& base, const NtmOptions& options = {});

// Same pipeline from a prebuilt graph whose nodes are vocab rows.
EmbeddingMatrix build_ntm_from_graph(const SimilarityGraph& graph,
                                     std::shared_ptr<const Vocabulary> vocab,
                                     const NtmOptions& options = {});

// Six ratings per word: vision, motor, socialness, emotion, time, space.
struct SemanticNormTable {
  static constexpr std::array<std::string_view, 6> kColumns = {"vision", "motor", "social",
                                                               "emotion", "time", "space"};
  std::vector<std::string> words;
  std::vector<std::array<double, 6>> ratings;
  std::unordered_map<std::string, std::size_t> index;

  void add(std::string word, const std::array<double, 6>& values);
  std::size_t size() const { return words.size(); }
};

// TSV "word<TAB>vision<TAB>motor<TAB>social<TAB>emotion<TAB>time<TAB>space".
// A leading header row whose first field is "word" is skipped.
SemanticNormTable parse_norm_table(std::string_view text);
std::string format_norm_table(const SemanticNormTable& table);

enum class EbmScaling { zscore, none };

std::optional<EbmScaling> parse_ebm_scaling(std::string_view name);

struct Coverage {
  std::size_t retained = 0;
  std::size_t requested = 0;
  std::vector<std::string> missing;
};

struct EbmResult {
  EmbeddingMatrix embedding;  // only the covered words, in vocabulary order
  Coverage coverage;
};

// Missing words are excluded, not imputed. z-scoring uses the population
// standard deviation over the retained rows; constant columns are only
// centered.
EbmResult build_ebm(const SemanticNormTable& norms, const Vocabulary& vocab,
                    EbmScaling scaling = EbmScaling::zscore);

}  // namespace cortexenc::reprs
