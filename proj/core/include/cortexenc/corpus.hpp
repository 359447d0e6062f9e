#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cortexenc::corpus {

enum class TokenizeMode {
  whitespace,          // split on ASCII whitespace, ASCII lowercase
  pretokenized_lines,  // one token per line or tab field, verbatim
};

std::optional<TokenizeMode> parse_tokenize_mode(std::string_view name);

// Throws a decode error with the byte offset of the first invalid sequence.
void validate_utf8(std::string_view text);

std::vector<std::string> tokenize(std::string_view text, TokenizeMode mode);

// A corpus is a list of sequences; co-occurrence windows never cross a
// sequence boundary.
using Corpus = std::vector<std::vector<std::string>>;

// With split_at_boundaries, whitespace mode starts a new sequence at every
// newline and pre-tokenized mode at every blank line. Otherwise the whole
// text is one sequence.
Corpus read_corpus(std::string_view text, TokenizeMode mode, bool split_at_boundaries);

class Vocabulary {
 public:
  Vocabulary() = default;
  // counts may be empty (treated as all zero). Throws on duplicate words.
  explicit Vocabulary(std::vector<std::string> words, std::vector<std::int64_t> counts = {});

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::string& word(std::size_t i) const { return words_.at(i); }
  std::int64_t count(std::size_t i) const { return counts_.at(i); }
  std::span<const std::string> words() const { return words_; }
  std::span<const std::int64_t> counts() const { return counts_; }
  std::optional<std::uint32_t> find(std::string_view word) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.words_ == b.words_ && a.counts_ == b.counts_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Words sorted by descending count, ties lexicographic, then truncated.
Vocabulary build_vocab(const Corpus& corpus, std::int64_t min_count, std::size_t max_size);
Vocabulary build_vocab(std::span<const std::string> tokens, std::int64_t min_count,
                       std::size_t max_size);

// "word<TAB>count" per line.
std::string format_vocab(const Vocabulary& vocab);
Vocabulary parse_vocab(std::string_view text);

enum class Weighting { flat, distance_decay };

std::optional<Weighting> parse_weighting(std::string_view name);
std::string_view to_string(Weighting w);

struct CooccurrenceEntry {
  std::uint32_t row;
  std::uint32_t col;
  double value;
  friend bool operator==(const CooccurrenceEntry&, const CooccurrenceEntry&) = default;
};

// Sparse word-context counts stored as row-major sorted triplets. Flat counts
// are accumulated in 64-bit integers and are exact in the double field.
class CooccurrenceMatrix {
 public:
  CooccurrenceMatrix(std::shared_ptr<const Vocabulary> vocab, std::vector<CooccurrenceEntry> entries,
                     int window, Weighting weighting, std::int64_t total_pairs);

  const Vocabulary& vocab() const { return *vocab_; }
  std::shared_ptr<const Vocabulary> vocab_ptr() const { return vocab_; }
  std::span<const CooccurrenceEntry> entries() const { return entries_; }
  int window() const { return window_; }
  Weighting weighting() const { return weighting_; }
  bool symmetric() const { return true; }
  // Number of (center, context) pairs emitted by the counting rule.
  std::int64_t total_pairs() const { return total_pairs_; }
  double total() const;
  double at(std::uint32_t row, std::uint32_t col) const;

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  std::vector<CooccurrenceEntry> entries_;
  int window_;
  Weighting weighting_;
  std::int64_t total_pairs_;
};

struct CooccurrenceOptions {
  int window = 2;
  Weighting weighting = Weighting::flat;
};

// Every in-vocabulary token at distance 1..window on either side of an
// in-vocabulary center adds 1 (flat) or 1/distance (decay) to (center,
// context). Out-of-vocabulary tokens keep their positions.
CooccurrenceMatrix count_cooccurrences(const Corpus& corpus,
                                       std::shared_ptr<const Vocabulary> vocab,
                                       const CooccurrenceOptions& options = {});

// Same rule over pre-mapped ids; a negative id marks an out-of-vocabulary slot.
CooccurrenceMatrix count_cooccurrences(std::span<const std::vector<std::int64_t>> sequences,
                                       std::shared_ptr<const Vocabulary> vocab,
                                       const CooccurrenceOptions& options = {});

// "i<TAB>j<TAB>count" lines plus a JSON sidecar.
std::string format_cooccurrence_triples(const CooccurrenceMatrix& m);
std::string format_cooccurrence_sidecar(const CooccurrenceMatrix& m, std::string_view vocab_file);

}  // namespace cortexenc::corpus
