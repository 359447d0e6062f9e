#include "cortexenc/corpus.hpp"

#include <algorithm>
#include <type_traits>
#include <map>

#include <nlohmann/json.hpp>

#include "cortexenc/binary_io.hpp"
#include "cortexenc/error.hpp"
#include "cortexenc/parallel.hpp"

namespace cortexenc::corpus {

std::optional<TokenizeMode> parse_tokenize_mode(std::string_view name) {
  if (name == "whitespace") return TokenizeMode::whitespace;
  if (name == "pre-tokenized-lines") return TokenizeMode::pretokenized_lines;
  return std::nullopt;
}

void validate_utf8(std::string_view text) {
  const auto* s = reinterpret_cast<const unsigned char*>(text.data());
  const std::size_t n = text.size();
  std::size_t i = 0;
  auto bad = [&](std::size_t at) {
    throw Error(ErrorKind::decode, "invalid UTF-8 at byte offset " + std::to_string(at), at);
  };
  while (i < n) {
    const unsigned char c = s[i];
    if (c < 0x80) {
      ++i;
      continue;
    }
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if ((c & 0xe0) == 0xc0) {
      len = 2;
      cp = c & 0x1f;
    } else if ((c & 0xf0) == 0xe0) {
      len = 3;
      cp = c & 0x0f;
    } else if ((c & 0xf8) == 0xf0) {
      len = 4;
      cp = c & 0x07;
    } else {
      bad(i);
    }
    if (i + len > n) bad(i);
    for (std::size_t k = 1; k < len; ++k) {
      if ((s[i + k] & 0xc0) != 0x80) bad(i);
      cp = (cp << 6) | (s[i + k] & 0x3f);
    }
    const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
                          (len == 4 && cp < 0x10000);
    if (overlong || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) bad(i);
    i += len;
  }
}

namespace {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

void append_whitespace_tokens(std::string_view text, std::vector<std::string>& out) {
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_ascii_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_ascii_space(text[i])) ++i;
    if (i > start) {
      std::string tok(text.substr(start, i - start));
      for (auto& ch : tok) {
        if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
      }
      out.push_back(std::move(tok));
    }
  }
}

void append_pretokenized(std::string_view text, std::vector<std::string>& out) {
  for (auto line : io::split_lines(text)) {
    for (auto field : io::split_tabs(line)) {
      if (!field.empty()) out.emplace_back(field);
    }
  }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, TokenizeMode mode) {
  validate_utf8(text);
  std::vector<std::string> tokens;
  if (mode == TokenizeMode::whitespace) {
    append_whitespace_tokens(text, tokens);
  } else {
    append_pretokenized(text, tokens);
  }
  return tokens;
}

Corpus read_corpus(std::string_view text, TokenizeMode mode, bool split_at_boundaries) {
  validate_utf8(text);
  Corpus corpus;
  if (!split_at_boundaries) {
    corpus.push_back(tokenize(text, mode));
    return corpus;
  }
  std::vector<std::string> current;
  for (auto line : io::split_lines(text)) {
    if (mode == TokenizeMode::whitespace) {
      append_whitespace_tokens(line, current);
      if (!current.empty()) corpus.push_back(std::move(current));
      current.clear();
    } else if (line.empty()) {
      if (!current.empty()) corpus.push_back(std::move(current));
      current.clear();
    } else {
      append_pretokenized(line, current);
    }
  }
  if (!current.empty()) corpus.push_back(std::move(current));
  return corpus;
}

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::int64_t> counts)
    : words_(std::move(words)), counts_(std::move(counts)) {
  if (counts_.empty()) counts_.assign(words_.size(), 0);
  require(counts_.size() == words_.size(), ErrorKind::mismatch,
          "vocabulary counts and words differ in length");
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    const auto [it, inserted] = index_.emplace(words_[i], static_cast<std::uint32_t>(i));
    require(inserted, ErrorKind::invalid_argument, "duplicate vocabulary word '" + words_[i] + "'");
  }
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

Vocabulary finish_vocab(std::unordered_map<std::string, std::int64_t>&& counts,
                        std::int64_t min_count, std::size_t max_size) {
  require(min_count >= 1, ErrorKind::invalid_argument, "min_count must be >= 1");
  require(max_size >= 1, ErrorKind::invalid_argument, "max_size must be >= 1");
  require(!counts.empty(), ErrorKind::empty_input, "empty corpus");
  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (auto& [w, c] : counts) {
    if (c >= min_count) kept.emplace_back(w, c);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (kept.size() > max_size) kept.resize(max_size);
  std::vector<std::string> words;
  std::vector<std::int64_t> cs;
  words.reserve(kept.size());
  cs.reserve(kept.size());
  for (auto& [w, c] : kept) {
    words.push_back(std::move(w));
    cs.push_back(c);
  }
  return Vocabulary(std::move(words), std::move(cs));
}

}  // namespace

Vocabulary build_vocab(const Corpus& corpus, std::int64_t min_count, std::size_t max_size) {
  std::unordered_map<std::string, std::int64_t> counts;
  for (const auto& seq : corpus) {
    for (const auto& tok : seq) ++counts[tok];
  }
  return finish_vocab(std::move(counts), min_count, max_size);
}

Vocabulary build_vocab(std::span<const std::string> tokens, std::int64_t min_count,
                       std::size_t max_size) {
  std::unordered_map<std::string, std::int64_t> counts;
  for (const auto& tok : tokens) ++counts[tok];
  return finish_vocab(std::move(counts), min_count, max_size);
}

std::string format_vocab(const Vocabulary& vocab) {
  std::string out;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out += vocab.word(i);
    out += '\t';
    out += std::to_string(vocab.count(i));
    out += '\n';
  }
  return out;
}

Vocabulary parse_vocab(std::string_view text) {
  std::vector<std::string> words;
  std::vector<std::int64_t> counts;
  std::size_t lineno = 0;
  for (auto line : io::split_lines(text)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = io::split_tabs(line);
    words.emplace_back(fields[0]);
    counts.push_back(fields.size() > 1 ? io::parse_int(fields[1], "vocab line " + std::to_string(lineno)) : 0);
  }
  return Vocabulary(std::move(words), std::move(counts));
}

std::optional<Weighting> parse_weighting(std::string_view name) {
  if (name == "flat") return Weighting::flat;
  if (name == "distance-decay") return Weighting::distance_decay;
  return std::nullopt;
}

std::string_view to_string(Weighting w) {
  return w == Weighting::flat ? "flat" : "distance-decay";
}

CooccurrenceMatrix::CooccurrenceMatrix(std::shared_ptr<const Vocabulary> vocab,
                                       std::vector<CooccurrenceEntry> entries, int window,
                                       Weighting weighting, std::int64_t total_pairs)
    : vocab_(std::move(vocab)),
      entries_(std::move(entries)),
      window_(window),
      weighting_(weighting),
      total_pairs_(total_pairs) {}

double CooccurrenceMatrix::total() const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.value;
  return sum;
}

double CooccurrenceMatrix::at(std::uint32_t row, std::uint32_t col) const {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{row, col},
                                   [](const CooccurrenceEntry& e, const auto& key) {
                                     return std::pair{e.row, e.col} < key;
                                   });
  if (it != entries_.end() && it->row == row && it->col == col) return it->value;
  return 0.0;
}

namespace {

// Centers per shard. Fixed so that the merge order, and therefore every
// floating-point sum, is independent of the worker count.
constexpr std::size_t kShardCenters = 1 << 16;

struct Shard {
  std::size_t sequence;
  std::size_t begin;
  std::size_t end;
};

std::uint64_t pack(std::uint32_t r, std::uint32_t c) {
  return (std::uint64_t{r} << 32) | c;
}

template <typename Acc>
CooccurrenceMatrix count_impl(std::span<const std::vector<std::int64_t>> sequences,
                              std::shared_ptr<const Vocabulary> vocab, int window,
                              Weighting weighting) {
  std::vector<Shard> shards;
  for (std::size_t s = 0; s < sequences.size(); ++s) {
    for (std::size_t b = 0; b < sequences[s].size(); b += kShardCenters) {
      shards.push_back({s, b, std::min(sequences[s].size(), b + kShardCenters)});
    }
  }

  std::vector<std::unordered_map<std::uint64_t, Acc>> partial(shards.size());
  std::vector<std::int64_t> pair_counts(shards.size(), 0);
  parallel_for(shards.size(), [&](std::size_t k) {
    const auto& shard = shards[k];
    const auto& seq = sequences[shard.sequence];
    auto& acc = partial[k];
    std::int64_t pairs = 0;
    const auto n = static_cast<std::int64_t>(seq.size());
    for (auto p = static_cast<std::int64_t>(shard.begin); p < static_cast<std::int64_t>(shard.end); ++p) {
      const auto center = seq[static_cast<std::size_t>(p)];
      if (center < 0) continue;
      // Each unordered position pair is visited once and credited to both
      // orientations, so (a, b) and (b, a) accumulate identical sums.
      const auto hi = std::min<std::int64_t>(n - 1, p + window);
      for (auto q = p + 1; q <= hi; ++q) {
        const auto ctx = seq[static_cast<std::size_t>(q)];
        if (ctx < 0) continue;
        const auto a = static_cast<std::uint32_t>(center);
        const auto b = static_cast<std::uint32_t>(ctx);
        if constexpr (std::is_integral_v<Acc>) {
          acc[pack(a, b)] += 1;
          acc[pack(b, a)] += 1;
        } else {
          const double w = 1.0 / static_cast<double>(q - p);
          acc[pack(a, b)] += w;
          acc[pack(b, a)] += w;
        }
        pairs += 2;
      }
    }
    pair_counts[k] = pairs;
  });

  std::unordered_map<std::uint64_t, Acc> merged;
  std::int64_t total_pairs = 0;
  for (std::size_t k = 0; k < partial.size(); ++k) {
    // Walk each shard's keys in sorted order so decay sums are reproducible.
    std::vector<std::pair<std::uint64_t, Acc>> items(partial[k].begin(), partial[k].end());
    std::sort(items.begin(), items.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [key, v] : items) merged[key] += v;
    total_pairs += pair_counts[k];
    partial[k].clear();
  }

  std::vector<CooccurrenceEntry> entries;
  entries.reserve(merged.size());
  for (const auto& [key, v] : merged) {
    entries.push_back({static_cast<std::uint32_t>(key >> 32),
                       static_cast<std::uint32_t>(key & 0xffffffffu), static_cast<double>(v)});
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  return CooccurrenceMatrix(std::move(vocab), std::move(entries), window, weighting, total_pairs);
}

}  // namespace

CooccurrenceMatrix count_cooccurrences(std::span<const std::vector<std::int64_t>> sequences,
                                       std::shared_ptr<const Vocabulary> vocab,
                                       const CooccurrenceOptions& options) {
  require(vocab != nullptr, ErrorKind::invalid_argument, "vocabulary is null");
  require(options.window >= 1, ErrorKind::invalid_argument, "window must be >= 1");
  const auto v = static_cast<std::int64_t>(vocab->size());
  for (const auto& seq : sequences) {
    for (auto id : seq) {
      require(id < v, ErrorKind::invalid_argument, "token id out of vocabulary range");
    }
  }
  if (options.weighting == Weighting::flat) {
    return count_impl<std::int64_t>(sequences, std::move(vocab), options.window, options.weighting);
  }
  return count_impl<double>(sequences, std::move(vocab), options.window, options.weighting);
}

CooccurrenceMatrix count_cooccurrences(const Corpus& corpus,
                                       std::shared_ptr<const Vocabulary> vocab,
                                       const CooccurrenceOptions& options) {
  require(vocab != nullptr, ErrorKind::invalid_argument, "vocabulary is null");
  std::vector<std::vector<std::int64_t>> ids;
  ids.reserve(corpus.size());
  for (const auto& seq : corpus) {
    auto& out = ids.emplace_back();
    out.reserve(seq.size());
    for (const auto& tok : seq) {
      const auto id = vocab->find(tok);
      out.push_back(id ? static_cast<std::int64_t>(*id) : -1);
    }
  }
  return count_cooccurrences(std::span<const std::vector<std::int64_t>>(ids), std::move(vocab),
                             options);
}

std::string format_cooccurrence_triples(const CooccurrenceMatrix& m) {
  std::string out;
  const bool flat = m.weighting() == Weighting::flat;
  for (const auto& e : m.entries()) {
    out += std::to_string(e.row);
    out += '\t';
    out += std::to_string(e.col);
    out += '\t';
    out += flat ? std::to_string(static_cast<std::int64_t>(e.value)) : io::format_double(e.value);
    out += '\n';
  }
  return out;
}

std::string format_cooccurrence_sidecar(const CooccurrenceMatrix& m, std::string_view vocab_file) {
  nlohmann::ordered_json j;
  j["vocab_file"] = vocab_file;
  j["window"] = m.window();
  j["weighting"] = to_string(m.weighting());
  j["total_pairs"] = m.total_pairs();
  return j.dump(2) + "\n";
}

}  // namespace cortexenc::corpus
