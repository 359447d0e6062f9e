#include "config.hpp"

#include <cstdio>
#include <set>

#include "cortexenc/binary_io.hpp"
#include "cortexenc/error.hpp"

namespace cortexenc::cli {

using nlohmann::json;

namespace {

// Wraps one JSON object, hands out typed fields and remembers which keys were
// consumed so leftovers can be reported.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    require(node_.is_object(), ErrorKind::schema, where() + " must be an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    if (const json* v = take(key)) out = convert<T>(*v, child(key));
  }

  template <typename T>
  void read(const char* key, std::optional<T>& out) {
    if (const json* v = take(key)) out = v->is_null() ? std::nullopt : std::optional<T>(convert<T>(*v, child(key)));
  }

  template <typename Enum, typename Parse>
  void read_enum(const char* key, Enum& out, Parse parse) {
    if (const json* v = take(key)) {
      const auto name = convert<std::string>(*v, child(key));
      const auto parsed = parse(name);
      require(parsed.has_value(), ErrorKind::invalid_argument,
              child(key) + ": unknown value '" + name + "'");
      out = *parsed;
    }
  }

  std::optional<Section> section(const char* key) {
    if (const json* v = take(key)) return Section(*v, child(key));
    return std::nullopt;
  }

  const json* raw(const char* key) { return take(key); }

  std::string child(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      require(seen_.count(key) != 0, ErrorKind::schema, "unknown config key '" + child(key.c_str()) + "'");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : "'" + path_ + "'"; }

  const json* take(const char* key) {
    seen_.insert(key);
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  template <typename T>
  static T convert(const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
      require(v.is_boolean(), ErrorKind::schema, path + " must be a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      require(v.is_number_integer(), ErrorKind::schema, path + " must be an integer");
      if constexpr (std::is_unsigned_v<T>) {
        require(v.is_number_unsigned() || v.get<std::int64_t>() >= 0, ErrorKind::invalid_argument,
                path + " must be >= 0");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      require(v.is_number(), ErrorKind::schema, path + " must be a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      require(v.is_string(), ErrorKind::schema, path + " must be a string");
    } else {
      require(v.is_array(), ErrorKind::schema, path + " must be an array");
      T out;
      for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(convert<typename T::value_type>(v[i], path + "[" + std::to_string(i) + "]"));
      }
      return out;
    }
    return v.get<T>();
  }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void at_least(long long value, long long lo, const std::string& path) {
  require(value >= lo, ErrorKind::invalid_argument, path + " must be >= " + std::to_string(lo));
}

void positive(double value, const std::string& path) {
  require(value > 0.0, ErrorKind::invalid_argument, path + " must be > 0");
}

void parse_synth(Section& s, SynthConfig& c) {
  s.read("vocab_size", c.vocab_size);
  s.read("dim", c.dim);
  s.read("n_samples", c.n_samples);
  s.read("n_targets", c.n_targets);
  s.read("noise_sigma", c.noise_sigma);
  s.read("noise_fraction", c.noise_fraction);
  s.read("clusters", c.clusters);
  s.read("p_in", c.p_in);
  s.read("n_tokens", c.n_tokens);
  s.read("sentence_length", c.sentence_length);
  s.read("within_cluster_sd", c.within_cluster_sd);
  s.read("subjects", c.subjects);
  s.read("rois", c.rois);
  s.read("networks", c.networks);
  s.read("nlm_layers", c.nlm_layers);
  s.finish();
  at_least(c.subjects, 1, s.child("subjects"));
  at_least(c.rois, 1, s.child("rois"));
  at_least(c.networks, 1, s.child("networks"));
  require(c.networks <= c.rois, ErrorKind::invalid_argument, "synth.networks must be <= synth.rois");
  require(c.rois <= c.n_targets, ErrorKind::invalid_argument, "synth.rois must be <= synth.n_targets");
  at_least(c.nlm_layers, 1, s.child("nlm_layers"));
  require(c.noise_fraction >= 0.0, ErrorKind::invalid_argument, "synth.noise_fraction must be >= 0");
  require(c.within_cluster_sd >= 0.0, ErrorKind::invalid_argument, "synth.within_cluster_sd must be >= 0");
}

void parse_corpus(Section& s, CorpusConfig& c) {
  s.read("path", c.path);
  s.read_enum("tokenize", c.tokenize, corpus::parse_tokenize_mode);
  s.read("reset_at_lines", c.reset_at_lines);
  s.read("min_count", c.min_count);
  s.read("max_vocab", c.max_vocab);
  s.read("window", c.window);
  s.read_enum("weighting", c.weighting, corpus::parse_weighting);
  s.finish();
  at_least(c.min_count, 1, s.child("min_count"));
  at_least(static_cast<long long>(c.max_vocab), 1, s.child("max_vocab"));
  at_least(c.window, 1, s.child("window"));
}

void parse_lsm(Section& s, LsmConfig& c) {
  s.read("name", c.name);
  s.read("dim", c.dim);
  s.read("alpha", c.alpha);
  s.read_enum("svd", c.svd, reprs::parse_svd_method);
  s.finish();
  at_least(c.dim, 1, s.child("dim"));
}

void parse_ntm(Section& s, NtmConfig& c) {
  s.read("name", c.name);
  s.read("base", c.base);
  s.read("neighbors", c.neighbors);
  s.read("walks_per_node", c.walks_per_node);
  s.read("walk_length", c.walk_length);
  s.read("window", c.window);
  s.read("dim", c.dim);
  s.read("alpha", c.alpha);
  s.read_enum("svd", c.svd, reprs::parse_svd_method);
  s.read("write_walks", c.write_walks);
  s.finish();
  at_least(c.neighbors, 1, s.child("neighbors"));
  at_least(c.walks_per_node, 1, s.child("walks_per_node"));
  at_least(c.walk_length, 1, s.child("walk_length"));
  at_least(c.window, 1, s.child("window"));
  at_least(c.dim, 1, s.child("dim"));
}

void parse_ebm(Section& s, EbmConfig& c) {
  s.read("name", c.name);
  s.read("norms", c.norms);
  s.read("vocab", c.vocab);
  s.read_enum("scaling", c.scaling, reprs::parse_ebm_scaling);
  s.finish();
}

void parse_import(Section& s, ImportConfig& c) {
  s.read("path", c.path);
  s.read_enum("format", c.format, reprs::parse_embedding_format);
  s.read("name", c.name);
  s.finish();
}

std::optional<AlignMode> parse_align_mode(std::string_view name) {
  if (name == "word") return AlignMode::word;
  if (name == "discourse") return AlignMode::discourse;
  if (name == "eye") return AlignMode::eye;
  return std::nullopt;
}

void parse_align(Section& s, AlignConfig& c) {
  s.read_enum("mode", c.mode, parse_align_mode);
  s.read("words", c.words);
  s.read("responses", c.responses);
  s.read("stimulus", c.stimulus);
  s.read("eye", c.eye);
  s.read("dt", c.dt);
  if (auto h = s.section("hrf")) {
    h->read("peak_shape", c.hrf.peak_shape);
    h->read("undershoot_shape", c.hrf.undershoot_shape);
    h->read("scale", c.hrf.scale);
    h->read("undershoot_ratio", c.hrf.undershoot_ratio);
    h->read("kernel_seconds", c.hrf.kernel_seconds);
    h->finish();
    positive(c.hrf.peak_shape, h->child("peak_shape"));
    positive(c.hrf.undershoot_shape, h->child("undershoot_shape"));
    positive(c.hrf.scale, h->child("scale"));
    positive(c.hrf.kernel_seconds, h->child("kernel_seconds"));
  }
  s.finish();
  positive(c.dt, s.child("dt"));
  require(c.mode == AlignMode::eye || !c.responses.empty(), ErrorKind::invalid_argument,
          "align.responses must list at least one file");
  require(c.mode != AlignMode::discourse || !c.stimulus.empty(), ErrorKind::invalid_argument,
          "align.stimulus is required in discourse mode");
  require(c.mode != AlignMode::eye || !c.eye.empty(), ErrorKind::invalid_argument,
          "align.eye is required in eye mode");
}

void parse_encode(Section& s, EncodeConfig& c) {
  s.read("models", c.models);
  s.read("K", c.folds);
  s.read("lambda", c.lambda);
  s.read("lambda_grid", c.lambda_grid);
  s.read("inner_folds", c.inner_folds);
  s.read_enum("scheme", c.scheme, encode::parse_fold_scheme);
  s.read_enum("scoring", c.scoring, encode::parse_scoring);
  s.read("standardize", c.standardize);
  s.finish();
  require(!c.models.empty(), ErrorKind::invalid_argument, "encode.models must not be empty");
  at_least(c.folds, 2, s.child("K"));
  at_least(c.inner_folds, 2, s.child("inner_folds"));
  require(c.lambda >= 0.0, ErrorKind::invalid_argument, "encode.lambda must be >= 0");
  for (double l : c.lambda_grid) {
    require(l >= 0.0, ErrorKind::invalid_argument, "encode.lambda_grid entries must be >= 0");
  }
}

void parse_compare(Section& s, CompareConfig& c) {
  if (const json* pairs = s.raw("pairs")) {
    require(pairs->is_array(), ErrorKind::schema, "compare.pairs must be an array");
    for (const auto& p : *pairs) {
      require(p.is_array() && p.size() == 2 && p[0].is_string() && p[1].is_string(), ErrorKind::schema,
              "compare.pairs entries must be [model_a, model_b]");
      c.pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
    }
  }
  s.read_enum("unit", c.unit, stats::parse_unit);
  s.read("q", c.q);
  s.read_enum("fdr_family", c.fdr_family, stats::parse_fdr_family);
  s.finish();
  require(c.q > 0.0 && c.q <= 1.0, ErrorKind::invalid_argument, "compare.q must be in (0, 1]");
}

void parse_label_map(Section& s, LabelMapConfig& c) {
  s.read("models", c.models);
  s.read("r_min", c.r_min);
  s.finish();
}

}  // namespace

std::string_view to_string(AlignMode mode) {
  switch (mode) {
    case AlignMode::word: return "word";
    case AlignMode::discourse: return "discourse";
    case AlignMode::eye: return "eye";
  }
  return "word";
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

RunConfig parse_config(const json& doc, std::optional<std::uint64_t> seed_override) {
  json effective = doc;
  require(effective.is_object(), ErrorKind::schema, "config must be a JSON object");
  if (seed_override) effective["seed"] = *seed_override;

  RunConfig c;
  Section root(effective, "");
  root.read("seed", c.seed);
  root.read("out_dir", c.out_dir);
  root.read("results", c.results);
  root.read("atlas", c.atlas);
  if (auto s = root.section("synth")) parse_synth(*s, c.synth);
  if (auto s = root.section("corpus")) parse_corpus(*s, c.corpus);
  if (auto s = root.section("lsm")) parse_lsm(*s, c.lsm);
  if (auto s = root.section("ntm")) parse_ntm(*s, c.ntm);
  if (auto s = root.section("ebm")) parse_ebm(*s, c.ebm);
  if (auto s = root.section("import")) parse_import(*s, c.import);
  if (auto s = root.section("align")) parse_align(*s, c.align);
  if (auto s = root.section("encode")) parse_encode(*s, c.encode);
  if (auto s = root.section("compare")) parse_compare(*s, c.compare);
  if (auto s = root.section("label_map")) parse_label_map(*s, c.label_map);
  root.finish();

  // nlohmann::json keeps object keys sorted, so dump() is canonical.
  c.config_hash = hex64(fnv1a64(effective.dump()));
  return c;
}

RunConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
  const auto text = io::read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::decode, "config " + path.string() + " is not valid JSON: " + e.what(), e.byte);
  }
  auto c = parse_config(doc, seed_override);
  c.config_dir = std::filesystem::absolute(path).parent_path();
  return c;
}

}  // namespace cortexenc::cli
