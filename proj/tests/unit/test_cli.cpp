#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cortexenc/encode.hpp"
#include "cortexenc/error.hpp"
#include "cortexenc/stats.hpp"
#include "config.hpp"
#include "run.hpp"
#include "workspace.hpp"

namespace fs = std::filesystem;
using namespace cortexenc;
using namespace cortexenc::cli;
using nlohmann::json;

namespace {

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("cortexenc_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

fs::path write_config(const fs::path& dir, const json& doc) {
  const auto p = dir / "run.json";
  write_file(p, doc.dump(2));
  return p;
}

RunSummary run_stage(const std::string& sub, const fs::path& config, int threads = 1) {
  Invocation inv;
  inv.subcommand = sub;
  inv.config_path = config.string();
  inv.threads = threads;
  return run(inv);
}

json small_pipeline_config() {
  return json::parse(R"({
    "seed": 4,
    "out_dir": "out",
    "synth": {"vocab_size": 60, "dim": 6, "n_samples": 120, "n_targets": 20, "n_tokens": 6000,
              "subjects": 3, "rois": 4, "networks": 2, "nlm_layers": 3},
    "lsm": {"dim": 8},
    "ntm": {"dim": 8, "neighbors": 5, "walks_per_node": 3, "walk_length": 10},
    "encode": {"K": 4, "models": ["$OUT/embeddings/LSM.vec", "$OUT/embeddings/NTM.vec",
                                  "$OUT/embeddings/EBM.vec", "$OUT/embeddings/NLM.embl"]}
  })");
}

encode::EncodingResult fake_result(const std::string& subject, Eigen::VectorXd r, std::optional<int> layer = {}) {
  encode::EncodingResult res;
  res.model_name = "M";
  res.subject_id = subject;
  res.layer = layer;
  res.per_target_r = std::move(r);
  for (Eigen::Index t = 0; t < res.per_target_r.size(); ++t) res.target_names.push_back("v" + std::to_string(t));
  res.degenerate.assign(res.target_names.size(), 0);
  res.fold_rs = Eigen::MatrixXd::Zero(2, res.per_target_r.size());
  res.fold_lambdas = Eigen::MatrixXd::Ones(2, res.per_target_r.size());
  res.folds = 2;
  return res;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(fields);
  }
  return rows;
}

}  // namespace

TEST(Config, UnknownKeyIsRejectedWithPath) {
  try {
    parse_config(json::parse(R"({"encode": {"K": 5, "lamda": 2}})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::schema);
    EXPECT_NE(std::string(e.what()).find("encode.lamda"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_config(json::parse(R"({"bogus": 1})")), Error);
}

TEST(Config, WrongTypesAndRangesAreRejected) {
  EXPECT_THROW(parse_config(json::parse(R"({"encode": {"K": "ten"}})")), Error);
  EXPECT_THROW(parse_config(json::parse(R"({"encode": {"K": 1}})")), Error);
  EXPECT_THROW(parse_config(json::parse(R"({"align": {"mode": "sentence"}})")), Error);
  EXPECT_THROW(parse_config(json::parse(R"([1, 2])")), Error);
}

TEST(Config, DefaultsApply) {
  const auto c = parse_config(json::object());
  EXPECT_EQ(c.encode.folds, 10);
  EXPECT_EQ(c.encode.lambda, 1.0);
  EXPECT_EQ(c.lsm.dim, 300);
  EXPECT_EQ(c.ntm.dim, 300);
  EXPECT_EQ(c.align.mode, AlignMode::word);
  EXPECT_EQ(c.config_hash.size(), 16u);
}

TEST(Config, HashIsCanonicalAndSeedSensitive) {
  const auto a = parse_config(json::parse(R"({"seed": 1, "encode": {"K": 5, "lambda": 2.0}})"));
  const auto b = parse_config(json::parse(R"({"encode": {"lambda": 2.0, "K": 5}, "seed": 1})"));
  EXPECT_EQ(a.config_hash, b.config_hash);
  const auto c = parse_config(json::parse(R"({"seed": 1, "encode": {"K": 5, "lambda": 2.0}})"), 2);
  EXPECT_NE(a.config_hash, c.config_hash);
  EXPECT_EQ(c.seed, 2u);
  const auto d = parse_config(json::parse(R"({"seed": 2, "encode": {"K": 5, "lambda": 2.0}})"));
  EXPECT_EQ(c.config_hash, d.config_hash);
}

TEST(Config, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Config, MalformedJsonReportsByteOffset) {
  TempDir dir("badjson");
  const auto p = dir.path() / "bad.json";
  write_file(p, "{\"seed\": 1,, }");
  try {
    load_config(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::decode);
    EXPECT_TRUE(e.byte_offset().has_value());
  }
  EXPECT_THROW(load_config(dir.path() / "missing.json"), Error);
}

TEST(Workspace, ResolvesOutPrefixAndConfigRelativePaths) {
  TempDir dir("resolve");
  auto cfg = parse_config(json::object());
  cfg.config_dir = dir.path() / "configs";
  Workspace ws(cfg, dir.path() / "out", "synth");
  EXPECT_EQ(ws.resolve("$OUT/a/b.txt"), dir.path() / "out" / "a" / "b.txt");
  EXPECT_EQ(ws.resolve("data/x.tsv"), dir.path() / "configs" / "data" / "x.tsv");
  EXPECT_EQ(ws.resolve("/abs/y.tsv"), fs::path("/abs/y.tsv"));
}

TEST(Workspace, ExpandSortsWildcardMatches) {
  TempDir dir("expand");
  for (const char* n : {"sub-02.brn", "sub-01.brn", "other.txt"}) write_file(dir.path() / "r" / n, "x");
  auto cfg = parse_config(json::object());
  cfg.config_dir = dir.path();
  Workspace ws(cfg, dir.path() / "out", "align");
  const auto m = ws.expand("r/*.brn");
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].filename(), "sub-01.brn");
  EXPECT_THROW(ws.expand("r/*.none"), Error);
}

TEST(Workspace, ManifestRecordsOutputs) {
  TempDir dir("manifest");
  auto cfg = parse_config(json::object());
  cfg.config_dir = dir.path();
  Workspace ws(cfg, dir.path() / "out", "synth");
  ws.write_output("x/y.txt", "hello");
  ws.write_manifest(0.5, 2);
  const auto m = json::parse(slurp(dir.path() / "out" / "manifests" / "synth.json"));
  EXPECT_EQ(m.at("subcommand"), "synth");
  EXPECT_EQ(m.at("threads"), 2);
  EXPECT_EQ(m.at("config_hash"), cfg.config_hash);
  const auto& outputs = m.at("outputs");
  ASSERT_EQ(outputs.size(), 1u);
  EXPECT_EQ(outputs[0].at("path"), "x/y.txt");
  EXPECT_EQ(outputs[0].at("bytes"), 5);
  EXPECT_EQ(outputs[0].at("fnv1a64"), hex64(fnv1a64("hello")));
  EXPECT_EQ(slurp(dir.path() / "out" / "x" / "y.txt"), "hello");
}

TEST(Run, UnknownSubcommandAndBadThreadsEnv) {
  TempDir dir("badrun");
  const auto cfg = write_config(dir.path(), json::object());
  EXPECT_THROW(run_stage("frobnicate", cfg), Error);
  Invocation inv;
  inv.subcommand = "synth";
  inv.config_path = cfg.string();
  ::setenv("CORTEXENC_THREADS", "zero", 1);
  EXPECT_THROW(run(inv), Error);
  ::unsetenv("CORTEXENC_THREADS");
}

TEST(Run, FullWordPipeline) {
  TempDir dir("pipeline");
  const auto cfg = write_config(dir.path(), small_pipeline_config());
  for (const char* sub : {"synth", "build-cooc", "build-lsm", "build-ntm", "build-ebm", "import-emb", "align",
                          "encode", "compare", "label-map", "report"}) {
    const auto s = run_stage(sub, cfg);
    EXPECT_GT(s.outputs, 0u) << sub;
    EXPECT_TRUE(fs::exists(dir.path() / "out" / "manifests" / (std::string(sub) + ".json"))) << sub;
  }
  const auto out = dir.path() / "out";
  EXPECT_TRUE(fs::exists(out / "embeddings" / "LSM.vec"));
  EXPECT_TRUE(fs::exists(out / "results" / "LSM__sub-01.json"));
  EXPECT_TRUE(fs::exists(out / "results" / "NLM_L2__sub-03.json"));
  EXPECT_TRUE(fs::exists(out / "label_map" / "labels.csv"));

  const auto models = read_csv(out / "report" / "models.csv");
  ASSERT_EQ(models.size(), 5u);
  EXPECT_EQ(models[0], (std::vector<std::string>{"model", "layer", "mean_r", "n_subjects"}));
  const auto layers = read_csv(out / "report" / "layers.csv");
  EXPECT_EQ(layers.size(), 4u);

  // Result files carry the config hash of the run that produced them.
  const auto r = encode::parse_result_json(slurp(out / "results" / "LSM__sub-01.json"));
  EXPECT_EQ(r.config_hash, load_config(cfg).config_hash);
  EXPECT_EQ(r.folds, 4);
}

TEST(Run, OutOverrideAndSeedOverride) {
  TempDir dir("override");
  auto doc = small_pipeline_config();
  const auto cfg = write_config(dir.path(), doc);
  Invocation inv;
  inv.subcommand = "synth";
  inv.config_path = cfg.string();
  inv.out_dir = (dir.path() / "elsewhere").string();
  inv.seed = 99;
  inv.threads = 1;
  const auto s = run(inv);
  EXPECT_TRUE(fs::exists(dir.path() / "elsewhere" / "synth" / "corpus.txt"));
  EXPECT_FALSE(fs::exists(dir.path() / "out"));
  const auto m = json::parse(slurp(dir.path() / "elsewhere" / "manifests" / "synth.json"));
  EXPECT_EQ(m.at("seed"), 99);
  EXPECT_EQ(m.at("config_hash"), s.config_hash);
  EXPECT_NE(s.config_hash, load_config(cfg).config_hash);
}

TEST(Report, SingleSubjectRoiMeansMatchResult) {
  TempDir dir("report_single");
  const auto out = dir.path() / "out";
  stats::RoiAtlas atlas;
  for (int t = 0; t < 6; ++t) atlas.add("v" + std::to_string(t), t < 4 ? 1 : 2, t < 4 ? "A" : "B", "net");
  write_file(out / "synth" / "atlas.tsv", stats::format_atlas(atlas));
  Eigen::VectorXd r(6);
  r << 0.1, 0.2, 0.3, 0.4, 0.5, 0.7;
  write_file(out / "results" / "M__s1.json", encode::format_result_json(fake_result("s1", r)));
  run_stage("report", write_config(dir.path(), json::object()));
  const auto rows = read_csv(out / "report" / "rois.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][0], "1");
  EXPECT_NEAR(std::stod(rows[1][4]), 0.25, 1e-12);
  EXPECT_NEAR(std::stod(rows[2][4]), 0.6, 1e-12);
  const auto nets = read_csv(out / "report" / "networks.csv");
  EXPECT_NEAR(std::stod(nets[1][2]), r.mean(), 1e-12);
}

TEST(Report, OpposedSubjectsAverageToZero) {
  TempDir dir("report_zero");
  const auto out = dir.path() / "out";
  Eigen::VectorXd r(4);
  r << 0.3, -0.2, 0.5, 0.1;
  write_file(out / "results" / "M__s1.json", encode::format_result_json(fake_result("s1", r)));
  write_file(out / "results" / "M__s2.json", encode::format_result_json(fake_result("s2", -r)));
  run_stage("report", write_config(dir.path(), json::parse(R"({"atlas": null})")));
  const auto rows = read_csv(out / "report" / "models.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(std::stod(rows[1][2]), 0.0);
  EXPECT_EQ(rows[1][3], "2");
  EXPECT_FALSE(fs::exists(out / "report" / "rois.csv"));
}

TEST(Report, TwelveLayerTableMarksBest) {
  TempDir dir("report_layers");
  const auto out = dir.path() / "out";
  for (int l = 1; l <= 12; ++l) {
    const double peak = -std::abs(l - 8) * 0.01 + 0.3;
    write_file(out / "results" / ("M_L" + std::to_string(l) + "__s1.json"),
               encode::format_result_json(fake_result("s1", Eigen::VectorXd::Constant(3, peak), l)));
  }
  run_stage("report", write_config(dir.path(), json::parse(R"({"atlas": null})")));
  const auto rows = read_csv(out / "report" / "layers.csv");
  ASSERT_EQ(rows.size(), 13u);
  int best_rows = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][3] == "1") {
      ++best_rows;
      EXPECT_EQ(rows[i][1], "8");
    }
  }
  EXPECT_EQ(best_rows, 1);
  EXPECT_EQ(read_csv(out / "report" / "models.csv")[1][1], "8");
}

TEST(ErrorJson, Format) {
  const auto j = json::parse(error_json("schema", "unknown config key 'x'", "encode"));
  EXPECT_EQ(j.at("error").at("kind"), "schema");
  EXPECT_EQ(j.at("error").at("subcommand"), "encode");
  EXPECT_FALSE(j.at("error").contains("byte_offset"));
  const auto k = json::parse(error_json("decode", "bad", "align", 17));
  EXPECT_EQ(k.at("error").at("byte_offset"), 17);
  EXPECT_EQ(error_json("io", "m", "s").find('\n'), std::string::npos);
}
