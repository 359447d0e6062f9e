#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "cortexenc/embedding.hpp"
#include "cortexenc/error.hpp"

using namespace cortexenc;
using namespace cortexenc::reprs;

namespace {

std::vector<EmbeddingMatrix> random_layers(int layers, int rows, int dim, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<float> z;
  std::vector<std::string> words;
  for (int i = 0; i < rows; ++i) words.push_back("tok" + std::to_string(i));
  auto vocab = std::make_shared<const Vocabulary>(words);
  std::vector<EmbeddingMatrix> out;
  for (int l = 0; l < layers; ++l) {
    EmbeddingMatrix e;
    e.vocab = vocab;
    // Values representable in f32, so the binary round trip is exact.
    e.data = Eigen::MatrixXd::NullaryExpr(rows, dim, [&] { return static_cast<double>(z(gen)); });
    e.model_name = "NLM";
    e.layer = l + 1;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

TEST(TextVec, ParsesSmallFileExactly) {
  const auto embs = parse_text_vec("2 3\nred 0.1 -2 3e-5\nblue 1 2 3\n", "COLOR");
  ASSERT_EQ(embs.size(), 1u);
  const auto& e = embs[0];
  EXPECT_EQ(e.rows(), 2);
  EXPECT_EQ(e.dim(), 3);
  EXPECT_EQ(e.data(0, 0), 0.1);
  EXPECT_EQ(e.data(0, 1), -2.0);
  EXPECT_EQ(e.data(0, 2), 3e-5);
  EXPECT_EQ(e.vocab->word(1), "blue");
  EXPECT_EQ(e.row_of("blue"), 1);
  EXPECT_FALSE(e.row_of("green").has_value());
  EXPECT_EQ(e.model_name, "COLOR");
}

TEST(TextVec, HeaderIsOptional) {
  const auto embs = parse_text_vec("a 1 2\nb 3 4\n", "M");
  EXPECT_EQ(embs[0].rows(), 2);
  EXPECT_EQ(embs[0].dim(), 2);
}

TEST(TextVec, DimensionMismatchNamesLine) {
  try {
    parse_text_vec("2 3\na 1 2 3\nb 1 2\n", "M");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::mismatch);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(TextVec, BadNumberAndHeaderCount) {
  EXPECT_THROW(parse_text_vec("a 1 x\n", "M"), Error);
  EXPECT_THROW(parse_text_vec("3 2\na 1 2\nb 3 4\n", "M"), Error);
  EXPECT_THROW(parse_text_vec("", "M"), Error);
  EXPECT_THROW(parse_text_vec("a 1 2\na 3 4\n", "M"), Error);
}

TEST(TextVec, FormatRoundTripIsBitExact) {
  std::mt19937 gen(2);
  std::normal_distribution<double> z;
  EmbeddingMatrix e;
  e.vocab = std::make_shared<const Vocabulary>(std::vector<std::string>{"x", "y", "z"});
  e.data = Eigen::MatrixXd::NullaryExpr(3, 7, [&] { return z(gen) * 1e-3; });
  e.model_name = "R";
  const auto back = parse_text_vec(format_text_vec(e), "R");
  EXPECT_EQ(back[0].data, e.data);
  EXPECT_EQ(*back[0].vocab, *e.vocab);
}

TEST(PerLayerTable, RoundTrip12And24Layers) {
  for (int layers : {12, 24}) {
    const auto src = random_layers(layers, 15, 8, static_cast<std::uint32_t>(layers));
    const auto bytes = format_per_layer_table(src);
    std::size_t words = 0;
    for (const auto& w : src[0].vocab->words()) words += 4 + w.size();
    EXPECT_EQ(bytes.size(), 20 + words + static_cast<std::size_t>(layers) * 15 * 8 * 4);
    const auto back = parse_per_layer_table(bytes, "NLM");
    ASSERT_EQ(back.size(), static_cast<std::size_t>(layers));
    for (int l = 0; l < layers; ++l) {
      EXPECT_EQ(back[static_cast<std::size_t>(l)].layer, l + 1);
      EXPECT_EQ(back[static_cast<std::size_t>(l)].data, src[static_cast<std::size_t>(l)].data);
      EXPECT_EQ(back[static_cast<std::size_t>(l)].model_name, "NLM");
    }
  }
}

TEST(PerLayerTable, HeaderLayoutIsLittleEndian) {
  const auto src = random_layers(2, 3, 4, 1);
  const auto bytes = format_per_layer_table(src);
  ASSERT_GE(bytes.size(), 20u);
  EXPECT_EQ(bytes.substr(0, 4), "EMBL");
  const auto u32_at = [&](std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(bytes[off + static_cast<std::size_t>(i)]);
    return v;
  };
  EXPECT_EQ(u32_at(4), kPerLayerTableVersion);
  EXPECT_EQ(u32_at(8), 2u);
  EXPECT_EQ(u32_at(12), 3u);
  EXPECT_EQ(u32_at(16), 4u);
  // Payload is exactly layers x V x d floats at the end.
  const std::size_t payload = 2 * 3 * 4 * 4;
  float first = 0;
  std::memcpy(&first, bytes.data() + bytes.size() - payload, 4);
  EXPECT_EQ(static_cast<double>(first), src[0].data(0, 0));
}

TEST(PerLayerTable, RejectsCorruptInput) {
  const auto bytes = format_per_layer_table(random_layers(2, 3, 4, 1));
  EXPECT_THROW(parse_per_layer_table("XXXX" + bytes.substr(4), "M"), Error);
  EXPECT_THROW(parse_per_layer_table(bytes.substr(0, bytes.size() - 1), "M"), Error);
  EXPECT_THROW(parse_per_layer_table(bytes + "x", "M"), Error);
  try {
    parse_per_layer_table("BAD!", "M");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::decode);
  }
}

TEST(PerLayerTable, RejectsMixedLayers) {
  auto layers = random_layers(2, 3, 4, 1);
  layers[1].data.conservativeResize(3, 5);
  EXPECT_THROW(format_per_layer_table(layers), Error);
}

TEST(Import, ModelNameDefaultsToStem) {
  const auto dir = std::filesystem::temp_directory_path() / "cortexenc_import_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "GloVe.vec";
  std::ofstream(path) << "a 1 2\nb 3 4\n";
  const auto embs = import_embeddings(path, EmbeddingFormat::text_vec);
  EXPECT_EQ(embs[0].model_name, "GloVe");
  EXPECT_EQ(import_embeddings(path, EmbeddingFormat::text_vec, "Other")[0].model_name, "Other");
  EXPECT_THROW(import_embeddings(dir / "missing.vec", EmbeddingFormat::text_vec), Error);
  std::filesystem::remove_all(dir);
}

TEST(EmbeddingFormatNames, Parse) {
  EXPECT_EQ(parse_embedding_format("text-vec"), EmbeddingFormat::text_vec);
  EXPECT_EQ(parse_embedding_format("per-layer-table"), EmbeddingFormat::per_layer_table);
  EXPECT_FALSE(parse_embedding_format("npy").has_value());
}

TEST(Validate, RejectsNonFiniteAndShapeMismatch) {
  EmbeddingMatrix e;
  e.vocab = std::make_shared<const Vocabulary>(std::vector<std::string>{"a", "b"});
  e.data = Eigen::MatrixXd::Zero(3, 2);
  EXPECT_THROW(e.validate(), Error);
  e.data = Eigen::MatrixXd::Zero(2, 2);
  e.data(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(e.validate(), Error);
}

TEST(AverageSubwords, Examples) {
  const std::vector<Eigen::VectorXd> one = {Eigen::Vector2d(1, 2)};
  EXPECT_EQ(average_subwords(one), Eigen::VectorXd(Eigen::Vector2d(1, 2)));
  const std::vector<Eigen::VectorXd> two = {Eigen::Vector2d(1, 2), Eigen::Vector2d(3, 6)};
  EXPECT_EQ(average_subwords(two), Eigen::VectorXd(Eigen::Vector2d(2, 4)));
  EXPECT_THROW(average_subwords(std::span<const Eigen::VectorXd>{}), Error);
  const std::vector<Eigen::VectorXd> mixed = {Eigen::Vector2d(1, 2), Eigen::Vector3d(1, 2, 3)};
  EXPECT_THROW(average_subwords(mixed), Error);
}

TEST(AverageSubwords, MatchesElementwiseMean) {
  std::mt19937 gen(6);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 7;
    std::vector<Eigen::VectorXd> pieces;
    for (int i = 0; i < n; ++i) pieces.push_back(Eigen::VectorXd::NullaryExpr(9, [&] { return z(gen); }));
    const auto avg = average_subwords(pieces);
    for (int k = 0; k < 9; ++k) {
      double s = 0.0;
      for (const auto& p : pieces) s += p(k);
      EXPECT_NEAR(avg(k), s / n, 1e-14);
    }
  }
}
