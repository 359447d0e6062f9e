#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cortexenc/builders.hpp"
#include "cortexenc/error.hpp"

using namespace cortexenc;
using namespace cortexenc::reprs;

namespace {

double cosine(const Eigen::MatrixXd& m, Eigen::Index a, Eigen::Index b) {
  return m.row(a).dot(m.row(b)) / (m.row(a).norm() * m.row(b).norm());
}

// Two planted clusters: cluster words only ever share sentences with each
// other.
corpus::Corpus two_cluster_corpus(std::uint32_t seed) {
  const std::vector<std::vector<std::string>> clusters = {{"ant", "bee", "fly"}, {"cod", "eel", "ray"}};
  std::mt19937 gen(seed);
  corpus::Corpus c;
  for (int s = 0; s < 400; ++s) {
    const auto& words = clusters[static_cast<std::size_t>(s % 2)];
    std::uniform_int_distribution<int> pick(0, 2);
    std::vector<std::string> sentence;
    for (int t = 0; t < 8; ++t) sentence.push_back(words[static_cast<std::size_t>(pick(gen))]);
    c.push_back(sentence);
  }
  return c;
}

corpus::Corpus random_corpus(int types, int tokens, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::uniform_int_distribution<int> w(0, types - 1);
  corpus::Corpus c(1);
  for (int i = 0; i < tokens; ++i) c[0].push_back("t" + std::to_string(w(gen)));
  return c;
}

}  // namespace

TEST(Lsm, DefaultDimensionIs300) {
  const auto emb = build_lsm(random_corpus(400, 20000, 1));
  EXPECT_EQ(kDefaultDim, 300);
  EXPECT_EQ(emb.dim(), 300);
  EXPECT_EQ(emb.model_name, "LSM");
  emb.validate();
}

TEST(Lsm, PlantedClustersSeparate) {
  LsmOptions o;
  o.dim = 4;
  const auto emb = build_lsm(two_cluster_corpus(3), o);
  const auto id = [&](const char* w) { return static_cast<Eigen::Index>(*emb.vocab->find(w)); };
  const std::vector<std::string> a = {"ant", "bee", "fly"};
  const std::vector<std::string> b = {"cod", "eel", "ray"};
  double min_within = 1.0;
  double max_between = -1.0;
  for (const auto& group : {a, b}) {
    for (const auto& x : group) {
      for (const auto& y : group) {
        if (x != y) min_within = std::min(min_within, cosine(emb.data, id(x.c_str()), id(y.c_str())));
      }
    }
  }
  for (const auto& x : a) {
    for (const auto& y : b) max_between = std::max(max_between, cosine(emb.data, id(x.c_str()), id(y.c_str())));
  }
  EXPECT_GT(min_within, max_between);
}

TEST(Lsm, SameSeedIsBitIdentical) {
  LsmOptions o;
  o.dim = 20;
  o.seed = 5;
  o.svd.method = SvdMethod::randomized;
  const auto corpus = random_corpus(150, 8000, 2);
  EXPECT_EQ(format_text_vec(build_lsm(corpus, o)), format_text_vec(build_lsm(corpus, o)));
}

TEST(Ntm, DefaultDimensionIs300) {
  std::mt19937 gen(4);
  std::normal_distribution<double> z;
  EmbeddingMatrix base;
  std::vector<std::string> words;
  for (int i = 0; i < 320; ++i) words.push_back("w" + std::to_string(i));
  base.vocab = std::make_shared<const Vocabulary>(words);
  base.data = Eigen::MatrixXd::NullaryExpr(320, 12, [&] { return z(gen); });
  NtmOptions o;
  o.neighbors = 10;
  o.walks_per_node = 4;
  o.walk_length = 20;
  const auto ntm = build_ntm(base, o);
  EXPECT_EQ(ntm.dim(), 300);
  EXPECT_EQ(ntm.model_name, "NTM");
}

TEST(Ntm, DisconnectedCliquesStayApart) {
  // Two 5-node cliques with no edges between them.
  SimilarityGraph g;
  g.adjacency.resize(10);
  for (std::uint32_t i = 0; i < 10; ++i) {
    g.nodes.push_back(i);
    for (std::uint32_t j = 0; j < 10; ++j) {
      if (i != j && (i < 5) == (j < 5)) g.adjacency[i].push_back({j, 1.0});
    }
  }
  std::vector<std::string> words;
  for (int i = 0; i < 10; ++i) words.push_back("n" + std::to_string(i));
  auto vocab = std::make_shared<const Vocabulary>(words);

  NtmOptions o;
  o.dim = 4;
  o.walks_per_node = 20;
  o.walk_length = 30;
  o.seed = 7;
  const auto walks = random_walks(g, o.walks_per_node, o.walk_length, o.seed);
  const auto cooc = walk_cooccurrences(walks, vocab, o.window);
  for (const auto& e : cooc.entries()) EXPECT_EQ((e.row < 5), (e.col < 5));

  const auto emb = build_ntm_from_graph(g, vocab, o);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      for (int k = 0; k < 10; ++k) {
        const bool ij_same = (i < 5) == (j < 5);
        const bool ik_same = (i < 5) == (k < 5);
        if (i != j && ij_same && !ik_same) {
          EXPECT_GT(cosine(emb.data, i, j), cosine(emb.data, i, k));
        }
      }
    }
  }
}

TEST(Ntm, CapsNeighborsAtVocabularySize) {
  EmbeddingMatrix base;
  base.vocab = std::make_shared<const Vocabulary>(std::vector<std::string>{"a", "b", "c"});
  base.data = Eigen::MatrixXd::Random(3, 2);
  NtmOptions o;
  o.dim = 2;
  o.neighbors = 50;
  EXPECT_NO_THROW(build_ntm(base, o));
}

TEST(Ebm, CoverageAndDimension) {
  SemanticNormTable norms;
  norms.add("a", {1, 2, 3, 4, 5, 6});
  norms.add("b", {2, 2, 2, 2, 2, 2});
  norms.add("c", {0, 1, 0, 1, 0, 1});
  const Vocabulary vocab({"a", "x", "b", "y", "c"});
  const auto r = build_ebm(norms, vocab);
  EXPECT_EQ(r.coverage.retained, 3u);
  EXPECT_EQ(r.coverage.requested, 5u);
  EXPECT_EQ(r.coverage.missing, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(r.embedding.dim(), 6);
  EXPECT_EQ(kEmbodiedDim, 6);
  EXPECT_EQ(r.embedding.rows(), 3);
  EXPECT_EQ(r.embedding.vocab->word(1), "b");
}

TEST(Ebm, ZscoreColumns) {
  std::mt19937 gen(1);
  std::normal_distribution<double> z(3.0, 2.0);
  SemanticNormTable norms;
  std::vector<std::string> words;
  for (int i = 0; i < 40; ++i) {
    std::array<double, 6> v{};
    for (auto& x : v) x = z(gen);
    words.push_back("w" + std::to_string(i));
    norms.add(words.back(), v);
  }
  const auto r = build_ebm(norms, Vocabulary(words));
  for (int c = 0; c < 6; ++c) {
    const auto col = r.embedding.data.col(c);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().mean());
    EXPECT_NEAR(mean, 0.0, 1e-10);
    EXPECT_NEAR(sd, 1.0, 1e-10);
  }
  const auto raw = build_ebm(norms, Vocabulary(words), EbmScaling::none);
  EXPECT_EQ(raw.embedding.data(0, 0), norms.ratings[0][0]);
}

TEST(Ebm, NoCoverageThrows) {
  SemanticNormTable norms;
  norms.add("a", {1, 2, 3, 4, 5, 6});
  EXPECT_THROW(build_ebm(norms, Vocabulary({"z"})), Error);
}

TEST(NormTable, ParseWithHeaderAndRoundTrip) {
  const std::string text = "word\tvision\tmotor\tsocial\temotion\ttime\tspace\nsun\t5\t1\t0.5\t2\t1\t4\n";
  const auto t = parse_norm_table(text);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.ratings[0][5], 4.0);
  const auto again = parse_norm_table(format_norm_table(t));
  EXPECT_EQ(again.words, t.words);
  EXPECT_EQ(again.ratings, t.ratings);
}

TEST(NormTable, WrongFieldCountNamesLine) {
  try {
    parse_norm_table("sun\t1\t2\t3\nmoon\t1\t2\t3\t4\t5\t6\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::schema);
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
}
