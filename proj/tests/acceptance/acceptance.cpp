// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Every expected value comes from an oracle written here, not from
// the library under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <nlohmann/json.hpp>

#include "cortexenc/align.hpp"
#include "cortexenc/builders.hpp"
#include "cortexenc/corpus.hpp"
#include "cortexenc/encode.hpp"
#include "cortexenc/error.hpp"
#include "cortexenc/graph.hpp"
#include "cortexenc/parallel.hpp"
#include "cortexenc/ppmi_svd.hpp"
#include "cortexenc/rng.hpp"
#include "cortexenc/stats.hpp"
#include "cortexenc/synth.hpp"
#include "run.hpp"

namespace fs = std::filesystem;
using namespace cortexenc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failures without stopping at the first one.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_++ < 3) {
      if (!detail_.empty()) detail_ += "; ";
      detail_ += what;
    }
  }
  Outcome outcome(std::string summary) const {
    if (failures_ == 0) return {true, std::move(summary)};
    return {false, std::to_string(failures_) + " failed checks: " + detail_};
  }

 private:
  int failures_ = 0;
  std::string detail_;
};

Eigen::MatrixXd gaussian(std::mt19937& gen, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> z;
  return Eigen::MatrixXd::NullaryExpr(rows, cols, [&] { return z(gen); });
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. co-occurrence and PPMI against brute force

Outcome criterion_cooccurrence() {
  Check check;
  std::mt19937 gen(101);
  for (int c = 0; c < 20; ++c) {
    std::uniform_int_distribution<int> tokens_d(100, 10000);
    std::uniform_int_distribution<int> types_d(5, 300);
    const int tokens = tokens_d(gen);
    const int types = types_d(gen);
    std::uniform_int_distribution<int> word(0, types - 1);
    corpus::Corpus corpus(static_cast<std::size_t>(1 + c % 6));
    for (int i = 0; i < tokens; ++i) corpus[static_cast<std::size_t>(i) % corpus.size()].push_back("w" + std::to_string(word(gen)));
    auto vocab = std::make_shared<const corpus::Vocabulary>(corpus::build_vocab(corpus, 1 + c % 3, 1000000));
    const int window = 1 + c % 5;
    const auto m = corpus::count_cooccurrences(corpus, vocab, {window, corpus::Weighting::flat});

    const auto v = static_cast<Eigen::Index>(vocab->size());
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(v, v);
    std::int64_t pairs = 0;
    for (const auto& seq : corpus) {
      const auto n = static_cast<int>(seq.size());
      for (int i = 0; i < n; ++i) {
        const auto a = vocab->find(seq[static_cast<std::size_t>(i)]);
        if (!a) continue;
        for (int j = std::max(0, i - window); j <= std::min(n - 1, i + window); ++j) {
          if (j == i) continue;
          const auto b = vocab->find(seq[static_cast<std::size_t>(j)]);
          if (!b) continue;
          dense(*a, *b) += 1.0;
          ++pairs;
        }
      }
    }
    Eigen::MatrixXd got = Eigen::MatrixXd::Zero(v, v);
    for (const auto& e : m.entries()) got(e.row, e.col) = e.value;
    check.expect(got == dense, "corpus " + std::to_string(c) + " counts differ");
    check.expect(m.total_pairs() == pairs, "corpus " + std::to_string(c) + " pair total differs");

    const double total = dense.sum();
    const Eigen::VectorXd row = dense.rowwise().sum();
    const Eigen::RowVectorXd col = dense.colwise().sum();
    Eigen::MatrixXd oracle = Eigen::MatrixXd::Zero(v, v);
    for (Eigen::Index i = 0; i < v; ++i) {
      for (Eigen::Index j = 0; j < v; ++j) {
        if (dense(i, j) > 0) {
          oracle(i, j) = std::max(0.0, std::log(dense(i, j) * total / (row(i) * col(j))));
        }
      }
    }
    const Eigen::MatrixXd ppmi = Eigen::MatrixXd(reprs::ppmi_weight(m));
    const double err = (ppmi - oracle).cwiseAbs().maxCoeff();
    check.expect(err <= 1e-10, "corpus " + std::to_string(c) + " PPMI error " + fmt(err));
  }
  return check.outcome("20 corpora exact, PPMI within 1e-10");
}

// ---------------------------------------------------------------------------
// 2. ridge against normal equations, OLS and gradient descent

Outcome criterion_ridge() {
  Check check;
  std::mt19937 gen(202);
  std::uniform_int_distribution<int> n_d(30, 120);
  std::uniform_int_distribution<int> d_d(1, 12);
  std::uniform_int_distribution<int> t_d(1, 6);
  std::uniform_real_distribution<double> log_lambda(-2.0, 2.0);
  double worst_residual = 0.0;
  double worst_ols = 0.0;
  double worst_gd = 0.0;
  encode::RidgeOptions raw;
  raw.standardize = false;
  for (int i = 0; i < 100; ++i) {
    const int n = n_d(gen);
    const int d = d_d(gen);
    const auto x = gaussian(gen, n, d);
    const auto y = gaussian(gen, n, t_d(gen));
    const double lambda = std::pow(10.0, log_lambda(gen));

    const auto model = encode::fit_ridge(x, y, lambda, raw);
    const Eigen::MatrixXd xty = x.transpose() * y;
    const Eigen::MatrixXd lhs = (x.transpose() * x + lambda * Eigen::MatrixXd::Identity(d, d)) * model.weights;
    worst_residual = std::max(worst_residual, (lhs - xty).norm() / xty.norm());

    const auto ols = encode::fit_ridge(x, y, 0.0, raw);
    const Eigen::MatrixXd ols_oracle = x.colPivHouseholderQr().solve(y);
    worst_ols = std::max(worst_ols, (ols.weights - ols_oracle).cwiseAbs().maxCoeff());

    // Gradient descent on the ridge objective until the gradient vanishes.
    const Eigen::MatrixXd gram = x.transpose() * x + lambda * Eigen::MatrixXd::Identity(d, d);
    const double step = 1.0 / Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram).eigenvalues().maxCoeff();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, y.cols());
    for (int it = 0; it < 200000; ++it) {
      const Eigen::MatrixXd grad = gram * w - xty;
      if (grad.norm() < 1e-11) break;
      w -= step * grad;
    }
    worst_gd = std::max(worst_gd, (model.weights - w).cwiseAbs().maxCoeff());
  }
  check.expect(worst_residual <= 1e-8, "normal-equation residual " + fmt(worst_residual));
  check.expect(worst_ols <= 1e-8, "OLS difference " + fmt(worst_ols));
  check.expect(worst_gd <= 1e-4, "gradient-descent difference " + fmt(worst_gd));
  return check.outcome("100 instances; residual " + fmt(worst_residual) + ", OLS " + fmt(worst_ols) + ", GD " +
                       fmt(worst_gd));
}

// ---------------------------------------------------------------------------
// 3. Pearson examples

Outcome criterion_pearson() {
  Check check;
  const std::vector<double> a = {1, 2, 3, 4, 5};
  const double r1 = encode::pearson(a, std::vector<double>{2, 4, 6, 8, 10}).r;
  const double r2 = encode::pearson(a, std::vector<double>{5, 4, 3, 2, 1}).r;
  const double r3 = encode::pearson(a, std::vector<double>{1, 3, 2, 5, 4}).r;
  check.expect(std::abs(r1 - 1.0) <= 1e-12, "r=" + fmt(r1));
  check.expect(std::abs(r2 + 1.0) <= 1e-12, "r=" + fmt(r2));
  check.expect(std::abs(r3 - 0.8) <= 1e-12, "r=" + fmt(r3));
  return check.outcome("1, -1, 0.8 within 1e-12");
}

// ---------------------------------------------------------------------------
// 4. end-to-end recovery on synthetic data

Outcome criterion_recovery() {
  Check check;
  synth::SynthSpec spec;
  spec.seed = 404;
  spec.vocab_size = 500;
  spec.dim = 20;
  spec.n_samples = 1000;
  spec.n_targets = 1000;

  const auto truth = synth::random_embedding(spec, derive_seed(spec.seed, 1), "TRUE");
  const auto rival = synth::random_embedding(spec, derive_seed(spec.seed, 2), "RAND");
  Rng pick(derive_seed(spec.seed, 3));
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(spec.n_samples));
  for (auto& r : rows) r = static_cast<Eigen::Index>(pick.below(static_cast<std::uint64_t>(spec.vocab_size)));
  const Eigen::MatrixXd x_true = truth.data(rows, Eigen::all);
  const Eigen::MatrixXd x_rand = rival.data(rows, Eigen::all);

  const auto w0 = synth::random_matrix(spec.dim, spec.n_targets, derive_seed(spec.seed, 4));
  const double sigma = 0.1 * synth::signal_sd(x_true, w0);
  const auto brain = synth::gen_brain(x_true, w0, sigma, derive_seed(spec.seed, 5));

  const auto folds = encode::kfold_split(spec.n_samples, 10, spec.seed, encode::FoldScheme::contiguous);
  encode::CrossvalOptions opts;
  opts.lambda = 1.0;
  const auto res_true = encode::crossval_encode(x_true, brain.data, folds, opts);
  const auto res_rand = encode::crossval_encode(x_rand, brain.data, folds, opts);

  // Ceiling computed here from the known signal and noise level.
  const Eigen::MatrixXd signal = x_true * w0;
  double ceiling = 0.0;
  for (Eigen::Index t = 0; t < signal.cols(); ++t) {
    const auto col = signal.col(t).array();
    const double var = (col - col.mean()).square().mean();
    ceiling += std::sqrt(var / (var + sigma * sigma));
  }
  ceiling /= static_cast<double>(signal.cols());
  const double lib_ceiling = synth::theoretical_ceiling(x_true, w0, sigma).mean();
  check.expect(std::abs(lib_ceiling - ceiling) <= 1e-12, "ceiling helper disagrees with oracle");

  const double mean_r = res_true.mean_r();
  check.expect(std::abs(mean_r - ceiling) <= 0.02, "mean r " + fmt(mean_r) + " vs ceiling " + fmt(ceiling));

  std::map<std::string, Eigen::VectorXd> scores = {{"TRUE", res_true.per_target_r}, {"RAND", res_rand.per_target_r}};
  std::vector<std::string> names;
  for (int t = 0; t < spec.n_targets; ++t) names.push_back(std::to_string(t));
  const auto labels = stats::label_voxels(scores, names);
  const auto wins = std::count(labels.winner.begin(), labels.winner.end(), "TRUE");
  const double share = static_cast<double>(wins) / spec.n_targets;
  check.expect(share >= 0.95, "winner share " + fmt(share));
  return check.outcome("mean r " + fmt(mean_r) + ", ceiling " + fmt(ceiling) + ", winner share " + fmt(share));
}

// ---------------------------------------------------------------------------
// 5. HRF

Outcome criterion_hrf() {
  Check check;
  const auto h = align::sample_hrf(0.01);
  Eigen::Index at = 0;
  h.maxCoeff(&at);
  const double peak = 0.01 * static_cast<double>(at);
  check.expect(peak >= 4.5 && peak <= 5.5, "peak at " + fmt(peak));

  std::mt19937 gen(505);
  align::FeatureSeries a;
  a.dt = 0.1;
  a.data = gaussian(gen, 600, 4);
  align::FeatureSeries b = a;
  b.data = gaussian(gen, 600, 4);
  align::FeatureSeries mix = a;
  mix.data = 2.5 * a.data - 0.75 * b.data;
  const Eigen::MatrixXd lin = align::convolve_hrf(mix) - (2.5 * align::convolve_hrf(a) - 0.75 * align::convolve_hrf(b));
  const double lin_err = lin.cwiseAbs().maxCoeff();
  check.expect(lin_err <= 1e-10, "linearity residual " + fmt(lin_err));

  align::FeatureSeries impulse;
  impulse.dt = 0.1;
  impulse.data = Eigen::MatrixXd::Zero(10, 1);
  impulse.data(0, 0) = 1.0;
  const auto y = align::convolve_hrf(impulse);
  const auto hs = align::sample_hrf(0.1);
  bool exact = true;
  for (Eigen::Index i = 0; i < hs.size(); ++i) exact = exact && y(i, 0) == hs(i);
  check.expect(exact, "impulse response differs from sampled kernel");
  return check.outcome("peak " + fmt(peak) + " s, linearity " + fmt(lin_err) + ", impulse exact");
}

// ---------------------------------------------------------------------------
// 6. Benjamini-Hochberg against a definition-literal implementation

Outcome criterion_bh() {
  Check check;
  std::mt19937 gen(606);
  std::uniform_int_distribution<int> len(1, 500);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<double> qs = {0.01, 0.05, 0.1, 0.2};
  for (int v = 0; v < 1000; ++v) {
    const auto m = static_cast<std::size_t>(len(gen));
    std::vector<double> p(m);
    const double signal_share = u(gen);
    for (auto& x : p) x = u(gen) < signal_share ? std::pow(u(gen), 4.0) * 0.01 : u(gen);

    // Rank of each p-value, ties broken by input position.
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a] < p[b]; });

    std::size_t prev_count = 0;
    for (double q : qs) {
      // Reject H_(i) iff some k >= i has p_(k) <= (k/m) q.
      std::vector<bool> naive_reject(m, false);
      std::vector<double> naive_adj(m, 1.0);
      for (std::size_t i = 1; i <= m; ++i) {
        bool reject = false;
        double adj = 1.0;
        for (std::size_t k = i; k <= m; ++k) {
          const double pk = p[order[k - 1]];
          reject = reject || pk <= static_cast<double>(k) / static_cast<double>(m) * q;
          adj = std::min(adj, static_cast<double>(m) / static_cast<double>(k) * pk);
        }
        naive_reject[order[i - 1]] = reject;
        naive_adj[order[i - 1]] = std::min(1.0, adj);
      }
      const auto r = stats::fdr_bh(p, q);
      check.expect(r.rejected == naive_reject, "vector " + std::to_string(v) + " rejection set differs");
      check.expect(r.adjusted == naive_adj, "vector " + std::to_string(v) + " adjusted p differs");
      const auto count = static_cast<std::size_t>(std::count(r.rejected.begin(), r.rejected.end(), true));
      check.expect(count >= prev_count, "vector " + std::to_string(v) + " not monotone in q");
      prev_count = count;
    }
  }
  return check.outcome("1000 vectors x 4 levels match exactly, monotone in q");
}

// ---------------------------------------------------------------------------
// 7. paired t-test

Outcome criterion_ttest() {
  Check check;
  const std::vector<double> d = {1, 2, 3, 4, 5};
  const std::vector<double> zero(5, 0.0);
  const auto r = stats::paired_ttest(d, zero);

  const double n = 5.0;
  const double mean = 3.0;
  double ss = 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  const double t_oracle = mean / (std::sqrt(ss / (n - 1)) / std::sqrt(n));
  const boost::math::students_t dist(n - 1);
  const double p_oracle = 2.0 * boost::math::cdf(boost::math::complement(dist, t_oracle));
  check.expect(std::abs(r.t - 4.2426) <= 1e-3 && std::abs(r.t - t_oracle) <= 1e-12, "t=" + fmt(r.t));
  check.expect(std::abs(r.p - 0.0132) <= 1e-3 && std::abs(r.p - p_oracle) <= 1e-10, "p=" + fmt(r.p));

  const auto flipped = stats::paired_ttest(zero, d);
  check.expect(flipped.t == -r.t && flipped.p == r.p, "not antisymmetric");
  const auto same = stats::paired_ttest(d, d);
  check.expect(same.t == 0.0 && same.p == 1.0, "identical inputs give t=" + fmt(same.t));
  return check.outcome("t " + fmt(r.t) + ", p " + fmt(r.p));
}

// ---------------------------------------------------------------------------
// 8. determinism of the CLI pipeline across thread counts

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), root);
    if (*rel.begin() == "manifests") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files[rel.generic_string()] = ss.str();
  }
  return files;
}

Outcome criterion_determinism() {
  Check check;
  const auto root = fs::temp_directory_path() / "cortexenc_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const auto config = root / "run.json";
  std::ofstream(config) << R"({
  "seed": 808,
  "synth": {"vocab_size": 120, "dim": 8, "n_samples": 200, "n_targets": 40, "n_tokens": 8000,
            "subjects": 3, "rois": 4},
  "lsm": {"dim": 16, "svd": "randomized"},
  "ntm": {"dim": 16, "neighbors": 8, "walks_per_node": 4, "walk_length": 20},
  "encode": {"K": 5}
})";
  const std::vector<std::string> stages = {"synth", "build-lsm", "build-ntm", "encode", "compare", "label-map"};
  std::map<int, std::map<std::string, std::string>> runs;
  for (int threads : {1, 8}) {
    const auto out = root / ("out_t" + std::to_string(threads));
    for (const auto& stage : stages) {
      cli::Invocation inv;
      inv.subcommand = stage;
      inv.config_path = config.string();
      inv.out_dir = out.string();
      inv.threads = threads;
      cli::run(inv);
    }
    runs[threads] = snapshot(out);
  }
  set_thread_count(1);
  const auto& a = runs[1];
  const auto& b = runs[8];
  check.expect(a.size() == b.size(), "artifact sets differ in size");
  check.expect(a.count("ntm/NTM.walks.txt") == 1, "NTM walks were not written");
  std::size_t bytes = 0;
  for (const auto& [name, content] : a) {
    const auto it = b.find(name);
    check.expect(it != b.end() && it->second == content, name + " differs");
    bytes += content.size();
  }
  fs::remove_all(root);
  return check.outcome(std::to_string(a.size()) + " artifacts (" + std::to_string(bytes) +
                       " bytes) identical at 1 and 8 threads");
}

// ---------------------------------------------------------------------------
// 9. NTM on two disconnected cliques

Outcome criterion_ntm_structure() {
  Check check;
  const int size = 6;
  reprs::SimilarityGraph g;
  g.adjacency.resize(2 * size);
  for (std::uint32_t i = 0; i < 2 * size; ++i) {
    g.nodes.push_back(i);
    for (std::uint32_t j = 0; j < 2 * size; ++j) {
      if (i != j && (i < size) == (j < size)) g.adjacency[i].push_back({j, 1.0});
    }
  }
  std::vector<std::string> words;
  for (int i = 0; i < 2 * size; ++i) words.push_back("n" + std::to_string(i));
  auto vocab = std::make_shared<const corpus::Vocabulary>(words);
  reprs::NtmOptions o;
  o.dim = 4;
  o.walks_per_node = 10;
  o.walk_length = 20;
  o.seed = 909;

  const auto walks = reprs::random_walks(g, o.walks_per_node, o.walk_length, o.seed);
  double cross = 0.0;
  for (const auto& walk : walks) {
    for (std::size_t i = 0; i < walk.size(); ++i) {
      for (std::size_t j = i + 1; j <= std::min(walk.size() - 1, i + static_cast<std::size_t>(o.window)); ++j) {
        if ((walk[i] < size) != (walk[j] < size)) cross += 1.0;
      }
    }
  }
  check.expect(cross == 0.0, "walks cross cliques");
  const auto cooc = reprs::walk_cooccurrences(walks, vocab, o.window);
  for (const auto& e : cooc.entries()) check.expect((e.row < size) == (e.col < size), "cross-clique count");

  const auto emb = reprs::build_ntm_from_graph(g, vocab, o);
  const auto cosine = [&](int a, int b) {
    return emb.data.row(a).dot(emb.data.row(b)) / (emb.data.row(a).norm() * emb.data.row(b).norm());
  };
  double min_within = 1.0;
  double max_cross = -1.0;
  for (int a = 0; a < 2 * size; ++a) {
    for (int b = a + 1; b < 2 * size; ++b) {
      if ((a < size) == (b < size)) min_within = std::min(min_within, cosine(a, b));
      else max_cross = std::max(max_cross, cosine(a, b));
    }
  }
  check.expect(min_within > max_cross, "within " + fmt(min_within) + " <= cross " + fmt(max_cross));
  return check.outcome("cross-clique co-occurrence 0, min within cosine " + fmt(min_within) +
                       " > max cross " + fmt(max_cross));
}

// ---------------------------------------------------------------------------
// 10. dimension contracts

Outcome criterion_dimensions() {
  Check check;
  std::mt19937 gen(1010);
  std::uniform_int_distribution<int> word(0, 399);
  corpus::Corpus corpus(1);
  for (int i = 0; i < 20000; ++i) corpus[0].push_back("w" + std::to_string(word(gen)));
  const auto lsm = reprs::build_lsm(corpus);
  check.expect(lsm.dim() == 300, "LSM dim " + std::to_string(lsm.dim()));

  reprs::NtmOptions ntm_opts;
  ntm_opts.neighbors = 10;
  ntm_opts.walks_per_node = 3;
  ntm_opts.walk_length = 20;
  const auto ntm = reprs::build_ntm(lsm, ntm_opts);
  check.expect(ntm.dim() == 300, "NTM dim " + std::to_string(ntm.dim()));

  reprs::SemanticNormTable norms;
  for (int i = 0; i < 10; ++i) {
    std::array<double, 6> r{};
    for (auto& x : r) x = std::uniform_real_distribution<double>(1, 5)(gen);
    norms.add("w" + std::to_string(i), r);
  }
  const auto ebm = reprs::build_ebm(norms, *lsm.vocab);
  check.expect(ebm.embedding.dim() == 6, "EBM dim " + std::to_string(ebm.embedding.dim()));

  for (int layers : {12, 24}) {
    std::vector<reprs::EmbeddingMatrix> src;
    auto vocab = std::make_shared<const corpus::Vocabulary>(std::vector<std::string>{"a", "b", "c"});
    for (int l = 0; l < layers; ++l) {
      reprs::EmbeddingMatrix e;
      e.vocab = vocab;
      e.data = Eigen::MatrixXd::Constant(3, 5, l);
      src.push_back(std::move(e));
    }
    const auto back = reprs::parse_per_layer_table(reprs::format_per_layer_table(src), "NLM");
    check.expect(static_cast<int>(back.size()) == layers,
                 std::to_string(layers) + "-layer import gave " + std::to_string(back.size()));
  }
  return check.outcome("LSM 300, NTM 300, EBM 6, imports 12 and 24 layers");
}

}  // namespace

int main() {
  set_thread_count(1);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"co-occurrence and PPMI oracle", criterion_cooccurrence},
      {"ridge correctness", criterion_ridge},
      {"Pearson unit values", criterion_pearson},
      {"end-to-end synthetic recovery", criterion_recovery},
      {"HRF sanity", criterion_hrf},
      {"BH-FDR oracle", criterion_bh},
      {"paired t-test", criterion_ttest},
      {"pipeline determinism", criterion_determinism},
      {"NTM clique structure", criterion_ntm_structure},
      {"dimension contracts", criterion_dimensions},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %zu (%s): %s [%.2f s]\n", out.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), out.detail.c_str(), secs);
    std::fflush(stdout);
    failed += out.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
