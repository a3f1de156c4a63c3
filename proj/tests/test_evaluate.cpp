#include <cmath>
#include <random>

#include <doctest.h>

#include "error.h"
#include "evaluate.h"
#include "test_util.h"

using defembed::BenchmarkPair;
using defembed::Corpus;
using defembed::Model;
using defembed::ModelGeometry;
using defembed::OOVPooling;
using defembed::OOVSpec;
using defembed::Vec;
using defembed::Vocabulary;

namespace {

// Four words on the x-axis of the ball: distances from alpha strictly
// increase beta < gamma < delta, matching fixtures/unit_benchmark.tsv.
Model line_model_hyperbolic() {
  Model m = defembed::init_model(
      Vocabulary::from_words({"alpha", "beta", "gamma", "delta"}), 2,
      ModelGeometry::kHyperbolic, 1.0, 1);
  auto place = [&](const char* w, double x) {
    auto row = m.entity(m.vocab.id(w));
    row[0] = x;
    row[1] = 0.0;
  };
  place("alpha", 0.05);
  place("beta", 0.15);
  place("gamma", 0.35);
  place("delta", 0.60);
  return m;
}

// Same words as unit vectors at widening angles, for the cosine readout.
Model fan_model_euclidean() {
  Model m = defembed::init_model(
      Vocabulary::from_words({"alpha", "beta", "gamma", "delta"}), 2,
      ModelGeometry::kEuclidean, 1.0, 1);
  auto place = [&](const char* w, double degrees) {
    const double rad = degrees * M_PI / 180.0;
    auto row = m.entity(m.vocab.id(w));
    row[0] = std::cos(rad);
    row[1] = std::sin(rad);
  };
  place("alpha", 0.0);
  place("beta", 20.0);
  place("gamma", 50.0);
  place("delta", 110.0);
  return m;
}

}  // namespace

TEST_SUITE("evaluate") {

TEST_CASE("self-similarity attains the readout maximum") {
  const Model hy = line_model_hyperbolic();
  CHECK(std::abs(defembed::similarity(hy, "beta", "beta")) <= 1e-12);
  CHECK(defembed::similarity(hy, "beta", "gamma") < -1e-6);

  const Model eu = fan_model_euclidean();
  CHECK(std::abs(defembed::similarity(eu, "beta", "beta") - 1.0) <= 1e-12);
  CHECK(defembed::similarity(eu, "beta", "delta") < 1.0 - 1e-6);
}

TEST_CASE("similarity is symmetric") {
  for (const Model& m : {line_model_hyperbolic(), fan_model_euclidean()}) {
    CHECK(std::abs(defembed::similarity(m, "alpha", "delta") -
                   defembed::similarity(m, "delta", "alpha")) <= 1e-12);
  }
}

TEST_CASE("hyperbolic similarity is minus the geodesic distance") {
  // d(0, x) with |x| = 0.5 is 2 atanh(0.5) = 1.0986122886681098.
  Model m = line_model_hyperbolic();
  auto a = m.entity(m.vocab.id("alpha"));
  a[0] = 0.0;
  auto b = m.entity(m.vocab.id("beta"));
  b[0] = 0.5;
  CHECK(std::abs(defembed::similarity(m, "alpha", "beta") +
                 1.0986122886681098) <= 1e-12);
}

TEST_CASE("similarity rejects unknown words") {
  const Model m = line_model_hyperbolic();
  CHECK_THROWS_AS((void)defembed::similarity(m, "alpha", "omega"),
                  defembed::UsageError);
}

TEST_CASE("spearman hand values") {
  CHECK(defembed::spearman(std::vector<double>{1, 2, 3, 4},
                           std::vector<double>{1, 2, 3, 4}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(defembed::spearman(std::vector<double>{1, 2, 3, 4},
                           std::vector<double>{4, 3, 2, 1}) ==
        doctest::Approx(-1.0).epsilon(1e-12));
  // One adjacent transposition of three items: 1 - 6*2/(3*8) = 0.5.
  CHECK(defembed::spearman(std::vector<double>{1, 2, 3},
                           std::vector<double>{1, 3, 2}) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("spearman is invariant under monotone transforms") {
  std::mt19937_64 eng(71);
  for (int it = 0; it < 100; ++it) {
    const Vec x = testutil::random_vec(eng, 20, 10.0);
    const Vec y = testutil::random_vec(eng, 20, 10.0);
    Vec tx(20);
    for (int i = 0; i < 20; ++i) tx[i] = std::exp(0.3 * x[i]) + 5.0;
    CHECK(std::abs(defembed::spearman(x, y) - defembed::spearman(tx, y)) <=
          1e-12);
    CHECK(defembed::spearman(x, tx) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("spearman handles ties by average rank") {
  // pred [1, 1, 2] -> ranks [1.5, 1.5, 3]; gold [1, 2, 3] -> [1, 2, 3].
  // Pearson of those rank vectors is sqrt(3)/2.
  CHECK(defembed::spearman(std::vector<double>{1, 1, 2},
                           std::vector<double>{1, 2, 3}) ==
        doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("spearman rejects degenerate input") {
  CHECK_THROWS_AS(
      (void)defembed::spearman(std::vector<double>{1.0},
                               std::vector<double>{1.0}),
      defembed::UsageError);
  CHECK_THROWS_AS((void)defembed::spearman(std::vector<double>{1, 2},
                                           std::vector<double>{1, 2, 3}),
                  defembed::UsageError);
  CHECK_THROWS_WITH_AS(
      (void)defembed::spearman(std::vector<double>{2, 2, 2},
                               std::vector<double>{1, 2, 3}),
      doctest::Contains("constant"), defembed::NumericError);
}

TEST_CASE("hand-built states score the unit benchmark at rho = 1") {
  const auto pairs =
      defembed::load_benchmark(testutil::fixture("unit_benchmark.tsv"));
  for (const Model& m : {line_model_hyperbolic(), fan_model_euclidean()}) {
    const auto report = defembed::evaluate_benchmark(m, pairs, "unit");
    CHECK(report.spearman == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.pairs_scored == 5);
    CHECK(report.pairs_skipped_oov == 0);
  }
}

TEST_CASE("out-of-vocabulary pairs are skipped and counted") {
  const Model m = line_model_hyperbolic();
  std::vector<BenchmarkPair> pairs = {
      {"alpha", "beta", 3.0},  {"alpha", "gamma", 2.0},
      {"alpha", "omega", 9.0},  // unknown word
      {"zeta", "omega", 1.0},   // both unknown
  };
  const auto report = defembed::evaluate_benchmark(m, pairs, "mixed");
  CHECK(report.pairs_total == 4);
  CHECK(report.pairs_scored == 2);
  CHECK(report.pairs_skipped_oov == 2);
  CHECK(report.pairs_scored + report.pairs_skipped_oov == report.pairs_total);
}

TEST_CASE("a benchmark with fewer than two scorable pairs is a data error") {
  const Model m = line_model_hyperbolic();
  const std::vector<BenchmarkPair> pairs = {
      {"alpha", "omega", 9.0},
      {"zeta", "beta", 1.0},
  };
  CHECK_THROWS_WITH_AS((void)defembed::evaluate_benchmark(m, pairs, "oov"),
                       doctest::Contains("skipped 2"), defembed::DataError);
}

TEST_CASE("single euclidean evidence reduces to word plus translation") {
  Model m = fan_model_euclidean();
  m.relations[0].translation = {0.25, -0.5};
  const OOVSpec spec{"newword", {{"beta", "supertype"}}};
  const Vec got = defembed::approximate_oov(m, spec, true);
  const auto beta = m.entity(m.vocab.id("beta"));
  CHECK(got[0] == beta[0] + 0.25);
  CHECK(got[1] == beta[1] - 0.5);
}

TEST_CASE("the worked two-evidence euclidean example") {
  // e(dog) from [(carnivorous, supertype), (snout, differentia_quality)]
  // equals mean of the two word vectors plus mean of the two role vectors.
  Model m = defembed::init_model(
      Vocabulary::from_words({"carnivorous", "snout"}), 2,
      ModelGeometry::kEuclidean, 1.0, 3);
  auto carn = m.entity(m.vocab.id("carnivorous"));
  carn[0] = 1.0;
  carn[1] = 0.0;
  auto snout = m.entity(m.vocab.id("snout"));
  snout[0] = 0.0;
  snout[1] = 2.0;
  m.relations[0].translation = {0.4, 0.0};   // supertype
  m.relations[1].translation = {0.0, -0.2};  // differentia_quality
  const OOVSpec spec{
      "dog",
      {{"carnivorous", "supertype"}, {"snout", "differentia_quality"}}};
  const Vec got = defembed::approximate_oov(m, spec, true);
  CHECK(got[0] == doctest::Approx(0.5 + 0.2).epsilon(1e-15));
  CHECK(got[1] == doctest::Approx(1.0 - 0.1).epsilon(1e-15));
}

TEST_CASE("zero role translations reduce to plain mean pooling") {
  for (auto g : {ModelGeometry::kEuclidean, ModelGeometry::kHyperbolic}) {
    std::mt19937_64 eng(81);
    Model m = defembed::init_model(
        Vocabulary::from_words({"a", "b", "c"}), 3, g, 1.0, 4);
    for (int id = 0; id < 3; ++id) {
      const Vec p = testutil::random_ball_point(eng, 3, 1.0, 0.5);
      std::copy(p.begin(), p.end(), m.entity(id).begin());
    }
    // init_model already has all-zero translations.
    const OOVSpec spec{"x", {{"a", "supertype"}, {"b", "purpose"}}};
    const Vec with = defembed::approximate_oov(m, spec, true);
    const Vec without = defembed::approximate_oov(m, spec, false);
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(with[i] - without[i]) <= 1e-15);
    }
  }
}

TEST_CASE("hyperbolic pooling happens in the tangent space") {
  std::mt19937_64 eng(82);
  Model m = defembed::init_model(Vocabulary::from_words({"a", "b"}), 3,
                                 ModelGeometry::kHyperbolic, 1.0, 5);
  for (int id = 0; id < 2; ++id) {
    const Vec p = testutil::random_ball_point(eng, 3, 1.0, 0.6);
    std::copy(p.begin(), p.end(), m.entity(id).begin());
  }
  m.relations[0].translation = testutil::random_ball_point(eng, 3, 1.0, 0.3);
  m.relations[5].translation = testutil::random_ball_point(eng, 3, 1.0, 0.3);
  const OOVSpec spec{"x", {{"a", "supertype"}, {"b", "origin_location"}}};

  Vec tangent(3, 0.0);
  for (const auto& [w, r] : std::vector<std::pair<const char*, int>>{
           {"a", 0}, {"b", 5}}) {
    const Vec lw = defembed::geo::log0(m.entity(m.vocab.id(w)), 1.0);
    const Vec lr = defembed::geo::log0(m.relations[r].translation, 1.0);
    for (int i = 0; i < 3; ++i) tangent[i] += 0.5 * (lw[i] + lr[i]);
  }
  const Vec expected = defembed::geo::exp0(tangent, 1.0);
  const Vec got = defembed::approximate_oov(m, spec, true);
  for (int i = 0; i < 3; ++i) {
    CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }

  const Vec mobius = defembed::approximate_oov(
      m, spec, true, OOVPooling::kMobiusTranslate);
  double diff = 0.0;
  for (int i = 0; i < 3; ++i) diff += std::abs(mobius[i] - got[i]);
  CHECK(diff > 0.0);  // the two pooling variants genuinely differ
}

TEST_CASE("oov approximation validates its inputs") {
  const Model m = fan_model_euclidean();
  CHECK_THROWS_AS(
      (void)defembed::approximate_oov(m, OOVSpec{"x", {}}, true),
      defembed::UsageError);
  CHECK_THROWS_AS((void)defembed::approximate_oov(
                      m, OOVSpec{"x", {{"nosuch", "supertype"}}}, true),
                  defembed::UsageError);
  CHECK_THROWS_AS((void)defembed::approximate_oov(
                      m, OOVSpec{"x", {{"alpha", "nosuchrole"}}}, true),
                  defembed::UsageError);
}

TEST_CASE("benchmark_words collects both columns") {
  const std::vector<BenchmarkPair> pairs = {{"dog", "cat", 1.0},
                                            {"dog", "wolf", 2.0}};
  const auto words = defembed::benchmark_words(pairs);
  CHECK(words.size() == 3);
  CHECK(words.contains("dog"));
  CHECK(words.contains("wolf"));
}

TEST_CASE("oov experiment with an empty held-out set equals standard eval") {
  const Corpus corpus =
      defembed::load_triples_tsv(testutil::fixture("toy_tree.tsv"));
  const auto pairs =
      defembed::load_benchmark(testutil::fixture("toy_benchmark.tsv"));
  defembed::TrainConfig config;
  config.dim = 6;
  config.epochs = 5;
  config.learning_rate = 1.0;
  config.negatives_per_positive = 5;
  config.seed = 3;

  const auto result = defembed::oov_experiment(corpus, pairs, config, {});
  const Model reference = defembed::fit(corpus, config);
  const auto standard =
      defembed::evaluate_benchmark(reference, pairs, "standard");

  CHECK(result.mean_pooling.spearman == standard.spearman);
  CHECK(result.multi_relational.spearman == standard.spearman);
  CHECK(result.gain == 0.0);
  CHECK(result.words_heldout == 0);
  CHECK(result.words_without_evidence == 0);
}

}  // TEST_SUITE
