#include <cmath>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include <doctest.h>

#include <defembed.h>

#include "test_util.h"

namespace {

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(Handle&& other) noexcept : ptr(std::exchange(other.ptr, nullptr)) {}
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle& operator=(Handle&&) = delete;
  ~Handle() {
    if (ptr != nullptr) Free(ptr);
  }
};

using CorpusHandle = Handle<defembed_corpus, defembed_corpus_free>;
using ModelHandle = Handle<defembed_model, defembed_model_free>;
using ListHandle = Handle<defembed_neighbor_list, defembed_neighbor_list_free>;
using TraversalHandle = Handle<defembed_traversal, defembed_traversal_free>;

defembed_train_options tiny_options() {
  defembed_train_options opts;
  defembed_train_options_init(&opts);
  opts.epochs = 4;
  opts.batch_size = 32;
  opts.learning_rate = 0.5;
  opts.negatives = 4;
  opts.dim = 6;
  opts.seed = 11;
  return opts;
}

ModelHandle tiny_model(const CorpusHandle& corpus) {
  ModelHandle model;
  const defembed_train_options opts = tiny_options();
  REQUIRE(defembed_train(corpus.ptr, &opts, nullptr, nullptr, &model.ptr) ==
          DEFEMBED_OK);
  return model;
}

CorpusHandle toy_corpus() {
  CorpusHandle corpus;
  REQUIRE(defembed_corpus_load_triples(
              testutil::fixture("toy_tree.tsv").c_str(), &corpus.ptr) ==
          DEFEMBED_OK);
  return corpus;
}

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("train options initialise to the documented defaults") {
  defembed_train_options opts;
  std::memset(&opts, 0x5a, sizeof(opts));
  defembed_train_options_init(&opts);
  CHECK(opts.epochs == 300);
  CHECK(opts.batch_size == 128);
  CHECK(opts.learning_rate == 50.0);
  CHECK(opts.flat_learning_rate < 0.0);
  CHECK(opts.negatives == 50);
  CHECK(opts.seed == 1);
  CHECK(opts.geometry == DEFEMBED_GEOMETRY_HYPERBOLIC);
  CHECK(opts.dim == 40);
  CHECK(opts.curvature == 1.0);
  CHECK(opts.threads == 1);
  CHECK(opts.deterministic == 1);
}

TEST_CASE("corpus loading and extraction agree on the committed fixtures") {
  const CorpusHandle triples = toy_corpus();
  CHECK(defembed_corpus_vocab_size(triples.ptr) == 40);
  CHECK(defembed_corpus_triple_count(triples.ptr) == 79);

  CorpusHandle extracted;
  REQUIRE(defembed_corpus_extract(testutil::fixture("toy_defs.tsv").c_str(),
                                  nullptr, &extracted.ptr) == DEFEMBED_OK);
  CHECK(defembed_corpus_vocab_size(extracted.ptr) == 40);
  CHECK(defembed_corpus_triple_count(extracted.ptr) == 79);

  testutil::TempDir dir;
  const std::string out = dir.path() + "/saved.tsv";
  REQUIRE(defembed_corpus_save_triples(extracted.ptr, out.c_str()) ==
          DEFEMBED_OK);
  CHECK(testutil::slurp(out) ==
        testutil::slurp(testutil::fixture("toy_tree.tsv")));
}

TEST_CASE("training fires the epoch callback in order") {
  const CorpusHandle corpus = toy_corpus();
  defembed_train_options opts = tiny_options();

  std::vector<std::pair<int32_t, double>> seen;
  const auto hook = [](int32_t epoch, double loss, void* user) {
    static_cast<std::vector<std::pair<int32_t, double>>*>(user)->emplace_back(
        epoch, loss);
  };
  ModelHandle model;
  REQUIRE(defembed_train(corpus.ptr, &opts, hook, &seen, &model.ptr) ==
          DEFEMBED_OK);
  REQUIRE(seen.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(seen[i].first == i + 1);
    CHECK(std::isfinite(seen[i].second));
  }
  CHECK(defembed_model_geometry(model.ptr) == DEFEMBED_GEOMETRY_HYPERBOLIC);
  CHECK(defembed_model_dim(model.ptr) == 6);
  CHECK(defembed_model_curvature(model.ptr) == 1.0);
  CHECK(defembed_model_vocab_size(model.ptr) == 40);
}

TEST_CASE("model save and load round-trip through both formats") {
  const CorpusHandle corpus = toy_corpus();
  const ModelHandle model = tiny_model(corpus);
  testutil::TempDir dir;

  for (int text_format : {0, 1}) {
    const std::string path =
        dir.path() + (text_format ? "/m.txt" : "/m.bin");
    REQUIRE(defembed_model_save(model.ptr, path.c_str(), text_format) ==
            DEFEMBED_OK);
    ModelHandle back;
    REQUIRE(defembed_model_load(path.c_str(), &back.ptr) == DEFEMBED_OK);
    CHECK(defembed_model_vocab_size(back.ptr) == 40);

    std::vector<double> v1(6), v2(6);
    REQUIRE(defembed_model_word_vector(model.ptr, "dog", v1.data()) ==
            DEFEMBED_OK);
    REQUIRE(defembed_model_word_vector(back.ptr, "dog", v2.data()) ==
            DEFEMBED_OK);
    CHECK(v1 == v2);
  }
}

TEST_CASE("word lookups cover both directions") {
  const CorpusHandle corpus = toy_corpus();
  const ModelHandle model = tiny_model(corpus);

  const int id = defembed_model_word_id(model.ptr, "dog");
  CHECK(id >= 0);
  CHECK(std::string(defembed_model_word(model.ptr, (size_t)id)) == "dog");
  CHECK(defembed_model_word(model.ptr, 40) == nullptr);
  CHECK(defembed_model_word_id(model.ptr, "nosuch") == -1);

  double norm = -1.0;
  REQUIRE(defembed_model_word_norm(model.ptr, "dog", &norm) == DEFEMBED_OK);
  CHECK(norm >= 0.0);
  CHECK(norm < 1.0);

  std::vector<double> vec(6);
  REQUIRE(defembed_model_word_vector(model.ptr, "dog", vec.data()) ==
          DEFEMBED_OK);
  double acc = 0.0;
  for (double v : vec) acc += v * v;
  CHECK(std::abs(std::sqrt(acc) - norm) <= 1e-12);
}

TEST_CASE("similarity and evaluation work through the C surface") {
  const CorpusHandle corpus = toy_corpus();
  const ModelHandle model = tiny_model(corpus);

  double self = 1.0, cross = 1.0;
  REQUIRE(defembed_similarity(model.ptr, "dog", "dog", &self) == DEFEMBED_OK);
  REQUIRE(defembed_similarity(model.ptr, "dog", "oak", &cross) ==
          DEFEMBED_OK);
  CHECK(std::abs(self) <= 1e-12);  // negative self-distance
  CHECK(cross < 0.0);

  double rho = 2.0;
  int32_t scored = 0, skipped = -1;
  REQUIRE(defembed_evaluate(model.ptr,
                            testutil::fixture("toy_benchmark.tsv").c_str(),
                            &rho, &scored, &skipped) == DEFEMBED_OK);
  CHECK(rho >= -1.0);
  CHECK(rho <= 1.0);
  CHECK(scored == 20);
  CHECK(skipped == 0);
}

TEST_CASE("neighbor and traversal handles expose the rankings") {
  const CorpusHandle corpus = toy_corpus();
  const ModelHandle model = tiny_model(corpus);

  ListHandle list;
  REQUIRE(defembed_neighbors(model.ptr, "dog", 5, 1, &list.ptr) ==
          DEFEMBED_OK);
  REQUIRE(defembed_neighbor_count(list.ptr) == 5);
  CHECK(std::string(defembed_neighbor_word(list.ptr, 0)) == "dog");
  for (size_t i = 1; i < 5; ++i) {
    CHECK(defembed_neighbor_score(list.ptr, i - 1) >=
          defembed_neighbor_score(list.ptr, i));
  }

  ListHandle adjusted;
  REQUIRE(defembed_adjusted_neighbors(model.ptr, "dog", "supertype", 3, 0,
                                      &adjusted.ptr) == DEFEMBED_OK);
  CHECK(defembed_neighbor_count(adjusted.ptr) == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(std::string(defembed_neighbor_word(adjusted.ptr, i)) != "dog");
  }

  TraversalHandle tr;
  REQUIRE(defembed_traverse(model.ptr, "dog", "oak", 4, 2, &tr.ptr) ==
          DEFEMBED_OK);
  REQUIRE(defembed_traversal_count(tr.ptr) == 4);
  CHECK(defembed_traversal_t(tr.ptr, 0) == 0.0);
  CHECK(defembed_traversal_t(tr.ptr, 3) == 1.0);
  const defembed_neighbor_list* first = defembed_traversal_neighbors(tr.ptr, 0);
  REQUIRE(first != nullptr);
  CHECK(defembed_neighbor_count(first) == 2);
  CHECK(std::string(defembed_neighbor_word(first, 0)) == "dog");
}

TEST_CASE("oov approximation fills exactly dim coordinates") {
  const CorpusHandle corpus = toy_corpus();
  const ModelHandle model = tiny_model(corpus);

  const char* words[] = {"animal", "cat"};
  const char* roles[] = {"supertype", "differentia_quality"};
  std::vector<double> out(7, 123.0);
  REQUIRE(defembed_approximate_oov(model.ptr, words, roles, 2, 1, 0,
                                   out.data()) == DEFEMBED_OK);
  double norm = 0.0;
  for (int i = 0; i < 6; ++i) norm += out[i] * out[i];
  CHECK(std::sqrt(norm) < 1.0);  // inside the ball
  CHECK(out[6] == 123.0);        // nothing written past dim
}

TEST_CASE("the held-out experiment reports both pooling variants") {
  const CorpusHandle corpus = toy_corpus();
  defembed_train_options opts = tiny_options();
  opts.epochs = 6;

  const char* heldout[] = {"dog", "oak"};
  double mean_rho = 99.0, multi_rho = 99.0;
  int32_t n_held = -1, n_without = -1;
  REQUIRE(defembed_oov_experiment(
              corpus.ptr, testutil::fixture("toy_benchmark.tsv").c_str(),
              &opts, heldout, 2, 0, &mean_rho, &multi_rho, &n_held,
              &n_without) == DEFEMBED_OK);
  CHECK(n_held == 2);
  CHECK(n_without == 0);
  CHECK(mean_rho >= -1.0);
  CHECK(mean_rho <= 1.0);
  CHECK(multi_rho >= -1.0);
  CHECK(multi_rho <= 1.0);

  // An explicit empty held-out list means no pruning: the two variants
  // coincide with the standard evaluation.
  double a = 1.0, b = 2.0;
  REQUIRE(defembed_oov_experiment(
              corpus.ptr, testutil::fixture("toy_benchmark.tsv").c_str(),
              &opts, heldout, 0, 0, &a, &b, &n_held, &n_without) ==
          DEFEMBED_OK);
  CHECK(a == b);
  CHECK(n_held == 0);
}

TEST_CASE("defembed_run drives the full pipeline with overrides") {
  testutil::TempDir dir;
  const std::string model_out = dir.path() + "/run.bin";
  const std::string triples_override =
      "triples=" + testutil::fixture("toy_tree.tsv");
  const std::string model_override = "model_out=" + model_out;
  const char* overrides[] = {
      triples_override.c_str(), "epochs=3",          "dim=5",
      "learning_rate=0.5",      "negatives=4",       "seed=3",
      model_override.c_str(),
  };

  std::vector<std::string> lines;
  const auto log = [](const char* line, void* user) {
    static_cast<std::vector<std::string>*>(user)->emplace_back(line);
  };
  ModelHandle model;
  REQUIRE(defembed_run(nullptr, overrides, 7, log, &lines, &model.ptr) ==
          DEFEMBED_OK);
  CHECK(defembed_model_dim(model.ptr) == 5);
  CHECK(defembed_model_vocab_size(model.ptr) == 40);

  ModelHandle reloaded;
  CHECK(defembed_model_load(model_out.c_str(), &reloaded.ptr) == DEFEMBED_OK);

  bool saw_epoch = false;
  for (const auto& l : lines) {
    saw_epoch |= l.find("epoch") != std::string::npos;
  }
  CHECK(saw_epoch);
}

TEST_CASE("null arguments fail with a usage error and a message") {
  CHECK(defembed_corpus_load_triples(nullptr, nullptr) ==
        DEFEMBED_ERR_USAGE);
  CHECK(std::strlen(defembed_last_error()) > 0);

  const CorpusHandle corpus = toy_corpus();
  CHECK(defembed_train(corpus.ptr, nullptr, nullptr, nullptr, nullptr) ==
        DEFEMBED_ERR_USAGE);

  const ModelHandle model = tiny_model(corpus);
  double out = 0.0;
  CHECK(defembed_similarity(model.ptr, "dog", nullptr, &out) ==
        DEFEMBED_ERR_USAGE);
  CHECK(defembed_similarity(nullptr, "dog", "cat", &out) ==
        DEFEMBED_ERR_USAGE);
}

TEST_CASE("missing files map to the data status code") {
  defembed_corpus* corpus = nullptr;
  CHECK(defembed_corpus_load_triples("/nonexistent/x.tsv", &corpus) ==
        DEFEMBED_ERR_DATA);
  CHECK(corpus == nullptr);
  const std::string message = defembed_last_error();
  CHECK(message.find("x.tsv") != std::string::npos);

  defembed_model* model = nullptr;
  CHECK(defembed_model_load("/nonexistent/m.bin", &model) ==
        DEFEMBED_ERR_DATA);
  CHECK(model == nullptr);
}

TEST_CASE("unknown words surface as usage errors through the C API") {
  const CorpusHandle corpus = toy_corpus();
  const ModelHandle model = tiny_model(corpus);
  double out = 0.0;
  CHECK(defembed_similarity(model.ptr, "dog", "nosuchword", &out) ==
        DEFEMBED_ERR_USAGE);
  const std::string message = defembed_last_error();
  CHECK(message.find("nosuchword") != std::string::npos);
}

}  // TEST_SUITE
