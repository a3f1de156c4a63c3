// C ABI over the C++ core. Exceptions stop here: every entry point catches,
// records the message in a thread-local slot and returns the status code.

#include "defembed.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "error.h"
#include "evaluate.h"
#include "ingest.h"
#include "model.h"
#include "pipeline.h"
#include "query.h"
#include "serialize.h"
#include "trainer.h"

struct defembed_corpus {
  defembed::Corpus value;
};

struct defembed_model {
  defembed::Model value;
};

struct defembed_neighbor_list {
  defembed::NeighborList value;
};

struct defembed_traversal {
  std::vector<double> ts;
  std::vector<defembed_neighbor_list> lists;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return DEFEMBED_OK;
  } catch (const defembed::Error& e) {
    g_last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DEFEMBED_ERR_NUMERIC;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DEFEMBED_ERR_NUMERIC;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw defembed::UsageError(std::string("null argument: ") + what);
}

defembed::TrainConfig to_train_config(const defembed_train_options* opts) {
  require(opts != nullptr, "options");
  defembed::TrainConfig c;
  c.epochs = opts->epochs;
  c.batch_size = opts->batch_size;
  c.learning_rate = opts->learning_rate;
  if (opts->flat_learning_rate >= 0.0) {
    c.flat_learning_rate = opts->flat_learning_rate;
  }
  c.negatives_per_positive = opts->negatives;
  c.seed = opts->seed;
  switch (opts->geometry) {
    case DEFEMBED_GEOMETRY_EUCLIDEAN:
      c.geometry = defembed::ModelGeometry::kEuclidean;
      break;
    case DEFEMBED_GEOMETRY_HYPERBOLIC:
      c.geometry = defembed::ModelGeometry::kHyperbolic;
      break;
    default:
      throw defembed::UsageError("unknown geometry tag " +
                                 std::to_string(opts->geometry));
  }
  c.dim = opts->dim;
  c.curvature = opts->curvature;
  c.threads = opts->threads;
  c.deterministic = opts->deterministic != 0;
  return c;
}

defembed_neighbor_list wrap_list(defembed::NeighborList list) {
  return defembed_neighbor_list{std::move(list)};
}

}  // namespace

extern "C" {

const char* defembed_last_error(void) { return g_last_error.c_str(); }

/* ---------- corpus ------------------------------------------------------ */

int defembed_corpus_load_triples(const char* path, defembed_corpus** out) {
  return guarded([&] {
    require(path && out, "path/out");
    auto handle = new defembed_corpus{defembed::load_triples_tsv(path)};
    *out = handle;
  });
}

int defembed_corpus_extract(const char* defs_path, const char* stopwords_path,
                            defembed_corpus** out) {
  return guarded([&] {
    require(defs_path && out, "defs_path/out");
    const defembed::StopwordSet stopwords =
        stopwords_path ? defembed::load_stopwords(stopwords_path)
                       : defembed::default_stopwords();
    auto handle = new defembed_corpus{defembed::extract_triples(
        defembed::load_definitions(defs_path), stopwords)};
    *out = handle;
  });
}

int defembed_corpus_save_triples(const defembed_corpus* corpus,
                                 const char* path) {
  return guarded([&] {
    require(corpus && path, "corpus/path");
    defembed::save_triples_tsv(corpus->value, path);
  });
}

size_t defembed_corpus_vocab_size(const defembed_corpus* corpus) {
  return corpus ? static_cast<size_t>(corpus->value.vocab.size()) : 0;
}

size_t defembed_corpus_triple_count(const defembed_corpus* corpus) {
  return corpus ? corpus->value.triples.size() : 0;
}

void defembed_corpus_free(defembed_corpus* corpus) { delete corpus; }

/* ---------- training ---------------------------------------------------- */

void defembed_train_options_init(defembed_train_options* opts) {
  if (!opts) return;
  const defembed::TrainConfig d;
  opts->epochs = d.epochs;
  opts->batch_size = d.batch_size;
  opts->learning_rate = d.learning_rate;
  opts->flat_learning_rate = -1.0;
  opts->negatives = d.negatives_per_positive;
  opts->seed = d.seed;
  opts->geometry = d.geometry == defembed::ModelGeometry::kEuclidean
                       ? DEFEMBED_GEOMETRY_EUCLIDEAN
                       : DEFEMBED_GEOMETRY_HYPERBOLIC;
  opts->dim = d.dim;
  opts->curvature = d.curvature;
  opts->threads = d.threads;
  opts->deterministic = d.deterministic ? 1 : 0;
}

int defembed_train(const defembed_corpus* corpus,
                   const defembed_train_options* opts,
                   defembed_epoch_callback callback, void* user_data,
                   defembed_model** out) {
  return guarded([&] {
    require(corpus && out, "corpus/out");
    const defembed::TrainConfig config = to_train_config(opts);
    defembed::EpochHook hook;
    if (callback) {
      hook = [callback, user_data](const defembed::EpochStats& stats,
                                   const defembed::Model&) {
        callback(stats.epoch, stats.mean_loss, user_data);
      };
    }
    auto handle =
        new defembed_model{defembed::fit(corpus->value, config, hook)};
    *out = handle;
  });
}

int defembed_run(const char* config_path, const char* const* overrides,
                 size_t n_overrides, defembed_log_callback log,
                 void* log_user_data, defembed_model** out_model) {
  return guarded([&] {
    std::vector<std::string> override_strings;
    for (size_t i = 0; i < n_overrides; ++i) {
      require(overrides && overrides[i], "overrides");
      override_strings.emplace_back(overrides[i]);
    }
    const defembed::RunConfig config = defembed::RunConfig::parse(
        config_path ? config_path : "", override_strings);
    defembed::Diagnostic diag;
    if (log) {
      diag = [log, log_user_data](const std::string& line) {
        log(line.c_str(), log_user_data);
      };
    }
    defembed::RunResult result = defembed::run(config, diag);
    if (out_model) {
      *out_model = new defembed_model{std::move(result.model)};
    }
  });
}

/* ---------- model ------------------------------------------------------- */

int defembed_model_load(const char* path, defembed_model** out) {
  return guarded([&] {
    require(path && out, "path/out");
    auto handle = new defembed_model{defembed::load_model(path)};
    *out = handle;
  });
}

int defembed_model_save(const defembed_model* model, const char* path,
                        int text_format) {
  return guarded([&] {
    require(model && path, "model/path");
    defembed::save_model(model->value, path,
                         text_format ? defembed::SaveMode::kText
                                     : defembed::SaveMode::kBinary);
  });
}

void defembed_model_free(defembed_model* model) { delete model; }

int defembed_model_geometry(const defembed_model* model) {
  if (!model) return -1;
  return model->value.geometry == defembed::ModelGeometry::kEuclidean
             ? DEFEMBED_GEOMETRY_EUCLIDEAN
             : DEFEMBED_GEOMETRY_HYPERBOLIC;
}

int defembed_model_dim(const defembed_model* model) {
  return model ? model->value.dim : -1;
}

double defembed_model_curvature(const defembed_model* model) {
  return model ? model->value.curvature : 0.0;
}

size_t defembed_model_vocab_size(const defembed_model* model) {
  return model ? static_cast<size_t>(model->value.vocab.size()) : 0;
}

const char* defembed_model_word(const defembed_model* model, size_t id) {
  if (!model || id >= static_cast<size_t>(model->value.vocab.size())) {
    return nullptr;
  }
  return model->value.vocab.word(static_cast<int>(id)).c_str();
}

int defembed_model_word_id(const defembed_model* model, const char* word) {
  if (!model || !word) return -1;
  return model->value.vocab.id(word);
}

int defembed_model_word_vector(const defembed_model* model, const char* word,
                               double* out) {
  return guarded([&] {
    require(model && word && out, "model/word/out");
    const int id = model->value.vocab.id(word);
    if (id < 0) {
      throw defembed::UsageError(std::string("unknown word: ") + word);
    }
    const auto coords = model->value.entity(id);
    std::copy(coords.begin(), coords.end(), out);
  });
}

int defembed_model_word_norm(const defembed_model* model, const char* word,
                             double* out) {
  return guarded([&] {
    require(model && word && out, "model/word/out");
    const int id = model->value.vocab.id(word);
    if (id < 0) {
      throw defembed::UsageError(std::string("unknown word: ") + word);
    }
    *out = model->value.entity_norm(id);
  });
}

int defembed_similarity(const defembed_model* model, const char* w1,
                        const char* w2, double* out) {
  return guarded([&] {
    require(model && w1 && w2 && out, "model/w1/w2/out");
    *out = defembed::similarity(model->value, w1, w2);
  });
}

int defembed_evaluate(const defembed_model* model, const char* benchmark_path,
                      double* spearman, int32_t* pairs_scored,
                      int32_t* pairs_skipped) {
  return guarded([&] {
    require(model && benchmark_path && spearman, "model/benchmark/spearman");
    const defembed::EvalReport report = defembed::evaluate_benchmark(
        model->value, defembed::load_benchmark(benchmark_path));
    *spearman = report.spearman;
    if (pairs_scored) *pairs_scored = report.pairs_scored;
    if (pairs_skipped) *pairs_skipped = report.pairs_skipped_oov;
  });
}

/* ---------- queries ----------------------------------------------------- */

int defembed_neighbors(const defembed_model* model, const char* word,
                       int32_t k, int include_self,
                       defembed_neighbor_list** out) {
  return guarded([&] {
    require(model && word && out, "model/word/out");
    *out = new defembed_neighbor_list{wrap_list(defembed::nearest_neighbors(
        model->value, word, k, include_self != 0))};
  });
}

int defembed_adjusted_neighbors(const defembed_model* model, const char* word,
                                const char* role, int32_t k, int include_self,
                                defembed_neighbor_list** out) {
  return guarded([&] {
    require(model && word && role && out, "model/word/role/out");
    *out = new defembed_neighbor_list{
        wrap_list(defembed::relation_adjusted_neighbors(
            model->value, word, role, k, include_self != 0))};
  });
}

size_t defembed_neighbor_count(const defembed_neighbor_list* list) {
  return list ? list->value.entries.size() : 0;
}

const char* defembed_neighbor_word(const defembed_neighbor_list* list,
                                   size_t i) {
  if (!list || i >= list->value.entries.size()) return nullptr;
  return list->value.entries[i].word.c_str();
}

double defembed_neighbor_score(const defembed_neighbor_list* list, size_t i) {
  if (!list || i >= list->value.entries.size()) return 0.0;
  return list->value.entries[i].score;
}

void defembed_neighbor_list_free(defembed_neighbor_list* list) {
  delete list;
}

int defembed_traverse(const defembed_model* model, const char* w1,
                      const char* w2, int32_t n_points, int32_t k,
                      defembed_traversal** out) {
  return guarded([&] {
    require(model && w1 && w2 && out, "model/w1/w2/out");
    std::vector<defembed::TraversalPoint> points =
        defembed::traverse(model->value, w1, w2, n_points, k);
    auto handle = new defembed_traversal;
    handle->ts.reserve(points.size());
    handle->lists.reserve(points.size());
    for (auto& p : points) {
      handle->ts.push_back(p.t);
      handle->lists.push_back(wrap_list(std::move(p.neighbors)));
    }
    *out = handle;
  });
}

size_t defembed_traversal_count(const defembed_traversal* tr) {
  return tr ? tr->ts.size() : 0;
}

double defembed_traversal_t(const defembed_traversal* tr, size_t i) {
  if (!tr || i >= tr->ts.size()) return 0.0;
  return tr->ts[i];
}

const defembed_neighbor_list* defembed_traversal_neighbors(
    const defembed_traversal* tr, size_t i) {
  if (!tr || i >= tr->lists.size()) return nullptr;
  return &tr->lists[i];
}

void defembed_traversal_free(defembed_traversal* tr) { delete tr; }

/* ---------- out-of-vocabulary approximation ----------------------------- */

int defembed_approximate_oov(const defembed_model* model,
                             const char* const* evidence_words,
                             const char* const* evidence_roles,
                             size_t n_evidence, int use_relations,
                             int mobius_pooling, double* out) {
  return guarded([&] {
    require(model && out, "model/out");
    require(n_evidence == 0 || (evidence_words && evidence_roles),
            "evidence arrays");
    defembed::OOVSpec spec;
    spec.target = "oov";
    for (size_t i = 0; i < n_evidence; ++i) {
      require(evidence_words[i] && evidence_roles[i], "evidence entry");
      spec.evidence.emplace_back(evidence_words[i], evidence_roles[i]);
    }
    const defembed::Vec point = defembed::approximate_oov(
        model->value, spec, use_relations != 0,
        mobius_pooling ? defembed::OOVPooling::kMobiusTranslate
                       : defembed::OOVPooling::kTangentMean);
    std::copy(point.begin(), point.end(), out);
  });
}

int defembed_oov_experiment(const defembed_corpus* corpus,
                            const char* benchmark_path,
                            const defembed_train_options* opts,
                            const char* const* heldout_words,
                            size_t n_heldout, int mobius_pooling,
                            double* mean_pooling_spearman,
                            double* multi_relational_spearman,
                            int32_t* words_heldout,
                            int32_t* words_without_evidence) {
  return guarded([&] {
    require(corpus && benchmark_path && mean_pooling_spearman &&
                multi_relational_spearman,
            "corpus/benchmark/out");
    const defembed::TrainConfig config = to_train_config(opts);
    const std::vector<defembed::BenchmarkPair> pairs =
        defembed::load_benchmark(benchmark_path);
    std::unordered_set<std::string> heldout;
    if (heldout_words == nullptr) {
      heldout = defembed::benchmark_words(pairs);
    } else {
      for (size_t i = 0; i < n_heldout; ++i) {
        require(heldout_words[i] != nullptr, "heldout entry");
        heldout.insert(defembed::to_lower(heldout_words[i]));
      }
    }
    const defembed::OOVExperimentResult result = defembed::oov_experiment(
        corpus->value, pairs, config, heldout,
        mobius_pooling ? defembed::OOVPooling::kMobiusTranslate
                       : defembed::OOVPooling::kTangentMean);
    *mean_pooling_spearman = result.mean_pooling.spearman;
    *multi_relational_spearman = result.multi_relational.spearman;
    if (words_heldout) *words_heldout = result.words_heldout;
    if (words_without_evidence) {
      *words_without_evidence = result.words_without_evidence;
    }
  });
}

}  // extern "C"
