/* defembed: multi-relational word embeddings learned from semantic-role
 * annotated dictionary definitions, in euclidean or hyperbolic
 * (Poincare-ball) geometry.
 *
 * C interface to the shared library. Every function that can fail returns a
 * status code; out-parameters are written only on success. Handles are
 * opaque and must be released with the matching *_free function. Handle
 * reads are thread-safe; a handle must not be freed while in use.
 */
#ifndef DEFEMBED_H
#define DEFEMBED_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes (also the CLI exit codes). */
#define DEFEMBED_OK 0
#define DEFEMBED_ERR_USAGE 1   /* bad arguments or configuration */
#define DEFEMBED_ERR_DATA 2    /* unreadable, malformed or empty input */
#define DEFEMBED_ERR_NUMERIC 3 /* numerical or internal failure */

/* Message for the most recent failing call on the calling thread. Valid
 * until that thread's next defembed call. */
const char* defembed_last_error(void);

#define DEFEMBED_GEOMETRY_EUCLIDEAN 0
#define DEFEMBED_GEOMETRY_HYPERBOLIC 1

typedef struct defembed_corpus defembed_corpus;
typedef struct defembed_model defembed_model;
typedef struct defembed_neighbor_list defembed_neighbor_list;
typedef struct defembed_traversal defembed_traversal;

/* ---------- corpus ------------------------------------------------------ */

/* Loads subject<TAB>role<TAB>object triples. */
int defembed_corpus_load_triples(const char* path, defembed_corpus** out);

/* Extracts triples from annotated definitions
 * (definiendum<TAB>token|ROLE token|ROLE ...). `stopwords_path` may be NULL
 * for the built-in stop-word list. */
int defembed_corpus_extract(const char* defs_path, const char* stopwords_path,
                            defembed_corpus** out);

int defembed_corpus_save_triples(const defembed_corpus* corpus,
                                 const char* path);
size_t defembed_corpus_vocab_size(const defembed_corpus* corpus);
size_t defembed_corpus_triple_count(const defembed_corpus* corpus);
void defembed_corpus_free(defembed_corpus* corpus);

/* ---------- training ---------------------------------------------------- */

typedef struct {
  int32_t epochs;            /* default 300 */
  int32_t batch_size;        /* default 128 */
  double learning_rate;      /* default 50 */
  double flat_learning_rate; /* < 0: follow learning_rate (default) */
  int32_t negatives;         /* negatives per positive, default 50 */
  uint64_t seed;             /* default 1 */
  int32_t geometry;          /* DEFEMBED_GEOMETRY_*, default hyperbolic */
  int32_t dim;               /* default 40 */
  double curvature;          /* default 1.0 */
  int32_t threads;           /* default 1 */
  int32_t deterministic;     /* nonzero forces threads = 1, default 1 */
} defembed_train_options;

/* Fills `opts` with the defaults above. */
void defembed_train_options_init(defembed_train_options* opts);

/* Called after each epoch (1-based) with the mean batch loss. */
typedef void (*defembed_epoch_callback)(int32_t epoch, double mean_loss,
                                        void* user_data);

int defembed_train(const defembed_corpus* corpus,
                   const defembed_train_options* opts,
                   defembed_epoch_callback callback, void* user_data,
                   defembed_model** out);

/* Receives one human-readable progress line per event. */
typedef void (*defembed_log_callback)(const char* line, void* user_data);

/* Runs the whole configured pipeline (ingest, train, save, evaluate) from a
 * key=value config file plus "key=value" override strings; overrides win.
 * Either `config_path` or `overrides` may be NULL/empty as long as the
 * combination describes a complete run. `log` may be NULL. On success the
 * trained model is stored in *out_model when out_model is non-NULL. */
int defembed_run(const char* config_path, const char* const* overrides,
                 size_t n_overrides, defembed_log_callback log,
                 void* log_user_data, defembed_model** out_model);

/* ---------- model ------------------------------------------------------- */

int defembed_model_load(const char* path, defembed_model** out);
/* text_format nonzero writes the human-readable format, else binary. */
int defembed_model_save(const defembed_model* model, const char* path,
                        int text_format);
void defembed_model_free(defembed_model* model);

int defembed_model_geometry(const defembed_model* model);
int defembed_model_dim(const defembed_model* model);
double defembed_model_curvature(const defembed_model* model);
size_t defembed_model_vocab_size(const defembed_model* model);
/* NULL when id is out of range; pointer valid for the handle's lifetime. */
const char* defembed_model_word(const defembed_model* model, size_t id);
/* -1 when the word is unknown. */
int defembed_model_word_id(const defembed_model* model, const char* word);
/* Copies the word's dim coordinates into out. */
int defembed_model_word_vector(const defembed_model* model, const char* word,
                               double* out);
int defembed_model_word_norm(const defembed_model* model, const char* word,
                             double* out);

/* Geometry-native similarity: negative Poincare distance (hyperbolic) or
 * cosine (euclidean). */
int defembed_similarity(const defembed_model* model, const char* w1,
                        const char* w2, double* out);

/* Spearman correlation against word1<TAB>word2<TAB>score pairs. Pairs with
 * an out-of-vocabulary word are skipped and counted. */
int defembed_evaluate(const defembed_model* model, const char* benchmark_path,
                      double* spearman, int32_t* pairs_scored,
                      int32_t* pairs_skipped);

/* ---------- queries ----------------------------------------------------- */

/* k nearest vocabulary entries by geometry distance. include_self = 0 drops
 * the query word itself from the candidates. */
int defembed_neighbors(const defembed_model* model, const char* word,
                       int32_t k, int include_self,
                       defembed_neighbor_list** out);

/* Candidates ranked by the bias-free relational score of
 * (word, role, candidate). */
int defembed_adjusted_neighbors(const defembed_model* model, const char* word,
                                const char* role, int32_t k, int include_self,
                                defembed_neighbor_list** out);

size_t defembed_neighbor_count(const defembed_neighbor_list* list);
const char* defembed_neighbor_word(const defembed_neighbor_list* list,
                                   size_t i);
double defembed_neighbor_score(const defembed_neighbor_list* list, size_t i);
void defembed_neighbor_list_free(defembed_neighbor_list* list);

/* n_points samples along the path from w1 to w2 (geodesic in the hyperbolic
 * model, straight line in the euclidean one), each with its k nearest
 * vocabulary entries. */
int defembed_traverse(const defembed_model* model, const char* w1,
                      const char* w2, int32_t n_points, int32_t k,
                      defembed_traversal** out);

size_t defembed_traversal_count(const defembed_traversal* tr);
double defembed_traversal_t(const defembed_traversal* tr, size_t i);
/* Borrowed pointer, owned by the traversal; do not free. */
const defembed_neighbor_list* defembed_traversal_neighbors(
    const defembed_traversal* tr, size_t i);
void defembed_traversal_free(defembed_traversal* tr);

/* ---------- out-of-vocabulary approximation ----------------------------- */

/* One-shot embedding for an unseen word from (definiens word, role) evidence
 * pairs, written as dim coordinates into out. use_relations = 0 gives the
 * bare mean-pooling baseline; mobius_pooling nonzero translates the pooled
 * word point by the pooled role vector instead of averaging in the tangent
 * space. */
int defembed_approximate_oov(const defembed_model* model,
                             const char* const* evidence_words,
                             const char* const* evidence_roles,
                             size_t n_evidence, int use_relations,
                             int mobius_pooling, double* out);

/* Held-out retraining experiment: prunes `heldout_words` from the corpus,
 * retrains, approximates the held-out words from their definition triples
 * and evaluates the benchmark with mean pooling vs. role-aware pooling.
 * heldout_words == NULL means "every word in the benchmark"; an explicit
 * empty list means no pruning (both results equal the standard eval). */
int defembed_oov_experiment(const defembed_corpus* corpus,
                            const char* benchmark_path,
                            const defembed_train_options* opts,
                            const char* const* heldout_words,
                            size_t n_heldout, int mobius_pooling,
                            double* mean_pooling_spearman,
                            double* multi_relational_spearman,
                            int32_t* words_heldout,
                            int32_t* words_without_evidence);

#ifdef __cplusplus
}
#endif

#endif /* DEFEMBED_H */
