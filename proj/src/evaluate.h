#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "ingest.h"
#include "model.h"
#include "trainer.h"

namespace defembed {

struct EvalReport {
  std::string benchmark;
  double spearman = 0.0;
  int pairs_total = 0;
  int pairs_scored = 0;
  int pairs_skipped_oov = 0;
};

// Similarity readout per geometry: negative Poincare distance (hyperbolic)
// or cosine (euclidean). Symmetric; maximal on identical points.
double similarity(const Model& m, std::string_view w1, std::string_view w2);
double similarity_points(const Model& m, std::span<const double> p1,
                         std::span<const double> p2);

// Spearman rank correlation with average ranks for ties. Throws on fewer
// than two points or on a constant input vector.
double spearman(std::span<const double> pred, std::span<const double> gold);

// Scores every pair both of whose words are in vocabulary; OOV pairs are
// skipped and counted. Throws when fewer than two pairs can be scored.
EvalReport evaluate_benchmark(const Model& m,
                              const std::vector<BenchmarkPair>& pairs,
                              const std::string& benchmark_name = "benchmark");

// Evidence for approximating one unseen word: in-vocabulary definiens words
// with their semantic roles.
struct OOVSpec {
  std::string target;
  std::vector<std::pair<std::string, std::string>> evidence;  // (word, role)
};

enum class OOVPooling {
  // Pool words and role translations in the tangent space at the origin
  // (plain vector means in the euclidean model).
  kTangentMean,
  // Pool words first, then Mobius-translate by the pooled role vector.
  kMobiusTranslate,
};

// One-shot embedding for an unseen word: mean of evidence word vectors plus
// mean of evidence role translations. With use_relations = false this is the
// bare mean-pooling baseline.
Vec approximate_oov(const Model& m, const OOVSpec& spec,
                    bool use_relations = true,
                    OOVPooling pooling = OOVPooling::kTangentMean);

struct OOVExperimentResult {
  EvalReport mean_pooling;
  EvalReport multi_relational;
  double gain = 0.0;  // multi_relational.spearman - mean_pooling.spearman
  int words_heldout = 0;
  int words_without_evidence = 0;
};

// All words appearing in the benchmark pairs; the standard held-out set.
std::unordered_set<std::string> benchmark_words(
    const std::vector<BenchmarkPair>& pairs);

// Retrains on the corpus pruned of every held-out word, approximates the
// held-out words from their definition triples, and evaluates the benchmark
// with and without the relational translations. An empty `heldout` set means
// no pruning, in which case both reports equal the standard evaluation.
OOVExperimentResult oov_experiment(
    const Corpus& full_corpus, const std::vector<BenchmarkPair>& pairs,
    const TrainConfig& config, const std::unordered_set<std::string>& heldout,
    OOVPooling pooling = OOVPooling::kTangentMean,
    const EpochHook& hook = nullptr);

}  // namespace defembed
