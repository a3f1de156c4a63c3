#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "ingest.h"
#include "model.h"
#include "rng.h"

namespace defembed {

struct TrainConfig {
  int epochs = 300;
  int batch_size = 128;
  // Learning rate for entity embeddings. Role parameters (translations,
  // diagonal scales) and biases use flat_learning_rate when set, otherwise
  // the same rate.
  double learning_rate = 50.0;
  std::optional<double> flat_learning_rate;
  int negatives_per_positive = 50;
  std::uint64_t seed = 1;
  ModelGeometry geometry = ModelGeometry::kHyperbolic;
  int dim = 40;
  double curvature = 1.0;
  // threads > 1 parallelises gradient computation within a batch; updates
  // stay exclusive and the merge order is fixed, so results are reproducible
  // for a given (seed, threads) pair. deterministic forces threads = 1.
  int threads = 1;
  bool deterministic = true;

  double flat_rate() const {
    return flat_learning_rate.value_or(learning_rate);
  }
  void validate() const;
};

// Mean Bernoulli negative log-likelihood with p = logistic(score), each p
// clamped to [1e-12, 1 - 1e-12].
double bernoulli_nll(std::span<const double> scores,
                     std::span<const int> labels);

// k corrupted copies of `positive` with the object replaced by a uniformly
// random entity id different from the true object.
std::vector<Triple> sample_negatives(const Triple& positive, int vocab_size,
                                     int k, Rng& rng);

// One full shuffled pass over the corpus. Returns the mean batch loss.
// `epoch_no` is the 1-based epoch number used in error messages.
double train_epoch(Model& model, const std::vector<Triple>& corpus,
                   const TrainConfig& config, Rng& rng, int epoch_no = 1);

struct EpochStats {
  int epoch = 0;  // 1-based
  double mean_loss = 0.0;
};
using EpochHook = std::function<void(const EpochStats&, const Model&)>;

// Initialises a model from the corpus vocabulary and runs config.epochs
// epochs. The hook fires after every epoch (metrics, dev eval, checkpoints).
Model fit(const Corpus& corpus, const TrainConfig& config,
          const EpochHook& hook = nullptr);

// Removes every triple whose subject or object word is in `heldout`.
Corpus prune_corpus(const Corpus& corpus,
                    const std::unordered_set<std::string>& heldout);

}  // namespace defembed
