#include "trainer.h"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_map>

#include "error.h"
#include "geometry.h"

namespace defembed {

namespace {

constexpr double kProbClamp = 1e-12;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double clamp_prob(double p) {
  return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

struct Example {
  Triple triple;
  int label;  // 1 positive, 0 negative
};

// Sparse per-batch gradient accumulator. Relation rows are dense (the role
// set is small); entity rows and biases are keyed by id.
struct GradBuffer {
  std::unordered_map<int, Vec> entity;
  std::unordered_map<int, double> subject_bias;
  std::unordered_map<int, double> object_bias;
  std::vector<Vec> rel_translation;
  std::vector<Vec> rel_scale;
  std::vector<char> rel_touched;
  double loss_sum = 0.0;

  explicit GradBuffer(int dim)
      : rel_translation(RoleSet::kCount, Vec(dim, 0.0)),
        rel_scale(RoleSet::kCount, Vec(dim, 0.0)),
        rel_touched(RoleSet::kCount, 0) {}

  void reset() {
    entity.clear();
    subject_bias.clear();
    object_bias.clear();
    for (int r = 0; r < RoleSet::kCount; ++r) {
      if (rel_touched[r]) {
        std::fill(rel_translation[r].begin(), rel_translation[r].end(), 0.0);
        std::fill(rel_scale[r].begin(), rel_scale[r].end(), 0.0);
        rel_touched[r] = 0;
      }
    }
    loss_sum = 0.0;
  }

  Vec& entity_row(int id, int dim) {
    auto [it, inserted] = entity.try_emplace(id);
    if (inserted) it->second.assign(dim, 0.0);
    return it->second;
  }

  void merge_from(const GradBuffer& other) {
    for (const auto& [id, vec] : other.entity) {
      Vec& dst = entity_row(id, static_cast<int>(vec.size()));
      for (std::size_t i = 0; i < vec.size(); ++i) dst[i] += vec[i];
    }
    for (const auto& [id, g] : other.subject_bias) subject_bias[id] += g;
    for (const auto& [id, g] : other.object_bias) object_bias[id] += g;
    for (int r = 0; r < RoleSet::kCount; ++r) {
      if (!other.rel_touched[r]) continue;
      rel_touched[r] = 1;
      for (std::size_t i = 0; i < rel_translation[r].size(); ++i) {
        rel_translation[r][i] += other.rel_translation[r][i];
        rel_scale[r][i] += other.rel_scale[r][i];
      }
    }
  }
};

// Loss and gradients for examples [begin, end); upstream weights are 1/n_all
// so the buffer accumulates the gradient of the mean batch loss.
void accumulate_examples(const Model& model, std::span<const Example> examples,
                         std::size_t begin, std::size_t end, double inv_n,
                         GradBuffer& buf) {
  for (std::size_t i = begin; i < end; ++i) {
    const auto& [triple, label] = examples[i];
    const double s = score(model, triple.s, triple.r, triple.o);
    const double p = clamp_prob(sigmoid(s));
    buf.loss_sum +=
        label ? -std::log(p) : -std::log1p(-p);
    const double upstream = (p - static_cast<double>(label)) * inv_n;

    buf.rel_touched[triple.r] = 1;
    ScoreGrad grads;
    grads.subject = buf.entity_row(triple.s, model.dim);
    grads.object = buf.entity_row(triple.o, model.dim);
    grads.translation = buf.rel_translation[triple.r];
    grads.scale = buf.rel_scale[triple.r];
    grads.subject_bias = &buf.subject_bias[triple.s];
    grads.object_bias = &buf.object_bias[triple.o];
    score_backward(model, triple.s, triple.r, triple.o, upstream, grads);
  }
}

// Riemannian step for a ball point: rescale the ambient gradient by the
// inverse metric, take a Mobius step, and project back to the margin.
void ball_step(std::span<double> point, std::span<const double> grad,
               double lr, double c) {
  Vec rescaled = geo::riemannian_rescale(grad, point, c);
  for (double& v : rescaled) v *= -lr;
  geo::project_to_ball(rescaled, c);
  const Vec updated = geo::mobius_add(point, rescaled, c);
  std::copy(updated.begin(), updated.end(), point.begin());
}

void apply_updates(Model& model, const GradBuffer& buf,
                   const TrainConfig& config) {
  const double lr = config.learning_rate;
  const double flat_lr = config.flat_rate();
  const bool hyperbolic = model.geometry == ModelGeometry::kHyperbolic;
  const double c = model.curvature;

  for (const auto& [id, grad] : buf.entity) {
    auto row = model.entity(id);
    if (hyperbolic) {
      ball_step(row, grad, lr, c);
    } else {
      for (int i = 0; i < model.dim; ++i) row[i] -= lr * grad[i];
    }
  }
  for (const auto& [id, g] : buf.subject_bias) {
    model.subject_bias[id] -= flat_lr * g;
  }
  for (const auto& [id, g] : buf.object_bias) {
    model.object_bias[id] -= flat_lr * g;
  }
  for (int r = 0; r < RoleSet::kCount; ++r) {
    if (!buf.rel_touched[r]) continue;
    auto& rel = model.relations[r];
    if (hyperbolic) {
      ball_step(rel.translation, buf.rel_translation[r], flat_lr, c);
    } else {
      for (int i = 0; i < model.dim; ++i) {
        rel.translation[i] -= flat_lr * buf.rel_translation[r][i];
      }
    }
    for (int i = 0; i < model.dim; ++i) {
      rel.scale[i] -= flat_lr * buf.rel_scale[r][i];
    }
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 0) throw UsageError("epochs must be >= 0");
  if (batch_size <= 0) throw UsageError("batch_size must be positive");
  if (learning_rate < 0.0) throw UsageError("learning_rate must be >= 0");
  if (flat_learning_rate && *flat_learning_rate < 0.0) {
    throw UsageError("flat_learning_rate must be >= 0");
  }
  if (negatives_per_positive < 1) {
    throw UsageError("negatives_per_positive must be >= 1");
  }
  if (dim <= 0) throw UsageError("dim must be positive");
  if (curvature <= 0.0) throw UsageError("curvature must be positive");
  if (threads < 1) throw UsageError("threads must be >= 1");
}

double bernoulli_nll(std::span<const double> scores,
                     std::span<const int> labels) {
  if (scores.empty()) throw UsageError("bernoulli_nll: empty input");
  if (scores.size() != labels.size()) {
    throw UsageError("bernoulli_nll: scores/labels length mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double p = clamp_prob(sigmoid(scores[i]));
    sum += labels[i] ? -std::log(p) : -std::log1p(-p);
  }
  return sum / static_cast<double>(scores.size());
}

std::vector<Triple> sample_negatives(const Triple& positive, int vocab_size,
                                     int k, Rng& rng) {
  if (k < 1) throw UsageError("sample_negatives: k must be >= 1");
  if (vocab_size < 2) {
    throw UsageError("sample_negatives: vocabulary too small to corrupt");
  }
  std::vector<Triple> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) {
    int candidate =
        static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(vocab_size - 1)));
    if (candidate >= positive.o) ++candidate;  // skip the true object
    out.push_back({positive.s, positive.r, candidate});
  }
  return out;
}

double train_epoch(Model& model, const std::vector<Triple>& corpus,
                   const TrainConfig& config, Rng& rng, int epoch_no) {
  if (corpus.empty()) throw UsageError("train_epoch: empty corpus");
  const int n_threads = config.deterministic ? 1 : config.threads;

  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);

  std::vector<GradBuffer> buffers;
  buffers.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) buffers.emplace_back(model.dim);

  double loss_total = 0.0;
  std::size_t n_batches = 0;
  std::vector<Example> examples;

  for (std::size_t start = 0; start < order.size();
       start += static_cast<std::size_t>(config.batch_size)) {
    const std::size_t stop =
        std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));

    // Negatives are re-drawn from the run rng every epoch, before the
    // parallel section, so the sample stream does not depend on threads.
    examples.clear();
    for (std::size_t i = start; i < stop; ++i) {
      const Triple& pos = corpus[order[i]];
      examples.push_back({pos, 1});
      for (const Triple& neg : sample_negatives(
               pos, model.vocab.size(), config.negatives_per_positive, rng)) {
        examples.push_back({neg, 0});
      }
    }
    const double inv_n = 1.0 / static_cast<double>(examples.size());

    for (auto& buf : buffers) buf.reset();
    if (n_threads == 1 || examples.size() < 2 * static_cast<std::size_t>(n_threads)) {
      accumulate_examples(model, examples, 0, examples.size(), inv_n,
                          buffers[0]);
    } else {
      const std::size_t chunk =
          (examples.size() + n_threads - 1) / static_cast<std::size_t>(n_threads);
      std::vector<std::thread> workers;
      for (int t = 0; t < n_threads; ++t) {
        const std::size_t lo = std::min(examples.size(), t * chunk);
        const std::size_t hi = std::min(examples.size(), lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([&, lo, hi, t] {
          accumulate_examples(model, examples, lo, hi, inv_n, buffers[t]);
        });
      }
      for (auto& w : workers) w.join();
      for (int t = 1; t < n_threads; ++t) buffers[0].merge_from(buffers[t]);
    }

    const double batch_loss = buffers[0].loss_sum * inv_n;
    if (!std::isfinite(batch_loss)) {
      throw NumericError("non-finite loss in epoch " +
                         std::to_string(epoch_no) + ", batch " +
                         std::to_string(n_batches));
    }
    apply_updates(model, buffers[0], config);
    loss_total += batch_loss;
    ++n_batches;
  }
  return loss_total / static_cast<double>(n_batches);
}

Model fit(const Corpus& corpus, const TrainConfig& config,
          const EpochHook& hook) {
  config.validate();
  Model model = init_model(corpus.vocab, config.dim, config.geometry,
                           config.curvature, config.seed);
  if (corpus.triples.empty() && config.epochs > 0) {
    throw UsageError("fit: empty corpus");
  }
  // Separate stream from the init draws so adding entities does not shift
  // the negative-sampling sequence.
  Rng rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const double mean_loss =
        train_epoch(model, corpus.triples, config, rng, epoch);
    if (hook) hook({epoch, mean_loss}, model);
  }
  return model;
}

Corpus prune_corpus(const Corpus& corpus,
                    const std::unordered_set<std::string>& heldout) {
  std::vector<std::array<std::string, 3>> kept;
  for (const auto& t : corpus.triples) {
    const std::string& s = corpus.vocab.word(t.s);
    const std::string& o = corpus.vocab.word(t.o);
    if (heldout.contains(s) || heldout.contains(o)) continue;
    kept.push_back({s, std::string(RoleSet::name(t.r)), o});
  }
  // Vocabulary is rebuilt from the surviving triples so held-out words
  // become genuinely out-of-vocabulary for retraining.
  std::vector<std::string> words;
  words.reserve(kept.size() * 2);
  for (const auto& [s, r, o] : kept) {
    words.push_back(s);
    words.push_back(o);
  }
  Corpus out;
  out.vocab = Vocabulary::from_words(std::move(words));
  out.triples.reserve(kept.size());
  for (const auto& [s, r, o] : kept) {
    out.triples.push_back({out.vocab.id(s), RoleSet::id(r), out.vocab.id(o)});
  }
  return out;
}

}  // namespace defembed
