#include "evaluate.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "error.h"
#include "geometry.h"

namespace defembed {

double similarity_points(const Model& m, std::span<const double> p1,
                         std::span<const double> p2) {
  if (m.geometry == ModelGeometry::kHyperbolic) {
    return -geo::poincare_distance(p1, p2, m.curvature);
  }
  const double denom =
      std::max(std::sqrt(geo::dot(p1, p1) * geo::dot(p2, p2)), 1e-300);
  return geo::dot(p1, p2) / denom;
}

double similarity(const Model& m, std::string_view w1, std::string_view w2) {
  const int id1 = m.vocab.id(w1);
  const int id2 = m.vocab.id(w2);
  if (id1 < 0) throw UsageError("unknown word: " + std::string(w1));
  if (id2 < 0) throw UsageError("unknown word: " + std::string(w2));
  return similarity_points(m, m.entity(id1), m.entity(id2));
}

namespace {

// Average ranks, 1-based; ties share the mean of their rank range.
std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) {
    throw NumericError("undefined correlation: constant input vector");
  }
  return cov / std::sqrt(var_a * var_b);
}

}  // namespace

double spearman(std::span<const double> pred, std::span<const double> gold) {
  if (pred.size() != gold.size()) {
    throw UsageError("spearman: length mismatch");
  }
  if (pred.size() < 2) throw UsageError("spearman: need at least two points");
  const std::vector<double> rp = average_ranks(pred);
  const std::vector<double> rg = average_ranks(gold);
  return pearson(rp, rg);
}

EvalReport evaluate_benchmark(const Model& m,
                              const std::vector<BenchmarkPair>& pairs,
                              const std::string& benchmark_name) {
  if (pairs.empty()) throw UsageError("evaluate_benchmark: no pairs");
  EvalReport report;
  report.benchmark = benchmark_name;
  report.pairs_total = static_cast<int>(pairs.size());
  std::vector<double> pred, gold;
  for (const auto& pair : pairs) {
    const int id1 = m.vocab.id(pair.w1);
    const int id2 = m.vocab.id(pair.w2);
    if (id1 < 0 || id2 < 0) {
      ++report.pairs_skipped_oov;
      continue;
    }
    pred.push_back(similarity_points(m, m.entity(id1), m.entity(id2)));
    gold.push_back(pair.gold);
  }
  report.pairs_scored = static_cast<int>(pred.size());
  if (report.pairs_scored < 2) {
    throw DataError("evaluate_benchmark: only " +
                    std::to_string(report.pairs_scored) + " of " +
                    std::to_string(report.pairs_total) +
                    " pairs scored (skipped " +
                    std::to_string(report.pairs_skipped_oov) +
                    " out-of-vocabulary)");
  }
  report.spearman = spearman(pred, gold);
  return report;
}

Vec approximate_oov(const Model& m, const OOVSpec& spec, bool use_relations,
                    OOVPooling pooling) {
  if (spec.evidence.empty()) {
    throw UsageError("approximate_oov: empty evidence for '" + spec.target +
                     "'");
  }
  const double c = m.curvature;
  const bool hyperbolic = m.geometry == ModelGeometry::kHyperbolic;
  const double inv_n = 1.0 / static_cast<double>(spec.evidence.size());

  Vec word_mean(m.dim, 0.0);
  Vec role_mean(m.dim, 0.0);
  for (const auto& [word, role] : spec.evidence) {
    const int wid = m.vocab.id(word);
    if (wid < 0) throw UsageError("approximate_oov: unknown word: " + word);
    const int rid = RoleSet::id(role);
    if (rid < 0) throw UsageError("approximate_oov: unknown role: " + role);
    const Vec wvec =
        hyperbolic ? geo::log0(m.entity(wid), c)
                   : Vec(m.entity(wid).begin(), m.entity(wid).end());
    const Vec rvec = hyperbolic
                         ? geo::log0(m.relations[rid].translation, c)
                         : m.relations[rid].translation;
    for (int i = 0; i < m.dim; ++i) {
      word_mean[i] += inv_n * wvec[i];
      role_mean[i] += inv_n * rvec[i];
    }
  }

  if (!hyperbolic) {
    if (use_relations) {
      for (int i = 0; i < m.dim; ++i) word_mean[i] += role_mean[i];
    }
    return word_mean;
  }

  if (!use_relations) return geo::exp0(word_mean, c);
  if (pooling == OOVPooling::kTangentMean) {
    for (int i = 0; i < m.dim; ++i) word_mean[i] += role_mean[i];
    return geo::exp0(word_mean, c);
  }
  // Mobius variant: pool the words on the ball, then translate by the
  // pooled role vector.
  return geo::mobius_add(geo::exp0(word_mean, c), geo::exp0(role_mean, c), c);
}

std::unordered_set<std::string> benchmark_words(
    const std::vector<BenchmarkPair>& pairs) {
  std::unordered_set<std::string> words;
  for (const auto& pair : pairs) {
    words.insert(pair.w1);
    words.insert(pair.w2);
  }
  return words;
}

OOVExperimentResult oov_experiment(const Corpus& full_corpus,
                                   const std::vector<BenchmarkPair>& pairs,
                                   const TrainConfig& config,
                                   const std::unordered_set<std::string>& heldout,
                                   OOVPooling pooling, const EpochHook& hook) {
  if (pairs.empty()) throw UsageError("oov_experiment: no benchmark pairs");

  const Corpus pruned =
      heldout.empty() ? full_corpus : prune_corpus(full_corpus, heldout);
  const Model model = fit(pruned, config, hook);

  // Evidence per held-out word: objects of its definition triples in the
  // full corpus that survived pruning, pooled across all definitions.
  std::unordered_map<std::string, OOVSpec> specs;
  for (const auto& t : full_corpus.triples) {
    const std::string& s = full_corpus.vocab.word(t.s);
    if (!heldout.contains(s)) continue;
    const std::string& o = full_corpus.vocab.word(t.o);
    if (model.vocab.id(o) < 0) continue;
    auto& spec = specs[s];
    spec.target = s;
    spec.evidence.emplace_back(o, std::string(RoleSet::name(t.r)));
  }

  OOVExperimentResult result;
  result.words_heldout = static_cast<int>(heldout.size());

  // A word with an in-vocabulary embedding is used directly; a held-out word
  // is approximated; a word with no surviving evidence is unusable.
  std::unordered_set<std::string> no_evidence;
  auto point_for = [&](const std::string& word,
                       bool use_relations) -> std::optional<Vec> {
    const int id = model.vocab.id(word);
    if (id >= 0) return Vec(model.entity(id).begin(), model.entity(id).end());
    auto it = specs.find(word);
    if (it == specs.end() || it->second.evidence.empty()) {
      no_evidence.insert(word);
      return std::nullopt;
    }
    return approximate_oov(model, it->second, use_relations, pooling);
  };

  auto run_eval = [&](bool use_relations, const std::string& name) {
    EvalReport report;
    report.benchmark = name;
    report.pairs_total = static_cast<int>(pairs.size());
    std::vector<double> pred, gold;
    for (const auto& pair : pairs) {
      const auto p1 = point_for(pair.w1, use_relations);
      const auto p2 = point_for(pair.w2, use_relations);
      if (!p1 || !p2) {
        ++report.pairs_skipped_oov;
        continue;
      }
      pred.push_back(similarity_points(model, *p1, *p2));
      gold.push_back(pair.gold);
    }
    report.pairs_scored = static_cast<int>(pred.size());
    if (report.pairs_scored < 2) {
      throw DataError("oov_experiment: only " +
                      std::to_string(report.pairs_scored) +
                      " pairs scorable for " + name);
    }
    report.spearman = spearman(pred, gold);
    return report;
  };

  result.mean_pooling = run_eval(false, "mean_pooling");
  result.multi_relational = run_eval(true, "multi_relational");
  result.gain = result.multi_relational.spearman - result.mean_pooling.spearman;
  result.words_without_evidence = static_cast<int>(no_evidence.size());
  return result;
}

}  // namespace defembed
