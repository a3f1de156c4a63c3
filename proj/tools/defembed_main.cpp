// defembed command-line tool. Talks to the core exclusively through the C
// interface in defembed.h, so it doubles as a workout for the shared
// library's public surface.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "defembed.h"

namespace {

int report_failure(int code) {
  std::cerr << "error: " << defembed_last_error() << "\n";
  return code;
}

void log_to_stderr(const char* line, void*) { std::cerr << line << "\n"; }

std::string path_stem(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

// %.17g round-trips binary64 exactly; used for all numeric TSV output.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct ModelHandle {
  defembed_model* ptr = nullptr;
  ~ModelHandle() { defembed_model_free(ptr); }
};

struct CorpusHandle {
  defembed_corpus* ptr = nullptr;
  ~CorpusHandle() { defembed_corpus_free(ptr); }
};

struct NeighborListHandle {
  defembed_neighbor_list* ptr = nullptr;
  ~NeighborListHandle() { defembed_neighbor_list_free(ptr); }
};

void print_neighbors(const defembed_neighbor_list* list,
                     const std::string& t_prefix = "") {
  const size_t n = defembed_neighbor_count(list);
  for (size_t i = 0; i < n; ++i) {
    std::cout << t_prefix << (i + 1) << '\t'
              << defembed_neighbor_word(list, i) << '\t'
              << fmt(defembed_neighbor_score(list, i)) << "\n";
  }
}

/* ---- extract ----------------------------------------------------------- */

struct ExtractOpts {
  std::string defs;
  std::string stopwords;
  std::string out;
};

int run_extract(const ExtractOpts& o) {
  CorpusHandle corpus;
  int rc = defembed_corpus_extract(
      o.defs.c_str(), o.stopwords.empty() ? nullptr : o.stopwords.c_str(),
      &corpus.ptr);
  if (rc != DEFEMBED_OK) return report_failure(rc);
  rc = defembed_corpus_save_triples(corpus.ptr, o.out.c_str());
  if (rc != DEFEMBED_OK) return report_failure(rc);
  std::cerr << "extracted " << defembed_corpus_triple_count(corpus.ptr)
            << " triples over " << defembed_corpus_vocab_size(corpus.ptr)
            << " words -> " << o.out << "\n";
  return 0;
}

void setup_extract(CLI::App& app, int& rc) {
  auto o = std::make_shared<ExtractOpts>();
  auto* sub = app.add_subcommand(
      "extract", "Extract role triples from annotated definitions");
  sub->add_option("--defs", o->defs, "annotated definitions TSV")
      ->required();
  sub->add_option("--stopwords", o->stopwords,
                  "stop-word list, one per line (default: built-in)");
  sub->add_option("--out", o->out, "output triples TSV")->required();
  sub->callback([o, &rc] { rc = run_extract(*o); });
}

/* ---- train ------------------------------------------------------------- */

struct TrainOpts {
  std::string config;
  bool quiet = false;
  // (config key, flag value) for every recognised override flag; only flags
  // the user actually passed are forwarded, so config-file values survive.
  std::vector<std::pair<std::string, std::string>> overrides;
  std::vector<std::string> eval_benchmarks;
};

int run_train(const TrainOpts& o) {
  std::vector<std::string> override_strings;
  for (const auto& [key, value] : o.overrides) {
    override_strings.push_back(key + "=" + value);
  }
  if (!o.eval_benchmarks.empty()) {
    std::string joined;
    for (const auto& p : o.eval_benchmarks) {
      if (!joined.empty()) joined += ',';
      joined += p;
    }
    override_strings.push_back("eval_benchmark=" + joined);
  }
  std::vector<const char*> override_ptrs;
  for (const auto& s : override_strings) override_ptrs.push_back(s.c_str());

  ModelHandle model;
  const int rc = defembed_run(o.config.empty() ? nullptr : o.config.c_str(),
                              override_ptrs.data(), override_ptrs.size(),
                              o.quiet ? nullptr : log_to_stderr, nullptr,
                              &model.ptr);
  if (rc != DEFEMBED_OK) return report_failure(rc);

  // Benchmarks requested on the command line get their report on stdout.
  for (const auto& path : o.eval_benchmarks) {
    double rho = 0.0;
    int32_t scored = 0;
    int32_t skipped = 0;
    const int erc = defembed_evaluate(model.ptr, path.c_str(), &rho, &scored,
                                      &skipped);
    if (erc != DEFEMBED_OK) return report_failure(erc);
    std::cout << path_stem(path) << '\t' << fmt(rho) << '\t' << scored << '\t'
              << skipped << "\n";
  }
  return 0;
}

void add_override_flag(CLI::App* sub, std::shared_ptr<TrainOpts> o,
                       const std::string& flag, const std::string& key,
                       const std::string& help) {
  sub->add_option_function<std::string>(
      flag,
      [o, key](const std::string& value) {
        o->overrides.emplace_back(key, value);
      },
      help);
}

void setup_train(CLI::App& app, int& rc) {
  auto o = std::make_shared<TrainOpts>();
  auto* sub = app.add_subcommand(
      "train", "Train embeddings from a config file and/or flags");
  sub->add_option("--config", o->config, "key=value run configuration file");
  sub->add_flag("--quiet", o->quiet, "suppress progress lines");
  add_override_flag(sub, o, "--triples", "triples", "triples TSV input");
  add_override_flag(sub, o, "--defs", "defs", "annotated definitions input");
  add_override_flag(sub, o, "--stopwords", "stopwords", "stop-word list");
  add_override_flag(sub, o, "--geometry", "geometry",
                    "euclidean or hyperbolic");
  add_override_flag(sub, o, "--dim", "dim", "embedding dimensionality");
  add_override_flag(sub, o, "--epochs", "epochs", "training epochs");
  add_override_flag(sub, o, "--batch-size", "batch_size", "batch size");
  add_override_flag(sub, o, "--learning-rate", "learning_rate",
                    "learning rate for entity embeddings");
  add_override_flag(sub, o, "--flat-learning-rate", "flat_learning_rate",
                    "learning rate for relation parameters and biases");
  add_override_flag(sub, o, "--negatives", "negatives",
                    "negative samples per positive");
  add_override_flag(sub, o, "--curvature", "curvature", "ball curvature c");
  add_override_flag(sub, o, "--seed", "seed", "random seed");
  add_override_flag(sub, o, "--threads", "threads", "worker threads");
  add_override_flag(sub, o, "--deterministic", "deterministic",
                    "true forces single-threaded training");
  add_override_flag(sub, o, "--model-out", "model_out", "model output path");
  add_override_flag(sub, o, "--model-format", "model_format",
                    "binary or text");
  add_override_flag(sub, o, "--metrics", "metrics",
                    "per-epoch TSV metrics log");
  add_override_flag(sub, o, "--checkpoint-interval", "checkpoint_interval",
                    "save <model_out>.ckpt every N epochs");
  add_override_flag(sub, o, "--dev-benchmark", "dev_benchmark",
                    "benchmark evaluated after every epoch");
  sub->add_option("--eval-benchmark", o->eval_benchmarks,
                  "benchmark(s) to evaluate after training");
  add_override_flag(sub, o, "--eval-out", "eval_out",
                    "evaluation report TSV path");
  add_override_flag(sub, o, "--eval-json", "eval_json",
                    "evaluation report JSON path");
  sub->callback([o, &rc] { rc = run_train(*o); });
}

/* ---- eval -------------------------------------------------------------- */

struct EvalOpts {
  std::string model;
  std::vector<std::string> benchmarks;
  std::string out;
};

int run_eval(const EvalOpts& o) {
  ModelHandle model;
  int rc = defembed_model_load(o.model.c_str(), &model.ptr);
  if (rc != DEFEMBED_OK) return report_failure(rc);

  std::string table;
  for (const auto& path : o.benchmarks) {
    double rho = 0.0;
    int32_t scored = 0;
    int32_t skipped = 0;
    rc = defembed_evaluate(model.ptr, path.c_str(), &rho, &scored, &skipped);
    if (rc != DEFEMBED_OK) return report_failure(rc);
    table += path_stem(path) + "\t" + fmt(rho) + "\t" +
             std::to_string(scored) + "\t" + std::to_string(skipped) + "\n";
  }
  if (o.out.empty()) {
    std::cout << table;
  } else {
    std::ofstream f(o.out, std::ios::trunc);
    if (!f || !(f << table)) {
      std::cerr << "error: cannot write " << o.out << "\n";
      return DEFEMBED_ERR_DATA;
    }
  }
  return 0;
}

void setup_eval(CLI::App& app, int& rc) {
  auto o = std::make_shared<EvalOpts>();
  auto* sub = app.add_subcommand(
      "eval", "Score benchmarks with a trained model (Spearman)");
  sub->add_option("--model", o->model, "trained model file")->required();
  sub->add_option("benchmarks", o->benchmarks,
                  "benchmark TSV file(s): word1<TAB>word2<TAB>score")
      ->required();
  sub->add_option("--out", o->out, "write the report here instead of stdout");
  sub->callback([o, &rc] { rc = run_eval(*o); });
}

/* ---- oov-exp ----------------------------------------------------------- */

struct OovOpts {
  std::string triples;
  std::string defs;
  std::string stopwords;
  std::string benchmark;
  std::string heldout_file;
  bool mobius_pooling = false;
  defembed_train_options train{};
};

int run_oov(const OovOpts& o) {
  CorpusHandle corpus;
  int rc;
  if (!o.triples.empty()) {
    rc = defembed_corpus_load_triples(o.triples.c_str(), &corpus.ptr);
  } else {
    rc = defembed_corpus_extract(
        o.defs.c_str(), o.stopwords.empty() ? nullptr : o.stopwords.c_str(),
        &corpus.ptr);
  }
  if (rc != DEFEMBED_OK) return report_failure(rc);

  std::vector<std::string> heldout;
  std::vector<const char*> heldout_ptrs;
  if (!o.heldout_file.empty()) {
    std::ifstream f(o.heldout_file);
    if (!f) {
      std::cerr << "error: cannot open " << o.heldout_file << "\n";
      return DEFEMBED_ERR_DATA;
    }
    std::string line;
    while (std::getline(f, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) heldout.push_back(line);
    }
    for (const auto& w : heldout) heldout_ptrs.push_back(w.c_str());
  }

  double mean_rho = 0.0;
  double multi_rho = 0.0;
  int32_t n_heldout = 0;
  int32_t n_no_evidence = 0;
  // An empty --heldout file means "prune nothing"; keep the pointer non-null
  // so it stays distinct from the all-benchmark-words default.
  static const char* const kNoWords[] = {""};
  const char* const* heldout_arg = nullptr;
  if (!o.heldout_file.empty()) {
    heldout_arg = heldout_ptrs.empty() ? kNoWords : heldout_ptrs.data();
  }
  rc = defembed_oov_experiment(corpus.ptr, o.benchmark.c_str(), &o.train,
                               heldout_arg, heldout_ptrs.size(),
                               o.mobius_pooling ? 1 : 0, &mean_rho, &multi_rho,
                               &n_heldout, &n_no_evidence);
  if (rc != DEFEMBED_OK) return report_failure(rc);

  std::cout << "mean_pooling\t" << fmt(mean_rho) << "\n"
            << "multi_relational\t" << fmt(multi_rho) << "\n"
            << "gain\t" << fmt(multi_rho - mean_rho) << "\n"
            << "words_heldout\t" << n_heldout << "\n"
            << "words_without_evidence\t" << n_no_evidence << "\n";
  return 0;
}

void add_train_options(CLI::App* sub, defembed_train_options& t) {
  sub->add_option("--geometry",
                  [&t](const std::vector<std::string>& v) {
                    if (v[0] == "euclidean") {
                      t.geometry = DEFEMBED_GEOMETRY_EUCLIDEAN;
                    } else if (v[0] == "hyperbolic") {
                      t.geometry = DEFEMBED_GEOMETRY_HYPERBOLIC;
                    } else {
                      return false;
                    }
                    return true;
                  },
                  "euclidean or hyperbolic");
  sub->add_option("--dim", t.dim, "embedding dimensionality");
  sub->add_option("--epochs", t.epochs, "training epochs");
  sub->add_option("--batch-size", t.batch_size, "batch size");
  sub->add_option("--learning-rate", t.learning_rate, "learning rate");
  sub->add_option("--flat-learning-rate", t.flat_learning_rate,
                  "learning rate for relation parameters and biases");
  sub->add_option("--negatives", t.negatives, "negatives per positive");
  sub->add_option("--curvature", t.curvature, "ball curvature c");
  sub->add_option("--seed", t.seed, "random seed");
  sub->add_option("--threads", t.threads, "worker threads");
  sub->add_option("--deterministic", t.deterministic,
                  "1 forces single-threaded training");
}

void setup_oov(CLI::App& app, int& rc) {
  auto o = std::make_shared<OovOpts>();
  defembed_train_options_init(&o->train);
  auto* sub = app.add_subcommand(
      "oov-exp",
      "Held-out retraining experiment: role-aware vs. mean pooling");
  auto* triples = sub->add_option("--triples", o->triples, "triples TSV");
  auto* defs =
      sub->add_option("--defs", o->defs, "annotated definitions TSV");
  triples->excludes(defs);
  sub->add_option("--stopwords", o->stopwords,
                  "stop-word list (with --defs)");
  sub->add_option("--benchmark", o->benchmark, "benchmark TSV")->required();
  sub->add_option("--heldout", o->heldout_file,
                  "held-out words, one per line (default: all benchmark "
                  "words)");
  sub->add_flag("--mobius-pooling", o->mobius_pooling,
                "Mobius-translate pooled words by the pooled role vector");
  add_train_options(sub, o->train);
  sub->callback([o, &rc, triples, defs] {
    if (triples->count() + defs->count() != 1) {
      std::cerr << "usage error: pass exactly one of --triples / --defs\n";
      rc = DEFEMBED_ERR_USAGE;
      return;
    }
    rc = run_oov(*o);
  });
}

/* ---- neighbors / adjust / traverse ------------------------------------- */

struct NeighborsOpts {
  std::string model;
  std::string word;
  int32_t k = 10;
  bool include_self = false;
};

int run_neighbors(const NeighborsOpts& o) {
  ModelHandle model;
  int rc = defembed_model_load(o.model.c_str(), &model.ptr);
  if (rc != DEFEMBED_OK) return report_failure(rc);
  NeighborListHandle list;
  rc = defembed_neighbors(model.ptr, o.word.c_str(), o.k,
                          o.include_self ? 1 : 0, &list.ptr);
  if (rc != DEFEMBED_OK) return report_failure(rc);
  print_neighbors(list.ptr);
  return 0;
}

void setup_neighbors(CLI::App& app, int& rc) {
  auto o = std::make_shared<NeighborsOpts>();
  auto* sub = app.add_subcommand(
      "neighbors", "Nearest vocabulary entries by geometry distance");
  sub->add_option("--model", o->model, "trained model file")->required();
  sub->add_option("word", o->word, "query word")->required();
  sub->add_option("-k,--top", o->k, "neighbours to report");
  sub->add_flag("--include-self", o->include_self,
                "keep the query word in the candidates");
  sub->callback([o, &rc] { rc = run_neighbors(*o); });
}

struct AdjustOpts {
  std::string model;
  std::string word;
  std::string role;
  int32_t k = 10;
  bool include_self = false;
};

int run_adjust(const AdjustOpts& o) {
  ModelHandle model;
  int rc = defembed_model_load(o.model.c_str(), &model.ptr);
  if (rc != DEFEMBED_OK) return report_failure(rc);
  NeighborListHandle list;
  rc = defembed_adjusted_neighbors(model.ptr, o.word.c_str(),
                                   o.role.c_str(), o.k,
                                   o.include_self ? 1 : 0, &list.ptr);
  if (rc != DEFEMBED_OK) return report_failure(rc);
  print_neighbors(list.ptr);
  return 0;
}

void setup_adjust(CLI::App& app, int& rc) {
  auto o = std::make_shared<AdjustOpts>();
  auto* sub = app.add_subcommand(
      "adjust", "Rank candidates by the bias-free relational score");
  sub->add_option("--model", o->model, "trained model file")->required();
  sub->add_option("word", o->word, "subject word")->required();
  sub->add_option("role", o->role, "semantic role name")->required();
  sub->add_option("-k,--top", o->k, "candidates to report");
  sub->add_flag("--include-self", o->include_self,
                "keep the subject word in the candidates");
  sub->callback([o, &rc] { rc = run_adjust(*o); });
}

struct TraverseOpts {
  std::string model;
  std::string w1;
  std::string w2;
  int32_t points = 5;
  int32_t k = 3;
};

int run_traverse(const TraverseOpts& o) {
  ModelHandle model;
  int rc = defembed_model_load(o.model.c_str(), &model.ptr);
  if (rc != DEFEMBED_OK) return report_failure(rc);
  defembed_traversal* tr = nullptr;
  rc = defembed_traverse(model.ptr, o.w1.c_str(), o.w2.c_str(), o.points,
                         o.k, &tr);
  if (rc != DEFEMBED_OK) return report_failure(rc);
  const size_t n = defembed_traversal_count(tr);
  for (size_t i = 0; i < n; ++i) {
    print_neighbors(defembed_traversal_neighbors(tr, i),
                    fmt(defembed_traversal_t(tr, i)) + "\t");
  }
  defembed_traversal_free(tr);
  return 0;
}

void setup_traverse(CLI::App& app, int& rc) {
  auto o = std::make_shared<TraverseOpts>();
  auto* sub = app.add_subcommand(
      "traverse", "Walk the path between two words, reporting neighbours");
  sub->add_option("--model", o->model, "trained model file")->required();
  sub->add_option("word1", o->w1, "start word")->required();
  sub->add_option("word2", o->w2, "end word")->required();
  sub->add_option("--points", o->points, "samples along the path");
  sub->add_option("-k,--top", o->k, "neighbours per sample");
  sub->callback([o, &rc] { rc = run_traverse(*o); });
}

/* ---- export ------------------------------------------------------------ */

struct ExportOpts {
  std::string model;
  std::string out;
  std::string format = "text";
};

int run_export(const ExportOpts& o) {
  ModelHandle model;
  int rc = defembed_model_load(o.model.c_str(), &model.ptr);
  if (rc != DEFEMBED_OK) return report_failure(rc);
  rc = defembed_model_save(model.ptr, o.out.c_str(),
                           o.format == "text" ? 1 : 0);
  if (rc != DEFEMBED_OK) return report_failure(rc);
  return 0;
}

void setup_export(CLI::App& app, int& rc) {
  auto o = std::make_shared<ExportOpts>();
  auto* sub = app.add_subcommand(
      "export", "Re-encode a model file as text or binary");
  sub->add_option("--model", o->model, "input model file")->required();
  sub->add_option("--out", o->out, "output model file")->required();
  sub->add_option("--format", o->format, "text or binary")
      ->check(CLI::IsMember({"text", "binary"}));
  sub->callback([o, &rc] { rc = run_export(*o); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "defembed: multi-relational word embeddings from dictionary "
      "definitions (euclidean or Poincare-ball geometry)"};
  app.require_subcommand(1);

  int rc = 0;
  setup_extract(app, rc);
  setup_train(app, rc);
  setup_eval(app, rc);
  setup_oov(app, rc);
  setup_neighbors(app, rc);
  setup_adjust(app, rc);
  setup_traverse(app, rc);
  setup_export(app, rc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "usage error: " << e.what() << "\n";
    return DEFEMBED_ERR_USAGE;
  }
  return rc;
}
