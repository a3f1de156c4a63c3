#include "pipeline.h"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "error.h"

namespace defembed {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  int out = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw UsageError("config key '" + key + "': bad integer '" + value + "'");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw UsageError("config key '" + key + "': bad number '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw UsageError("config key '" + key + "': bad boolean '" + value +
                   "' (use true/false)");
}

std::vector<std::string> split_commas(const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(value);
  while (std::getline(in, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

void assign_key(RunConfig& c, const std::string& key,
                const std::string& value) {
  if (key == "triples") {
    c.triples_path = value;
  } else if (key == "defs") {
    c.defs_path = value;
  } else if (key == "stopwords") {
    c.stopwords_path = value;
  } else if (key == "geometry") {
    c.train.geometry = geometry_from_name(value);
  } else if (key == "dim") {
    c.train.dim = parse_int(key, value);
  } else if (key == "epochs") {
    c.train.epochs = parse_int(key, value);
  } else if (key == "batch_size") {
    c.train.batch_size = parse_int(key, value);
  } else if (key == "learning_rate") {
    c.train.learning_rate = parse_double(key, value);
  } else if (key == "flat_learning_rate") {
    c.train.flat_learning_rate = parse_double(key, value);
  } else if (key == "negatives") {
    c.train.negatives_per_positive = parse_int(key, value);
  } else if (key == "curvature") {
    c.train.curvature = parse_double(key, value);
  } else if (key == "seed") {
    std::uint64_t seed = 0;
    const auto [ptr, ec] =
        std::from_chars(value.data(), value.data() + value.size(), seed);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw UsageError("config key 'seed': bad integer '" + value + "'");
    }
    c.train.seed = seed;
  } else if (key == "threads") {
    c.train.threads = parse_int(key, value);
  } else if (key == "deterministic") {
    c.train.deterministic = parse_bool(key, value);
  } else if (key == "model_out") {
    c.model_out = value;
  } else if (key == "model_format") {
    if (value == "binary") {
      c.model_format = SaveMode::kBinary;
    } else if (value == "text") {
      c.model_format = SaveMode::kText;
    } else {
      throw UsageError("config key 'model_format': '" + value +
                       "' (use binary or text)");
    }
  } else if (key == "metrics") {
    c.metrics_path = value;
  } else if (key == "checkpoint_interval") {
    c.checkpoint_interval = parse_int(key, value);
  } else if (key == "dev_benchmark") {
    c.dev_benchmark = value;
  } else if (key == "eval_benchmark") {
    c.eval_benchmarks = split_commas(value);
  } else if (key == "eval_out") {
    c.eval_out = value;
  } else if (key == "eval_json") {
    c.eval_json = value;
  } else {
    throw UsageError("unknown config key '" + key + "'");
  }
}

void assign_line(RunConfig& c, const std::string& line,
                 const std::string& where) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    throw UsageError(where + ": expected key=value, got '" + line + "'");
  }
  const std::string key = trim(line.substr(0, eq));
  const std::string value = trim(line.substr(eq + 1));
  if (key.empty()) throw UsageError(where + ": empty key in '" + line + "'");
  assign_key(c, key, value);
}

std::string benchmark_display_name(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

// Runs fn, re-raising any defembed error with the stage name prefixed so a
// failure in a multi-stage run says where it happened. The concrete error
// class is preserved so callers can still catch by kind.
template <typename Fn>
auto with_stage(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    const std::string msg = std::string(stage) + ": " + e.what();
    switch (e.code()) {
      case StatusCode::kUsage:
        throw UsageError(msg);
      case StatusCode::kData:
        throw DataError(msg);
      default:
        throw NumericError(msg);
    }
  }
}

}  // namespace

RunConfig RunConfig::parse(const std::string& path,
                           const std::vector<std::string>& overrides) {
  RunConfig c;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      assign_line(c, t, path + ":" + std::to_string(lineno));
    }
  }
  for (const std::string& o : overrides) {
    assign_line(c, trim(o), "override");
  }
  return c;
}

std::string RunConfig::echo() const {
  std::ostringstream out;
  if (!triples_path.empty()) out << "triples=" << triples_path << '\n';
  if (!defs_path.empty()) out << "defs=" << defs_path << '\n';
  if (!stopwords_path.empty()) out << "stopwords=" << stopwords_path << '\n';
  out << "geometry=" << geometry_name(train.geometry) << '\n';
  out << "dim=" << train.dim << '\n';
  out << "epochs=" << train.epochs << '\n';
  out << "batch_size=" << train.batch_size << '\n';
  out << "learning_rate=" << format_double(train.learning_rate) << '\n';
  if (train.flat_learning_rate) {
    out << "flat_learning_rate=" << format_double(*train.flat_learning_rate)
        << '\n';
  }
  out << "negatives=" << train.negatives_per_positive << '\n';
  out << "curvature=" << format_double(train.curvature) << '\n';
  out << "seed=" << train.seed << '\n';
  out << "threads=" << train.threads << '\n';
  out << "deterministic=" << (train.deterministic ? "true" : "false") << '\n';
  if (!model_out.empty()) {
    out << "model_out=" << model_out << '\n';
    out << "model_format="
        << (model_format == SaveMode::kBinary ? "binary" : "text") << '\n';
  }
  if (!metrics_path.empty()) out << "metrics=" << metrics_path << '\n';
  if (checkpoint_interval > 0) {
    out << "checkpoint_interval=" << checkpoint_interval << '\n';
  }
  if (!dev_benchmark.empty()) out << "dev_benchmark=" << dev_benchmark << '\n';
  if (!eval_benchmarks.empty()) {
    out << "eval_benchmark=";
    for (std::size_t i = 0; i < eval_benchmarks.size(); ++i) {
      if (i) out << ',';
      out << eval_benchmarks[i];
    }
    out << '\n';
  }
  if (!eval_out.empty()) out << "eval_out=" << eval_out << '\n';
  if (!eval_json.empty()) out << "eval_json=" << eval_json << '\n';
  return out.str();
}

void RunConfig::validate() const {
  if (triples_path.empty() == defs_path.empty()) {
    throw UsageError("exactly one of 'triples' and 'defs' must be set");
  }
  if (!stopwords_path.empty() && defs_path.empty()) {
    throw UsageError("'stopwords' only applies when extracting from 'defs'");
  }
  if (checkpoint_interval < 0) {
    throw UsageError("checkpoint_interval must be >= 0");
  }
  if (checkpoint_interval > 0 && model_out.empty()) {
    throw UsageError("checkpoint_interval requires model_out");
  }
  if ((!eval_out.empty() || !eval_json.empty()) && eval_benchmarks.empty()) {
    throw UsageError("eval_out/eval_json require eval_benchmark");
  }
  train.validate();
}

std::string format_eval_reports_tsv(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  for (const EvalReport& r : reports) {
    out << r.benchmark << '\t' << format_double(r.spearman) << '\t'
        << r.pairs_scored << '\t' << r.pairs_skipped_oov << '\n';
  }
  return out.str();
}

std::string format_eval_reports_json(const std::vector<EvalReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const EvalReport& r : reports) {
    arr.push_back({{"benchmark", r.benchmark},
                   {"spearman", r.spearman},
                   {"pairs_total", r.pairs_total},
                   {"pairs_scored", r.pairs_scored},
                   {"pairs_skipped_oov", r.pairs_skipped_oov}});
  }
  return arr.dump(2) + "\n";
}

RunResult run(const RunConfig& config, const Diagnostic& log) {
  const auto say = [&](const std::string& msg) {
    if (log) log(msg);
  };
  config.validate();

  const Corpus corpus = with_stage("ingest", [&] {
    if (!config.triples_path.empty()) {
      return load_triples_tsv(config.triples_path);
    }
    const StopwordSet stopwords = config.stopwords_path.empty()
                                      ? default_stopwords()
                                      : load_stopwords(config.stopwords_path);
    return extract_triples(load_definitions(config.defs_path), stopwords, log);
  });
  say("corpus: " + std::to_string(corpus.vocab.size()) + " words, " +
      std::to_string(corpus.triples.size()) + " triples");

  std::vector<BenchmarkPair> dev_pairs;
  if (!config.dev_benchmark.empty()) {
    dev_pairs = with_stage(
        "ingest", [&] { return load_benchmark(config.dev_benchmark); });
  }

  std::ofstream metrics;
  if (!config.metrics_path.empty()) {
    metrics.open(config.metrics_path, std::ios::trunc);
    if (!metrics) {
      throw DataError("cannot write metrics file: " + config.metrics_path);
    }
  }

  RunResult result;
  result.model = with_stage("train", [&] {
    const EpochHook hook = [&](const EpochStats& stats, const Model& m) {
      std::string line = std::to_string(stats.epoch) + "\t" +
                         format_double(stats.mean_loss);
      if (!dev_pairs.empty()) {
        const EvalReport dev = evaluate_benchmark(m, dev_pairs, "dev");
        line += "\t" + format_double(dev.spearman);
      }
      if (metrics.is_open()) {
        metrics << line << '\n';
        metrics.flush();
      }
      say("epoch " + line);
      result.final_mean_loss = stats.mean_loss;
      if (config.checkpoint_interval > 0 &&
          stats.epoch % config.checkpoint_interval == 0) {
        save_model(m, config.model_out + ".ckpt", config.model_format);
      }
    };
    return fit(corpus, config.train, hook);
  });

  with_stage("save", [&] {
    if (!config.model_out.empty()) {
      save_model(result.model, config.model_out, config.model_format);
      write_file_atomic(config.model_out + ".cfg", config.echo());
      say("model saved: " + config.model_out);
    }
  });

  with_stage("eval", [&] {
    for (const std::string& path : config.eval_benchmarks) {
      const std::vector<BenchmarkPair> pairs = load_benchmark(path);
      result.reports.push_back(evaluate_benchmark(
          result.model, pairs, benchmark_display_name(path)));
    }
    if (!config.eval_out.empty()) {
      write_file_atomic(config.eval_out,
                        format_eval_reports_tsv(result.reports));
    }
    if (!config.eval_json.empty()) {
      write_file_atomic(config.eval_json,
                        format_eval_reports_json(result.reports));
    }
  });

  return result;
}

}  // namespace defembed
