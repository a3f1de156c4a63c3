#include "ingest.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "error.h"

namespace defembed {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(line.substr(start));
      break;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

double parse_double(const std::string& text, const std::string& path,
                    std::size_t line_no) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DataError(path + ":" + std::to_string(line_no) +
                    ": malformed number '" + text + "'");
  }
  return value;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  return in;
}

struct TripleKeyHash {
  std::size_t operator()(const std::array<std::string, 3>& k) const {
    std::size_t h = 1469598103934665603ULL;
    for (const auto& part : k) {
      for (char ch : part) h = (h ^ static_cast<unsigned char>(ch)) * 1099511628211ULL;
      h = (h ^ 0x1f) * 1099511628211ULL;
    }
    return h;
  }
};

}  // namespace

const StopwordSet& default_stopwords() {
  static const StopwordSet kStopwords = {
      "a",       "an",      "the",    "and",   "or",      "but",   "if",
      "then",    "than",    "that",   "this",  "these",   "those", "of",
      "in",      "on",      "at",     "by",    "for",     "with",  "without",
      "to",      "from",    "into",   "onto",  "as",      "is",    "are",
      "was",     "were",    "be",     "been",  "being",   "has",   "have",
      "had",     "having",  "do",     "does",  "did",     "will",  "would",
      "can",     "could",   "shall",  "should", "may",    "might", "must",
      "it",      "its",     "itself", "he",    "him",     "his",   "she",
      "her",     "hers",    "they",   "them",  "their",   "we",    "us",
      "our",     "you",     "your",   "i",     "me",      "my",    "who",
      "whom",    "whose",   "which",  "what",  "when",    "where", "why",
      "how",     "not",     "no",     "nor",   "so",      "such",  "some",
      "any",     "all",     "each",   "every", "both",    "few",   "more",
      "most",    "other",   "another", "own",  "same",    "again", "also",
      "there",   "here",    "about",  "over",  "under",   "above", "below",
      "between", "through", "during", "up",    "down",    "out",   "off",
      "only",    "very",    "too",    "just",  "because", "while", "until",
      "etc",     "e.g",     "i.e",    "one's", "someone", "something",
  };
  return kStopwords;
}

StopwordSet load_stopwords(const std::string& path) {
  std::ifstream in = open_input(path);
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (!line.empty()) words.insert(to_lower(line));
  }
  return words;
}

Corpus extract_triples(const std::vector<AnnotatedDefinition>& defs,
                       const StopwordSet& stopwords, const Diagnostic& diag) {
  std::vector<std::array<std::string, 3>> raw;
  std::unordered_set<std::array<std::string, 3>, TripleKeyHash> seen;

  for (const auto& def : defs) {
    const std::string subject = to_lower(def.definiendum);
    bool valid = true;
    for (const auto& tok : def.tokens) {
      if (tok.role != "NONE" && RoleSet::id(tok.role) < 0) {
        if (diag) {
          diag("rejected definition of '" + def.definiendum +
               "': unknown role '" + tok.role + "'");
        }
        valid = false;
        break;
      }
    }
    if (!valid) continue;

    for (const auto& tok : def.tokens) {
      if (tok.role == "NONE") continue;
      const std::string object = to_lower(tok.surface);
      // Stop-word filtering applies to definiens words only; the definiendum
      // keeps its triples even if it is itself a stop word.
      if (stopwords.contains(object)) continue;
      if (object == subject) continue;           // self-loops carry no signal
      std::array<std::string, 3> key = {subject, std::string(tok.role), object};
      if (seen.insert(key).second) raw.push_back(std::move(key));
    }
  }

  if (raw.empty()) throw DataError("empty corpus: no triples extracted");

  std::vector<std::string> words;
  words.reserve(raw.size() * 2);
  for (const auto& [s, r, o] : raw) {
    words.push_back(s);
    words.push_back(o);
  }
  Corpus corpus;
  corpus.vocab = Vocabulary::from_words(std::move(words));
  corpus.triples.reserve(raw.size());
  for (const auto& [s, r, o] : raw) {
    corpus.triples.push_back(
        {corpus.vocab.id(s), RoleSet::id(r), corpus.vocab.id(o)});
  }
  return corpus;
}

std::vector<AnnotatedDefinition> load_definitions(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<AnnotatedDefinition> defs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 2 || cols[0].empty()) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected 'definiendum<TAB>token|ROLE ...'");
    }
    AnnotatedDefinition def;
    def.definiendum = cols[0];
    std::istringstream tokens(cols[1]);
    std::string item;
    while (tokens >> item) {
      const std::size_t bar = item.rfind('|');
      if (bar == std::string::npos || bar == 0 || bar + 1 == item.size()) {
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": malformed token '" + item + "' (want surface|ROLE)");
      }
      def.tokens.push_back({item.substr(0, bar), item.substr(bar + 1)});
    }
    if (def.tokens.empty()) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": definition has no tokens");
    }
    defs.push_back(std::move(def));
  }
  return defs;
}

Corpus load_triples_tsv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::array<std::string, 3>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 3 || cols[0].empty() || cols[2].empty()) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected 'subject<TAB>role<TAB>object'");
    }
    if (RoleSet::id(cols[1]) < 0) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": unknown role '" + cols[1] + "'");
    }
    raw.push_back({to_lower(cols[0]), cols[1], to_lower(cols[2])});
  }
  if (raw.empty()) throw DataError("empty corpus: " + path);

  std::vector<std::string> words;
  words.reserve(raw.size() * 2);
  for (const auto& [s, r, o] : raw) {
    words.push_back(s);
    words.push_back(o);
  }
  Corpus corpus;
  corpus.vocab = Vocabulary::from_words(std::move(words));
  corpus.triples.reserve(raw.size());
  for (const auto& [s, r, o] : raw) {
    corpus.triples.push_back(
        {corpus.vocab.id(s), RoleSet::id(r), corpus.vocab.id(o)});
  }
  return corpus;
}

void save_triples_tsv(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  for (const auto& t : corpus.triples) {
    out << corpus.vocab.word(t.s) << '\t' << RoleSet::name(t.r) << '\t'
        << corpus.vocab.word(t.o) << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

std::vector<BenchmarkPair> load_benchmark(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<BenchmarkPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 3 || cols[0].empty() || cols[1].empty()) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected 'word1<TAB>word2<TAB>score'");
    }
    pairs.push_back({to_lower(cols[0]), to_lower(cols[1]),
                     parse_double(cols[2], path, line_no)});
  }
  if (pairs.empty()) throw DataError("empty benchmark: " + path);
  return pairs;
}

}  // namespace defembed
