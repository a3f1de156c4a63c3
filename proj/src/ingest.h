#pragma once

#include <functional>
#include <string>
#include <unordered_set>
#include <vector>

#include "vocab.h"

namespace defembed {

// One token of a definition with its semantic-role label ("NONE" for none).
struct AnnotatedToken {
  std::string surface;
  std::string role;
};

struct AnnotatedDefinition {
  std::string definiendum;
  std::vector<AnnotatedToken> tokens;
};

// One link-prediction training example (subject, role, object) as ids.
struct Triple {
  int s = 0;
  int r = 0;
  int o = 0;
  bool operator==(const Triple&) const = default;
};

struct Corpus {
  Vocabulary vocab;
  std::vector<Triple> triples;
};

struct BenchmarkPair {
  std::string w1;
  std::string w2;
  double gold = 0.0;
};

using StopwordSet = std::unordered_set<std::string>;

// Modest built-in English stop-word list; overridable via file.
const StopwordSet& default_stopwords();
StopwordSet load_stopwords(const std::string& path);

// Emits a warning line for every rejected definition (unknown role name).
using Diagnostic = std::function<void(const std::string&)>;

// Builds the training corpus from annotated definitions. Words are
// lowercased; tokens with role NONE, stop-word objects and self-loops are
// dropped; duplicate triples are deduplicated (first occurrence kept).
Corpus extract_triples(const std::vector<AnnotatedDefinition>& defs,
                       const StopwordSet& stopwords,
                       const Diagnostic& diag = nullptr);

// File formats (all UTF-8, tab-separated):
//   definitions:  definiendum<TAB>token1|ROLE token2|ROLE ...
//   triples:      subject<TAB>role<TAB>object
//   benchmark:    word1<TAB>word2<TAB>score
std::vector<AnnotatedDefinition> load_definitions(const std::string& path);
Corpus load_triples_tsv(const std::string& path);
void save_triples_tsv(const Corpus& corpus, const std::string& path);
std::vector<BenchmarkPair> load_benchmark(const std::string& path);

}  // namespace defembed
