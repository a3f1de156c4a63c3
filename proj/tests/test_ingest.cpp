#include <algorithm>
#include <vector>

#include <doctest.h>

#include "error.h"
#include "ingest.h"
#include "test_util.h"

using defembed::AnnotatedDefinition;
using defembed::Corpus;
using defembed::RoleSet;
using defembed::StopwordSet;

namespace {

std::vector<std::array<std::string, 3>> as_strings(const Corpus& c) {
  std::vector<std::array<std::string, 3>> out;
  for (const auto& t : c.triples) {
    out.push_back({c.vocab.word(t.s), std::string(RoleSet::name(t.r)),
                   c.vocab.word(t.o)});
  }
  return out;
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("definition of 'line' yields its two role triples") {
  const AnnotatedDefinition def{
      "line",
      {{"figure", "supertype"},
       {"curvature", "differentia_quality"},
       {"no", "NONE"}}};
  const Corpus c = defembed::extract_triples({def}, {});
  const auto got = as_strings(c);
  REQUIRE(got.size() == 2);
  CHECK(got[0] == std::array<std::string, 3>{"line", "supertype", "figure"});
  CHECK(got[1] == std::array<std::string, 3>{"line", "differentia_quality",
                                             "curvature"});
}

TEST_CASE("definitions with only NONE roles contribute nothing") {
  const AnnotatedDefinition useful{"dog", {{"animal", "supertype"}}};
  const AnnotatedDefinition noise{"the",
                                  {{"a", "NONE"}, {"word", "NONE"}}};
  const Corpus c = defembed::extract_triples({useful, noise}, {});
  CHECK(c.triples.size() == 1);
}

TEST_CASE("stop-word objects are dropped") {
  const AnnotatedDefinition def{
      "dog", {{"the", "supertype"}, {"animal", "supertype"}}};
  StopwordSet stop = {"the"};
  const Corpus c = defembed::extract_triples({def}, stop);
  const auto got = as_strings(c);
  REQUIRE(got.size() == 1);
  CHECK(got[0][2] == "animal");
}

TEST_CASE("unknown role rejects the whole definition with a diagnostic") {
  const AnnotatedDefinition bad{
      "dog", {{"animal", "supertype"}, {"fast", "SPEED"}}};
  const AnnotatedDefinition good{"cat", {{"animal", "supertype"}}};
  std::vector<std::string> warnings;
  const Corpus c = defembed::extract_triples(
      {bad, good}, {}, [&](const std::string& msg) { warnings.push_back(msg); });
  // The valid supertype token of the bad definition must not survive.
  REQUIRE(c.triples.size() == 1);
  CHECK(c.vocab.word(c.triples[0].s) == "cat");
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("dog") != std::string::npos);
  CHECK(warnings[0].find("SPEED") != std::string::npos);
}

TEST_CASE("subjects and objects are lowercased") {
  const AnnotatedDefinition def{"Dog", {{"Animal", "supertype"}}};
  const Corpus c = defembed::extract_triples({def}, {});
  CHECK(c.vocab.contains("dog"));
  CHECK(c.vocab.contains("animal"));
  CHECK(!c.vocab.contains("Dog"));
}

TEST_CASE("self-loops and duplicates are dropped") {
  const AnnotatedDefinition def{
      "dog",
      {{"dog", "supertype"},
       {"animal", "supertype"},
       {"animal", "supertype"}}};
  const Corpus c = defembed::extract_triples({def}, {});
  CHECK(c.triples.size() == 1);
}

TEST_CASE("extraction with zero surviving triples is a data error") {
  const AnnotatedDefinition def{"dog", {{"a", "NONE"}}};
  CHECK_THROWS_WITH_AS((void)defembed::extract_triples({def}, {}),
                       doctest::Contains("empty corpus"), defembed::DataError);
}

TEST_CASE("the committed definitions extract to the committed triples") {
  const auto defs =
      defembed::load_definitions(testutil::fixture("toy_defs.tsv"));
  const Corpus extracted =
      defembed::extract_triples(defs, defembed::default_stopwords());
  const Corpus reference =
      defembed::load_triples_tsv(testutil::fixture("toy_tree.tsv"));
  CHECK(as_strings(extracted) == as_strings(reference));
  CHECK(extracted.vocab.size() == 40);
  CHECK(extracted.triples.size() == 79);
}

TEST_CASE("triples file round-trips through save and load") {
  const Corpus original =
      defembed::load_triples_tsv(testutil::fixture("toy_tree.tsv"));
  testutil::TempDir tmp;
  defembed::save_triples_tsv(original, tmp.file("copy.tsv"));
  const Corpus copy = defembed::load_triples_tsv(tmp.file("copy.tsv"));
  CHECK(as_strings(original) == as_strings(copy));
}

TEST_CASE("triples line parses into ids") {
  testutil::TempDir tmp;
  testutil::spit(tmp.file("one.tsv"), "line\tsupertype\tfigure\n");
  const Corpus c = defembed::load_triples_tsv(tmp.file("one.tsv"));
  REQUIRE(c.triples.size() == 1);
  CHECK(c.vocab.word(c.triples[0].s) == "line");
  CHECK(RoleSet::name(c.triples[0].r) == "supertype");
  CHECK(c.vocab.word(c.triples[0].o) == "figure");
}

TEST_CASE("empty triples file is a data error") {
  testutil::TempDir tmp;
  testutil::spit(tmp.file("empty.tsv"), "");
  CHECK_THROWS_WITH_AS((void)defembed::load_triples_tsv(tmp.file("empty.tsv")),
                       doctest::Contains("empty corpus"), defembed::DataError);
}

TEST_CASE("malformed lines report path and line number") {
  testutil::TempDir tmp;
  testutil::spit(tmp.file("bad.tsv"), "line\tsupertype\tfigure\nonly-one\n");
  CHECK_THROWS_WITH_AS((void)defembed::load_triples_tsv(tmp.file("bad.tsv")),
                       doctest::Contains(":2"), defembed::DataError);

  testutil::spit(tmp.file("role.tsv"), "line\tnot_a_role\tfigure\n");
  CHECK_THROWS_WITH_AS((void)defembed::load_triples_tsv(tmp.file("role.tsv")),
                       doctest::Contains("not_a_role"), defembed::DataError);
}

TEST_CASE("missing files are data errors") {
  CHECK_THROWS_AS((void)defembed::load_triples_tsv("/nonexistent/x.tsv"),
                  defembed::DataError);
  CHECK_THROWS_AS((void)defembed::load_definitions("/nonexistent/x.tsv"),
                  defembed::DataError);
  CHECK_THROWS_AS((void)defembed::load_benchmark("/nonexistent/x.tsv"),
                  defembed::DataError);
}

TEST_CASE("benchmark lines parse word pair and gold score") {
  testutil::TempDir tmp;
  testutil::spit(tmp.file("b.tsv"), "Tiger\tcat\t7.35\n");
  const auto pairs = defembed::load_benchmark(tmp.file("b.tsv"));
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].w1 == "tiger");
  CHECK(pairs[0].w2 == "cat");
  CHECK(pairs[0].gold == 7.35);

  testutil::spit(tmp.file("bad.tsv"), "tiger\tcat\tseven\n");
  CHECK_THROWS_WITH_AS((void)defembed::load_benchmark(tmp.file("bad.tsv")),
                       doctest::Contains("seven"), defembed::DataError);
}

TEST_CASE("definition file parse errors name the offending token") {
  testutil::TempDir tmp;
  testutil::spit(tmp.file("d.tsv"), "dog\tanimal-supertype\n");
  CHECK_THROWS_WITH_AS(
      (void)defembed::load_definitions(tmp.file("d.tsv")),
      doctest::Contains("animal-supertype"), defembed::DataError);
}

TEST_CASE("stop-word files are one word per line, lowercased") {
  testutil::TempDir tmp;
  testutil::spit(tmp.file("stop.txt"), "The\nof\n\nAnd\n");
  const StopwordSet s = defembed::load_stopwords(tmp.file("stop.txt"));
  CHECK(s.size() == 3);
  CHECK(s.contains("the"));
  CHECK(s.contains("and"));
}

TEST_CASE("built-in stop-word list covers common function words") {
  const StopwordSet& s = defembed::default_stopwords();
  CHECK(s.contains("the"));
  CHECK(s.contains("of"));
  CHECK(s.contains("is"));
  CHECK(!s.contains("dog"));
}

}  // TEST_SUITE
