#include <doctest.h>

#include <sstream>

#include "roledet/errors.hpp"
#include "roledet/phrases.hpp"
#include "support.hpp"

using namespace roledet;
using roledet::test::M;
using roledet::test::make_doc;

TEST_CASE("collocation score by hand") {
  // N = 12 tokens; "new york" x3, "new" x4, "york" x3.
  const TokenStream s{{"new", "york", "a"}, {"new", "york", "b"}, {"new", "york", "c"}, {"new", "x", "d"}};
  PhraseConfig cfg;
  cfg.delta = 1;
  cfg.threshold = 0;
  const PhraseTable t = collocation_scores(s, cfg);
  REQUIRE(t.contains("new", "york"));
  CHECK(t.phrases.at({"new", "york"}).score == doctest::Approx((3.0 - 1.0) / (4.0 * 3.0)));
  // count(ab) <= delta is never kept.
  CHECK_FALSE(t.contains("york", "a"));
  CHECK_FALSE(t.contains("new", "x"));
  // Bigrams never cross sentence boundaries.
  CHECK_FALSE(t.contains("a", "new"));
}

TEST_CASE("threshold is per million tokens") {
  const TokenStream s{{"new", "york"}, {"new", "york"}, {"new", "york"}};
  PhraseConfig cfg;
  cfg.delta = 1;
  // score = 2/9, N = 6: kept iff score * N / 1e6 >= threshold.
  cfg.threshold = (2.0 / 9.0) * 6.0 / 1e6 * 0.999;
  CHECK(collocation_scores(s, cfg).contains("new", "york"));
  cfg.threshold = (2.0 / 9.0) * 6.0 / 1e6 * 1.001;
  CHECK_FALSE(collocation_scores(s, cfg).contains("new", "york"));
}

TEST_CASE("stopword bigrams can be dropped") {
  const TokenStream s{{"on", "sunday"}, {"on", "sunday"}, {"on", "sunday"}};
  PhraseConfig cfg;
  cfg.delta = 0;
  cfg.threshold = 0;
  CHECK(collocation_scores(s, cfg).contains("on", "sunday"));
  cfg.drop_stopword_bigrams = true;
  cfg.stopwords = {"on"};
  CHECK_FALSE(collocation_scores(s, cfg).contains("on", "sunday"));
}

TEST_CASE("phrase config validation") {
  PhraseConfig cfg;
  cfg.delta = -1;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = {};
  cfg.passes = 0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
}

TEST_CASE("merge joins pairs left to right and re-indexes spans") {
  AnnotatedCorpus c;
  c.documents.push_back(make_doc("d", {"bomb blast in new delhi killed Ravi Kumar today"},
                                 {{"r", 0, 6, 7, Role::PER_Victim}}));
  PhraseTable t;
  t.phrases[{"bomb", "blast"}] = {};
  t.phrases[{"blast", "in"}] = {};
  t.phrases[{"new", "delhi"}] = {};
  t.phrases[{"killed", "Ravi"}] = {};
  t.phrases[{"Kumar", "today"}] = {};
  const AnnotatedCorpus m = merge_phrases(c, t);
  const auto& s = m.documents[0].sentences[0];
  std::vector<std::string> words;
  for (const auto& tok : s) words.push_back(tok.surface);
  CHECK(words == std::vector<std::string>{"bomb_blast", "in", "new_delhi", "killed", "Ravi", "Kumar", "today"});
  const auto& span = m.documents[0].mentions[0].span;
  CHECK(span.start == 4);
  CHECK(span.end == 5);
  CHECK(s[span.start].surface == "Ravi");
}

TEST_CASE("second pass builds trigrams") {
  AnnotatedCorpus c;
  c.documents.push_back(make_doc("d", {"a b c X"}, {{"x", 0, 3, 3, Role::LOC_Event}}));
  PhraseTable t;
  t.phrases[{"a", "b"}] = {};
  t.phrases[{"a_b", "c"}] = {};
  CHECK(merge_phrases(c, t, 1).documents[0].sentences[0].size() == 3);
  const auto two = merge_phrases(c, t, 2);
  REQUIRE(two.documents[0].sentences[0].size() == 2);
  CHECK(two.documents[0].sentences[0][0].normalized == "a_b_c");
  CHECK(two.documents[0].mentions[0].span == Span{0, 1, 1});
}

TEST_CASE("merging never changes mention surfaces or roles") {
  AnnotatedCorpus c;
  c.documents.push_back(make_doc("d", {"x y Abu Salem y x", "Abu Salem x y"},
                                 {{"a", 0, 2, 3, Role::PER_Accused}, {"a", 1, 0, 1, Role::PER_Accused}}));
  PhraseTable t;
  t.phrases[{"x", "y"}] = {};
  t.phrases[{"y", "x"}] = {};
  t.phrases[{"Abu", "Salem"}] = {};
  t.phrases[{"y", "Abu"}] = {};
  const AnnotatedCorpus m = merge_phrases(c, t, 3);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& before = c.documents[0].mentions[i];
    const auto& after = m.documents[0].mentions[i];
    CHECK(after.role == before.role);
    CHECK(after.span.length() == before.span.length());
    for (std::size_t k = 0; k < before.span.length(); ++k)
      CHECK(m.documents[0].sentences[after.span.sentence][after.span.start + k] ==
            c.documents[0].sentences[before.span.sentence][before.span.start + k]);
  }
}

TEST_CASE("phrase forms bring removed stopwords back") {
  AnnotatedCorpus c;
  c.documents.push_back(make_doc("d", {"blast on Sunday"}));
  c.documents[0].sentences[0][1].normalized.clear();
  c.documents[0].sentences[0][2].normalized = "sunday";
  CHECK(phrase_stream(c) == TokenStream{{"blast", "on", "sunday"}});
  PhraseTable t;
  t.phrases[{"on", "sunday"}] = {};
  const auto m = merge_phrases(c, t);
  CHECK(m.documents[0].sentences[0][1].normalized == "on_sunday");
}

TEST_CASE("phrase table round trip") {
  PhraseTable t;
  t.phrases[{"bomb", "blast"}] = {0.125, PhraseSource::collocation};
  t.phrases[{"shot", "dead"}] = {3.0, PhraseSource::relation};
  std::stringstream s;
  write_phrase_table(t, s);
  CHECK(read_phrase_table(s) == t);
  std::stringstream bad("bombblast\t1\tcollocation\n");
  CHECK_THROWS_AS(read_phrase_table(bad), ParseError);
  std::stringstream bad_source("a_b\t1\tmagic\n");
  CHECK_THROWS_AS(read_phrase_table(bad_source), ParseError);
}

TEST_CASE("relation tuples become adjacent-pair phrases") {
  std::stringstream in(
      "d1\tgunmen\tshot dead\tvillagers\n"
      "d2\tpolice\tshot dead\tmilitant\n"
      "d3\tx\tarrested\ty\n"
      "broken line\n");
  PreprocessConfig cfg;
  const RelationLoad r = read_relation_phrases(in, cfg);
  CHECK(r.rows == 3);
  CHECK(r.skipped == 1);
  REQUIRE(r.table.size() == 1);
  CHECK(r.table.phrases.begin()->first == Bigram{"shot", "dead"});
  CHECK(r.table.phrases.begin()->second.score == 2.0);
  CHECK(r.table.phrases.begin()->second.source == PhraseSource::relation);

  PhraseTable base;
  base.phrases[{"shot", "dead"}] = {0.5, PhraseSource::collocation};
  merge_tables(base, r.table);
  CHECK(base.phrases.at({"shot", "dead"}).score == 0.5);
}
