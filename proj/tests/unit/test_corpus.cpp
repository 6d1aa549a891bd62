#include <doctest.h>

#include <sstream>

#include "roledet/errors.hpp"
#include "roledet/preprocess.hpp"
#include "roledet/rng.hpp"
#include "roledet/statistics.hpp"
#include "roledet/synthetic.hpp"
#include "support.hpp"

using namespace roledet;
using roledet::test::M;
using roledet::test::make_doc;

namespace {

AnnotatedCorpus small_corpus() {
  AnnotatedCorpus c;
  c.documents.push_back(make_doc("d1",
                                 {"Lashkar claimed responsibility for the blast in Mumbai",
                                  "Police arrested Abu Salem on Sunday"},
                                 {{"lash", 0, 0, 0, Role::ORG_Accused},
                                  {"mum", 0, 7, 7, Role::LOC_Event},
                                  {"abu", 1, 2, 3, Role::PER_Accused}}));
  c.documents.push_back(make_doc("d2", {"Abu Salem was produced in court", "Salem denied charges"},
                                 {{"abu", 0, 0, 1, Role::PER_Accused}, {"abu", 1, 0, 0, Role::PER_Others}}));
  return c;
}

}  // namespace

TEST_CASE("role names round trip") {
  for (Role r : kAllRoles) {
    CHECK(parse_role(role_name(r)) == r);
    CHECK(role_from_token(role_token(r)) == r);
  }
  CHECK(role_token(Role::ORG_Accused) == "<ORG_Accused>");
  CHECK_FALSE(parse_role("ORG_Bystander").has_value());
  CHECK_THROWS_AS(require_role("ORG_Bystander"), UnknownRoleError);
  CHECK(entity_type(Role::LOC_Event) == "LOC");
  CHECK(kStudyRoles.size() == 6);
  CHECK_FALSE(in_study(Role::LOC_Victim));
  CHECK_FALSE(in_study(Role::PER_Others));
}

TEST_CASE("finalize sorts mentions and assigns ordinals") {
  Document d = make_doc("d", {"a b c", "d e"},
                        {{"x", 1, 0, 0, Role::PER_Victim}, {"y", 0, 1, 2, Role::ORG_Victim}, {"x", 0, 0, 0, Role::PER_Accused}});
  REQUIRE(d.mentions.size() == 3);
  CHECK(d.mentions[0].span == Span{0, 0, 0});
  CHECK(d.mentions[1].span == Span{0, 1, 2});
  CHECK(d.mentions[2].span == Span{1, 0, 0});
  CHECK(d.mentions[0].ordinal == 0);
  CHECK(d.mentions[2].ordinal == 1);
  CHECK(d.mentions[1].ordinal == 0);
}

TEST_CASE("finalize rejects bad spans") {
  CHECK_THROWS_AS(make_doc("d", {"a b"}, {{"x", 0, 1, 2, Role::PER_Victim}}), SpanError);
  CHECK_THROWS_AS(make_doc("d", {"a b"}, {{"x", 1, 0, 0, Role::PER_Victim}}), SpanError);
  CHECK_THROWS_AS(make_doc("d", {"a b c"}, {{"x", 0, 0, 1, Role::PER_Victim}, {"y", 0, 1, 2, Role::PER_Victim}}),
                  SpanError);
  Document d;
  d.id = "d";
  d.sentences = {{{"a", "a"}, {"b", "b"}}};
  d.mentions.push_back({"x", {0, 1, 0}, Role::PER_Victim, 0});
  CHECK_THROWS_AS(finalize(d), SpanError);
}

TEST_CASE("mention mask marks covered tokens") {
  const AnnotatedCorpus c = small_corpus();
  const auto mask = mention_mask(c.documents[0]);
  CHECK(mask[0][0] == 0);
  CHECK(mask[0][1] == -1);
  CHECK(mask[0][7] == 1);
  CHECK(mask[1][2] == 2);
  CHECK(mask[1][3] == 2);
  CHECK(mask[1][4] == -1);
}

TEST_CASE("jsonl round trip") {
  const AnnotatedCorpus c = small_corpus();
  std::stringstream s;
  write_jsonl(c, s);
  const AnnotatedCorpus back = read_jsonl(s);
  CHECK(back == c);
}

TEST_CASE("jsonl errors carry line numbers") {
  std::stringstream s;
  s << R"({"id":"a","sentences":[["x"]],"mentions":[]})" << "\n"
    << R"({"id":"b","sentences":[["x"]],"mentions":[{"entity":"e","sent":0,"start":0,"end":0,"role":"PER_Nobody"}]})"
    << "\n";
  try {
    read_jsonl(s, "f.jsonl");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("f.jsonl:2") != std::string::npos);
  }
  std::stringstream broken("{\"id\": \n");
  CHECK_THROWS_AS(read_jsonl(broken), ParseError);
  std::stringstream overlap(
      R"({"id":"a","sentences":[["x","y"]],"mentions":[{"entity":"e","sent":0,"start":0,"end":1,"role":"PER_Victim"},{"entity":"f","sent":0,"start":1,"end":1,"role":"PER_Victim"}]})");
  CHECK_THROWS_AS(read_jsonl(overlap), ParseError);
}

TEST_CASE("column format derives BIO tags and round trips tokens and spans") {
  const AnnotatedCorpus c = small_corpus();
  CHECK(bio_tags(c.documents[0], 1) == std::vector<std::string>{"O", "O", "B-PER_Accused", "I-PER_Accused", "O", "O"});
  std::stringstream s;
  write_column(c, s);
  const AnnotatedCorpus back = read_column(s);
  REQUIRE(back.documents.size() == 2);
  for (std::size_t d = 0; d < 2; ++d) {
    CHECK(back.documents[d].id == c.documents[d].id);
    CHECK(back.documents[d].sentences == c.documents[d].sentences);
    REQUIRE(back.documents[d].mentions.size() == c.documents[d].mentions.size());
    for (std::size_t m = 0; m < c.documents[d].mentions.size(); ++m) {
      CHECK(back.documents[d].mentions[m].span == c.documents[d].mentions[m].span);
      CHECK(back.documents[d].mentions[m].role == c.documents[d].mentions[m].role);
    }
  }
  // No coreference in column format: each span is its own entity.
  CHECK(back.documents[1].mentions[0].entity_key != back.documents[1].mentions[1].entity_key);
}

TEST_CASE("column reader repairs dangling I- tags and rejects junk") {
  std::stringstream s("-DOCSTART- x\n\na\tI-PER_Victim\nb\tI-PER_Victim\nc\tO\nd\tI-LOC_Event\n");
  const AnnotatedCorpus c = read_column(s);
  REQUIRE(c.documents.size() == 1);
  REQUIRE(c.documents[0].mentions.size() == 2);
  CHECK(c.documents[0].mentions[0].span == Span{0, 0, 1});
  CHECK(c.documents[0].mentions[1].span == Span{0, 3, 3});
  std::stringstream bad("-DOCSTART- x\n\na\tB-PER_Nobody\n");
  CHECK_THROWS_AS(read_column(bad), ParseError);
  std::stringstream missing("-DOCSTART- x\n\na\n");
  CHECK_THROWS_AS(read_column(missing), ParseError);
}

TEST_CASE("role frequencies equal a mention recount") {
  const AnnotatedCorpus c = small_corpus();
  const RoleCounts counts = role_frequencies(c);
  CHECK(counts[role_index(Role::PER_Accused)] == 2);
  CHECK(counts[role_index(Role::PER_Others)] == 1);
  CHECK(counts[role_index(Role::ORG_Accused)] == 1);
  CHECK(counts[role_index(Role::LOC_Event)] == 1);
  std::size_t total = 0;
  for (auto n : counts) total += n;
  CHECK(total == c.mention_count());
}

TEST_CASE("substitute_roles collapses every mention into one role token") {
  const AnnotatedCorpus c = small_corpus();
  const TokenStream s = substitute_roles(c);
  REQUIRE(s.size() == 4);
  CHECK(s[1] == std::vector<std::string>{"Police", "arrested", "<PER_Accused>", "on", "Sunday"});
  std::size_t role_tokens = 0;
  for (const auto& sent : s)
    for (const auto& t : sent)
      if (role_from_token(t)) ++role_tokens;
  CHECK(role_tokens == c.mention_count());
}

TEST_CASE("suffix stemmer") {
  CHECK(suffix_stem("arrested") == "arrest");
  CHECK(suffix_stem("bombings") == "bombing");
  CHECK(suffix_stem("killing") == "kill");
  CHECK(suffix_stem("injuries") == "injury");
  CHECK(suffix_stem("classes") == "class");
  CHECK(suffix_stem("attacks") == "attack");
  CHECK(suffix_stem("status") == "status");
  CHECK(suffix_stem("red") == "red");
  CHECK(suffix_stem("sing") == "sing");
  CHECK(suffix_stem("critically") == "critical");
  CHECK(suffix_stem("churches") == "church");
}

TEST_CASE("preprocess drops stopwords outside mentions and never moves spans") {
  AnnotatedCorpus c;
  c.documents.push_back(make_doc("d", {"The Police arrested The Who in Delhi"},
                                 {{"who", 0, 3, 4, Role::ORG_Accused}, {"del", 0, 6, 6, Role::LOC_Event}}));
  PreprocessConfig cfg;
  cfg.stopwords = default_stopwords();
  const AnnotatedCorpus p = preprocess(c, cfg);
  const auto& s = p.documents[0].sentences[0];
  CHECK(s[0].normalized.empty());
  CHECK(s[1].normalized == "police");
  CHECK(s[2].normalized == "arrest");
  CHECK(s[3].normalized == "the");
  CHECK(s[4].normalized == "who");
  CHECK(s[5].normalized.empty());
  CHECK(s[6].normalized == "delhi");
  CHECK(p.documents[0].mentions == c.documents[0].mentions);
  CHECK(s[0].surface == "The");
  CHECK(phrase_form(s[5]) == "in");
}

TEST_CASE("stopword file matches the built-in list") {
  const auto path = std::filesystem::path(ROLEDET_SOURCE_DIR) / "data" / "stopwords.txt";
  CHECK(load_stopwords(path) == default_stopwords());
}

TEST_CASE("majority role and the documented statistics examples") {
  CHECK(majority_role({Role::PER_Victim, Role::PER_Victim, Role::PER_Accused}) == Role::PER_Victim);
  CHECK(majority_role({Role::PER_Accused, Role::PER_Victim}) == Role::PER_Accused);
  CHECK(majority_role({Role::PER_Victim, Role::PER_Accused, Role::PER_Accused, Role::PER_Victim}) == Role::PER_Victim);

  AnnotatedCorpus c;
  c.documents.push_back(make_doc("d", {"A x", "A y", "A z", "B w"},
                                 {{"a", 0, 0, 0, Role::PER_Victim},
                                  {"a", 1, 0, 0, Role::PER_Victim},
                                  {"a", 2, 0, 0, Role::PER_Accused},
                                  {"b", 3, 0, 0, Role::LOC_Event}}));
  const StatisticsReport r = mention_statistics(c);
  CHECK(r.entities == 2);
  CHECK(r.multi_mention_entities == 1);
  CHECK(r.multi_mention_fraction == doctest::Approx(0.5));
  CHECK(r.majority_share_multi == doctest::Approx(2.0 / 3.0));
  CHECK(r.majority_share_all == doctest::Approx((2.0 / 3.0 + 1.0) / 2.0));
  CHECK(r.first_mention_majority_multi == doctest::Approx(1.0));
  CHECK(r.histogram.at(1) == 1);
  CHECK(r.histogram.at(3) == 1);
  CHECK(r.by_majority_role[role_index(Role::PER_Victim)].entities == 1);
}

TEST_CASE("singleton-only and all-equal corpora") {
  AnnotatedCorpus single;
  single.documents.push_back(make_doc("d", {"A B C"}, {{"a", 0, 0, 0, Role::PER_Victim}, {"b", 0, 2, 2, Role::ORG_Victim}}));
  const auto s = mention_statistics(single);
  CHECK(s.multi_mention_fraction == 0.0);
  CHECK(s.majority_share_all == 1.0);
  CHECK(s.first_mention_majority_all == 1.0);

  AnnotatedCorpus equal;
  equal.documents.push_back(make_doc("d", {"A", "A", "B", "B"},
                                     {{"a", 0, 0, 0, Role::PER_Victim},
                                      {"a", 1, 0, 0, Role::PER_Victim},
                                      {"b", 2, 0, 0, Role::LOC_Event},
                                      {"b", 3, 0, 0, Role::LOC_Event}}));
  const auto e = mention_statistics(equal);
  CHECK(e.majority_share_multi == 1.0);
  CHECK(e.first_mention_majority_multi == 1.0);
}

TEST_CASE("entities are keyed per document") {
  AnnotatedCorpus c;
  c.documents.push_back(make_doc("d1", {"A"}, {{"a", 0, 0, 0, Role::PER_Victim}}));
  c.documents.push_back(make_doc("d2", {"A"}, {{"a", 0, 0, 0, Role::PER_Accused}}));
  CHECK(mention_statistics(c).entities == 2);
}

TEST_CASE("synthetic generator is deterministic and validated") {
  SyntheticSpec spec;
  spec.documents = 20;
  const auto a = generate_synthetic(1, spec);
  const auto b = generate_synthetic(1, spec);
  std::stringstream sa, sb;
  write_jsonl(a.corpus, sa);
  write_jsonl(b.corpus, sb);
  CHECK(sa.str() == sb.str());
  const auto c = generate_synthetic(2, spec);
  CHECK_FALSE(c.corpus == a.corpus);

  SyntheticSpec bad = spec;
  bad.majority_noise = 1.5;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = spec;
  bad.cues.erase(Role::ORG_Accused);
  CHECK_THROWS_AS(bad.validate(), InputError);
  CHECK_THROWS_AS(spec_from_json(nlohmann::json{{"multi_mention_rate", -0.1}}), InputError);
}

TEST_CASE("noise 0: every mention sentence carries its own role's cue") {
  SyntheticSpec spec;
  spec.documents = 30;
  const auto g = generate_synthetic(5, spec);
  const auto cues = default_cues();
  for (const auto& doc : g.corpus.documents)
    for (const auto& m : doc.mentions) {
      std::vector<std::string> words;
      for (const auto& t : doc.sentences[m.span.sentence]) words.push_back(t.surface);
      const std::string sentence = " " + join(words, " ") + " ";
      bool found = false;
      for (const auto& cue : cues.at(m.role)) found = found || sentence.find(" " + cue + " ") != std::string::npos;
      CHECK_MESSAGE(found, sentence);
    }
  CHECK(g.truth.wrong_cue_mentions == 0);
  CHECK(g.truth.cued_mentions == g.truth.mentions);
}

TEST_CASE("synthetic spec JSON round trip") {
  SyntheticSpec spec;
  spec.documents = 7;
  spec.majority_noise = 0.2;
  spec.roles = {Role::PER_Victim, Role::LOC_Event};
  const SyntheticSpec back = spec_from_json(to_json(spec));
  CHECK(to_json(back) == to_json(spec));
}

TEST_CASE("planted multi-mention rate is recovered") {
  SyntheticSpec spec;
  spec.documents = 125;  // 1000 entities
  const auto g = generate_synthetic(11, spec);
  CHECK(g.truth.entities.size() == 1000);
  const auto r = mention_statistics(g.corpus);
  CHECK(std::abs(r.multi_mention_fraction - 0.23) <= 0.02);
  CHECK(r.multi_mention_fraction == doctest::Approx(g.truth.multi_mention_fraction));
}
