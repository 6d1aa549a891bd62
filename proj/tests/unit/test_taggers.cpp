#include <doctest.h>

#include <limits>
#include <sstream>

#include "roledet/crf.hpp"
#include "roledet/errors.hpp"
#include "roledet/hmm.hpp"
#include "roledet/rng.hpp"
#include "roledet/synthetic.hpp"
#include "roledet/tag_report.hpp"
#include "support.hpp"

using namespace roledet;
using roledet::test::M;
using roledet::test::make_doc;

namespace {

/// Every tag path of length n over T tags, lowest index first.
std::vector<std::vector<std::size_t>> all_paths(std::size_t n, std::size_t T) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> p(n, 0);
  while (true) {
    out.push_back(p);
    std::size_t i = n;
    while (i > 0 && ++p[i - 1] == T) p[--i] = 0;
    if (i == 0) break;
  }
  return out;
}

Eigen::VectorXd random_vec(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform(-2, 2);
  return v;
}

Eigen::MatrixXd random_mat(Rng& rng, Eigen::Index r, Eigen::Index c) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-2, 2);
  return m;
}

std::vector<TaggedSequence> toy_sequences() {
  const TagSet tags({"O", "B-PER_Victim", "I-PER_Victim"});
  return {
      {{"Ravi", "Kumar", "died"}, {1, 2, 0}},
      {{"police", "found", "Ravi"}, {0, 0, 1}},
      {{"Sita", "was", "hurt"}, {1, 0, 0}},
      {{"the", "blast"}, {0, 0}},
  };
}

TagSet toy_tags() { return TagSet({"O", "B-PER_Victim", "I-PER_Victim"}); }

}  // namespace

TEST_CASE("BIO decoding and repairs") {
  const auto b = decode_bio({"B-PER_Victim", "I-PER_Victim", "O", "I-LOC_Event", "I-LOC_Event", "B-LOC_Event",
                             "I-PER_Victim"});
  REQUIRE(b.spans.size() == 4);
  CHECK(b.spans[0] == TagSpan{0, 1, Role::PER_Victim});
  CHECK(b.spans[1] == TagSpan{3, 4, Role::LOC_Event});
  CHECK(b.spans[2] == TagSpan{5, 5, Role::LOC_Event});
  CHECK(b.spans[3] == TagSpan{6, 6, Role::PER_Victim});
  CHECK(b.repairs == 2);
  CHECK_THROWS_AS(decode_bio({"X-PER_Victim"}), InputError);
  CHECK_THROWS_AS(decode_bio({"B-PER_Nobody"}), InputError);
}

TEST_CASE("tag sets") {
  const TagSet bio = TagSet::bio();
  CHECK(bio.size() == 21);
  CHECK(bio.name(0) == "O");
  CHECK(bio.index("I-LOC_Others") == 20);
  CHECK_THROWS_AS(bio.index("B-X"), InputError);
  CHECK_THROWS_AS(TagSet({"O", "O"}), InputError);

  AnnotatedCorpus c;
  c.documents.push_back(make_doc("d", {"Ravi Kumar died", "quiet day"}, {{"r", 0, 0, 1, Role::PER_Victim}}));
  const auto seqs = tagged_sequences(c, bio);
  REQUIRE(seqs.size() == 2);
  CHECK(seqs[0].tags == std::vector<std::size_t>{bio.index("B-PER_Victim"), bio.index("I-PER_Victim"), 0});
  const auto back = with_predicted_tags(c, bio, {seqs[0].tags, seqs[1].tags});
  REQUIRE(back.documents[0].mentions.size() == 1);
  CHECK(back.documents[0].mentions[0].span == c.documents[0].mentions[0].span);
}

TEST_CASE("HMM with zero smoothing is the maximum-likelihood estimate") {
  const auto data = toy_sequences();
  const HmmModel m = hmm_train(data, toy_tags(), 0.0, 0.0);
  // 4 sequences: O starts twice, B starts twice.
  CHECK(m.initial(0) == doctest::Approx(0.5));
  CHECK(m.initial(1) == doctest::Approx(0.5));
  CHECK(m.initial(2) == 0.0);
  // From B: I once, O once.
  CHECK(m.transition(1, 2) == doctest::Approx(0.5));
  CHECK(m.transition(1, 0) == doctest::Approx(0.5));
  CHECK(m.transition(2, 0) == doctest::Approx(1.0));
  // A tag never seen in training gets uniform rows.
  const HmmModel wide = hmm_train(data, TagSet({"O", "B-PER_Victim", "I-PER_Victim", "B-LOC_Event"}), 0.0, 0.0);
  CHECK(wide.transition(3, 1) == doctest::Approx(0.25));
  CHECK(wide.initial(3) == 0.0);
  // B emits Ravi twice, Sita once.
  CHECK(m.emission(1, static_cast<Eigen::Index>(m.word("Ravi"))) == doctest::Approx(2.0 / 3.0));
  CHECK(m.emission(1, static_cast<Eigen::Index>(m.unknown())) == 0.0);
  CHECK(m.word("never-seen") == m.unknown());
}

TEST_CASE("HMM distributions are normalized and smoothing reaches unknown words") {
  const HmmModel m = hmm_train(toy_sequences(), toy_tags(), 0.1, 0.1);
  CHECK(std::abs(m.initial.sum() - 1.0) < 1e-12);
  for (Eigen::Index r = 0; r < 3; ++r) {
    CHECK(std::abs(m.transition.row(r).sum() - 1.0) < 1e-12);
    CHECK(std::abs(m.emission.row(r).sum() - 1.0) < 1e-12);
    CHECK(m.emission(r, static_cast<Eigen::Index>(m.unknown())) > 0.0);
  }
  CHECK_THROWS_AS(hmm_train({}, toy_tags()), InputError);
  CHECK_THROWS_AS(hmm_train(toy_sequences(), toy_tags(), -1.0), InputError);
}

TEST_CASE("HMM Viterbi equals brute force") {
  const HmmModel m = hmm_train(toy_sequences(), toy_tags(), 0.3, 0.2);
  const std::vector<std::vector<std::string>> inputs{
      {"Ravi"}, {"Ravi", "Kumar", "died"}, {"police", "found", "Sita", "Kumar"}, {"unknown", "Ravi", "was", "x"}};
  for (const auto& tokens : inputs) {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_path;
    for (const auto& p : all_paths(tokens.size(), 3)) {
      const double s = m.log_joint(tokens, p);
      if (s > best) {
        best = s;
        best_path = p;
      }
    }
    const auto v = viterbi_decode(m, tokens);
    CHECK(v == best_path);
    CHECK(std::abs(m.log_joint(tokens, v) - best) < 1e-9);
  }
  CHECK(viterbi_decode(m, {}).empty());
}

TEST_CASE("Viterbi ties go to the lower tag index") {
  const Vec<double> start = Vec<double>::Zero(3);
  const Mat<double> trans = Mat<double>::Zero(3, 3);
  const Mat<double> emit = Mat<double>::Zero(4, 3);
  CHECK(viterbi<double>(start, trans, emit) == std::vector<std::size_t>(4, 0));
}

TEST_CASE("forward-backward normalizer equals brute force") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t T = 1 + rng.below(4), n = 1 + rng.below(5);
    const Vec<double> start = random_vec(rng, static_cast<Eigen::Index>(T));
    const Mat<double> trans = random_mat(rng, static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(T));
    const Mat<double> emit = random_mat(rng, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(T));
    std::vector<double> scores;
    for (const auto& p : all_paths(n, T)) scores.push_back(path_score<double>(start, trans, emit, p));
    const double mx = *std::max_element(scores.begin(), scores.end());
    double acc = 0;
    for (double s : scores) acc += std::exp(s - mx);
    const auto fb = forward_backward<double>(start, trans, emit);
    CHECK(std::abs(fb.log_z - (mx + std::log(acc))) < 1e-8);
    // alpha + beta gives the same normalizer at every position.
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
      const Vec<double> ab = (fb.alpha.row(i) + fb.beta.row(i)).transpose();
      CHECK(std::abs(log_sum_exp<double>(ab) - fb.log_z) < 1e-9);
    }
  }
}

TEST_CASE("CRF features") {
  const auto f = extract_features({"Abu", "SALEM", "fled"});
  REQUIRE(f.size() == 3);
  const auto has = [](const std::vector<std::string>& v, const std::string& x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };
  CHECK(has(f[0], "bias"));
  CHECK(has(f[0], "w=abu"));
  CHECK(has(f[0], "initcap"));
  CHECK(has(f[0], "-1:BOS"));
  CHECK(has(f[0], "+1:w=salem"));
  CHECK(has(f[0], "+1:allcaps"));
  CHECK(has(f[1], "allcaps"));
  CHECK_FALSE(has(f[1], "initcap"));
  CHECK(has(f[2], "p3=fle"));
  CHECK(has(f[2], "+1:EOS"));
}

TEST_CASE("CRF with zero weights predicts tag 0 and a single tag set is trivial") {
  CrfOptimizerConfig cfg;
  cfg.epochs = 0;
  const auto zero = crf_train(toy_sequences(), toy_tags(), 0.1, cfg);
  CHECK(zero.model.squared_norm() == 0.0);
  CHECK(crf_decode(zero.model, {"Ravi", "Kumar", "died"}) == std::vector<std::size_t>{0, 0, 0});
  REQUIRE(zero.stats.loss.size() == 1);
  // Uniform over 3^n paths: loss = sum n log 3.
  CHECK(zero.stats.loss[0] == doctest::Approx((3 + 3 + 3 + 2) * std::log(3.0)));

  std::vector<TaggedSequence> single{{{"a", "b"}, {0, 0}}, {{"c"}, {0}}};
  cfg.epochs = 3;
  const auto one = crf_train(single, TagSet({"O"}), 0.1, cfg);
  CHECK(crf_decode(one.model, {"x", "y", "z"}) == std::vector<std::size_t>{0, 0, 0});
  CHECK(crf_loss(one.model, {make_instance(one.model, {"a", "b"}, {0, 0})}, 0.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(crf_train({}, toy_tags(), 0.1), InputError);
}

TEST_CASE("CRF Viterbi and normalizer equal brute force, gradient equals finite differences") {
  CrfOptimizerConfig cfg;
  cfg.epochs = 0;
  CrfModel m = crf_train(toy_sequences(), toy_tags(), 0.5, cfg).model;
  Rng rng(13);
  m.state = random_mat(rng, m.state.rows(), m.state.cols());
  m.trans = random_mat(rng, 3, 3);
  m.start = random_vec(rng, 3);

  std::vector<CrfInstance> data;
  for (const auto& s : toy_sequences()) data.push_back(make_instance(m, s.tokens, s.tags));
  for (const auto& inst : data) {
    const Eigen::MatrixXd emit = emission_potentials(m, inst);
    double best = -1e300;
    std::vector<std::size_t> best_path;
    for (const auto& p : all_paths(inst.tags.size(), 3)) {
      const double s = path_score<double>(m.start, m.trans, emit, p);
      if (s > best) {
        best = s;
        best_path = p;
      }
    }
    CHECK(viterbi<double>(m.start, m.trans, emit) == best_path);
  }

  CrfGradient g{Eigen::MatrixXd::Zero(m.state.rows(), 3), Eigen::MatrixXd::Zero(3, 3), Eigen::VectorXd::Zero(3)};
  crf_loss(m, data, 1.0, &g);
  const double h = 1e-5;
  auto check_block = [&](Eigen::Ref<Eigen::MatrixXd> w, const Eigen::MatrixXd& analytic) {
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double keep = w.data()[i];
      w.data()[i] = keep + h;
      const double up = crf_loss(m, data);
      w.data()[i] = keep - h;
      const double down = crf_loss(m, data);
      w.data()[i] = keep;
      const double fd = (up - down) / (2 * h);
      CHECK(std::abs(fd - analytic.data()[i]) / std::max(1.0, std::abs(fd)) < 1e-4);
    }
  };
  check_block(m.state, g.state);
  check_block(m.trans, g.trans);
  check_block(m.start, g.start);
}

TEST_CASE("CRF training lowers the loss and a stronger penalty shrinks the weights") {
  SyntheticSpec spec;
  spec.documents = 20;
  const auto g = generate_synthetic(3, spec);
  const TagSet tags = TagSet::bio();
  const auto data = tagged_sequences(g.corpus, tags);
  CrfOptimizerConfig cfg;
  cfg.epochs = 5;
  const auto weak = crf_train(data, tags, 0.01, cfg);
  const auto strong = crf_train(data, tags, 1.0, cfg);
  CHECK(weak.stats.loss.size() == 6);
  CHECK(weak.stats.loss.back() < 0.5 * weak.stats.loss.front());
  CHECK(strong.model.squared_norm() < weak.model.squared_norm());
  const auto again = crf_train(data, tags, 0.01, cfg);
  CHECK(again.model.state == weak.model.state);
  // Beats tagging everything O on its own training data.
  std::size_t right = 0, outside = 0;
  for (const auto& s : data) {
    const auto p = crf_decode(weak.model, s.tokens);
    for (std::size_t i = 0; i < p.size(); ++i) {
      right += p[i] == s.tags[i];
      outside += s.tags[i] == 0;
    }
  }
  CHECK(right > outside);
}

TEST_CASE("precision report on perfect predictions and n/a roles") {
  const std::vector<std::vector<std::string>> gold{{"B-PER_Victim", "I-PER_Victim", "O"}, {"O", "B-LOC_Event"}};
  const auto r = role_precision_report(gold, gold, "GOLD");
  CHECK(*r.mention[role_index(Role::PER_Victim)].precision() == 1.0);
  CHECK(*r.mention[role_index(Role::LOC_Event)].precision() == 1.0);
  CHECK_FALSE(r.mention[role_index(Role::ORG_Accused)].precision().has_value());
  CHECK(*r.macro_precision() == 1.0);
  std::ostringstream table;
  write_precision_table({r}, table);
  CHECK(table.str() ==
        "Role,GOLD\nPER_Victim,1.000000\nPER_Accused,n/a\nORG_Victim,n/a\nORG_Accused,n/a\n"
        "LOC_Event,1.000000\nLOC_Accused,n/a\nAverage Precision,1.000000\n");
  CHECK_THROWS_AS(role_precision_report(gold, {gold[0]}, "x"), InputError);
  CHECK_THROWS_AS(role_precision_report(gold, {gold[0], {"O"}}, "x"), InputError);
  const auto empty = role_precision_report({{"O"}}, {{"O"}}, "none");
  CHECK_FALSE(empty.macro_precision().has_value());
  CHECK(to_json(empty)["average_precision"].is_null());
}

TEST_CASE("precision report matches a hand count over ten sentences") {
  // PER_Victim: predicted 4, correct 2.  PER_Accused: predicted 2, correct 1.
  // LOC_Event: predicted 2, correct 2.  ORG_Victim: predicted 1, correct 0 (wrong boundary).
  // PER_Others predictions are outside the study set.
  const std::vector<std::vector<std::string>> gold{
      {"B-PER_Victim", "O", "O"},
      {"B-PER_Victim", "I-PER_Victim", "O"},
      {"O", "B-PER_Accused"},
      {"B-PER_Accused", "O"},
      {"B-LOC_Event", "O"},
      {"O", "B-LOC_Event", "I-LOC_Event"},
      {"B-ORG_Victim", "I-ORG_Victim", "O"},
      {"O", "O"},
      {"B-PER_Others", "O"},
      {"O", "B-PER_Victim"},
  };
  const std::vector<std::vector<std::string>> pred{
      {"B-PER_Victim", "O", "O"},          // correct
      {"B-PER_Victim", "O", "O"},          // boundary error
      {"O", "B-PER_Accused"},              // correct
      {"B-PER_Victim", "O"},               // role error, counted for PER_Victim
      {"B-LOC_Event", "O"},                // correct
      {"O", "B-LOC_Event", "I-LOC_Event"}, // correct
      {"B-ORG_Victim", "O", "O"},          // boundary error
      {"O", "B-PER_Accused"},              // spurious
      {"B-PER_Others", "O"},               // outside the study set
      {"O", "I-PER_Victim"},               // repaired dangling I-, correct
  };
  const auto r = role_precision_report(gold, pred, "SYS");
  const auto& m = r.mention;
  CHECK(m[role_index(Role::PER_Victim)].predicted == 4);
  CHECK(m[role_index(Role::PER_Victim)].correct == 2);
  CHECK(m[role_index(Role::PER_Accused)].predicted == 2);
  CHECK(m[role_index(Role::PER_Accused)].correct == 1);
  CHECK(m[role_index(Role::LOC_Event)].predicted == 2);
  CHECK(m[role_index(Role::LOC_Event)].correct == 2);
  CHECK(m[role_index(Role::ORG_Victim)].predicted == 1);
  CHECK(m[role_index(Role::ORG_Victim)].correct == 0);
  CHECK(r.repairs == 1);
  CHECK(*r.macro_precision() == doctest::Approx((0.5 + 0.5 + 1.0 + 0.0) / 4.0));
  CHECK(*r.micro_precision() == doctest::Approx(5.0 / 9.0));
  // Token level: the boundary errors still hit on their first token.
  CHECK(r.token[role_index(Role::PER_Victim)].predicted == 4);
  CHECK(r.token[role_index(Role::PER_Victim)].correct == 3);
  CHECK(r.token[role_index(Role::ORG_Victim)].correct == 1);
}
