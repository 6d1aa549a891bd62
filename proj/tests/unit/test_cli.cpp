#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "json.hpp"
#include "roledet/pipeline.hpp"
#include "roledet/statistics.hpp"
#include "roledet/tagging.hpp"
#include "support.hpp"

using namespace roledet;
namespace fs = std::filesystem;
using roledet::test::scratch_dir;
using roledet::test::slurp;

namespace {

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(ROLEDET_CLI) + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

/// Six study roles, short filler padding, no noise.
void write_clean_spec(const fs::path& path) {
  std::ofstream(path) << R"({"documents": 200, "entities_per_document": 6,
    "roles": ["PER_Victim", "PER_Accused", "ORG_Victim", "ORG_Accused", "LOC_Event", "LOC_Accused"],
    "filler_min": 2, "filler_max": 4})";
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) rows.push_back(split(line, ','));
  return rows;
}

}  // namespace

TEST_CASE("exit codes") {
  const auto dir = scratch_dir("cli_exit");
  CHECK(run("--help", dir / "log") == 0);
  CHECK(run("", dir / "log") == 2);
  CHECK(run("frobnicate", dir / "log") == 2);
  CHECK(run("stats -i " + (dir / "missing.jsonl").string() + " -o " + dir.string(), dir / "log") == 2);
  std::ofstream(dir / "bad.jsonl") << R"({"id":"a","sentences":[["x"]],"mentions":[{"entity":"e","sent":0,"start":0,"end":3,"role":"PER_Victim"}]})"
                                   << "\n";
  CHECK(run("ingest -i " + (dir / "bad.jsonl").string() + " -o " + (dir / "o").string(), dir / "log") == 2);
  CHECK(slurp(dir / "log").find("error:") != std::string::npos);
  std::ofstream(dir / "cfg.json") << R"({"embedding": {"dimension": 10}})";
  CHECK(run("stats --config " + (dir / "cfg.json").string(), dir / "log") == 2);
  CHECK(slurp(dir / "log").find("dimension") != std::string::npos);
  CHECK(run("synth --noise 2 -o " + (dir / "s").string(), dir / "log") == 2);
}

TEST_CASE("ingest writes a frequency table equal to a recount") {
  const auto dir = scratch_dir("cli_ingest");
  REQUIRE(run("synth --documents 30 --seed 4 -o " + (dir / "syn").string(), dir / "log") == 0);
  REQUIRE(run("ingest -i " + (dir / "syn" / "corpus.conll").string() + " --format column -o " + (dir / "in").string(),
              dir / "log") == 0);
  const AnnotatedCorpus corpus = load_corpus(dir / "in" / "corpus.jsonl", CorpusFormat::jsonl);
  const RoleCounts counts = role_frequencies(corpus);
  const auto rows = csv_rows(dir / "in" / "role_frequencies.csv");
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0] == std::vector<std::string>{"Role", "Frequency"});
  std::size_t listed = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 2);
    CHECK(std::stoul(rows[i][1]) == counts[role_index(require_role(rows[i][0]))]);
    listed += std::stoul(rows[i][1]);
  }
  CHECK(listed == corpus.mention_count());
  // Column input loses coreference but keeps every mention.
  const AnnotatedCorpus original = load_corpus(dir / "syn" / "corpus.jsonl", CorpusFormat::jsonl);
  CHECK(corpus.mention_count() == original.mention_count());
}

TEST_CASE("convert round trips jsonl through column format") {
  const auto dir = scratch_dir("cli_convert");
  REQUIRE(run("synth --documents 10 -o " + dir.string(), dir / "log") == 0);
  REQUIRE(run("convert -i " + (dir / "corpus.jsonl").string() + " --to column --output " + (dir / "c.conll").string(),
              dir / "log") == 0);
  CHECK(slurp(dir / "c.conll") == slurp(dir / "corpus.conll"));
}

TEST_CASE("stats agree with what the generator planted") {
  const auto dir = scratch_dir("cli_stats");
  REQUIRE(run("synth --documents 125 --noise 0.1 --seed 6 -o " + dir.string(), dir / "log") == 0);
  REQUIRE(run("stats -i " + (dir / "corpus.jsonl").string() + " -o " + (dir / "st").string(), dir / "log") == 0);
  const auto stats = nlohmann::json::parse(slurp(dir / "st" / "statistics.json"));
  const auto truth = nlohmann::json::parse(slurp(dir / "truth.json"));
  CHECK(stats["multi_mention_fraction"].get<double>() == doctest::Approx(truth["multi_mention_fraction"].get<double>()));
  CHECK(stats["majority_share_multi"].get<double>() == doctest::Approx(truth["primary_share_multi"].get<double>()));
  CHECK(stats["first_mention_majority_multi"].get<double>() ==
        doctest::Approx(truth["first_mention_primary_multi"].get<double>()));
  for (const char* f : {"mention_histogram.csv", "majority_by_mentions.csv", "positional_by_role.csv", "summary.csv"})
    CHECK(fs::exists(dir / "st" / f));
}

TEST_CASE("noise-free corpus ranks perfectly") {
  const auto dir = scratch_dir("cli_clean");
  write_clean_spec(dir / "spec.json");
  REQUIRE(run("synth --spec " + (dir / "spec.json").string() + " --seed 1 -o " + dir.string(), dir / "log") == 0);
  REQUIRE(run("rank -i " + (dir / "corpus.jsonl").string() + " --d 2 --seed 1 -o " + (dir / "r").string(),
              dir / "log") == 0);
  const auto rows = csv_rows(dir / "r" / "methods.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][4] == "mAP@1");
  CHECK(rows[1][0] == "E-V-C-N2");
  CHECK(rows[1][4] == "1.000000");
  CHECK(slurp(dir / "log").find("E-V-C-N2,TV,sentence,none,1.000000") != std::string::npos);
}

TEST_CASE("every stage reruns byte for byte") {
  const auto dir = scratch_dir("cli_determinism");
  const std::string corpus = (dir / "a" / "corpus.jsonl").string();
  for (const char* side : {"a", "b"}) {
    const fs::path o = dir / side;
    REQUIRE(run("synth --documents 40 --seed 2 -o " + o.string(), dir / "log") == 0);
    const std::string in = " -i " + corpus + " --seed 2 ";
    REQUIRE(run("stats" + in + "-o " + (o / "stats").string(), dir / "log") == 0);
    REQUIRE(run("phrases" + in + "--phrases collocation -o " + (o / "phrases").string(), dir / "log") == 0);
    REQUIRE(run("embed" + in + "-o " + (o / "embed").string(), dir / "log") == 0);
    REQUIRE(run("represent" + in + "--kind cluster -o " + (o / "represent").string(), dir / "log") == 0);
    REQUIRE(run("rank" + in + "--n 3 -o " + (o / "rank").string(), dir / "log") == 0);
    REQUIRE(run("tag" + in + "-o " + (o / "tag").string(), dir / "log") == 0);
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir / "a")) {
    if (!entry.is_regular_file() || entry.path().filename() == "resolved_config.json") continue;
    const fs::path rel = fs::relative(entry.path(), dir / "a");
    CHECK_MESSAGE(slurp(entry.path()) == slurp(dir / "b" / rel), rel.string());
    ++compared;
  }
  CHECK(compared >= 20);
}

TEST_CASE("tagging report can be recomputed from the written predictions") {
  const auto dir = scratch_dir("cli_tag");
  REQUIRE(run("synth --documents 40 --seed 3 -o " + dir.string(), dir / "log") == 0);
  std::ofstream(dir / "cfg.json") << R"({"tagging": {"crf_epochs": 3}})";
  REQUIRE(run("tag --config " + (dir / "cfg.json").string() + " -i " + (dir / "corpus.jsonl").string() +
                  " --seed 3 -o " + (dir / "t").string(),
              dir / "log") == 0);
  const AnnotatedCorpus corpus = load_corpus(dir / "corpus.jsonl", CorpusFormat::jsonl);
  const TrainTestSplit split = split_corpus(corpus, 0.2, 3);
  std::vector<std::vector<std::string>> gold;
  for (const auto& doc : split.test.documents)
    for (std::size_t s = 0; s < doc.sentences.size(); ++s)
      if (!doc.sentences[s].empty()) gold.push_back(bio_tags(doc, s));

  const auto reports = nlohmann::json::parse(slurp(dir / "t" / "tag_report.json"));
  REQUIRE(reports.size() == 2);
  for (const auto& report : reports) {
    const std::string system = report["system"];
    const AnnotatedCorpus pred = load_corpus(dir / "t" / ("predictions_" + to_lower(system) + ".conll"),
                                             CorpusFormat::column);
    std::vector<std::vector<std::string>> predicted;
    for (const auto& doc : pred.documents)
      for (std::size_t s = 0; s < doc.sentences.size(); ++s)
        if (!doc.sentences[s].empty()) predicted.push_back(bio_tags(doc, s));
    const TaggerReport again = role_precision_report(gold, predicted, system);
    for (Role r : kStudyRoles) {
      const auto& row = report["roles"][std::string(role_name(r))];
      CHECK(row["predicted_mentions"].get<std::size_t>() == again.mention[role_index(r)].predicted);
      CHECK(row["correct_mentions"].get<std::size_t>() == again.mention[role_index(r)].correct);
    }
  }
  const auto table = csv_rows(dir / "t" / "precision_table.csv");
  CHECK(table[0] == std::vector<std::string>{"Role", "HMM", "CRF"});
  CHECK(table.back()[0] == "Average Precision");
  CHECK(csv_rows(dir / "t" / "crf_loss.csv").size() == 5);
}
