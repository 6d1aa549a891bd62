#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "roledet/corpus.hpp"
#include "roledet/crf.hpp"
#include "roledet/embeddings.hpp"
#include "roledet/phrases.hpp"
#include "roledet/preprocess.hpp"
#include "roledet/ranking.hpp"
#include "roledet/representations.hpp"
#include "roledet/tag_report.hpp"

namespace roledet {

enum class PhraseMode { none, collocation, relation };
std::string_view phrase_mode_name(PhraseMode mode);
PhraseMode parse_phrase_mode(std::string_view name);

/// "TV" or "TV-SW<n>".
struct QuerySpec {
  QueryKind kind = QueryKind::tv;
  std::size_t n = 0;
  std::string name() const { return query_name(kind, n); }
  bool operator==(const QuerySpec&) const = default;
};
QuerySpec parse_query(std::string_view name);

struct PipelineConfig {
  // corpus
  std::vector<std::filesystem::path> corpus;
  CorpusFormat format = CorpusFormat::jsonl;
  /// Tagging test split; when empty a seeded share of documents is held out.
  std::vector<std::filesystem::path> test_corpus;
  double test_fraction = 0.2;

  // preprocessing; stopwords empty means the built-in list
  std::optional<std::filesystem::path> stopwords;
  Stemmer stemmer = Stemmer::suffix;
  bool lowercase = true;

  // phrases
  std::vector<PhraseMode> phrase_modes{PhraseMode::none};
  PhraseConfig phrases;
  std::optional<std::filesystem::path> relations;

  // embeddings
  std::size_t dim = 50;
  std::uint64_t min_count = 1;
  TrainConfig train;
  std::optional<std::filesystem::path> pretrained;
  std::uint64_t role_min_count = 1;
  std::size_t role_epochs = 5;

  // representations and ranking
  std::vector<RepresentationKind> kinds{RepresentationKind::centroid};
  std::vector<std::size_t> radii{5};
  std::vector<ContextLevel> contexts{ContextLevel::sentence};
  std::vector<QuerySpec> queries{QuerySpec{}};
  DocvecConfig docvec;
  std::size_t kmax = 5;
  Relevance relevance = Relevance::majority;

  // taggers
  std::vector<std::string> taggers{"hmm", "crf"};
  double hmm_alpha_t = 0.1;
  double hmm_alpha_e = 0.1;
  double crf_lambda = 0.1;
  CrfOptimizerConfig crf;
  /// System name -> column-format predictions aligned with the test split.
  std::map<std::string, std::filesystem::path> external_predictions;

  std::filesystem::path out = "out";
  std::uint64_t seed = 1;
  bool deterministic = false;

  /// Throws InputError on bad values or missing referenced files.
  void validate() const;
  PreprocessConfig preprocess_config() const;
};

/// Missing keys keep their defaults; unknown keys are an InputError.
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PipelineConfig& cfg);
PipelineConfig load_config(const std::filesystem::path& path);
/// Writes resolved_config.json into cfg.out.
void write_resolved_config(const PipelineConfig& cfg);

/// Concatenation of every corpus file, documents in file order.
AnnotatedCorpus load_corpora(const std::vector<std::filesystem::path>& paths, CorpusFormat format);

/// Preprocessing plus the phrase merge of the given mode. The table used (if
/// any) is returned through `table`.
AnnotatedCorpus prepare_corpus(const AnnotatedCorpus& raw, const PipelineConfig& cfg, PhraseMode mode,
                               PhraseTable* table = nullptr);

PhraseTable build_phrase_table(const AnnotatedCorpus& preprocessed, const PipelineConfig& cfg, PhraseMode mode);

struct TrainedModels {
  EmbeddingModel base;
  TrainStats base_stats;
  RoleModel roles;
};

/// Word vectors over the normalized stream, then role vectors on top of them.
TrainedModels train_models(const AnnotatedCorpus& prepared, const PipelineConfig& cfg);

struct MethodSpec {
  RepresentationKind kind = RepresentationKind::centroid;
  std::size_t radius = 5;
  ContextLevel context = ContextLevel::sentence;
  QuerySpec query;
  PhraseMode phrases = PhraseMode::none;
  /// e.g. "E-V-C-N5/TV/sentence/none"
  std::string label() const;
};

/// One ranked list per (document, in-study role).
std::vector<RankedList> rank_corpus(const AnnotatedCorpus& prepared, const CorpusRepresentations& reps,
                                    const std::vector<RoleQuery>& queries, Relevance relevance = Relevance::majority);

struct MethodResult {
  MethodSpec spec;
  RankingReport report;
  std::vector<RankedList> lists;
  /// Expected mAP@1 of a uniformly random order over the same queries.
  double random_map_at_1 = 0.0;
};

MethodResult run_method(const AnnotatedCorpus& prepared, const EmbeddingModel& model, const MethodSpec& spec,
                        const PipelineConfig& cfg);

/// Mean over queries with a relevant entity of relevant / entities.
double random_map_at_1(const std::vector<RankedList>& lists);

/// Every enumerated variant: phrase modes x kinds x radii x contexts x queries.
std::vector<MethodResult> run_ranking(const AnnotatedCorpus& raw, const PipelineConfig& cfg);

/// Writes methods.csv, ranking_report.json, curve_*.csv, roles_*.csv,
/// rankings_*.jsonl and, when the
/// variants allow it, word_vs_phrase.csv and sentence_vs_document.csv.
void write_ranking_outputs(const std::vector<MethodResult>& results, const PipelineConfig& cfg);

struct TrainTestSplit {
  AnnotatedCorpus train;
  AnnotatedCorpus test;
};
/// Seeded document-level holdout of round(fraction * documents), at least one each side.
TrainTestSplit split_corpus(const AnnotatedCorpus& corpus, double fraction, std::uint64_t seed);

struct TaggingResult {
  std::vector<TaggerReport> reports;
  /// System name -> one tag-index sequence per non-empty test sentence.
  std::map<std::string, std::vector<std::vector<std::size_t>>> predictions;
  std::vector<double> crf_loss;
};

TaggingResult run_tagging(const AnnotatedCorpus& train, const AnnotatedCorpus& test, const PipelineConfig& cfg);

/// tag_report.json, precision_table.csv, predictions_<system>.conll, crf_loss.csv.
void write_tagging_outputs(const TaggingResult& result, const AnnotatedCorpus& test, const PipelineConfig& cfg);

/// Writes a whole file, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace roledet
