#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "roledet/corpus.hpp"
#include "roledet/preprocess.hpp"

namespace roledet {

enum class PhraseSource { collocation, relation };

struct PhraseEntry {
  double score = 0.0;
  PhraseSource source = PhraseSource::collocation;
  bool operator==(const PhraseEntry&) const = default;
};

using Bigram = std::pair<std::string, std::string>;

/// Bigram phrases keyed by their two phrase forms. Merged tokens join the two
/// halves with `joiner`.
struct PhraseTable {
  std::map<Bigram, PhraseEntry> phrases;
  std::string joiner = "_";

  std::size_t size() const { return phrases.size(); }
  bool contains(const std::string& a, const std::string& b) const { return phrases.count({a, b}) > 0; }
  std::string joined(const Bigram& b) const { return b.first + joiner + b.second; }
  bool operator==(const PhraseTable&) const = default;
};

struct PhraseConfig {
  double delta = 5.0;
  /// Cutoff per million tokens: a bigram is kept when its score times N/1e6 reaches it.
  double threshold = 1e-4;
  std::size_t passes = 1;
  /// Drop bigrams with a stopword half (e.g. "on sunday").
  bool drop_stopword_bigrams = false;
  std::set<std::string> stopwords;

  void validate() const;
};

/// score(a,b) = (count(ab) - delta) / (count(a) * count(b)), with bigrams counted
/// inside sentences only. Bigrams with count(ab) <= delta are never kept.
PhraseTable collocation_scores(const TokenStream& stream, const PhraseConfig& cfg);

/// Phrase-form stream of a corpus (removed stopwords included via their lowercased surface).
TokenStream phrase_stream(const AnnotatedCorpus& corpus);

struct RelationLoad {
  PhraseTable table;
  std::size_t rows = 0;
  std::size_t skipped = 0;
};

/// TSV rows "doc_id<TAB>subject<TAB>relation<TAB>object". Every adjacent pair of
/// normalized relation words becomes a phrase scored by its occurrence count.
RelationLoad read_relation_phrases(std::istream& in, const PreprocessConfig& cfg);
RelationLoad load_relation_phrases(const std::filesystem::path& path, const PreprocessConfig& cfg);

/// "phrase<TAB>score<TAB>source" rows.
void write_phrase_table(const PhraseTable& table, std::ostream& out);
PhraseTable read_phrase_table(std::istream& in, const std::string& source = "<stream>");

/// Union of two tables; entries already in `into` win.
void merge_tables(PhraseTable& into, const PhraseTable& from);

/// Rewrites each sentence left to right, `passes` times, joining matched adjacent
/// pairs into one token. Tokens inside mention spans never take part in a merge;
/// spans are re-indexed to the new positions.
AnnotatedCorpus merge_phrases(const AnnotatedCorpus& corpus, const PhraseTable& table, std::size_t passes = 1);

}  // namespace roledet
