#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>

#include "roledet/corpus.hpp"

namespace roledet {

enum class Stemmer { none, suffix };

struct PreprocessConfig {
  /// Compared against the lowercased surface.
  std::set<std::string> stopwords;
  Stemmer stemmer = Stemmer::suffix;
  bool lowercase = true;
};

/// English function words; the same list ships as data/stopwords.txt.
std::set<std::string> default_stopwords();

/// One word per line; '#' starts a comment.
std::set<std::string> load_stopwords(const std::filesystem::path& path);

/// Strips a small set of inflectional suffixes (-ies, -sses, -ing, -ed, -es, -s, -ly).
std::string suffix_stem(std::string_view word);

/// Normalized form of a free-standing word; empty if it is a stopword.
std::string normalize_word(std::string_view surface, const PreprocessConfig& cfg);

/// Recomputes every token's normalized form from its surface. Tokens inside
/// mention spans are never dropped as stopwords. Spans are untouched.
AnnotatedCorpus preprocess(AnnotatedCorpus corpus, const PreprocessConfig& cfg);

}  // namespace roledet
