#include "roledet/preprocess.hpp"

#include <fstream>

#include "roledet/errors.hpp"
#include "roledet/text.hpp"

namespace roledet {

std::set<std::string> default_stopwords() {
  return {"a",     "about", "above", "after", "again", "against", "all",   "am",    "an",
          "and",   "any",   "are",   "as",    "at",    "be",      "been",  "before", "being",
          "below", "between", "both", "but",  "by",    "can",     "could", "did",   "do",
          "does",  "doing", "down",  "during", "each", "few",     "for",   "from",  "further",
          "had",   "has",   "have",  "having", "he",   "her",     "here",  "hers",  "herself",
          "him",   "himself", "his", "how",   "i",     "if",      "in",    "into",  "is",
          "it",    "its",   "itself", "just", "me",    "more",    "most",  "my",    "myself",
          "no",    "nor",   "not",   "now",   "of",    "off",     "on",    "once",  "only",
          "or",    "other", "our",   "ours",  "ourselves", "out", "over",  "own",   "said",
          "same",  "she",   "should", "so",   "some",  "such",    "than",  "that",  "the",
          "their", "theirs", "them", "themselves", "then", "there", "these", "they", "this",
          "those", "through", "to",  "too",   "under", "until",   "up",    "very",  "was",
          "we",    "were",  "what",  "when",  "where", "which",   "while", "who",   "whom",
          "why",   "will",  "with",  "would", "you",   "your",    "yours", "yourself"};
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open stopword list " + path.string());
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string w = to_lower(trim(line));
    if (!w.empty()) words.insert(std::move(w));
  }
  return words;
}

namespace {

bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

bool has_vowel(std::string_view w) {
  return w.find_first_of("aeiouy") != std::string_view::npos;
}

}  // namespace

std::string suffix_stem(std::string_view word) {
  std::string w(word);
  // Stems shorter than three letters are left alone.
  auto strip = [&](std::string_view suffix, std::string_view replacement = {}) {
    std::string_view stem(w.data(), w.size() - suffix.size());
    if (stem.size() < 3 || !has_vowel(stem)) return false;
    w = std::string(stem) + std::string(replacement);
    return true;
  };
  if (ends_with(w, "sses")) {
    w.resize(w.size() - 2);
  } else if (ends_with(w, "ies")) {
    strip("ies", "y");
  } else if (ends_with(w, "ing")) {
    strip("ing");
  } else if (ends_with(w, "ed")) {
    strip("ed");
  } else if (ends_with(w, "ly")) {
    strip("ly");
  } else if (ends_with(w, "es") && (ends_with(w, "ches") || ends_with(w, "shes") ||
                                    ends_with(w, "xes") || ends_with(w, "zes"))) {
    strip("es");
  } else if (ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") &&
             !ends_with(w, "is")) {
    strip("s");
  }
  return w;
}

std::string normalize_word(std::string_view surface, const PreprocessConfig& cfg) {
  std::string lowered = to_lower(surface);
  if (cfg.stopwords.count(lowered)) return {};
  std::string w = cfg.lowercase ? lowered : std::string(surface);
  if (cfg.stemmer == Stemmer::suffix) w = suffix_stem(w);
  return w;
}

AnnotatedCorpus preprocess(AnnotatedCorpus corpus, const PreprocessConfig& cfg) {
  for (auto& doc : corpus.documents) {
    auto mask = mention_mask(doc);
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      for (std::size_t t = 0; t < doc.sentences[s].size(); ++t) {
        Token& tok = doc.sentences[s][t];
        if (mask[s][t] >= 0) {
          tok.normalized = cfg.lowercase ? to_lower(tok.surface) : tok.surface;
        } else {
          tok.normalized = normalize_word(tok.surface, cfg);
        }
      }
    }
  }
  return corpus;
}

}  // namespace roledet
