#include "roledet/phrases.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "roledet/errors.hpp"
#include "roledet/text.hpp"

namespace roledet {

void PhraseConfig::validate() const {
  if (!(delta >= 0.0)) throw InputError("phrase delta must be >= 0");
  if (passes < 1) throw InputError("phrase passes must be >= 1");
  if (!std::isfinite(threshold)) throw InputError("phrase threshold must be finite");
}

namespace {

struct PairHash {
  std::size_t operator()(const Bigram& b) const {
    return static_cast<std::size_t>(fnv1a(b.second, fnv1a(b.first) ^ 0x1fULL));
  }
};

}  // namespace

PhraseTable collocation_scores(const TokenStream& stream, const PhraseConfig& cfg) {
  cfg.validate();
  std::unordered_map<std::string, std::uint64_t> unigrams;
  std::unordered_map<Bigram, std::uint64_t, PairHash> bigrams;
  std::uint64_t total = 0;
  for (const auto& sentence : stream) {
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      ++unigrams[sentence[i]];
      ++total;
      if (i + 1 < sentence.size()) ++bigrams[{sentence[i], sentence[i + 1]}];
    }
  }
  PhraseTable table;
  if (total == 0) return table;
  const double cutoff = cfg.threshold * 1e6 / static_cast<double>(total);
  for (const auto& [bigram, count] : bigrams) {
    if (static_cast<double>(count) <= cfg.delta) continue;
    if (cfg.drop_stopword_bigrams &&
        (cfg.stopwords.count(bigram.first) || cfg.stopwords.count(bigram.second)))
      continue;
    const double score = (static_cast<double>(count) - cfg.delta) /
                         (static_cast<double>(unigrams[bigram.first]) *
                          static_cast<double>(unigrams[bigram.second]));
    if (score >= cutoff) table.phrases[bigram] = {score, PhraseSource::collocation};
  }
  return table;
}

TokenStream phrase_stream(const AnnotatedCorpus& corpus) {
  TokenStream stream;
  for (const auto& doc : corpus.documents)
    for (const auto& s : doc.sentences) {
      std::vector<std::string> out;
      out.reserve(s.size());
      for (const auto& t : s) out.push_back(phrase_form(t));
      stream.push_back(std::move(out));
    }
  return stream;
}

RelationLoad read_relation_phrases(std::istream& in, const PreprocessConfig& cfg) {
  RelationLoad load;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 4 || trim(fields[2]).empty()) {
      ++load.skipped;
      continue;
    }
    ++load.rows;
    std::vector<std::string> words;
    for (const auto& w : split_whitespace(fields[2])) {
      std::string n = normalize_word(w, cfg);
      words.push_back(n.empty() ? to_lower(w) : n);
    }
    for (std::size_t i = 0; i + 1 < words.size(); ++i) {
      auto& entry = load.table.phrases[{words[i], words[i + 1]}];
      entry.source = PhraseSource::relation;
      entry.score += 1.0;
    }
  }
  return load;
}

RelationLoad load_relation_phrases(const std::filesystem::path& path, const PreprocessConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open relation tuples " + path.string());
  return read_relation_phrases(in, cfg);
}

void write_phrase_table(const PhraseTable& table, std::ostream& out) {
  std::ostringstream num;
  for (const auto& [bigram, entry] : table.phrases) {
    num.str({});
    num << std::setprecision(17) << entry.score;
    out << table.joined(bigram) << '\t' << num.str() << '\t'
        << (entry.source == PhraseSource::relation ? "relation" : "collocation") << '\n';
  }
}

PhraseTable read_phrase_table(std::istream& in, const std::string& source) {
  PhraseTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3) throw ParseError(source, line_no, "expected phrase<TAB>score<TAB>source");
    auto cut = fields[0].find(table.joiner);
    if (cut == std::string::npos || cut == 0 || cut + table.joiner.size() >= fields[0].size())
      throw ParseError(source, line_no, "phrase '" + fields[0] + "' is not a joined bigram");
    PhraseEntry entry;
    try {
      entry.score = std::stod(fields[1]);
    } catch (const std::exception&) {
      throw ParseError(source, line_no, "bad score '" + fields[1] + "'");
    }
    if (fields[2] == "relation")
      entry.source = PhraseSource::relation;
    else if (fields[2] == "collocation")
      entry.source = PhraseSource::collocation;
    else
      throw ParseError(source, line_no, "bad phrase source '" + fields[2] + "'");
    table.phrases[{fields[0].substr(0, cut), fields[0].substr(cut + table.joiner.size())}] = entry;
  }
  return table;
}

void merge_tables(PhraseTable& into, const PhraseTable& from) {
  for (const auto& [bigram, entry] : from.phrases) into.phrases.try_emplace(bigram, entry);
}

AnnotatedCorpus merge_phrases(const AnnotatedCorpus& corpus, const PhraseTable& table, std::size_t passes) {
  AnnotatedCorpus out = corpus;
  for (auto& doc : out.documents) {
    for (std::size_t pass = 0; pass < passes; ++pass) {
      auto mask = mention_mask(doc);
      // new_index[s][t]: position of old token t after this pass.
      std::vector<std::vector<std::size_t>> new_index(doc.sentences.size());
      bool changed = false;
      for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
        const Sentence& old = doc.sentences[s];
        Sentence rewritten;
        rewritten.reserve(old.size());
        new_index[s].resize(old.size());
        std::size_t t = 0;
        while (t < old.size()) {
          const bool free_pair = t + 1 < old.size() && mask[s][t] < 0 && mask[s][t + 1] < 0;
          if (free_pair && table.contains(phrase_form(old[t]), phrase_form(old[t + 1]))) {
            Token merged;
            merged.surface = old[t].surface + table.joiner + old[t + 1].surface;
            merged.normalized = phrase_form(old[t]) + table.joiner + phrase_form(old[t + 1]);
            new_index[s][t] = new_index[s][t + 1] = rewritten.size();
            rewritten.push_back(std::move(merged));
            t += 2;
            changed = true;
          } else {
            new_index[s][t] = rewritten.size();
            rewritten.push_back(old[t]);
            t += 1;
          }
        }
        doc.sentences[s] = std::move(rewritten);
      }
      if (!changed) break;
      for (auto& m : doc.mentions) {
        m.span.start = new_index[m.span.sentence][m.span.start];
        m.span.end = new_index[m.span.sentence][m.span.end];
      }
    }
  }
  return out;
}

}  // namespace roledet
