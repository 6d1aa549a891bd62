#include "roledet/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "roledet/errors.hpp"
#include "roledet/text.hpp"

namespace roledet {

using nlohmann::json;

std::size_t Document::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

std::size_t AnnotatedCorpus::mention_count() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.mentions.size();
  return n;
}

RoleCounts role_frequencies(const AnnotatedCorpus& corpus) {
  RoleCounts counts{};
  for (const auto& doc : corpus.documents)
    for (const auto& m : doc.mentions) ++counts[role_index(m.role)];
  return counts;
}

void finalize(Document& doc) {
  for (const auto& m : doc.mentions) {
    const Span& s = m.span;
    if (s.sentence >= doc.sentences.size())
      throw SpanError(doc.id, "mention '" + m.entity_key + "' refers to sentence " +
                                  std::to_string(s.sentence) + " of " +
                                  std::to_string(doc.sentences.size()));
    if (s.end < s.start)
      throw SpanError(doc.id, "mention '" + m.entity_key + "' has end " +
                                  std::to_string(s.end) + " before start " +
                                  std::to_string(s.start));
    if (s.end >= doc.sentences[s.sentence].size())
      throw SpanError(doc.id, "mention '" + m.entity_key + "' ends at token " +
                                  std::to_string(s.end) + " but sentence " +
                                  std::to_string(s.sentence) + " has " +
                                  std::to_string(doc.sentences[s.sentence].size()) +
                                  " tokens");
  }
  std::stable_sort(doc.mentions.begin(), doc.mentions.end(),
                   [](const EntityMention& a, const EntityMention& b) { return a.span < b.span; });
  for (std::size_t i = 1; i < doc.mentions.size(); ++i) {
    const Span& prev = doc.mentions[i - 1].span;
    const Span& cur = doc.mentions[i].span;
    if (prev.sentence == cur.sentence && cur.start <= prev.end)
      throw SpanError(doc.id, "overlapping mentions in sentence " + std::to_string(cur.sentence));
  }
  std::map<std::string, std::size_t> seen;
  for (auto& m : doc.mentions) m.ordinal = seen[m.entity_key]++;
}

std::vector<std::vector<int>> mention_mask(const Document& doc) {
  std::vector<std::vector<int>> mask(doc.sentences.size());
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) mask[s].assign(doc.sentences[s].size(), -1);
  for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
    const Span& sp = doc.mentions[i].span;
    for (std::size_t t = sp.start; t <= sp.end; ++t) mask[sp.sentence][t] = static_cast<int>(i);
  }
  return mask;
}

std::string phrase_form(const Token& token) {
  return token.normalized.empty() ? to_lower(token.surface) : token.normalized;
}

CorpusFormat parse_format(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::jsonl;
  if (name == "column" || name == "conll") return CorpusFormat::column;
  throw InputError("unknown corpus format '" + std::string(name) + "' (expected jsonl or column)");
}

namespace {

std::size_t as_index(const json& j, const char* field, const std::string& doc_id) {
  const json& v = j.at(field);
  if (!v.is_number_integer()) throw json::type_error::create(302, std::string(field) + " must be an integer", &v);
  auto value = v.get<long long>();
  if (value < 0) throw SpanError(doc_id, std::string(field) + " is negative");
  return static_cast<std::size_t>(value);
}

Document parse_document(const json& j) {
  Document doc;
  doc.id = j.at("id").get<std::string>();
  for (const auto& sent : j.at("sentences")) {
    Sentence s;
    for (const auto& tok : sent) {
      std::string surface = tok.get<std::string>();
      s.push_back({surface, surface});
    }
    doc.sentences.push_back(std::move(s));
  }
  if (j.contains("mentions")) {
    for (const auto& m : j.at("mentions")) {
      EntityMention mention;
      mention.entity_key = m.at("entity").get<std::string>();
      mention.span.sentence = as_index(m, "sent", doc.id);
      mention.span.start = as_index(m, "start", doc.id);
      mention.span.end = as_index(m, "end", doc.id);
      mention.role = require_role(m.at("role").get<std::string>());
      doc.mentions.push_back(std::move(mention));
    }
  }
  finalize(doc);
  return doc;
}

}  // namespace

AnnotatedCorpus read_jsonl(std::istream& in, const std::string& source) {
  AnnotatedCorpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      corpus.documents.push_back(parse_document(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(source, line_no, e.what());
    } catch (const SpanError& e) {
      throw ParseError(source, line_no, e.what());
    } catch (const UnknownRoleError& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return corpus;
}

void write_jsonl(const AnnotatedCorpus& corpus, std::ostream& out) {
  for (const auto& doc : corpus.documents) {
    json j;
    j["id"] = doc.id;
    json sentences = json::array();
    for (const auto& s : doc.sentences) {
      json toks = json::array();
      for (const auto& t : s) toks.push_back(t.surface);
      sentences.push_back(std::move(toks));
    }
    j["sentences"] = std::move(sentences);
    json mentions = json::array();
    for (const auto& m : doc.mentions) {
      mentions.push_back({{"entity", m.entity_key},
                          {"sent", m.span.sentence},
                          {"start", m.span.start},
                          {"end", m.span.end},
                          {"role", role_name(m.role)}});
    }
    j["mentions"] = std::move(mentions);
    out << j.dump() << '\n';
  }
}

std::vector<std::string> bio_tags(const Document& doc, std::size_t sentence) {
  std::vector<std::string> tags(doc.sentences.at(sentence).size(), "O");
  for (const auto& m : doc.mentions) {
    if (m.span.sentence != sentence) continue;
    const std::string name(role_name(m.role));
    tags[m.span.start] = "B-" + name;
    for (std::size_t t = m.span.start + 1; t <= m.span.end; ++t) tags[t] = "I-" + name;
  }
  return tags;
}

AnnotatedCorpus read_column(std::istream& in, const std::string& source) {
  AnnotatedCorpus corpus;
  Document* doc = nullptr;
  Sentence sentence;
  std::vector<EntityMention> pending;
  bool open = false;
  std::size_t line_no = 0;

  auto start_document = [&](std::string id) {
    if (id.empty()) id = "doc" + std::to_string(corpus.documents.size());
    corpus.documents.push_back(Document{std::move(id), {}, {}});
    doc = &corpus.documents.back();
  };
  auto flush_sentence = [&] {
    open = false;
    if (sentence.empty()) return;
    if (doc == nullptr) start_document("");
    std::size_t index = doc->sentences.size();
    for (auto& m : pending) {
      m.span.sentence = index;
      m.entity_key = "s" + std::to_string(index) + "t" + std::to_string(m.span.start);
      doc->mentions.push_back(std::move(m));
    }
    pending.clear();
    doc->sentences.push_back(std::move(sentence));
    sentence.clear();
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      flush_sentence();
      continue;
    }
    if (line.rfind("-DOCSTART-", 0) == 0) {
      flush_sentence();
      std::string rest = trim(line.substr(10));
      // CoNLL-2003 style "-DOCSTART- -X- O O" carries no id.
      if (rest.rfind("-X-", 0) == 0) rest.clear();
      start_document(rest);
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw ParseError(source, line_no, "expected SURFACE<TAB>TAG");
    std::string surface = line.substr(0, tab);
    std::string tag = line.substr(tab + 1);
    std::size_t pos = sentence.size();
    sentence.push_back({surface, surface});
    if (tag == "O") {
      open = false;
      continue;
    }
    if (tag.size() < 3 || (tag[0] != 'B' && tag[0] != 'I') || tag[1] != '-')
      throw ParseError(source, line_no, "bad BIO tag '" + tag + "'");
    Role role;
    try {
      role = require_role(tag.substr(2));
    } catch (const UnknownRoleError& e) {
      throw ParseError(source, line_no, e.what());
    }
    bool continues = tag[0] == 'I' && open && pending.back().role == role;
    if (continues) {
      pending.back().span.end = pos;
    } else {
      EntityMention m;
      m.role = role;
      m.span = {0, pos, pos};
      pending.push_back(std::move(m));
      open = true;
    }
  }
  flush_sentence();
  for (auto& d : corpus.documents) finalize(d);
  return corpus;
}

void write_column(const AnnotatedCorpus& corpus, std::ostream& out) {
  for (const auto& doc : corpus.documents) {
    out << "-DOCSTART- " << doc.id << "\n\n";
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      if (doc.sentences[s].empty()) continue;
      auto tags = bio_tags(doc, s);
      for (std::size_t t = 0; t < tags.size(); ++t)
        out << doc.sentences[s][t].surface << '\t' << tags[t] << '\n';
      out << '\n';
    }
  }
}

AnnotatedCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open corpus file " + path.string());
  return format == CorpusFormat::jsonl ? read_jsonl(in, path.string())
                                       : read_column(in, path.string());
}

void save_corpus(const AnnotatedCorpus& corpus, const std::filesystem::path& path,
                 CorpusFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  if (format == CorpusFormat::jsonl)
    write_jsonl(corpus, out);
  else
    write_column(corpus, out);
}

TokenStream normalized_stream(const AnnotatedCorpus& corpus) {
  TokenStream stream;
  for (const auto& doc : corpus.documents) {
    for (const auto& s : doc.sentences) {
      std::vector<std::string> out;
      out.reserve(s.size());
      for (const auto& t : s)
        if (!t.normalized.empty()) out.push_back(t.normalized);
      stream.push_back(std::move(out));
    }
  }
  return stream;
}

TokenStream substitute_roles(const AnnotatedCorpus& corpus) {
  TokenStream stream;
  for (const auto& doc : corpus.documents) {
    auto mask = mention_mask(doc);
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      std::vector<std::string> out;
      const auto& sent = doc.sentences[s];
      for (std::size_t t = 0; t < sent.size(); ++t) {
        int m = mask[s][t];
        if (m >= 0) {
          if (doc.mentions[m].span.start == t) out.push_back(role_token(doc.mentions[m].role));
        } else if (!sent[t].normalized.empty()) {
          out.push_back(sent[t].normalized);
        }
      }
      stream.push_back(std::move(out));
    }
  }
  return stream;
}

}  // namespace roledet
