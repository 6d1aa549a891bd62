#include "roledet/tagging.hpp"

#include "roledet/errors.hpp"

namespace roledet {

TagSet::TagSet(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (!index_.try_emplace(names_[i], i).second) throw InputError("duplicate tag '" + names_[i] + "'");
}

TagSet TagSet::bio() {
  std::vector<std::string> names{"O"};
  for (Role r : kAllRoles) {
    names.push_back("B-" + std::string(role_name(r)));
    names.push_back("I-" + std::string(role_name(r)));
  }
  return TagSet(std::move(names));
}

std::size_t TagSet::index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw InputError("unknown tag '" + name + "'");
  return it->second;
}

std::vector<TaggedSequence> tagged_sequences(const AnnotatedCorpus& corpus, const TagSet& tags) {
  std::vector<TaggedSequence> out;
  for (const auto& doc : corpus.documents)
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      if (doc.sentences[s].empty()) continue;
      TaggedSequence seq;
      for (const auto& t : doc.sentences[s]) seq.tokens.push_back(t.surface);
      for (const auto& name : bio_tags(doc, s)) seq.tags.push_back(tags.index(name));
      out.push_back(std::move(seq));
    }
  return out;
}

BioSpans decode_bio(const std::vector<std::string>& tags) {
  BioSpans out;
  bool open = false;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const std::string& tag = tags[i];
    if (tag == "O") {
      open = false;
      continue;
    }
    if (tag.size() < 3 || (tag[0] != 'B' && tag[0] != 'I') || tag[1] != '-')
      throw InputError("bad BIO tag '" + tag + "'");
    const Role role = require_role(tag.substr(2));
    if (tag[0] == 'I' && open && out.spans.back().role == role) {
      out.spans.back().end = i;
      continue;
    }
    if (tag[0] == 'I') ++out.repairs;
    out.spans.push_back({i, i, role});
    open = true;
  }
  return out;
}

AnnotatedCorpus with_predicted_tags(const AnnotatedCorpus& corpus, const TagSet& tags,
                                    const std::vector<std::vector<std::size_t>>& predicted) {
  AnnotatedCorpus out;
  std::size_t next = 0;
  for (const auto& doc : corpus.documents) {
    Document d{doc.id, doc.sentences, {}};
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      if (doc.sentences[s].empty()) continue;
      if (next >= predicted.size()) throw InputError("fewer predicted sequences than sentences");
      std::vector<std::string> names;
      for (std::size_t t : predicted[next++]) names.push_back(tags.name(t));
      for (const auto& span : decode_bio(names).spans) {
        EntityMention m;
        m.entity_key = "s" + std::to_string(s) + "t" + std::to_string(span.start);
        m.span = {s, span.start, span.end};
        m.role = span.role;
        d.mentions.push_back(std::move(m));
      }
    }
    finalize(d);
    out.documents.push_back(std::move(d));
  }
  if (next != predicted.size()) throw InputError("more predicted sequences than sentences");
  return out;
}

}  // namespace roledet
