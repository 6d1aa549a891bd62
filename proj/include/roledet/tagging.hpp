#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "roledet/corpus.hpp"

namespace roledet {

/// Ordered tag inventory.
class TagSet {
 public:
  TagSet() = default;
  explicit TagSet(std::vector<std::string> names);

  /// "O" followed by B-/I- for every role: 21 tags.
  static TagSet bio();

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  const std::vector<std::string>& names() const { return names_; }
  /// Throws InputError for an unknown tag.
  std::size_t index(const std::string& name) const;
  bool operator==(const TagSet& o) const { return names_ == o.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct TaggedSequence {
  std::vector<std::string> tokens;
  std::vector<std::size_t> tags;
};

/// One sequence per non-empty sentence, tokens as surfaces, gold BIO tags.
std::vector<TaggedSequence> tagged_sequences(const AnnotatedCorpus& corpus, const TagSet& tags);

/// Corpus with the same tokens whose mentions come from predicted BIO tags
/// (one entity per span), for writing predictions in column format.
AnnotatedCorpus with_predicted_tags(const AnnotatedCorpus& corpus, const TagSet& tags,
                                    const std::vector<std::vector<std::size_t>>& predicted);

}  // namespace roledet

namespace roledet {

struct TagSpan {
  std::size_t start = 0;
  std::size_t end = 0;  ///< inclusive
  Role role = Role::PER_Others;
  bool operator==(const TagSpan&) const = default;
};

struct BioSpans {
  std::vector<TagSpan> spans;
  /// Dangling I-X tags (after O, at the start, or after another role) read as B-X.
  std::size_t repairs = 0;
};

/// Spans of a BIO tag sequence. Throws InputError on malformed tags.
BioSpans decode_bio(const std::vector<std::string>& tags);

}  // namespace roledet
