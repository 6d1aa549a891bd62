#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "roledet/roles.hpp"

namespace roledet {

struct Token {
  std::string surface;
  /// Output of the preprocessing pipeline; empty when the token was removed as a stopword.
  std::string normalized;

  bool operator==(const Token&) const = default;
};

using Sentence = std::vector<Token>;

/// Token range inside one sentence, end inclusive.
struct Span {
  std::size_t sentence = 0;
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start + 1; }
  bool operator==(const Span&) const = default;
  auto operator<=>(const Span&) const = default;
};

struct EntityMention {
  std::string entity_key;
  Span span;
  Role role = Role::PER_Others;
  /// Position among this entity's mentions in document order. Assigned by finalize().
  std::size_t ordinal = 0;

  bool operator==(const EntityMention&) const = default;
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;
  /// Sorted by span after finalize().
  std::vector<EntityMention> mentions;

  std::size_t token_count() const;
  bool operator==(const Document&) const = default;
};

struct AnnotatedCorpus {
  std::vector<Document> documents;

  std::size_t mention_count() const;
  bool operator==(const AnnotatedCorpus&) const = default;
};

using RoleCounts = std::array<std::size_t, kRoleCount>;

/// Recount of mentions per role.
RoleCounts role_frequencies(const AnnotatedCorpus& corpus);

/// Validates spans (range, ordering, non-overlap), sorts mentions into document
/// order and assigns per-entity ordinals. Throws SpanError on bad input; never repairs.
void finalize(Document& doc);

/// For each sentence and token, the index of the covering mention or -1.
std::vector<std::vector<int>> mention_mask(const Document& doc);

/// Key used for phrase matching: the normalized form, or the lowercased surface
/// when preprocessing removed the token.
std::string phrase_form(const Token& token);

enum class CorpusFormat { jsonl, column };

CorpusFormat parse_format(std::string_view name);

AnnotatedCorpus read_jsonl(std::istream& in, const std::string& source = "<stream>");
void write_jsonl(const AnnotatedCorpus& corpus, std::ostream& out);

/// CoNLL-style "SURFACE<TAB>TAG" with B-/I-/O tags. Each contiguous span becomes its
/// own entity (no coreference); a dangling I-X opens a new span.
AnnotatedCorpus read_column(std::istream& in, const std::string& source = "<stream>");
void write_column(const AnnotatedCorpus& corpus, std::ostream& out);

AnnotatedCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
void save_corpus(const AnnotatedCorpus& corpus, const std::filesystem::path& path,
                 CorpusFormat format);

/// BIO tag per token of one sentence, e.g. "B-ORG_Accused".
std::vector<std::string> bio_tags(const Document& doc, std::size_t sentence);

/// Sentence-ordered token stream. Sentence boundaries are kept so that
/// training windows never cross them.
using TokenStream = std::vector<std::vector<std::string>>;

/// Normalized tokens, dropping removed stopwords.
TokenStream normalized_stream(const AnnotatedCorpus& corpus);

/// Like normalized_stream, but every mention span collapses into its role token.
TokenStream substitute_roles(const AnnotatedCorpus& corpus);

}  // namespace roledet
