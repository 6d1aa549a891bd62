#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "roledet/corpus.hpp"
#include "roledet/docvec.hpp"
#include "roledet/embeddings.hpp"
#include "roledet/vector_set.hpp"

namespace roledet {

/// Normalized context tokens around one mention.
struct ContextWindow {
  std::size_t mention = 0;
  std::size_t radius = 0;
  std::vector<std::string> tokens;
};

/// Tokens at [start-d, start-1] and [end+1, end+d] of the mention's own sentence,
/// in order, skipping removed stopwords.
ContextWindow extract_window(const Document& doc, std::size_t mention, std::size_t radius);

/// Windows of every mention of the same entity up to and including this one,
/// concatenated in document order. Later mentions never contribute.
ContextWindow extract_document_context(const Document& doc, std::size_t mention, std::size_t radius);

enum class RepresentationKind { cluster, centroid, docvec };

std::string_view kind_name(RepresentationKind kind);
RepresentationKind parse_kind(std::string_view name);

struct EntityRepresentation {
  RepresentationKind kind = RepresentationKind::centroid;
  VectorSet vectors;
};

enum class RepresentationStatus { ok, empty_window, degenerate };

struct RepresentationResult {
  RepresentationStatus status = RepresentationStatus::empty_window;
  std::optional<EntityRepresentation> value;
  std::size_t in_vocabulary = 0;
  std::size_t out_of_vocabulary = 0;
};

/// Normalized input vector of every in-vocabulary context token, duplicates kept.
RepresentationResult represent_cluster(const ContextWindow& window, const EmbeddingModel& model);

/// normalize(mean of the normalized context vectors).
RepresentationResult represent_centroid(const ContextWindow& window, const EmbeddingModel& model);

/// Paragraph vector inferred for the window as a pseudo-document.
RepresentationResult represent_docvec(const ContextWindow& window, const EmbeddingModel& model,
                                      const NegativeSampler& sampler, const DocvecConfig& cfg,
                                      std::uint64_t seed);

enum class ContextLevel { sentence, document };

std::string_view context_name(ContextLevel level);
ContextLevel parse_context(std::string_view name);

struct RepresentationConfig {
  RepresentationKind kind = RepresentationKind::centroid;
  std::size_t radius = 5;
  ContextLevel context = ContextLevel::sentence;
  DocvecConfig docvec;
  double unigram_power = 0.75;
  std::uint64_t seed = 1;

  /// Canonical text used for cache keys.
  std::string fingerprint() const;
};

struct CorpusRepresentations {
  /// [document][mention]
  std::vector<std::vector<RepresentationResult>> mentions;
  std::size_t unrankable = 0;
  std::size_t in_vocabulary = 0;
  std::size_t out_of_vocabulary = 0;
};

CorpusRepresentations build_representations(const AnnotatedCorpus& corpus, const EmbeddingModel& model,
                                            const RepresentationConfig& cfg);

struct RoleTrainingConfig {
  TrainConfig train;
  std::uint64_t min_count = 2;
};

struct RoleModel {
  EmbeddingModel model;
  TrainStats stats;
};

/// Substitutes mention spans with role tokens, extends the vocabulary with all
/// role tokens, warm-starts shared rows from base (role rows stay random) and
/// continues skip-gram training.
RoleModel learn_role_vectors(const AnnotatedCorpus& corpus, const EmbeddingModel& base,
                             const RoleTrainingConfig& cfg);

enum class QueryKind { tv, tv_sw };

struct RoleQuery {
  Role role = Role::PER_Victim;
  QueryKind kind = QueryKind::tv;
  std::vector<std::string> expansion;  ///< similar words, most similar first
  VectorSet vectors;
};

/// TV: the normalized role vector. TV-SW: plus the n most similar non-role tokens.
/// Throws InputError when the role token is missing.
RoleQuery build_role_query(const EmbeddingModel& model, Role role, QueryKind kind, std::size_t n);

std::string query_name(QueryKind kind, std::size_t n);

/// Method label in the usual E-*-N<d> notation, e.g. "E-V-C-N5".
std::string representation_label(RepresentationKind kind, std::size_t radius);

/// Content hashes for the representation cache key.
std::uint64_t corpus_hash(const AnnotatedCorpus& corpus);
std::uint64_t model_hash(const EmbeddingModel& model);

struct CacheKey {
  std::uint64_t corpus = 0;
  std::uint64_t model = 0;
  std::uint64_t config = 0;
  bool operator==(const CacheKey&) const = default;
};

/// Binary sidecar holding built representations. load returns nullopt when
/// the file is missing or was written for another key.
void save_representation_cache(const std::filesystem::path& path, const CacheKey& key,
                               const CorpusRepresentations& reps);
std::optional<CorpusRepresentations> load_representation_cache(const std::filesystem::path& path,
                                                               const CacheKey& key);

}  // namespace roledet
