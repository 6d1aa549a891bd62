#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "roledet/roles.hpp"
#include "roledet/vector_set.hpp"

namespace roledet {

/// Score given to mentions without a usable representation; below any cosine.
inline constexpr double kUnrankableScore = -2.0;

/// One mention of a document, ready to be scored.
struct MentionCandidate {
  std::string entity_key;
  std::size_t mention_index = 0;  ///< document order
  Role gold_role = Role::PER_Others;
  std::optional<VectorSet> vectors;  ///< nullopt: unrankable
};

struct RankedItem {
  std::string entity_key;
  std::size_t best_mention = 0;
  double score = kUnrankableScore;
  bool rankable = false;
  bool relevant = false;
};

struct RankedList {
  std::string document_id;
  Role role = Role::PER_Victim;
  std::vector<RankedItem> items;

  std::size_t relevant_count() const;
  std::vector<bool> relevance() const;
};

/// Which entities count as relevant to a role query.
enum class Relevance {
  majority,  ///< the entity's majority gold role (ties: earliest) is the query role
  any,       ///< any gold mention of the entity carries the query role
};
std::string_view relevance_name(Relevance r);
Relevance parse_relevance(std::string_view name);

/// Scores every mention with sim_ga, keeps each entity's best mention, sorts by
/// score (ties: entity's first position in the document). Entities with no
/// rankable mention go last with kUnrankableScore.
RankedList rank_entities(const std::vector<MentionCandidate>& mentions, const VectorSet& query,
                         const std::string& document_id, Role role, Relevance relevance = Relevance::majority);

/// Sum of precision@i over relevant ranks i <= k, divided by min(k, relevant_total).
/// nullopt when relevant_total is zero.
std::optional<double> average_precision_at_k(std::span<const bool> relevance, std::size_t relevant_total,
                                             std::size_t k);
std::optional<double> average_precision_at_k(const RankedList& list, std::size_t k);

/// Mean AP@k over queries with at least one relevant entity. Throws
/// std::invalid_argument when no query qualifies or k == 0.
double map_at_k(const std::vector<RankedList>& lists, std::size_t k);

/// mAP@1..kmax.
std::vector<double> map_curve(const std::vector<RankedList>& lists, std::size_t kmax);

struct QueryResult {
  std::string document_id;
  Role role = Role::PER_Victim;
  std::size_t relevant = 0;
  std::vector<double> ap;  ///< AP@1..kmax
};

struct RankingReport {
  std::string method;
  std::size_t kmax = 5;
  std::vector<QueryResult> queries;
  std::vector<double> map;  ///< mAP@1..kmax over included queries
  /// Per in-study role mAP curve; empty when the role had no included query.
  std::array<std::vector<double>, kRoleCount> per_role{};
  std::size_t excluded_queries = 0;
  std::size_t mentions = 0;
  std::size_t unrankable_mentions = 0;
};

RankingReport evaluate_rankings(const std::vector<RankedList>& lists, std::size_t kmax, std::string method);

nlohmann::json to_json(const RankingReport& report);
/// "K,mAP" rows.
void write_curve_csv(const RankingReport& report, std::ostream& out);
/// role,mAP@1..mAP@kmax for the in-study roles.
void write_role_csv(const RankingReport& report, std::ostream& out);

/// Fixed-point rendering used in every CSV report.
std::string format_metric(double v);

}  // namespace roledet
