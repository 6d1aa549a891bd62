#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <iosfwd>
#include <vector>

#include "json.hpp"

#include "roledet/corpus.hpp"

namespace roledet {

/// Role of the plurality of mentions; ties go to the role that occurs first.
Role majority_role(const std::vector<Role>& mention_roles);

struct MentionBucket {
  std::size_t entities = 0;
  /// Mean fraction of an entity's mentions carrying its majority role.
  double majority_share = 0.0;
  /// Fraction of entities whose first mention carries the majority role.
  double first_mention_majority = 0.0;
};

struct RolePositional {
  std::size_t entities = 0;  ///< multi-mention entities with this majority role
  double first_mention_majority = 0.0;
};

/// Document-level mention statistics. Entities are (document, entity_key) pairs.
struct StatisticsReport {
  std::size_t entities = 0;
  std::size_t multi_mention_entities = 0;
  std::size_t mentions = 0;
  double multi_mention_fraction = 0.0;

  /// Mention count -> number of entities with that many mentions.
  std::map<std::size_t, std::size_t> histogram;

  double majority_share_all = 0.0;
  double majority_share_multi = 0.0;
  double first_mention_majority_all = 0.0;
  double first_mention_majority_multi = 0.0;

  /// Keyed by mention count.
  std::map<std::size_t, MentionBucket> by_mention_count;
  /// Multi-mention entities keyed by majority role.
  std::array<RolePositional, kRoleCount> by_majority_role{};
};

StatisticsReport mention_statistics(const AnnotatedCorpus& corpus);

nlohmann::json to_json(const StatisticsReport& report);

/// "mentions,entities"
void write_histogram_csv(const StatisticsReport& report, std::ostream& out);
/// "mentions,entities,majority_share,first_mention_majority"
void write_majority_csv(const StatisticsReport& report, std::ostream& out);
/// "role,entities,first_mention_majority" over multi-mention entities.
void write_positional_csv(const StatisticsReport& report, std::ostream& out);
/// "metric,value"
void write_summary_csv(const StatisticsReport& report, std::ostream& out);

}  // namespace roledet
