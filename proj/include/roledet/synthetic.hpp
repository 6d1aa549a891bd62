#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "roledet/corpus.hpp"

namespace roledet {

/// Three cue phrases per role.
std::map<Role, std::vector<std::string>> default_cues();

/// Parameters of the synthetic news-like corpus. Each mention sits in its own
/// sentence next to a cue phrase for its role, padded with filler words.
struct SyntheticSpec {
  std::size_t documents = 200;
  std::size_t entities_per_document = 8;
  /// Roles primary entity roles are drawn from.
  std::vector<Role> roles{kAllRoles.begin(), kAllRoles.end()};
  /// Draw primary roles within a document without replacement while possible.
  bool distinct_roles = true;
  /// Cue phrases per role, whitespace-separated words.
  std::map<Role, std::vector<std::string>> cues = default_cues();

  double multi_mention_rate = 0.23;
  std::size_t max_mentions = 6;
  /// Chance a non-first mention carries a minority role.
  double majority_noise = 0.0;
  /// Chance the first mention of an entity with >= 3 mentions carries a minority role.
  double positional_noise = 0.0;
  /// Chance a mention's sentence carries another role's cue instead of its own.
  double cue_noise = 0.0;
  /// Only the first mention of each entity gets a cue; later ones get filler only.
  bool cue_first_mention_only = false;

  std::size_t filler_vocabulary = 300;
  std::size_t filler_min = 2;
  std::size_t filler_max = 6;
  std::size_t max_entity_tokens = 2;

  /// Throws InputError on rates outside [0,1] or inconsistent sizes.
  void validate() const;
};


SyntheticSpec spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SyntheticSpec& spec);

struct PlantedEntity {
  std::string document_id;
  std::string entity_key;
  Role primary = Role::PER_Others;
  std::vector<Role> roles;  ///< per mention in document order
};

/// What the generator actually planted, for checking statistics against.
struct SyntheticTruth {
  std::vector<PlantedEntity> entities;
  std::size_t mentions = 0;
  std::size_t cued_mentions = 0;
  std::size_t wrong_cue_mentions = 0;
  double multi_mention_fraction = 0.0;
  /// Over multi-mention entities: mean fraction of mentions with the primary role.
  double primary_share_multi = 0.0;
  /// Over multi-mention entities: fraction whose first mention carries the primary role.
  double first_mention_primary_multi = 0.0;
};

nlohmann::json to_json(const SyntheticTruth& truth);

struct SyntheticCorpus {
  AnnotatedCorpus corpus;
  SyntheticTruth truth;
};

SyntheticCorpus generate_synthetic(std::uint64_t seed, const SyntheticSpec& spec);

}  // namespace roledet
