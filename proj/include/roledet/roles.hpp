#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace roledet {

enum class Role : std::uint8_t {
  PER_Victim,
  PER_Accused,
  PER_Others,
  ORG_Victim,
  ORG_Accused,
  ORG_Others,
  LOC_Event,
  LOC_Accused,
  LOC_Victim,
  LOC_Others,
};

inline constexpr std::size_t kRoleCount = 10;

inline constexpr std::array<Role, kRoleCount> kAllRoles = {
    Role::PER_Victim, Role::PER_Accused, Role::PER_Others, Role::ORG_Victim, Role::ORG_Accused,
    Role::ORG_Others, Role::LOC_Event,   Role::LOC_Accused, Role::LOC_Victim, Role::LOC_Others,
};

/// Roles kept for evaluation; *_Others and LOC_Victim stay in the corpus as context only.
inline constexpr std::array<Role, 6> kStudyRoles = {
    Role::PER_Victim, Role::PER_Accused, Role::ORG_Victim,
    Role::ORG_Accused, Role::LOC_Event,  Role::LOC_Accused,
};

constexpr std::size_t role_index(Role r) { return static_cast<std::size_t>(r); }

constexpr bool in_study(Role r) {
  for (Role s : kStudyRoles)
    if (s == r) return true;
  return false;
}

std::string_view role_name(Role r);

/// Parses "PER_Victim" etc. Returns nullopt for anything else.
std::optional<Role> parse_role(std::string_view name);

/// Same as parse_role but throws UnknownRoleError.
Role require_role(std::string_view name);

/// Synthetic vocabulary token standing for a role, e.g. "<ORG_Accused>".
std::string role_token(Role r);

std::optional<Role> role_from_token(std::string_view token);

/// Coarse entity type prefix ("PER", "ORG", "LOC").
std::string_view entity_type(Role r);

}  // namespace roledet
