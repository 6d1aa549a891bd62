#include "roledet/roles.hpp"

#include "roledet/errors.hpp"

namespace roledet {

namespace {
constexpr std::array<std::string_view, kRoleCount> kNames = {
    "PER_Victim", "PER_Accused", "PER_Others", "ORG_Victim", "ORG_Accused",
    "ORG_Others", "LOC_Event",   "LOC_Accused", "LOC_Victim", "LOC_Others",
};
}  // namespace

std::string_view role_name(Role r) { return kNames[role_index(r)]; }

std::optional<Role> parse_role(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == name) return static_cast<Role>(i);
  return std::nullopt;
}

Role require_role(std::string_view name) {
  if (auto r = parse_role(name)) return *r;
  throw UnknownRoleError(std::string(name));
}

std::string role_token(Role r) { return "<" + std::string(role_name(r)) + ">"; }

std::optional<Role> role_from_token(std::string_view token) {
  if (token.size() < 3 || token.front() != '<' || token.back() != '>') return std::nullopt;
  return parse_role(token.substr(1, token.size() - 2));
}

std::string_view entity_type(Role r) { return role_name(r).substr(0, 3); }

}  // namespace roledet
