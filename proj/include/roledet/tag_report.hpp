#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "roledet/roles.hpp"

namespace roledet {

struct RolePrecision {
  std::size_t predicted = 0;
  std::size_t correct = 0;
  /// n/a when nothing was predicted for the role.
  std::optional<double> precision() const {
    if (predicted == 0) return std::nullopt;
    return static_cast<double>(correct) / static_cast<double>(predicted);
  }
};

/// Role-wise precision of one tagging system against gold BIO sequences.
struct TaggerReport {
  std::string system;
  std::array<RolePrecision, kRoleCount> mention{};  ///< exact span + role
  std::array<RolePrecision, kRoleCount> token{};    ///< per token, role only
  std::size_t sequences = 0;
  std::size_t repairs = 0;

  /// Mean over the in-study roles with a defined precision.
  std::optional<double> macro_precision() const;
  /// Pooled over the in-study roles.
  std::optional<double> micro_precision() const;
  std::optional<double> token_macro_precision() const;
};

/// Sequences of tag names, aligned one to one. Throws InputError when the
/// numbers of sequences or any sequence lengths differ.
TaggerReport role_precision_report(const std::vector<std::vector<std::string>>& gold,
                                   const std::vector<std::vector<std::string>>& predicted, std::string system);

nlohmann::json to_json(const TaggerReport& report);

/// One row per in-study role plus "Average Precision", one column per system.
void write_precision_table(const std::vector<TaggerReport>& reports, std::ostream& out);

}  // namespace roledet
