#include "roledet/statistics.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "roledet/ranking.hpp"

namespace roledet {

Role majority_role(const std::vector<Role>& mention_roles) {
  if (mention_roles.empty()) throw std::invalid_argument("majority_role of an empty entity");
  std::array<std::size_t, kRoleCount> counts{};
  for (Role r : mention_roles) ++counts[role_index(r)];
  Role best = mention_roles.front();
  for (Role r : mention_roles)
    if (counts[role_index(r)] > counts[role_index(best)]) best = r;
  return best;
}

StatisticsReport mention_statistics(const AnnotatedCorpus& corpus) {
  StatisticsReport report;
  double share_all = 0.0, share_multi = 0.0;
  std::size_t first_all = 0, first_multi = 0;
  std::map<std::size_t, double> bucket_share;
  std::map<std::size_t, std::size_t> bucket_first;
  std::array<std::size_t, kRoleCount> role_first{};

  for (const auto& doc : corpus.documents) {
    // Mentions are in document order, so roles are collected in order too.
    std::map<std::string, std::vector<Role>> entities;
    std::vector<std::string> order;
    for (const auto& m : doc.mentions) {
      auto [it, inserted] = entities.try_emplace(m.entity_key);
      if (inserted) order.push_back(m.entity_key);
      it->second.push_back(m.role);
    }
    for (const auto& key : order) {
      const auto& roles = entities[key];
      const std::size_t n = roles.size();
      const Role major = majority_role(roles);
      const double share =
          static_cast<double>(std::count(roles.begin(), roles.end(), major)) / static_cast<double>(n);
      const bool first = roles.front() == major;

      ++report.entities;
      report.mentions += n;
      ++report.histogram[n];
      share_all += share;
      first_all += first;
      bucket_share[n] += share;
      bucket_first[n] += first;
      if (n >= 2) {
        ++report.multi_mention_entities;
        share_multi += share;
        first_multi += first;
        ++report.by_majority_role[role_index(major)].entities;
        role_first[role_index(major)] += first;
      }
    }
  }

  if (report.entities > 0) {
    const double e = static_cast<double>(report.entities);
    report.multi_mention_fraction = static_cast<double>(report.multi_mention_entities) / e;
    report.majority_share_all = share_all / e;
    report.first_mention_majority_all = static_cast<double>(first_all) / e;
  }
  if (report.multi_mention_entities > 0) {
    const double e = static_cast<double>(report.multi_mention_entities);
    report.majority_share_multi = share_multi / e;
    report.first_mention_majority_multi = static_cast<double>(first_multi) / e;
  } else {
    // Degenerate: no multi-mention entity contradicts either assumption.
    report.majority_share_multi = 1.0;
    report.first_mention_majority_multi = 1.0;
  }
  for (const auto& [n, count] : report.histogram) {
    MentionBucket b;
    b.entities = count;
    b.majority_share = bucket_share[n] / static_cast<double>(count);
    b.first_mention_majority = static_cast<double>(bucket_first[n]) / static_cast<double>(count);
    report.by_mention_count[n] = b;
  }
  for (std::size_t r = 0; r < kRoleCount; ++r) {
    auto& rp = report.by_majority_role[r];
    if (rp.entities > 0)
      rp.first_mention_majority = static_cast<double>(role_first[r]) / static_cast<double>(rp.entities);
  }
  return report;
}

nlohmann::json to_json(const StatisticsReport& report) {
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [n, c] : report.histogram) hist[std::to_string(n)] = c;
  nlohmann::json buckets = nlohmann::json::object();
  for (const auto& [n, b] : report.by_mention_count)
    buckets[std::to_string(n)] = {{"entities", b.entities},
                                  {"majority_share", b.majority_share},
                                  {"first_mention_majority", b.first_mention_majority}};
  nlohmann::json roles = nlohmann::json::object();
  for (Role r : kAllRoles) {
    const auto& p = report.by_majority_role[role_index(r)];
    if (p.entities == 0) continue;
    roles[std::string(role_name(r))] = {{"entities", p.entities}, {"first_mention_majority", p.first_mention_majority}};
  }
  return {{"entities", report.entities},
          {"multi_mention_entities", report.multi_mention_entities},
          {"mentions", report.mentions},
          {"multi_mention_fraction", report.multi_mention_fraction},
          {"majority_share_all", report.majority_share_all},
          {"majority_share_multi", report.majority_share_multi},
          {"first_mention_majority_all", report.first_mention_majority_all},
          {"first_mention_majority_multi", report.first_mention_majority_multi},
          {"histogram", hist},
          {"by_mention_count", buckets},
          {"by_majority_role", roles}};
}

void write_histogram_csv(const StatisticsReport& report, std::ostream& out) {
  out << "mentions,entities\n";
  for (const auto& [n, c] : report.histogram) out << n << ',' << c << '\n';
}

void write_majority_csv(const StatisticsReport& report, std::ostream& out) {
  out << "mentions,entities,majority_share,first_mention_majority\n";
  for (const auto& [n, b] : report.by_mention_count)
    out << n << ',' << b.entities << ',' << format_metric(b.majority_share) << ','
        << format_metric(b.first_mention_majority) << '\n';
}

void write_positional_csv(const StatisticsReport& report, std::ostream& out) {
  out << "role,entities,first_mention_majority\n";
  for (Role r : kAllRoles) {
    const auto& p = report.by_majority_role[role_index(r)];
    if (p.entities == 0) continue;
    out << role_name(r) << ',' << p.entities << ',' << format_metric(p.first_mention_majority) << '\n';
  }
}

void write_summary_csv(const StatisticsReport& report, std::ostream& out) {
  out << "metric,value\n"
      << "entities," << report.entities << '\n'
      << "multi_mention_entities," << report.multi_mention_entities << '\n'
      << "mentions," << report.mentions << '\n'
      << "multi_mention_fraction," << format_metric(report.multi_mention_fraction) << '\n'
      << "majority_share_all," << format_metric(report.majority_share_all) << '\n'
      << "majority_share_multi," << format_metric(report.majority_share_multi) << '\n'
      << "first_mention_majority_all," << format_metric(report.first_mention_majority_all) << '\n'
      << "first_mention_majority_multi," << format_metric(report.first_mention_majority_multi) << '\n';
}

}  // namespace roledet
