#include "roledet/ranking.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <memory>
#include <ostream>
#include <stdexcept>

#include "roledet/errors.hpp"
#include "roledet/statistics.hpp"

namespace roledet {

using nlohmann::json;

std::size_t RankedList::relevant_count() const {
  return static_cast<std::size_t>(
      std::count_if(items.begin(), items.end(), [](const RankedItem& i) { return i.relevant; }));
}

std::vector<bool> RankedList::relevance() const {
  std::vector<bool> out;
  out.reserve(items.size());
  for (const auto& i : items) out.push_back(i.relevant);
  return out;
}

std::string_view relevance_name(Relevance r) { return r == Relevance::majority ? "majority" : "any"; }

Relevance parse_relevance(std::string_view name) {
  if (name == "majority") return Relevance::majority;
  if (name == "any") return Relevance::any;
  throw InputError("unknown relevance rule '" + std::string(name) + "' (majority, any)");
}

RankedList rank_entities(const std::vector<MentionCandidate>& mentions, const VectorSet& query,
                         const std::string& document_id, Role role, Relevance relevance) {
  struct Entry {
    RankedItem item;
    std::size_t first_position = 0;
    std::vector<std::pair<std::size_t, Role>> roles;
  };
  std::map<std::string, Entry> by_entity;
  for (const auto& m : mentions) {
    auto [it, inserted] = by_entity.try_emplace(m.entity_key);
    Entry& e = it->second;
    if (inserted) {
      e.item.entity_key = m.entity_key;
      e.item.best_mention = m.mention_index;
      e.first_position = m.mention_index;
    }
    e.first_position = std::min(e.first_position, m.mention_index);
    e.roles.emplace_back(m.mention_index, m.gold_role);
    if (!m.vectors) continue;
    const double score = sim_ga(*m.vectors, query);
    const bool better = !e.item.rankable || score > e.item.score ||
                        (score == e.item.score && m.mention_index < e.item.best_mention);
    if (better) {
      e.item.score = score;
      e.item.best_mention = m.mention_index;
      e.item.rankable = true;
    }
  }

  std::vector<Entry> entries;
  entries.reserve(by_entity.size());
  for (auto& [key, e] : by_entity) {
    std::sort(e.roles.begin(), e.roles.end());
    std::vector<Role> ordered;
    for (const auto& [pos, r] : e.roles) ordered.push_back(r);
    e.item.relevant = relevance == Relevance::majority
                          ? majority_role(ordered) == role
                          : std::find(ordered.begin(), ordered.end(), role) != ordered.end();
    entries.push_back(std::move(e));
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.item.rankable != b.item.rankable) return a.item.rankable;
    if (a.item.rankable && a.item.score != b.item.score) return a.item.score > b.item.score;
    return a.first_position < b.first_position;
  });

  RankedList list;
  list.document_id = document_id;
  list.role = role;
  for (auto& e : entries) list.items.push_back(std::move(e.item));
  return list;
}

std::optional<double> average_precision_at_k(std::span<const bool> relevance, std::size_t relevant_total,
                                             std::size_t k) {
  if (relevant_total == 0) return std::nullopt;
  double sum = 0.0;
  std::size_t hits = 0;
  const std::size_t n = std::min(k, relevance.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!relevance[i]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  return sum / static_cast<double>(std::min(k, relevant_total));
}

std::optional<double> average_precision_at_k(const RankedList& list, std::size_t k) {
  // std::vector<bool> has no contiguous storage; copy into a plain array.
  const auto rel = list.relevance();
  std::unique_ptr<bool[]> flags(new bool[rel.size()]);
  std::copy(rel.begin(), rel.end(), flags.get());
  return average_precision_at_k(std::span<const bool>(flags.get(), rel.size()), list.relevant_count(), k);
}

double map_at_k(const std::vector<RankedList>& lists, std::size_t k) {
  if (k == 0) throw std::invalid_argument("mAP@K needs K >= 1");
  double sum = 0.0;
  std::size_t included = 0;
  for (const auto& list : lists) {
    if (auto ap = average_precision_at_k(list, k)) {
      sum += *ap;
      ++included;
    }
  }
  if (included == 0) throw std::invalid_argument("mAP@K over zero queries with relevant entities");
  return sum / static_cast<double>(included);
}

std::vector<double> map_curve(const std::vector<RankedList>& lists, std::size_t kmax) {
  std::vector<double> curve;
  for (std::size_t k = 1; k <= kmax; ++k) curve.push_back(map_at_k(lists, k));
  return curve;
}

RankingReport evaluate_rankings(const std::vector<RankedList>& lists, std::size_t kmax, std::string method) {
  RankingReport report;
  report.method = std::move(method);
  report.kmax = kmax;
  std::array<std::vector<double>, kRoleCount> role_sum{};
  std::array<std::size_t, kRoleCount> role_n{};
  report.map.assign(kmax, 0.0);
  for (const auto& list : lists) {
    const std::size_t r = list.relevant_count();
    if (r == 0) {
      ++report.excluded_queries;
      continue;
    }
    QueryResult q{list.document_id, list.role, r, {}};
    auto& rs = role_sum[role_index(list.role)];
    rs.resize(kmax, 0.0);
    for (std::size_t k = 1; k <= kmax; ++k) {
      const double ap = *average_precision_at_k(list, k);
      q.ap.push_back(ap);
      report.map[k - 1] += ap;
      rs[k - 1] += ap;
    }
    ++role_n[role_index(list.role)];
    report.queries.push_back(std::move(q));
  }
  if (report.queries.empty()) throw std::invalid_argument("no query has a relevant entity");
  for (auto& v : report.map) v /= static_cast<double>(report.queries.size());
  for (std::size_t r = 0; r < kRoleCount; ++r) {
    if (role_n[r] == 0) continue;
    report.per_role[r] = role_sum[r];
    for (auto& v : report.per_role[r]) v /= static_cast<double>(role_n[r]);
  }
  return report;
}

std::string format_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

json to_json(const RankingReport& report) {
  json queries = json::array();
  for (const auto& q : report.queries)
    queries.push_back({{"document", q.document_id}, {"role", role_name(q.role)}, {"relevant", q.relevant}, {"ap", q.ap}});
  json roles = json::object();
  for (Role r : kStudyRoles)
    if (!report.per_role[role_index(r)].empty()) roles[std::string(role_name(r))] = report.per_role[role_index(r)];
  return {{"method", report.method},
          {"kmax", report.kmax},
          {"map", report.map},
          {"per_role", roles},
          {"included_queries", report.queries.size()},
          {"excluded_queries", report.excluded_queries},
          {"mentions", report.mentions},
          {"unrankable_mentions", report.unrankable_mentions},
          {"queries", queries}};
}

void write_curve_csv(const RankingReport& report, std::ostream& out) {
  out << "K,mAP\n";
  for (std::size_t k = 1; k <= report.map.size(); ++k) out << k << ',' << format_metric(report.map[k - 1]) << '\n';
}

void write_role_csv(const RankingReport& report, std::ostream& out) {
  out << "role";
  for (std::size_t k = 1; k <= report.kmax; ++k) out << ",mAP@" << k;
  out << '\n';
  for (Role r : kStudyRoles) {
    out << role_name(r);
    const auto& curve = report.per_role[role_index(r)];
    for (std::size_t k = 0; k < report.kmax; ++k) out << ',' << (curve.empty() ? "n/a" : format_metric(curve[k]));
    out << '\n';
  }
}

}  // namespace roledet
