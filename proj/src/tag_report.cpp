#include "roledet/tag_report.hpp"

#include "roledet/errors.hpp"
#include "roledet/ranking.hpp"
#include "roledet/tagging.hpp"

namespace roledet {

namespace {

std::optional<double> macro(const std::array<RolePrecision, kRoleCount>& counts) {
  double sum = 0.0;
  std::size_t n = 0;
  for (Role r : kStudyRoles)
    if (auto p = counts[role_index(r)].precision()) {
      sum += *p;
      ++n;
    }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::optional<Role> token_role(const std::string& tag) {
  if (tag == "O") return std::nullopt;
  if (tag.size() < 3 || tag[1] != '-') throw InputError("bad BIO tag '" + tag + "'");
  return require_role(tag.substr(2));
}

nlohmann::json metric(std::optional<double> v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

std::string cell(std::optional<double> v) { return v ? format_metric(*v) : "n/a"; }

}  // namespace

std::optional<double> TaggerReport::macro_precision() const { return macro(mention); }

std::optional<double> TaggerReport::token_macro_precision() const { return macro(token); }

std::optional<double> TaggerReport::micro_precision() const {
  RolePrecision pooled;
  for (Role r : kStudyRoles) {
    pooled.predicted += mention[role_index(r)].predicted;
    pooled.correct += mention[role_index(r)].correct;
  }
  return pooled.precision();
}

TaggerReport role_precision_report(const std::vector<std::vector<std::string>>& gold,
                                   const std::vector<std::vector<std::string>>& predicted, std::string system) {
  if (gold.size() != predicted.size())
    throw InputError("gold has " + std::to_string(gold.size()) + " sequences, predictions have " +
                     std::to_string(predicted.size()));
  TaggerReport report;
  report.system = std::move(system);
  report.sequences = gold.size();
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != predicted[s].size())
      throw InputError("length mismatch in sequence " + std::to_string(s) + ": gold " +
                       std::to_string(gold[s].size()) + ", predicted " + std::to_string(predicted[s].size()));
    const BioSpans g = decode_bio(gold[s]);
    const BioSpans p = decode_bio(predicted[s]);
    report.repairs += p.repairs;
    for (const auto& span : p.spans) {
      auto& c = report.mention[role_index(span.role)];
      ++c.predicted;
      for (const auto& gs : g.spans)
        if (gs == span) {
          ++c.correct;
          break;
        }
    }
    for (std::size_t i = 0; i < gold[s].size(); ++i) {
      const auto pr = token_role(predicted[s][i]);
      if (!pr) continue;
      auto& c = report.token[role_index(*pr)];
      ++c.predicted;
      if (token_role(gold[s][i]) == pr) ++c.correct;
    }
  }
  return report;
}

nlohmann::json to_json(const TaggerReport& report) {
  nlohmann::json roles = nlohmann::json::object();
  for (Role r : kStudyRoles) {
    const auto& m = report.mention[role_index(r)];
    const auto& t = report.token[role_index(r)];
    roles[std::string(role_name(r))] = {{"predicted_mentions", m.predicted},
                                        {"correct_mentions", m.correct},
                                        {"precision", metric(m.precision())},
                                        {"predicted_tokens", t.predicted},
                                        {"correct_tokens", t.correct},
                                        {"token_precision", metric(t.precision())}};
  }
  return {{"system", report.system},
          {"sequences", report.sequences},
          {"repairs", report.repairs},
          {"roles", roles},
          {"average_precision", metric(report.macro_precision())},
          {"micro_precision", metric(report.micro_precision())},
          {"token_average_precision", metric(report.token_macro_precision())}};
}

void write_precision_table(const std::vector<TaggerReport>& reports, std::ostream& out) {
  out << "Role";
  for (const auto& r : reports) out << ',' << r.system;
  out << '\n';
  for (Role role : kStudyRoles) {
    out << role_name(role);
    for (const auto& r : reports) out << ',' << cell(r.mention[role_index(role)].precision());
    out << '\n';
  }
  out << "Average Precision";
  for (const auto& r : reports) out << ',' << cell(r.macro_precision());
  out << '\n';
}

}  // namespace roledet
