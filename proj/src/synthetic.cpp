#include "roledet/synthetic.hpp"

#include <algorithm>

#include "roledet/errors.hpp"
#include "roledet/rng.hpp"
#include "roledet/statistics.hpp"

namespace roledet {

using nlohmann::json;

std::map<Role, std::vector<std::string>> default_cues() {
  return {
      {Role::PER_Victim, {"was killed in", "injured critically", "died of wounds"}},
      {Role::PER_Accused, {"was arrested for", "alleged mastermind", "suspect confessed"}},
      {Role::PER_Others, {"minister condemned", "spokesman stated", "official visited"}},
      {Role::ORG_Victim, {"convoy was ambushed", "office damaged", "headquarters targeted"}},
      {Role::ORG_Accused, {"claimed responsibility", "outfit banned", "militant group"}},
      {Role::ORG_Others, {"agency condemned", "council urged", "committee reviewed"}},
      {Role::LOC_Event, {"blast occurred at", "explosion rocked", "attack site"}},
      {Role::LOC_Accused, {"training camp in", "hideout raided", "operatives came from"}},
      {Role::LOC_Victim, {"tourists from", "pilgrims hailing", "residents native"}},
      {Role::LOC_Others, {"returned to", "flew to", "summit held"}},
  };
}

void SyntheticSpec::validate() const {
  auto rate = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
      throw InputError(std::string("synthetic spec: ") + name + " must lie in [0,1]");
  };
  rate(multi_mention_rate, "multi_mention_rate");
  rate(majority_noise, "majority_noise");
  rate(positional_noise, "positional_noise");
  rate(cue_noise, "cue_noise");
  if (entities_per_document == 0) throw InputError("synthetic spec: entities_per_document must be >= 1");
  if (roles.empty()) throw InputError("synthetic spec: roles must not be empty");
  if (multi_mention_rate > 0 && max_mentions < 2)
    throw InputError("synthetic spec: max_mentions must be >= 2 when multi_mention_rate > 0");
  if (filler_min > filler_max) throw InputError("synthetic spec: filler_min > filler_max");
  if (filler_vocabulary == 0) throw InputError("synthetic spec: filler_vocabulary must be >= 1");
  if (max_entity_tokens == 0) throw InputError("synthetic spec: max_entity_tokens must be >= 1");
  for (Role r : roles) {
    auto it = cues.find(r);
    if (it == cues.end() || it->second.empty())
      throw InputError("synthetic spec: no cue phrases for role " + std::string(role_name(r)));
  }
}

SyntheticSpec spec_from_json(const json& j) {
  SyntheticSpec spec;
  try {
    spec.documents = j.value("documents", spec.documents);
    spec.entities_per_document = j.value("entities_per_document", spec.entities_per_document);
    if (j.contains("roles")) {
      spec.roles.clear();
      for (const auto& r : j.at("roles")) spec.roles.push_back(require_role(r.get<std::string>()));
    }
    spec.distinct_roles = j.value("distinct_roles", spec.distinct_roles);
    if (j.contains("cues")) {
      spec.cues.clear();
      for (const auto& [name, phrases] : j.at("cues").items())
        spec.cues[require_role(name)] = phrases.get<std::vector<std::string>>();
    }
    spec.multi_mention_rate = j.value("multi_mention_rate", spec.multi_mention_rate);
    spec.max_mentions = j.value("max_mentions", spec.max_mentions);
    spec.majority_noise = j.value("majority_noise", spec.majority_noise);
    spec.positional_noise = j.value("positional_noise", spec.positional_noise);
    spec.cue_noise = j.value("cue_noise", spec.cue_noise);
    spec.cue_first_mention_only = j.value("cue_first_mention_only", spec.cue_first_mention_only);
    spec.filler_vocabulary = j.value("filler_vocabulary", spec.filler_vocabulary);
    spec.filler_min = j.value("filler_min", spec.filler_min);
    spec.filler_max = j.value("filler_max", spec.filler_max);
    spec.max_entity_tokens = j.value("max_entity_tokens", spec.max_entity_tokens);
  } catch (const json::exception& e) {
    throw InputError(std::string("synthetic spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

json to_json(const SyntheticSpec& spec) {
  json roles = json::array();
  for (Role r : spec.roles) roles.push_back(role_name(r));
  json cues = json::object();
  for (const auto& [r, phrases] : spec.cues) cues[std::string(role_name(r))] = phrases;
  return {{"documents", spec.documents},
          {"entities_per_document", spec.entities_per_document},
          {"roles", roles},
          {"distinct_roles", spec.distinct_roles},
          {"cues", cues},
          {"multi_mention_rate", spec.multi_mention_rate},
          {"max_mentions", spec.max_mentions},
          {"majority_noise", spec.majority_noise},
          {"positional_noise", spec.positional_noise},
          {"cue_noise", spec.cue_noise},
          {"cue_first_mention_only", spec.cue_first_mention_only},
          {"filler_vocabulary", spec.filler_vocabulary},
          {"filler_min", spec.filler_min},
          {"filler_max", spec.filler_max},
          {"max_entity_tokens", spec.max_entity_tokens}};
}

json to_json(const SyntheticTruth& truth) {
  json entities = json::array();
  for (const auto& e : truth.entities) {
    json roles = json::array();
    for (Role r : e.roles) roles.push_back(role_name(r));
    entities.push_back({{"document", e.document_id},
                        {"entity", e.entity_key},
                        {"primary", role_name(e.primary)},
                        {"roles", roles}});
  }
  return {{"mentions", truth.mentions},
          {"cued_mentions", truth.cued_mentions},
          {"wrong_cue_mentions", truth.wrong_cue_mentions},
          {"multi_mention_fraction", truth.multi_mention_fraction},
          {"primary_share_multi", truth.primary_share_multi},
          {"first_mention_primary_multi", truth.first_mention_primary_multi},
          {"entities", entities}};
}

namespace {

const char* const kSyllables[] = {"ka", "ra", "vi", "mo", "sha", "ten", "dur", "li",
                                  "pa", "zen", "ko", "ma", "ri",  "ban", "tho", "ne"};

/// Pronounceable, capitalized, unique per k.
std::string pseudo_name(std::size_t k) {
  std::string name;
  do {
    name += kSyllables[k % 16];
    k /= 16;
  } while (k > 0);
  name += kSyllables[(name.size() * 7) % 16];
  name[0] = static_cast<char>(name[0] - 'a' + 'A');
  return name;
}

std::vector<Role> alternatives(Role primary) {
  std::vector<Role> alts;
  for (Role r : kAllRoles)
    if (r != primary && entity_type(r) == entity_type(primary)) alts.push_back(r);
  return alts;
}

std::vector<std::string> words(const std::string& phrase) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < phrase.size()) {
    while (i < phrase.size() && phrase[i] == ' ') ++i;
    std::size_t j = i;
    while (j < phrase.size() && phrase[j] != ' ') ++j;
    if (j > i) out.push_back(phrase.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

SyntheticCorpus generate_synthetic(std::uint64_t seed, const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(seed);
  SyntheticCorpus out;
  SyntheticTruth& truth = out.truth;

  // The multi-mention entities are an exact, randomly placed quota.
  const std::size_t total_entities = spec.documents * spec.entities_per_document;
  const auto multi_quota = static_cast<std::size_t>(
      std::llround(spec.multi_mention_rate * static_cast<double>(total_entities)));
  std::vector<char> is_multi(total_entities, 0);
  std::fill(is_multi.begin(), is_multi.begin() + static_cast<std::ptrdiff_t>(multi_quota), 1);
  rng.shuffle(is_multi.begin(), is_multi.end());

  std::vector<Role> cue_roles;
  for (const auto& [r, phrases] : spec.cues)
    if (!phrases.empty()) cue_roles.push_back(r);

  auto filler = [&] { return "w" + std::to_string(rng.below(spec.filler_vocabulary)); };
  auto filler_run = [&](Sentence& s) {
    std::size_t n = spec.filler_min + rng.below(spec.filler_max - spec.filler_min + 1);
    for (std::size_t i = 0; i < n; ++i) {
      auto w = filler();
      s.push_back({w, w});
    }
  };

  std::size_t entity_counter = 0;
  double share_sum = 0.0;
  std::size_t first_primary = 0, multi_count = 0;

  for (std::size_t d = 0; d < spec.documents; ++d) {
    Document doc;
    doc.id = "doc" + std::to_string(d);

    std::vector<Role> pool;
    std::vector<PlantedEntity> planted;
    std::vector<std::vector<std::string>> names;
    for (std::size_t e = 0; e < spec.entities_per_document; ++e) {
      if (pool.empty()) {
        pool = spec.roles;
        rng.shuffle(pool.begin(), pool.end());
      }
      PlantedEntity ent;
      ent.document_id = doc.id;
      ent.entity_key = "e" + std::to_string(e);
      if (spec.distinct_roles) {
        ent.primary = pool.back();
        pool.pop_back();
      } else {
        ent.primary = spec.roles[rng.below(spec.roles.size())];
      }

      const std::size_t global = d * spec.entities_per_document + e;
      const std::size_t n = is_multi[global] ? 2 + rng.below(spec.max_mentions - 1) : 1;
      const auto alts = alternatives(ent.primary);
      auto minority = [&] { return alts[rng.below(alts.size())]; };

      ent.roles.assign(n, ent.primary);
      if (n >= 3 && rng.bernoulli(spec.positional_noise)) ent.roles[0] = minority();
      for (std::size_t k = 1; k < n; ++k)
        if (rng.bernoulli(spec.majority_noise)) ent.roles[k] = minority();
      // The planted primary must stay the plurality role.
      for (std::size_t k = n; k-- > 1 && majority_role(ent.roles) != ent.primary;)
        ent.roles[k] = ent.primary;

      std::vector<std::string> name;
      const std::size_t name_len = 1 + rng.below(spec.max_entity_tokens);
      for (std::size_t t = 0; t < name_len; ++t) name.push_back(pseudo_name(entity_counter * 4 + t));
      ++entity_counter;
      names.push_back(std::move(name));
      planted.push_back(std::move(ent));
    }

    // One sentence per mention; interleave entities but keep each entity's order.
    std::vector<std::size_t> slots;
    for (std::size_t e = 0; e < planted.size(); ++e)
      slots.insert(slots.end(), planted[e].roles.size(), e);
    rng.shuffle(slots.begin(), slots.end());

    std::vector<std::size_t> next(planted.size(), 0);
    for (std::size_t e : slots) {
      const std::size_t k = next[e]++;
      const Role role = planted[e].roles[k];
      Sentence s;
      filler_run(s);

      std::vector<std::string> cue;
      if (!spec.cue_first_mention_only || k == 0) {
        Role cue_role = role;
        if (rng.bernoulli(spec.cue_noise) && cue_roles.size() > 1) {
          do {
            cue_role = cue_roles[rng.below(cue_roles.size())];
          } while (cue_role == role);
          ++truth.wrong_cue_mentions;
        }
        const auto& phrases = spec.cues.at(cue_role);
        cue = words(phrases[rng.below(phrases.size())]);
        ++truth.cued_mentions;
      }
      const bool cue_first = rng.bernoulli(0.5);
      if (cue_first)
        for (const auto& w : cue) s.push_back({w, w});
      EntityMention m;
      m.entity_key = planted[e].entity_key;
      m.role = role;
      m.span.sentence = doc.sentences.size();
      m.span.start = s.size();
      for (const auto& w : names[e]) s.push_back({w, w});
      m.span.end = s.size() - 1;
      if (!cue_first)
        for (const auto& w : cue) s.push_back({w, w});
      filler_run(s);

      doc.mentions.push_back(std::move(m));
      doc.sentences.push_back(std::move(s));
      ++truth.mentions;
    }
    finalize(doc);
    out.corpus.documents.push_back(std::move(doc));

    for (auto& ent : planted) {
      const std::size_t n = ent.roles.size();
      if (n >= 2) {
        ++multi_count;
        share_sum += static_cast<double>(std::count(ent.roles.begin(), ent.roles.end(), ent.primary)) /
                     static_cast<double>(n);
        first_primary += ent.roles.front() == ent.primary;
      }
      truth.entities.push_back(std::move(ent));
    }
  }

  if (!truth.entities.empty())
    truth.multi_mention_fraction =
        static_cast<double>(multi_count) / static_cast<double>(truth.entities.size());
  truth.primary_share_multi = multi_count ? share_sum / static_cast<double>(multi_count) : 1.0;
  truth.first_mention_primary_multi =
      multi_count ? static_cast<double>(first_primary) / static_cast<double>(multi_count) : 1.0;
  return out;
}

}  // namespace roledet
