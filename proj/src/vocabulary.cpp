#include "roledet/vocabulary.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "roledet/errors.hpp"

namespace roledet {

std::size_t Vocabulary::add(const std::string& token, std::uint64_t count, bool special) {
  auto [it, inserted] = index_.try_emplace(token, tokens_.size());
  if (inserted) {
    tokens_.push_back(token);
    counts_.push_back(count);
    special_.push_back(special ? 1 : 0);
  }
  return it->second;
}

std::optional<std::size_t> Vocabulary::find(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Vocabulary::total_count() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

Vocabulary build_vocab(const TokenStream& stream, std::uint64_t min_count,
                       const std::set<std::string>& specials) {
  std::map<std::string, std::uint64_t> counts;
  std::size_t total = 0;
  for (const auto& sentence : stream)
    for (const auto& tok : sentence) {
      ++counts[tok];
      ++total;
    }
  if (total == 0) throw InputError("cannot build a vocabulary from an empty token stream");
  for (const auto& s : specials) counts.try_emplace(s, 0);

  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (const auto& [tok, c] : counts)
    if (c >= min_count || specials.count(tok)) kept.emplace_back(tok, c);
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  Vocabulary vocab;
  for (const auto& [tok, c] : kept) vocab.add(tok, c, specials.count(tok) > 0);
  return vocab;
}

std::vector<std::size_t> to_indices(const Vocabulary& vocab, const std::vector<std::string>& sentence) {
  std::vector<std::size_t> out;
  out.reserve(sentence.size());
  for (const auto& tok : sentence)
    if (auto i = vocab.find(tok)) out.push_back(*i);
  return out;
}

}  // namespace roledet
