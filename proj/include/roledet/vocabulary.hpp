#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "roledet/corpus.hpp"

namespace roledet {

/// Dense token <-> index map with corpus frequencies. Indices run 0..size()-1,
/// ordered by descending frequency then token text.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Appends a token; returns its index. Re-adding returns the existing index.
  std::size_t add(const std::string& token, std::uint64_t count, bool special = false);

  std::optional<std::size_t> find(const std::string& token) const;
  bool contains(const std::string& token) const { return index_.count(token) > 0; }

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(std::size_t i) const { return tokens_[i]; }
  std::uint64_t count(std::size_t i) const { return counts_[i]; }
  bool is_special(std::size_t i) const { return special_[i] != 0; }
  std::uint64_t total_count() const;

  const std::vector<std::string>& tokens() const { return tokens_; }

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_ && counts_ == other.counts_ && special_ == other.special_;
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::vector<char> special_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Keeps tokens seen at least min_count times, plus every special token
/// regardless of frequency (specials absent from the stream get count 0).
/// Throws InputError on an empty stream.
Vocabulary build_vocab(const TokenStream& stream, std::uint64_t min_count,
                       const std::set<std::string>& specials = {});

/// Maps a sentence to vocabulary indices, dropping out-of-vocabulary tokens.
std::vector<std::size_t> to_indices(const Vocabulary& vocab, const std::vector<std::string>& sentence);

}  // namespace roledet
