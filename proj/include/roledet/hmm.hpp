#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "roledet/lattice.hpp"
#include "roledet/tagging.hpp"

namespace roledet {

/// First-order HMM with additively smoothed multinomials. The last emission
/// column is reserved for unknown words.
struct HmmModel {
  TagSet tags;
  std::vector<std::string> words;
  std::unordered_map<std::string, std::size_t> word_index;
  Eigen::VectorXd initial;     ///< T
  Eigen::MatrixXd transition;  ///< T x T, row = previous tag
  Eigen::MatrixXd emission;    ///< T x (W + 1)

  std::size_t unknown() const { return words.size(); }
  std::size_t word(const std::string& w) const;
  /// log P(tags, tokens).
  double log_joint(const std::vector<std::string>& tokens, const std::vector<std::size_t>& tag_path) const;
};

/// Maximum-likelihood counts plus alpha_t on transitions/initial and alpha_e on
/// emissions (including the unknown-word column). Rows with no mass at all fall
/// back to uniform. Throws InputError on an empty training set.
HmmModel hmm_train(const std::vector<TaggedSequence>& data, const TagSet& tags, double alpha_t = 0.1,
                   double alpha_e = 0.1);

/// argmax over tag paths of log P(tags, tokens); ties to the lower tag index.
std::vector<std::size_t> viterbi_decode(const HmmModel& model, const std::vector<std::string>& tokens);

}  // namespace roledet
