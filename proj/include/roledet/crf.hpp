#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "roledet/lattice.hpp"
#include "roledet/tagging.hpp"

namespace roledet {

/// Observation attributes of every position: lowercased word, 3-letter prefix,
/// all-caps and initial-capital flags for the word and its two neighbours
/// (sentence edges map to BOS/EOS sentinels), plus a bias attribute.
std::vector<std::vector<std::string>> extract_features(const std::vector<std::string>& tokens);

/// Linear-chain CRF. Score of a path y:
///   sum_i [start(y_0) if i == 0] + trans(y_{i-1}, y_i) + sum_{a in attrs(i)} state(a, y_i)
struct CrfModel {
  TagSet tags;
  std::vector<std::string> attributes;
  std::unordered_map<std::string, std::size_t> attribute_index;
  Eigen::MatrixXd state;  ///< A x T
  Eigen::MatrixXd trans;  ///< T x T
  Eigen::VectorXd start;  ///< T
  double lambda = 0.1;

  std::size_t parameter_count() const {
    return static_cast<std::size_t>(state.size() + trans.size() + start.size());
  }
  double squared_norm() const { return state.squaredNorm() + trans.squaredNorm() + start.squaredNorm(); }
};

/// A sequence with attributes resolved to model indices; unknown attributes are dropped.
struct CrfInstance {
  std::vector<std::vector<std::size_t>> attributes;
  std::vector<std::size_t> tags;
};

CrfInstance make_instance(const CrfModel& model, const std::vector<std::string>& tokens,
                          const std::vector<std::size_t>& tags = {});

/// n x T emission potentials of an instance.
Eigen::MatrixXd emission_potentials(const CrfModel& model, const CrfInstance& inst);

struct CrfGradient {
  Eigen::MatrixXd state;
  Eigen::MatrixXd trans;
  Eigen::VectorXd start;
};

/// sum_i [log Z(x_i) - score(x_i, y_i)] + regularizer_scale * lambda/2 * |w|^2.
/// Adds the gradient into grad when given (grad must be sized like the model).
double crf_loss(const CrfModel& model, const std::vector<CrfInstance>& data, double regularizer_scale = 1.0,
                CrfGradient* grad = nullptr);

struct CrfOptimizerConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 16;
  double learning_rate = 0.1;
  /// Learning rate is multiplied by this after every epoch.
  double decay = 0.9;
  std::uint64_t seed = 1;
};

struct CrfTrainStats {
  /// Full regularized loss before training and after each epoch.
  std::vector<double> loss;
};

struct CrfTrainResult {
  CrfModel model;
  CrfTrainStats stats;
};

/// Builds the attribute dictionary from the training data, then minimizes the
/// L2-regularized negative conditional log-likelihood by mini-batch gradient
/// steps. Throws InputError on empty data and NumericalError on a non-finite loss.
CrfTrainResult crf_train(const std::vector<TaggedSequence>& data, const TagSet& tags, double lambda,
                         const CrfOptimizerConfig& cfg = {});

std::vector<std::size_t> crf_decode(const CrfModel& model, const std::vector<std::string>& tokens);

}  // namespace roledet
