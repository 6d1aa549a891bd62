#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "roledet/rng.hpp"
#include "roledet/vocabulary.hpp"

namespace roledet {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RowMatrixf = RowMatrix<float>;

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

template <typename Scalar>
Scalar log_sigmoid(Scalar x) {
  if (x >= Scalar(0)) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

/// Negative-sampling loss of one center vector: targets.row(0) is the observed
/// context, the remaining rows are negatives.
///   L = -log s(u_0 . v) - sum_k log s(-u_k . v)
template <typename Scalar>
Scalar sgns_loss(const Eigen::Ref<const Vector<Scalar>>& center,
                 const Eigen::Ref<const RowMatrix<Scalar>>& targets) {
  const Vector<Scalar> scores = targets * center;
  Scalar loss = -log_sigmoid(scores(0));
  for (Eigen::Index k = 1; k < scores.size(); ++k) loss -= log_sigmoid(-scores(k));
  return loss;
}

/// Loss and its gradient with respect to the center vector and every target row.
template <typename Scalar>
Scalar sgns_gradient(const Eigen::Ref<const Vector<Scalar>>& center,
                     const Eigen::Ref<const RowMatrix<Scalar>>& targets,
                     Eigen::Ref<Vector<Scalar>> grad_center,
                     Eigen::Ref<RowMatrix<Scalar>> grad_targets) {
  const Vector<Scalar> scores = targets * center;
  Vector<Scalar> coef(scores.size());
  Scalar loss = -log_sigmoid(scores(0));
  coef(0) = sigmoid(scores(0)) - Scalar(1);
  for (Eigen::Index k = 1; k < scores.size(); ++k) {
    loss -= log_sigmoid(-scores(k));
    coef(k) = sigmoid(scores(k));
  }
  grad_center.noalias() = targets.transpose() * coef;
  grad_targets.noalias() = coef * center.transpose();
  return loss;
}

/// Draws tokens with probability proportional to count^power. Falls back to a
/// uniform draw when every count is zero.
class NegativeSampler {
 public:
  NegativeSampler(const Vocabulary& vocab, double power);

  std::size_t draw(Rng& rng) const;
  double probability(std::size_t index) const;
  std::size_t size() const { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

struct EmbeddingModel {
  Vocabulary vocab;
  RowMatrixf input;   ///< V x D word vectors used for similarity
  RowMatrixf output;  ///< V x D context vectors

  std::size_t dim() const { return static_cast<std::size_t>(input.cols()); }
  std::size_t size() const { return vocab.size(); }
  bool operator==(const EmbeddingModel& o) const {
    return vocab == o.vocab && input == o.input && output == o.output;
  }
};

/// Input rows uniform in [-0.5/D, 0.5/D], output rows zero.
EmbeddingModel make_model(Vocabulary vocab, std::size_t dim, std::uint64_t seed);

/// Overwrites input rows of tokens found in a text vector file. Returns how many
/// vocabulary tokens were covered. Throws on dimension mismatch or a malformed line.
std::size_t init_pretrained(EmbeddingModel& model, const std::filesystem::path& path);

/// Copies input and output rows of every token shared with base. Returns the count.
std::size_t warm_start(EmbeddingModel& model, const EmbeddingModel& base);

struct TrainConfig {
  std::size_t window_radius = 5;
  std::size_t negative_samples = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  double subsample_threshold = 1e-3;
  std::uint64_t seed = 1;
  double unigram_power = 0.75;
  /// 1 keeps training bitwise deterministic; more threads use racy lock-free updates.
  std::size_t threads = 1;
  std::size_t probe_pairs = 2000;

  void validate() const;
};

struct TrainStats {
  /// Mean loss of the fixed probe batch, before training and after each epoch.
  std::vector<double> probe_loss;
  std::uint64_t pairs = 0;
};

/// Skip-gram with negative sampling over (center, context) pairs inside each
/// sentence, linear learning-rate decay. The vocabulary must already cover the stream
/// (tokens outside it are skipped). Throws NumericalError on a non-finite update.
TrainStats train_skipgram(EmbeddingModel& model, const TokenStream& stream, const TrainConfig& cfg);

/// Cosine similarity of two input rows; 0 when either is the zero vector.
double cosine(const EmbeddingModel& model, std::size_t a, std::size_t b);

using TokenFilter = std::function<bool(std::size_t)>;

/// n most similar tokens by cosine over input vectors, query excluded, ties
/// broken by vocabulary index. `skip` (optional) removes candidates.
/// Throws InputError for an unknown query.
std::vector<std::pair<std::string, double>> top_n_similar(const EmbeddingModel& model,
                                                          const std::string& query, std::size_t n,
                                                          const TokenFilter& skip = {});

enum class VectorFormat { text, binary };

void save_model(const EmbeddingModel& model, const std::filesystem::path& path, VectorFormat format);
EmbeddingModel load_model(const std::filesystem::path& path);
void write_binary(const EmbeddingModel& model, std::ostream& out);
EmbeddingModel read_binary(std::istream& in);
void write_text(const EmbeddingModel& model, std::ostream& out);
/// Text vectors carry no context matrix or counts; output rows load as zero.
EmbeddingModel read_text(std::istream& in, const std::string& source = "<stream>");

}  // namespace roledet
