#include "roledet/hmm.hpp"

#include "roledet/errors.hpp"

namespace roledet {

std::size_t HmmModel::word(const std::string& w) const {
  auto it = word_index.find(w);
  return it == word_index.end() ? unknown() : it->second;
}

namespace {

Eigen::MatrixXd emission_scores(const HmmModel& model, const std::vector<std::string>& tokens) {
  Eigen::MatrixXd emit(static_cast<Eigen::Index>(tokens.size()), static_cast<Eigen::Index>(model.tags.size()));
  for (std::size_t i = 0; i < tokens.size(); ++i)
    emit.row(static_cast<Eigen::Index>(i)) =
        model.emission.col(static_cast<Eigen::Index>(model.word(tokens[i]))).transpose().array().log();
  return emit;
}

/// Normalizes counts + alpha; an all-zero row becomes uniform.
void normalize_rows(Eigen::MatrixXd& m, double alpha) {
  m.array() += alpha;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double total = m.row(r).sum();
    if (total > 0.0)
      m.row(r) /= total;
    else
      m.row(r).setConstant(1.0 / static_cast<double>(m.cols()));
  }
}

}  // namespace

double HmmModel::log_joint(const std::vector<std::string>& tokens, const std::vector<std::size_t>& tag_path) const {
  const Eigen::VectorXd start = initial.array().log();
  const Eigen::MatrixXd trans = transition.array().log();
  return path_score<double>(start, trans, emission_scores(*this, tokens), tag_path);
}

HmmModel hmm_train(const std::vector<TaggedSequence>& data, const TagSet& tags, double alpha_t, double alpha_e) {
  if (data.empty()) throw InputError("HMM training set is empty");
  if (alpha_t < 0.0 || alpha_e < 0.0) throw InputError("smoothing constants must be >= 0");
  HmmModel model;
  model.tags = tags;
  for (const auto& seq : data)
    for (const auto& w : seq.tokens)
      if (model.word_index.try_emplace(w, model.words.size()).second) model.words.push_back(w);

  const auto T = static_cast<Eigen::Index>(tags.size());
  const auto W = static_cast<Eigen::Index>(model.words.size());
  Eigen::MatrixXd initial = Eigen::MatrixXd::Zero(1, T);
  model.transition = Eigen::MatrixXd::Zero(T, T);
  model.emission = Eigen::MatrixXd::Zero(T, W + 1);
  for (const auto& seq : data) {
    if (seq.tokens.size() != seq.tags.size()) throw InputError("token/tag length mismatch in training data");
    if (seq.tags.empty()) continue;
    initial(0, static_cast<Eigen::Index>(seq.tags[0])) += 1.0;
    for (std::size_t i = 0; i < seq.tags.size(); ++i) {
      const auto t = static_cast<Eigen::Index>(seq.tags[i]);
      model.emission(t, static_cast<Eigen::Index>(model.word_index.at(seq.tokens[i]))) += 1.0;
      if (i > 0) model.transition(static_cast<Eigen::Index>(seq.tags[i - 1]), t) += 1.0;
    }
  }
  normalize_rows(initial, alpha_t);
  normalize_rows(model.transition, alpha_t);
  normalize_rows(model.emission, alpha_e);
  model.initial = initial.row(0).transpose();
  return model;
}

std::vector<std::size_t> viterbi_decode(const HmmModel& model, const std::vector<std::string>& tokens) {
  if (tokens.empty()) return {};
  const Eigen::VectorXd start = model.initial.array().log();
  const Eigen::MatrixXd trans = model.transition.array().log();
  return viterbi<double>(start, trans, emission_scores(model, tokens));
}

}  // namespace roledet
