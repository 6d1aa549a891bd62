#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

namespace roledet {

/// Log-space scores of a linear chain: start(t), transition(s,t), emission(i,t).
/// Shared by the HMM (log-probabilities) and the CRF (potentials).

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
Scalar log_sum_exp(const Eigen::Ref<const Vec<Scalar>>& v) {
  const Scalar m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

/// Score of one tag path.
template <typename Scalar>
Scalar path_score(const Vec<Scalar>& start, const Mat<Scalar>& trans, const Mat<Scalar>& emit,
                  const std::vector<std::size_t>& tags) {
  Scalar s = start(tags[0]) + emit(0, tags[0]);
  for (std::size_t i = 1; i < tags.size(); ++i)
    s += trans(tags[i - 1], tags[i]) + emit(static_cast<Eigen::Index>(i), tags[i]);
  return s;
}

/// Highest scoring path. Ties go to the lower tag index: strict comparisons keep
/// the first maximum both for backpointers and for the final tag.
template <typename Scalar>
std::vector<std::size_t> viterbi(const Vec<Scalar>& start, const Mat<Scalar>& trans, const Mat<Scalar>& emit) {
  const Eigen::Index n = emit.rows(), T = emit.cols();
  if (n == 0) return {};
  Mat<Scalar> score(n, T);
  Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic> back(n, T);
  score.row(0) = start.transpose() + emit.row(0);
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index t = 0; t < T; ++t) {
      Eigen::Index best = 0;
      Scalar best_score = score(i - 1, 0) + trans(0, t);
      for (Eigen::Index s = 1; s < T; ++s) {
        const Scalar cand = score(i - 1, s) + trans(s, t);
        if (cand > best_score) {
          best_score = cand;
          best = s;
        }
      }
      score(i, t) = best_score + emit(i, t);
      back(i, t) = best;
    }
  }
  Eigen::Index last = 0;
  for (Eigen::Index t = 1; t < T; ++t)
    if (score(n - 1, t) > score(n - 1, last)) last = t;
  std::vector<std::size_t> path(static_cast<std::size_t>(n));
  path[static_cast<std::size_t>(n - 1)] = static_cast<std::size_t>(last);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    last = back(i, last);
    path[static_cast<std::size_t>(i - 1)] = static_cast<std::size_t>(last);
  }
  return path;
}

template <typename Scalar>
struct ForwardBackward {
  Mat<Scalar> alpha;  ///< n x T
  Mat<Scalar> beta;   ///< n x T
  Scalar log_z = 0;
};

template <typename Scalar>
ForwardBackward<Scalar> forward_backward(const Vec<Scalar>& start, const Mat<Scalar>& trans, const Mat<Scalar>& emit) {
  const Eigen::Index n = emit.rows(), T = emit.cols();
  ForwardBackward<Scalar> fb;
  fb.alpha.resize(n, T);
  fb.beta.resize(n, T);
  fb.alpha.row(0) = start.transpose() + emit.row(0);
  Vec<Scalar> tmp(T);
  for (Eigen::Index i = 1; i < n; ++i)
    for (Eigen::Index t = 0; t < T; ++t) {
      tmp = fb.alpha.row(i - 1).transpose() + trans.col(t);
      fb.alpha(i, t) = log_sum_exp<Scalar>(tmp) + emit(i, t);
    }
  fb.beta.row(n - 1).setZero();
  for (Eigen::Index i = n - 1; i > 0; --i)
    for (Eigen::Index s = 0; s < T; ++s) {
      tmp = trans.row(s).transpose() + emit.row(i).transpose() + fb.beta.row(i).transpose();
      fb.beta(i - 1, s) = log_sum_exp<Scalar>(tmp);
    }
  fb.log_z = log_sum_exp<Scalar>(fb.alpha.row(n - 1).transpose());
  return fb;
}

}  // namespace roledet
