#pragma once

#include <Eigen/Dense>
#include <vector>

namespace roledet {

/// Group-average similarity of two column sets of unit vectors: the mean cosine
/// over all unordered pairs of distinct members of the union, computed from the
/// squared norm of the summed vectors.
///   (|sum v|^2 - N) / (N (N - 1)),  N = N_e + N_t
template <typename DerivedE, typename DerivedT>
typename DerivedE::Scalar sim_ga(const Eigen::MatrixBase<DerivedE>& e, const Eigen::MatrixBase<DerivedT>& t) {
  using Scalar = typename DerivedE::Scalar;
  const auto sum = (e.rowwise().sum() + t.rowwise().sum()).eval();
  const Scalar n = static_cast<Scalar>(e.cols() + t.cols());
  return (sum.squaredNorm() - n) / (n * (n - Scalar(1)));
}

/// Non-empty set of unit-norm vectors stored as columns.
class VectorSet {
 public:
  static constexpr double kNormTolerance = 1e-9;

  /// Takes ownership; throws std::invalid_argument if empty or any column is off unit norm.
  explicit VectorSet(Eigen::MatrixXd columns);

  /// Normalizes each vector; throws std::invalid_argument on an empty list or a zero vector.
  static VectorSet normalized(const std::vector<Eigen::VectorXd>& vectors);

  const Eigen::MatrixXd& matrix() const { return columns_; }
  Eigen::Index size() const { return columns_.cols(); }
  Eigen::Index dim() const { return columns_.rows(); }
  Eigen::VectorXd centroid() const { return columns_.rowwise().mean(); }

  bool operator==(const VectorSet& o) const { return columns_ == o.columns_; }

 private:
  Eigen::MatrixXd columns_;
};

inline double sim_ga(const VectorSet& e, const VectorSet& t) { return sim_ga(e.matrix(), t.matrix()); }

}  // namespace roledet
