#pragma once

#include <Eigen/Dense>

namespace reid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A quadratic distance (x-z)^T B M B^T (x-z) for a d x r basis B and a
/// symmetric r x r kernel M, stored in diagonal form: with M = Q diag(w) Q^T
/// and T = B Q the distance is sum_k w_k (t_k^T (x - z))^2. Scores computed
/// this way are exactly symmetric and exactly zero for identical inputs.
class QuadraticForm {
 public:
  QuadraticForm() = default;
  QuadraticForm(const Matrix& basis, const Matrix& kernel);

  Eigen::Index input_dim() const { return transform_.rows(); }

  /// T^T x for every column of `samples`.
  Matrix project(const Matrix& samples) const;
  double distance(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& z) const;
  /// p x g scores from already projected probes and gallery.
  Matrix pairwise_projected(const Matrix& probes, const Matrix& gallery) const;

 private:
  Matrix transform_;
  Vector weights_;
};

/// (A + A^T) / 2
inline Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace reid
