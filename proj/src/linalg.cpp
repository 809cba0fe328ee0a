#include "reid/linalg.hpp"

#include "reid/error.hpp"

namespace reid {

QuadraticForm::QuadraticForm(const Matrix& basis, const Matrix& kernel) {
  if (kernel.rows() != kernel.cols() || basis.cols() != kernel.rows()) {
    throw UsageError("quadratic form: basis and kernel sizes disagree");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(kernel));
  if (eig.info() != Eigen::Success) {
    throw NumericError("quadratic form: eigendecomposition of the metric kernel failed");
  }
  transform_ = basis * eig.eigenvectors();
  weights_ = eig.eigenvalues();
}

Matrix QuadraticForm::project(const Matrix& samples) const {
  if (samples.rows() != transform_.rows()) {
    throw UsageError("feature length " + std::to_string(samples.rows()) +
                     " does not match model input dimension " + std::to_string(transform_.rows()));
  }
  return transform_.transpose() * samples;
}

double QuadraticForm::distance(const Eigen::Ref<const Vector>& x,
                               const Eigen::Ref<const Vector>& z) const {
  if (x.size() != transform_.rows() || z.size() != transform_.rows()) {
    throw UsageError("vector length does not match model input dimension " +
                     std::to_string(transform_.rows()));
  }
  const Vector u = transform_.transpose() * (x - z);
  return (weights_.array() * u.array().square()).sum();
}

Matrix QuadraticForm::pairwise_projected(const Matrix& probes, const Matrix& gallery) const {
  Matrix out(probes.cols(), gallery.cols());
  for (Eigen::Index j = 0; j < gallery.cols(); ++j) {
    for (Eigen::Index i = 0; i < probes.cols(); ++i) {
      out(i, j) = (weights_.array() * (probes.col(i) - gallery.col(j)).array().square()).sum();
    }
  }
  return out;
}

}  // namespace reid
