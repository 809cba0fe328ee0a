#include "reid/xqda.hpp"

#include <map>
#include <set>
#include <string>

#include "reid/error.hpp"

namespace reid {

void CrossViewDataset::validate() const {
  if (X.cols() != static_cast<Eigen::Index>(y.size()) ||
      Z.cols() != static_cast<Eigen::Index>(l.size())) {
    throw DataError("dataset: label count does not match sample count");
  }
  if (X.rows() != Z.rows()) {
    throw DataError("dataset: views have different feature dimensions (" +
                    std::to_string(X.rows()) + " vs " + std::to_string(Z.rows()) + ")");
  }
  if (X.rows() < 1) {
    throw DataError("dataset: empty feature dimension");
  }
  const std::set<int> a(y.begin(), y.end());
  const std::set<int> b(l.begin(), l.end());
  if (a != b) {
    throw DataError("dataset: every identity must appear in both views");
  }
  if (a.size() < 2) {
    throw DataError("dataset: at least two identities are required");
  }
}

int CrossViewDataset::class_count() const {
  return static_cast<int>(std::set<int>(y.begin(), y.end()).size());
}

namespace {

struct ClassIndex {
  std::vector<int> of_x;  // class index of each X column
  std::vector<int> of_z;
  int count = 0;
};

ClassIndex index_classes(const CrossViewDataset& ds) {
  std::map<int, int> ids;
  for (int label : ds.y) ids.emplace(label, 0);
  int k = 0;
  for (auto& [label, idx] : ids) idx = k++;
  ClassIndex out;
  out.count = k;
  for (int label : ds.y) out.of_x.push_back(ids.at(label));
  for (int label : ds.l) out.of_z.push_back(ids.at(label));
  return out;
}

}  // namespace

CovariancePair compute_covariances_fast(const CrossViewDataset& ds) {
  ds.validate();
  const ClassIndex cls = index_classes(ds);
  const Eigen::Index d = ds.X.rows();
  const Eigen::Index n = ds.X.cols(), m = ds.Z.cols();

  Vector n_k = Vector::Zero(cls.count), m_k = Vector::Zero(cls.count);
  Matrix S = Matrix::Zero(d, cls.count), R = Matrix::Zero(d, cls.count);
  for (Eigen::Index i = 0; i < n; ++i) {
    n_k(cls.of_x[i]) += 1.0;
    S.col(cls.of_x[i]) += ds.X.col(i);
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    m_k(cls.of_z[j]) += 1.0;
    R.col(cls.of_z[j]) += ds.Z.col(j);
  }

  // Column weights: each x_i pairs with the m_k same-class z's, and vice versa.
  Vector wx(n), wz(m);
  for (Eigen::Index i = 0; i < n; ++i) wx(i) = m_k(cls.of_x[i]);
  for (Eigen::Index j = 0; j < m; ++j) wz(j) = n_k(cls.of_z[j]);

  const Matrix SRt = S * R.transpose();
  Matrix intra = ds.X * wx.asDiagonal() * ds.X.transpose() +
                 ds.Z * wz.asDiagonal() * ds.Z.transpose() - SRt - SRt.transpose();

  const Vector s = ds.X.rowwise().sum();
  const Vector r = ds.Z.rowwise().sum();
  const Matrix srt = s * r.transpose();
  Matrix extra = static_cast<double>(m) * (ds.X * ds.X.transpose()) +
                 static_cast<double>(n) * (ds.Z * ds.Z.transpose()) - srt - srt.transpose() - intra;

  CovariancePair out;
  out.n_I = static_cast<std::uint64_t>(n_k.dot(m_k) + 0.5);
  out.n_E = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(m) - out.n_I;
  if (out.n_E == 0) {
    throw DataError("dataset has no extrapersonal pairs");
  }
  out.sigma_I = symmetrized(intra) / static_cast<double>(out.n_I);
  out.sigma_E = symmetrized(extra) / static_cast<double>(out.n_E);
  return out;
}

CovariancePair compute_covariances_naive(const CrossViewDataset& ds) {
  ds.validate();
  const auto n = static_cast<std::uint64_t>(ds.X.cols());
  const auto m = static_cast<std::uint64_t>(ds.Z.cols());
  if (n * m > kNaivePairLimit) {
    throw UsageError("naive covariance: " + std::to_string(n * m) + " pairs exceed the limit of " +
                     std::to_string(kNaivePairLimit));
  }
  const Eigen::Index d = ds.X.rows();
  CovariancePair out;
  out.sigma_I = Matrix::Zero(d, d);
  out.sigma_E = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < ds.X.cols(); ++i) {
    for (Eigen::Index j = 0; j < ds.Z.cols(); ++j) {
      const Vector diff = ds.X.col(i) - ds.Z.col(j);
      if (ds.y[static_cast<std::size_t>(i)] == ds.l[static_cast<std::size_t>(j)]) {
        out.sigma_I.noalias() += diff * diff.transpose();
        ++out.n_I;
      } else {
        out.sigma_E.noalias() += diff * diff.transpose();
        ++out.n_E;
      }
    }
  }
  if (out.n_E == 0) {
    throw DataError("dataset has no extrapersonal pairs");
  }
  out.sigma_I /= static_cast<double>(out.n_I);
  out.sigma_E /= static_cast<double>(out.n_E);
  return out;
}

CovariancePair pool_covariances(const std::vector<CovariancePair>& parts) {
  if (parts.empty()) {
    throw DataError("no covariance estimates to pool");
  }
  CovariancePair out;
  out.sigma_I = Matrix::Zero(parts[0].sigma_I.rows(), parts[0].sigma_I.cols());
  out.sigma_E = out.sigma_I;
  for (const auto& p : parts) {
    if (p.sigma_I.rows() != out.sigma_I.rows()) {
      throw DataError("cannot pool covariances of different dimensions");
    }
    out.sigma_I += static_cast<double>(p.n_I) * p.sigma_I;
    out.sigma_E += static_cast<double>(p.n_E) * p.sigma_E;
    out.n_I += p.n_I;
    out.n_E += p.n_E;
  }
  out.sigma_I /= static_cast<double>(out.n_I);
  out.sigma_E /= static_cast<double>(out.n_E);
  return out;
}

void XqdaConfig::validate() const {
  if (!(regularizer >= 0.0)) {
    throw UsageError("XQDA regularizer must be non-negative");
  }
  if (max_dims && *max_dims < 1) {
    throw UsageError("XQDA max_dims must be at least 1");
  }
}

GeneralizedEigen solve_generalized_eigen(const CovariancePair& cov, double regularizer) {
  const Eigen::Index d = cov.sigma_I.rows();
  GeneralizedEigen out;
  out.regularizer = regularizer;
  out.sigma_I = cov.sigma_I + regularizer * Matrix::Identity(d, d);
  out.sigma_E = cov.sigma_E;

  Eigen::LLT<Matrix> llt(out.sigma_I);
  if (llt.info() != Eigen::Success) {
    throw NumericError("Cholesky factorization of the regularized intrapersonal covariance failed"
                       " (regularizer " + std::to_string(regularizer) +
                       "); a regularizer such as 0.001 is needed for rank-deficient data");
  }
  const auto L = llt.matrixL();
  // C = L^-1 sigma_E L^-T
  Matrix half = L.solve(out.sigma_E);
  Matrix reduced = L.solve(half.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(reduced));
  if (eig.info() != Eigen::Success) {
    throw NumericError("symmetric eigendecomposition failed in XQDA training");
  }

  out.values = eig.eigenvalues().reverse();
  Matrix u = eig.eigenvectors().rowwise().reverse();
  out.vectors = llt.matrixU().solve(u);
  out.vectors.colwise().normalize();
  return out;
}

int select_dims(const Vector& eigenvalues, const XqdaConfig& cfg) {
  int r = 0;
  while (r < eigenvalues.size() && eigenvalues(r) > cfg.eigen_threshold) ++r;
  if (cfg.max_dims) r = std::min(r, *cfg.max_dims);
  return std::max(r, 1);
}

XqdaModel make_xqda_model(Matrix W, Matrix M, Vector eigenvalues, double regularizer) {
  if (W.cols() < 1 || M.rows() != W.cols() || M.cols() != W.cols() ||
      eigenvalues.size() != W.cols()) {
    throw DataError("inconsistent XQDA model shapes");
  }
  XqdaModel model;
  model.form = QuadraticForm(W, M);
  model.W = std::move(W);
  model.M = std::move(M);
  model.eigenvalues = std::move(eigenvalues);
  model.regularizer = regularizer;
  return model;
}

XqdaModel build_xqda_model(const GeneralizedEigen& eig, int r) {
  if (r < 1 || r > eig.vectors.cols()) {
    throw UsageError("XQDA subspace dimension " + std::to_string(r) + " outside [1, " +
                     std::to_string(eig.vectors.cols()) + "]");
  }
  Matrix W = eig.vectors.leftCols(r);
  const Matrix proj_I = symmetrized(W.transpose() * eig.sigma_I * W);
  const Matrix proj_E = symmetrized(W.transpose() * eig.sigma_E * W);
  const Matrix eye = Matrix::Identity(r, r);

  Eigen::LLT<Matrix> inv_I(proj_I);
  Eigen::LLT<Matrix> inv_E(proj_E);
  if (inv_I.info() != Eigen::Success || inv_E.info() != Eigen::Success) {
    throw NumericError("projected covariance is singular at subspace dimension " +
                       std::to_string(r));
  }
  Matrix M = symmetrized(inv_I.solve(eye) - inv_E.solve(eye));
  return make_xqda_model(std::move(W), std::move(M), eig.values.head(r), eig.regularizer);
}

XqdaModel train_xqda(const CovariancePair& cov, const XqdaConfig& cfg) {
  cfg.validate();
  const GeneralizedEigen eig = solve_generalized_eigen(cov, cfg.regularizer);
  return build_xqda_model(eig, select_dims(eig.values, cfg));
}

XqdaProblem prepare_xqda(const std::vector<CrossViewDataset>& parts) {
  if (parts.empty()) throw DataError("no training data");
  const Eigen::Index d = parts[0].X.rows();
  Eigen::Index samples = 0;
  for (const auto& ds : parts) {
    ds.validate();
    if (ds.X.rows() != d) throw DataError("training parts differ in feature dimension");
    samples += ds.X.cols() + ds.Z.cols();
  }

  XqdaProblem out;
  std::vector<CovariancePair> covs;
  if (d <= samples) {
    for (const auto& ds : parts) covs.push_back(compute_covariances_fast(ds));
    out.cov = pool_covariances(covs);
    return out;
  }

  Matrix all(d, samples);
  Eigen::Index at = 0;
  for (const auto& ds : parts) {
    all.middleCols(at, ds.X.cols()) = ds.X;
    at += ds.X.cols();
    all.middleCols(at, ds.Z.cols()) = ds.Z;
    at += ds.Z.cols();
  }
  const Eigen::HouseholderQR<Matrix> qr(all);
  Matrix basis = qr.householderQ() * Matrix::Identity(d, samples);
  for (const auto& ds : parts) {
    covs.push_back(compute_covariances_fast(
        CrossViewDataset{basis.transpose() * ds.X, basis.transpose() * ds.Z, ds.y, ds.l}));
  }
  out.cov = pool_covariances(covs);
  out.basis = std::move(basis);
  return out;
}

XqdaModel lift_xqda_model(const XqdaModel& reduced, const std::optional<Matrix>& basis) {
  if (!basis) return reduced;
  return make_xqda_model(*basis * reduced.W, reduced.M, reduced.eigenvalues, reduced.regularizer);
}

XqdaModel train_xqda(const std::vector<CrossViewDataset>& parts, const XqdaConfig& cfg) {
  cfg.validate();
  const XqdaProblem problem = prepare_xqda(parts);
  return lift_xqda_model(train_xqda(problem.cov, cfg), problem.basis);
}

XqdaModel train_xqda(const CrossViewDataset& ds, const XqdaConfig& cfg) {
  return train_xqda(std::vector<CrossViewDataset>{ds}, cfg);
}

Vector project(const XqdaModel& model, const Eigen::Ref<const Vector>& v) {
  if (v.size() != model.W.rows()) {
    throw UsageError("vector length " + std::to_string(v.size()) +
                     " does not match model input dimension " + std::to_string(model.W.rows()));
  }
  return model.W.transpose() * v;
}

double distance(const XqdaModel& model, const Eigen::Ref<const Vector>& x,
                const Eigen::Ref<const Vector>& z) {
  return model.form.distance(x, z);
}

Matrix pairwise_distances(const XqdaModel& model, const Matrix& probes, const Matrix& gallery) {
  return model.form.pairwise_projected(model.form.project(probes), model.form.project(gallery));
}

}  // namespace reid
