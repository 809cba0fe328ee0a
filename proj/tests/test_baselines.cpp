#include <cmath>

#include "doctest.h"
#include "reid/baselines.hpp"
#include "reid/error.hpp"
#include "reid/synthetic.hpp"
#include "support.hpp"

using namespace reid;

namespace {

// Two-view data whose classes differ along the first axis only.
CrossViewDataset separable_2d(std::mt19937_64& rng, int classes) {
  std::normal_distribution<double> g(0.0, 1.0);
  CrossViewDataset ds;
  ds.X.resize(2, classes * 2);
  ds.Z.resize(2, classes * 2);
  for (int k = 0; k < classes; ++k) {
    const double c = 3.0 * g(rng);
    for (int s = 0; s < 2; ++s) {
      ds.X.col(2 * k + s) << c + 0.2 * g(rng), g(rng);
      ds.Z.col(2 * k + s) << c + 0.2 * g(rng), g(rng);
      ds.y.push_back(k);
      ds.l.push_back(k);
    }
  }
  return ds;
}

}  // namespace

TEST_CASE("PCA of points on a line") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  Vector dir(3);
  dir << 1, -2, 0.5;
  dir.normalize();
  Matrix pts(3, 30);
  for (int i = 0; i < 30; ++i) pts.col(i) = Vector::Constant(3, 4.0) + g(rng) * dir;
  const PcaModel pca = pca_fit(pts, 1);
  CHECK(std::fabs(pca.basis.col(0).dot(dir)) >= 1 - 1e-9);
}

TEST_CASE("PCA basis is orthonormal with descending variances") {
  std::mt19937_64 rng(2);
  const Matrix pts = test::random_matrix(rng, 6, 40);
  const PcaModel pca = pca_fit(pts, 4);
  CHECK((pca.basis.transpose() * pca.basis - Matrix::Identity(4, 4)).norm() <= 1e-12);
  for (int i = 1; i < 4; ++i) CHECK(pca.variances(i) <= pca.variances(i - 1));
  const Matrix t = pca.transform(pts);
  CHECK(t.rows() == 4);
  CHECK(t.rowwise().mean().norm() <= 1e-12);
}

TEST_CASE("PCA captures about p/d of an isotropic cloud") {
  std::mt19937_64 rng(3);
  const int d = 10, n = 20000;
  const Matrix pts = test::random_matrix(rng, d, n);
  const PcaModel pca = pca_fit(pts, 2);
  const double total = (pts.colwise() - pts.rowwise().mean()).squaredNorm() / (n - 1);
  // Top-2 of 10 sample eigenvalues sit slightly above 2/10 of the total.
  CHECK(pca.variances.sum() / total == doctest::Approx(0.2).epsilon(0.1));
}

TEST_CASE("PCA argument checks") {
  const Matrix pts = Matrix::Random(4, 5);
  CHECK_THROWS_AS(pca_fit(pts, 0), UsageError);
  CHECK_THROWS_AS(pca_fit(pts, 5), UsageError);
  CHECK_NOTHROW(pca_fit(pts, 4));
  CHECK_THROWS_AS(pca_fit(Matrix::Random(4, 1), 1), UsageError);
}

TEST_CASE("KISSME with matching statistics gives a near-zero metric") {
  // Labels carry no information: both views are independent noise.
  std::mt19937_64 rng(4);
  CrossViewDataset ds;
  const int classes = 300;
  ds.X = test::random_matrix(rng, 3, classes * 2);
  ds.Z = test::random_matrix(rng, 3, classes * 2);
  for (int k = 0; k < classes; ++k) {
    ds.y.insert(ds.y.end(), {k, k});
    ds.l.insert(ds.l.end(), {k, k});
  }
  const MetricModel m = train_kissme(ds, 3, 0.0);
  CHECK(m.M.norm() < 0.1);
  const Vector x = test::random_matrix(rng, 3, 1), z = test::random_matrix(rng, 3, 1);
  CHECK(std::fabs(distance(m, x, z)) < 0.1 * (x - z).squaredNorm());
}

TEST_CASE("KISSME separates intrapersonal from extrapersonal pairs") {
  std::mt19937_64 rng(5);
  const auto train = separable_2d(rng, 200);
  const MetricModel m = train_kissme(train, 2, 0.001);
  const auto test = separable_2d(rng, 100);
  const Matrix S = pairwise_distances(m, test.X, test.Z);
  double intra = 0, extra = 0;
  int ni = 0, ne = 0;
  for (Eigen::Index i = 0; i < S.rows(); ++i)
    for (Eigen::Index j = 0; j < S.cols(); ++j) {
      if (test.y[static_cast<std::size_t>(i)] == test.l[static_cast<std::size_t>(j)]) {
        intra += S(i, j);
        ++ni;
      } else {
        extra += S(i, j);
        ++ne;
      }
    }
  CHECK(intra / ni < extra / ne);
}

TEST_CASE("full-dimensional KISSME equals the unprojected discriminant") {
  std::mt19937_64 rng(6);
  const auto ds = random_cross_view_dataset(rng, 8, 12, 4);
  const MetricModel m = train_kissme(ds, 8, 0.0);
  const auto cov = compute_covariances_fast(ds);
  const Matrix kernel = cov.sigma_I.inverse() - cov.sigma_E.inverse();
  for (int t = 0; t < 100; ++t) {
    const Vector x = test::random_matrix(rng, 8, 1), z = test::random_matrix(rng, 8, 1);
    const double expect = (x - z).dot(kernel * (x - z));
    CHECK(std::fabs(distance(m, x, z) - expect) <= 1e-8 * std::fabs(expect));
  }
}

TEST_CASE("Mahalanobis with identity intrapersonal covariance") {
  const Matrix eye = Matrix::Identity(3, 3);
  const double reg = 0.25;
  const MetricModel m = make_metric_model(MetricKind::kMahalanobis, std::nullopt, eye / (1 + reg), reg);
  Vector x(3), z(3);
  x << 1, 2, 3;
  z << 0, 0, 1;
  CHECK(distance(m, x, z) == doctest::Approx((x - z).squaredNorm() / (1 + reg)));
}

TEST_CASE("Mahalanobis weights quiet intrapersonal directions up") {
  std::mt19937_64 rng(7);
  const auto ds = separable_2d(rng, 300);
  const double reg = 0.001;
  const MetricModel m = train_mahalanobis_genuine(ds, 2, reg);

  // Hand inverse of the 2x2 intrapersonal covariance in the PCA frame.
  const auto& pca = *m.pca;
  const auto cov = compute_covariances_fast({pca.transform(ds.X), pca.transform(ds.Z), ds.y, ds.l});
  const double a = cov.sigma_I(0, 0) + reg, b = cov.sigma_I(0, 1), d = cov.sigma_I(1, 1) + reg;
  const double det = a * d - b * b;
  Matrix expect(2, 2);
  expect << d / det, -b / det, -b / det, a / det;
  CHECK(test::rel_frobenius(m.M, expect) <= 1e-10);

  Vector e1 = Vector::Zero(2), e2 = Vector::Zero(2);
  e1(0) = 1;
  e2(1) = 1;
  CHECK(distance(m, e1, Vector::Zero(2)) > 5 * distance(m, e2, Vector::Zero(2)));
}

TEST_CASE("multi-part training pools the camera pairs") {
  std::mt19937_64 rng(8);
  const auto a = random_cross_view_dataset(rng, 4, 5, 3);
  const auto b = random_cross_view_dataset(rng, 4, 6, 2);
  const MetricModel pooled = train_kissme(std::vector<CrossViewDataset>{a, b}, 4, 0.001);
  const MetricModel single = train_kissme(a, 4, 0.001);
  CHECK(pooled.M.rows() == 4);
  CHECK((pooled.M - single.M).norm() > 0.0);
  CHECK_THROWS_AS(train_kissme(a, 4, -1.0), UsageError);
}

TEST_CASE("Euclidean scores") {
  Matrix e = Matrix::Identity(3, 2);
  const Matrix s = euclidean_scores(e.col(0), e.col(1));
  CHECK(s(0, 0) == 2.0);
  CHECK(euclidean_scores(e, e)(1, 1) == 0.0);

  std::mt19937_64 rng(9);
  const Matrix P = test::random_matrix(rng, 4, 3), G = test::random_matrix(rng, 4, 5);
  const Matrix S = euclidean_scores(P, G);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 5; ++j) {
      double acc = 0;
      for (int k = 0; k < 4; ++k) acc += (P(k, i) - G(k, j)) * (P(k, i) - G(k, j));
      CHECK(S(i, j) == doctest::Approx(acc).epsilon(1e-14));
    }
  CHECK_THROWS_AS(euclidean_scores(P, Matrix::Zero(3, 1)), UsageError);
}

TEST_CASE("cosine scores") {
  Matrix e = Matrix::Identity(3, 2);
  CHECK(cosine_scores(e.col(0), e.col(1))(0, 0) == doctest::Approx(1.0));
  CHECK(cosine_scores(e.col(0), 5 * e.col(0))(0, 0) == doctest::Approx(0.0));
  CHECK(cosine_scores(e.col(0), -e.col(0))(0, 0) == doctest::Approx(2.0));
  CHECK(cosine_scores(Matrix::Zero(3, 1), e.col(0))(0, 0) == 1.0);
}
