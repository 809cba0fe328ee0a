#include "reid/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "reid/error.hpp"

namespace reid {

RgbImage synthetic_person_image(std::mt19937_64& rng, int width, int height) {
  std::uniform_real_distribution<double> colour(20.0, 235.0);
  std::normal_distribution<double> noise(0.0, 12.0);
  std::uniform_int_distribution<int> stripes(3, 7);

  const int n = stripes(rng);
  std::vector<std::array<double, 3>> palette(static_cast<std::size_t>(n));
  for (auto& c : palette) c = {colour(rng), colour(rng), colour(rng)};

  RgbImage img(width, height);
  for (int y = 0; y < height; ++y) {
    const auto& c = palette[static_cast<std::size_t>(y * n / height)];
    for (int x = 0; x < width; ++x) {
      const double shade = 0.75 + 0.25 * std::sin(0.3 * x + 0.1 * y);
      for (int ch = 0; ch < 3; ++ch) {
        img.at(x, y, ch) = std::clamp(c[static_cast<std::size_t>(ch)] * shade + noise(rng), 0.0, 255.0);
      }
    }
  }
  return img;
}

CrossViewDataset random_cross_view_dataset(std::mt19937_64& rng, int d, int classes,
                                           int max_per_view) {
  if (d < 1 || classes < 2 || max_per_view < 1) {
    throw UsageError("invalid random dataset parameters");
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, max_per_view);
  std::vector<Vector> xs, zs;
  CrossViewDataset ds;
  for (int k = 0; k < classes; ++k) {
    Vector centre(d);
    for (int i = 0; i < d; ++i) centre(i) = 2.0 * gauss(rng);
    for (int view = 0; view < 2; ++view) {
      const int n = count(rng);
      for (int s = 0; s < n; ++s) {
        Vector v(d);
        for (int i = 0; i < d; ++i) v(i) = centre(i) + gauss(rng);
        (view == 0 ? xs : zs).push_back(v);
        (view == 0 ? ds.y : ds.l).push_back(k);
      }
    }
  }
  ds.X.resize(d, static_cast<Eigen::Index>(xs.size()));
  ds.Z.resize(d, static_cast<Eigen::Index>(zs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) ds.X.col(static_cast<Eigen::Index>(i)) = xs[i];
  for (std::size_t i = 0; i < zs.size(); ++i) ds.Z.col(static_cast<Eigen::Index>(i)) = zs[i];
  return ds;
}

ProtocolData synthetic_benchmark(const BenchmarkSpec& spec) {
  if (spec.identities < 4 || spec.dim < 1 || spec.samples_per_view < 1 ||
      spec.low_noise_dims < 0 || spec.low_noise_dims > spec.dim) {
    throw UsageError("invalid benchmark specification");
  }
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int d = spec.dim;

  Matrix distortion = Matrix::Identity(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) distortion(i, j) += spec.distortion_scale * gauss(rng) / std::sqrt(d);

  Vector noise_sd(d);
  for (int i = 0; i < d; ++i) {
    noise_sd(i) = std::sqrt(i < spec.low_noise_dims ? spec.low_noise_var : spec.high_noise_var);
  }

  const int per_id = 2 * spec.samples_per_view;
  ProtocolData data;
  data.features.resize(d, static_cast<Eigen::Index>(spec.identities) * per_id);
  Eigen::Index col = 0;
  for (int k = 0; k < spec.identities; ++k) {
    Vector centre(d);
    for (int i = 0; i < d; ++i) centre(i) = gauss(rng);
    const Vector shifted = distortion * centre;
    for (int view = 0; view < 2; ++view) {
      for (int s = 0; s < spec.samples_per_view; ++s) {
        Vector v = view == 0 ? centre : shifted;
        for (int i = 0; i < d; ++i) v(i) += noise_sd(i) * gauss(rng);
        data.features.col(col++) = v;
        data.person.push_back(k);
        data.view.push_back(view);
      }
    }
  }
  return data;
}

}  // namespace reid
