#pragma once

#include <cstdint>
#include <random>

#include "reid/eval.hpp"
#include "reid/image.hpp"
#include "reid/xqda.hpp"

namespace reid {

/// Smooth random "pedestrian-like" image: vertical colour stripes with
/// texture noise, all channels in [0, 255].
RgbImage synthetic_person_image(std::mt19937_64& rng, int width, int height);

/// Random labelled two-view data of dimension d with `classes` identities and
/// 1..max_per_view samples per identity and view (standard normal entries
/// plus a per-identity offset).
CrossViewDataset random_cross_view_dataset(std::mt19937_64& rng, int d, int classes,
                                           int max_per_view);

/// Cross-view Gaussian benchmark: identity centres ~ N(0, I); view-0
/// samples = centre + noise, view-1 samples = (I + D) centre + noise with a
/// fixed random distortion D (entries N(0, distortion_scale^2 / dim)); noise variance 0.2 on the first
/// `low_noise_dims` coordinates and 2.0 on the rest.
struct BenchmarkSpec {
  int identities = 100;
  int dim = 50;
  int low_noise_dims = 40;
  double low_noise_var = 0.2;
  double high_noise_var = 2.0;
  int samples_per_view = 5;
  double distortion_scale = 3.0;
  std::uint64_t seed = 42;
};

ProtocolData synthetic_benchmark(const BenchmarkSpec& spec);

}  // namespace reid
