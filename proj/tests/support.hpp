#pragma once
// Small helpers shared by the unit tests.

#include <random>
#include <string>

#include <Eigen/Dense>

#include "forest/pixel_data.hpp"
#include "forest/simulate.hpp"
#include "forest/stable_law.hpp"

namespace testing {

inline const forest::ChannelLaws kForest{forest::StableParams{1.7, 0.0, 0.02, 0.16},
                                         forest::StableParams{1.7, 0.0, 0.02, 0.24},
                                         forest::StableParams{1.7, 0.0, 0.02, 0.20}};
inline const forest::ChannelLaws kNonForest{forest::StableParams{1.5, 0.0, 0.03, 0.30},
                                            forest::StableParams{1.5, 0.0, 0.03, 0.33},
                                            forest::StableParams{1.5, 0.0, 0.03, 0.28}};

inline forest::PixelMatrix patch(const forest::ChannelLaws& laws, Eigen::Index p,
                                 std::mt19937_64& rng) {
  return forest::to_pixel_matrix(forest::simulate_patch(laws, p, p, rng));
}

// per_class forest and non-forest p x p tiles, interleaved.
inline forest::LabeledDataset separable(int per_class, std::uint64_t seed, Eigen::Index p = 10,
                                        const std::string& prefix = "") {
  std::mt19937_64 rng(seed);
  forest::LabeledDataset data;
  for (int i = 0; i < per_class; ++i) {
    data.add({patch(kForest, p, rng), forest::Label::Forest, prefix + "f" + std::to_string(i)});
    data.add({patch(kNonForest, p, rng), forest::Label::NonForest,
              prefix + "n" + std::to_string(i)});
  }
  return data;
}

// Uniform [lo, hi) pixel rows.
inline forest::PixelRows uniform_rows(Eigen::Index n, std::mt19937_64& rng, double lo = 0.0,
                                      double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  forest::PixelRows x(n, 3);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) x(i, c) = u(rng);
  return x;
}

}  // namespace testing
