#pragma once

// Mahalanobis-distance classifier: a tile is forest when its pixel-triplet
// mean is statistically indistinguishable from at least one forest
// reference under a Hotelling-type two-sample statistic.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "forest/pixel_data.hpp"

namespace forest {

inline constexpr double kDefaultRidge = 1e-9;

struct SampleStats {
  std::size_t n = 0;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  /// Divisor n (maximum-likelihood form).
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
};

/// Throws InvalidArgument when fewer than two rows are given.
SampleStats sample_stats(const PixelRows& rows);
SampleStats sample_stats(const PixelMatrix& pixels);

/// (n1 * cov1 + n2 * cov2) / (n1 + n2 - 2), the unbiased pooled estimator.
Eigen::Matrix3d pooled_covariance(const SampleStats& s1, const SampleStats& s2);

/// T = n1 n2 / (n1 + n2) * d' (pooled + ridge I)^-1 d with d the mean difference.
/// Asymptotically chi^2(3) when both samples share mean and covariance.
/// Throws DegenerateError when the regularized pooled covariance is singular.
double t_statistic(const SampleStats& s1, const SampleStats& s2, double ridge = kDefaultRidge);

struct MdcReference {
  std::string id;
  SampleStats stats;
};

struct MdcModel {
  std::vector<MdcReference> references;
  double threshold = 0.0;
  double ridge = kDefaultRidge;

  void validate() const;
};

struct Decision {
  Label label = Label::NonForest;
  /// Smallest statistic over references; +inf when every comparison was degenerate.
  double t_min = 0.0;
  /// Index of the reference attaining t_min, or references.size() if none.
  std::size_t best_reference = 0;
  bool degenerate = false;
};

/// forest iff t_min < threshold (strict).
inline Label decide(double t_min, double threshold) {
  return t_min < threshold ? Label::Forest : Label::NonForest;
}

/// Minimum statistic of `test` against every reference; degenerate pairs count as +inf.
Decision min_over_references(const SampleStats& test, std::span<const MdcReference> references,
                             double ridge);

/// Throws InvalidArgument on an empty reference list.
Decision classify(const SampleStats& test, const MdcModel& model);

}  // namespace forest
