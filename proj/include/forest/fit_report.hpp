#pragma once

// Compares Normal, Gamma and stable fits of a colour-intensity sample
// against a kernel density estimate by RMSE on a regular grid.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "forest/stable_law.hpp"

namespace forest {

inline constexpr std::size_t kFitReportMinSample = 200;
inline constexpr std::size_t kFitReportGridPoints = 256;

struct DistributionFit {
  std::string name;
  std::vector<std::pair<std::string, double>> params;
  /// Missing when the family could not be fitted (see note).
  std::optional<double> rmse;
  std::vector<double> density;
  std::string note;
};

struct FitReport {
  std::size_t n = 0;
  double bandwidth = 0.0;
  std::vector<double> grid;
  std::vector<double> empirical;
  /// Normal, Gamma, Stable in that order.
  std::vector<DistributionFit> fits;

  const DistributionFit& fit(const std::string& name) const;
};

double silverman_bandwidth(std::span<const double> sample);
std::vector<double> gaussian_kde(std::span<const double> sample, std::span<const double> grid,
                                 double bandwidth);
double rmse(std::span<const double> fitted, std::span<const double> empirical);

struct GammaParams {
  double shape = 1.0;
  double scale = 1.0;
};
/// Maximum likelihood; throws InvalidArgument unless all data are > 0.
GammaParams fit_gamma(std::span<const double> sample);

/// Throws InvalidArgument below 200 points.
FitReport fit_report(std::span<const double> sample,
                     std::size_t grid_points = kFitReportGridPoints);

}  // namespace forest
