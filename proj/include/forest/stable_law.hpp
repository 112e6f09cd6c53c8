#pragma once

// Univariate alpha-stable laws in the (alpha, beta, sigma, delta)
// parameterization whose characteristic function is
//
//   alpha != 1: exp(-sigma^a |t|^a (1 - i beta sign(t) tan(pi a / 2)) + i delta t)
//   alpha == 1: exp(-sigma |t| (1 + i beta (2/pi) sign(t) ln|t|) + i delta t)
//
// In this parameterization delta is the mean whenever alpha > 1, and the
// Gaussian case alpha = 2 has variance 2 sigma^2.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace forest {

struct StableParams {
  double alpha = 2.0;
  double beta = 0.0;
  double sigma = 1.0;
  double delta = 0.0;

  /// Throws InvalidArgument unless 0 < alpha <= 2, -1 <= beta <= 1, sigma >= 0.
  void validate() const;
  friend bool operator==(const StableParams&, const StableParams&) = default;
};

std::complex<double> stable_cf(const StableParams& p, double t);

/// One point of a characteristic function split into (Re, Im).
/// n is the sample size behind an empirical point, 0 for a model-side point.
struct EcfPoint {
  double t = 0.0;
  Eigen::Vector2d z = Eigen::Vector2d::Zero();
  std::size_t n = 0;
};

/// (mean cos(t x_k), mean sin(t x_k)). Throws InvalidArgument on an empty sample.
EcfPoint ecf(std::span<const double> sample, double t);

/// Model-side point Z0(t) = (Re phi(t), Im phi(t)).
EcfPoint z0(const StableParams& p, double t);

/// Asymptotic covariance of sqrt(n) (Z_n(t) - Z0(t)).
struct SigmaZ {
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
};

/// Evaluated in complex arithmetic from phi(+-t), phi(+-2t); throws
/// std::logic_error when an entry keeps an imaginary residue above 1e-12.
SigmaZ sigma_z(const StableParams& p, double t);

/// One Chambers-Mallows-Stuck draw.
double draw_stable(const StableParams& p, std::mt19937_64& rng);

/// n deterministic draws for a given seed.
std::vector<double> sample_stable(const StableParams& p, std::size_t n, std::uint64_t seed);

// --- estimation ----------------------------------------------------------

inline constexpr std::size_t kMcCullochMinSample = 50;

/// Quantile-based estimate; alpha clamped to [0.6, 2], beta to [-1, 1].
/// Throws InvalidArgument for fewer than 50 points, DegenerateError for a
/// sample with zero interquartile spread.
StableParams mcculloch_initial(std::span<const double> sample);

struct KoutrouvelisOptions {
  std::size_t min_sample = 100;
  int max_iterations = 10;
  double tolerance = 1e-3;
  /// Replace delta by the sample mean when alpha-hat > 1.
  bool mean_location = true;
};

struct KoutrouvelisFit {
  StableParams params;
  int iterations = 0;
  bool converged = false;
};

/// Regression-type estimator on log(-log|phi_n|^2) and on the ECF phase,
/// started from mcculloch_initial.
KoutrouvelisFit estimate_koutrouvelis(std::span<const double> sample,
                                      const KoutrouvelisOptions& options = {});

/// Density by numerical inversion of the characteristic function.
/// Requires sigma > 0. Throws DegenerateError when quadrature fails.
double stable_pdf(const StableParams& p, double x);

}  // namespace forest
