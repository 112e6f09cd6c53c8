#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "forest/error.hpp"
#include "forest/stable_law.hpp"

namespace forest {

namespace {

#include "quantile_tables.inc"

constexpr int kRowsAlpha = std::size(kTableAlpha);
constexpr int kColsBeta = std::size(kTableBeta);

// Type-7 sample quantile on a sorted vector.
double sorted_quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Bilinear lookup at (alpha, |beta|); alpha in [0.6, 2], beta in [0, 1].
double lookup(const double (&table)[kRowsAlpha][kColsBeta], double alpha, double beta) {
  alpha = std::clamp(alpha, kTableAlpha[0], kTableAlpha[kRowsAlpha - 1]);
  beta = std::clamp(beta, 0.0, 1.0);
  int i = static_cast<int>(std::upper_bound(std::begin(kTableAlpha), std::end(kTableAlpha), alpha) -
                           std::begin(kTableAlpha)) - 1;
  i = std::clamp(i, 0, kRowsAlpha - 2);
  int j = static_cast<int>(std::upper_bound(std::begin(kTableBeta), std::end(kTableBeta), beta) -
                           std::begin(kTableBeta)) - 1;
  j = std::clamp(j, 0, kColsBeta - 2);
  const double fa = (alpha - kTableAlpha[i]) / (kTableAlpha[i + 1] - kTableAlpha[i]);
  const double fb = (beta - kTableBeta[j]) / (kTableBeta[j + 1] - kTableBeta[j]);
  const double top = (1 - fb) * table[i][j] + fb * table[i][j + 1];
  const double bottom = (1 - fb) * table[i + 1][j] + fb * table[i + 1][j + 1];
  return (1 - fa) * top + fa * bottom;
}

// nu_alpha decreases in alpha; returns alpha in [0.6, 2].
double invert_alpha(double nu_alpha, double beta) {
  double lo = kTableAlpha[0];
  double hi = kTableAlpha[kRowsAlpha - 1];
  if (nu_alpha >= lookup(kNuAlpha, lo, beta)) return lo;
  if (nu_alpha <= lookup(kNuAlpha, hi, beta)) return hi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (lookup(kNuAlpha, mid, beta) > nu_alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// nu_beta increases in beta >= 0; returns beta in [0, 1].
double invert_beta(double nu_beta, double alpha) {
  double lo = 0.0;
  double hi = 1.0;
  if (nu_beta <= 0.0) return 0.0;
  if (nu_beta >= lookup(kNuBeta, alpha, hi)) return hi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (lookup(kNuBeta, alpha, mid) < nu_beta ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Koutrouvelis (1980), Table I: number of regression points for the
// (alpha, sigma) step (K) and for the (beta, delta) step (L), by alpha and n.
constexpr std::array<double, 8> kKoutAlpha = {1.9, 1.5, 1.3, 1.1, 0.9, 0.7, 0.5, 0.3};
constexpr std::array<double, 3> kKoutN = {200, 800, 1600};
constexpr double kKoutK[8][3] = {{9, 9, 10},   {11, 11, 11},  {22, 16, 14},   {24, 18, 15},
                                 {28, 22, 18}, {30, 24, 20},  {86, 68, 56},   {134, 124, 118}};
constexpr double kKoutL[8][3] = {{9, 10, 11},  {12, 14, 15},  {16, 18, 17},   {14, 14, 14},
                                 {24, 16, 14}, {40, 38, 36},  {70, 68, 66},   {100, 100, 100}};

int regression_points(const double (&table)[8][3], double alpha, std::size_t n) {
  alpha = std::clamp(alpha, kKoutAlpha.back(), kKoutAlpha.front());
  const double nn = std::clamp(static_cast<double>(n), kKoutN.front(), kKoutN.back());
  int i = 0;
  while (i < 6 && alpha < kKoutAlpha[i + 1]) ++i;
  int j = 0;
  while (j < 1 && nn > kKoutN[j + 1]) ++j;
  const double fa = (kKoutAlpha[i] - alpha) / (kKoutAlpha[i] - kKoutAlpha[i + 1]);
  const double fn = (nn - kKoutN[j]) / (kKoutN[j + 1] - kKoutN[j]);
  const double v = (1 - fa) * ((1 - fn) * table[i][j] + fn * table[i][j + 1]) +
                   fa * ((1 - fn) * table[i + 1][j] + fn * table[i + 1][j + 1]);
  return static_cast<int>(std::lround(v));
}

std::complex<double> ecf_complex(std::span<const double> x, double shift, double scale,
                                 double t) {
  double c = 0.0;
  double s = 0.0;
  for (const double v : x) {
    const double arg = t * (v - shift) / scale;
    c += std::cos(arg);
    s += std::sin(arg);
  }
  const auto n = static_cast<double>(x.size());
  return {c / n, s / n};
}

double relative_change(const StableParams& a, const StableParams& b) {
  return std::max({std::abs(a.alpha - b.alpha) / b.alpha, std::abs(a.sigma - b.sigma) / b.sigma,
                   std::abs(a.beta - b.beta), std::abs(a.delta - b.delta) / b.sigma});
}

}  // namespace

StableParams mcculloch_initial(std::span<const double> sample) {
  if (sample.size() < kMcCullochMinSample) {
    throw InvalidArgument("McCulloch estimator needs at least " +
                          std::to_string(kMcCullochMinSample) + " points, got " +
                          std::to_string(sample.size()));
  }
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double q05 = sorted_quantile(sorted, 0.05);
  const double q25 = sorted_quantile(sorted, 0.25);
  const double q50 = sorted_quantile(sorted, 0.50);
  const double q75 = sorted_quantile(sorted, 0.75);
  const double q95 = sorted_quantile(sorted, 0.95);
  const double iqr = q75 - q25;
  if (!(iqr > 0.0) || !(q95 > q05)) {
    throw DegenerateError("McCulloch estimator: sample has zero interquartile spread");
  }

  const double nu_alpha = (q95 - q05) / iqr;
  const double nu_beta = (q95 + q05 - 2.0 * q50) / (q95 - q05);

  // nu_alpha depends only weakly on beta, so alternate the two 1-D inversions.
  double alpha = invert_alpha(nu_alpha, 0.0);
  double abs_beta = 0.0;
  for (int it = 0; it < 50; ++it) {
    const double next_beta = invert_beta(std::abs(nu_beta), alpha);
    const double next_alpha = invert_alpha(nu_alpha, next_beta);
    const bool settled = std::abs(next_beta - abs_beta) < 1e-10 && std::abs(next_alpha - alpha) < 1e-10;
    abs_beta = next_beta;
    alpha = next_alpha;
    if (settled) break;
  }
  const double beta = std::copysign(abs_beta, nu_beta);

  StableParams p;
  p.alpha = alpha;
  p.beta = alpha >= 2.0 ? 0.0 : beta;
  p.sigma = iqr / lookup(kNuSigma, alpha, abs_beta);
  const double zeta = q50 + p.sigma * std::copysign(lookup(kNuZeta, alpha, abs_beta), nu_beta);
  if (alpha == 1.0) {
    p.delta = zeta - p.beta * (2.0 / std::numbers::pi) * p.sigma * std::log(p.sigma);
  } else {
    p.delta = zeta - p.beta * p.sigma * std::tan(std::numbers::pi * alpha / 2.0);
  }
  return p;
}

KoutrouvelisFit estimate_koutrouvelis(std::span<const double> sample,
                                      const KoutrouvelisOptions& options) {
  if (sample.size() < options.min_sample) {
    throw InvalidArgument("Koutrouvelis estimator needs at least " +
                          std::to_string(options.min_sample) + " points, got " +
                          std::to_string(sample.size()));
  }
  const std::size_t n = sample.size();
  StableParams current = mcculloch_initial(sample);
  if (!(current.sigma > 0.0)) throw DegenerateError("Koutrouvelis estimator: zero scale");

  KoutrouvelisFit fit;
  fit.params = current;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    fit.iterations = iter;
    StableParams next = current;

    // (alpha, sigma): log(-log|phi(t)|^2) = log(2 sigma^alpha) + alpha log t
    // on data standardized by the current (sigma, delta).
    const int k_points = regression_points(kKoutK, current.alpha, n);
    Eigen::MatrixXd design(k_points, 2);
    Eigen::VectorXd response(k_points);
    int used = 0;
    for (int k = 1; k <= k_points; ++k) {
      const double t = std::numbers::pi * k / 25.0;
      const double mod2 = std::norm(ecf_complex(sample, current.delta, current.sigma, t));
      if (!(mod2 > 0.0 && mod2 < 1.0)) continue;
      design(used, 0) = 1.0;
      design(used, 1) = std::log(t);
      response(used) = std::log(-std::log(mod2));
      ++used;
    }
    if (used < 2) throw DegenerateError("Koutrouvelis estimator: ECF modulus unusable");
    const Eigen::Vector2d coef =
        design.topRows(used).colPivHouseholderQr().solve(response.head(used));
    next.alpha = std::clamp(coef(1), 0.1, 2.0);
    const double unit_sigma = std::pow(std::exp(coef(0)) / 2.0, 1.0 / next.alpha);
    next.sigma = current.sigma * unit_sigma;

    // (beta, delta): phase of the ECF of the re-standardized data,
    // arg phi(u) = delta u + beta tan(pi alpha / 2) u^alpha      (alpha != 1)
    //            = delta u - beta (2/pi) u ln u                  (alpha == 1)
    const int l_points = regression_points(kKoutL, next.alpha, n);
    Eigen::MatrixXd phase_design(l_points, 2);
    Eigen::VectorXd phase(l_points);
    const double skew = std::tan(std::numbers::pi * next.alpha / 2.0);
    double previous = 0.0;
    for (int l = 1; l <= l_points; ++l) {
      const double u = std::numbers::pi * l / 50.0;
      double angle = std::arg(ecf_complex(sample, current.delta, next.sigma, u));
      // Unwrap along u.
      while (angle - previous > std::numbers::pi) angle -= 2.0 * std::numbers::pi;
      while (angle - previous < -std::numbers::pi) angle += 2.0 * std::numbers::pi;
      previous = angle;
      phase_design(l - 1, 0) = u;
      phase_design(l - 1, 1) = next.alpha == 1.0 ? -(2.0 / std::numbers::pi) * u * std::log(u)
                                                 : skew * std::pow(u, next.alpha);
      phase(l - 1) = angle;
    }
    Eigen::Vector2d phase_coef;
    if (next.alpha >= 2.0 || std::abs(skew) < 1e-8) {
      // Skewness is not identifiable; fit the location alone.
      phase_coef(0) = phase_design.col(0).dot(phase) / phase_design.col(0).squaredNorm();
      phase_coef(1) = 0.0;
    } else {
      phase_coef = phase_design.colPivHouseholderQr().solve(phase);
    }
    next.beta = std::clamp(phase_coef(1), -1.0, 1.0);
    next.delta = current.delta + next.sigma * phase_coef(0);
    if (next.alpha == 1.0) {
      next.delta -= (2.0 / std::numbers::pi) * next.beta * next.sigma * std::log(next.sigma);
    }

    if (!std::isfinite(next.alpha) || !std::isfinite(next.sigma) || !(next.sigma > 0.0) ||
        !std::isfinite(next.delta)) {
      throw DegenerateError("Koutrouvelis estimator diverged");
    }
    const double change = relative_change(next, current);
    current = next;
    if (change < options.tolerance) {
      fit.converged = true;
      break;
    }
  }

  if (options.mean_location && current.alpha > 1.0) {
    current.delta = std::accumulate(sample.begin(), sample.end(), 0.0) / static_cast<double>(n);
  }
  fit.params = current;
  return fit;
}

}  // namespace forest
