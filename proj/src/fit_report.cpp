#include "forest/fit_report.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "forest/error.hpp"

namespace forest {

namespace {

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sd_of(std::span<const double> x, double mean) {
  double ss = 0.0;
  for (const double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size()));
}

}  // namespace

const DistributionFit& FitReport::fit(const std::string& name) const {
  for (const auto& f : fits) {
    if (f.name == name) return f;
  }
  throw InvalidArgument("no fit named '" + name + "'");
}

double silverman_bandwidth(std::span<const double> sample) {
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  const double sd = sd_of(sample, mean_of(sample));
  const double iqr = q(0.75) - q(0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  return 0.9 * spread * std::pow(static_cast<double>(sample.size()), -0.2);
}

std::vector<double> gaussian_kde(std::span<const double> sample, std::span<const double> grid,
                                 double bandwidth) {
  if (!(bandwidth > 0.0)) throw DegenerateError("kernel bandwidth must be positive");
  const double norm =
      1.0 / (static_cast<double>(sample.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double acc = 0.0;
    for (const double x : sample) {
      const double u = (grid[g] - x) / bandwidth;
      acc += std::exp(-0.5 * u * u);
    }
    out[g] = acc * norm;
  }
  return out;
}

double rmse(std::span<const double> fitted, std::span<const double> empirical) {
  if (fitted.size() != empirical.size() || fitted.empty()) {
    throw InvalidArgument("rmse needs two equal-length non-empty series");
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < fitted.size(); ++i) {
    const double d = fitted[i] - empirical[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(fitted.size()));
}

GammaParams fit_gamma(std::span<const double> sample) {
  if (sample.empty() || *std::min_element(sample.begin(), sample.end()) <= 0.0) {
    throw InvalidArgument("Gamma fit requires strictly positive data");
  }
  const double mean = mean_of(sample);
  double mean_log = 0.0;
  for (const double x : sample) mean_log += std::log(x);
  mean_log /= static_cast<double>(sample.size());
  const double s = std::log(mean) - mean_log;
  if (!(s > 0.0)) throw DegenerateError("Gamma fit: constant sample");

  // Minka's starting point, then Newton on log(k) - digamma(k) = s.
  double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  for (int it = 0; it < 100; ++it) {
    const double f = std::log(k) - boost::math::digamma(k) - s;
    const double df = 1.0 / k - boost::math::trigamma(k);
    const double step = f / df;
    k = std::max(k - step, k / 10.0);
    if (std::abs(step) < 1e-12 * k) break;
  }
  return GammaParams{k, mean / k};
}

FitReport fit_report(std::span<const double> sample, std::size_t grid_points) {
  if (sample.size() < kFitReportMinSample) {
    throw InvalidArgument("fit_report needs at least " + std::to_string(kFitReportMinSample) +
                          " points, got " + std::to_string(sample.size()));
  }
  if (grid_points < 2) throw InvalidArgument("fit_report grid needs at least 2 points");

  FitReport report;
  report.n = sample.size();
  const auto [lo_it, hi_it] = std::minmax_element(sample.begin(), sample.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) throw DegenerateError("fit_report: constant sample");
  report.grid.resize(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    report.grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
  }
  report.bandwidth = silverman_bandwidth(sample);
  report.empirical = gaussian_kde(sample, report.grid, report.bandwidth);

  auto evaluate = [&](DistributionFit& fit, auto&& pdf) {
    fit.density.resize(grid_points);
    std::transform(report.grid.begin(), report.grid.end(), fit.density.begin(), pdf);
    fit.rmse = rmse(fit.density, report.empirical);
  };

  {
    DistributionFit normal;
    normal.name = "Normal";
    const double mu = mean_of(sample);
    const double sd = sd_of(sample, mu);
    normal.params = {{"mean", mu}, {"sd", sd}};
    const boost::math::normal_distribution<double> dist(mu, sd);
    evaluate(normal, [&](double x) { return boost::math::pdf(dist, x); });
    report.fits.push_back(std::move(normal));
  }
  {
    DistributionFit gamma;
    gamma.name = "Gamma";
    if (lo > 0.0) {
      const GammaParams g = fit_gamma(sample);
      gamma.params = {{"shape", g.shape}, {"scale", g.scale}};
      const boost::math::gamma_distribution<double> dist(g.shape, g.scale);
      evaluate(gamma, [&](double x) { return boost::math::pdf(dist, x); });
    } else {
      gamma.note = "skipped: Gamma fit requires strictly positive data";
    }
    report.fits.push_back(std::move(gamma));
  }
  {
    DistributionFit stable;
    stable.name = "Stable";
    const KoutrouvelisFit k = estimate_koutrouvelis(sample);
    stable.params = {{"alpha", k.params.alpha},
                     {"beta", k.params.beta},
                     {"sigma", k.params.sigma},
                     {"delta", k.params.delta}};
    if (!k.converged) stable.note = "Koutrouvelis iterations did not converge";
    evaluate(stable, [&](double x) { return stable_pdf(k.params, x); });
    report.fits.push_back(std::move(stable));
  }
  return report;
}

}  // namespace forest
