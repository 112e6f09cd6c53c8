#include <cmath>
#include <numbers>

#include "forest/stable_law.hpp"

#include "forest/error.hpp"

namespace forest {

// Chambers, Mallows and Stuck (1976), written for the parameterization of
// stable_cf.
double draw_stable(const StableParams& p, std::mt19937_64& rng) {
  constexpr double kPi = std::numbers::pi;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::exponential_distribution<double> exponential(1.0);

  double u = 0.0;
  do {
    u = uniform(rng);
  } while (u == 0.0);
  double w = 0.0;
  do {
    w = exponential(rng);
  } while (w == 0.0);
  const double v = kPi * (u - 0.5);

  if (p.alpha == 1.0) {
    const double shifted = kPi / 2.0 + p.beta * v;
    const double x = (2.0 / kPi) *
                     (shifted * std::tan(v) -
                      p.beta * std::log((kPi / 2.0) * w * std::cos(v) / shifted));
    const double log_sigma = p.sigma > 0.0 ? std::log(p.sigma) : 0.0;
    return p.sigma * x + (2.0 / kPi) * p.beta * p.sigma * log_sigma + p.delta;
  }

  const double a = p.alpha;
  const double skew = p.beta * std::tan(kPi * a / 2.0);
  const double b = std::atan(skew) / a;
  const double s = std::pow(1.0 + skew * skew, 1.0 / (2.0 * a));
  const double x = s * std::sin(a * (v + b)) / std::pow(std::cos(v), 1.0 / a) *
                   std::pow(std::cos(v - a * (v + b)) / w, (1.0 - a) / a);
  return p.sigma * x + p.delta;
}

std::vector<double> sample_stable(const StableParams& p, std::size_t n, std::uint64_t seed) {
  p.validate();
  if (n == 0) throw InvalidArgument("sample size must be positive");
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = draw_stable(p, rng);
  return out;
}

}  // namespace forest
