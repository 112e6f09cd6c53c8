#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "forest/error.hpp"
#include "forest/stable_law.hpp"

namespace forest {

// f(x) = 1/(pi sigma) * int_0^U exp(-u^a) cos(phase(u) - z u) du,  z = (x - delta) / sigma,
// truncated at U where exp(-U^a) = 1e-12.
double stable_pdf(const StableParams& p, double x) {
  p.validate();
  if (!(p.sigma > 0.0)) throw InvalidArgument("stable_pdf requires sigma > 0");

  const double a = p.alpha;
  const double z = (x - p.delta) / p.sigma;
  const double skew = std::tan(std::numbers::pi * a / 2.0);
  const double log_sigma = std::log(p.sigma);

  auto integrand = [&](double u) {
    if (u <= 0.0) return 1.0;
    double phase = 0.0;
    if (a == 1.0) {
      phase = -p.beta * (2.0 / std::numbers::pi) * u * (std::log(u) - log_sigma);
    } else {
      phase = p.beta * skew * std::pow(u, a);
    }
    return std::exp(-std::pow(u, a)) * std::cos(phase - z * u);
  };

  const double upper = std::pow(-std::log(1e-12), 1.0 / a);
  // Pieces of about two oscillation periods; GK21 integrates each one to far
  // below the 1e-6 target.
  const double frequency = std::abs(z) + (p.beta != 0.0 ? 4.0 : 0.0) + 1.0;
  const double pieces_wanted = upper * frequency / (4.0 * std::numbers::pi);
  const auto pieces = static_cast<int>(std::clamp(std::ceil(pieces_wanted), 4.0, 1e5));
  const double width = upper / pieces;

  double total = 0.0;
  for (int i = 0; i < pieces; ++i) {
    double error = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
        integrand, i * width, (i + 1) * width, 6, 1e-10, &error);
  }
  const double density = total / (std::numbers::pi * p.sigma);
  if (!std::isfinite(density)) throw DegenerateError("stable_pdf quadrature failed");
  return std::max(density, 0.0);
}

}  // namespace forest
