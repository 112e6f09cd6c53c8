#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "forest/error.hpp"
#include "forest/stable_law.hpp"

namespace forest {

namespace {

double sign_of(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

}  // namespace

void StableParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw InvalidArgument("stable alpha must lie in (0, 2], got " + std::to_string(alpha));
  }
  if (!(beta >= -1.0 && beta <= 1.0)) {
    throw InvalidArgument("stable beta must lie in [-1, 1], got " + std::to_string(beta));
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("stable sigma must be non-negative, got " + std::to_string(sigma));
  }
  if (!std::isfinite(delta)) throw InvalidArgument("stable delta must be finite");
}

std::complex<double> stable_cf(const StableParams& p, double t) {
  using namespace std::complex_literals;
  if (t == 0.0) return {1.0, 0.0};
  const double abs_t = std::abs(t);
  const double sgn = sign_of(t);
  std::complex<double> exponent;
  if (p.alpha == 1.0) {
    exponent = -p.sigma * abs_t *
                   (1.0 + 1i * p.beta * (2.0 / std::numbers::pi) * sgn * std::log(abs_t)) +
               1i * p.delta * t;
  } else {
    const double scale = std::pow(p.sigma * abs_t, p.alpha);
    exponent = -scale * (1.0 - 1i * p.beta * sgn * std::tan(std::numbers::pi * p.alpha / 2.0)) +
               1i * p.delta * t;
  }
  return std::exp(exponent);
}

EcfPoint ecf(std::span<const double> sample, double t) {
  if (sample.empty()) throw InvalidArgument("ecf of an empty sample");
  double c = 0.0;
  double s = 0.0;
  for (const double x : sample) {
    c += std::cos(t * x);
    s += std::sin(t * x);
  }
  const auto n = static_cast<double>(sample.size());
  return EcfPoint{t, Eigen::Vector2d(c / n, s / n), sample.size()};
}

EcfPoint z0(const StableParams& p, double t) {
  const std::complex<double> phi = stable_cf(p, t);
  return EcfPoint{t, Eigen::Vector2d(phi.real(), phi.imag()), 0};
}

SigmaZ sigma_z(const StableParams& p, double t) {
  using namespace std::complex_literals;
  const std::complex<double> phi_t = stable_cf(p, t);
  const std::complex<double> phi_2t = stable_cf(p, 2.0 * t);
  const std::complex<double> phi_mt = std::conj(phi_t);
  const std::complex<double> phi_m2t = std::conj(phi_2t);

  const std::complex<double> s11 =
      0.25 * (phi_2t + 2.0 + phi_m2t - phi_t * phi_t - 2.0 * phi_t * phi_mt - phi_mt * phi_mt);
  const std::complex<double> s22 =
      0.25 * (phi_t * phi_t - 2.0 * phi_t * phi_mt + phi_mt * phi_mt) -
      0.25 * (phi_2t + phi_m2t - 2.0);
  const std::complex<double> s12 =
      (phi_2t - phi_t * phi_t - phi_m2t + phi_mt * phi_mt) / (4.0i);

  constexpr double kResidue = 1e-12;
  for (const auto& entry : {s11, s22, s12}) {
    if (std::abs(entry.imag()) > kResidue) {
      throw std::logic_error("sigma_z: imaginary residue " + std::to_string(entry.imag()));
    }
  }
  SigmaZ out;
  out.m << s11.real(), s12.real(), s12.real(), s22.real();
  return out;
}

}  // namespace forest
