// Regenerates src/quantile_tables.inc, the lookup tables behind
// mcculloch_initial. Each cell holds the quantile ratios of a standard
// (sigma = 1, delta = 0) stable law, measured on a large CMS sample.
//
//   gen_quantile_tables [draws-per-cell] > src/quantile_tables.inc

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "forest/stable_law.hpp"

namespace {

constexpr double kAlphas[] = {0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3,
                              1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0};
constexpr double kBetas[] = {0.0, 0.25, 0.5, 0.75, 1.0};
constexpr int kNumAlpha = sizeof(kAlphas) / sizeof(double);
constexpr int kNumBeta = sizeof(kBetas) / sizeof(double);

double quantile(std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  const double a = v[lo];
  const double b = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
  return a + (pos - static_cast<double>(lo)) * (b - a);
}

struct Cell {
  double nu_alpha, nu_beta, nu_sigma, nu_zeta;
};

Cell measure(double alpha, double beta, std::size_t draws, std::uint64_t seed) {
  if (alpha == 2.0) {
    // N(0, 2): exact.
    constexpr double z95 = 1.6448536269514722;
    constexpr double z75 = 0.6744897501960817;
    return {z95 / z75, 0.0, 2.0 * z75 * std::numbers::sqrt2, 0.0};
  }
  auto x = forest::sample_stable({alpha, beta, 1.0, 0.0}, draws, seed);
  if (beta == 0.0) {
    // Symmetrize so the symmetric column is exactly symmetric.
    const std::size_t n = x.size();
    x.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) x.push_back(-x[i]);
  }
  const double q05 = quantile(x, 0.05);
  const double q25 = quantile(x, 0.25);
  const double q50 = quantile(x, 0.50);
  const double q75 = quantile(x, 0.75);
  const double q95 = quantile(x, 0.95);
  const double zeta = alpha == 1.0 ? 0.0 : beta * std::tan(std::numbers::pi * alpha / 2.0);
  Cell c{(q95 - q05) / (q75 - q25), (q95 + q05 - 2.0 * q50) / (q95 - q05), q75 - q25,
         zeta - q50};
  if (beta == 0.0) c.nu_beta = c.nu_zeta = 0.0;
  return c;
}

void print_table(const char* name, const Cell (&cells)[kNumAlpha][kNumBeta],
                 double Cell::*field) {
  std::printf("inline constexpr double %s[%d][%d] = {\n", name, kNumAlpha, kNumBeta);
  for (int i = 0; i < kNumAlpha; ++i) {
    std::printf("    {");
    for (int j = 0; j < kNumBeta; ++j) {
      std::printf("%s%.6f", j ? ", " : "", cells[i][j].*field);
    }
    std::printf("},  // alpha = %.1f\n", kAlphas[i]);
  }
  std::printf("};\n\n");
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t draws = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 2'000'000;
  static Cell cells[kNumAlpha][kNumBeta];
  for (int i = 0; i < kNumAlpha; ++i) {
    for (int j = 0; j < kNumBeta; ++j) {
      cells[i][j] = measure(kAlphas[i], kBetas[j], draws,
                            0x5eed0000u + static_cast<std::uint64_t>(i * kNumBeta + j));
    }
    std::fprintf(stderr, "alpha %.1f done\n", kAlphas[i]);
  }

  std::printf("// Generated by tools/gen_quantile_tables with %zu draws per cell. Do not edit.\n",
              draws);
  std::printf("// Rows: alpha; columns: beta >= 0 (negative beta by reflection).\n\n");
  std::printf("inline constexpr double kTableAlpha[%d] = {", kNumAlpha);
  for (int i = 0; i < kNumAlpha; ++i) std::printf("%s%.1f", i ? ", " : "", kAlphas[i]);
  std::printf("};\ninline constexpr double kTableBeta[%d] = {", kNumBeta);
  for (int j = 0; j < kNumBeta; ++j) std::printf("%s%.2f", j ? ", " : "", kBetas[j]);
  std::printf("};\n\n");
  std::printf("// (q95 - q05) / (q75 - q25)\n");
  print_table("kNuAlpha", cells, &Cell::nu_alpha);
  std::printf("// (q95 + q05 - 2 q50) / (q95 - q05)\n");
  print_table("kNuBeta", cells, &Cell::nu_beta);
  std::printf("// (q75 - q25) / sigma\n");
  print_table("kNuSigma", cells, &Cell::nu_sigma);
  std::printf("// (zeta - q50) / sigma, zeta = delta + beta sigma tan(pi alpha / 2) (delta at alpha = 1)\n");
  print_table("kNuZeta", cells, &Cell::nu_zeta);
  return 0;
}
