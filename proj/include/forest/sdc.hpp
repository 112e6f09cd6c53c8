#pragma once

// Stable-distribution classifier. Each forest reference carries, per colour
// channel, a fitted stable law together with its model-side CF point Z0(t)
// and the asymptotic covariance Sigma_z. A tile is tested channel by channel
// with n (Z_n - Z0)' Sigma_z^-1 (Z_n - Z0), asymptotically chi^2(2).

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forest/mdc.hpp"
#include "forest/pixel_data.hpp"
#include "forest/stable_law.hpp"

namespace forest {

inline constexpr double kDefaultCfArgument = 5.0;

enum class Aggregation { Min, Max };

std::string_view to_string(Aggregation mode);
Aggregation parse_aggregation(std::string_view text);

struct ChannelReference {
  StableParams params;
  EcfPoint z0;
  SigmaZ sigma_z;
};

struct SdcReference {
  std::string id;
  std::array<ChannelReference, 3> channels;
};

struct SdcModel {
  std::vector<SdcReference> references;
  double t = kDefaultCfArgument;
  double threshold = 0.0;
  Aggregation aggregation = Aggregation::Min;
  double ridge = kDefaultRidge;

  void validate() const;
};

/// n (zn - z0)' (Sigma_z + ridge I)^-1 (zn - z0).
/// Throws InvalidArgument when the CF arguments differ, DegenerateError when
/// the regularized Sigma_z is singular.
double channel_statistic(const EcfPoint& zn, const EcfPoint& z0, const SigmaZ& s, std::size_t n,
                         double ridge = kDefaultRidge);

/// Same form with a second empirical point in place of Z0.
double two_sample_statistic(const EcfPoint& zn1, const EcfPoint& zn2, const SigmaZ& s,
                            std::size_t n, double ridge = kDefaultRidge);

double aggregate_channels(double red, double green, double blue,
                          Aggregation mode = Aggregation::Min);

/// Per-channel ECF points of a tile at one CF argument.
struct TileEcf {
  std::array<EcfPoint, 3> channels;
  std::size_t n = 0;
};
TileEcf tile_ecf(const PixelMatrix& pixels, double t);

/// Fits every channel with the Koutrouvelis estimator and precomputes Z0 and Sigma_z.
SdcReference make_reference(const PixelMatrix& pixels, double t, std::string id,
                            const KoutrouvelisOptions& options = {});

/// Largest channel statistic of a reference's own pixels against its fitted laws.
/// A fitted law that its own sample rejects does not describe that sample.
double self_statistic(const PixelMatrix& pixels, const SdcReference& reference,
                      double ridge = kDefaultRidge);

/// Aggregated statistic of one tile against one reference; +inf when degenerate.
double reference_statistic(const TileEcf& tile, const SdcReference& reference,
                           Aggregation mode, double ridge);

Decision min_over_references(const TileEcf& tile, std::span<const SdcReference> references,
                             Aggregation mode, double ridge);

/// Throws InvalidArgument on an empty reference list.
Decision classify(const PixelMatrix& tile, const SdcModel& model);

}  // namespace forest
