#include "forest/sdc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "forest/error.hpp"

namespace forest {

namespace {

double quadratic_form(const Eigen::Vector2d& diff, const SigmaZ& s, std::size_t n, double ridge) {
  if (n == 0) throw InvalidArgument("ECF statistic needs n >= 1");
  if (ridge < 0.0) throw InvalidArgument("ridge must be non-negative");
  Eigen::Matrix2d m = s.m;
  m.diagonal().array() += ridge;
  const double det = m.determinant();
  const double scale = m.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || !(det > scale * scale * 64.0 * std::numeric_limits<double>::epsilon())) {
    throw DegenerateError("Sigma_z is singular");
  }
  Eigen::Matrix2d inverse;
  inverse << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  inverse /= det;
  return std::max(0.0, static_cast<double>(n) * diff.dot(inverse * diff));
}

}  // namespace

std::string_view to_string(Aggregation mode) { return mode == Aggregation::Min ? "min" : "max"; }

Aggregation parse_aggregation(std::string_view text) {
  if (text == "min") return Aggregation::Min;
  if (text == "max") return Aggregation::Max;
  throw InvalidArgument("aggregation must be 'min' or 'max', got '" + std::string(text) + "'");
}

void SdcModel::validate() const {
  if (references.empty()) throw InvalidArgument("SDC model has no references");
  if (t == 0.0 || !std::isfinite(t)) throw InvalidArgument("SDC CF argument t must be non-zero");
  if (!(threshold >= 0.0)) throw InvalidArgument("SDC threshold must be non-negative");
  if (!(ridge >= 0.0)) throw InvalidArgument("SDC ridge must be non-negative");
}

double channel_statistic(const EcfPoint& zn, const EcfPoint& z0, const SigmaZ& s, std::size_t n,
                         double ridge) {
  if (zn.t != z0.t) throw InvalidArgument("channel_statistic: CF arguments differ");
  return quadratic_form(zn.z - z0.z, s, n, ridge);
}

double two_sample_statistic(const EcfPoint& zn1, const EcfPoint& zn2, const SigmaZ& s,
                            std::size_t n, double ridge) {
  if (zn1.t != zn2.t) throw InvalidArgument("two_sample_statistic: CF arguments differ");
  return quadratic_form(zn1.z - zn2.z, s, n, ridge);
}

double aggregate_channels(double red, double green, double blue, Aggregation mode) {
  return mode == Aggregation::Min ? std::min({red, green, blue}) : std::max({red, green, blue});
}

TileEcf tile_ecf(const PixelMatrix& pixels, double t) {
  TileEcf out;
  out.n = pixels.n();
  for (int c = 0; c < 3; ++c) {
    const auto column = pixels.channel(c);
    out.channels[c] = ecf(std::span<const double>(column.data(), out.n), t);
  }
  return out;
}

SdcReference make_reference(const PixelMatrix& pixels, double t, std::string id,
                            const KoutrouvelisOptions& options) {
  SdcReference ref;
  ref.id = std::move(id);
  for (int c = 0; c < 3; ++c) {
    const auto column = pixels.channel(c);
    const KoutrouvelisFit fit =
        estimate_koutrouvelis(std::span<const double>(column.data(), pixels.n()), options);
    ref.channels[c] = ChannelReference{fit.params, z0(fit.params, t), sigma_z(fit.params, t)};
  }
  return ref;
}

double reference_statistic(const TileEcf& tile, const SdcReference& reference, Aggregation mode,
                           double ridge) {
  std::array<double, 3> stats{};
  for (int c = 0; c < 3; ++c) {
    const ChannelReference& ch = reference.channels[c];
    try {
      stats[c] = channel_statistic(tile.channels[c], ch.z0, ch.sigma_z, tile.n, ridge);
    } catch (const DegenerateError&) {
      stats[c] = std::numeric_limits<double>::infinity();
    }
  }
  return aggregate_channels(stats[0], stats[1], stats[2], mode);
}

double self_statistic(const PixelMatrix& pixels, const SdcReference& reference, double ridge) {
  const TileEcf own = tile_ecf(pixels, reference.channels[0].z0.t);
  return reference_statistic(own, reference, Aggregation::Max, ridge);
}

Decision min_over_references(const TileEcf& tile, std::span<const SdcReference> references,
                             Aggregation mode, double ridge) {
  Decision best;
  best.t_min = std::numeric_limits<double>::infinity();
  best.best_reference = references.size();
  for (std::size_t i = 0; i < references.size(); ++i) {
    const double t = reference_statistic(tile, references[i], mode, ridge);
    if (t < best.t_min) {
      best.t_min = t;
      best.best_reference = i;
    }
  }
  best.degenerate = !references.empty() && best.best_reference == references.size();
  return best;
}

Decision classify(const PixelMatrix& tile, const SdcModel& model) {
  model.validate();
  Decision d = min_over_references(tile_ecf(tile, model.t), model.references, model.aggregation,
                                   model.ridge);
  d.label = decide(d.t_min, model.threshold);
  return d;
}

}  // namespace forest
