#include "forest/mdc.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "forest/error.hpp"

namespace forest {

SampleStats sample_stats(const PixelRows& rows) {
  const Eigen::Index n = rows.rows();
  if (n < 2) throw InvalidArgument("sample_stats needs at least 2 rows, got " + std::to_string(n));
  SampleStats s;
  s.n = static_cast<std::size_t>(n);
  s.mean = rows.colwise().mean().transpose();
  const PixelRows centered = rows.rowwise() - s.mean.transpose();
  s.cov = (centered.transpose() * centered) / static_cast<double>(n);
  return s;
}

SampleStats sample_stats(const PixelMatrix& pixels) { return sample_stats(pixels.data()); }

Eigen::Matrix3d pooled_covariance(const SampleStats& s1, const SampleStats& s2) {
  const std::size_t total = s1.n + s2.n;
  if (total <= 2) throw InvalidArgument("pooled_covariance needs n1 + n2 > 2");
  const auto n1 = static_cast<double>(s1.n);
  const auto n2 = static_cast<double>(s2.n);
  return (n1 * s1.cov + n2 * s2.cov) / (static_cast<double>(total) - 2.0);
}

double t_statistic(const SampleStats& s1, const SampleStats& s2, double ridge) {
  if (ridge < 0.0) throw InvalidArgument("ridge must be non-negative");
  Eigen::Matrix3d pooled = pooled_covariance(s1, s2);
  pooled.diagonal().array() += ridge;

  const Eigen::LDLT<Eigen::Matrix3d> ldlt(pooled);
  const double scale = pooled.diagonal().cwiseAbs().maxCoeff();
  const auto d = ldlt.vectorD();
  // A pivot that vanishes relative to the largest diagonal entry means the
  // quadratic form is not defined.
  if (ldlt.info() != Eigen::Success || !(scale > 0.0) ||
      d.minCoeff() <= scale * 64.0 * std::numeric_limits<double>::epsilon()) {
    throw DegenerateError("pooled covariance is singular");
  }
  const Eigen::Vector3d diff = s1.mean - s2.mean;
  const double d2 = diff.dot(ldlt.solve(diff));
  const auto n1 = static_cast<double>(s1.n);
  const auto n2 = static_cast<double>(s2.n);
  return std::max(0.0, n1 * n2 / (n1 + n2) * d2);
}

void MdcModel::validate() const {
  if (references.empty()) throw InvalidArgument("MDC model has no references");
  if (!(threshold >= 0.0)) throw InvalidArgument("MDC threshold must be non-negative");
  if (!(ridge >= 0.0)) throw InvalidArgument("MDC ridge must be non-negative");
}

Decision min_over_references(const SampleStats& test, std::span<const MdcReference> references,
                             double ridge) {
  Decision best;
  best.t_min = std::numeric_limits<double>::infinity();
  best.best_reference = references.size();
  std::size_t degenerate = 0;
  for (std::size_t i = 0; i < references.size(); ++i) {
    double t = 0.0;
    try {
      t = t_statistic(test, references[i].stats, ridge);
    } catch (const DegenerateError&) {
      ++degenerate;
      continue;
    }
    if (t < best.t_min) {
      best.t_min = t;
      best.best_reference = i;
    }
  }
  best.degenerate = !references.empty() && degenerate == references.size();
  return best;
}

Decision classify(const SampleStats& test, const MdcModel& model) {
  model.validate();
  Decision d = min_over_references(test, model.references, model.ridge);
  d.label = decide(d.t_min, model.threshold);
  return d;
}

}  // namespace forest
