#include "forest/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>

#include "forest/error.hpp"

namespace forest {

namespace {

std::vector<ImageMeta> metadata(const LabeledDataset& dataset) {
  std::vector<ImageMeta> meta;
  meta.reserve(dataset.size());
  for (const auto& item : dataset.items()) meta.push_back({item.id, item.label});
  return meta;
}

// Runs the fold loop shared by both methods. `is_reference[i]` marks images
// that may serve as forest references.
std::vector<ScoredImage> pooled_scores(const LabeledDataset& dataset, const CvConfig& cfg,
                                       const std::vector<bool>& is_reference,
                                       const PairStatistic& stat) {
  const auto meta = metadata(dataset);
  // Folds are dealt over images sorted by id, so that membership depends on
  // the seed and the ids only, never on the order of the manifest.
  std::vector<std::size_t> by_id(dataset.size());
  std::iota(by_id.begin(), by_id.end(), std::size_t{0});
  std::sort(by_id.begin(), by_id.end(),
            [&](std::size_t a, std::size_t b) { return meta[a].id < meta[b].id; });
  auto folds = kfold_split(dataset.size(), cfg.k, cfg.seed);
  for (auto& fold : folds) {
    for (auto& i : fold) i = by_id[i];
  }
  std::vector<int> fold_of(dataset.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    for (const std::size_t i : folds[f]) fold_of[i] = static_cast<int>(f);
  }
  std::vector<ScoredImage> scored;
  scored.reserve(dataset.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<std::size_t> references;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (is_reference[i] && fold_of[i] != static_cast<int>(f)) references.push_back(i);
    }
    auto part = score_holdout(folds[f], references, meta, stat, static_cast<int>(f));
    scored.insert(scored.end(), part.begin(), part.end());
  }
  return scored;
}

TrainingReport make_report(std::string method, const CvConfig& cfg, double t_max,
                           std::vector<ScoredImage> scored) {
  TrainingReport report;
  report.method = std::move(method);
  report.k = cfg.k;
  report.t_max = t_max;
  report.grid_steps = cfg.grid_steps;
  report.seed = cfg.seed;
  const ThresholdChoice choice = threshold_search(scored, t_max, cfg.grid_steps);
  report.threshold = choice.threshold;
  report.cv_accuracy = choice.accuracy;
  report.curve = accuracy_curve(scored, t_max, cfg.grid_steps);
  report.scores = std::move(scored);
  return report;
}

}  // namespace

double default_t_max(int dof) {
  const boost::math::chi_squared_distribution<double> chi2(dof);
  return 10.0 * boost::math::quantile(chi2, 0.9999);
}

void CvConfig::validate() const {
  if (k < 2) throw InvalidArgument("fold count k must be at least 2");
  if (grid_steps < 1) throw InvalidArgument("grid_steps must be positive");
  if (!std::isfinite(t_max)) throw InvalidArgument("t_max must be finite");
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("fold count k must be at least 2");
  if (static_cast<std::size_t>(k) > n) {
    throw InvalidArgument("fold count k=" + std::to_string(k) + " exceeds dataset size " +
                          std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) folds[i % folds.size()].push_back(order[i]);
  return folds;
}

std::vector<ScoredImage> score_holdout(std::span<const std::size_t> fold,
                                       std::span<const std::size_t> references,
                                       std::span<const ImageMeta> meta, const PairStatistic& stat,
                                       int fold_index) {
  if (references.empty()) {
    throw DataError("no forest references outside fold " + std::to_string(fold_index));
  }
  std::vector<ScoredImage> out;
  out.reserve(fold.size());
  for (const std::size_t image : fold) {
    double best = std::numeric_limits<double>::infinity();
    for (const std::size_t ref : references) best = std::min(best, stat(image, ref));
    out.push_back(ScoredImage{meta[image].id, meta[image].label, best, fold_index});
  }
  return out;
}

ThresholdChoice threshold_search(std::span<const ScoredImage> scored, double t_max,
                                 int grid_steps) {
  if (grid_steps < 1) throw InvalidArgument("grid_steps must be positive");
  if (!(t_max > 0.0)) throw InvalidArgument("t_max must be positive");
  std::vector<double> forest;
  std::vector<double> non_forest;
  for (const auto& s : scored) (s.label == Label::Forest ? forest : non_forest).push_back(s.min_stat);
  if (forest.empty() || non_forest.empty()) {
    throw DataError("threshold search needs both forest and non-forest scores");
  }
  std::sort(forest.begin(), forest.end());
  std::sort(non_forest.begin(), non_forest.end());

  // Sweep the grid upward; the two cursors count scores strictly below t.
  const auto total = static_cast<double>(scored.size());
  std::size_t forest_below = 0;
  std::size_t non_forest_below = 0;
  std::size_t best_correct = 0;
  int best_j = -1;
  for (int j = 0; j <= grid_steps; ++j) {
    const double t = grid_threshold(t_max, grid_steps, j);
    while (forest_below < forest.size() && forest[forest_below] < t) ++forest_below;
    while (non_forest_below < non_forest.size() && non_forest[non_forest_below] < t) {
      ++non_forest_below;
    }
    const std::size_t correct = forest_below + (non_forest.size() - non_forest_below);
    if (best_j < 0 || correct > best_correct) {
      best_correct = correct;
      best_j = j;
    }
  }
  return ThresholdChoice{grid_threshold(t_max, grid_steps, best_j),
                         static_cast<double>(best_correct) / total};
}

std::vector<AccuracyPoint> accuracy_curve(std::span<const ScoredImage> scored, double t_max,
                                          int grid_steps, int stride) {
  if (scored.empty() || stride < 1) return {};
  std::vector<AccuracyPoint> curve;
  for (int j = 0; j <= grid_steps; j += stride) {
    const double t = grid_threshold(t_max, grid_steps, j);
    std::size_t correct = 0;
    for (const auto& s : scored) {
      correct += decide(s.min_stat, t) == s.label ? 1 : 0;
    }
    curve.push_back({t, static_cast<double>(correct) / static_cast<double>(scored.size())});
    if (j != grid_steps && j + stride > grid_steps) j = grid_steps - stride;
  }
  return curve;
}

MdcTraining cross_validate_mdc(const LabeledDataset& dataset, const CvConfig& cfg, double ridge) {
  cfg.validate();
  dataset.require_both_labels();
  const double t_max = cfg.t_max > 0.0 ? cfg.t_max : default_t_max(3);

  std::vector<SampleStats> stats;
  stats.reserve(dataset.size());
  for (const auto& item : dataset.items()) stats.push_back(sample_stats(item.pixels));

  std::vector<bool> is_reference(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    is_reference[i] = dataset[i].label == Label::Forest;
  }
  const PairStatistic stat = [&](std::size_t image, std::size_t ref) {
    try {
      return t_statistic(stats[image], stats[ref], ridge);
    } catch (const DegenerateError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  MdcTraining out;
  out.report = make_report("mdc", cfg, t_max, pooled_scores(dataset, cfg, is_reference, stat));
  out.model.threshold = out.report.threshold;
  out.model.ridge = ridge;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (is_reference[i]) out.model.references.push_back({dataset[i].id, stats[i]});
  }
  return out;
}

SdcTraining cross_validate_sdc(const LabeledDataset& dataset, const CvConfig& cfg,
                               const SdcTrainOptions& options) {
  cfg.validate();
  dataset.require_both_labels();
  if (options.t == 0.0) throw InvalidArgument("SDC CF argument t must be non-zero");
  const double t_max = cfg.t_max > 0.0 ? cfg.t_max : default_t_max(2);

  std::vector<TileEcf> ecfs;
  std::vector<std::optional<SdcReference>> fits(dataset.size());
  std::vector<bool> is_reference(dataset.size(), false);
  std::vector<std::string> warnings;
  const double self_limit =
      options.self_check_level > 0.0
          ? boost::math::quantile(
                boost::math::complement(boost::math::chi_squared_distribution<double>(2),
                                        options.self_check_level))
          : std::numeric_limits<double>::infinity();
  ecfs.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& item = dataset[i];
    ecfs.push_back(tile_ecf(item.pixels, options.t));
    if (item.label != Label::Forest) continue;
    try {
      SdcReference ref = make_reference(item.pixels, options.t, item.id, options.estimation);
      const double self = self_statistic(item.pixels, ref, options.ridge);
      if (!(self <= self_limit)) {
        warnings.push_back("excluded forest image '" + item.id +
                           "': its own pixels reject the fitted laws (statistic " +
                           std::to_string(self) + ")");
        continue;
      }
      fits[i] = std::move(ref);
      is_reference[i] = true;
    } catch (const Error& e) {
      warnings.push_back("excluded forest image '" + item.id + "': " + e.what());
    }
  }
  if (std::none_of(is_reference.begin(), is_reference.end(), [](bool b) { return b; })) {
    throw DataError("no forest image could be fitted with a stable law");
  }

  const PairStatistic stat = [&](std::size_t image, std::size_t ref) {
    return reference_statistic(ecfs[image], *fits[ref], options.aggregation, options.ridge);
  };

  SdcTraining out;
  out.report = make_report("sdc", cfg, t_max, pooled_scores(dataset, cfg, is_reference, stat));
  out.report.warnings = std::move(warnings);
  out.model.t = options.t;
  out.model.threshold = out.report.threshold;
  out.model.aggregation = options.aggregation;
  out.model.ridge = options.ridge;
  for (auto& fit : fits) {
    if (fit) out.model.references.push_back(std::move(*fit));
  }
  return out;
}

}  // namespace forest
