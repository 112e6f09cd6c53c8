#pragma once

// k-fold cross-validated threshold selection for the MDC and SDC models.
// Every holdout image is scored by its smallest statistic against the forest
// images outside its fold; the scores of all folds are pooled and the
// threshold maximizing accuracy on a uniform grid is kept.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "forest/mdc.hpp"
#include "forest/pixel_data.hpp"
#include "forest/sdc.hpp"

namespace forest {

inline constexpr int kDefaultGridSteps = 1000;

/// 10 x the 99.99% quantile of chi^2(dof).
double default_t_max(int dof);

struct CvConfig {
  int k = 5;
  double t_max = 0.0;  ///< <= 0 selects default_t_max for the method
  int grid_steps = kDefaultGridSteps;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ScoredImage {
  std::string id;
  Label label = Label::Forest;
  double min_stat = 0.0;
  int fold = -1;
};

/// Shuffles 0..n-1 with the seed and deals the indices into k folds whose
/// sizes differ by at most one. Throws InvalidArgument when k < 2 or k > n.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k, std::uint64_t seed);

struct ImageMeta {
  std::string id;
  Label label = Label::Forest;
};

/// stat(image, reference) for dataset indices; may return +inf.
using PairStatistic = std::function<double(std::size_t image, std::size_t reference)>;

/// Scores every image of `fold` by its minimum statistic against `references`.
/// Throws DataError when `references` is empty.
std::vector<ScoredImage> score_holdout(std::span<const std::size_t> fold,
                                       std::span<const std::size_t> references,
                                       std::span<const ImageMeta> meta, const PairStatistic& stat,
                                       int fold_index = -1);

/// Grid point j of a threshold grid.
inline double grid_threshold(double t_max, int grid_steps, int j) {
  return t_max * static_cast<double>(j) / static_cast<double>(grid_steps);
}

struct ThresholdChoice {
  double threshold = 0.0;
  double accuracy = 0.0;
};

/// Smallest grid threshold maximizing accuracy under min_stat < t -> forest.
/// Throws DataError unless both labels are present.
ThresholdChoice threshold_search(std::span<const ScoredImage> scored, double t_max,
                                 int grid_steps);

struct AccuracyPoint {
  double threshold = 0.0;
  double accuracy = 0.0;
};

/// Accuracy at every `stride`-th grid point (the last point always included).
std::vector<AccuracyPoint> accuracy_curve(std::span<const ScoredImage> scored, double t_max,
                                          int grid_steps, int stride = 10);

struct TrainingReport {
  std::string method;
  int k = 0;
  double t_max = 0.0;
  int grid_steps = 0;
  std::uint64_t seed = 0;
  double threshold = 0.0;
  /// Pooled cross-validation accuracy over all holdout folds.
  double cv_accuracy = 0.0;
  std::vector<ScoredImage> scores;
  std::vector<AccuracyPoint> curve;
  std::vector<std::string> warnings;
};

struct MdcTraining {
  MdcModel model;
  TrainingReport report;
};

struct SdcTraining {
  SdcModel model;
  TrainingReport report;
};

struct SdcTrainOptions {
  double t = kDefaultCfArgument;
  Aggregation aggregation = Aggregation::Min;
  double ridge = kDefaultRidge;
  KoutrouvelisOptions estimation{};
  /// A forest image is dropped from the references when its own pixels reject
  /// its fitted laws at this chi^2(2) level. <= 0 keeps every fit.
  double self_check_level = 1e-4;
};

MdcTraining cross_validate_mdc(const LabeledDataset& dataset, const CvConfig& cfg,
                               double ridge = kDefaultRidge);

/// Forest images whose stable fit fails, or fails the self check, are dropped
/// from the references with a warning.
SdcTraining cross_validate_sdc(const LabeledDataset& dataset, const CvConfig& cfg,
                               const SdcTrainOptions& options = {});

}  // namespace forest
