#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

namespace forest {

inline constexpr double kDefaultNormalizeDivisor = 2000.0;

enum class Label { Forest, NonForest };

std::string_view to_string(Label label);
/// Accepts "forest", "non-forest" (also "non_forest", "nonforest").
Label parse_label(std::string_view text);

/// Digital numbers as delivered by the sensor, one matrix per band.
using DnMatrix = Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic>;

struct RawBandSet {
  DnMatrix red;
  DnMatrix green;
  DnMatrix blue;

  /// Throws InvalidArgument on shape mismatch or negative values.
  void validate() const;
};

/// Full-size RGB composite with unit-interval intensities.
struct RgbImage {
  Eigen::MatrixXd red;
  Eigen::MatrixXd green;
  Eigen::MatrixXd blue;

  Eigen::Index rows() const { return red.rows(); }
  Eigen::Index cols() const { return red.cols(); }
  void validate() const;
};

struct TileOrigin {
  Eigen::Index row = 0;
  Eigen::Index col = 0;
};

/// A p x p crop of an RgbImage, p >= 2.
struct RgbTile {
  Eigen::MatrixXd red;
  Eigen::MatrixXd green;
  Eigen::MatrixXd blue;
  TileOrigin origin;

  Eigen::Index size() const { return red.rows(); }
  void validate() const;
};

using PixelRows = Eigen::Matrix<double, Eigen::Dynamic, 3>;

/// The (p^2) x 3 matrix of pixel intensity triplets. Spatial layout is gone;
/// row k is the (r, g, b) triple of one pixel, each column one stacked channel.
class PixelMatrix {
 public:
  PixelMatrix() = default;
  /// Throws InvalidArgument when a value falls outside [0, 1] or is not finite.
  explicit PixelMatrix(PixelRows data);

  const PixelRows& data() const { return data_; }
  std::size_t n() const { return static_cast<std::size_t>(data_.rows()); }
  auto channel(int c) const { return data_.col(c); }

 private:
  PixelRows data_;
};

/// out = min(raw / divisor, 1). Throws InvalidArgument on negative input or divisor <= 0.
Eigen::MatrixXd normalize_band(const DnMatrix& raw, double divisor = kDefaultNormalizeDivisor);
RgbImage normalize_bands(const RawBandSet& bands, double divisor = kDefaultNormalizeDivisor);

/// Non-overlapping p x p tiles in row-major order; partial strips at the
/// bottom and right edges are dropped.
std::vector<RgbTile> tile_image(const RgbImage& image, Eigen::Index tile_size);

/// Number of tiles tile_image produces along each axis.
inline Eigen::Index tile_count(Eigen::Index extent, Eigen::Index tile_size) {
  return extent / tile_size;
}

/// Column-major stacking of each channel.
PixelMatrix to_pixel_matrix(const RgbTile& tile);
PixelMatrix to_pixel_matrix(const RgbImage& image);

/// Inverse of to_pixel_matrix for a p x p tile.
RgbTile to_tile(const PixelMatrix& pixels, Eigen::Index tile_size, TileOrigin origin = {});

struct LabeledItem {
  PixelMatrix pixels;
  Label label = Label::Forest;
  std::string id;
};

class LabeledDataset {
 public:
  /// Throws InvalidArgument on a duplicate identifier.
  void add(LabeledItem item);

  const std::vector<LabeledItem>& items() const { return items_; }
  const LabeledItem& operator[](std::size_t i) const { return items_[i]; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  std::size_t count(Label label) const;

  /// Throws DataError unless both labels are present.
  void require_both_labels() const;

 private:
  std::vector<LabeledItem> items_;
  std::unordered_set<std::string> ids_;
};

}  // namespace forest
