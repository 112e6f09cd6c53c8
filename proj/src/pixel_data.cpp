#include "forest/pixel_data.hpp"

#include <cmath>
#include <string>

#include "forest/error.hpp"

namespace forest {

namespace {

void require_unit_interval(const Eigen::MatrixXd& m, const char* what) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double v = m(i, j);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw InvalidArgument(std::string(what) + " value " + std::to_string(v) +
                              " outside [0, 1] at (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
      }
    }
  }
}

void require_same_shape(const auto& r, const auto& g, const auto& b, const char* what) {
  if (r.rows() != g.rows() || r.rows() != b.rows() || r.cols() != g.cols() ||
      r.cols() != b.cols()) {
    throw InvalidArgument(std::string(what) + ": channel dimensions differ");
  }
}

template <typename Channels>
PixelMatrix stack_channels(const Channels& img) {
  const Eigen::Index n = img.red.size();
  PixelRows rows(n, 3);
  // Eigen storage is column-major, so reshaping to a vector stacks columns.
  rows.col(0) = img.red.reshaped();
  rows.col(1) = img.green.reshaped();
  rows.col(2) = img.blue.reshaped();
  return PixelMatrix(std::move(rows));
}

}  // namespace

std::string_view to_string(Label label) {
  return label == Label::Forest ? "forest" : "non-forest";
}

Label parse_label(std::string_view text) {
  if (text == "forest") return Label::Forest;
  if (text == "non-forest" || text == "non_forest" || text == "nonforest") {
    return Label::NonForest;
  }
  throw InvalidArgument("unknown label '" + std::string(text) + "'");
}

void RawBandSet::validate() const {
  require_same_shape(red, green, blue, "RawBandSet");
  for (const DnMatrix* band : {&red, &green, &blue}) {
    if (band->size() > 0 && band->minCoeff() < 0) {
      throw InvalidArgument("RawBandSet: negative digital number");
    }
  }
}

void RgbImage::validate() const {
  require_same_shape(red, green, blue, "RgbImage");
  require_unit_interval(red, "red");
  require_unit_interval(green, "green");
  require_unit_interval(blue, "blue");
}

void RgbTile::validate() const {
  require_same_shape(red, green, blue, "RgbTile");
  if (red.rows() != red.cols()) throw InvalidArgument("RgbTile must be square");
  if (red.rows() < 2) throw InvalidArgument("RgbTile size must be at least 2");
  require_unit_interval(red, "red");
  require_unit_interval(green, "green");
  require_unit_interval(blue, "blue");
}

PixelMatrix::PixelMatrix(PixelRows data) : data_(std::move(data)) {
  for (Eigen::Index i = 0; i < data_.size(); ++i) {
    const double v = data_.data()[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw InvalidArgument("PixelMatrix value " + std::to_string(v) + " outside [0, 1]");
    }
  }
}

Eigen::MatrixXd normalize_band(const DnMatrix& raw, double divisor) {
  if (!(divisor > 0.0)) throw InvalidArgument("normalization divisor must be positive");
  if (raw.size() > 0 && raw.minCoeff() < 0) {
    throw InvalidArgument("normalize_band: negative digital number " +
                          std::to_string(raw.minCoeff()));
  }
  return (raw.cast<double>() / divisor).cwiseMin(1.0);
}

RgbImage normalize_bands(const RawBandSet& bands, double divisor) {
  bands.validate();
  return RgbImage{normalize_band(bands.red, divisor), normalize_band(bands.green, divisor),
                  normalize_band(bands.blue, divisor)};
}

std::vector<RgbTile> tile_image(const RgbImage& image, Eigen::Index tile_size) {
  require_same_shape(image.red, image.green, image.blue, "tile_image");
  if (tile_size < 2) throw InvalidArgument("tile size must be at least 2");
  if (tile_size > image.rows() || tile_size > image.cols()) {
    throw InvalidArgument("tile size " + std::to_string(tile_size) + " exceeds image " +
                          std::to_string(image.rows()) + "x" + std::to_string(image.cols()));
  }
  const Eigen::Index tile_rows = tile_count(image.rows(), tile_size);
  const Eigen::Index tile_cols = tile_count(image.cols(), tile_size);
  std::vector<RgbTile> tiles;
  tiles.reserve(static_cast<std::size_t>(tile_rows * tile_cols));
  for (Eigen::Index tr = 0; tr < tile_rows; ++tr) {
    for (Eigen::Index tc = 0; tc < tile_cols; ++tc) {
      const Eigen::Index r0 = tr * tile_size;
      const Eigen::Index c0 = tc * tile_size;
      tiles.push_back(RgbTile{image.red.block(r0, c0, tile_size, tile_size),
                              image.green.block(r0, c0, tile_size, tile_size),
                              image.blue.block(r0, c0, tile_size, tile_size),
                              TileOrigin{r0, c0}});
    }
  }
  return tiles;
}

PixelMatrix to_pixel_matrix(const RgbTile& tile) {
  require_same_shape(tile.red, tile.green, tile.blue, "to_pixel_matrix");
  return stack_channels(tile);
}

PixelMatrix to_pixel_matrix(const RgbImage& image) {
  require_same_shape(image.red, image.green, image.blue, "to_pixel_matrix");
  return stack_channels(image);
}

RgbTile to_tile(const PixelMatrix& pixels, Eigen::Index tile_size, TileOrigin origin) {
  if (static_cast<Eigen::Index>(pixels.n()) != tile_size * tile_size) {
    throw InvalidArgument("to_tile: pixel count does not match tile size");
  }
  const auto& d = pixels.data();
  return RgbTile{d.col(0).reshaped(tile_size, tile_size), d.col(1).reshaped(tile_size, tile_size),
                 d.col(2).reshaped(tile_size, tile_size), origin};
}

void LabeledDataset::add(LabeledItem item) {
  if (!ids_.insert(item.id).second) {
    throw InvalidArgument("duplicate dataset identifier '" + item.id + "'");
  }
  items_.push_back(std::move(item));
}

std::size_t LabeledDataset::count(Label label) const {
  std::size_t c = 0;
  for (const auto& item : items_) c += item.label == label ? 1 : 0;
  return c;
}

void LabeledDataset::require_both_labels() const {
  if (count(Label::Forest) == 0 || count(Label::NonForest) == 0) {
    throw DataError("dataset must contain both forest and non-forest images (forest=" +
                    std::to_string(count(Label::Forest)) +
                    ", non-forest=" + std::to_string(count(Label::NonForest)) + ")");
  }
}

}  // namespace forest
