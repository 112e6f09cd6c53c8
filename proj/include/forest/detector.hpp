#pragma once

// Whole-image detection: tile, classify every tile with a trained model and
// collect a forest mask (one cell per tile) plus per-tile scores.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "forest/model_io.hpp"
#include "forest/pixel_data.hpp"

namespace forest {

struct TileScore {
  Eigen::Index tile_row = 0;
  Eigen::Index tile_col = 0;
  double t_min = 0.0;
  Label label = Label::NonForest;
};

struct MaskImage {
  Eigen::Index rows = 0;  ///< tiles down
  Eigen::Index cols = 0;  ///< tiles across
  Eigen::Index tile_size = 0;
  std::string source_id;
  /// Row-major, true for forest.
  std::vector<bool> forest;

  bool at(Eigen::Index r, Eigen::Index c) const {
    return forest[static_cast<std::size_t>(r * cols + c)];
  }
  /// 255 = forest (white), 0 = non-forest (black); each tile drawn as upscale x upscale pixels.
  std::vector<std::uint8_t> pixels(int upscale = 1) const;
};

struct ClassifiedImage {
  MaskImage mask;
  std::vector<TileScore> scores;
  /// Tiles with a constant channel (zero spread), e.g. saturated clouds.
  std::size_t constant_tiles = 0;
};

Decision classify_pixels(const PixelMatrix& pixels, const AnyModel& model);

ClassifiedImage classify_image(const RgbImage& image, const AnyModel& model,
                               Eigen::Index tile_size, std::string source_id = {});

void write_mask(const MaskImage& mask, const std::filesystem::path& path, int upscale = 1);
/// Columns: tile_row,tile_col,t_min,label.
void write_scores_csv(const std::vector<TileScore>& scores, const std::filesystem::path& path);

}  // namespace forest
