#include "forest/detector.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "forest/error.hpp"
#include "forest/image_io.hpp"

namespace forest {

std::vector<std::uint8_t> MaskImage::pixels(int upscale) const {
  if (upscale < 1) throw InvalidArgument("mask upscale must be at least 1");
  const auto width = static_cast<std::size_t>(cols * upscale);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(rows * upscale) * width);
  for (Eigen::Index r = 0; r < rows * upscale; ++r) {
    for (Eigen::Index c = 0; c < cols * upscale; ++c) {
      out[static_cast<std::size_t>(r) * width + static_cast<std::size_t>(c)] =
          at(r / upscale, c / upscale) ? 255 : 0;
    }
  }
  return out;
}

Decision classify_pixels(const PixelMatrix& pixels, const AnyModel& model) {
  if (const auto* mdc = std::get_if<MdcModel>(&model)) {
    return classify(sample_stats(pixels), *mdc);
  }
  return classify(pixels, std::get<SdcModel>(model));
}

ClassifiedImage classify_image(const RgbImage& image, const AnyModel& model,
                               Eigen::Index tile_size, std::string source_id) {
  const auto tiles = tile_image(image, tile_size);
  ClassifiedImage out;
  out.mask.rows = tile_count(image.rows(), tile_size);
  out.mask.cols = tile_count(image.cols(), tile_size);
  out.mask.tile_size = tile_size;
  out.mask.source_id = std::move(source_id);
  out.mask.forest.assign(tiles.size(), false);
  out.scores.reserve(tiles.size());
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    const RgbTile& tile = tiles[i];
    const PixelMatrix pixels = to_pixel_matrix(tile);
    const auto spread = pixels.data().colwise().maxCoeff() - pixels.data().colwise().minCoeff();
    if (spread.minCoeff() == 0.0) ++out.constant_tiles;
    const Decision d = classify_pixels(pixels, model);
    out.mask.forest[i] = d.label == Label::Forest;
    out.scores.push_back(
        TileScore{tile.origin.row / tile_size, tile.origin.col / tile_size, d.t_min, d.label});
  }
  return out;
}

void write_mask(const MaskImage& mask, const std::filesystem::path& path, int upscale) {
  write_gray8(mask.pixels(upscale), static_cast<int>(mask.rows * upscale),
              static_cast<int>(mask.cols * upscale), path);
}

void write_scores_csv(const std::vector<TileScore>& scores, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "tile_row,tile_col,t_min,label\n";
  char buf[64];
  for (const auto& s : scores) {
    if (std::isfinite(s.t_min)) {
      std::snprintf(buf, sizeof buf, "%.17g", s.t_min);
    } else {
      std::snprintf(buf, sizeof buf, "inf");
    }
    out << s.tile_row << ',' << s.tile_col << ',' << buf << ',' << to_string(s.label) << '\n';
  }
}

}  // namespace forest
