#pragma once

// Raster ingestion and output. Formats are chosen by extension and decoded
// with OpenCV: PNG, PGM/PPM and TIFF (GeoTIFF files are read as plain TIFF;
// georeferencing tags are ignored).
//
//  * packed 3-channel 8-bit image: intensities = value / 255
//  * packed 3-channel 16-bit image: digital numbers, normalized by the divisor
//  * three single-band images (red, green, blue): digital numbers, normalized by the divisor

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "forest/pixel_data.hpp"

namespace forest {

struct ImageSource {
  /// Packed RGB file; empty when bands are given separately.
  std::filesystem::path packed;
  std::array<std::filesystem::path, 3> bands;

  bool is_packed() const { return !packed.empty(); }
  std::string describe() const;
};

RawBandSet read_raw_bands(const ImageSource& source);
RgbImage read_image(const ImageSource& source, double divisor = kDefaultNormalizeDivisor);

/// Stores round(v * divisor) as a 16-bit 3-channel image, so that
/// read_image(..., divisor) reproduces the intensities up to 1 / divisor.
void write_rgb16(const RgbImage& image, const std::filesystem::path& path,
                 double divisor = kDefaultNormalizeDivisor);

/// 8-bit grayscale image, row-major `values` of size rows x cols.
void write_gray8(const std::vector<std::uint8_t>& values, int rows, int cols,
                 const std::filesystem::path& path);
std::vector<std::uint8_t> read_gray8(const std::filesystem::path& path, int& rows, int& cols);

struct ManifestEntry {
  ImageSource source;
  Label label = Label::Forest;
  std::string id;
};

/// Accepts a top-level array or {"images": [...]}. Each entry has "label" and
/// either "path" or "red"/"green"/"blue"; "id" defaults to the path.
/// Relative paths are resolved against the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

LabeledDataset load_dataset(const std::filesystem::path& manifest,
                            double divisor = kDefaultNormalizeDivisor);

}  // namespace forest
