#include "forest/image_io.hpp"

#include <cmath>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "forest/error.hpp"
#include "forest/model_io.hpp"

namespace forest {

namespace {

cv::Mat load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("image not found: " + path.string());
  cv::Mat m;
  try {
    m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception& e) {
    throw DataError("cannot decode " + path.string() + ": " + e.what());
  }
  if (m.empty()) throw DataError("cannot decode " + path.string());
  return m;
}

DnMatrix to_dn(const cv::Mat& plane) {
  cv::Mat wide;
  plane.convertTo(wide, CV_32S);
  DnMatrix out(wide.rows, wide.cols);
  for (int r = 0; r < wide.rows; ++r) {
    for (int c = 0; c < wide.cols; ++c) out(r, c) = wide.at<std::int32_t>(r, c);
  }
  return out;
}

Eigen::MatrixXd to_unit(const cv::Mat& plane, double scale) {
  cv::Mat real;
  plane.convertTo(real, CV_64F);
  Eigen::MatrixXd out(real.rows, real.cols);
  for (int r = 0; r < real.rows; ++r) {
    for (int c = 0; c < real.cols; ++c) {
      out(r, c) = std::clamp(real.at<double>(r, c) / scale, 0.0, 1.0);
    }
  }
  return out;
}

bool is_integer_depth(int depth) {
  return depth == CV_8U || depth == CV_16U || depth == CV_16S || depth == CV_32S;
}

}  // namespace

std::string ImageSource::describe() const {
  if (is_packed()) return packed.string();
  return bands[0].string() + "," + bands[1].string() + "," + bands[2].string();
}

RawBandSet read_raw_bands(const ImageSource& source) {
  RawBandSet raw;
  if (source.is_packed()) {
    const cv::Mat m = load(source.packed);
    if (m.channels() < 3 || !is_integer_depth(m.depth())) {
      throw DataError(source.packed.string() + ": expected an integer 3-channel image");
    }
    std::vector<cv::Mat> planes;
    cv::split(m, planes);
    // OpenCV orders colour planes B, G, R.
    raw = RawBandSet{to_dn(planes[2]), to_dn(planes[1]), to_dn(planes[0])};
  } else {
    DnMatrix* targets[3] = {&raw.red, &raw.green, &raw.blue};
    for (int c = 0; c < 3; ++c) {
      const cv::Mat m = load(source.bands[c]);
      if (m.channels() != 1 || !is_integer_depth(m.depth())) {
        throw DataError(source.bands[c].string() + ": expected a single-band integer image");
      }
      *targets[c] = to_dn(m);
    }
  }
  try {
    raw.validate();
  } catch (const InvalidArgument& e) {
    throw DataError(source.describe() + ": " + e.what());
  }
  return raw;
}

RgbImage read_image(const ImageSource& source, double divisor) {
  if (!(divisor > 0.0)) throw InvalidArgument("normalization divisor must be positive");
  if (source.is_packed()) {
    const cv::Mat m = load(source.packed);
    if (m.channels() < 3) throw DataError(source.packed.string() + ": expected 3 channels");
    if (m.depth() == CV_8U || m.depth() == CV_32F || m.depth() == CV_64F) {
      std::vector<cv::Mat> planes;
      cv::split(m, planes);
      const double scale = m.depth() == CV_8U ? 255.0 : 1.0;
      return RgbImage{to_unit(planes[2], scale), to_unit(planes[1], scale),
                      to_unit(planes[0], scale)};
    }
  }
  return normalize_bands(read_raw_bands(source), divisor);
}

void write_rgb16(const RgbImage& image, const std::filesystem::path& path, double divisor) {
  image.validate();
  const auto rows = static_cast<int>(image.rows());
  const auto cols = static_cast<int>(image.cols());
  if (divisor * 1.0 > 65535.0) throw InvalidArgument("divisor too large for 16-bit output");
  std::vector<cv::Mat> planes(3);
  const Eigen::MatrixXd* sources[3] = {&image.blue, &image.green, &image.red};
  for (int c = 0; c < 3; ++c) {
    planes[c] = cv::Mat(rows, cols, CV_16U);
    for (int r = 0; r < rows; ++r) {
      for (int k = 0; k < cols; ++k) {
        planes[c].at<std::uint16_t>(r, k) =
            static_cast<std::uint16_t>(std::lround((*sources[c])(r, k) * divisor));
      }
    }
  }
  cv::Mat packed;
  cv::merge(planes, packed);
  if (!cv::imwrite(path.string(), packed)) throw DataError("cannot write " + path.string());
}

void write_gray8(const std::vector<std::uint8_t>& values, int rows, int cols,
                 const std::filesystem::path& path) {
  if (static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) != values.size()) {
    throw InvalidArgument("write_gray8: size mismatch");
  }
  cv::Mat m(rows, cols, CV_8U);
  std::copy(values.begin(), values.end(), m.ptr<std::uint8_t>());
  if (!cv::imwrite(path.string(), m)) throw DataError("cannot write " + path.string());
}

std::vector<std::uint8_t> read_gray8(const std::filesystem::path& path, int& rows, int& cols) {
  cv::Mat m = load(path);
  if (m.channels() != 1 || m.depth() != CV_8U) {
    throw DataError(path.string() + ": expected an 8-bit grayscale image");
  }
  rows = m.rows;
  cols = m.cols;
  if (!m.isContinuous()) m = m.clone();
  return std::vector<std::uint8_t>(m.ptr<std::uint8_t>(), m.ptr<std::uint8_t>() + m.total());
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  const Json doc = read_json(path);
  const Json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("images")) throw DataError(path.string() + ": manifest lacks 'images'");
    list = &doc.at("images");
  }
  if (!list->is_array()) throw DataError(path.string() + ": manifest entries must be an array");

  const std::filesystem::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path candidate(p);
    return candidate.is_absolute() ? candidate : base / candidate;
  };

  std::vector<ManifestEntry> entries;
  for (const Json& item : *list) {
    try {
      ManifestEntry e;
      e.label = parse_label(item.at("label").get<std::string>());
      if (item.contains("path")) {
        e.source.packed = resolve(item.at("path").get<std::string>());
        e.id = item.value("id", item.at("path").get<std::string>());
      } else {
        const char* names[3] = {"red", "green", "blue"};
        for (int c = 0; c < 3; ++c) e.source.bands[c] = resolve(item.at(names[c]).get<std::string>());
        e.id = item.value("id", item.at("red").get<std::string>());
      }
      entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw DataError(path.string() + ": bad manifest entry: " + ex.what());
    } catch (const InvalidArgument& ex) {
      throw DataError(path.string() + ": " + ex.what());
    }
  }
  return entries;
}

LabeledDataset load_dataset(const std::filesystem::path& manifest, double divisor) {
  LabeledDataset dataset;
  for (auto& entry : read_manifest(manifest)) {
    const RgbImage image = read_image(entry.source, divisor);
    try {
      dataset.add(LabeledItem{to_pixel_matrix(image), entry.label, entry.id});
    } catch (const InvalidArgument& e) {
      throw DataError(manifest.string() + ": " + e.what());
    }
  }
  return dataset;
}

}  // namespace forest
