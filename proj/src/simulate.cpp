#include "forest/simulate.hpp"

#include <algorithm>

#include "forest/error.hpp"

namespace forest {

namespace {

constexpr const char* kChannelNames[3] = {"red", "green", "blue"};

ChannelLaws laws_from_json(const Json& doc, const char* key) {
  if (!doc.contains(key)) throw DataError(std::string("simulation params lack '") + key + "'");
  ChannelLaws laws;
  for (int c = 0; c < 3; ++c) {
    try {
      laws[c] = stable_params_from_json(doc.at(key).at(kChannelNames[c]));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("simulation params: ") + e.what());
    }
  }
  return laws;
}

Json laws_json(const ChannelLaws& laws) {
  Json out = Json::object();
  for (int c = 0; c < 3; ++c) out[kChannelNames[c]] = to_json(laws[c]);
  return out;
}

}  // namespace

SimulationParams simulation_params_from_json(const Json& doc) {
  return SimulationParams{laws_from_json(doc, "forest"), laws_from_json(doc, "non_forest")};
}

Json to_json(const SimulationParams& params) {
  return Json{{"forest", laws_json(params.forest)}, {"non_forest", laws_json(params.non_forest)}};
}

RgbImage simulate_patch(const ChannelLaws& laws, Eigen::Index rows, Eigen::Index cols,
                        std::mt19937_64& rng) {
  RgbImage out{Eigen::MatrixXd(rows, cols), Eigen::MatrixXd(rows, cols),
               Eigen::MatrixXd(rows, cols)};
  Eigen::MatrixXd* channels[3] = {&out.red, &out.green, &out.blue};
  for (int c = 0; c < 3; ++c) {
    laws[c].validate();
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) {
        (*channels[c])(i, j) = std::clamp(draw_stable(laws[c], rng), 0.0, 1.0);
      }
    }
  }
  return out;
}

RgbImage simulate_split(const ChannelLaws& left, const ChannelLaws& right, Eigen::Index rows,
                        Eigen::Index cols, std::uint64_t seed) {
  if (rows < 1 || cols < 2) throw InvalidArgument("split scene needs at least 1x2 pixels");
  std::mt19937_64 rng(seed);
  const Eigen::Index half = cols / 2;
  const RgbImage a = simulate_patch(left, rows, half, rng);
  const RgbImage b = simulate_patch(right, rows, cols - half, rng);
  RgbImage out{Eigen::MatrixXd(rows, cols), Eigen::MatrixXd(rows, cols),
               Eigen::MatrixXd(rows, cols)};
  out.red << a.red, b.red;
  out.green << a.green, b.green;
  out.blue << a.blue, b.blue;
  return out;
}

Label split_tile_truth(Eigen::Index tile_col, Eigen::Index tile_size, Eigen::Index scene_cols,
                       Label left, Label right) {
  const Eigen::Index half = scene_cols / 2;
  const Eigen::Index start = tile_col * tile_size;
  const Eigen::Index left_cols = std::clamp(half - start, Eigen::Index{0}, tile_size);
  return 2 * left_cols > tile_size ? left : right;
}

}  // namespace forest
