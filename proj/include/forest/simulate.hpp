#pragma once

// Synthetic scenes drawn from per-channel stable laws, clamped to [0, 1] the
// same way real normalized intensities are.

#include <array>
#include <cstdint>
#include <random>

#include "forest/model_io.hpp"
#include "forest/pixel_data.hpp"
#include "forest/stable_law.hpp"

namespace forest {

/// Red, green and blue laws of one land-cover class.
using ChannelLaws = std::array<StableParams, 3>;

struct SimulationParams {
  ChannelLaws forest;
  ChannelLaws non_forest;
};

/// {"forest": {"red": {...}, "green": {...}, "blue": {...}}, "non_forest": {...}}
SimulationParams simulation_params_from_json(const Json& doc);
Json to_json(const SimulationParams& params);

/// Draws every channel column by column from its law, clamping to [0, 1].
RgbImage simulate_patch(const ChannelLaws& laws, Eigen::Index rows, Eigen::Index cols,
                        std::mt19937_64& rng);

/// Columns [0, cols / 2) from `left`, the rest from `right`.
RgbImage simulate_split(const ChannelLaws& left, const ChannelLaws& right, Eigen::Index rows,
                        Eigen::Index cols, std::uint64_t seed);

/// Ground truth for a tile of a split scene: the class covering most of its columns
/// (ties go to the right-hand class).
Label split_tile_truth(Eigen::Index tile_col, Eigen::Index tile_size, Eigen::Index scene_cols,
                       Label left, Label right);

}  // namespace forest
