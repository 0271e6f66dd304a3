#include "pavsig/tilecoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pavsig {

JointObservation JointObservation::clamped() const {
    return {std::clamp(position, 0.0, 1.0), std::clamp(velocity, 0.0, 1.0)};
}

Direction JointObservation::direction() const {
    if (velocity > 0.5) return Direction::right;
    if (velocity < 0.5) return Direction::left;
    return Direction::rest;
}

void TileLayout::validate() const {
    if (bins_per_axis < 2) {
        throw std::invalid_argument("bins_per_axis must be >= 2, got " +
                                    std::to_string(bins_per_axis));
    }
}

int bin_index(double value, int bins) {
    if (!(value > 0.0)) return 0;  // also maps NaN to the lowest bin
    const double scaled = std::floor(value * bins);
    if (scaled >= bins - 1) return bins - 1;
    return static_cast<int>(scaled);
}

double bin_center(int bin, int bins) {
    return (static_cast<double>(bin) + 0.5) / static_cast<double>(bins);
}

std::uint32_t joint_tile(const JointObservation& obs, const TileLayout& layout) {
    const int bins = layout.bins_per_axis;
    const auto pos_bin = static_cast<std::uint32_t>(bin_index(obs.position, bins));
    const auto vel_bin = static_cast<std::uint32_t>(bin_index(obs.velocity, bins));
    return pos_bin * static_cast<std::uint32_t>(bins) + vel_bin;
}

FeatureVector encode(const JointObservation& shoulder, const JointObservation& elbow,
                     const TileLayout& layout) {
    const auto block = static_cast<std::uint32_t>(layout.tiles_per_joint());
    FeatureVector x;
    x.count = 2;
    x.length = layout.feature_count();
    x.active[0] = joint_tile(shoulder.clamped(), layout);
    x.active[1] = block + joint_tile(elbow.clamped(), layout);
    return x;
}

JointObservation shift_query(const JointObservation& obs, Direction direction, int k,
                             const TileLayout& layout) {
    const int bins = layout.bins_per_axis;
    const int from = bin_index(obs.position, bins);
    const int to = std::clamp(from + sign_of(direction) * std::max(k, 0), 0, bins - 1);
    return {bin_center(to, bins), obs.velocity};
}

}  // namespace pavsig
