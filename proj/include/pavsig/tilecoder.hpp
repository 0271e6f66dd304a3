#pragma once

// Conjunctive position x velocity tile coding of the arm's joint readings.
//
// Each joint owns a block of bins_per_axis^2 features; exactly one tile per
// joint is active, so every encoded observation has one active index per
// joint. The shoulder block comes first.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace pavsig {

enum class Direction : int { left = -1, rest = 0, right = 1 };

constexpr int sign_of(Direction d) { return static_cast<int>(d); }

// Normalized joint reading. position: 0 = left/bottom limit, 1 = right/top.
// velocity: 0 = full speed negative, 0.5 = rest, 1 = full speed positive.
struct JointObservation {
    double position = 0.5;
    double velocity = 0.5;

    JointObservation clamped() const;
    Direction direction() const;

    friend bool operator==(const JointObservation&, const JointObservation&) = default;
};

struct TileLayout {
    static constexpr int kJoints = 2;  // shoulder, elbow

    int bins_per_axis = 32;

    // Throws std::invalid_argument when bins_per_axis < 2.
    void validate() const;

    std::size_t tiles_per_joint() const {
        return static_cast<std::size_t>(bins_per_axis) * static_cast<std::size_t>(bins_per_axis);
    }
    std::size_t feature_count() const { return tiles_per_joint() * kJoints; }
    double bin_width() const { return 1.0 / bins_per_axis; }
};

// Sparse binary feature vector: the listed indices are 1, all others 0.
// Tile-coded observations always carry one index per joint; tabular tests
// build one-hot vectors with a single index.
struct FeatureVector {
    static constexpr std::size_t kMaxActive = TileLayout::kJoints;

    std::array<std::uint32_t, kMaxActive> active{};
    std::size_t count = 0;
    std::size_t length = 0;

    static FeatureVector one_hot(std::uint32_t index, std::size_t length) {
        FeatureVector x;
        x.active[0] = index;
        x.count = 1;
        x.length = length;
        return x;
    }

    std::span<const std::uint32_t> indices() const { return {active.data(), count}; }
    std::uint32_t shoulder() const { return active[0]; }
    std::uint32_t elbow() const { return active[1]; }

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// floor(value * bins) clamped to [0, bins - 1].
int bin_index(double value, int bins);

// Center of the given bin in normalized units.
double bin_center(int bin, int bins);

FeatureVector encode(const JointObservation& shoulder, const JointObservation& elbow,
                     const TileLayout& layout);

// Shoulder tile index within its block for an (already clamped) observation.
std::uint32_t joint_tile(const JointObservation& obs, const TileLayout& layout);

// Moves the position to the center of the bin `k` bins away in `direction`
// (clamped to the grid). Velocity is unchanged. Direction::rest or k == 0
// leaves the bin unchanged but still recenters the position.
JointObservation shift_query(const JointObservation& obs, Direction direction, int k,
                             const TileLayout& layout);

}  // namespace pavsig
