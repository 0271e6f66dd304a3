#pragma once

// Motion-sequencer pilot: drive toward one side until a token arrives, back
// off a fixed distance, then drive toward the other side.

#include <string_view>
#include <utility>

namespace pavsig {

enum class Phase { driving_right, backing_left, driving_left, backing_right };

std::string_view phase_name(Phase p);

struct AutomotionConfig {
    double backoff = 3.0 / 32.0;  // normalized distance
    double step = 0.005;          // distance consumed per full-speed command
    int motions_per_trial = 50;

    void validate() const;
};

struct AutomotionState {
    Phase phase = Phase::driving_right;
    int motions_done = 0;
    double backoff_remaining = 0.0;

    friend bool operator==(const AutomotionState&, const AutomotionState&) = default;
};

// Returns the velocity command for this tick and the next state. Tokens are
// ignored while backing off; a left excursion that finishes its back-off
// completes a motion.
std::pair<double, AutomotionState> next_command(const AutomotionState& state, bool token_received,
                                                const AutomotionConfig& cfg);

bool trial_complete(const AutomotionState& state, int target);

}  // namespace pavsig
