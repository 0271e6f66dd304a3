#include "pavsig/automotion.hpp"

#include <algorithm>
#include <stdexcept>

namespace pavsig {

namespace {
// Remaining distances below this count as consumed (absorbs rounding in the
// repeated subtraction of `step`).
constexpr double kDistanceEpsilon = 1e-12;

double consume(double remaining, double step) { return std::max(0.0, remaining - step); }
}  // namespace

std::string_view phase_name(Phase p) {
    switch (p) {
        case Phase::driving_right: return "driving_right";
        case Phase::backing_left: return "backing_left";
        case Phase::driving_left: return "driving_left";
        case Phase::backing_right: return "backing_right";
    }
    return "unknown";
}

void AutomotionConfig::validate() const {
    if (!(backoff >= 0.0)) throw std::invalid_argument("backoff must be >= 0");
    if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
    if (motions_per_trial <= 0) throw std::invalid_argument("motions_per_trial must be > 0");
}

std::pair<double, AutomotionState> next_command(const AutomotionState& state, bool token_received,
                                                const AutomotionConfig& cfg) {
    AutomotionState next = state;
    switch (state.phase) {
        case Phase::driving_right:
            if (!token_received) return {+1.0, next};
            next.phase = Phase::backing_left;
            next.backoff_remaining = consume(cfg.backoff, cfg.step);
            return {-1.0, next};

        case Phase::driving_left:
            if (!token_received) return {-1.0, next};
            next.phase = Phase::backing_right;
            next.backoff_remaining = consume(cfg.backoff, cfg.step);
            return {+1.0, next};

        case Phase::backing_left:
            if (state.backoff_remaining <= kDistanceEpsilon) {
                next.phase = Phase::driving_left;
                next.backoff_remaining = 0.0;
            } else {
                next.backoff_remaining = consume(state.backoff_remaining, cfg.step);
            }
            return {-1.0, next};

        case Phase::backing_right:
            if (state.backoff_remaining <= kDistanceEpsilon) {
                next.phase = Phase::driving_right;
                next.backoff_remaining = 0.0;
                ++next.motions_done;
            } else {
                next.backoff_remaining = consume(state.backoff_remaining, cfg.step);
            }
            return {+1.0, next};
    }
    return {0.0, next};
}

bool trial_complete(const AutomotionState& state, int target) {
    return state.motions_done >= target;
}

}  // namespace pavsig
