#include "pavsig/arm_world.hpp"

#include <algorithm>
#include <stdexcept>

namespace pavsig {

void Workspace::validate() const {
    if (!(left_wall >= 0.0 && left_wall < right_wall && right_wall <= 1.0)) {
        throw std::invalid_argument("walls must satisfy 0 <= left_wall < right_wall <= 1");
    }
}

void ServoModel::validate() const {
    if (!(max_step > 0.0)) throw std::invalid_argument("max_step must be > 0");
    if (jitter_bins < 0) throw std::invalid_argument("jitter_bins must be >= 0");
    if (!(overshoot_prob >= 0.0 && overshoot_prob <= 1.0)) {
        throw std::invalid_argument("overshoot_prob must be in [0, 1]");
    }
    if (bins < 2) throw std::invalid_argument("bins must be >= 2");
    if (latency_ticks < 0) throw std::invalid_argument("latency_ticks must be >= 0");
}

double contact_reading(double shoulder_pos, const Workspace& ws) {
    return (shoulder_pos <= ws.left_wall || shoulder_pos >= ws.right_wall) ? ws.contact_high : 0.0;
}

bool is_contact(double contact_raw, const Workspace& ws) {
    return contact_raw > ws.contact_detect_threshold;
}

double normalized_velocity(double displacement, double max_step) {
    return std::clamp(0.5 + 0.5 * displacement / max_step, 0.0, 1.0);
}

std::pair<JointObservation, JointObservation> observation(const ArmState& state) {
    return {JointObservation{state.shoulder_pos, state.shoulder_vel}.clamped(),
            JointObservation{state.elbow_pos, state.elbow_vel}.clamped()};
}

ArmWorld::ArmWorld(ServoModel servo, Workspace ws, ArmState initial)
    : servo_(servo), ws_(ws), state_(initial), rng_(servo.rng_seed) {
    servo_.validate();
    ws_.validate();
    contact_raw_ = contact_reading(state_.shoulder_pos, ws_);
}

int ArmWorld::draw_jitter_bins() {
    if (servo_.jitter_bins == 0) return 0;
    const auto span = static_cast<std::uint64_t>(2 * servo_.jitter_bins + 1);
    return static_cast<int>(rng_() % span) - servo_.jitter_bins;
}

bool ArmWorld::draw_overshoot() {
    if (servo_.overshoot_prob <= 0.0) return false;
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    return u < servo_.overshoot_prob;
}

StepResult ArmWorld::step(double shoulder_command, double elbow_command) {
    shoulder_command = std::clamp(shoulder_command, -1.0, 1.0);
    elbow_command = std::clamp(elbow_command, -1.0, 1.0);
    if (servo_.latency_ticks > 0) {
        pending_.push_back(shoulder_command);
        if (static_cast<int>(pending_.size()) > servo_.latency_ticks) {
            shoulder_command = pending_.front();
            pending_.pop_front();
        } else {
            shoulder_command = 0.0;
        }
    }

    const int sign = (shoulder_command > 0.0) - (shoulder_command < 0.0);
    StepResult out;
    double commanded = shoulder_command * servo_.max_step;
    if (last_shoulder_sign_ != 0 && sign != last_shoulder_sign_) {
        out.jitter = draw_jitter_bins() / static_cast<double>(servo_.bins);
        out.overshoot = draw_overshoot();
        if (out.overshoot) commanded = last_shoulder_sign_ * servo_.max_step;
    }
    last_shoulder_sign_ = sign;

    const double shoulder_before = state_.shoulder_pos;
    state_.shoulder_pos = std::clamp(shoulder_before + commanded + out.jitter, 0.0, 1.0);
    state_.shoulder_vel = normalized_velocity(state_.shoulder_pos - shoulder_before, servo_.max_step);

    const double elbow_before = state_.elbow_pos;
    state_.elbow_pos = std::clamp(elbow_before + elbow_command * servo_.max_step, 0.0, 1.0);
    state_.elbow_vel = normalized_velocity(state_.elbow_pos - elbow_before, servo_.max_step);

    ++state_.tick;
    contact_raw_ = contact_reading(state_.shoulder_pos, ws_);
    out.state = state_;
    out.contact_raw = contact_raw_;
    return out;
}

}  // namespace pavsig
