#pragma once

// Fixed-tick simulation of the shoulder/elbow servos inside a walled
// workspace with an analog contact sensor.

#include <cstdint>
#include <deque>
#include <random>
#include <utility>

#include "pavsig/tilecoder.hpp"

namespace pavsig {

struct ArmState {
    double shoulder_pos = 0.5;
    double shoulder_vel = 0.5;
    double elbow_pos = 0.5;
    double elbow_vel = 0.5;
    std::int64_t tick = 0;

    friend bool operator==(const ArmState&, const ArmState&) = default;
};

struct Workspace {
    double left_wall = 0.05;
    double right_wall = 0.95;
    double contact_high = 1023.0;
    double contact_detect_threshold = 512.0;

    void validate() const;
};

struct ServoModel {
    double max_step = 0.005;      // normalized distance per tick at full command
    int jitter_bins = 0;          // drift bound at a stop or reversal, in bins
    double overshoot_prob = 0.0;  // chance of one more step in the old direction
    std::uint64_t rng_seed = 0;
    int bins = 32;                // bin size used for jitter
    int latency_ticks = 0;        // commands take effect this many ticks late

    void validate() const;
};

struct StepResult {
    ArmState state;
    double contact_raw = 0.0;
    double jitter = 0.0;
    bool overshoot = false;
};

// contact_high inside either wall band, else 0.
double contact_reading(double shoulder_pos, const Workspace& ws);

// Strictly above the detect threshold.
bool is_contact(double contact_raw, const Workspace& ws);

// 0.5 at rest, 1 at full speed right, 0 at full speed left.
double normalized_velocity(double displacement, double max_step);

// (shoulder, elbow) readings as the learners see them.
std::pair<JointObservation, JointObservation> observation(const ArmState& state);

class ArmWorld {
public:
    ArmWorld(ServoModel servo, Workspace ws, ArmState initial = {});

    // Advances one tick. Commands are velocities in [-1, 1] (clamped) and
    // reach the shoulder servo latency_ticks later. Jitter and overshoot
    // apply only on ticks where the applied shoulder direction changes away
    // from a previous nonzero direction.
    StepResult step(double shoulder_command, double elbow_command = 0.0);

    const ArmState& state() const { return state_; }
    double contact_raw() const { return contact_raw_; }
    const ServoModel& servo() const { return servo_; }
    const Workspace& workspace() const { return ws_; }

private:
    int draw_jitter_bins();
    bool draw_overshoot();

    ServoModel servo_;
    Workspace ws_;
    ArmState state_;
    double contact_raw_ = 0.0;
    int last_shoulder_sign_ = 0;
    std::deque<double> pending_;  // commands not yet reaching the servo
    std::mt19937_64 rng_;
};

}  // namespace pavsig
