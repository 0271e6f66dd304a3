#pragma once

// The Pavlovian signalling loop.
//
// Every tick runs in a fixed order:
//   1. observe the arm and the contact sensor
//   2. compute the signalling prediction
//   3. generate a token if contact or prediction > threshold, and dispatch it
//      (immediately, or through the onset delay line for human pilots)
//   4. apply the pilot's command to the arm
//   5. update every learner on the unshifted features with this tick's
//      contact reading as the cumulant

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pavsig/arm_world.hpp"
#include "pavsig/automotion.hpp"
#include "pavsig/gvf.hpp"
#include "pavsig/tilecoder.hpp"

namespace pavsig {

enum class SignalAlgorithm { td0, td_lambda, gtd, la_td };

// "td0", "td-lambda", "gtd", "la-td"
std::string_view algorithm_name(SignalAlgorithm a);
std::optional<SignalAlgorithm> parse_algorithm(std::string_view s);

enum class PilotMode { automotion, human, scripted };

std::string_view pilot_name(PilotMode m);
std::optional<PilotMode> parse_pilot(std::string_view s);

struct SignallingConfig {
    double threshold = 400.0;
    SignalAlgorithm algorithm = SignalAlgorithm::td_lambda;
    double lambda = 0.9;
    int lookahead_bins = 0;
    int trials = 5;
    int motions_per_trial = 50;
    std::uint64_t seed = 1;

    void validate() const;
};

struct WorldConfig {
    double tick_ms = 25.0;
    int bins = 32;
    ServoModel servo;  // rng_seed is derived per trial, the stored value is ignored
    Workspace workspace;
};

struct PilotConfig {
    PilotMode mode = PilotMode::automotion;
    double backoff_bins = 3.0;
    double onset_delay_ms = 0.0;  // token delivery delay for human/scripted pilots
    double reaction_ms = 0.0;     // scripted pilot reaction time
};

struct ExperimentConfig {
    SignallingConfig signalling;
    WorldConfig world;
    PilotConfig pilot;
    std::int64_t max_ticks_per_trial = 2'000'000;

    void validate() const;
};

// ceil(ms / tick_ms), tolerant of representation error in the ratio.
std::int64_t ms_to_ticks(double ms, double tick_ms);

// Servo seed for a trial, derived from the experiment seed.
std::uint64_t trial_seed(std::uint64_t seed, int trial);

enum class TokenCause { contact, prediction };

std::string_view cause_name(TokenCause c);

struct Token {
    std::int64_t tick = 0;
    TokenCause cause = TokenCause::prediction;
    double prediction_value = 0.0;
    int shoulder_bin = 0;

    friend bool operator==(const Token&, const Token&) = default;
};

// Token iff contact or prediction strictly exceeds the threshold; contact
// wins when both hold. tick and shoulder_bin are left for the caller.
std::optional<Token> generate_token(bool contact, double prediction, const SignallingConfig& cfg);

struct TrialEvent {
    std::int64_t tick = 0;
    double shoulder_pos = 0.0;
    double shoulder_vel = 0.0;
    double contact_raw = 0.0;
    double prediction = 0.0;
    int shoulder_bin = 0;
    int query_bin = 0;
    std::optional<Token> token;
    std::vector<std::int64_t> delivered;  // generation ticks of tokens delivered now
    double cmd = 0.0;
    int motion_index = 0;
    std::string phase;
};

struct TrialSummary {
    int trial = 0;
    int contacts_total = 0;  // distinct contact onsets
    int contact_ticks = 0;
    int tokens_total = 0;    // prediction-cause tokens
    int motions = 0;
    std::int64_t duration_ticks = 0;
    bool completed = false;
    std::string weight_checksum;
    ExperimentConfig config;
};

struct TrialLog {
    std::vector<TrialEvent> events;
    TrialSummary summary;
};

// What the signalling side of the learners reports for one tick.
struct SignalReading {
    double value = 0.0;
    int query_bin = 0;
    bool clamped = false;  // the look-ahead shift hit the grid edge
    std::size_t gvf = 0;   // index of the learner consulted
    FeatureVector read;    // the features whose weights were summed
};

// The learners a signalling algorithm needs: one TD GVF (td0, td_lambda,
// la_td) or a pair of direction-targeted GTD GVFs (right, left).
class LearnerBank {
public:
    LearnerBank(SignalAlgorithm algorithm, double lambda, int lookahead_bins, TileLayout layout);

    // heading: current motion, or the most recent one while at rest.
    SignalReading signal(const JointObservation& shoulder, const JointObservation& elbow,
                         Direction heading) const;

    // moving: the motion that produced x_now (rest for none).
    void learn(Cumulant c, const FeatureVector& x_now, Direction moving);

    std::span<const Gvf> gvfs() const { return gvfs_; }
    std::span<Gvf> mutable_gvfs() { return gvfs_; }
    std::string checksum() const;
    std::size_t feature_count() const { return layout_.feature_count(); }

private:
    SignalAlgorithm algorithm_;
    int lookahead_bins_;
    TileLayout layout_;
    std::vector<Gvf> gvfs_;
};

class Pilot {
public:
    virtual ~Pilot() = default;

    // Called once per tick after dispatch with the tokens that reach the
    // pilot on this tick. Returns the shoulder velocity command.
    virtual double command(std::int64_t tick, std::span<const Token> delivered) = 0;

    // Pilots that count their own motions report them here; otherwise the
    // runner counts commanded right-then-left excursions.
    virtual std::optional<int> motions() const { return std::nullopt; }
    virtual std::string_view phase() const { return "manual"; }
};

class AutomotionPilot final : public Pilot {
public:
    explicit AutomotionPilot(AutomotionConfig cfg);

    double command(std::int64_t tick, std::span<const Token> delivered) override;
    std::optional<int> motions() const override { return state_.motions_done; }
    std::string_view phase() const override { return phase_name(state_.phase); }

    const AutomotionState& state() const { return state_; }

private:
    AutomotionConfig cfg_;
    AutomotionState state_;
};

// Human surrogate: the back-off/reverse policy of automotion, reacting to
// each delivered token only after a fixed reaction delay.
class ScriptedPilot final : public Pilot {
public:
    ScriptedPilot(AutomotionConfig cfg, std::int64_t reaction_ticks);

    double command(std::int64_t tick, std::span<const Token> delivered) override;

private:
    AutomotionConfig cfg_;
    AutomotionState state_;
    std::int64_t reaction_ticks_;
    std::deque<std::int64_t> pending_;  // ticks at which a reaction fires
};

// Counts one motion per commanded right excursion followed by a commanded
// left excursion that then turns right again.
class MotionCounter {
public:
    void observe_command(double cmd);
    int motions() const { return motions_; }

private:
    int last_sign_ = 0;
    bool reached_right_ = false;
    int motions_ = 0;
};

// Holds tokens until their delivery tick.
class DelayLine {
public:
    explicit DelayLine(std::int64_t delay_ticks) : delay_ticks_(delay_ticks) {}

    void push(const Token& t) { queue_.push_back(t); }
    // Removes and returns every token due at or before `tick`.
    std::vector<Token> pop_due(std::int64_t tick);
    std::int64_t delay_ticks() const { return delay_ticks_; }

private:
    std::int64_t delay_ticks_;
    std::deque<Token> queue_;
};

AutomotionConfig automotion_config(const ExperimentConfig& cfg);

class TrialRunner {
public:
    TrialRunner(const ExperimentConfig& cfg, int trial, Pilot& pilot);

    bool done() const;
    // Runs one tick and returns its event. Throws std::runtime_error when a
    // learner rejects the features.
    const TrialEvent& step();
    // Tokens handed to the pilot on the most recent tick.
    std::span<const Token> last_delivered() const { return last_delivered_; }
    // What signalling consulted on the most recent tick.
    const SignalReading& last_reading() const { return last_reading_; }

    int motions() const;
    const LearnerBank& learners() const { return learners_; }
    LearnerBank& mutable_learners() { return learners_; }
    const ArmWorld& world() const { return world_; }
    const std::vector<TrialEvent>& events() const { return events_; }

    TrialLog finish() const;

private:
    ExperimentConfig cfg_;
    int trial_;
    Pilot& pilot_;
    TileLayout layout_;
    ArmWorld world_;
    LearnerBank learners_;
    DelayLine delay_;
    MotionCounter counter_;
    Direction heading_ = Direction::rest;
    bool was_contact_ = false;
    int contacts_ = 0;
    int contact_ticks_ = 0;
    int prediction_tokens_ = 0;
    std::vector<Token> last_delivered_;
    SignalReading last_reading_;
    std::vector<TrialEvent> events_;
};

// Pilot for the configured mode (automotion or scripted; human trials are
// driven through the gateway).
std::unique_ptr<Pilot> make_pilot(const ExperimentConfig& cfg);

TrialLog run_trial(const ExperimentConfig& cfg, int trial);
std::vector<TrialLog> run_experiment(const ExperimentConfig& cfg);

// Feeds a recorded command stream. Automotion recordings also drive a shadow
// controller so motion counts and phases are recomputed, not copied, and a
// command that disagrees with the controller throws. The log must outlive
// the pilot.
class ReplayPilot final : public Pilot {
public:
    explicit ReplayPilot(const TrialLog& recorded);

    double command(std::int64_t tick, std::span<const Token> delivered) override;
    std::optional<int> motions() const override;
    std::string_view phase() const override;

private:
    const TrialLog& recorded_;
    std::optional<AutomotionPilot> shadow_;
};

// Re-runs a recorded trial feeding its logged command stream. Throws
// std::runtime_error when the recording is inconsistent with its config.
TrialLog replay_trial(const TrialLog& recorded);

}  // namespace pavsig
