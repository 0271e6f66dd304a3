#include "pavsig/harness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pavsig {

std::string_view algorithm_name(SignalAlgorithm a) {
    switch (a) {
        case SignalAlgorithm::td0: return "td0";
        case SignalAlgorithm::td_lambda: return "td-lambda";
        case SignalAlgorithm::gtd: return "gtd";
        case SignalAlgorithm::la_td: return "la-td";
    }
    return "unknown";
}

std::optional<SignalAlgorithm> parse_algorithm(std::string_view s) {
    if (s == "td0") return SignalAlgorithm::td0;
    if (s == "td-lambda") return SignalAlgorithm::td_lambda;
    if (s == "gtd") return SignalAlgorithm::gtd;
    if (s == "la-td") return SignalAlgorithm::la_td;
    return std::nullopt;
}

std::string_view pilot_name(PilotMode m) {
    switch (m) {
        case PilotMode::automotion: return "automotion";
        case PilotMode::human: return "human";
        case PilotMode::scripted: return "scripted";
    }
    return "unknown";
}

std::optional<PilotMode> parse_pilot(std::string_view s) {
    if (s == "automotion") return PilotMode::automotion;
    if (s == "human") return PilotMode::human;
    if (s == "scripted") return PilotMode::scripted;
    return std::nullopt;
}

std::string_view cause_name(TokenCause c) {
    return c == TokenCause::contact ? "contact" : "prediction";
}

void SignallingConfig::validate() const {
    if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be > 0");
    if (lookahead_bins < 0) throw std::invalid_argument("lookahead_bins must be >= 0");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must be in [0, 1]");
    if (trials <= 0) throw std::invalid_argument("trials must be > 0");
    if (motions_per_trial <= 0) throw std::invalid_argument("motions_per_trial must be > 0");
}

void ExperimentConfig::validate() const {
    signalling.validate();
    world.servo.validate();
    world.workspace.validate();
    TileLayout{world.bins}.validate();
    if (!(world.tick_ms > 0.0)) throw std::invalid_argument("tick_ms must be > 0");
    if (!(pilot.backoff_bins >= 0.0)) throw std::invalid_argument("backoff_bins must be >= 0");
    if (!(pilot.onset_delay_ms >= 0.0) || !(pilot.reaction_ms >= 0.0)) {
        throw std::invalid_argument("delays must be >= 0");
    }
    if (max_ticks_per_trial <= 0) throw std::invalid_argument("max_ticks_per_trial must be > 0");
}

std::int64_t ms_to_ticks(double ms, double tick_ms) {
    if (ms <= 0.0) return 0;
    return static_cast<std::int64_t>(std::ceil(ms / tick_ms - 1e-9));
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
    // splitmix64 finalizer over (seed, trial)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(trial + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::optional<Token> generate_token(bool contact, double prediction, const SignallingConfig& cfg) {
    if (contact) return Token{0, TokenCause::contact, prediction, 0};
    if (prediction > cfg.threshold) return Token{0, TokenCause::prediction, prediction, 0};
    return std::nullopt;
}

// --- learners ---------------------------------------------------------------

LearnerBank::LearnerBank(SignalAlgorithm algorithm, double lambda, int lookahead_bins,
                         TileLayout layout)
    : algorithm_(algorithm),
      lookahead_bins_(algorithm == SignalAlgorithm::la_td ? lookahead_bins : 0),
      layout_(layout) {
    layout_.validate();
    const std::size_t n = layout_.feature_count();
    switch (algorithm) {
        case SignalAlgorithm::td0: gvfs_.emplace_back(GvfConfig::td(0.0), n); break;
        case SignalAlgorithm::td_lambda:
        case SignalAlgorithm::la_td: gvfs_.emplace_back(GvfConfig::td(lambda), n); break;
        case SignalAlgorithm::gtd: {
            GvfConfig right = GvfConfig::gtd(Direction::right);
            GvfConfig left = GvfConfig::gtd(Direction::left);
            right.lambda = left.lambda = lambda;
            gvfs_.emplace_back(right, n);
            gvfs_.emplace_back(left, n);
            break;
        }
    }
}

SignalReading LearnerBank::signal(const JointObservation& shoulder, const JointObservation& elbow,
                                  Direction heading) const {
    SignalReading r;
    const int bins = layout_.bins_per_axis;
    const int here = bin_index(shoulder.position, bins);
    r.query_bin = here;
    if (algorithm_ == SignalAlgorithm::gtd) {
        r.gvf = heading == Direction::left ? 1 : 0;
        r.read = encode(shoulder, elbow, layout_);
        r.value = gvfs_[r.gvf].predict(r.read);
        return r;
    }
    if (lookahead_bins_ > 0) {
        const int wanted = here + sign_of(heading) * lookahead_bins_;
        r.query_bin = std::clamp(wanted, 0, bins - 1);
        r.clamped = r.query_bin != wanted;
        r.read = encode(shift_query(shoulder, heading, lookahead_bins_, layout_), elbow, layout_);
        r.value = gvfs_[0].predict(r.read);
        return r;
    }
    r.read = encode(shoulder, elbow, layout_);
    r.value = gvfs_[0].predict(r.read);
    return r;
}

void LearnerBank::learn(Cumulant c, const FeatureVector& x_now, Direction moving) {
    for (Gvf& g : gvfs_) {
        const int rho = g.config().target_direction ? rho_for(moving, *g.config().target_direction) : 1;
        g.update(c, x_now, rho);
    }
}

std::string LearnerBank::checksum() const {
    std::string out;
    for (const Gvf& g : gvfs_) {
        if (!out.empty()) out += ':';
        out += weight_checksum(g.state());
    }
    return out;
}

// --- pilots -----------------------------------------------------------------

AutomotionPilot::AutomotionPilot(AutomotionConfig cfg) : cfg_(cfg) { cfg_.validate(); }

double AutomotionPilot::command(std::int64_t, std::span<const Token> delivered) {
    auto [cmd, next] = next_command(state_, !delivered.empty(), cfg_);
    state_ = next;
    return cmd;
}

ScriptedPilot::ScriptedPilot(AutomotionConfig cfg, std::int64_t reaction_ticks)
    : cfg_(cfg), reaction_ticks_(reaction_ticks) {
    cfg_.validate();
}

double ScriptedPilot::command(std::int64_t tick, std::span<const Token> delivered) {
    for (std::size_t i = 0; i < delivered.size(); ++i) pending_.push_back(tick + reaction_ticks_);
    bool react = false;
    while (!pending_.empty() && pending_.front() <= tick) {
        react = true;
        pending_.pop_front();
    }
    auto [cmd, next] = next_command(state_, react, cfg_);
    state_ = next;
    return cmd;
}

void MotionCounter::observe_command(double cmd) {
    const int sign = (cmd > 0.0) - (cmd < 0.0);
    if (sign == 0 || sign == last_sign_) return;
    if (last_sign_ > 0 && sign < 0) reached_right_ = true;
    if (last_sign_ < 0 && sign > 0 && reached_right_) {
        ++motions_;
        reached_right_ = false;
    }
    last_sign_ = sign;
}

std::vector<Token> DelayLine::pop_due(std::int64_t tick) {
    std::vector<Token> due;
    while (!queue_.empty() && queue_.front().tick + delay_ticks_ <= tick) {
        due.push_back(queue_.front());
        queue_.pop_front();
    }
    return due;
}

AutomotionConfig automotion_config(const ExperimentConfig& cfg) {
    AutomotionConfig a;
    a.backoff = cfg.pilot.backoff_bins / cfg.world.bins;
    a.step = cfg.world.servo.max_step;
    a.motions_per_trial = cfg.signalling.motions_per_trial;
    return a;
}

// --- runner -----------------------------------------------------------------

namespace {

ServoModel trial_servo(const ExperimentConfig& cfg, int trial) {
    ServoModel s = cfg.world.servo;
    s.bins = cfg.world.bins;
    s.rng_seed = trial_seed(cfg.signalling.seed, trial);
    return s;
}

std::int64_t token_delay_ticks(const ExperimentConfig& cfg) {
    if (cfg.pilot.mode == PilotMode::automotion) return 0;
    return ms_to_ticks(cfg.pilot.onset_delay_ms, cfg.world.tick_ms);
}

}  // namespace

TrialRunner::TrialRunner(const ExperimentConfig& cfg, int trial, Pilot& pilot)
    : cfg_(cfg),
      trial_(trial),
      pilot_(pilot),
      layout_{cfg.world.bins},
      world_(trial_servo(cfg, trial), cfg.world.workspace),
      learners_(cfg.signalling.algorithm, cfg.signalling.lambda, cfg.signalling.lookahead_bins,
                layout_),
      delay_(token_delay_ticks(cfg)) {
    cfg_.validate();
}

int TrialRunner::motions() const { return pilot_.motions().value_or(counter_.motions()); }

bool TrialRunner::done() const {
    return motions() >= cfg_.signalling.motions_per_trial ||
           static_cast<std::int64_t>(events_.size()) >= cfg_.max_ticks_per_trial;
}

const TrialEvent& TrialRunner::step() {
    const std::int64_t tick = world_.state().tick;

    // (1) observe
    const auto [shoulder, elbow] = observation(world_.state());
    const double contact_raw = world_.contact_raw();
    const bool contact = is_contact(contact_raw, cfg_.world.workspace);
    const Direction moving = shoulder.direction();
    if (moving != Direction::rest) heading_ = moving;
    const FeatureVector x = encode(shoulder, elbow, layout_);
    if (x.length != learners_.feature_count()) {
        throw std::runtime_error("trial aborted: feature length " + std::to_string(x.length) +
                                 " != learner length " + std::to_string(learners_.feature_count()));
    }

    // (2) signal
    last_reading_ = learners_.signal(shoulder, elbow, heading_);
    const SignalReading& reading = last_reading_;

    // (3) token and dispatch
    TrialEvent ev;
    ev.tick = tick;
    ev.shoulder_pos = shoulder.position;
    ev.shoulder_vel = shoulder.velocity;
    ev.contact_raw = contact_raw;
    ev.prediction = reading.value;
    ev.shoulder_bin = bin_index(shoulder.position, layout_.bins_per_axis);
    ev.query_bin = reading.query_bin;
    if (auto token = generate_token(contact, reading.value, cfg_.signalling)) {
        token->tick = tick;
        token->shoulder_bin = ev.shoulder_bin;
        ev.token = token;
        delay_.push(*token);
        if (token->cause == TokenCause::prediction) ++prediction_tokens_;
    }
    if (contact) {
        ++contact_ticks_;
        if (!was_contact_) ++contacts_;
    }
    was_contact_ = contact;
    last_delivered_ = delay_.pop_due(tick);
    for (const Token& t : last_delivered_) ev.delivered.push_back(t.tick);

    // (4) act
    const double cmd = std::clamp(pilot_.command(tick, last_delivered_), -1.0, 1.0);
    counter_.observe_command(cmd);
    world_.step(cmd);
    ev.cmd = cmd;
    ev.motion_index = motions();
    ev.phase = std::string(pilot_.phase());

    // (5) learn
    learners_.learn(Cumulant{contact_raw}, x, moving);

    events_.push_back(std::move(ev));
    return events_.back();
}

TrialLog TrialRunner::finish() const {
    TrialLog log;
    log.events = events_;
    TrialSummary& s = log.summary;
    s.trial = trial_;
    s.contacts_total = contacts_;
    s.contact_ticks = contact_ticks_;
    s.tokens_total = prediction_tokens_;
    s.motions = motions();
    s.duration_ticks = static_cast<std::int64_t>(events_.size());
    s.completed = motions() >= cfg_.signalling.motions_per_trial;
    s.weight_checksum = learners_.checksum();
    s.config = cfg_;
    return log;
}

std::unique_ptr<Pilot> make_pilot(const ExperimentConfig& cfg) {
    switch (cfg.pilot.mode) {
        case PilotMode::automotion: return std::make_unique<AutomotionPilot>(automotion_config(cfg));
        case PilotMode::scripted:
            return std::make_unique<ScriptedPilot>(
                automotion_config(cfg), ms_to_ticks(cfg.pilot.reaction_ms, cfg.world.tick_ms));
        case PilotMode::human:
            throw std::invalid_argument("human trials are driven through the gateway");
    }
    throw std::invalid_argument("unknown pilot mode");
}

TrialLog run_trial(const ExperimentConfig& cfg, int trial) {
    auto pilot = make_pilot(cfg);
    TrialRunner runner(cfg, trial, *pilot);
    while (!runner.done()) runner.step();
    return runner.finish();
}

std::vector<TrialLog> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<TrialLog> logs;
    logs.reserve(static_cast<std::size_t>(cfg.signalling.trials));
    for (int t = 0; t < cfg.signalling.trials; ++t) logs.push_back(run_trial(cfg, t));
    return logs;
}

// --- replay -----------------------------------------------------------------

ReplayPilot::ReplayPilot(const TrialLog& recorded) : recorded_(recorded) {
    if (recorded.summary.config.pilot.mode == PilotMode::automotion) {
        shadow_.emplace(automotion_config(recorded.summary.config));
    }
}

double ReplayPilot::command(std::int64_t tick, std::span<const Token> delivered) {
    const auto i = static_cast<std::size_t>(tick);
    if (i >= recorded_.events.size()) {
        throw std::runtime_error("replay ran past the recorded command stream");
    }
    const double cmd = recorded_.events[i].cmd;
    if (shadow_) {
        const double expected = shadow_->command(tick, delivered);
        if (expected != cmd) {
            throw std::runtime_error("replay diverged from the automotion controller at tick " +
                                     std::to_string(tick));
        }
    }
    return cmd;
}

std::optional<int> ReplayPilot::motions() const {
    if (shadow_) return shadow_->motions();
    return std::nullopt;
}

std::string_view ReplayPilot::phase() const { return shadow_ ? shadow_->phase() : "manual"; }

TrialLog replay_trial(const TrialLog& recorded) {
    const ExperimentConfig& cfg = recorded.summary.config;
    ReplayPilot pilot(recorded);
    TrialRunner runner(cfg, recorded.summary.trial, pilot);
    const std::size_t n = recorded.events.size();
    while (runner.events().size() < n) runner.step();
    return runner.finish();
}

}  // namespace pavsig
