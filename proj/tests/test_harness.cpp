#include <cmath>
#include <set>

#include <stdexcept>

#include "doctest.h"
#include "pavsig/harness.hpp"
#include "pavsig/trial_log.hpp"

using namespace pavsig;

namespace {

ExperimentConfig small_config(SignalAlgorithm algo, int motions = 5) {
    ExperimentConfig cfg;
    cfg.signalling.algorithm = algo;
    cfg.signalling.lookahead_bins = algo == SignalAlgorithm::la_td ? 2 : 0;
    cfg.signalling.motions_per_trial = motions;
    cfg.signalling.trials = 2;
    return cfg;
}

// A pilot that plays a fixed command forever.
class ConstantPilot final : public Pilot {
public:
    explicit ConstantPilot(double v) : v_(v) {}
    double command(std::int64_t, std::span<const Token> d) override {
        seen.insert(seen.end(), d.begin(), d.end());
        return v_;
    }
    std::vector<Token> seen;

private:
    double v_;
};

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("generate_token examples") {
    const SignallingConfig cfg{};
    CHECK_FALSE(generate_token(false, 400.0, cfg).has_value());
    const auto t = generate_token(false, 400.1, cfg);
    REQUIRE(t);
    CHECK(t->cause == TokenCause::prediction);
    const auto c = generate_token(true, 0.0, cfg);
    REQUIRE(c);
    CHECK(c->cause == TokenCause::contact);
    CHECK(generate_token(true, 900.0, cfg)->cause == TokenCause::contact);
    CHECK_FALSE(generate_token(false, -5.0, cfg).has_value());
}

TEST_CASE("ms_to_ticks rounds up") {
    for (int ms = 0; ms <= 1000; ++ms) {
        for (double tick : {25.0, 10.0, 7.5}) {
            // Oracle: smallest n with n * tick >= ms.
            std::int64_t n = 0;
            while (static_cast<double>(n) * tick < ms - 1e-9) ++n;
            REQUIRE(ms_to_ticks(ms, tick) == n);
        }
    }
    CHECK(ms_to_ticks(100, 25) == 4);
    CHECK(ms_to_ticks(150, 25) == 6);
    CHECK(ms_to_ticks(0, 25) == 0);
}

TEST_CASE("trial seeds differ per trial and repeat per seed") {
    std::set<std::uint64_t> seen;
    for (int t = 0; t < 100; ++t) seen.insert(trial_seed(1, t));
    CHECK(seen.size() == 100);
    CHECK(trial_seed(7, 3) == trial_seed(7, 3));
    CHECK(trial_seed(7, 3) != trial_seed(8, 3));
}

TEST_CASE("delay line") {
    DelayLine d(4);
    d.push(Token{10, TokenCause::prediction, 500, 3});
    d.push(Token{11, TokenCause::contact, 0, 30});
    CHECK(d.pop_due(13).empty());
    auto a = d.pop_due(14);
    REQUIRE(a.size() == 1);
    CHECK(a[0].tick == 10);
    CHECK(d.pop_due(15).size() == 1);
    DelayLine zero(0);
    zero.push(Token{3});
    CHECK(zero.pop_due(3).size() == 1);
}

TEST_CASE("motion counter") {
    MotionCounter m;
    for (double c : {1.0, 1.0, 0.0, -1.0, -1.0}) m.observe_command(c);
    CHECK(m.motions() == 0);
    m.observe_command(1.0);
    CHECK(m.motions() == 1);
    m.observe_command(-1.0);
    m.observe_command(0.0);
    m.observe_command(1.0);
    CHECK(m.motions() == 2);
}

TEST_CASE("cold start tick") {
    const auto cfg = small_config(SignalAlgorithm::td_lambda);
    AutomotionPilot pilot(automotion_config(cfg));
    TrialRunner r(cfg, 0, pilot);
    const TrialEvent ev = r.step();
    CHECK(ev.tick == 0);
    CHECK(ev.prediction == 0.0);
    CHECK_FALSE(ev.token.has_value());
    CHECK(ev.cmd == 1.0);
    for (const Gvf& g : r.learners().gvfs()) {
        for (double w : g.state().w) REQUIRE(w == 0.0);
    }
}

TEST_CASE("a contact tick emits a contact token and feeds C = 1023") {
    auto cfg = small_config(SignalAlgorithm::td_lambda);
    ConstantPilot pilot(1.0);
    TrialRunner r(cfg, 0, pilot);
    // Drive right until the wall band; the first contact tick must carry the token.
    const TrialEvent* hit = nullptr;
    for (int t = 0; t < 200 && !hit; ++t) {
        const TrialEvent& ev = r.step();
        if (ev.contact_raw > 0) hit = &ev;
    }
    REQUIRE(hit != nullptr);
    CHECK(hit->contact_raw == 1023.0);
    REQUIRE(hit->token);
    CHECK(hit->token->cause == TokenCause::contact);
    CHECK(hit->delivered.size() == 1);
    // Learning used C = 1023: the pre-contact tiles now carry weight.
    const auto& w = r.learners().gvfs()[0].state().w;
    double total = 0;
    for (double v : w) total += v;
    CHECK(total > 0.0);
    const TrialEvent& next = r.step();
    CHECK(next.prediction > 0.0);
}

TEST_CASE("token iff contact or prediction above threshold, every tick") {
    for (auto algo : {SignalAlgorithm::td0, SignalAlgorithm::td_lambda, SignalAlgorithm::gtd,
                      SignalAlgorithm::la_td}) {
        auto cfg = small_config(algo, 10);
        cfg.world.servo.jitter_bins = 1;
        const auto log = run_trial(cfg, 0);
        for (const auto& ev : log.events) {
            const bool contact = ev.contact_raw > 512.0;
            REQUIRE(ev.token.has_value() == (contact || ev.prediction > 400.0));
            if (ev.token && ev.token->cause == TokenCause::prediction) {
                REQUIRE(ev.token->prediction_value > 400.0);
                REQUIRE_FALSE(contact);
            }
        }
    }
}

TEST_CASE("look-ahead token fires two bins early on a scripted trajectory") {
    auto cfg = small_config(SignalAlgorithm::la_td);
    ConstantPilot pilot(1.0);
    TrialRunner r(cfg, 0, pilot);
    // Weights high only at bin 30 for full-speed-right velocity.
    auto& w = r.mutable_learners().mutable_gvfs()[0].mutable_state().w;
    const int vb = bin_index(1.0, 32);
    w[static_cast<std::size_t>(30 * 32 + vb)] = 1000.0;

    std::optional<TrialEvent> first;
    for (int t = 0; t < 400 && !first; ++t) {
        const TrialEvent& ev = r.step();
        if (ev.token) first = ev;
        if (ev.shoulder_bin < 28 && ev.shoulder_vel == 1.0) REQUIRE(ev.prediction == 0.0);
    }
    REQUIRE(first);
    CHECK(first->token->cause == TokenCause::prediction);
    CHECK(first->shoulder_bin == 28);
    CHECK(first->query_bin == 30);
    CHECK(first->prediction == 1000.0);
}

TEST_CASE("learning uses unshifted features under look-ahead") {
    auto cfg = small_config(SignalAlgorithm::la_td, 3);
    auto plain = cfg;
    plain.signalling.algorithm = SignalAlgorithm::td_lambda;
    plain.signalling.lookahead_bins = 0;
    // Same command stream: constant right drive into the wall and beyond.
    ConstantPilot p1(1.0), p2(1.0);
    TrialRunner a(cfg, 0, p1), b(plain, 0, p2);
    for (int t = 0; t < 300; ++t) {
        a.step();
        b.step();
    }
    CHECK(a.learners().checksum() == b.learners().checksum());
}

TEST_CASE("reading reports the tiles it summed") {
    auto cfg = small_config(SignalAlgorithm::la_td, 20);
    cfg.world.servo.jitter_bins = 1;
    AutomotionPilot pilot(automotion_config(cfg));
    TrialRunner r(cfg, 0, pilot);
    while (!r.done()) {
        // Snapshot weights as signalling will see them.
        const auto w = r.learners().gvfs()[0].state().w;
        const TrialEvent& ev = r.step();
        const auto& read = r.last_reading().read;
        double sum = 0;
        for (auto i : read.indices()) sum += w[i];
        REQUIRE(sum == ev.prediction);
        REQUIRE(static_cast<int>(read.shoulder() / 32) == ev.query_bin);
    }
}

TEST_CASE("gtd consults the heading-matched learner") {
    auto cfg = small_config(SignalAlgorithm::gtd, 3);
    AutomotionPilot pilot(automotion_config(cfg));
    TrialRunner r(cfg, 0, pilot);
    CHECK(r.learners().gvfs().size() == 2);
    bool saw_left = false;
    while (!r.done()) {
        const TrialEvent& ev = r.step();
        const std::size_t expect = ev.shoulder_vel < 0.5 ? 1 : (ev.shoulder_vel > 0.5 ? 0 : r.last_reading().gvf);
        REQUIRE(r.last_reading().gvf == expect);
        saw_left = saw_left || r.last_reading().gvf == 1;
    }
    CHECK(saw_left);
}

TEST_CASE("run_experiment produces the requested trials and motions") {
    auto cfg = small_config(SignalAlgorithm::td_lambda, 4);
    cfg.signalling.trials = 3;
    const auto logs = run_experiment(cfg);
    REQUIRE(logs.size() == 3);
    for (int t = 0; t < 3; ++t) {
        CHECK(logs[t].summary.trial == t);
        CHECK(logs[t].summary.motions == 4);
        CHECK(logs[t].summary.completed);
        CHECK(logs[t].events.back().motion_index == 4);
    }
    auto one = cfg;
    one.signalling.motions_per_trial = 1;
    one.signalling.trials = 1;
    const auto l1 = run_experiment(one);
    CHECK(l1.at(0).summary.motions == 1);
}

TEST_CASE("ticks strictly increase and contacts count onsets") {
    auto cfg = small_config(SignalAlgorithm::td0, 10);
    cfg.world.servo.jitter_bins = 1;
    const auto log = run_trial(cfg, 1);
    int onsets = 0, contact_ticks = 0, tokens = 0;
    bool was = false;
    for (std::size_t i = 0; i < log.events.size(); ++i) {
        const auto& ev = log.events[i];
        REQUIRE(ev.tick == static_cast<std::int64_t>(i));
        const bool c = ev.token && ev.token->cause == TokenCause::contact;
        onsets += c && !was;
        contact_ticks += c;
        tokens += ev.token && ev.token->cause == TokenCause::prediction;
        was = c;
    }
    CHECK(log.summary.contacts_total == onsets);
    CHECK(log.summary.contact_ticks == contact_ticks);
    CHECK(log.summary.tokens_total == tokens);
    CHECK(log.summary.duration_ticks == static_cast<std::int64_t>(log.events.size()));
}

TEST_CASE("weights reset across trials and persist within one") {
    auto cfg = small_config(SignalAlgorithm::td_lambda, 6);
    cfg.signalling.trials = 2;
    cfg.world.servo.jitter_bins = 0;
    const auto logs = run_experiment(cfg);
    // Jitter-free trials are identical only if each starts naive.
    REQUIRE(logs[0].events.size() == logs[1].events.size());
    for (std::size_t i = 0; i < logs[0].events.size(); ++i) {
        REQUIRE(event_to_json(logs[0].events[i]) == event_to_json(logs[1].events[i]));
    }
    CHECK(logs[0].summary.weight_checksum == logs[1].summary.weight_checksum);
    // Within a trial, the first contact leaves lasting weight.
    bool later_nonzero = false;
    bool after_contact = false;
    for (const auto& ev : logs[0].events) {
        if (after_contact && ev.prediction > 0) later_nonzero = true;
        if (ev.contact_raw > 0) after_contact = true;
    }
    CHECK(later_nonzero);
}

TEST_CASE("same seed and config give byte-identical logs") {
    auto cfg = small_config(SignalAlgorithm::gtd, 8);
    cfg.world.servo.jitter_bins = 1;
    cfg.world.servo.overshoot_prob = 0.3;
    cfg.signalling.seed = 42;
    CHECK(to_jsonl(run_trial(cfg, 2)) == to_jsonl(run_trial(cfg, 2)));
    auto other = cfg;
    other.signalling.seed = 43;
    CHECK(to_jsonl(run_trial(cfg, 2)) != to_jsonl(run_trial(other, 2)));
}

TEST_CASE("onset delay postpones delivery for non-automotion pilots") {
    auto cfg = small_config(SignalAlgorithm::td_lambda, 3);
    cfg.pilot.mode = PilotMode::scripted;
    cfg.pilot.onset_delay_ms = 100;
    ConstantPilot pilot(1.0);
    TrialRunner r(cfg, 0, pilot);
    std::vector<TrialEvent> evs;
    for (int t = 0; t < 200; ++t) evs.push_back(r.step());
    for (const auto& ev : evs) {
        for (auto gen : ev.delivered) REQUIRE(ev.tick - gen == 4);
    }
    CHECK_FALSE(pilot.seen.empty());
}

TEST_CASE("scripted pilot reacts after its reaction delay") {
    AutomotionConfig a;
    ScriptedPilot p(a, 6);
    const Token tok{5};
    CHECK(p.command(5, std::span<const Token>(&tok, 1)) == 1.0);
    for (std::int64_t t = 6; t < 11; ++t) CHECK(p.command(t, {}) == 1.0);
    CHECK(p.command(11, {}) == -1.0);
}

TEST_CASE("replay reproduces automotion and scripted logs") {
    for (auto mode : {PilotMode::automotion, PilotMode::scripted}) {
        auto cfg = small_config(SignalAlgorithm::la_td, 6);
        cfg.world.servo.jitter_bins = 1;
        cfg.pilot.mode = mode;
        cfg.pilot.onset_delay_ms = mode == PilotMode::scripted ? 100 : 0;
        cfg.pilot.reaction_ms = 150;
        const auto log = run_trial(cfg, 1);
        const auto replayed = replay_trial(parse_jsonl(to_jsonl(log)));
        CHECK(to_jsonl(replayed) == to_jsonl(log));
    }
}

TEST_CASE("replay rejects a tampered automotion command stream") {
    auto cfg = small_config(SignalAlgorithm::td_lambda, 3);
    auto log = run_trial(cfg, 0);
    log.events[10].cmd = -log.events[10].cmd;
    CHECK_THROWS_AS(replay_trial(log), std::runtime_error);
}

TEST_CASE("feature length mismatch aborts with a diagnostic") {
    GvfState st(64);
    CHECK_THROWS_AS(td_update(st, GvfConfig::td(0.9), {0}, encode({}, {}, TileLayout{})),
                    std::out_of_range);
}

TEST_CASE("config validation and names") {
    ExperimentConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.signalling.threshold = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = ExperimentConfig{};
    cfg.signalling.lookahead_bins = -1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    for (auto a : {SignalAlgorithm::td0, SignalAlgorithm::td_lambda, SignalAlgorithm::gtd,
                   SignalAlgorithm::la_td}) {
        CHECK(parse_algorithm(algorithm_name(a)) == a);
    }
    CHECK_FALSE(parse_algorithm("sarsa"));
    CHECK(parse_pilot("scripted") == PilotMode::scripted);
    ExperimentConfig human;
    human.pilot.mode = PilotMode::human;
    CHECK_THROWS_AS(make_pilot(human), std::invalid_argument);
}

}
