#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "pavsig/gateway.hpp"
#include "pavsig/trial_log.hpp"

namespace pavsig {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view session_mode_name(SessionMode m) {
    switch (m) {
        case SessionMode::human: return "human";
        case SessionMode::automotion: return "automotion";
        case SessionMode::replay: return "replay";
    }
    return "?";
}

std::optional<SessionMode> parse_session_mode(std::string_view s) {
    if (s == "human") return SessionMode::human;
    if (s == "automotion") return SessionMode::automotion;
    if (s == "replay") return SessionMode::replay;
    return std::nullopt;
}

std::string_view session_status_name(SessionStatus s) {
    switch (s) {
        case SessionStatus::idle: return "idle";
        case SessionStatus::running: return "running";
        case SessionStatus::ended: return "ended";
    }
    return "?";
}

void CommandMailbox::put(double v) {
    if (std::isnan(v)) return;
    value_.store(std::clamp(v, -1.0, 1.0), std::memory_order_release);
}

Session::Session(std::string id, GatewayOptions opts, Sink sink)
    : id_(std::move(id)), opts_(std::move(opts)), sink_(std::move(sink)) {}

Session::~Session() { shutdown(); }

SessionStatus Session::status() const { return status_.load(); }

std::optional<SessionMode> Session::mode() const {
    std::lock_guard lk(mu_);
    return mode_;
}

std::optional<TrialLog> Session::last_log() const {
    std::lock_guard lk(mu_);
    return log_;
}

void Session::send_error(std::string_view message) {
    ordered_json j;
    j["type"] = "error";
    j["message"] = message;
    sink_(j.dump());
}

void Session::on_message(std::string_view text) {
    json msg;
    try {
        msg = json::parse(text);
    } catch (const json::exception&) {
        send_error("bad message: not JSON");
        return;
    }
    if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
        send_error("bad message: missing type");
        return;
    }
    const auto type = msg["type"].get<std::string>();
    try {
        if (type == "cmd") {
            handle_cmd(msg);
        } else if (type == "start_trial") {
            handle_start(msg);
        } else if (type == "abort") {
            std::lock_guard lk(mu_);
            if (status_ != SessionStatus::running) {
                send_error("not running");
                return;
            }
            end_locked(true);
        } else if (type == "reveal") {
            handle_reveal();
        } else {
            send_error("unknown type '" + type + "'");
        }
    } catch (const json::exception& e) {
        send_error(std::string("bad message: ") + e.what());
    }
}

void Session::handle_cmd(const json& msg) {
    // Lock-free: the tick never waits on command traffic.
    if (status_ != SessionStatus::running) {
        send_error("not running");
        return;
    }
    const auto it = msg.find("v");
    if (it == msg.end() || !it->is_number()) {
        send_error("cmd needs a numeric v");
        return;
    }
    if (mode_ != SessionMode::human) {
        send_error("cmd only drives human trials");
        return;
    }
    mailbox_.put(it->get<double>());
}

void Session::handle_start(const json& msg) {
    if (status_ == SessionStatus::running) {
        send_error("busy");
        return;
    }
    join_thread();  // the previous trial's thread has already left its loop

    std::lock_guard lk(mu_);
    if (status_ == SessionStatus::running) {
        send_error("busy");
        return;
    }

    SessionMode mode = SessionMode::human;
    if (auto it = msg.find("mode"); it != msg.end()) {
        const auto m = it->is_string() ? parse_session_mode(it->get<std::string>()) : std::nullopt;
        if (!m) {
            send_error("unknown mode");
            return;
        }
        mode = *m;
    }

    ExperimentConfig cfg;
    int trial = next_trial_;
    std::optional<TrialLog> recorded;
    try {
        if (mode == SessionMode::replay) {
            const auto it = msg.find("log");
            if (it == msg.end() || !it->is_string()) {
                send_error("replay needs the recorded log as a JSONL string");
                return;
            }
            recorded = parse_jsonl(it->get<std::string>());
            cfg = recorded->summary.config;
            trial = recorded->summary.trial;
        } else {
            const json conf = msg.value("config", json::object());
            if (!conf.is_object()) {
                send_error("config must be an object");
                return;
            }
            cfg = config_from_json(conf);
            if (mode == SessionMode::human) {
                cfg.pilot.mode = PilotMode::human;
                if (!conf.contains("onset_delay_ms")) cfg.pilot.onset_delay_ms = opts_.delay_ms;
            } else {
                cfg.pilot.mode = PilotMode::automotion;
            }
            if (auto t = msg.find("trial"); t != msg.end()) trial = t->get<int>();
        }
        cfg.validate();
    } catch (const std::exception& e) {
        send_error(std::string("bad config: ") + e.what());
        return;
    }

    // Replaying needs the log to outlive its pilot.
    runner_.reset();
    pilot_.reset();
    recorded_ = std::move(recorded);
    switch (mode) {
        case SessionMode::human: pilot_ = std::make_unique<MailboxPilot>(mailbox_); break;
        case SessionMode::automotion:
            pilot_ = std::make_unique<AutomotionPilot>(automotion_config(cfg));
            break;
        case SessionMode::replay: pilot_ = std::make_unique<ReplayPilot>(*recorded_); break;
    }
    runner_ = std::make_unique<TrialRunner>(cfg, trial, *pilot_);
    mailbox_.reset();
    mode_ = mode;
    log_.reset();
    log_text_.clear();
    revealed_ = false;
    last_motions_ = 0;
    if (mode != SessionMode::replay) next_trial_ = trial + 1;
    realtime_ = msg.value("realtime", opts_.clock == TickClock::realtime && mode != SessionMode::replay);
    period_ = std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::duration<double, std::milli>(cfg.world.tick_ms));
    status_ = SessionStatus::running;

    ordered_json ack;
    ack["type"] = "trial_started";
    ack["session"] = id_;
    ack["mode"] = session_mode_name(mode);
    ack["trial"] = trial;
    ack["tick_ms"] = cfg.world.tick_ms;
    ack["motions"] = cfg.signalling.motions_per_trial;
    sink_(ack.dump());

    if (opts_.clock != TickClock::manual) thread_ = std::thread(&Session::tick_loop, this);
}

void Session::handle_reveal() {
    std::lock_guard lk(mu_);
    if (status_ != SessionStatus::ended) {
        send_error("not ended");
        return;
    }
    if (revealed_) {
        send_error("already revealed");
        return;
    }
    ordered_json j;
    j["type"] = "reveal";
    j["trial"] = log_->summary.trial;
    j["log"] = log_text_;
    sink_(j.dump());
    revealed_ = true;
}

bool Session::step() {
    std::lock_guard lk(mu_);
    if (status_ != SessionStatus::running) return false;
    const auto finished = [&] {
        if (recorded_) return runner_->events().size() >= recorded_->events.size();
        return runner_->done();
    };
    try {
        if (!finished()) {
            runner_->step();
            for (const Token& t : runner_->last_delivered()) {
                ordered_json j;
                j["type"] = "token";
                j["cause"] = cause_name(t.cause);
                sink_(j.dump());
            }
            for (const int m = runner_->motions(); last_motions_ < m;) {
                ordered_json j;
                j["type"] = "motion";
                j["index"] = ++last_motions_;
                sink_(j.dump());
            }
        }
        if (finished()) end_locked(false);
    } catch (const std::exception& e) {
        end_locked(true, e.what());
    }
    return status_ == SessionStatus::running;
}

void Session::end_locked(bool aborted, std::string_view error) {
    log_ = runner_->finish();
    log_text_ = to_jsonl(*log_);
    runner_.reset();
    pilot_.reset();
    status_ = SessionStatus::ended;

    std::string save_error;
    if (!opts_.log_dir.empty()) {
        try {
            std::filesystem::create_directories(opts_.log_dir);
            std::ofstream out(opts_.log_dir / (id_ + "_" + log_file_name(log_->summary.trial)),
                              std::ios::binary);
            out << log_text_;
            if (!out) save_error = "cannot write trial log";
        } catch (const std::exception& e) {
            save_error = e.what();
        }
    }

    ordered_json j;
    j["type"] = "trial_end";
    j["contacts"] = log_->summary.contacts_total;
    j["motions"] = log_->summary.motions;
    j["vibrate"] = true;
    j["completed"] = log_->summary.completed;
    j["aborted"] = aborted;
    if (recorded_) j["identical"] = !aborted && log_text_ == to_jsonl(*recorded_);
    if (!error.empty()) j["error"] = error;
    sink_(j.dump());
    if (!save_error.empty()) send_error(save_error);
}

void Session::abort() {
    std::lock_guard lk(mu_);
    if (status_ == SessionStatus::running) end_locked(true);
}

void Session::shutdown() {
    abort();
    stop_ = true;
    {
        std::lock_guard lk(wake_mu_);
    }
    wake_.notify_all();
    join_thread();
}

void Session::join_thread() {
    if (!thread_.joinable()) return;
    if (thread_.get_id() == std::this_thread::get_id()) {
        thread_.detach();  // last owner released from inside the loop
        return;
    }
    thread_.join();
}

void Session::tick_loop() {
    using clock = std::chrono::steady_clock;
    auto next = clock::now();
    while (!stop_) {
        if (!step()) break;
        if (!realtime_) continue;
        next += period_;
        std::unique_lock lk(wake_mu_);
        wake_.wait_until(lk, next, [&] { return stop_.load(); });
    }
}

}  // namespace pavsig
