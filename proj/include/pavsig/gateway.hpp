#pragma once

// Live trials over WebSocket.
//
// A Session is the transport-free protocol state machine. Network handlers
// call on_message(); the tick side calls step(). The two meet only in the
// single-slot command mailbox and in the outbound sink, which must not block.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "json.hpp"
#include "pavsig/harness.hpp"

namespace pavsig {

enum class SessionMode { human, automotion, replay };
enum class SessionStatus { idle, running, ended };

std::string_view session_mode_name(SessionMode m);
std::optional<SessionMode> parse_session_mode(std::string_view s);
std::string_view session_status_name(SessionStatus s);

enum class TickClock {
    realtime,  // one tick per tick_ms on a session thread
    fast,      // session thread, unpaced
    manual,    // no thread; the owner calls step()
};

struct GatewayOptions {
    std::string bind = "127.0.0.1";
    std::uint16_t port = 8765;
    double delay_ms = 0.0;  // token onset delay applied to human trials
    std::filesystem::path log_dir = "gateway_logs";  // empty disables writing
    TickClock clock = TickClock::realtime;
};

// Last writer wins. The tick reads whatever value is current; values are
// clamped to [-1, 1] on the way in so no client can exceed full speed.
class CommandMailbox {
public:
    void put(double v);
    double read() const { return value_.load(std::memory_order_acquire); }
    void reset() { value_.store(0.0, std::memory_order_release); }

private:
    std::atomic<double> value_{0.0};
};

// Thumb-stick pilot: holds the mailbox velocity.
class MailboxPilot final : public Pilot {
public:
    explicit MailboxPilot(const CommandMailbox& box) : box_(box) {}
    double command(std::int64_t, std::span<const Token>) override { return box_.read(); }

private:
    const CommandMailbox& box_;
};

class Session {
public:
    // One JSON text per call. Called from the network thread and the tick
    // thread; implementations must queue and return.
    using Sink = std::function<void(std::string)>;

    Session(std::string id, GatewayOptions opts, Sink sink);
    ~Session();

    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    void on_message(std::string_view text);

    // Advances a running trial by one tick. False once the session is not
    // running.
    bool step();

    // Ends a running trial as aborted (disconnects).
    void abort();
    // abort() plus stopping and joining the tick thread. Idempotent.
    void shutdown();

    const std::string& id() const { return id_; }
    SessionStatus status() const;
    std::optional<SessionMode> mode() const;
    const CommandMailbox& mailbox() const { return mailbox_; }
    // The finished trial, once ended.
    std::optional<TrialLog> last_log() const;

private:
    void handle_start(const nlohmann::json& msg);
    void handle_cmd(const nlohmann::json& msg);
    void handle_reveal();
    void send_error(std::string_view message);
    void end_locked(bool aborted, std::string_view error = {});
    void join_thread();
    void tick_loop();

    std::string id_;
    GatewayOptions opts_;
    Sink sink_;
    CommandMailbox mailbox_;

    mutable std::mutex mu_;
    std::atomic<SessionStatus> status_{SessionStatus::idle};
    std::optional<SessionMode> mode_;
    int next_trial_ = 0;
    bool realtime_ = true;
    std::chrono::nanoseconds period_{};
    bool revealed_ = false;
    std::optional<TrialLog> recorded_;  // replay source
    std::unique_ptr<Pilot> pilot_;
    std::unique_ptr<TrialRunner> runner_;
    std::optional<TrialLog> log_;
    std::string log_text_;
    int last_motions_ = 0;

    std::thread thread_;
    std::atomic<bool> stop_{false};
    std::mutex wake_mu_;
    std::condition_variable wake_;
};

// Accepts WebSocket connections, one Session per connection.
class GatewayServer {
public:
    explicit GatewayServer(GatewayOptions opts);  // binds; port 0 picks a free port
    ~GatewayServer();

    GatewayServer(const GatewayServer&) = delete;
    GatewayServer& operator=(const GatewayServer&) = delete;

    std::uint16_t port() const;
    void run();    // blocks until stop()
    void start();  // run() on a background thread
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Serves until SIGINT or SIGTERM.
void run_gateway(const GatewayOptions& opts);

}  // namespace pavsig
