#include <csignal>
#include <deque>
#include <iostream>
#include <vector>

#include <pthread.h>

#include <boost/asio/dispatch.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "pavsig/gateway.hpp"

namespace pavsig {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

constexpr std::size_t kMaxMessage = 64u << 20;  // replay uploads carry a whole log

class Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(tcp::socket socket, GatewayOptions opts, std::string id,
               std::function<void(std::shared_ptr<Session>)> registered)
        : ws_(std::move(socket)), opts_(std::move(opts)), id_(std::move(id)),
          registered_(std::move(registered)) {}

    ~Connection() {
        if (session_) session_->shutdown();
    }

    void start() {
        net::dispatch(ws_.get_executor(), [self = shared_from_this()] { self->accept(); });
    }

private:
    void accept() {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.read_message_max(kMaxMessage);
        ws_.text(true);
        ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
            if (ec) return;
            self->open();
        });
    }

    void open() {
        std::weak_ptr<Connection> weak = weak_from_this();
        session_ = std::make_shared<Session>(id_, opts_, [weak](std::string msg) {
            // Runs on the tick thread too; only ever queues.
            if (auto self = weak.lock()) {
                net::post(self->ws_.get_executor(),
                          [self, m = std::move(msg)]() mutable { self->enqueue(std::move(m)); });
            }
        });
        if (registered_) registered_(session_);
        read();
    }

    void read() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->closed_ = true;
                self->session_->abort();
                return;
            }
            const std::string text = beast::buffers_to_string(self->buffer_.data());
            self->buffer_.consume(self->buffer_.size());
            self->session_->on_message(text);
            self->read();
        });
    }

    void enqueue(std::string msg) {
        if (closed_) return;
        outbox_.push_back(std::move(msg));
        if (outbox_.size() == 1) write();
    }

    void write() {
        ws_.async_write(net::buffer(outbox_.front()),
                        [self = shared_from_this()](beast::error_code ec, std::size_t) {
                            if (ec) {
                                self->closed_ = true;
                                self->outbox_.clear();
                                return;
                            }
                            self->outbox_.pop_front();
                            if (!self->outbox_.empty()) self->write();
                        });
    }

    websocket::stream<beast::tcp_stream> ws_;
    GatewayOptions opts_;
    std::string id_;
    std::function<void(std::shared_ptr<Session>)> registered_;
    std::shared_ptr<Session> session_;
    beast::flat_buffer buffer_;
    std::deque<std::string> outbox_;
    bool closed_ = false;
};

}  // namespace

struct GatewayServer::Impl {
    explicit Impl(GatewayOptions o) : opts(std::move(o)), acceptor(ioc) {
        const tcp::endpoint ep(net::ip::make_address(opts.bind), opts.port);
        acceptor.open(ep.protocol());
        acceptor.set_option(net::socket_base::reuse_address(true));
        acceptor.bind(ep);
        acceptor.listen(net::socket_base::max_listen_connections);
    }

    void accept() {
        acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
            if (!acceptor.is_open()) return;
            if (!ec) {
                auto conn = std::make_shared<Connection>(
                    std::move(socket), opts, "s" + std::to_string(++next_id),
                    [this](std::shared_ptr<Session> s) {
                        std::lock_guard lk(mu);
                        sessions.push_back(s);
                    });
                conn->start();
            }
            accept();
        });
    }

    GatewayOptions opts;
    net::io_context ioc;
    tcp::acceptor acceptor;
    std::thread thread;
    int next_id = 0;
    std::mutex mu;
    std::vector<std::weak_ptr<Session>> sessions;
};

GatewayServer::GatewayServer(GatewayOptions opts) : impl_(std::make_unique<Impl>(std::move(opts))) {}

GatewayServer::~GatewayServer() { stop(); }

std::uint16_t GatewayServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void GatewayServer::run() {
    impl_->accept();
    impl_->ioc.run();
}

void GatewayServer::start() {
    impl_->thread = std::thread([this] { run(); });
}

void GatewayServer::stop() {
    // Tick threads first, so nothing posts into a stopping io_context.
    std::vector<std::shared_ptr<Session>> live;
    {
        std::lock_guard lk(impl_->mu);
        for (auto& w : impl_->sessions) {
            if (auto s = w.lock()) live.push_back(std::move(s));
        }
        impl_->sessions.clear();
    }
    for (auto& s : live) s->shutdown();
    live.clear();
    net::post(impl_->ioc, [impl = impl_.get()] {
        beast::error_code ec;
        impl->acceptor.close(ec);
    });
    impl_->ioc.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

void run_gateway(const GatewayOptions& opts) {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);  // inherited by every thread below

    GatewayServer server(opts);
    server.start();
    std::cout << "listening on ws://" << opts.bind << ":" << server.port() << "\n" << std::flush;
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
}

}  // namespace pavsig
