#include "ave/bridge/server.hpp"

#include <csignal>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "ave/bridge/event_log.hpp"
#include "ave/errors.hpp"

namespace ave::bridge {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using Clock = std::chrono::steady_clock;

std::uint16_t resolve_port(std::optional<int> flag, const char* env_port, int config_port) {
  int port = config_port;
  if (env_port && *env_port) {
    try {
      std::size_t used = 0;
      port = std::stoi(env_port, &used);
      if (used != std::string_view(env_port).size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError(std::string("PORT is not a number: ") + env_port);
    }
  }
  if (flag) port = *flag;
  if (port < 0 || port > 65535) throw ConfigError("port must lie in [0, 65535]");
  return static_cast<std::uint16_t>(port);
}

namespace {

std::string timestamp_id() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%S", &tm);
  return buf;
}

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, const ServerOptions& opts, std::string id)
      : ws_(std::move(socket)), timer_(ws_.get_executor()), opts_(opts), id_(std::move(id)) {}

  void start() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    try {
      session_.emplace(make_session_options(opts_.config, id_), opts_.copilot);
      log_.emplace(std::filesystem::path(opts_.config.serve.log_dir) / (id_ + ".jsonl"));
      log_->header(id_, opts_.checkpoint_label, harness::to_json(opts_.config));
    } catch (const std::exception& e) {
      send(ErrorMsg{e.what()});
      closing_ = true;
      return;
    }
    send(session_->hello());
    send(session_->config());
    read();
    next_ = Clock::now();
    schedule();
  }

  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      shutdown();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    if (log_) log_->incoming(ticks_, text);
    try {
      const WireMessage m = decode(text);
      if (const auto* in = std::get_if<Input>(&m)) {
        pending_input_ = ActionId{in->action};
      } else if (const auto* h = std::get_if<Hello>(&m)) {
        if (h->proto_version != kProtoVersion)
          send(ErrorMsg{"unsupported proto_version " + std::to_string(h->proto_version) + ", server speaks " +
                        std::to_string(kProtoVersion)});
      } else {
        send(ErrorMsg{"unexpected message type '" + std::string(type_name(m)) + "' from client"});
      }
    } catch (const ProtocolError& e) {
      send(ErrorMsg{e.what()});
    }
    read();
  }

  void schedule() {
    const auto period = std::chrono::duration_cast<Clock::duration>(
        std::chrono::duration<double>(1.0 / session_->options().tick_hz));
    next_ += period;
    // After a long stall, resume from now instead of bursting to catch up.
    if (Clock::now() - next_ > 5 * period) next_ = Clock::now();
    timer_.expires_at(next_);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) { self->on_tick(ec); });
  }

  void on_tick(beast::error_code ec) {
    if (ec || closing_) return;
    const auto input = pending_input_;
    pending_input_.reset();
    try {
      auto r = session_->tick(input);
      log_->tick(ticks_, input, r.trained);
      if (r.episode_end) send(*r.episode_end);
      send(r.frame);
    } catch (const std::exception& e) {
      send(ErrorMsg{std::string("session failed: ") + e.what()});
      shutdown();
      return;
    }
    ++ticks_;
    schedule();
  }

  void send(const WireMessage& m) {
    if (log_) log_->outgoing(ticks_, m);
    outbox_.push_back(encode(m));
    if (outbox_.size() == 1) write();
  }

  void write() {
    ws_.text(true);
    ws_.async_write(asio::buffer(outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_write(ec); });
  }

  void on_write(beast::error_code ec) {
    if (ec) {
      shutdown();
      return;
    }
    outbox_.pop_front();
    if (!outbox_.empty()) {
      write();
    } else if (closing_ && ws_.is_open()) {
      ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](beast::error_code) {});
    }
  }

  void shutdown() {
    if (finished_) return;
    finished_ = true;
    closing_ = true;
    timer_.cancel();
    if (log_) log_->flush();
    if (session_) {
      session_->flush();
      if (opts_.on_session_end) opts_.on_session_end(id_, session_->stats());
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  asio::steady_timer timer_;
  const ServerOptions& opts_;
  std::string id_;
  std::optional<Session> session_;
  std::optional<EventLog> log_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  std::optional<ActionId> pending_input_;
  Clock::time_point next_;
  std::uint64_t ticks_ = 0;
  bool closing_ = false;
  bool finished_ = false;
};

}  // namespace

struct Server::Impl {
  explicit Impl(ServerOptions o) : opts(std::move(o)), acceptor(io) {
    opts.config.validate();
    const tcp::endpoint ep(asio::ip::make_address(opts.address), opts.port);
    acceptor.open(ep.protocol());
    acceptor.set_option(asio::socket_base::reuse_address(true));
    acceptor.bind(ep);
    acceptor.listen();
    prefix = timestamp_id();
  }

  void accept() {
    acceptor.async_accept(asio::make_strand(io), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      const std::string id = prefix + "-" + std::to_string(++count);
      std::make_shared<Connection>(std::move(socket), opts, id)->start();
      accept();
    });
  }

  ServerOptions opts;
  asio::io_context io{1};
  tcp::acceptor acceptor;
  std::string prefix;
  int count = 0;
  std::thread thread;
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() { stop(); }

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() {
  impl_->accept();
  std::optional<asio::signal_set> signals;
  if (impl_->opts.stop_on_signals) {
    signals.emplace(impl_->io, SIGINT, SIGTERM);
    signals->async_wait([this](beast::error_code ec, int) {
      if (!ec) impl_->io.stop();
    });
  }
  impl_->io.run();
}

void Server::start() {
  impl_->thread = std::thread([this] { run(); });
}

void Server::stop() {
  impl_->io.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace ave::bridge
