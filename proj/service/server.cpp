#include "server.hpp"

#include <deque>
#include <map>
#include <mutex>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <spdlog/spdlog.h>

#include "session.hpp"

namespace dchier::service {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

struct Event {
  enum class Kind { Join, Leave, Message } kind;
  ClientId id;
  std::string text;
};

class Inbox {
 public:
  void push(Event e) {
    std::lock_guard lock(mu_);
    queue_.push_back(std::move(e));
  }
  std::deque<Event> drain() {
    std::lock_guard lock(mu_);
    std::deque<Event> out;
    out.swap(queue_);
    return out;
  }

 private:
  std::mutex mu_;
  std::deque<Event> queue_;
};

}  // namespace

class WsSession;

struct Server::Impl {
  Impl(Scenario sc, Backend backend, ServerOptions opt)
      : core(std::move(sc), backend), options(std::move(opt)), acceptor(ioc) {}

  LoopCore core;
  ServerOptions options;
  net::io_context ioc;
  tcp::acceptor acceptor;
  std::map<ClientId, std::weak_ptr<WsSession>> sessions;  // io thread only
  ClientId next_id = 1;
  Inbox inbox;
  std::thread io_thread;
  std::thread sim_thread;
  std::atomic<bool> running{false};
  std::atomic<std::uint64_t> ticks{0};
  std::atomic<std::int64_t> last_tick_ns{0};

  void accept();
  void deliver(std::vector<Outgoing> frames);
  void sim_loop();
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, Server::Impl& owner) : ws_(std::move(socket)), owner_(owner) {}

  void start(http::request<http::string_body> req, ClientId id) {
    id_ = id;
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    auto self = shared_from_this();
    ws_.async_accept(req, [self](beast::error_code ec) {
      if (ec) return;
      self->owner_.sessions[self->id_] = self;
      self->owner_.inbox.push({Event::Kind::Join, self->id_, {}});
      self->read();
    });
  }

  void send(std::shared_ptr<const std::string> text) {
    queue_.push_back(std::move(text));
    // Slow clients lose the oldest queued frames.
    if (queue_.size() > 256) queue_.erase(queue_.begin() + 1);
    if (queue_.size() == 1) write();
  }

  void close() {
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void read() {
    auto self = shared_from_this();
    ws_.async_read(buffer_, [self](beast::error_code ec, std::size_t) {
      if (ec) {
        self->finish();
        return;
      }
      self->owner_.inbox.push({Event::Kind::Message, self->id_, beast::buffers_to_string(self->buffer_.data())});
      self->buffer_.consume(self->buffer_.size());
      self->read();
    });
  }

  void write() {
    auto self = shared_from_this();
    ws_.text(true);
    ws_.async_write(net::buffer(*queue_.front()), [self](beast::error_code ec, std::size_t) {
      if (ec) {
        self->finish();
        return;
      }
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write();
    });
  }

  void finish() {
    if (done_) return;
    done_ = true;
    owner_.sessions.erase(id_);
    owner_.inbox.push({Event::Kind::Leave, id_, {}});
  }

  websocket::stream<beast::tcp_stream> ws_;
  Server::Impl& owner_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  ClientId id_ = 0;
  bool done_ = false;
};

namespace {

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, Server::Impl& owner) : stream_(std::move(socket)), owner_(owner) {}

  void start() {
    auto self = shared_from_this();
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, [self](beast::error_code ec, std::size_t) {
      if (ec) return;
      self->route();
    });
  }

 private:
  void route() {
    if (websocket::is_upgrade(req_)) {
      if (req_.target() == "/sim") {
        stream_.expires_never();
        auto ws = std::make_shared<WsSession>(stream_.release_socket(), owner_);
        ws->start(std::move(req_), owner_.next_id++);
        return;
      }
      respond(http::status::not_found, "unknown websocket endpoint\n");
      return;
    }
    if (req_.method() == http::verb::get && req_.target() == "/healthz") {
      const bool live = owner_.running && owner_.ticks > 0;
      respond(live ? http::status::ok : http::status::service_unavailable, live ? "ok\n" : "starting\n");
      return;
    }
    respond(http::status::not_found, "not found\n");
  }

  void respond(http::status status, std::string body) {
    auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
    res->set(http::field::content_type, "text/plain");
    res->keep_alive(false);
    res->body() = std::move(body);
    res->prepare_payload();
    auto self = shared_from_this();
    http::async_write(stream_, *res, [self, res](beast::error_code, std::size_t) {
      beast::error_code ec;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    });
  }

  beast::tcp_stream stream_;
  Server::Impl& owner_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

void Server::Impl::accept() {
  acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (ec) {
      if (ec != net::error::operation_aborted) spdlog::warn("accept failed: {}", ec.message());
      if (!acceptor.is_open()) return;
    } else {
      std::make_shared<HttpSession>(std::move(socket), *this)->start();
    }
    accept();
  });
}

void Server::Impl::deliver(std::vector<Outgoing> frames) {
  if (frames.empty()) return;
  net::post(ioc, [this, frames = std::move(frames)] {
    for (const Outgoing& f : frames) {
      auto text = std::make_shared<const std::string>(f.text);
      if (f.to) {
        if (auto it = sessions.find(*f.to); it != sessions.end())
          if (auto s = it->second.lock()) s->send(text);
      } else {
        for (auto& [id, weak] : sessions)
          if (auto s = weak.lock()) s->send(text);
      }
    }
  });
}

void Server::Impl::sim_loop() {
  using clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration_cast<clock::duration>(
      std::chrono::duration<double>(core.simulation().scenario().dt));
  auto next = clock::now();
  while (running) {
    std::vector<Outgoing> frames;
    for (Event& e : inbox.drain()) {
      std::vector<Outgoing> out;
      switch (e.kind) {
        case Event::Kind::Join: out = core.on_join(e.id); break;
        case Event::Kind::Leave: out = core.on_leave(e.id); break;
        case Event::Kind::Message: out = core.on_message(e.id, e.text); break;
      }
      frames.insert(frames.end(), std::make_move_iterator(out.begin()), std::make_move_iterator(out.end()));
    }
    try {
      frames.push_back(core.tick());
    } catch (const std::exception& e) {
      spdlog::error("simulation tick failed: {}", e.what());
      frames.push_back({std::nullopt, error_frame(std::string("simulation error: ") + e.what()).dump()});
    }
    deliver(std::move(frames));
    ++ticks;
    last_tick_ns = clock::now().time_since_epoch().count();

    next += period;
    const auto now = clock::now();
    if (next < now - 10 * period) next = now;  // resynchronise after a stall
    std::this_thread::sleep_until(next);
  }
}

Server::Server(Scenario scenario, Backend backend, ServerOptions options) {
  scenario.op.kind = ForceKind::External;
  impl_ = std::make_unique<Impl>(std::move(scenario), backend, std::move(options));
}

Server::~Server() { stop(); }

void Server::start() {
  Impl& s = *impl_;
  const tcp::endpoint ep(net::ip::make_address(s.options.host), s.options.port);
  s.acceptor.open(ep.protocol());
  s.acceptor.set_option(net::socket_base::reuse_address(true));
  beast::error_code ec;
  s.acceptor.bind(ep, ec);
  if (ec) throw std::runtime_error("cannot bind " + s.options.host + ":" + std::to_string(s.options.port) + ": " + ec.message());
  s.acceptor.listen(net::socket_base::max_listen_connections);
  s.running = true;
  s.accept();
  s.io_thread = std::thread([&s] { s.ioc.run(); });
  s.sim_thread = std::thread([&s] { s.sim_loop(); });
  spdlog::info("listening on {}:{}", s.options.host, port());
}

void Server::stop() {
  if (!impl_) return;
  Impl& s = *impl_;
  s.running = false;
  if (s.sim_thread.joinable()) s.sim_thread.join();
  net::post(s.ioc, [&s] {
    beast::error_code ec;
    s.acceptor.close(ec);
    for (auto& [id, weak] : s.sessions)
      if (auto p = weak.lock()) p->close();
  });
  if (s.io_thread.joinable()) {
    // Give closes a moment to flush before tearing the loop down.
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    s.ioc.stop();
    s.io_thread.join();
  }
}

void Server::wait_for_signal() {
  net::io_context sig_ctx;
  net::signal_set signals(sig_ctx, SIGINT, SIGTERM);
  signals.async_wait([](beast::error_code, int) {});
  sig_ctx.run();
}

std::uint16_t Server::port() const {
  beast::error_code ec;
  const auto ep = impl_->acceptor.local_endpoint(ec);
  return ec ? impl_->options.port : ep.port();
}

std::uint64_t Server::ticks() const { return impl_->ticks; }

bool Server::live() const {
  const auto now = std::chrono::steady_clock::now().time_since_epoch().count();
  return impl_->running && impl_->ticks > 0 && now - impl_->last_tick_ns < 1'000'000'000;
}

}  // namespace dchier::service
