// Copyright 2026 The ParcelHub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "parcelhub/server.hpp"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/asio/ssl.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/ssl.hpp>
#include <boost/beast/websocket.hpp>
#include <boost/beast/websocket/ssl.hpp>

namespace parcelhub {

namespace {

namespace beast = boost::beast;
namespace net = boost::asio;
namespace ssl = boost::asio::ssl;
namespace bhttp = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

using PlainStream = beast::tcp_stream;
using TlsStream = beast::ssl_stream<beast::tcp_stream>;

template <class Stream>
constexpr bool kIsTls = std::is_same_v<Stream, TlsStream>;

struct Shared {
  Platform& platform;
  Gateway& gateway;
  const ServerOptions& options;
};

// --- websocket -------------------------------------------------------------

template <class Stream>
class WsSession : public std::enable_shared_from_this<WsSession<Stream>> {
 public:
  WsSession(Stream&& stream, Hub& hub, std::size_t queue_limit)
      : ws_(std::move(stream)), hub_(hub), limit_(queue_limit) {}

  void attach(Hub::SessionPtr session) { session_ = std::move(session); }

  void run(bhttp::request<bhttp::string_body> req) {
    beast::get_lowest_layer(ws_).expires_never();
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.text(true);
    ws_.async_accept(req, [self = this->shared_from_this()](beast::error_code ec) {
      if (ec) return self->finish();
      self->do_read();
    });
  }

  // Called from any thread; never blocks on the network.
  bool enqueue(std::string frame) {
    std::lock_guard lock(mutex_);
    if (closing_) return false;
    if (queue_.size() >= limit_) return false;
    queue_.push_back(std::move(frame));
    kick_locked();
    return true;
  }

  void request_close(std::string reason) {
    std::lock_guard lock(mutex_);
    if (closing_) return;
    closing_ = true;
    close_reason_ = std::move(reason);
    queue_.clear();
    kick_locked();
  }

 private:
  void kick_locked() {
    if (busy_) return;
    busy_ = true;
    net::post(ws_.get_executor(), [self = this->shared_from_this()] { self->do_write(); });
  }

  void do_write() {
    std::unique_lock lock(mutex_);
    if (queue_.empty()) {
      if (closing_ && !closed_) {
        closed_ = true;
        websocket::close_reason cr(websocket::close_code::policy_error);
        cr.reason = close_reason_.substr(0, 120);
        lock.unlock();
        ws_.async_close(cr, [self = this->shared_from_this()](beast::error_code) {});
        return;
      }
      busy_ = false;
      return;
    }
    current_ = std::move(queue_.front());
    queue_.pop_front();
    lock.unlock();
    ws_.async_write(net::buffer(current_),
                    [self = this->shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        std::lock_guard l(self->mutex_);
                        self->closing_ = true;
                        self->busy_ = false;
                        return;
                      }
                      self->do_write();
                    });
  }

  void do_read() {
    ws_.async_read(buffer_, [self = this->shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->finish();
      if (self->ws_.got_text() && self->session_) {
        auto text = beast::buffers_to_string(self->buffer_.data());
        self->hub_.on_text(self->session_, text);
      }
      self->buffer_.consume(self->buffer_.size());
      self->do_read();
    });
  }

  void finish() {
    {
      std::lock_guard lock(mutex_);
      closing_ = true;
    }
    if (session_) hub_.close(session_);
  }

  websocket::stream<Stream> ws_;
  Hub& hub_;
  Hub::SessionPtr session_;
  beast::flat_buffer buffer_;
  std::size_t limit_;

  std::mutex mutex_;
  std::deque<std::string> queue_;
  std::string current_;
  std::string close_reason_;
  bool busy_ = false;
  bool closing_ = false;
  bool closed_ = false;
};

// Hands frames to the session once the upgrade completes; frames published
// in between are held here.
template <class Stream>
class WsSink final : public Sink {
 public:
  bool push(std::string frame) override {
    std::lock_guard lock(mutex_);
    if (auto s = session_.lock()) return s->enqueue(std::move(frame));
    if (bound_) return false;
    pending_.push_back(std::move(frame));
    return true;
  }

  void close(std::string_view reason) override {
    std::lock_guard lock(mutex_);
    if (auto s = session_.lock()) s->request_close(std::string(reason));
    else pending_close_ = std::string(reason);
  }

  void bind(const std::shared_ptr<WsSession<Stream>>& s) {
    std::lock_guard lock(mutex_);
    bound_ = true;
    session_ = s;
    for (auto& f : pending_) s->enqueue(std::move(f));
    pending_.clear();
    if (pending_close_) s->request_close(*pending_close_);
  }

 private:
  std::mutex mutex_;
  std::weak_ptr<WsSession<Stream>> session_;
  std::vector<std::string> pending_;
  std::optional<std::string> pending_close_;
  bool bound_ = false;
};

// --- http ------------------------------------------------------------------

std::optional<std::string> websocket_token(const bhttp::request<bhttp::string_body>& req,
                                           const http::Request& parsed) {
  auto auth = req[bhttp::field::authorization];
  if (!auth.empty()) {
    if (auto t = http::parse_bearer(std::string_view(auth.data(), auth.size()))) return t;
  }
  if (auto it = parsed.query.find("token"); it != parsed.query.end()) return it->second;
  return std::nullopt;
}

template <class Stream>
class HttpSession : public std::enable_shared_from_this<HttpSession<Stream>> {
 public:
  HttpSession(Stream&& stream, const Shared& shared) : stream_(std::move(stream)), shared_(shared) {}

  void run() {
    if constexpr (kIsTls<Stream>) {
      beast::get_lowest_layer(stream_).expires_after(shared_.options.idle_timeout);
      stream_.async_handshake(ssl::stream_base::server,
                              [self = this->shared_from_this()](beast::error_code ec) {
                                if (!ec) self->do_read();
                              });
    } else {
      net::dispatch(stream_.get_executor(), [self = this->shared_from_this()] { self->do_read(); });
    }
  }

 private:
  void do_read() {
    parser_.emplace();
    parser_->body_limit(shared_.options.body_limit);
    parser_->header_limit(64 * 1024);
    beast::get_lowest_layer(stream_).expires_after(shared_.options.idle_timeout);
    bhttp::async_read(stream_, buffer_, *parser_,
                      [self = this->shared_from_this()](beast::error_code ec, std::size_t) {
                        self->on_read(ec);
                      });
  }

  void on_read(beast::error_code ec) {
    if (ec == bhttp::error::end_of_stream) return shutdown();
    if (ec == bhttp::error::body_limit) {
      auto r = error_response(Errc::payload_too_large, "request body too large");
      return send(r, 11, false);
    }
    if (ec) return;

    auto req = parser_->release();
    http::Headers headers;
    for (const auto& f : req) headers.emplace(std::string(f.name_string()), std::string(f.value()));
    auto parsed = http::Request::make(std::string(req.method_string()), std::string(req.target()),
                                      std::move(headers), std::move(req.body()));

    if (websocket::is_upgrade(req)) return upgrade(std::move(req), parsed);

    auto response = shared_.gateway.handle(parsed);
    send(response, req.version(), req.keep_alive());
  }

  void upgrade(bhttp::request<bhttp::string_body> req, const http::Request& parsed) {
    auto sink = std::make_shared<WsSink<Stream>>();
    Hub::SessionPtr session;
    try {
      session = shared_.platform.hub().open(parsed.path, websocket_token(req, parsed), sink);
    } catch (const Error& e) {
      return send(error_response(e.code(), e.what()), req.version(), false);
    } catch (const std::exception&) {
      return send(error_response(Errc::internal, "internal error"), req.version(), false);
    }
    auto ws = std::make_shared<WsSession<Stream>>(std::move(stream_), shared_.platform.hub(),
                                                  shared_.options.ws_queue_limit);
    ws->attach(session);
    sink->bind(ws);
    ws->run(std::move(req));
  }

  void send(const http::Response& r, unsigned version, bool keep_alive) {
    auto res = std::make_shared<bhttp::response<bhttp::string_body>>(
        static_cast<bhttp::status>(r.status), version);
    res->set(bhttp::field::server, "parcelhub");
    if (!r.content_type.empty()) res->set(bhttp::field::content_type, r.content_type);
    for (const auto& [k, v] : r.headers) res->set(k, v);
    res->body() = r.body;
    res->keep_alive(keep_alive);
    res->prepare_payload();
    bhttp::async_write(stream_, *res,
                       [self = this->shared_from_this(), res, keep_alive](beast::error_code ec, std::size_t) {
                         if (ec) return;
                         if (!keep_alive) return self->shutdown();
                         self->do_read();
                       });
  }

  void shutdown() {
    if constexpr (kIsTls<Stream>) {
      beast::get_lowest_layer(stream_).expires_after(std::chrono::seconds(5));
      stream_.async_shutdown([self = this->shared_from_this()](beast::error_code) {});
    } else {
      beast::error_code ec;
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    }
  }

  Stream stream_;
  const Shared& shared_;
  beast::flat_buffer buffer_;
  std::optional<bhttp::request_parser<bhttp::string_body>> parser_;
};

}  // namespace

// --- server ----------------------------------------------------------------

struct Server::Impl {
  Impl(Platform& p, Gateway& g, ServerOptions o)
      : options(std::move(o)), shared{p, g, options}, ioc(options.threads), acceptor(ioc) {}

  void accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        if (ec == net::error::operation_aborted) return;
      } else {
        socket.set_option(tcp::no_delay(true));
        if (tls_context) {
          std::make_shared<HttpSession<TlsStream>>(TlsStream(std::move(socket), *tls_context), shared)->run();
        } else {
          std::make_shared<HttpSession<PlainStream>>(PlainStream(std::move(socket)), shared)->run();
        }
      }
      accept();
    });
  }

  ServerOptions options;
  Shared shared;
  net::io_context ioc;
  std::optional<ssl::context> tls_context;
  tcp::acceptor acceptor;
  std::vector<std::thread> threads;
  unsigned short bound_port = 0;
  bool running = false;
};

Server::Server(Platform& platform, Gateway& gateway, ServerOptions options)
    : impl_(std::make_unique<Impl>(platform, gateway, std::move(options))) {}

Server::~Server() { stop(); }

unsigned short Server::start() {
  auto& im = *impl_;
  if (im.running) return im.bound_port;
  if (im.options.tls) {
    im.tls_context.emplace(ssl::context::tls_server);
    im.tls_context->set_options(ssl::context::default_workarounds | ssl::context::no_sslv2 |
                                ssl::context::no_sslv3 | ssl::context::no_tlsv1 |
                                ssl::context::no_tlsv1_1);
    im.tls_context->use_certificate_chain_file(im.options.tls->certificate_chain_file);
    im.tls_context->use_private_key_file(im.options.tls->private_key_file, ssl::context::pem);
  }
  tcp::endpoint ep(net::ip::make_address(im.options.host), im.options.port);
  im.acceptor.open(ep.protocol());
  im.acceptor.set_option(net::socket_base::reuse_address(true));
  im.acceptor.bind(ep);
  im.acceptor.listen(net::socket_base::max_listen_connections);
  im.bound_port = im.acceptor.local_endpoint().port();
  im.accept();
  im.running = true;
  for (int i = 0; i < std::max(1, im.options.threads); ++i) im.threads.emplace_back([&im] { im.ioc.run(); });
  return im.bound_port;
}

void Server::stop() {
  auto& im = *impl_;
  if (!im.running) return;
  im.running = false;
  net::post(im.ioc, [&im] {
    beast::error_code ec;
    im.acceptor.close(ec);
  });
  im.ioc.stop();
  for (auto& t : im.threads)
    if (t.joinable()) t.join();
  im.threads.clear();
}

unsigned short Server::port() const noexcept { return impl_->bound_port; }

// --- maintenance -----------------------------------------------------------

struct Maintenance::Impl {
  Impl(Platform& p, std::chrono::milliseconds d, std::chrono::milliseconds s, ErrorSink e)
      : platform(p), drain_every(d), sweep_every(s), on_error(std::move(e)) {}

  Platform& platform;
  std::chrono::milliseconds drain_every;
  std::chrono::milliseconds sweep_every;
  ErrorSink on_error;
  std::mutex mutex;
  std::condition_variable cv;
  bool stopping = false;
  std::thread thread;

  void loop() {
    using clock = std::chrono::steady_clock;
    auto next_drain = clock::now();
    auto next_sweep = clock::now() + sweep_every;
    std::unique_lock lock(mutex);
    while (!stopping) {
      cv.wait_until(lock, std::min(next_drain, next_sweep), [this] { return stopping; });
      if (stopping) break;
      lock.unlock();
      auto now = clock::now();
      try {
        if (now >= next_drain) {
          platform.drain_outbox();
          next_drain = now + drain_every;
        }
        if (now >= next_sweep) {
          platform.hub().staleness_sweep(platform.clock().now());
          next_sweep = now + sweep_every;
        }
      } catch (const std::exception& e) {
        if (on_error) on_error(e.what());
        next_drain = std::max(next_drain, now + drain_every);
        next_sweep = std::max(next_sweep, now + sweep_every);
      }
      lock.lock();
    }
  }
};

Maintenance::Maintenance(Platform& platform, std::chrono::milliseconds drain_every,
                         std::chrono::milliseconds sweep_every, ErrorSink on_error)
    : impl_(std::make_unique<Impl>(platform, drain_every, sweep_every, std::move(on_error))) {}

Maintenance::~Maintenance() { stop(); }

void Maintenance::start() {
  if (impl_->thread.joinable()) return;
  impl_->stopping = false;
  impl_->thread = std::thread([this] { impl_->loop(); });
}

void Maintenance::stop() {
  {
    std::lock_guard lock(impl_->mutex);
    impl_->stopping = true;
  }
  impl_->cv.notify_all();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace parcelhub
