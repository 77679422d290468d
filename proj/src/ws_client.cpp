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

#include "parcelhub/ws_client.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <json.hpp>

#include "parcelhub/error.hpp"

namespace parcelhub {

namespace beast = boost::beast;
namespace net = boost::asio;
namespace bhttp = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

struct WsClient::Impl {
  net::io_context ioc;
  std::optional<websocket::stream<beast::tcp_stream>> ws;
  beast::flat_buffer buffer;
  bool read_pending = false;
  bool read_done = false;
  beast::error_code read_ec;
  bool open = false;
  std::string close_reason;

  // Drives the context until `done` or the deadline.
  bool run_until(const bool& done, std::chrono::milliseconds timeout) {
    auto deadline = std::chrono::steady_clock::now() + timeout;
    ioc.restart();
    while (!done) {
      auto left = deadline - std::chrono::steady_clock::now();
      if (left <= std::chrono::steady_clock::duration::zero()) break;
      if (ioc.run_one_for(left) == 0 && ioc.stopped()) ioc.restart();
    }
    return done;
  }
};

WsClient::WsClient() : impl_(std::make_unique<Impl>()) {}

WsClient::~WsClient() {
  try {
    close();
  } catch (...) {
  }
}

void WsClient::connect(const std::string& host, unsigned short port, const std::string& target,
                       const std::optional<std::string>& bearer, std::chrono::milliseconds timeout) {
  auto& im = *impl_;
  im.ws.emplace(im.ioc);
  im.buffer.clear();
  im.read_pending = im.read_done = false;
  im.close_reason.clear();

  beast::error_code ec;
  tcp::resolver resolver(im.ioc);
  auto endpoints = resolver.resolve(host, std::to_string(port), ec);
  if (ec) throw Error(Errc::service_unreachable, "resolve " + host + ": " + ec.message());

  bool done = false;
  auto& lowest = beast::get_lowest_layer(*im.ws);
  lowest.expires_after(timeout);
  lowest.async_connect(endpoints, [&](beast::error_code e, const tcp::endpoint&) {
    ec = e;
    done = true;
  });
  if (!im.run_until(done, timeout + std::chrono::milliseconds(100)) || ec)
    throw Error(Errc::service_unreachable,
                "connect " + host + ":" + std::to_string(port) + ": " + (ec ? ec.message() : "timeout"));

  if (bearer) {
    std::string header = "Bearer " + *bearer;
    im.ws->set_option(websocket::stream_base::decorator(
        [header](websocket::request_type& req) { req.set(bhttp::field::authorization, header); }));
  }
  websocket::response_type res;
  done = false;
  im.ws->async_handshake(res, host + ":" + std::to_string(port), target, [&](beast::error_code e) {
    ec = e;
    done = true;
  });
  if (!im.run_until(done, timeout + std::chrono::milliseconds(100)))
    throw Error(Errc::service_unreachable, "websocket handshake timed out");
  if (ec) {
    auto body = nlohmann::json::parse(res.body(), nullptr, false);
    if (!body.is_discarded() && body.contains("error")) {
      auto code = body["error"].value("code", "protocol_error");
      auto message = body["error"].value("message", "upgrade declined");
      for (int c = 0; c <= static_cast<int>(Errc::internal); ++c)
        if (to_string(static_cast<Errc>(c)) == code) throw Error(static_cast<Errc>(c), message);
    }
    throw Error(Errc::protocol_error, "websocket upgrade failed: " + ec.message() + " status " +
                                          std::to_string(res.result_int()));
  }
  lowest.expires_never();
  im.ws->text(true);
  im.open = true;
}

void WsClient::send(std::string_view text, std::chrono::milliseconds timeout) {
  auto& im = *impl_;
  if (!im.open) throw Error(Errc::protocol_error, "websocket is not open");
  bool done = false;
  beast::error_code ec;
  im.ws->async_write(net::buffer(text.data(), text.size()), [&](beast::error_code e, std::size_t) {
    ec = e;
    done = true;
  });
  if (!im.run_until(done, timeout)) throw Error(Errc::protocol_error, "websocket write timed out");
  if (ec) {
    im.open = false;
    throw Error(Errc::protocol_error, "websocket write: " + ec.message());
  }
}

std::optional<std::string> WsClient::read(std::chrono::milliseconds timeout) {
  auto& im = *impl_;
  if (!im.ws) throw Error(Errc::protocol_error, "websocket is not open");
  if (!im.read_pending) {
    if (!im.open) throw Error(Errc::protocol_error, "websocket closed");
    im.read_pending = true;
    im.read_done = false;
    im.ws->async_read(im.buffer, [&im](beast::error_code e, std::size_t) {
      im.read_ec = e;
      im.read_done = true;
    });
  }
  if (!im.run_until(im.read_done, timeout)) return std::nullopt;
  im.read_pending = false;
  if (im.read_ec) {
    im.open = false;
    im.close_reason = std::string(im.ws->reason().reason.c_str());
    throw Error(Errc::protocol_error, "websocket read: " + im.read_ec.message());
  }
  auto text = beast::buffers_to_string(im.buffer.data());
  im.buffer.consume(im.buffer.size());
  return text;
}

void WsClient::close() {
  auto& im = *impl_;
  if (!im.ws || !im.open) return;
  im.open = false;
  bool done = false;
  im.ws->async_close(websocket::close_code::normal, [&](beast::error_code) { done = true; });
  im.run_until(done, std::chrono::seconds(1));
  if (im.read_pending) im.run_until(im.read_done, std::chrono::milliseconds(200));
  beast::error_code ec;
  beast::get_lowest_layer(*im.ws).socket().close(ec);
  im.read_pending = false;
}

bool WsClient::is_open() const noexcept { return impl_->open; }

const std::string& WsClient::close_reason() const noexcept { return impl_->close_reason; }

}  // namespace parcelhub
