#include "forge/server.hpp"

#include <deque>
#include <iostream>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace forge {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

using gateway::Gateway;
using gateway::HttpRequest;
using gateway::HttpResponse;
using gateway::Platform;

HttpRequest to_request(const http::request<http::string_body>& req) {
  HttpRequest out;
  out.method = std::string(req.method_string());
  out.target = std::string(req.target());
  for (const auto& field : req) {
    std::string name(field.name_string());
    for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.headers[name] = std::string(field.value());
  }
  out.body = req.body();
  return out;
}

http::response<http::string_body> to_response(const HttpResponse& r, unsigned version, bool keep_alive) {
  http::response<http::string_body> res{static_cast<http::status>(r.status), version};
  res.set(http::field::content_type, r.content_type);
  res.set(http::field::cache_control, "no-store");
  res.keep_alive(keep_alive);
  res.body() = r.body;
  res.prepare_payload();
  return res;
}

class LiveConnection : public std::enable_shared_from_this<LiveConnection> {
 public:
  LiveConnection(tcp::socket&& socket, Platform& platform)
      : ws_(std::move(socket)), platform_(platform) {}

  void run(http::request<http::string_body> req, std::string participant_id) {
    participant_ = std::move(participant_id);
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(gateway::kMaxBodyBytes);
    ws_.async_accept(req, beast::bind_front_handler(&LiveConnection::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    std::weak_ptr<LiveConnection> weak = shared_from_this();
    auto executor = ws_.get_executor();
    id_ = platform_.connect(participant_, [weak, executor](const nlohmann::json& frame) {
      asio::post(executor, [weak, text = frame.dump()]() mutable {
        if (auto self = weak.lock()) self->enqueue(std::move(text));
      });
    });
    connected_ = true;
    read();
  }

  void read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&LiveConnection::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return close();
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    platform_.receive(id_, text);
    read();
  }

  void enqueue(std::string text) {
    if (closed_) return;
    outbox_.push_back(std::move(text));
    if (outbox_.size() == 1) write();
  }

  void write() {
    ws_.text(true);
    ws_.async_write(asio::buffer(outbox_.front()),
                    beast::bind_front_handler(&LiveConnection::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) return close();
    outbox_.pop_front();
    if (!outbox_.empty()) write();
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    if (connected_) platform_.disconnect(id_);
  }

  websocket::stream<beast::tcp_stream> ws_;
  Platform& platform_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  std::string participant_;
  gateway::ConnectionId id_ = 0;
  bool connected_ = false;
  bool closed_ = false;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket&& socket, Platform& platform, Gateway& gateway)
      : stream_(std::move(socket)), platform_(platform), gateway_(gateway) {}

  void run() {
    asio::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpConnection::read, shared_from_this()));
  }

 private:
  void read() {
    parser_.emplace();
    parser_->body_limit(gateway::kMaxBodyBytes);
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, *parser_,
                     beast::bind_front_handler(&HttpConnection::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) return shutdown();
    if (ec == http::error::body_limit) {
      auto res = gateway::error_response(Error(ErrorCode::PayloadTooLarge, "request body exceeds 64 KiB"));
      return send(to_response(res, 11, false));
    }
    if (ec) return;

    auto req = parser_->release();
    if (websocket::is_upgrade(req)) return upgrade(std::move(req));
    auto res = gateway_.route(to_request(req));
    send(to_response(res, req.version(), req.keep_alive()));
  }

  void upgrade(http::request<http::string_body> req) {
    auto [path, query] = gateway::split_target(std::string(req.target()));
    if (path != "/live") {
      auto res = gateway::error_response(Error(ErrorCode::NotFound, "no realtime endpoint at " + path));
      return send(to_response(res, req.version(), false));
    }
    std::string code(req["X-Auth-Code"]);
    if (code.empty())
      if (auto it = query.find("code"); it != query.end()) code = it->second;
    std::string participant;
    try {
      participant = platform_.authenticate(code);
    } catch (const Error& e) {
      return send(to_response(gateway::error_response(e), req.version(), false));
    }
    stream_.expires_never();
    std::make_shared<LiveConnection>(stream_.release_socket(), platform_)->run(std::move(req), participant);
  }

  void send(http::response<http::string_body> res) {
    auto shared = std::make_shared<http::response<http::string_body>>(std::move(res));
    http::async_write(stream_, *shared, [self = shared_from_this(), shared](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (shared->need_eof()) return self->shutdown();
      self->read();
    });
  }

  void shutdown() {
    beast::error_code ec;
    stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
  Platform& platform_;
  Gateway& gateway_;
};

}  // namespace

struct Server::Impl {
  Impl(Platform& p, Gateway& g, ServerConfig c)
      : platform(p), gateway(g), config(std::move(c)), acceptor(io), ticker(io), signals(io, SIGINT, SIGTERM) {}

  void accept() {
    acceptor.async_accept(asio::make_strand(io), [this](beast::error_code ec, tcp::socket socket) {
      if (!ec) std::make_shared<HttpConnection>(std::move(socket), platform, gateway)->run();
      if (acceptor.is_open()) accept();
    });
  }

  void schedule_tick() {
    ticker.expires_after(config.tick_interval);
    ticker.async_wait([this](beast::error_code ec) {
      if (ec) return;
      try {
        platform.tick();
      } catch (const std::exception& e) {
        std::cerr << "tick failed: " << e.what() << "\n";
      }
      schedule_tick();
    });
  }

  Platform& platform;
  Gateway& gateway;
  ServerConfig config;
  asio::io_context io;
  tcp::acceptor acceptor;
  asio::steady_timer ticker;
  asio::signal_set signals;
  std::vector<std::thread> workers;
};

Server::Server(Platform& platform, Gateway& gateway, ServerConfig config)
    : impl_(std::make_unique<Impl>(platform, gateway, std::move(config))) {}

Server::~Server() {
  stop();
  wait();
}

void Server::start() {
  auto& i = *impl_;
  tcp::endpoint endpoint{asio::ip::make_address(i.config.address), i.config.port};
  i.acceptor.open(endpoint.protocol());
  i.acceptor.set_option(asio::socket_base::reuse_address(true));
  i.acceptor.bind(endpoint);
  i.acceptor.listen(asio::socket_base::max_listen_connections);
  i.accept();
  i.schedule_tick();
  i.signals.async_wait([this](beast::error_code ec, int) {
    if (!ec) stop();
  });
  for (unsigned t = 0; t < std::max(1u, i.config.threads); ++t) i.workers.emplace_back([&i] { i.io.run(); });
}

void Server::wait() {
  for (auto& w : impl_->workers)
    if (w.joinable()) w.join();
  impl_->workers.clear();
}

void Server::stop() {
  asio::post(impl_->io, [&i = *impl_] {
    beast::error_code ec;
    i.acceptor.close(ec);
    i.ticker.cancel();
    i.signals.cancel();
  });
  impl_->io.stop();
}

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

}  // namespace forge
