#include "scb/session/service.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <charconv>
#include <deque>
#include <set>
#include <thread>

#include "scb/common/error.hpp"
#include "scb/session/messages.hpp"

namespace scb::session {

namespace net = ::boost::asio;
namespace beast = ::boost::beast;
namespace ws = beast::websocket;
using tcp = net::ip::tcp;

namespace {

class Client : public std::enable_shared_from_this<Client> {
 public:
  using Handler = std::function<void(const std::shared_ptr<Client>&, const std::string&)>;
  using Closed = std::function<void(const std::shared_ptr<Client>&)>;

  Client(tcp::socket socket, Handler on_message, Closed on_close)
      : ws_(std::move(socket)), on_message_(std::move(on_message)), on_close_(std::move(on_close)) {}

  void start(std::string hello) {
    ws_.set_option(ws::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this(), hello = std::move(hello)](beast::error_code ec) mutable {
      if (ec) return self->close();
      self->open_ = true;
      self->send(std::move(hello));
      self->read();
    });
  }

  void send(std::string text) {
    if (!open_) return;
    outbox_.push_back(std::move(text));
    if (outbox_.size() == 1) write();
  }

  void shutdown() {
    beast::error_code ec;
    ws_.next_layer().shutdown(tcp::socket::shutdown_both, ec);
    ws_.next_layer().close(ec);
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->on_message_(self, text);
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(net::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      self->outbox_.pop_front();
      if (!self->outbox_.empty()) self->write();
    });
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    open_ = false;
    outbox_.clear();
    on_close_(shared_from_this());
  }

  ws::stream<tcp::socket> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  Handler on_message_;
  Closed on_close_;
  bool open_ = false, closed_ = false;
};

}  // namespace

struct SessionServer::Impl : std::enable_shared_from_this<SessionServer::Impl> {
  Session& session;
  net::io_context ioc;
  tcp::acceptor acceptor{ioc};
  net::steady_timer timer{ioc};
  std::chrono::milliseconds period;
  std::set<std::shared_ptr<Client>> clients;
  std::atomic<std::size_t> client_count{0};
  std::thread thread;
  bool stopped = false;

  Impl(Session& s, double state_hz)
      : session(s), period(std::max<long long>(1, static_cast<long long>(1000.0 / state_hz))) {}

  void accept() {
    acceptor.async_accept([self = shared_from_this()](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      auto weak = std::weak_ptr<Impl>(self);
      auto client = std::make_shared<Client>(
          std::move(socket),
          [weak](const std::shared_ptr<Client>& c, const std::string& text) {
            if (auto impl = weak.lock()) impl->handle(c, text);
          },
          [weak](const std::shared_ptr<Client>& c) {
            if (auto impl = weak.lock()) {
              impl->clients.erase(c);
              impl->client_count = impl->clients.size();
            }
          });
      self->clients.insert(client);
      self->client_count = self->clients.size();
      client->start(hello_message(self->session.snapshot()).dump());
      self->accept();
    });
  }

  void tick() {
    timer.expires_after(period);
    timer.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->broadcast(state_message(self->session.snapshot()).dump());
      self->tick();
    });
  }

  void broadcast(const std::string& text) {
    for (const auto& c : clients) c->send(text);
  }

  // Runs on the io thread; session calls may emit events, which are posted
  // back to this thread by the listener.
  void handle(const std::shared_ptr<Client>& c, const std::string& text) {
    try {
      const ClientMessage m = parse_client_message(text);
      switch (m.kind) {
        case ClientMessage::Kind::SetMode: session.set_mode(m.mode); break;
        case ClientMessage::Kind::StartProtocol: session.start_protocol(m.schedule); break;
        case ClientMessage::Kind::Stop: session.stop(); break;
      }
      broadcast(state_message(session.snapshot()).dump());
    } catch (const Error& e) {
      c->send(error_message(e.what()).dump());
    }
  }
};

SessionServer::SessionServer(Session& session, const std::string& address, unsigned short port, double state_hz)
    : impl_(std::make_shared<Impl>(session, state_hz)) {
  if (!(state_hz > 0.0)) throw Error(Errc::InvalidArgument, "state rate must be positive");
  try {
    const tcp::endpoint ep(net::ip::make_address(address), port);
    impl_->acceptor.open(ep.protocol());
    impl_->acceptor.set_option(net::socket_base::reuse_address(true));
    impl_->acceptor.bind(ep);
    impl_->acceptor.listen();
  } catch (const ::boost::system::system_error& e) {
    throw Error(Errc::Io, "cannot listen on " + address + ":" + std::to_string(port) + ": " + e.what());
  }
  std::weak_ptr<Impl> weak = impl_;
  session.set_listener([weak](const nlohmann::ordered_json& msg) {
    if (auto impl = weak.lock())
      net::post(impl->ioc, [impl, text = msg.dump()] { impl->broadcast(text); });
  });
  impl_->accept();
  impl_->tick();
  impl_->thread = std::thread([impl = impl_] { impl->ioc.run(); });
}

SessionServer::~SessionServer() { stop(); }

unsigned short SessionServer::port() const { return impl_->acceptor.local_endpoint().port(); }

std::size_t SessionServer::clients() const { return impl_->client_count.load(); }

void SessionServer::stop() {
  if (impl_->stopped) return;
  impl_->stopped = true;
  impl_->session.set_listener(nullptr);
  net::post(impl_->ioc, [impl = impl_] {
    beast::error_code ec;
    impl->acceptor.close(ec);
    impl->timer.cancel();
    for (const auto& c : std::set(impl->clients)) c->shutdown();
  });
  impl_->thread.join();
  impl_->clients.clear();
}

std::pair<std::string, unsigned short> parse_endpoint(const std::string& s) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos || colon == 0) throw Error(Errc::InvalidArgument, "expected host:port, got '" + s + "'");
  unsigned port = 0;
  const char* b = s.data() + colon + 1;
  const char* e = s.data() + s.size();
  const auto [p, ec] = std::from_chars(b, e, port);
  if (ec != std::errc() || p != e || b == e || port > 65535)
    throw Error(Errc::InvalidArgument, "bad port in '" + s + "'");
  return {s.substr(0, colon), static_cast<unsigned short>(port)};
}

}  // namespace scb::session
