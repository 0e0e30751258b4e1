#include "gridblock/service/server.hpp"

#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <map>
#include <thread>

#include <boost/asio/bind_executor.hpp>
#include <boost/asio/dispatch.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace gridblock::service
{

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

std::uint16_t port_from_env(std::uint16_t fallback)
{
  const char * v = std::getenv("GRIDBLOCK_PORT");
  if (!v || !*v) return fallback;
  char * end = nullptr;
  const long p = std::strtol(v, &end, 10);
  if (*end != '\0' || p < 0 || p > 65535) return fallback;
  return static_cast<std::uint16_t>(p);
}

struct Server::Impl
{
  TaskRegistry tasks;
  ServerOptions options;
  SessionTable table;
  net::io_context ioc;
  tcp::acceptor acceptor{ioc};
  net::steady_timer sweeper{ioc};
  std::unique_ptr<net::signal_set> signals;
  std::vector<std::thread> threads;
  std::uint16_t bound_port = 0;

  std::mutex state_mutex;
  std::condition_variable stopped_cv;
  bool stopped = false;

  Impl(TaskRegistry t, ServerOptions o) : tasks(std::move(t)), options(std::move(o)), table(options.idle_limit) {}

  void do_accept();
  void schedule_sweep();
  void request_stop();
  void join();
};

namespace
{

std::map<std::string, std::string> query_params(std::string_view target)
{
  std::map<std::string, std::string> out;
  const auto q = target.find('?');
  if (q == std::string_view::npos) return out;
  auto rest = target.substr(q + 1);
  while (!rest.empty()) {
    const auto amp = rest.find('&');
    const auto pair = rest.substr(0, amp);
    const auto eq = pair.find('=');
    if (eq != std::string_view::npos) out.emplace(pair.substr(0, eq), pair.substr(eq + 1));
    if (amp == std::string_view::npos) break;
    rest.remove_prefix(amp + 1);
  }
  return out;
}

class Connection : public std::enable_shared_from_this<Connection>
{
public:
  Connection(tcp::socket && socket, Server::Impl & server) : ws_(std::move(socket)), server_(server) {}

  void run()
  {
    net::dispatch(ws_.get_executor(), [self = shared_from_this()] { self->read_request(); });
  }

private:
  void read_request()
  {
    beast::get_lowest_layer(ws_).expires_after(std::chrono::seconds(30));
    http::async_read(
      ws_.next_layer(), buffer_, request_,
      [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_request(ec); });
  }

  void on_request(beast::error_code ec)
  {
    if (ec) return;
    const std::string_view target(request_.target().data(), request_.target().size());
    const auto path = target.substr(0, target.find('?'));
    if (!websocket::is_upgrade(request_) || path != server_.options.path) {
      return reject(http::status::not_found, "no WebSocket endpoint at this path\n");
    }
    const auto params = query_params(target);
    if (const auto it = params.find("session"); it != params.end()) {
      slot_ = server_.table.find(it->second);
      if (!slot_) return reject(http::status::not_found, "unknown or expired session\n");
    } else {
      slot_ = server_.table.create(server_.options.default_task);
    }
    {
      std::lock_guard lock(slot_->mutex);
      session_id_ = slot_->session.session_id;
    }

    beast::get_lowest_layer(ws_).expires_never();
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(request_, [self = shared_from_this()](beast::error_code e) { self->on_accept(e); });
  }

  void reject(http::status status, std::string body)
  {
    auto res = std::make_shared<http::response<http::string_body>>(status, request_.version());
    res->set(http::field::content_type, "text/plain");
    res->keep_alive(false);
    res->body() = std::move(body);
    res->prepare_payload();
    http::async_write(
      ws_.next_layer(), *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
        beast::error_code ignored;
        self->ws_.next_layer().socket().shutdown(tcp::socket::shutdown_send, ignored);
      });
  }

  void on_accept(beast::error_code ec)
  {
    if (ec) return;
    ServerMessage hello{std::string(frame::kSession)};
    {
      std::lock_guard lock(slot_->mutex);
      hello.payload["sessionId"] = slot_->session.session_id;
      hello.payload["taskId"] = slot_->session.task_id;
      hello.payload["historySize"] = slot_->session.history.size();
    }
    send(hello.encode());
    read_frame();
  }

  void read_frame()
  {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_frame(ec); });
  }

  void on_frame(beast::error_code ec)
  {
    if (ec) return;
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());

    std::vector<ServerMessage> replies;
    if (!server_.table.find(session_id_)) {
      replies.push_back(error_frame("SESSION_EXPIRED", "session " + session_id_ + " has expired"));
    } else {
      std::lock_guard lock(slot_->mutex);
      replies = handle_frame(slot_->session, text, server_.tasks);
    }
    for (const auto & r : replies) send(r.encode());
    read_frame();
  }

  void send(std::string text)
  {
    outbox_.push_back(std::move(text));
    if (outbox_.size() == 1) write_next();
  }

  void write_next()
  {
    ws_.text(true);
    ws_.async_write(
      net::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
        if (ec) return;
        self->outbox_.pop_front();
        if (!self->outbox_.empty()) self->write_next();
      });
  }

  websocket::stream<beast::tcp_stream> ws_;
  Server::Impl & server_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
  std::shared_ptr<SessionSlot> slot_;
  std::string session_id_;
  std::deque<std::string> outbox_;
};

}  // namespace

void Server::Impl::do_accept()
{
  acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (!ec) std::make_shared<Connection>(std::move(socket), *this)->run();
    if (acceptor.is_open()) do_accept();
  });
}

void Server::Impl::schedule_sweep()
{
  sweeper.expires_after(std::chrono::seconds(60));
  sweeper.async_wait([this](beast::error_code ec) {
    if (ec) return;
    table.expire();
    schedule_sweep();
  });
}

void Server::Impl::request_stop()
{
  {
    std::lock_guard lock(state_mutex);
    stopped = true;
  }
  ioc.stop();
  stopped_cv.notify_all();
}

void Server::Impl::join()
{
  for (auto & t : threads) {
    if (t.joinable() && t.get_id() != std::this_thread::get_id()) t.join();
  }
  threads.clear();
  beast::error_code ignored;
  acceptor.close(ignored);
}

Server::Server(TaskRegistry tasks, ServerOptions options)
: impl_(std::make_unique<Impl>(std::move(tasks), std::move(options)))
{
}

Server::~Server()
{
  stop();
}

void Server::start()
{
  auto & s = *impl_;
  const auto endpoint = tcp::endpoint(net::ip::make_address(s.options.address), s.options.port);
  s.acceptor.open(endpoint.protocol());
  s.acceptor.set_option(net::socket_base::reuse_address(true));
  s.acceptor.bind(endpoint);
  s.acceptor.listen(net::socket_base::max_listen_connections);
  s.bound_port = s.acceptor.local_endpoint().port();
  s.do_accept();
  s.schedule_sweep();
  const unsigned n = std::max(1u, s.options.threads);
  for (unsigned i = 0; i < n; ++i) s.threads.emplace_back([&s] { s.ioc.run(); });
}

void Server::wait(bool handle_signals)
{
  auto & s = *impl_;
  if (handle_signals) {
    s.signals = std::make_unique<net::signal_set>(s.ioc, SIGINT, SIGTERM);
    s.signals->async_wait([&s](beast::error_code ec, int) {
      if (!ec) s.request_stop();
    });
  }
  {
    std::unique_lock lock(s.state_mutex);
    s.stopped_cv.wait(lock, [&] { return s.stopped; });
  }
  s.join();
}

void Server::stop()
{
  if (!impl_) return;
  impl_->request_stop();
  impl_->join();
}

std::uint16_t Server::port() const { return impl_->bound_port; }

SessionTable & Server::sessions() { return impl_->table; }

}  // namespace gridblock::service
