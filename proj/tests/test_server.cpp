#include <doctest.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "gridblock/service/server.hpp"
#include "support.hpp"

namespace beast = boost::beast;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;
using namespace gridblock::service;

namespace
{

class Client
{
public:
  Client(std::uint16_t port, const std::string & target = "/session") : ws_(ioc_)
  {
    tcp::resolver resolver(ioc_);
    net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake(response_, "127.0.0.1:" + std::to_string(port), target);
  }

  json receive()
  {
    beast::flat_buffer buffer;
    ws_.read(buffer);
    return json::parse(beast::buffers_to_string(buffer.data()));
  }

  void send(const std::string & type, json payload = json::object())
  {
    ws_.write(net::buffer(json{{"type", type}, {"payload", std::move(payload)}}.dump()));
  }

  void send_raw(const std::string & text) { ws_.write(net::buffer(text)); }

  json request(const std::string & type, json payload = json::object())
  {
    send(type, std::move(payload));
    return receive();
  }

  ~Client()
  {
    beast::error_code ignored;
    ws_.close(beast::websocket::close_code::normal, ignored);
  }

private:
  net::io_context ioc_;
  beast::websocket::stream<tcp::socket> ws_;
  beast::websocket::response_type response_;
};

// HTTP status the server answers an upgrade request for `target` with.
unsigned upgrade_status(std::uint16_t port, const std::string & target)
{
  net::io_context ioc;
  tcp::socket socket(ioc);
  tcp::resolver resolver(ioc);
  net::connect(socket, resolver.resolve("127.0.0.1", std::to_string(port)));
  beast::http::request<beast::http::empty_body> req(beast::http::verb::get, target, 11);
  req.set(beast::http::field::host, "127.0.0.1");
  req.set(beast::http::field::upgrade, "websocket");
  req.set(beast::http::field::connection, "Upgrade");
  req.set(beast::http::field::sec_websocket_key, "dGhlIHNhbXBsZSBub25jZQ==");
  req.set(beast::http::field::sec_websocket_version, "13");
  beast::http::write(socket, req);
  beast::flat_buffer buffer;
  beast::http::response_parser<beast::http::empty_body> parser;
  parser.skip(true);
  beast::http::read_header(socket, buffer, parser);
  return parser.get().result_int();
}

struct Running
{
  Server server;
  explicit Running(ServerOptions o = {}) : server(TaskRegistry::builtin(), with_free_port(o)) { server.start(); }
  static ServerOptions with_free_port(ServerOptions o)
  {
    o.port = 0;
    return o;
  }
  std::uint16_t port() const { return server.port(); }
};

}  // namespace

TEST_CASE("a new connection is greeted with its session")
{
  Running r;
  REQUIRE(r.port() != 0);
  Client c(r.port());
  const auto hello = c.receive();
  CHECK(hello["type"] == "SESSION");
  CHECK(hello["payload"]["taskId"] == "tile-cleaning");
  CHECK(hello["payload"]["historySize"] == 0);
  CHECK(hello["payload"]["sessionId"].is_string());
  CHECK(r.server.sessions().size() == 1);
}

TEST_CASE("RUN and CHECK over the socket give the same verdict")
{
  Running r;
  Client c(r.port());
  c.receive();
  const auto xml = support::fixture("tile_cleaning_reference.xml");

  c.send("RUN", {{"xml", xml}});
  const auto run_verdict = c.receive();
  const auto wire = c.receive();
  const auto check_verdict = c.request("CHECK", {{"xml", xml}});

  CHECK(run_verdict["type"] == "VERDICT");
  CHECK(wire["type"] == "WIRE");
  CHECK(wire["payload"]["commands"].back() == json{{"cmd", "END"}});
  CHECK(check_verdict["type"] == "VERDICT");
  CHECK(run_verdict == check_verdict);

  const auto & v = run_verdict["payload"]["verdict"];
  std::vector<std::string> keys;
  for (auto it = v.begin(); it != v.end(); ++it) keys.push_back(it.key());
  std::sort(keys.begin(), keys.end());
  CHECK(keys == std::vector<std::string>{"is_correct", "return_button", "text", "xml"});
  CHECK(v["is_correct"] == true);
  CHECK(v["return_button"] == true);
}

TEST_CASE("errors over the socket keep the connection open")
{
  Running r;
  Client c(r.port());
  c.receive();
  c.send_raw("{{{");
  CHECK(c.receive()["payload"]["code"] == "BAD_FRAME");
  CHECK(c.request("RUN", {{"xml", "<xml"}})["payload"]["code"] == "PARSE_ERROR");
  CHECK(c.request("SELECT_TASK", {{"taskId", "river-crossing"}})["type"] == "TASK");
  CHECK(c.request("CHECK", {{"xml", support::fixture("river_classical.xml")}})["payload"]["verdict"]["is_correct"] == true);
}

TEST_CASE("history over the socket is capped and survives a reconnect")
{
  Running r;
  std::string id;
  {
    Client c(r.port());
    id = c.receive()["payload"]["sessionId"];
    for (int i = 1; i <= 21; ++i) {
      const auto ack = c.request("SAY", {{"text", "line " + std::to_string(i)}});
      CHECK(ack["payload"]["historySize"] == std::min(i, 20));
    }
    const auto prompt = c.request("PROMPT");
    const std::string context = prompt["payload"]["contextBlock"];
    CHECK(context.find("- [user] line 1\n") == std::string::npos);
    CHECK(context.find("- [user] line 2\n") != std::string::npos);
    CHECK(context.find("- [user] line 21") != std::string::npos);
  }

  Client again(r.port(), "/session?session=" + id);
  const auto hello = again.receive();
  CHECK(hello["payload"]["sessionId"] == id);
  CHECK(hello["payload"]["historySize"] == 20);
  CHECK(r.server.sessions().size() == 1);
}

TEST_CASE("unknown sessions and paths are refused")
{
  Running r;
  CHECK(upgrade_status(r.port(), "/session?session=nope") == 404);
  CHECK(upgrade_status(r.port(), "/elsewhere") == 404);
  CHECK(upgrade_status(r.port(), "/session") == 101);
}

TEST_CASE("an expired session answers SESSION_EXPIRED and cannot be resumed")
{
  Running r;
  Client c(r.port());
  const std::string id = c.receive()["payload"]["sessionId"];
  auto slot = r.server.sessions().find(id);
  REQUIRE(slot);
  {
    std::lock_guard lock(slot->mutex);
    slot->last_used -= std::chrono::hours(1);
  }
  CHECK(r.server.sessions().expire() == 1);
  CHECK(c.request("SAY", {{"text", "anyone?"}})["payload"]["code"] == "SESSION_EXPIRED");
  CHECK(upgrade_status(r.port(), "/session?session=" + id) == 404);
}

TEST_CASE("two clients get separate sessions")
{
  Running r;
  Client a(r.port()), b(r.port());
  const auto ida = a.receive()["payload"]["sessionId"], idb = b.receive()["payload"]["sessionId"];
  CHECK(ida != idb);
  a.request("SAY", {{"text", "only a"}});
  CHECK(b.request("SAY", {{"text", "only b"}})["payload"]["historySize"] == 1);
}

TEST_CASE("port from the environment")
{
  ::setenv("GRIDBLOCK_PORT", "9123", 1);
  CHECK(port_from_env(1) == 9123);
  ::setenv("GRIDBLOCK_PORT", "not a port", 1);
  CHECK(port_from_env(4321) == 4321);
  ::unsetenv("GRIDBLOCK_PORT");
  CHECK(port_from_env() == 8765);
}
