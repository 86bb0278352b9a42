#include <chrono>
#include <string>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "doctest.h"
#include "json.hpp"

#include "../../service/server.hpp"
#include "../../service/session.hpp"

using namespace dchier;
using namespace dchier::service;
using nlohmann::json;

namespace {

Scenario external_scenario() {
  Scenario s = load_scenario(std::string(DCHIER_SCENARIO_DIR) + "/case1_velocity_cap.json");
  s.op.kind = ForceKind::External;
  return s;
}

json only(const std::vector<Outgoing>& out) {
  REQUIRE(out.size() == 1);
  return json::parse(out.front().text);
}

}  // namespace

TEST_SUITE("session") {
  TEST_CASE("first client drives, later ones view") {
    SessionRegistry r;
    CHECK(r.join(1) == Role::Driver);
    CHECK(r.join(2) == Role::Viewer);
    CHECK(r.join(3) == Role::Viewer);
    CHECK(r.join(2) == Role::Viewer);  // rejoin is idempotent
    CHECK(r.size() == 3);
    CHECK(r.driver() == 1u);
  }

  TEST_CASE("driver leaving promotes the earliest viewer") {
    SessionRegistry r;
    r.join(1);
    r.join(2);
    r.join(3);
    CHECK_FALSE(r.leave(3).has_value());
    CHECK(r.leave(1) == std::optional<ClientId>(2));
    CHECK(r.role(2) == Role::Driver);
    CHECK_FALSE(r.leave(2).has_value());
    CHECK_FALSE(r.driver().has_value());
    CHECK_FALSE(r.role(2).has_value());
    CHECK_FALSE(r.leave(42).has_value());
  }

  TEST_CASE("claim_driver only succeeds on a free slot") {
    SessionRegistry r;
    r.join(1);
    r.join(2);
    CHECK_FALSE(r.claim_driver(2));
    CHECK(r.claim_driver(1));
    CHECK_FALSE(r.claim_driver(9));
  }

  TEST_CASE("cap_force keeps direction") {
    const Vec3 f = cap_force(Vec3(60, 80, 0));
    CHECK(f.norm() == doctest::Approx(kForceCap));
    CHECK(f.x() / f.y() == doctest::Approx(0.75));
    CHECK(cap_force(Vec3(1, 2, 3)) == Vec3(1, 2, 3));
  }

  TEST_CASE("parse_client_message") {
    ClientMessage m = parse_client_message(R"({"type":"force","f":[3,4]})");
    CHECK(m.kind == ClientMessage::Kind::Force);
    CHECK(m.force == Vec3(3, 4, 0));

    m = parse_client_message(R"({"type":"force","f":[300,0,0]})");
    CHECK(m.force.x() == doctest::Approx(kForceCap));

    m = parse_client_message(R"({"type":"config","solver":"hqp","theta_deg":{"1":45}})");
    REQUIRE(m.kind == ClientMessage::Kind::Config);
    CHECK(m.config.solver == Backend::Hqp);
    REQUIRE(m.config.theta_deg.size() == 1);
    CHECK(m.config.theta_deg[0].first == 1);
    CHECK(m.config.theta_deg[0].second == 45.0);

    m = parse_client_message(R"({"type":"hello","role":"viewer"})");
    CHECK(m.requested_role == Role::Viewer);

    for (const char* bad : {"{not json", "[]", R"({"type":7})", R"({"type":"force"})", R"({"type":"force","f":[1,2,3,4]})",
                            R"({"type":"force","f":["x"]})", R"({"type":"config","solver":"lbfgs"})",
                            R"({"type":"hello","role":"king"})", R"({"type":"dance"})"}) {
      CAPTURE(bad);
      m = parse_client_message(bad);
      CHECK(m.kind == ClientMessage::Kind::Invalid);
      CHECK_FALSE(m.error.empty());
    }
  }
}

TEST_SUITE("loop") {
  TEST_CASE("hello frame describes the session") {
    LoopCore core(external_scenario(), Backend::DirectionConstrained);
    const json hello = only(core.on_join(1));
    CHECK(hello["type"] == "hello");
    CHECK(hello["role"] == "driver");
    CHECK(hello["solver"] == "dc");
    CHECK(hello["version"] == kProtocolVersion);
    CHECK(only(core.on_join(2))["role"] == "viewer");
  }

  TEST_CASE("driver force lands on the next tick") {
    LoopCore core(external_scenario(), Backend::DirectionConstrained);
    core.on_join(1);
    CHECK(json::parse(core.tick().text)["f"] == json::array({0.0, 0.0, 0.0}));
    CHECK(core.on_message(1, R"({"type":"force","f":[5,-2,0]})").empty());
    const json state = json::parse(core.tick().text);
    CHECK(state["type"] == "state");
    CHECK(state["f"] == json::array({5.0, -2.0, 0.0}));
  }

  TEST_CASE("malformed input yields an error frame and keeps the loop alive") {
    LoopCore core(external_scenario(), Backend::DirectionConstrained);
    core.on_join(1);
    const auto out = core.on_message(1, "{oops");
    REQUIRE(out.size() == 1);
    CHECK(out[0].to == 1u);
    const json err = json::parse(out[0].text);
    CHECK(err["type"] == "error");
    CHECK(err["message"] == "malformed JSON");
    CHECK(json::parse(core.tick().text)["type"] == "state");
  }

  TEST_CASE("viewers cannot drive or configure") {
    LoopCore core(external_scenario(), Backend::DirectionConstrained);
    core.on_join(1);
    core.on_join(2);
    CHECK(only(core.on_message(2, R"({"type":"force","f":[1,0,0]})"))["type"] == "error");
    CHECK(only(core.on_message(2, R"({"type":"config","solver":"hqp"})"))["type"] == "error");
    CHECK(only(core.on_message(2, R"({"type":"hello","role":"driver"})"))["type"] == "error");
    CHECK(core.pending_force() == Vec3::Zero());
    CHECK(core.simulation().backend() == Backend::DirectionConstrained);
  }

  TEST_CASE("config switches the solver and theta") {
    LoopCore core(external_scenario(), Backend::DirectionConstrained);
    core.on_join(1);
    CHECK(core.on_message(1, R"({"type":"config","solver":"scaling"})").empty());
    CHECK(json::parse(core.tick().text)["solver"] == "scaling");

    const std::size_t level = core.simulation().scenario().levels.size() - 1;
    const std::string msg = R"({"type":"config","theta_deg":{")" + std::to_string(level) + R"(":12}})";
    CHECK(core.on_message(1, msg).empty());
    CHECK(json::parse(core.tick().text)["theta_deg"].get<double>() == doctest::Approx(12.0));

    CHECK(only(core.on_message(1, R"({"type":"config","theta_deg":[500]})"))["type"] == "error");
    CHECK(only(core.on_message(1, R"({"type":"config","theta_deg":{"99":10}})"))["type"] == "error");
  }

  TEST_CASE("driver leaving zeroes the force and promotes a viewer") {
    LoopCore core(external_scenario(), Backend::DirectionConstrained);
    core.on_join(1);
    core.on_join(2);
    core.on_message(1, R"({"type":"force","f":[4,0,0]})");
    const json promoted = only(core.on_leave(1));
    CHECK(promoted["role"] == "driver");
    CHECK(core.pending_force() == Vec3::Zero());
    CHECK(json::parse(core.tick().text)["f"] == json::array({0.0, 0.0, 0.0}));
    CHECK(core.on_message(1, R"({"type":"force","f":[4,0,0]})").empty());  // departed client is ignored
  }
}

namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

int http_get(std::uint16_t port, const std::string& target, std::string* body = nullptr) {
  asio::io_context ioc;
  tcp::socket socket(ioc);
  socket.connect({asio::ip::make_address("127.0.0.1"), port});
  http::request<http::empty_body> req{http::verb::get, target, 11};
  req.set(http::field::host, "127.0.0.1");
  http::write(socket, req);
  beast::flat_buffer buffer;
  http::response<http::string_body> res;
  http::read(socket, buffer, res);
  if (body) *body = res.body();
  return static_cast<int>(res.result_int());
}

struct WsClient {
  asio::io_context ioc;
  websocket::stream<tcp::socket> ws{ioc};

  explicit WsClient(std::uint16_t port) {
    ws.next_layer().connect({asio::ip::make_address("127.0.0.1"), port});
    ws.handshake("127.0.0.1", "/sim");
  }
  json read() {
    beast::flat_buffer buffer;
    ws.read(buffer);
    return json::parse(beast::buffers_to_string(buffer.data()));
  }
  json read_type(const std::string& type) {
    for (;;) {
      json frame = read();
      if (frame["type"] == type) return frame;
    }
  }
  void send(const std::string& text) { ws.write(asio::buffer(text)); }
};

template <class Pred>
bool wait_until(Pred pred, std::chrono::milliseconds limit = std::chrono::milliseconds(3000)) {
  const auto end = std::chrono::steady_clock::now() + limit;
  while (std::chrono::steady_clock::now() < end) {
    if (pred()) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  return pred();
}

}  // namespace

TEST_SUITE("server") {
  TEST_CASE("live round trip over the websocket") {
    Server server(external_scenario(), Backend::DirectionConstrained, {"127.0.0.1", 0});
    server.start();
    REQUIRE(server.port() != 0);
    REQUIRE(wait_until([&] { return server.ticks() > 0; }));

    std::string body;
    CHECK(http_get(server.port(), "/healthz", &body) == 200);
    CHECK(body.find("ok") != std::string::npos);
    CHECK(http_get(server.port(), "/nope") == 404);

    WsClient driver(server.port());
    const json hello = driver.read_type("hello");
    CHECK(hello["role"] == "driver");
    WsClient viewer(server.port());
    CHECK(viewer.read_type("hello")["role"] == "viewer");

    driver.send("{garbage");
    CHECK(driver.read_type("error")["message"] == "malformed JSON");

    driver.send(R"({"type":"force","f":[90,0,0]})");
    // The force shows up within two ticks of the first state after it was sent.
    bool seen = false;
    for (int i = 0; i < 3 && !seen; ++i) {
      const json state = driver.read_type("state");
      seen = state["f"][0].get<double>() == doctest::Approx(kForceCap);
    }
    CHECK(seen);

    bool viewer_sees = false;
    for (int i = 0; i < 50 && !viewer_sees; ++i)
      viewer_sees = viewer.read_type("state")["f"][0].get<double>() == doctest::Approx(kForceCap);
    CHECK(viewer_sees);

    viewer.send(R"({"type":"force","f":[1,0,0]})");
    CHECK(viewer.read_type("error")["message"] == "only the driver may send force");

    driver.ws.close(websocket::close_code::normal);
    CHECK(viewer.read_type("hello")["role"] == "driver");

    const auto before = server.ticks();
    CHECK(wait_until([&] { return server.ticks() > before + 5; }));
    CHECK(server.live());
    server.stop();
    CHECK_FALSE(server.live());
  }

  TEST_CASE("occupied port is reported") {
    Server first(external_scenario(), Backend::DirectionConstrained, {"127.0.0.1", 0});
    first.start();
    Server second(external_scenario(), Backend::DirectionConstrained, {"127.0.0.1", first.port()});
    CHECK_THROWS_AS(second.start(), std::runtime_error);
    first.stop();
  }
}
