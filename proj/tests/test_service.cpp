#include <doctest.h>
#include <httplib.h>

#include <thread>

#include "fairalloc/service.hpp"

using namespace fairalloc;

namespace {

// Lower-bound pair: two agents, each 0.8 or 1.2, budget 2.
json pair_body() {
  return json::parse(R"({
    "family": "filling_ratio",
    "agents": {"count": 2, "support": [0.8, 1.2], "probs": [0.5, 0.5]},
    "budget": [2]
  })");
}

int status_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ApiError& e) {
    return e.status();
  }
  return 200;
}

}  // namespace

TEST_SUITE("service") {

TEST_CASE("session lifecycle") {
  SessionManager mgr;
  const json created = mgr.create(pair_body());
  const std::string id = created["id"];
  CHECK(created["n"] == 2);
  CHECK(created["policy"] == "hope_online");

  const json peek = mgr.whatif(id, {{"type", 1.2}});
  CHECK(peek["whatif"]["hope_online"]["allocation"][0].get<double>() == doctest::Approx(1.0667).epsilon(1e-4));
  CHECK(peek["whatif"]["greedy"]["allocation"][0].get<double>() == doctest::Approx(1.2));
  CHECK_FALSE(peek["whatif"].contains("offline"));
  CHECK(mgr.get(id)["index"] == 0);

  const json first = mgr.observe(id, {{"type", 1.2}});
  CHECK(first["index"] == 0);
  CHECK(first["allocation"][0].get<double>() == doctest::Approx(1.6 / 1.5));
  CHECK_FALSE(first["complete"].get<bool>());

  // Close to an atom snaps to it.
  const json second = mgr.observe(id, {{"theta", 1.2 + 1e-9}});
  CHECK(second["type"] == 1.2);
  CHECK(second["complete"].get<bool>());

  const json done = mgr.get(id);
  CHECK(done["committed"].size() == 2);
  CHECK(done["hindsight"]["allocation"][0][0].get<double>() == doctest::Approx(1.0));
  CHECK(done["metrics"]["dist_max"].get<double>() == doctest::Approx(1.6 / 1.5 - 1.0));
  CHECK(status_of([&] { mgr.observe(id, {{"type", 0.8}}); }) == 409);

  mgr.remove(id);
  CHECK(status_of([&] { mgr.get(id); }) == 404);
}

TEST_CASE("input errors") {
  SessionManager mgr;
  CHECK(status_of([&] { mgr.create(json::parse(R"({"agents": 3})")); }) == 400);
  try {
    mgr.create(json::parse(R"({"agents": [{"support": [1, 2], "probs": [0.5, 0.6]}], "budget": [1]})"));
    FAIL("expected an error");
  } catch (const ApiError& e) {
    CHECK(e.status() == 400);
    CHECK(e.body()["error"] == "invalid instance");
    CHECK(e.body()["detail"][0]["agent"] == 0);
  }
  json body = pair_body();
  body["policy"] = "offline";
  CHECK(status_of([&] { mgr.create(body); }) == 400);

  const std::string id = mgr.create(pair_body())["id"];
  CHECK(status_of([&] { mgr.observe(id, {{"type", 1.0}}); }) == 422);
  CHECK(status_of([&] { mgr.observe(id, json::object()); }) == 400);
  CHECK(status_of([&] { mgr.observe(id, {{"type", "big"}}); }) == 400);
  CHECK(status_of([&] { mgr.observe("ffff", {{"type", 1.2}}); }) == 404);
}

TEST_CASE("least recently used session is evicted") {
  SessionManager mgr(2);
  const std::string a = mgr.create(pair_body())["id"];
  const std::string b = mgr.create(pair_body())["id"];
  mgr.get(a);
  const std::string c = mgr.create(pair_body())["id"];
  CHECK(mgr.size() == 2);
  CHECK(status_of([&] { mgr.get(b); }) == 404);
  CHECK(status_of([&] { mgr.get(a); }) == 200);
  CHECK(status_of([&] { mgr.get(c); }) == 200);
}

TEST_CASE("http round trip") {
  SessionManager mgr;
  HttpService http(mgr);
  const auto port = http.bind("127.0.0.1", 0);
  REQUIRE(port.has_value());
  std::thread server([&] { http.run(); });

  httplib::Client client("127.0.0.1", *port);
  auto created = client.Post("/sessions", pair_body().dump(), "application/json");
  REQUIRE(created);
  CHECK(created->status == 200);
  const std::string id = json::parse(created->body)["id"];

  auto obs = client.Post("/sessions/" + id + "/observe", R"({"type": 0.8})", "application/json");
  REQUIRE(obs);
  CHECK(obs->status == 200);
  CHECK(json::parse(obs->body)["allocation"][0].get<double>() == doctest::Approx(0.8));

  auto bad = client.Post("/sessions/" + id + "/observe", "{not json", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  CHECK(json::parse(bad->body)["error"] == "malformed JSON");

  auto missing = client.Get("/sessions/abc123");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  auto nowhere = client.Get("/nowhere");
  REQUIRE(nowhere);
  CHECK(nowhere->status == 404);

  auto del = client.Delete("/sessions/" + id);
  REQUIRE(del);
  CHECK(del->status == 200);
  CHECK(mgr.size() == 0);

  http.stop();
  server.join();
}

TEST_CASE("single agent session") {
  SessionManager mgr;
  const std::string id = mgr.create(json::parse(R"({"agents": [{"support": [5], "probs": [1]}], "budget": [10]})"))["id"];
  const json r = mgr.observe(id, {{"type", 5}});
  CHECK(r["allocation"][0] == 5.0);
  CHECK(r["remaining"][0] == 5.0);
}

TEST_CASE("what-if is repeatable and matches the commit") {
  SessionManager mgr;
  json body = pair_body();
  body["whatif_policies"] = {"hope_online", "greedy", "maxmin"};
  const std::string id = mgr.create(body)["id"];
  const json a = mgr.whatif(id, {{"type", 0.8}});
  const json b = mgr.whatif(id, {{"type", 0.8}});
  CHECK(a == b);
  CHECK(a["whatif"].size() == 3);
  CHECK(mgr.get(id)["remaining"][0] == 2.0);
  const json obs = mgr.observe(id, {{"type", 0.8}});
  CHECK(obs["allocation"] == a["whatif"]["hope_online"]["allocation"]);
  mgr.observe(id, {{"type", 1.2}});
  const json done = mgr.get(id);
  // Hindsight over (0.8, 1.2) with budget 2 covers both demands.
  CHECK(done["hindsight"]["allocation"][0][0].get<double>() == doctest::Approx(0.8));
  CHECK(done["hindsight"]["allocation"][1][0].get<double>() == doctest::Approx(1.2));
}

}  // TEST_SUITE
