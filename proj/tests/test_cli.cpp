#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fairalloc/service.hpp"

using namespace fairalloc;
namespace fs = std::filesystem;

// The binary path comes from ctest through FAIRALLOC_CLI.

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& stdin_text = "") {
  const char* cli = std::getenv("FAIRALLOC_CLI");
  REQUIRE_MESSAGE(cli != nullptr, "FAIRALLOC_CLI is not set");
  const fs::path dir = fs::temp_directory_path();
  const fs::path in = dir / "fairalloc_cli_in.txt", out = dir / "fairalloc_cli_out.txt";
  std::ofstream(in) << stdin_text;
  const std::string cmd = std::string("\"") + cli + "\" " + args + " < \"" + in.string() + "\" > \"" + out.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  std::stringstream ss;
  ss << std::ifstream(out).rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

fs::path write_config(const std::string& name, const json& j) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << j.dump();
  return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit 2") {
  CHECK(run("").code == 2);
  CHECK(run("simulate --out x.csv").code == 2);
  CHECK(run("table --preset nope --out x.csv").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("--help").code == 0);
}

TEST_CASE("simulate writes aggregates") {
  const auto cfg = write_config("fairalloc_cli_sim.json", json::parse(R"({
    "agents": {"count": 4, "support": [1, 2], "probs": [0.5, 0.5]},
    "replications": 5, "seed": 3, "policies": ["hope_online", "greedy"]
  })"));
  const auto out = fs::temp_directory_path() / "fairalloc_cli_sim.csv";
  const auto r = run("simulate --config " + cfg.string() + " --out " + out.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("replications=5") != std::string::npos);
  CHECK(r.out.find("bound_violations=0") != std::string::npos);
  std::ifstream f(out);
  std::string header;
  std::getline(f, header);
  CHECK(header == "policy,metric,mean,ci_halfwidth");
  int lines = 0;
  for (std::string l; std::getline(f, l);) ++lines;
  CHECK(lines == 14);
}

TEST_CASE("bad configs exit 1") {
  CHECK(run("simulate --config /nonexistent.json --out /tmp/x.csv").code == 1);
  const auto cfg = write_config("fairalloc_cli_bad.json", json::parse(R"({"agents": [{"support": [1], "probs": [0.5]}]})"));
  const auto r = run("simulate --config " + cfg.string() + " --out /tmp/x.csv");
  CHECK(r.code == 1);
  CHECK(r.out.find("sum to") != std::string::npos);
}

TEST_CASE("emitted preset config runs through simulate") {
  const auto cfg = fs::temp_directory_path() / "fairalloc_cli_emit.json";
  REQUIRE(run("table --preset gaussian100 --emit-config --out " + cfg.string()).code == 0);
  std::ifstream f(cfg);
  const json j = json::parse(f);
  CHECK(j["n"] == 100);
  CHECK(j["budgets"][0].get<double>() == doctest::Approx(1500.0));
  const auto out = fs::temp_directory_path() / "fairalloc_cli_emit.csv";
  CHECK(run("simulate --config " + cfg.string() + " --reps 10 --out " + out.string()).code == 0);
  std::ifstream csv(out);
  int lines = 0;
  for (std::string l; std::getline(csv, l);) ++lines;
  // Header plus eight online policies times seven metrics.
  CHECK(lines == 1 + 8 * 7);
}

TEST_CASE("interactive session") {
  const auto cfg = write_config("fairalloc_cli_session.json", json::parse(R"({
    "agents": {"count": 2, "support": [0.8, 1.2], "probs": [0.5, 0.5]}, "budget": [2]
  })"));
  const auto r = run("session --config " + cfg.string(), "1.2\nabc\n1.0\n0.8\n");
  CHECK(r.code == 0);
  CHECK(r.out.find("X_0 = [1.0666666666666") != std::string::npos);
  CHECK(r.out.find("try again") != std::string::npos);
  CHECK(r.out.find("type not in support") != std::string::npos);
  CHECK(r.out.find("committed 2 of 2") != std::string::npos);
  CHECK(r.out.find("dist_max") != std::string::npos);
  CHECK(run("session --config " + cfg.string() + " --policy nope").code == 2);
}

TEST_CASE("serve reports a taken port") {
  SessionManager mgr;
  HttpService holder(mgr);
  const auto port = holder.bind("127.0.0.1", 0);
  REQUIRE(port.has_value());
  const auto r = run("serve --port " + std::to_string(*port) + " --static /nonexistent");
  CHECK(r.code == 1);
  CHECK(r.out.find("API only") != std::string::npos);
  CHECK(r.out.find("cannot listen") != std::string::npos);
}

}  // TEST_SUITE
