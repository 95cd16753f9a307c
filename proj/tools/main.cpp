// fairalloc: batch experiments, preset tables, a terminal session and the
// HTTP service.
//
// Exit codes: 0 ok, 1 runtime failure (including failed invariant checks),
// 2 usage error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "fairalloc/harness.hpp"
#include "fairalloc/json_io.hpp"
#include "fairalloc/presets.hpp"
#include "fairalloc/service.hpp"

using namespace fairalloc;

namespace {

constexpr int kUsage = 2;

struct RunFlags {
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string records;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--reps", f.reps, "Replications (overrides the config)")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Base seed (overrides the config)");
  cmd->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--records", f.records, "Also write per-replication records to this CSV");
}

int run_and_write(ExperimentConfig config, const RunFlags& f, const std::string& out) {
  if (f.reps) config.replications = *f.reps;
  if (f.seed) config.seed = *f.seed;
  if (f.workers) config.workers = *f.workers;

  const ExperimentResult res = run_experiment(config);
  export_csv(res.rows, out);
  if (!f.records.empty()) export_records_csv(res.records, f.records);

  std::cout << "replications=" << config.replications << " policies=" << config.policies.size()
            << " non_converged=" << res.non_converged << " bound_violations=" << res.violations.size() << '\n';
  for (const auto& v : res.violations) std::cerr << "violation: " << v << '\n';
  return res.violations.empty() ? 0 : 1;
}

std::optional<std::vector<double>> parse_numbers(const std::string& line) {
  std::string cleaned = line;
  for (char& c : cleaned) {
    if (c == ',' || c == '[' || c == ']') c = ' ';
  }
  std::istringstream in(cleaned);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) return std::nullopt;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  if (out.empty()) return std::nullopt;
  return out;
}

void print_summary(const json& state) {
  std::cout << "committed " << state.at("committed").size() << " of " << state.at("n") << " agents\n";
  std::cout << "remaining " << state.at("remaining").dump() << '\n';
  if (state.contains("metrics")) {
    std::cout << "hindsight " << state.at("hindsight").at("allocation").dump() << '\n';
    for (const auto& [name, value] : state.at("metrics").items()) std::cout << name << ' ' << value.dump() << '\n';
  }
}

int run_session(const std::string& config_path, const std::string& policy) {
  std::ifstream f(config_path);
  if (!f) throw ConfigError("cannot read config " + config_path);
  json body = json::parse(f);
  body["policy"] = policy;

  SessionManager mgr(1);
  json created;
  try {
    created = mgr.create(body);
  } catch (const ApiError& e) {
    std::cerr << e.what() << ": " << e.body().at("detail").dump() << '\n';
    return 1;
  }
  const std::string id = created.at("id");
  const std::size_t n = created.at("n");
  std::cout << "session n=" << n << " policy=" << policy << " budgets=" << created.at("budgets").dump() << '\n';

  std::string line;
  for (std::size_t i = 0; i < n;) {
    std::cout << "agent " << i << " type> " << std::flush;
    if (!std::getline(std::cin, line)) {
      std::cout << '\n';
      break;
    }
    const auto values = parse_numbers(line);
    if (!values) {
      std::cout << "could not read a number or vector, try again\n";
      continue;
    }
    const json type = values->size() == 1 ? json(values->front()) : json(*values);
    try {
      const json r = mgr.observe(id, {{"type", type}});
      std::cout << "X_" << i << " = " << r.at("allocation").dump() << "  remaining " << r.at("remaining").dump();
      if (!r.at("threshold").is_null()) std::cout << "  level " << r.at("threshold").dump();
      std::cout << '\n';
      ++i;
    } catch (const ApiError& e) {
      std::cout << e.what() << ": " << e.body().at("detail").dump() << '\n';
    }
  }
  print_summary(mgr.get(id));
  return 0;
}

int run_serve(const std::string& host, int port, const std::string& static_dir, std::size_t capacity) {
  SessionManager mgr(capacity);
  HttpService http(mgr);
  if (!static_dir.empty() && !http.mount_static(static_dir)) {
    std::cerr << "static directory " << static_dir << " not found; serving the API only\n";
  }
  const auto bound = http.bind(host, port);
  if (!bound) {
    std::cerr << "cannot listen on " << host << ':' << port << '\n';
    return 1;
  }
  std::cout << "listening on http://" << host << ':' << *bound << std::endl;
  return http.run() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online fair allocation: policies, benchmarks and live sessions"};
  app.require_subcommand(1);

  std::string config_path, out_path, preset, policy = "hope_online";
  RunFlags run_flags;
  bool emit_config = false;

  auto* simulate = app.add_subcommand("simulate", "Run a Monte-Carlo experiment from a JSON config");
  simulate->add_option("--config", config_path, "Experiment config")->required();
  simulate->add_option("--out", out_path, "Aggregate CSV output")->required();
  add_run_flags(simulate, run_flags);

  auto* table = app.add_subcommand("table", "Run a built-in experiment preset");
  table->add_option("--preset", preset, "Preset name")->required()->check(CLI::IsMember(preset_names()));
  table->add_option("--out", out_path, "Aggregate CSV output (or config JSON with --emit-config)")->required();
  table->add_flag("--emit-config", emit_config, "Write the resolved preset config instead of running it");
  add_run_flags(table, run_flags);

  auto* session = app.add_subcommand("session", "Allocate interactively, one agent per input line");
  session->add_option("--config", config_path, "Instance config")->required();
  session->add_option("--policy", policy, "Policy to commit")->check([](const std::string& s) {
    try {
      parse_policy(s);
      return std::string();
    } catch (const std::exception& e) {
      return std::string(e.what());
    }
  });

  std::string host = "127.0.0.1", static_dir;
  int port = 8080;
  std::size_t capacity = 256;
  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--static", static_dir, "Directory with console files");
  serve->add_option("--capacity", capacity, "Maximum live sessions")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*simulate) return run_and_write(load_config(config_path), run_flags, out_path);
    if (*table) {
      const json cfg = preset_config(preset);
      if (emit_config) {
        json resolved = cfg;
        const ExperimentConfig parsed = config_from_json(cfg);
        resolved["budgets"] = parsed.instance.resources.budgets;
        resolved.erase("budget");
        resolved["n"] = parsed.instance.agent_count();
        std::ofstream f(out_path);
        if (!f) throw std::runtime_error("cannot open " + out_path + " for writing");
        f << resolved.dump(2) << '\n';
        return 0;
      }
      return run_and_write(config_from_json(cfg), run_flags, out_path);
    }
    if (*session) return run_session(config_path, policy);
    if (*serve) return run_serve(host, port, static_dir, capacity);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kUsage;
}
