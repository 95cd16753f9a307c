#include "fairalloc/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <random>

#include "fairalloc/metrics.hpp"
#include "fairalloc/solvers.hpp"

namespace fairalloc {

struct SessionManager::Session {
  std::string id;
  std::shared_ptr<const Instance> instance;
  PolicyId policy = PolicyId::HopeOnline;
  std::vector<PolicyId> whatif_policies;
  PolicyState state;
  std::vector<std::vector<double>> committed;
  std::vector<std::optional<double>> thresholds;
  std::string created;
  std::mutex mutex;

  Session(std::shared_ptr<const Instance> inst) : instance(inst), state(std::move(inst)) {}
};

namespace {

std::string new_session_id() {
  static std::mutex m;
  static std::mt19937_64 gen{std::random_device{}()};
  std::lock_guard lock(m);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(gen()));
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

bool unit_sizes(const Instance& inst) {
  return std::all_of(inst.agents.begin(), inst.agents.end(), [](const AgentProfile& a) { return a.size == 1.0; });
}

bool usable(PolicyId p, const Instance& inst) {
  if (p == PolicyId::Offline || !supports_family(p, inst.family)) return false;
  return p != PolicyId::MaxMin || unit_sizes(inst);
}

// Maps a posted type onto the atom of the agent's support it denotes. Atoms
// match coordinatewise within 1e-6 relative (absolute below 1).
AgentType resolve_type(const json& body, const Instance& inst, std::size_t agent) {
  const json* raw = nullptr;
  for (const char* key : {"type", "theta", "demand"}) {
    if (body.is_object() && body.contains(key)) {
      raw = &body.at(key);
      break;
    }
  }
  if (raw == nullptr) throw ApiError(400, "missing type", "body needs {\"type\": ...}");
  AgentType t;
  try {
    t = type_from_json(*raw, inst.family);
  } catch (const std::exception& e) {
    throw ApiError(400, "malformed type", e.what());
  }
  const auto& dist = inst.agents[agent].distribution;
  for (const auto& atom : dist.support) {
    if (atom.dimension() != t.dimension()) continue;
    bool same = true;
    for (std::size_t k = 0; k < t.dimension() && same; ++k) {
      const double a = atom.values()[k];
      same = std::fabs(a - t.values()[k]) <= 1e-6 * std::max(1.0, std::fabs(a));
    }
    if (same) return atom;
  }
  json support = json::array();
  for (const auto& atom : dist.support) support.push_back(type_to_json(atom));
  throw ApiError(422, "type not in support", {{"agent", agent}, {"type", *raw}, {"support", support}});
}

json step_json(const StepOutput& out) {
  return {{"allocation", out.allocation}, {"threshold", optional_number(out.threshold)}, {"converged", out.converged}};
}

json whatif_block(const std::vector<PolicyId>& policies, const PolicyState& state, const AgentType& type) {
  json block = json::object();
  for (PolicyId p : policies) {
    try {
      block[std::string(policy_name(p))] = step_json(propose(p, state, type));
    } catch (const std::exception& e) {
      block[std::string(policy_name(p))] = {{"error", e.what()}};
    }
  }
  return block;
}

json parse_body(const std::string& text) {
  if (text.empty()) return json::object();
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ApiError(400, "malformed JSON", e.what());
  }
}

}  // namespace

SessionManager::SessionManager(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 1)) {}
SessionManager::~SessionManager() = default;

std::size_t SessionManager::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ApiError(404, "unknown session", id);
  order_.splice(order_.begin(), order_, it->second.second);
  return it->second.first;
}

json SessionManager::create(const json& body) {
  Instance inst;
  try {
    inst = instance_from_json(body);
  } catch (const std::exception& e) {
    throw ApiError(400, "invalid config", e.what());
  }
  if (auto violations = validate_instance(inst); !violations.empty()) {
    json detail = json::array();
    for (const auto& v : violations) {
      detail.push_back({{"agent", v.agent ? json(*v.agent) : json(nullptr)}, {"message", v.message}});
    }
    throw ApiError(400, "invalid instance", detail);
  }

  auto shared = std::make_shared<const Instance>(std::move(inst));
  auto s = std::make_shared<Session>(shared);
  try {
    s->policy = parse_policy(body.value("policy", std::string("hope_online")));
    if (body.contains("whatif_policies")) {
      for (const auto& p : body.at("whatif_policies")) s->whatif_policies.push_back(parse_policy(p.get<std::string>()));
    } else {
      for (PolicyId p : all_policies()) {
        if (usable(p, *shared)) s->whatif_policies.push_back(p);
      }
    }
  } catch (const std::exception& e) {
    throw ApiError(400, "invalid policy", e.what());
  }
  if (!usable(s->policy, *shared)) {
    throw ApiError(400, "invalid policy", std::string(policy_name(s->policy)) + " cannot run this instance online");
  }
  for (PolicyId p : s->whatif_policies) {
    if (!usable(p, *shared)) {
      throw ApiError(400, "invalid policy", std::string(policy_name(p)) + " cannot run this instance online");
    }
  }
  s->id = new_session_id();
  s->created = utc_now();

  json summary = {
      {"id", s->id},
      {"n", shared->agent_count()},
      {"family", to_string(shared->family)},
      {"policy", policy_name(s->policy)},
      {"budgets", shared->resources.budgets},
      {"resource_names", shared->resources.names},
  };

  std::lock_guard lock(mutex_);
  order_.push_front(s->id);
  sessions_.emplace(s->id, std::make_pair(s, order_.begin()));
  while (sessions_.size() > capacity_) {
    sessions_.erase(order_.back());
    order_.pop_back();
  }
  return summary;
}

json SessionManager::get(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  const Instance& inst = *s->instance;

  json committed = json::array();
  for (std::size_t i = 0; i < s->committed.size(); ++i) {
    committed.push_back({{"index", i},
                         {"type", type_to_json(s->state.observed[i])},
                         {"allocation", s->committed[i]},
                         {"threshold", optional_number(s->thresholds[i])}});
  }
  json policies = json::array();
  for (PolicyId p : s->whatif_policies) policies.push_back(policy_name(p));

  json out = {
      {"id", s->id},
      {"created", s->created},
      {"policy", policy_name(s->policy)},
      {"whatif_policies", policies},
      {"family", to_string(inst.family)},
      {"n", inst.agent_count()},
      {"index", s->state.index},
      {"budgets", inst.resources.budgets},
      {"resource_names", inst.resources.names},
      {"sizes", [&] {
         json sizes = json::array();
         for (const auto& a : inst.agents) sizes.push_back(a.size);
         return sizes;
       }()},
      {"remaining", s->state.remaining},
      {"committed", committed},
      {"complete", s->state.complete()},
  };

  if (s->state.complete()) {
    Allocation x(inst.agent_count(), inst.resource_count());
    for (std::size_t i = 0; i < s->committed.size(); ++i) std::copy(s->committed[i].begin(), s->committed[i].end(), x.row(i).begin());
    const OfflineSolution hindsight = offline_solve(inst, s->state.observed);
    MetricRecord m = evaluate(inst, s->state.observed, x, hindsight.allocation);
    m.policy = s->policy;
    m.converged = hindsight.program.converged;
    out["hindsight"] = {{"allocation", allocation_to_json(hindsight.allocation)},
                        {"threshold", optional_number(hindsight.program.threshold)}};
    out["metrics"] = metrics_to_json(m);
  }
  return out;
}

void SessionManager::remove(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ApiError(404, "unknown session", id);
  order_.erase(it->second.second);
  sessions_.erase(it);
}

json SessionManager::observe(const std::string& id, const json& body) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  if (s->state.complete()) throw ApiError(409, "episode complete", s->id);
  const std::size_t i = s->state.index;
  const AgentType type = resolve_type(body, *s->instance, i);

  json block = whatif_block(s->whatif_policies, s->state, type);
  StepOutput out;
  try {
    out = propose(s->policy, s->state, type);
  } catch (const std::exception& e) {
    throw ApiError(500, "policy failed", e.what());
  }
  // Nothing below can fail, so the step is all or nothing.
  commit(s->state, type, out.allocation);
  s->committed.push_back(out.allocation);
  s->thresholds.push_back(out.threshold);

  return {
      {"index", i},
      {"type", type_to_json(type)},
      {"policy", policy_name(s->policy)},
      {"allocation", out.allocation},
      {"threshold", optional_number(out.threshold)},
      {"converged", out.converged},
      {"remaining", s->state.remaining},
      {"complete", s->state.complete()},
      {"whatif", block},
  };
}

json SessionManager::whatif(const std::string& id, const json& body) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  if (s->state.complete()) throw ApiError(409, "episode complete", s->id);
  const std::size_t i = s->state.index;
  const AgentType type = resolve_type(body, *s->instance, i);
  return {
      {"index", i},
      {"type", type_to_json(type)},
      {"remaining", s->state.remaining},
      {"whatif", whatif_block(s->whatif_policies, s->state, type)},
  };
}

struct HttpService::Impl {
  SessionManager& sessions;
  httplib::Server server;

  explicit Impl(SessionManager& m) : sessions(m) {}
};

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <class F>
void guarded(httplib::Response& res, F&& f) {
  try {
    reply(res, 200, f());
  } catch (const ApiError& e) {
    reply(res, e.status(), e.body());
  } catch (const std::exception& e) {
    reply(res, 500, {{"error", "internal error"}, {"detail", e.what()}});
  }
}

}  // namespace

HttpService::HttpService(SessionManager& sessions) : impl_(std::make_unique<Impl>(sessions)) {
  auto& srv = impl_->server;
  auto& mgr = impl_->sessions;
  const std::string id = R"(/sessions/([0-9a-f]+))";

  // The library default is SO_REUSEPORT, which lets a second server share a
  // port that is already taken instead of failing.
  srv.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });

  srv.Post("/sessions", [&mgr](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return mgr.create(parse_body(req.body)); });
  });
  srv.Get(id, [&mgr](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return mgr.get(req.matches[1]); });
  });
  srv.Delete(id, [&mgr](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      mgr.remove(req.matches[1]);
      return json{{"deleted", std::string(req.matches[1])}};
    });
  });
  srv.Post(id + "/observe", [&mgr](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return mgr.observe(req.matches[1], parse_body(req.body)); });
  });
  srv.Post(id + "/whatif", [&mgr](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return mgr.whatif(req.matches[1], parse_body(req.body)); });
  });
  srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.status == 404 && res.body.empty()) {
      reply(res, 404, {{"error", "not found"}, {"detail", req.path}});
    }
  });
}

HttpService::~HttpService() = default;

bool HttpService::mount_static(const std::string& directory) {
  if (!std::filesystem::is_directory(directory)) return false;
  return impl_->server.set_mount_point("/", directory);
}

std::optional<int> HttpService::bind(const std::string& host, int port) {
  if (port == 0) {
    const int p = impl_->server.bind_to_any_port(host);
    return p > 0 ? std::optional<int>(p) : std::nullopt;
  }
  return impl_->server.bind_to_port(host, port) ? std::optional<int>(port) : std::nullopt;
}

bool HttpService::run() { return impl_->server.listen_after_bind(); }

void HttpService::stop() { impl_->server.stop(); }

}  // namespace fairalloc
