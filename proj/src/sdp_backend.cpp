#include "sgcert/sdp.hpp"

#include "sgcert/error.hpp"

#include <chrono>
#include <map>
#include <mutex>

namespace sgcert::sdp {

namespace {

struct Registry {
  std::mutex mu;
  std::map<std::string, BackendFactory> factories;

  Registry() {
    factories["ipm"] = [] { return std::make_unique<InteriorPointBackend>("auto"); };
    factories["ipm-dense"] = [] { return std::make_unique<InteriorPointBackend>("dense"); };
    factories["ipm-cg"] = [] { return std::make_unique<InteriorPointBackend>("cg"); };
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

std::mutex& backend_lock(const std::string& name) {
  static std::mutex table_mu;
  static std::map<std::string, std::mutex> locks;
  std::lock_guard guard(table_mu);
  return locks[name];
}

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::feasible:
      return "feasible";
    case Status::infeasible:
      return "infeasible";
    case Status::unknown:
      break;
  }
  return "unknown";
}

void register_backend(const std::string& key, BackendFactory factory) {
  auto& r = registry();
  std::lock_guard guard(r.mu);
  r.factories[key] = std::move(factory);
}

std::unique_ptr<Backend> make_backend(const std::string& key) {
  auto& r = registry();
  BackendFactory f;
  {
    std::lock_guard guard(r.mu);
    auto it = r.factories.find(key.empty() ? default_backend_key() : key);
    if (it == r.factories.end()) {
      std::string known;
      for (const auto& [k, v] : r.factories) known += (known.empty() ? "" : ", ") + k;
      throw InvalidArgument("unknown SDP backend '" + key + "' (available: " + known + ")");
    }
    f = it->second;
  }
  return f();
}

std::vector<std::string> backend_keys() {
  auto& r = registry();
  std::lock_guard guard(r.mu);
  std::vector<std::string> keys;
  for (const auto& [k, v] : r.factories) keys.push_back(k);
  return keys;
}

std::string default_backend_key() { return "ipm"; }

SolveReport solve_guarded(const Backend& backend, const LmiProblem& problem, const SolveSettings& settings) {
  std::unique_lock<std::mutex> lock;
  if (!backend.reentrant()) lock = std::unique_lock(backend_lock(backend.name()));
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep = backend.solve(problem, settings);
  rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace sgcert::sdp
