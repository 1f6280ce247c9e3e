#include "qdt/quantum/backend.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "qdt/common/error.hpp"

namespace qdt::quantum {

json BackendRecord::to_json() const {
  return json{{"id", id}, {"provider", provider}, {"qubit_count", qubit_count}, {"properties", properties}};
}

BackendRecord BackendRecord::from_json(const json& doc) {
  BackendRecord r;
  if (!doc.is_object() || !doc.contains("id") || !doc.contains("provider"))
    fail(ErrorCode::SchemaViolation, "backend record needs 'id' and 'provider'");
  r.id = doc.at("id").get<std::string>();
  r.provider = doc.at("provider").get<std::string>();
  r.qubit_count = doc.value("qubit_count", std::size_t{0});
  r.properties = doc.value("properties", json::object());
  return r;
}

LocalSimulator::LocalSimulator(std::string id, std::string provider, std::size_t qubit_cap) {
  record_.id = std::move(id);
  record_.provider = std::move(provider);
  record_.qubit_count = std::min(qubit_cap, kQubitCap);
  record_.properties = json{{"simulated", true}, {"connectivity", "all_to_all"}, {"queue_length", 0}};
}

void LocalSimulator::wait_queue() const {
  const double ms = latency_ms_.load();
  if (ms > 0.0) std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
}

void LocalSimulator::on_properties(const json& properties) {
  latency_ms_.store(properties.value("queue_latency_ms", 0.0));
}

ShotResult LocalSimulator::run(const Circuit& circuit, std::uint64_t n_shots, std::uint64_t seed) {
  wait_queue();
  return sample_probabilities(probabilities(circuit), circuit.n_qubits(), n_shots, seed);
}

std::vector<double> LocalSimulator::probabilities(const Circuit& circuit) {
  return quantum::probabilities(simulate_statevector(circuit, record_.qubit_count));
}

void BackendRegistry::register_backend(BackendRecord record, std::shared_ptr<Backend> impl) {
  if (record.id.empty()) fail(ErrorCode::SchemaViolation, "backend id must not be empty");
  if (record.provider.empty()) fail(ErrorCode::SchemaViolation, "backend provider must not be empty");
  std::lock_guard lock(mu_);
  for (const Entry& e : entries_)
    if (e.record.id == record.id) fail(ErrorCode::DuplicateId, "backend '" + record.id + "' already registered");
  if (impl) impl->on_properties(record.properties);
  entries_.push_back({std::move(record), std::move(impl)});
}

std::vector<BackendRecord> BackendRegistry::list_backends() const {
  std::vector<BackendRecord> out;
  {
    std::lock_guard lock(mu_);
    for (const Entry& e : entries_) out.push_back(e.record);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

std::optional<BackendRecord> BackendRegistry::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  for (const Entry& e : entries_)
    if (e.record.id == id) return e.record;
  return std::nullopt;
}

void BackendRegistry::update_properties(const std::string& id, const json& patch) {
  std::lock_guard lock(mu_);
  for (Entry& e : entries_)
    if (e.record.id == id) {
      e.record.properties.merge_patch(patch);
      if (e.impl) e.impl->on_properties(e.record.properties);
      return;
    }
  fail(ErrorCode::UnknownBackend, "unknown backend '" + id + "'");
}

std::shared_ptr<Backend> BackendRegistry::instance(const std::string& id) const {
  std::lock_guard lock(mu_);
  for (const Entry& e : entries_)
    if (e.record.id == id) {
      if (!e.impl) fail(ErrorCode::UnknownBackend, "backend '" + id + "' has no local executor");
      return e.impl;
    }
  fail(ErrorCode::UnknownBackend, "unknown backend '" + id + "'");
}

bool BackendRegistry::empty() const {
  std::lock_guard lock(mu_);
  return entries_.empty();
}

}  // namespace qdt::quantum
