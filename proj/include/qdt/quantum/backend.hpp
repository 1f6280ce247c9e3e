#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "qdt/quantum/simulator.hpp"

namespace qdt::quantum {

/// Registry entry. `properties` is free-form; recognised keys are
/// "simulated", "connectivity", "queue_length" and "queue_latency_ms".
struct BackendRecord {
  std::string id;
  std::string provider;
  std::size_t qubit_count = 0;
  json properties = json::object();

  json to_json() const;
  static BackendRecord from_json(const json& doc);
};

/// Execution interface a provider node hands to VQA nodes.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual const BackendRecord& record() const = 0;
  virtual ShotResult run(const Circuit& circuit, std::uint64_t n_shots, std::uint64_t seed) = 0;
  virtual std::vector<double> probabilities(const Circuit& circuit) = 0;
  /// Called by the registry after its copy of the properties changed.
  virtual void on_properties(const json& properties) { (void)properties; }
};

class LocalSimulator final : public Backend {
 public:
  explicit LocalSimulator(std::string id = "local_simulator",
                          std::string provider = "simulator_backend",
                          std::size_t qubit_cap = kQubitCap);

  const BackendRecord& record() const override { return record_; }
  ShotResult run(const Circuit& circuit, std::uint64_t n_shots, std::uint64_t seed) override;
  std::vector<double> probabilities(const Circuit& circuit) override;
  void on_properties(const json& properties) override;

 private:
  void wait_queue() const;

  BackendRecord record_;
  std::atomic<double> latency_ms_{0.0};
};

class BackendRegistry {
 public:
  void register_backend(BackendRecord record, std::shared_ptr<Backend> impl = nullptr);
  /// Snapshot sorted by id.
  std::vector<BackendRecord> list_backends() const;
  std::optional<BackendRecord> find(const std::string& id) const;
  /// Merges `patch` into the record's properties.
  void update_properties(const std::string& id, const json& patch);
  std::shared_ptr<Backend> instance(const std::string& id) const;
  bool empty() const;

 private:
  struct Entry {
    BackendRecord record;
    std::shared_ptr<Backend> impl;
  };

  mutable std::mutex mu_;
  std::vector<Entry> entries_;
};

}  // namespace qdt::quantum
