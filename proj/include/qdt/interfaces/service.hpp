#pragma once

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qdt/common/error.hpp"
#include "qdt/common/json.hpp"
#include "qdt/query/query.hpp"
#include "qdt/tree/tree.hpp"

namespace qdt::interfaces {

enum class RunState { Validating, Running, AwaitingQuery, Finished, Aborted };

std::string to_string(RunState state);

struct RunRequest {
  json instance;
  json path = json::object();
  std::optional<query::Mode> mode;
  /// Scripted answers for manual mode; absent means answers come through
  /// the query board.
  std::optional<json> answers;
};

/// Snapshot of one submitted run.
struct RunHandle {
  std::string id;
  RunState state = RunState::Validating;
  std::optional<tree::RunResult> result;
  /// Set when the run could not start (bad instance, undeclared path key).
  std::string error_code;
  std::string error_message;

  json to_json() const;
};

/// Owns every run of one tree. Each run executes on its own thread; manual
/// runs post their queries to a shared board and block only themselves.
class RunManager {
 public:
  explicit RunManager(std::shared_ptr<const tree::DecisionTree> tree,
                      std::chrono::seconds retention = std::chrono::hours(24),
                      std::chrono::milliseconds answer_timeout = query::kDefaultAnswerTimeout);
  ~RunManager();
  RunManager(const RunManager&) = delete;
  RunManager& operator=(const RunManager&) = delete;

  /// Starts a run and returns its id.
  std::string submit(RunRequest request);
  /// Throws UnknownRun.
  RunHandle handle(const std::string& run_id) const;
  /// Blocks until the run is finished or aborted, or the timeout passes.
  RunHandle wait(const std::string& run_id, std::chrono::milliseconds timeout) const;
  /// Queries blocking the run. Throws UnknownRun.
  std::vector<query::QueryBoard::Pending> pending(const std::string& run_id) const;
  /// Throws UnknownQuery, AlreadyAnswered or InvalidAnswer.
  void answer(const std::string& qid, const json& value);
  std::vector<std::string> run_ids() const;
  const tree::DecisionTree& tree() const { return *tree_; }

 private:
  struct Slot {
    RunHandle handle;
    std::chrono::steady_clock::time_point done_at;
    std::thread worker;
  };

  void execute(const std::string& id, RunRequest request);
  void set_state(const std::string& id, RunState state);
  void prune();

  std::shared_ptr<const tree::DecisionTree> tree_;
  std::chrono::seconds retention_;
  std::chrono::milliseconds answer_timeout_;
  query::QueryBoard board_;
  mutable std::mutex mu_;
  mutable std::condition_variable done_cv_;
  std::map<std::string, std::shared_ptr<Slot>> runs_;
  std::vector<std::thread> retired_;
  std::uint64_t next_ = 0;
};

struct HttpResponse {
  int status = 200;
  json body;
};

/// HTTP status for an error code: 404 unknown run or query, 409 repeated
/// answer, 422 validation failures, 400 otherwise.
int http_status(ErrorCode code);
json error_body(ErrorCode code, const std::string& message);

struct ServiceOptions {
  /// Database for POST /assessments when the request names none.
  std::string database;
  std::chrono::seconds retention = std::chrono::hours(24);
  std::chrono::milliseconds answer_timeout = query::kDefaultAnswerTimeout;
};

/// JSON API over one tree:
///   POST /runs, GET /runs/{id}, GET /runs/{id}/queries,
///   POST /queries/{qid}/answer, GET /backends, POST /assessments, GET /tree.
class Service {
 public:
  Service(std::shared_ptr<const tree::DecisionTree> tree, ServiceOptions options = {});

  /// Routes one request without a socket; used by listen() and tests.
  HttpResponse handle(const std::string& method, const std::string& path, const std::string& body);

  /// Serves until stop() is called. Returns false if the port cannot be bound.
  bool listen(const std::string& host, int port);
  /// Binds to a free port and serves on a background thread; returns the port.
  int start_background(const std::string& host = "127.0.0.1");
  void stop();
  ~Service();

  RunManager& runs() { return runs_; }

 private:
  HttpResponse post_run(const json& body);
  HttpResponse post_assessment(const json& body);

  std::shared_ptr<const tree::DecisionTree> tree_;
  ServiceOptions options_;
  RunManager runs_;
  struct Server;
  std::unique_ptr<Server> server_;
  std::thread background_;
};

}  // namespace qdt::interfaces
