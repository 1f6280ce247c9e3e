#include "qdt/interfaces/service.hpp"

#include <httplib.h>

#include <sstream>

#include "qdt/problem/problem.hpp"
#include "qdt/scalability/assessment.hpp"

namespace qdt::interfaces {

namespace {

constexpr const char* kJson = "application/json";

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream in(path.substr(0, path.find('?')));
  for (std::string p; std::getline(in, p, '/');)
    if (!p.empty()) parts.push_back(p);
  return parts;
}

HttpResponse error_response(ErrorCode code, const std::string& message) {
  return {http_status(code), error_body(code, message)};
}

}  // namespace

std::string to_string(RunState state) {
  switch (state) {
    case RunState::Validating: return "validating";
    case RunState::Running: return "running";
    case RunState::AwaitingQuery: return "awaiting_query";
    case RunState::Finished: return "finished";
    case RunState::Aborted: return "aborted";
  }
  return "unknown";
}

json RunHandle::to_json() const {
  json out{{"id", id},
           {"state", to_string(state)},
           {"links", {{"result", "/runs/" + id}, {"queries", "/runs/" + id + "/queries"}}}};
  if (result) out["result"] = result->to_json();
  if (!error_code.empty()) out["error"] = {{"code", error_code}, {"message", error_message}};
  return out;
}

// ---------------------------------------------------------------------------

RunManager::RunManager(std::shared_ptr<const tree::DecisionTree> tree, std::chrono::seconds retention,
                       std::chrono::milliseconds answer_timeout)
    : tree_(std::move(tree)), retention_(retention), answer_timeout_(answer_timeout) {
  board_.set_listener([this](const std::string& run_id) {
    // Pending set changed. Reading it under mu_ serializes concurrent
    // notifications so the last writer sees the current board.
    std::lock_guard lock(mu_);
    auto it = runs_.find(run_id);
    if (it == runs_.end()) return;
    RunState& cur = it->second->handle.state;
    if (cur == RunState::Finished || cur == RunState::Aborted) return;
    try {
      cur = board_.pending(run_id).empty() ? RunState::Running : RunState::AwaitingQuery;
    } catch (const Error&) {
      // run already closed on the board
    }
  });
}

RunManager::~RunManager() {
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(mu_);
    for (auto& [id, slot] : runs_) {
      board_.close_run(id);
      if (slot->worker.joinable()) threads.push_back(std::move(slot->worker));
    }
    for (auto& t : retired_) threads.push_back(std::move(t));
  }
  for (auto& t : threads) t.join();
  board_.set_listener(nullptr);
}

std::string RunManager::submit(RunRequest request) {
  prune();
  std::string id;
  auto slot = std::make_shared<Slot>();
  {
    std::lock_guard lock(mu_);
    id = "run-" + std::to_string(++next_);
    slot->handle.id = id;
    runs_[id] = slot;
  }
  board_.open_run(id);
  std::lock_guard lock(mu_);
  slot->worker = std::thread([this, id, request = std::move(request)]() mutable { execute(id, std::move(request)); });
  return id;
}

void RunManager::execute(const std::string& id, RunRequest request) {
  RunHandle done;
  done.id = id;
  try {
    const problem::ProblemInstance instance = problem::parse_instance(request.instance);
    const tree::PathSpec path = tree::PathSpec::from_json(request.path);
    tree::RunOptions opts;
    opts.run_id = id;
    opts.mode = request.mode;
    std::optional<query::ScriptedAnswers> scripted;
    std::optional<query::BoardAnswers> board;
    if (request.answers) {
      scripted.emplace(*request.answers);
      opts.answers = &*scripted;
    } else {
      board.emplace(board_, id, answer_timeout_);
      opts.answers = &*board;
    }
    set_state(id, RunState::Running);
    tree::RunResult result = tree_->run(instance, path, opts);
    done.state = result.status == "completed" ? RunState::Finished : RunState::Aborted;
    done.result = std::move(result);
  } catch (const Error& e) {
    done.state = RunState::Aborted;
    done.error_code = std::string(qdt::to_string(e.code()));
    done.error_message = e.what();
  } catch (const std::exception& e) {
    done.state = RunState::Aborted;
    done.error_code = std::string(qdt::to_string(ErrorCode::NodeFailure));
    done.error_message = e.what();
  }
  board_.close_run(id);
  {
    std::lock_guard lock(mu_);
    auto& slot = *runs_.at(id);
    slot.handle = std::move(done);
    slot.done_at = std::chrono::steady_clock::now();
  }
  done_cv_.notify_all();
}

void RunManager::set_state(const std::string& id, RunState state) {
  std::lock_guard lock(mu_);
  auto it = runs_.find(id);
  if (it == runs_.end()) return;
  RunState& cur = it->second->handle.state;
  if (cur == RunState::Finished || cur == RunState::Aborted) return;
  cur = state;
}

void RunManager::prune() {
  const auto now = std::chrono::steady_clock::now();
  std::lock_guard lock(mu_);
  for (auto it = runs_.begin(); it != runs_.end();) {
    const RunState s = it->second->handle.state;
    const bool done = s == RunState::Finished || s == RunState::Aborted;
    if (done && now - it->second->done_at >= retention_) {
      if (it->second->worker.joinable()) retired_.push_back(std::move(it->second->worker));
      it = runs_.erase(it);
    } else {
      ++it;
    }
  }
}

RunHandle RunManager::handle(const std::string& run_id) const {
  std::lock_guard lock(mu_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) fail(ErrorCode::UnknownRun, "run '" + run_id + "' does not exist");
  return it->second->handle;
}

RunHandle RunManager::wait(const std::string& run_id, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) fail(ErrorCode::UnknownRun, "run '" + run_id + "' does not exist");
  const auto slot = it->second;
  done_cv_.wait_for(lock, timeout, [&] {
    return slot->handle.state == RunState::Finished || slot->handle.state == RunState::Aborted;
  });
  return slot->handle;
}

std::vector<query::QueryBoard::Pending> RunManager::pending(const std::string& run_id) const {
  handle(run_id);  // UnknownRun
  try {
    return board_.pending(run_id);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnknownRun) return {};  // finished: nothing pending
    throw;
  }
}

void RunManager::answer(const std::string& qid, const json& value) { board_.answer(qid, value); }

std::vector<std::string> RunManager::run_ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, slot] : runs_) out.push_back(id);
  return out;
}

// ---------------------------------------------------------------------------

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownRun:
    case ErrorCode::UnknownQuery:
      return 404;
    case ErrorCode::AlreadyAnswered:
      return 409;
    case ErrorCode::InvalidAnswer:
    case ErrorCode::SchemaViolation:
    case ErrorCode::UnknownProblemClass:
    case ErrorCode::UnknownMode:
    case ErrorCode::InvalidMatrix:
    case ErrorCode::InvalidPathKey:
    case ErrorCode::InvalidConfig:
    case ErrorCode::EmptyDatabaseSlice:
      return 422;
    case ErrorCode::IoFailure:
      return 500;
    default:
      return 400;
  }
}

json error_body(ErrorCode code, const std::string& message) {
  return json{{"error", {{"code", std::string(to_string(code))}, {"message", message}}}};
}

struct Service::Server {
  httplib::Server http;
};

Service::Service(std::shared_ptr<const tree::DecisionTree> tree, ServiceOptions options)
    : tree_(tree), options_(std::move(options)), runs_(std::move(tree), options_.retention, options_.answer_timeout) {}

Service::~Service() { stop(); }

HttpResponse Service::handle(const std::string& method, const std::string& path, const std::string& body) {
  const std::vector<std::string> p = split_path(path);
  try {
    json doc = json::object();
    if (method == "POST" && !body.empty()) {
      doc = json::parse(body, nullptr, false);
      if (doc.is_discarded()) return error_response(ErrorCode::SchemaViolation, "request body is not valid JSON");
    }
    if (method == "GET" && p.size() == 1 && p[0] == "tree") return {200, tree_->to_json()};
    if (method == "GET" && p.size() == 1 && p[0] == "backends") return {200, tree_->request_info("backends")};
    if (method == "POST" && p.size() == 1 && p[0] == "runs") return post_run(doc);
    if (method == "GET" && p.size() == 1 && p[0] == "runs") return {200, runs_.run_ids()};
    if (method == "GET" && p.size() == 2 && p[0] == "runs") return {200, runs_.handle(p[1]).to_json()};
    if (method == "GET" && p.size() == 3 && p[0] == "runs" && p[2] == "queries") {
      json out = json::array();
      for (const auto& q : runs_.pending(p[1]))
        out.push_back(json{{"qid", q.qid}, {"run_id", q.run_id}, {"query", q.query.to_json()}});
      return {200, out};
    }
    if (method == "POST" && p.size() == 3 && p[0] == "queries" && p[2] == "answer") {
      if (!doc.is_object() || !doc.contains("value"))
        return error_response(ErrorCode::SchemaViolation, "answer body needs a 'value'");
      runs_.answer(p[1], doc["value"]);
      return {204, nullptr};
    }
    if (method == "POST" && p.size() == 1 && p[0] == "assessments") return post_assessment(doc);
    return {404, error_body(ErrorCode::UnknownTopic, "no endpoint " + method + " " + path)};
  } catch (const Error& e) {
    return error_response(e.code(), e.what());
  } catch (const std::exception& e) {
    return {400, error_body(ErrorCode::SchemaViolation, e.what())};
  }
}

HttpResponse Service::post_run(const json& body) {
  if (!body.is_object() || !body.contains("instance"))
    return error_response(ErrorCode::SchemaViolation, "run request needs an 'instance'");
  RunRequest req;
  req.instance = body["instance"];
  if (body.contains("path") && !body["path"].is_null()) req.path = body["path"];
  if (body.contains("mode")) req.mode = query::mode_from_string(body["mode"].get<std::string>());
  if (body.contains("answers")) req.answers = body["answers"];
  // reject a bad instance before a run exists
  problem::parse_instance(req.instance);
  const std::string id = runs_.submit(std::move(req));
  return {201, runs_.handle(id).to_json()};
}

HttpResponse Service::post_assessment(const json& body) {
  if (!body.is_object()) return error_response(ErrorCode::SchemaViolation, "assessment request must be a map");
  std::string db_path = body.value("database", options_.database);
  if (db_path.empty()) return error_response(ErrorCode::InvalidConfig, "no scaling database configured");
  const scalability::ScalingDatabase db = scalability::ScalingDatabase::load(db_path);
  std::optional<std::string> cls;
  if (body.contains("class")) cls = body["class"].get<std::string>();
  scalability::ProblemCharacteristics pc;
  if (body.contains("instance")) {
    pc = scalability::analyze_instance(problem::parse_instance(body["instance"]), db, cls);
  } else if (body.contains("qubo")) {
    pc = scalability::analyze_qubo(problem::QuboMatrix::from_json(body["qubo"]), db, cls);
  } else {
    return error_response(ErrorCode::SchemaViolation, "assessment request needs 'instance' or 'qubo'");
  }
  std::optional<std::pair<std::string, std::string>> combo;
  if (body.contains("combo")) {
    const json& c = body["combo"];
    if (!c.is_array() || c.size() != 2)
      return error_response(ErrorCode::SchemaViolation, "'combo' must be [vqa, optimizer]");
    combo = std::make_pair(c[0].get<std::string>(), c[1].get<std::string>());
  }
  scalability::Assessment a = scalability::assess(pc, db, combo);
  json out = a.to_json();
  out["table"] = scalability::render_table(a);
  return {200, out};
}

bool Service::listen(const std::string& host, int port) {
  if (!server_) server_ = std::make_unique<Server>();
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse r = handle(req.method, req.path, req.body);
    res.status = r.status;
    if (r.status != 204) res.set_content(r.body.dump(), kJson);
  };
  server_->http.Get(".*", route);
  server_->http.Post(".*", route);
  return server_->http.listen(host, port);
}

int Service::start_background(const std::string& host) {
  server_ = std::make_unique<Server>();
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse r = handle(req.method, req.path, req.body);
    res.status = r.status;
    if (r.status != 204) res.set_content(r.body.dump(), kJson);
  };
  server_->http.Get(".*", route);
  server_->http.Post(".*", route);
  const int port = server_->http.bind_to_any_port(host);
  if (port < 0) fail(ErrorCode::IoFailure, "cannot bind a port on " + host);
  background_ = std::thread([this] { server_->http.listen_after_bind(); });
  server_->http.wait_until_ready();
  return port;
}

void Service::stop() {
  if (server_) server_->http.stop();
  if (background_.joinable()) background_.join();
}

}  // namespace qdt::interfaces
