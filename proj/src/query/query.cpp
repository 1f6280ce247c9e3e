#include "qdt/query/query.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <queue>
#include <regex>
#include <set>
#include <sstream>

#include "qdt/common/error.hpp"

namespace qdt::query {

namespace {

constexpr const char* kKindNames[] = {"integer", "real", "file_path", "single_choice", "multi_value"};

[[noreturn]] void reject(const Query& q, const std::string& why) {
  fail(ErrorCode::InvalidAnswer, "query '" + q.id + "': " + why);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const Query& q, const json& raw) {
  if (raw.is_number()) return raw.get<double>();
  if (!raw.is_string()) reject(q, "expected a number");
  const std::string text = trim(raw.get<std::string>());
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    reject(q, "'" + text + "' is not a number");
  }
  if (used != text.size()) reject(q, "'" + text + "' is not a number");
  return v;
}

void check_bounds(const Query& q, double v) {
  if (!std::isfinite(v)) reject(q, "value must be finite");
  if (q.validator.min && v < *q.validator.min) reject(q, "value below minimum " + json(*q.validator.min).dump());
  if (q.validator.max && v > *q.validator.max) reject(q, "value above maximum " + json(*q.validator.max).dump());
}

std::string as_option_text(const json& raw) {
  if (raw.is_string()) return trim(raw.get<std::string>());
  return raw.dump();
}

void check_option(const Query& q, const std::string& v) {
  if (std::find(q.options.begin(), q.options.end(), v) == q.options.end())
    reject(q, "'" + v + "' is not one of the options");
}

}  // namespace

std::string to_string(QueryKind kind) { return kKindNames[static_cast<int>(kind)]; }

QueryKind query_kind_from_string(const std::string& text) {
  for (int i = 0; i < 5; ++i)
    if (text == kKindNames[i]) return static_cast<QueryKind>(i);
  fail(ErrorCode::InvalidConfig, "unknown query kind '" + text + "'");
}

std::string to_string(Mode mode) { return mode == Mode::Automatic ? "automatic" : "manual"; }

Mode mode_from_string(const std::string& text) {
  if (text == "automatic" || text == "auto") return Mode::Automatic;
  if (text == "manual") return Mode::Manual;
  fail(ErrorCode::InvalidConfig, "unknown automation mode '" + text + "'");
}

json Validator::to_json() const {
  json out = json::object();
  if (min) out["min"] = *min;
  if (max) out["max"] = *max;
  if (!pattern.empty()) out["pattern"] = pattern;
  return out;
}

json Query::coerce(const json& raw) const {
  switch (kind) {
    case QueryKind::Integer: {
      const double v = parse_number(*this, raw);
      if (v != std::floor(v)) reject(*this, "expected an integer");
      check_bounds(*this, v);
      return json(static_cast<std::int64_t>(v));
    }
    case QueryKind::Real: {
      const double v = parse_number(*this, raw);
      check_bounds(*this, v);
      return json(v);
    }
    case QueryKind::FilePath: {
      if (!raw.is_string()) reject(*this, "expected a path");
      const std::string path = trim(raw.get<std::string>());
      if (path.empty()) reject(*this, "path is empty");
      if (!validator.pattern.empty() && !std::regex_match(path, std::regex(validator.pattern)))
        reject(*this, "'" + path + "' does not match " + validator.pattern);
      return json(path);
    }
    case QueryKind::SingleChoice: {
      if (!raw.is_string() && !raw.is_number()) reject(*this, "expected one option");
      const std::string v = as_option_text(raw);
      check_option(*this, v);
      return json(v);
    }
    case QueryKind::MultiValue: {
      std::vector<json> items;
      if (raw.is_array()) {
        items.assign(raw.begin(), raw.end());
      } else if (raw.is_string()) {
        std::stringstream in(raw.get<std::string>());
        for (std::string part; std::getline(in, part, ',');) items.emplace_back(trim(part));
      } else {
        reject(*this, "expected a list");
      }
      if (items.empty()) reject(*this, "list is empty");
      json out = json::array();
      std::set<std::string> seen;
      for (const json& item : items) {
        json value;
        if (!options.empty()) {
          const std::string v = as_option_text(item);
          check_option(*this, v);
          value = v;
        } else if (item.is_number() || validator.min || validator.max) {
          const double v = parse_number(*this, item);
          check_bounds(*this, v);
          value = v;
        } else if (item.is_string()) {
          value = trim(item.get<std::string>());
        } else {
          reject(*this, "list items must be scalars");
        }
        if (!seen.insert(value.dump()).second) reject(*this, "duplicate value " + value.dump());
        out.push_back(std::move(value));
      }
      return out;
    }
  }
  reject(*this, "unsupported kind");
}

bool Query::accepts(const json& raw) const {
  try {
    coerce(raw);
    return true;
  } catch (const Error&) {
    return false;
  }
}

void Query::check() const {
  if (id.empty()) fail(ErrorCode::InvalidConfig, "query without id");
  if ((kind == QueryKind::SingleChoice) && options.empty())
    fail(ErrorCode::InvalidConfig, "query '" + id + "': choice query without options");
  if (!default_value.is_null() && !accepts(default_value))
    fail(ErrorCode::InvalidConfig, "query '" + id + "': default violates the validator");
  if (recommendation && !accepts(recommendation->value))
    fail(ErrorCode::InvalidConfig, "query '" + id + "': recommendation violates the validator");
}

json Query::to_json() const {
  json out{{"id", id},
           {"kind", to_string(kind)},
           {"prompt", prompt},
           {"options", options},
           {"default", default_value},
           {"validator", validator.to_json()}};
  out["recommendation"] =
      recommendation ? json{{"value", recommendation->value}, {"rationale", recommendation->rationale}} : json(nullptr);
  if (!path_key.empty()) out["path_key"] = path_key;
  return out;
}

ScriptedAnswers::ScriptedAnswers(const json& answers) {
  if (!answers.is_object()) fail(ErrorCode::InvalidConfig, "scripted answers must be a map of query id to value");
  for (const auto& [id, value] : answers.items()) {
    if (value.is_array() && !value.empty() && value.front().is_array()) {
      // a list of lists queues several attempts
      for (const json& v : value) add(id, v);
    } else {
      add(id, value);
    }
  }
}

void ScriptedAnswers::add(const std::string& query_id, json value) {
  std::lock_guard lock(mu_);
  answers_[query_id].push_back(std::move(value));
}

std::optional<json> ScriptedAnswers::answer(const Query& query, int) {
  std::lock_guard lock(mu_);
  asked_.push_back(query.id);
  auto it = answers_.find(query.id);
  if (it == answers_.end() || it->second.empty()) return std::nullopt;
  json v = std::move(it->second.front());
  it->second.pop_front();
  return v;
}

std::optional<json> ConsoleAnswers::answer(const Query& query, int) {
  out_ << query.prompt;
  if (!query.options.empty()) {
    out_ << " [";
    for (std::size_t i = 0; i < query.options.size(); ++i) out_ << (i ? "/" : "") << query.options[i];
    out_ << "]";
  }
  if (query.recommendation) out_ << " (recommended: " << query.recommendation->value.dump() << ")";
  if (!query.default_value.is_null()) out_ << " (default: " << query.default_value.dump() << ")";
  out_ << ": " << std::flush;
  std::string line;
  if (!std::getline(in_, line)) return std::nullopt;
  line = trim(line);
  if (line.empty()) {
    if (query.recommendation) return query.recommendation->value;
    if (!query.default_value.is_null()) return query.default_value;
  }
  return json(line);
}

void ConsoleAnswers::rejected(const Query&, const std::string& reason) { out_ << "invalid: " << reason << "\n"; }

json resolve(const Query& query, Mode mode, AnswerSource* source) {
  if (mode == Mode::Automatic) {
    if (query.recommendation) return query.coerce(query.recommendation->value);
    if (!query.default_value.is_null()) return query.coerce(query.default_value);
    fail(ErrorCode::NoDefaultAvailable, "query '" + query.id + "' has neither recommendation nor default");
  }
  if (!source) fail(ErrorCode::UnanswerableQuery, "query '" + query.id + "' needs an answer but no source is attached");
  std::string last_reason;
  for (int attempt = 0; attempt < kRetryCap; ++attempt) {
    std::optional<json> raw = source->answer(query, attempt);
    if (!raw) fail(ErrorCode::UnanswerableQuery, "no answer available for query '" + query.id + "'");
    try {
      return query.coerce(*raw);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InvalidAnswer) throw;
      last_reason = e.what();
      source->rejected(query, last_reason);
    }
  }
  fail(ErrorCode::RetriesExhausted, last_reason);
}

AnswerPredicate when_equals(json value) {
  return [value = std::move(value)](const json& v) { return v == value; };
}

AnswerPredicate always() {
  return [](const json&) { return true; };
}

QueryTree::QueryTree(Query root) : root_(root.id) { add(std::move(root)); }

void QueryTree::add(Query query) {
  query.check();
  if (queries_.count(query.id)) fail(ErrorCode::DuplicateName, "query '" + query.id + "' declared twice");
  const std::string id = query.id;
  queries_.emplace(id, std::move(query));
}

const Query& QueryTree::query(const std::string& id) const {
  auto it = queries_.find(id);
  if (it == queries_.end()) fail(ErrorCode::UnknownQuery, "query '" + id + "' is not part of the tree");
  return it->second;
}

bool QueryTree::reaches(const std::string& from, const std::string& to) const {
  std::vector<std::string> stack{from};
  std::set<std::string> seen;
  while (!stack.empty()) {
    std::string cur = stack.back();
    stack.pop_back();
    if (cur == to) return true;
    if (!seen.insert(cur).second) continue;
    auto it = edges_.find(cur);
    if (it == edges_.end()) continue;
    for (const Edge& e : it->second) stack.push_back(e.to);
  }
  return false;
}

void QueryTree::connect(const std::string& from, AnswerPredicate when, const std::string& to) {
  query(from);
  query(to);
  if (reaches(to, from)) fail(ErrorCode::InvalidConfig, "edge " + from + " -> " + to + " closes a cycle");
  edges_[from].push_back({std::move(when), to});
}

std::map<std::string, json> resolve_tree(const QueryTree& tree, Mode mode, AnswerSource* source) {
  return resolve_tree(tree, [&](const Query& q) { return resolve(q, mode, source); });
}

std::map<std::string, json> resolve_tree(const QueryTree& tree, const std::function<json(const Query&)>& resolver) {
  std::map<std::string, json> answers;
  std::queue<std::string> todo;
  todo.push(tree.root_);
  while (!todo.empty()) {
    const std::string id = todo.front();
    todo.pop();
    if (answers.count(id)) continue;
    const Query& q = tree.query(id);
    json value;
    try {
      value = resolver(q);
    } catch (const Error& e) {
      const std::string what = e.what();
      if (what.find("'" + id + "'") != std::string::npos) throw;
      fail(e.code(), "query '" + id + "': " + what);
    }
    answers[id] = value;
    auto it = tree.edges_.find(id);
    if (it == tree.edges_.end()) continue;
    for (const auto& e : it->second)
      if (e.when(value)) todo.push(e.to);
  }
  return answers;
}

void QueryBoard::open_run(const std::string& run_id) {
  std::lock_guard lock(mu_);
  runs_.emplace(run_id, std::vector<std::string>{});
}

void QueryBoard::close_run(const std::string& run_id) {
  {
    std::lock_guard lock(mu_);
    runs_.erase(run_id);
  }
  cv_.notify_all();
}

bool QueryBoard::has_run(const std::string& run_id) const {
  std::lock_guard lock(mu_);
  return runs_.count(run_id) > 0;
}

std::vector<QueryBoard::Pending> QueryBoard::pending(const std::string& run_id) const {
  std::lock_guard lock(mu_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) fail(ErrorCode::UnknownRun, "run '" + run_id + "' does not exist");
  std::vector<Pending> out;
  for (const auto& qid : it->second) out.push_back(slots_.at(qid)->pending);
  return out;
}

void QueryBoard::set_listener(std::function<void(const std::string&)> listener) {
  std::lock_guard lock(mu_);
  listener_ = std::move(listener);
}

void QueryBoard::notify(const std::string& run_id) {
  std::function<void(const std::string&)> l;
  {
    std::lock_guard lock(mu_);
    l = listener_;
  }
  if (l) l(run_id);
}

void QueryBoard::answer(const std::string& qid, const json& raw) {
  std::string run_id;
  {
    std::lock_guard lock(mu_);
    auto it = slots_.find(qid);
    if (it == slots_.end()) {
      if (answered_.count(qid)) fail(ErrorCode::AlreadyAnswered, "query '" + qid + "' was already answered");
      fail(ErrorCode::UnknownQuery, "query '" + qid + "' does not exist");
    }
    it->second->value = it->second->pending.query.coerce(raw);
    run_id = it->second->pending.run_id;
    answered_[qid] = true;
    auto& open = runs_[run_id];
    open.erase(std::remove(open.begin(), open.end(), qid), open.end());
    slots_.erase(it);
  }
  cv_.notify_all();
  notify(run_id);
}

json QueryBoard::ask(const std::string& run_id, const Query& query, std::chrono::milliseconds timeout) {
  auto slot = std::make_shared<Slot>();
  {
    std::lock_guard lock(mu_);
    auto it = runs_.find(run_id);
    if (it == runs_.end()) fail(ErrorCode::UnknownRun, "run '" + run_id + "' does not exist");
    slot->pending = {run_id + "-q" + std::to_string(next_++), run_id, query};
    slots_[slot->pending.qid] = slot;
    it->second.push_back(slot->pending.qid);
  }
  notify(run_id);
  std::unique_lock lock(mu_);
  const bool got = cv_.wait_for(lock, timeout, [&] { return slot->value.has_value() || !runs_.count(run_id); });
  if (got && slot->value) return *slot->value;
  const std::string qid = slot->pending.qid;
  slots_.erase(qid);
  if (auto it = runs_.find(run_id); it != runs_.end())
    it->second.erase(std::remove(it->second.begin(), it->second.end(), qid), it->second.end());
  lock.unlock();
  notify(run_id);
  if (!got) fail(ErrorCode::AnswerTimeout, "no answer to '" + query.id + "' within the timeout");
  fail(ErrorCode::UnknownRun, "run '" + run_id + "' was closed while waiting");
}

std::optional<json> BoardAnswers::answer(const Query& query, int) { return board_.ask(run_id_, query, timeout_); }

}  // namespace qdt::query
