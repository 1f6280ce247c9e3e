#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "qdt/common/json.hpp"

namespace qdt::query {

enum class QueryKind { Integer, Real, FilePath, SingleChoice, MultiValue };

std::string to_string(QueryKind kind);
QueryKind query_kind_from_string(const std::string& text);

enum class Mode { Automatic, Manual };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& text);

struct Recommendation {
  json value;
  std::string rationale;
};

/// Constraint an answer must meet. Bounds apply to numeric kinds, `pattern`
/// to file paths; choice kinds are checked against the query's options.
struct Validator {
  std::optional<double> min;
  std::optional<double> max;
  std::string pattern;

  json to_json() const;
};

struct Query {
  std::string id;
  QueryKind kind = QueryKind::SingleChoice;
  std::string prompt;
  std::vector<std::string> options;
  json default_value;  // null: no default
  std::optional<Recommendation> recommendation;
  Validator validator;
  /// Path-specification key whose assignment answers this query directly.
  std::string path_key;

  /// Throws InvalidConfig when the default or recommendation violates the
  /// validator or a choice query has no options.
  void check() const;
  /// Converts a raw answer (console text or JSON) to the query's value type
  /// and validates it. Throws InvalidAnswer with the reason.
  json coerce(const json& raw) const;
  bool accepts(const json& raw) const;

  json to_json() const;
};

inline constexpr int kRetryCap = 3;
inline constexpr std::chrono::minutes kDefaultAnswerTimeout{15};

/// Where manual-mode answers come from.
class AnswerSource {
 public:
  virtual ~AnswerSource() = default;
  /// Raw answer for `query`, or nullopt when the source has nothing to give.
  /// `attempt` counts from 0 and grows after each rejected answer.
  virtual std::optional<json> answer(const Query& query, int attempt) = 0;
  /// Told why the last answer was rejected.
  virtual void rejected(const Query& query, const std::string& reason) { (void)query, (void)reason; }
};

/// Answers keyed by query id, consumed in order. Lets CI exercise manual mode.
class ScriptedAnswers final : public AnswerSource {
 public:
  ScriptedAnswers() = default;
  explicit ScriptedAnswers(const json& answers);

  void add(const std::string& query_id, json value);
  std::optional<json> answer(const Query& query, int attempt) override;
  /// Ids of every query that asked, in order.
  const std::vector<std::string>& asked() const { return asked_; }

 private:
  std::mutex mu_;
  std::map<std::string, std::deque<json>> answers_;
  std::vector<std::string> asked_;
};

/// Prompts on a text stream and reads one line per attempt.
class ConsoleAnswers final : public AnswerSource {
 public:
  ConsoleAnswers(std::istream& in, std::ostream& out) : in_(in), out_(out) {}
  std::optional<json> answer(const Query& query, int attempt) override;
  void rejected(const Query& query, const std::string& reason) override;

 private:
  std::istream& in_;
  std::ostream& out_;
};

/// Automatic: recommendation, then default, else NoDefaultAvailable.
/// Manual: asks `source` until an answer validates, at most kRetryCap times.
json resolve(const Query& query, Mode mode, AnswerSource* source);

/// Edge condition on the parent's resolved value.
using AnswerPredicate = std::function<bool(const json& value)>;

AnswerPredicate when_equals(json value);
AnswerPredicate always();

/// Queries asked conditionally on earlier answers.
class QueryTree {
 public:
  explicit QueryTree(Query root);

  void add(Query query);
  /// Throws UnknownQuery for undeclared ids and InvalidConfig on a cycle.
  void connect(const std::string& from, AnswerPredicate when, const std::string& to);

  const std::string& root() const { return root_; }
  const Query& query(const std::string& id) const;

 private:
  friend std::map<std::string, json> resolve_tree(const QueryTree&, const std::function<json(const Query&)>&);

  struct Edge {
    AnswerPredicate when;
    std::string to;
  };
  bool reaches(const std::string& from, const std::string& to) const;

  std::string root_;
  std::map<std::string, Query> queries_;
  std::map<std::string, std::vector<Edge>> edges_;
};

/// Resolves the root, then follows every edge whose predicate accepts the
/// answer, breadth first. Errors carry the query id.
std::map<std::string, json> resolve_tree(const QueryTree& tree, Mode mode, AnswerSource* source);
/// Same traversal with a caller-supplied resolution step.
std::map<std::string, json> resolve_tree(const QueryTree& tree, const std::function<json(const Query&)>& resolver);

/// Pending-question board shared by runs and the service layer. A run posts
/// a query and blocks; another thread answers it exactly once.
class QueryBoard {
 public:
  struct Pending {
    std::string qid;
    std::string run_id;
    Query query;
  };

  void open_run(const std::string& run_id);
  void close_run(const std::string& run_id);
  bool has_run(const std::string& run_id) const;

  /// Queries currently blocking the run. Throws UnknownRun.
  std::vector<Pending> pending(const std::string& run_id) const;

  /// Validates and hands `raw` to the waiting run. Throws UnknownQuery,
  /// AlreadyAnswered or InvalidAnswer.
  void answer(const std::string& qid, const json& raw);

  /// Posts `query` for `run_id` and waits for its answer. Throws
  /// AnswerTimeout when nothing arrives in time.
  json ask(const std::string& run_id, const Query& query, std::chrono::milliseconds timeout);

  /// Called whenever the pending set of a run changes.
  void set_listener(std::function<void(const std::string& run_id)> listener);

 private:
  struct Slot {
    Pending pending;
    std::optional<json> value;
  };

  void notify(const std::string& run_id);

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, std::vector<std::string>> runs_;  // run -> open qids
  std::map<std::string, std::shared_ptr<Slot>> slots_;
  std::map<std::string, bool> answered_;
  std::uint64_t next_ = 0;
  std::function<void(const std::string&)> listener_;
};

/// Manual-mode source backed by a QueryBoard.
class BoardAnswers final : public AnswerSource {
 public:
  BoardAnswers(QueryBoard& board, std::string run_id,
               std::chrono::milliseconds timeout = kDefaultAnswerTimeout)
      : board_(board), run_id_(std::move(run_id)), timeout_(timeout) {}
  std::optional<json> answer(const Query& query, int attempt) override;

 private:
  QueryBoard& board_;
  std::string run_id_;
  std::chrono::milliseconds timeout_;
};

}  // namespace qdt::query
