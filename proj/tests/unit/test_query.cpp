#include <doctest.h>

#include <random>
#include <sstream>
#include <thread>

#include "oracles.hpp"
#include "qdt/query/query.hpp"

using namespace qdt;
using namespace qdt::query;

namespace {

Query integer_query(const std::string& id, json def = nullptr) {
  Query q;
  q.id = id;
  q.kind = QueryKind::Integer;
  q.prompt = id;
  q.default_value = std::move(def);
  q.validator.min = 1;
  q.validator.max = 10;
  return q;
}

Query choice_query(const std::string& id, std::vector<std::string> options, json def = nullptr) {
  Query q;
  q.id = id;
  q.kind = QueryKind::SingleChoice;
  q.prompt = id;
  q.options = std::move(options);
  q.default_value = std::move(def);
  return q;
}

}  // namespace

TEST_CASE("automatic resolution precedence") {
  Query q = integer_query("depth", 3);
  CHECK(resolve(q, Mode::Automatic, nullptr) == 3);
  q.recommendation = Recommendation{5, "scalability module"};
  CHECK(resolve(q, Mode::Automatic, nullptr) == 5);
  Query bare = integer_query("depth");
  CHECK(test::code_of([&] { resolve(bare, Mode::Automatic, nullptr); }) == ErrorCode::NoDefaultAvailable);
}

TEST_CASE("manual resolution with scripted answers") {
  Query q = integer_query("depth", 3);
  ScriptedAnswers answers;
  answers.add("depth", "7");
  CHECK(resolve(q, Mode::Manual, &answers) == 7);

  ScriptedAnswers retry;
  retry.add("depth", "x");
  retry.add("depth", 11);
  retry.add("depth", " 4 ");
  CHECK(resolve(q, Mode::Manual, &retry) == 4);

  ScriptedAnswers bad;
  for (int i = 0; i < 3; ++i) bad.add("depth", 0);
  bad.add("depth", 5);
  CHECK(test::code_of([&] { resolve(q, Mode::Manual, &bad); }) == ErrorCode::RetriesExhausted);

  ScriptedAnswers empty;
  CHECK(test::code_of([&] { resolve(q, Mode::Manual, &empty); }) == ErrorCode::UnanswerableQuery);
  CHECK(test::code_of([&] { resolve(q, Mode::Manual, nullptr); }) == ErrorCode::UnanswerableQuery);
}

TEST_CASE("query invariants") {
  CHECK(test::code_of([] { choice_query("a", {}).check(); }) == ErrorCode::InvalidConfig);
  CHECK(test::code_of([] { integer_query("d", 11).check(); }) == ErrorCode::InvalidConfig);
  Query q = choice_query("alg", {"vqe", "qaoa"}, "qaoa");
  CHECK_NOTHROW(q.check());
  q.recommendation = Recommendation{"grover", "?"};
  CHECK(test::code_of([&] { q.check(); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("value kinds") {
  Query r;
  r.id = "delta";
  r.kind = QueryKind::Real;
  r.validator.min = 0.0;
  CHECK(r.coerce("0.7") == 0.7);
  CHECK(test::code_of([&] { r.coerce("-1"); }) == ErrorCode::InvalidAnswer);
  CHECK(test::code_of([&] { r.coerce("0.7x"); }) == ErrorCode::InvalidAnswer);

  Query f;
  f.id = "db";
  f.kind = QueryKind::FilePath;
  f.validator.pattern = R"(.*\.json)";
  CHECK(f.coerce("data/db.json") == "data/db.json");
  CHECK(test::code_of([&] { f.coerce("db.yaml"); }) == ErrorCode::InvalidAnswer);

  Query m;
  m.id = "opts";
  m.kind = QueryKind::MultiValue;
  m.options = {"spsa", "nft", "ps_gd"};
  CHECK(m.coerce("spsa, nft") == json::array({"spsa", "nft"}));
  CHECK(m.coerce(json::array({"ps_gd"})) == json::array({"ps_gd"}));
  CHECK(test::code_of([&] { m.coerce("spsa,spsa"); }) == ErrorCode::InvalidAnswer);
  CHECK(test::code_of([&] { m.coerce("adam"); }) == ErrorCode::InvalidAnswer);
}

TEST_CASE("validator soundness under random input") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> len(0, 6), ch(32, 126);
  std::uniform_real_distribution<double> num(-50, 50);
  Query q = integer_query("depth");
  Query c = choice_query("alg", {"vqe", "qaoa", "lr_qaoa", "classical"});
  int accepted = 0;
  for (int i = 0; i < 5000; ++i) {
    json raw;
    if (i % 2) {
      raw = num(rng);
    } else {
      std::string s;
      for (int k = len(rng); k > 0; --k) s.push_back(static_cast<char>(ch(rng)));
      raw = s;
    }
    if (q.accepts(raw)) {
      ++accepted;
      const json v = q.coerce(raw);
      CHECK(v.is_number_integer());
      CHECK(v.get<int>() >= 1);
      CHECK(v.get<int>() <= 10);
    }
    if (c.accepts(raw)) {
      const std::string v = c.coerce(raw).get<std::string>();
      CHECK(std::find(c.options.begin(), c.options.end(), v) != c.options.end());
    }
  }
  CHECK(accepted < 5000);
}

TEST_CASE("query tree follows matching edges") {
  auto make = [] {
    QueryTree qt(choice_query("optimizer", {"spsa", "nft"}, "spsa"));
    Query c;
    c.id = "spsa.c";
    c.kind = QueryKind::Real;
    c.default_value = 0.1;
    c.validator.min = 0.0;
    qt.add(c);
    qt.connect("optimizer", when_equals("spsa"), "spsa.c");
    return qt;
  };
  QueryTree qt = make();
  ScriptedAnswers spsa(json{{"optimizer", "spsa"}, {"spsa.c", "0.2"}});
  auto a = resolve_tree(qt, Mode::Manual, &spsa);
  CHECK(a.size() == 2);
  CHECK(a["spsa.c"] == 0.2);

  ScriptedAnswers nft(json{{"optimizer", "nft"}});
  auto b = resolve_tree(qt, Mode::Manual, &nft);
  CHECK(b.size() == 1);
  CHECK(b.count("spsa.c") == 0);

  QueryTree single(choice_query("only", {"x"}, "x"));
  CHECK(resolve_tree(single, Mode::Automatic, nullptr).size() == 1);

  QueryTree chain(integer_query("a", 1));
  chain.add(integer_query("b", 2));
  chain.add(integer_query("c", 3));
  chain.connect("a", always(), "b");
  chain.connect("b", always(), "c");
  ScriptedAnswers unused;
  auto all = resolve_tree(chain, Mode::Automatic, &unused);
  CHECK(all == std::map<std::string, json>{{"a", 1}, {"b", 2}, {"c", 3}});
  CHECK(unused.asked().empty());
  CHECK(test::code_of([&] { chain.connect("c", always(), "a"); }) == ErrorCode::InvalidConfig);
  CHECK(test::code_of([&] { chain.connect("c", always(), "zz"); }) == ErrorCode::UnknownQuery);
}

TEST_CASE("query tree errors name the query") {
  QueryTree qt(integer_query("a", 1));
  qt.add(integer_query("b"));
  qt.connect("a", always(), "b");
  try {
    resolve_tree(qt, Mode::Automatic, nullptr);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoDefaultAvailable);
    CHECK(std::string(e.what()).find("'b'") != std::string::npos);
  }
}

TEST_CASE("console answers") {
  std::istringstream in("\nqaoa\n");
  std::ostringstream out;
  ConsoleAnswers console(in, out);
  Query q = choice_query("alg", {"vqe", "qaoa"}, "vqe");
  CHECK(resolve(q, Mode::Manual, &console) == "vqe");
  CHECK(resolve(q, Mode::Manual, &console) == "qaoa");
  CHECK(out.str().find("[vqe/qaoa]") != std::string::npos);
}

TEST_CASE("query board single-assignment handoff") {
  QueryBoard board;
  CHECK(test::code_of([&] { board.pending("r1"); }) == ErrorCode::UnknownRun);
  board.open_run("r1");
  CHECK(board.pending("r1").empty());

  json got;
  std::thread runner([&] {
    BoardAnswers source(board, "r1", std::chrono::seconds(10));
    got = resolve(choice_query("algorithm", {"vqe", "qaoa"}), Mode::Manual, &source);
  });
  std::vector<QueryBoard::Pending> pending;
  for (int i = 0; i < 1000 && pending.empty(); ++i) {
    pending = board.pending("r1");
    if (pending.empty()) std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  REQUIRE(pending.size() == 1);
  CHECK(pending[0].query.options == std::vector<std::string>{"vqe", "qaoa"});
  const std::string qid = pending[0].qid;
  CHECK(test::code_of([&] { board.answer(qid, "grover"); }) == ErrorCode::InvalidAnswer);
  CHECK(board.pending("r1").size() == 1);
  board.answer(qid, "vqe");
  runner.join();
  CHECK(got == "vqe");
  CHECK(board.pending("r1").empty());
  CHECK(test::code_of([&] { board.answer(qid, "qaoa"); }) == ErrorCode::AlreadyAnswered);
  CHECK(test::code_of([&] { board.answer("nope", "qaoa"); }) == ErrorCode::UnknownQuery);

  CHECK(test::code_of([&] { board.ask("r1", choice_query("x", {"a"}), std::chrono::milliseconds(20)); }) ==
        ErrorCode::AnswerTimeout);
  CHECK(board.pending("r1").empty());
}
