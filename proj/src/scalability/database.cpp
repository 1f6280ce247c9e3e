#include "qdt/scalability/database.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "qdt/common/error.hpp"

namespace qdt::scalability {

json Provenance::to_json() const { return json{{"plan_hash", plan_hash}, {"seed", seed}, {"date", date}}; }

Provenance Provenance::from_json(const json& doc) {
  return Provenance{doc.at("plan_hash").get<std::string>(), doc.at("seed").get<std::uint64_t>(),
                    doc.at("date").get<std::string>()};
}

json BenchmarkSettings::to_json() const {
  return json{{"ansatz", ansatz}, {"optimizer", optimizer}, {"budget", budget}, {"delta", delta}};
}

BenchmarkSettings BenchmarkSettings::from_json(const json& doc) {
  BenchmarkSettings b;
  b.ansatz = doc.at("ansatz");
  b.optimizer = doc.at("optimizer");
  b.budget = doc.at("budget").get<std::uint64_t>();
  b.delta = doc.at("delta").get<double>();
  return b;
}

std::string ScalingRecord::key() const {
  std::ostringstream out;
  out << problem_type << "|" << density << "|" << vqa << "|" << optimizer << "|" << to_string(fit.hypothesis);
  return out.str();
}

json ScalingRecord::to_json() const {
  json th = json::array();
  for (const auto& t : thresholds) th.push_back(t.to_json());
  json doc = fit.to_json();
  doc["problem_type"] = problem_type;
  doc["density"] = density;
  doc["vqa"] = vqa;
  doc["optimizer"] = optimizer;
  doc["kappa_params"] = kappa.to_json();
  doc["calls_params"] = calls.to_json();
  doc["thresholds"] = th;
  doc["never_succeeds_sizes"] = never_succeeds_sizes;
  doc["benchmark"] = benchmark.to_json();
  doc["provenance"] = provenance.to_json();
  doc["note"] = note;
  return doc;
}

ScalingRecord ScalingRecord::from_json(const json& doc) {
  try {
    ScalingRecord r;
    r.problem_type = doc.at("problem_type").get<std::string>();
    r.density = doc.at("density").get<double>();
    r.vqa = doc.at("vqa").get<std::string>();
    r.optimizer = doc.at("optimizer").get<std::string>();
    r.fit = ScalingFit::from_json(doc);
    r.kappa = KappaFit::from_json(doc.at("kappa_params"));
    r.calls = CallsFit::from_json(doc.at("calls_params"));
    for (const auto& t : doc.at("thresholds")) r.thresholds.push_back(ThresholdPoint::from_json(t));
    r.never_succeeds_sizes = doc.at("never_succeeds_sizes").get<std::size_t>();
    r.benchmark = BenchmarkSettings::from_json(doc.at("benchmark"));
    r.provenance = Provenance::from_json(doc.at("provenance"));
    r.note = doc.value("note", std::string{});
    if (!(r.fit.r_squared >= 0.0 && r.fit.r_squared <= 1.0))
      fail(ErrorCode::InvalidRecord, "r_squared outside [0, 1]");
    if (r.fit.valid && !(r.fit.b > 0)) fail(ErrorCode::InvalidRecord, "a valid record needs B > 0");
    return r;
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidRecord, std::string("malformed scaling record: ") + e.what());
  }
}

json ScalingDatabase::to_json() const {
  json rec = json::array();
  for (const auto& r : records) rec.push_back(r.to_json());
  return json{{"schema", kDatabaseSchema}, {"records", rec}};
}

ScalingDatabase ScalingDatabase::from_json(const json& doc) {
  if (!doc.is_object() || doc.value("schema", std::string{}) != kDatabaseSchema)
    fail(ErrorCode::InvalidRecord, std::string("database schema must be '") + kDatabaseSchema + "'");
  ScalingDatabase db;
  for (const auto& r : doc.at("records")) db.records.push_back(ScalingRecord::from_json(r));
  return db;
}

ScalingDatabase ScalingDatabase::load(const std::filesystem::path& path) {
  json doc;
  try {
    doc = load_json_file(path);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::IoFailure, "cannot read database '" + path.string() + "': " + e.what());
  }
  return from_json(doc);
}

void ScalingDatabase::save(const std::filesystem::path& path) const {
  try {
    write_text_file(path, to_json().dump(1) + "\n");
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::IoFailure, "cannot write database '" + path.string() + "': " + e.what());
  }
}

std::size_t ScalingDatabase::merge(const ScalingDatabase& other) {
  std::set<std::string> keys;
  for (const auto& r : records) keys.insert(r.key());
  std::size_t added = 0;
  for (const auto& r : other.records) {
    if (keys.insert(r.key()).second) {
      records.push_back(r);
      ++added;
    }
  }
  return added;
}

std::vector<const ScalingRecord*> ScalingDatabase::slice(const std::string& problem_type, double density) const {
  std::vector<const ScalingRecord*> out;
  for (const auto& r : records)
    if (r.problem_type == problem_type && std::abs(r.density - density) < 1e-9) out.push_back(&r);
  return out;
}

std::vector<double> ScalingDatabase::densities(const std::string& problem_type) const {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.problem_type != problem_type) continue;
    if (std::none_of(out.begin(), out.end(), [&](double d) { return std::abs(d - r.density) < 1e-9; }))
      out.push_back(r.density);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace qdt::scalability
