#include "entlink/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "entlink/csv.hpp"
#include "entlink/errors.hpp"
#include "entlink/params.hpp"
#include "entlink/report.hpp"

#include "json.hpp"

namespace entlink {

namespace {

struct Tolerance {
  double abs = 0.0;
  double rel = 0.0;
};

Tolerance parse_tol(const nlohmann::json& j) {
  Tolerance t;
  if (j.contains("abs")) t.abs = j["abs"].get<double>();
  if (j.contains("rel")) t.rel = j["rel"].get<double>();
  return t;
}

bool cell_matches(const std::string& expected, const std::string& actual,
                  const Tolerance& tol, double& delta) {
  delta = 0.0;
  if (expected == actual) return true;
  char* end_e = nullptr;
  char* end_a = nullptr;
  const double e = std::strtod(expected.c_str(), &end_e);
  const double a = std::strtod(actual.c_str(), &end_a);
  const bool e_num = end_e != expected.c_str() && *end_e == '\0' && !expected.empty();
  const bool a_num = end_a != actual.c_str() && *end_a == '\0' && !actual.empty();
  if (!e_num || !a_num) return false;  // non-numeric cells must match exactly
  delta = a - e;
  return std::abs(delta) <= tol.abs || std::abs(delta) <= tol.rel * std::abs(e);
}

}  // namespace

FixtureResult check_fixture(const std::filesystem::path& fixtures_root,
                            const std::string& name) {
  namespace fs = std::filesystem;
  const fs::path dir = fixtures_root / name;
  const fs::path params_path = dir / "params.json";
  const fs::path expected_path = dir / "expected.csv";
  const fs::path tol_path = dir / "tolerances.json";
  if (!fs::exists(params_path) || !fs::exists(expected_path) ||
      !fs::exists(tol_path)) {
    throw MissingFixtureError(name);
  }

  nlohmann::json params_doc;
  {
    std::ifstream in(params_path);
    in >> params_doc;
  }
  nlohmann::json tol_doc;
  {
    std::ifstream in(tol_path);
    in >> tol_doc;
  }
  const std::string target = params_doc.at("target").get<std::string>();
  const ScenarioParams scenario = validate_scenario(params_doc.at("scenario"));

  const CsvTable actual = reproduce(target, scenario);
  const CsvTable expected = CsvTable::read_file(expected_path.string());

  Tolerance default_tol;
  if (tol_doc.contains("default")) default_tol = parse_tol(tol_doc["default"]);
  std::vector<Tolerance> col_tol(expected.header.size(), default_tol);
  if (tol_doc.contains("columns")) {
    for (std::size_t c = 0; c < expected.header.size(); ++c) {
      if (tol_doc["columns"].contains(expected.header[c])) {
        col_tol[c] = parse_tol(tol_doc["columns"][expected.header[c]]);
      }
    }
  }

  FixtureResult result;
  result.name = name;
  if (actual.header != expected.header ||
      actual.rows.size() != expected.rows.size()) {
    result.pass = false;
    result.failures.push_back(
        {0, "<shape>", std::to_string(expected.rows.size()) + " rows",
         std::to_string(actual.rows.size()) + " rows", 0.0});
    return result;
  }
  for (std::size_t r = 0; r < expected.rows.size(); ++r) {
    for (std::size_t c = 0; c < expected.header.size(); ++c) {
      const std::string& e = expected.rows[r][c];
      const std::string& a = actual.rows[r][c];
      double delta = 0.0;
      ++result.cells_checked;
      if (!cell_matches(e, a, col_tol[c], delta)) {
        result.pass = false;
        result.failures.push_back({r, expected.header[c], e, a, delta});
      }
    }
  }
  return result;
}

std::vector<FixtureResult> check_all_fixtures(
    const std::filesystem::path& root) {
  std::vector<FixtureResult> results;
  namespace fs = std::filesystem;
  if (!fs::exists(root)) return results;
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) names.push_back(entry.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  results.reserve(names.size());
  for (const auto& name : names) {
    results.push_back(check_fixture(root, name));
  }
  return results;
}

}  // namespace entlink
