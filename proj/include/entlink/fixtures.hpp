#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace entlink {

// Golden-fixture layout: <root>/<name>/{params.json, expected.csv, tolerances.json}
// params.json:     {"target": "<reproduce target>", "scenario": {...}}
// tolerances.json: {"default": {"abs": x, "rel": y}, "columns": {name: {...}}}
// A cell passes when |actual - expected| <= abs  or  <= rel * |expected|.

struct CellDelta {
  std::size_t row = 0;
  std::string column;
  std::string expected;
  std::string actual;
  double delta = 0.0;
};

struct FixtureResult {
  std::string name;
  bool pass = true;
  std::size_t cells_checked = 0;
  std::vector<CellDelta> failures;
};

// Regenerates the fixture's target from its pinned scenario and compares it
// cell-by-cell against expected.csv. Throws MissingFixtureError if the
// fixture directory or any of its three files is absent.
FixtureResult check_fixture(const std::filesystem::path& fixtures_root,
                            const std::string& name);

// Checks every fixture directory under `root`. An empty or missing root is a
// no-op pass (empty result).
std::vector<FixtureResult> check_all_fixtures(
    const std::filesystem::path& root);

}  // namespace entlink
