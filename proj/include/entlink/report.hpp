#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "entlink/csv.hpp"
#include "entlink/fidelity.hpp"
#include "entlink/params.hpp"

#include "json.hpp"

namespace entlink {

// Known sweep targets for the `reproduce` command.
std::vector<std::string> reproduce_targets();

// Generates the CSV for one sweep target. Throws std::invalid_argument for
// unknown targets. Deterministic for a given scenario.
CsvTable reproduce(const std::string& target, const ScenarioParams& params);

// One-row link budget table for a single distance.
CsvTable link_budget_table(const ScenarioParams& params, double distance);
nlohmann::json link_budget_json(const ScenarioParams& params, double distance);

// Analytic metrics swept over a lambda grid.
CsvTable metrics_table(const ScenarioParams& params, double lambda_lo,
                       double lambda_hi, int steps, long window_slots);

struct SimulationOutcome {
  CsvTable table;
  bool all_pass = true;
};

// Runs the simulator (both protocol variants) and tabulates the stats with
// their analytic comparisons.
SimulationOutcome simulation_report(const ScenarioParams& params, long n_slots,
                                    int n_replications, std::uint64_t seed);

// Closed-form and rotation-inclusive maximum distance for the scenario.
CsvTable dmax_table(const ScenarioParams& params, bool with_rotation);

}  // namespace entlink
