// entlink: analytical link budgets, Markov-chain metrics and Monte Carlo
// validation for one-hop entanglement distribution between LEO satellites.
//
// Exit codes: 0 success, 1 simulation comparison failure, 2 invalid input,
// 3 infeasible physics.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "entlink/errors.hpp"
#include "entlink/feasibility.hpp"
#include "entlink/params.hpp"
#include "entlink/report.hpp"

namespace {

constexpr int kExitComparisonFail = 1;
constexpr int kExitInvalidInput = 2;
constexpr int kExitInfeasible = 3;

entlink::ScenarioParams load_config(const std::string& path) {
  if (path.empty()) return entlink::default_scenario();
  return entlink::load_scenario_file(path);
}

void write_table(const entlink::CsvTable& table, const std::string& out_path) {
  if (out_path.empty()) {
    table.write(std::cout);
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    throw entlink::RangeError("out", "cannot open " + out_path);
  }
  table.write(out);
}

bool parse_lambda_grid(const std::string& text, double& lo, double& hi,
                       int& steps) {
  const auto c1 = text.find(',');
  const auto c2 = text.find(',', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) return false;
  try {
    lo = std::stod(text.substr(0, c1));
    hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    steps = std::stoi(text.substr(c2 + 1));
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-hop satellite entanglement link analysis"};
  app.require_subcommand(1);

  std::string config_path;
  double distance_km = 40.0;
  bool as_json = false;
  auto* lb_cmd = app.add_subcommand("link-budget",
                                    "derived quantities for one distance");
  lb_cmd->add_option("--config", config_path, "scenario JSON file");
  lb_cmd->add_option("--distance-km", distance_km, "link distance in km")
      ->required();
  lb_cmd->add_flag("--json", as_json, "emit JSON instead of CSV");

  std::string target;
  std::string out_dir = ".";
  auto* rep_cmd = app.add_subcommand("reproduce", "write evaluation sweeps");
  rep_cmd->add_option("--config", config_path, "scenario JSON file");
  rep_cmd->add_option("--target", target, "fig2|fig4|fig5|fig6|table3|dmax_fth|dmax_rap")
      ->required();
  rep_cmd->add_option("--out", out_dir, "output directory");

  std::string lambda_grid = "0.1,1.0,10";
  long window_slots = 1000;
  std::string out_file;
  auto* met_cmd = app.add_subcommand("metrics", "analytic metrics on a lambda grid");
  met_cmd->add_option("--config", config_path, "scenario JSON file");
  met_cmd->add_option("--lambda-grid", lambda_grid, "start,stop,steps");
  met_cmd->add_option("--window-slots", window_slots, "averaging window");
  met_cmd->add_option("--out", out_file, "output file (default stdout)");

  long slots = 1000000;
  int reps = 1;
  std::uint64_t seed = 1;
  auto* sim_cmd = app.add_subcommand("simulate",
                                     "Monte Carlo run with analytic comparison");
  sim_cmd->add_option("--config", config_path, "scenario JSON file");
  sim_cmd->add_option("--slots", slots, "slots per replication");
  sim_cmd->add_option("--reps", reps, "replications");
  sim_cmd->add_option("--seed", seed, "base seed");
  sim_cmd->add_option("--out", out_file, "output file (default stdout)");

  bool with_rotation = false;
  auto* dmax_cmd = app.add_subcommand("dmax", "maximum one-hop distance");
  dmax_cmd->add_option("--config", config_path, "scenario JSON file");
  dmax_cmd->add_flag("--with-rotation", with_rotation,
                     "also solve the rotation-inclusive equation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitInvalidInput;
  }

  try {
    const entlink::ScenarioParams params = load_config(config_path);

    if (*lb_cmd) {
      if (distance_km <= 0.0) {
        std::cerr << "distance must be positive\n";
        return kExitInvalidInput;
      }
      const double d = distance_km * 1e3;
      const entlink::LinkBudget lb = entlink::link_budget(d, params);
      if (!lb.feasible) {
        std::cerr << "infeasible link: f0_prime " << lb.f0_prime
                  << " < f_th " << params.noise.fidelity_threshold << " at "
                  << distance_km << " km\n";
        return kExitInfeasible;
      }
      if (as_json) {
        std::cout << entlink::link_budget_json(params, d).dump(2) << "\n";
      } else {
        entlink::link_budget_table(params, d).write(std::cout);
      }
      return 0;
    }

    if (*rep_cmd) {
      entlink::CsvTable table;
      try {
        table = entlink::reproduce(target, params);
      } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kExitInvalidInput;
      }
      std::filesystem::create_directories(out_dir);
      const std::string path =
          (std::filesystem::path(out_dir) / (target + ".csv")).string();
      std::ofstream out(path, std::ios::binary);
      if (!out) {
        std::cerr << "cannot open " << path << "\n";
        return kExitInvalidInput;
      }
      table.write(out);
      std::cout << path << "\n";
      return 0;
    }

    if (*met_cmd) {
      double lo = 0.0, hi = 0.0;
      int steps = 0;
      if (!parse_lambda_grid(lambda_grid, lo, hi, steps)) {
        std::cerr << "bad --lambda-grid, expected start,stop,steps\n";
        return kExitInvalidInput;
      }
      try {
        write_table(entlink::metrics_table(params, lo, hi, steps, window_slots),
                    out_file);
      } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kExitInvalidInput;
      }
      return 0;
    }

    if (*sim_cmd) {
      if (slots < 1 || reps < 1) {
        std::cerr << "slots and reps must be >= 1\n";
        return kExitInvalidInput;
      }
      const entlink::SimulationOutcome outcome =
          entlink::simulation_report(params, slots, reps, seed);
      write_table(outcome.table, out_file);
      return outcome.all_pass ? 0 : kExitComparisonFail;
    }

    if (*dmax_cmd) {
      entlink::dmax_table(params, with_rotation).write(std::cout);
      return 0;
    }
  } catch (const entlink::InfeasibleLinkError& e) {
    std::cerr << e.what() << "\n";
    return kExitInfeasible;
  } catch (const entlink::InfeasibleError& e) {
    std::cerr << e.what() << "\n";
    return kExitInfeasible;
  } catch (const entlink::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "bad scenario document: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitInvalidInput;
  }
  return 0;
}
