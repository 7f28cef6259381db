#ifndef LRLATTICE_TOOLS_SCENARIO_HPP
#define LRLATTICE_TOOLS_SCENARIO_HPP

// Scenario configuration for the lrlattice command line: a strict JSON
// schema, flag overrides and the report assembled by each command.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "lrlattice/harmonic.hpp"
#include "lrlattice/lattice.hpp"

namespace lrl::cli {

enum class Command { kernel, cone, bounds, state, converge, fock_verify };
enum class OutputFormat { csv, json };

const std::vector<std::string>& command_names();
std::string command_name(Command c);

struct Scenario {
  Command command = Command::kernel;
  HarmonicParameters params{1.0, {1.0}};
  // Z^d for kernel/cone/bounds/converge, torus (-L, L]^d for state and
  // fock-verify.
  LatticeGeometry geometry = LatticeGeometry::infinite(1, 1);
  DecayProfile profile{1};
  std::optional<std::string> perturbation_path;

  std::vector<double> t;
  std::vector<double> mu;
  std::vector<double> a_grid;
  int window = 32;
  int x_max = 60;
  double threshold = 0.1;
  std::string probe = "position";
  int quad_points = 16;
  double quad_tolerance = 1e-12;
  std::vector<int> half_sides;
  cplx z{0.2, 0.0};
  double weight = 1.0;
  int sites = 2;
  std::vector<int> cutoffs;
  int samples = 0;
  double label_norm = 0.5;
  int levels = 8;
  std::uint64_t seed = 0;

  std::string output;
  OutputFormat format = OutputFormat::csv;
};

// Validates the merged document (file keys overlaid with flag keys). Throws
// ConfigError listing every problem found.
Scenario parse_scenario(const nlohmann::json& doc);

// Reads a JSON config file (may be absent: empty path), overlays `overrides`
// and parses. File and parse errors are reported as ConfigError.
Scenario load_scenario(const std::string& config_path, const nlohmann::json& overrides);

struct Report {
  nlohmann::ordered_json summary;
  std::vector<std::string> header;
  std::vector<std::vector<nlohmann::ordered_json>> rows;
  bool violation = false;
};

Report run_scenario(const Scenario& scenario);

// Writes the report: CSV rows plus <output>.summary.json, or one JSON file.
// Returns the written paths in order.
std::vector<std::string> write_report(const Scenario& scenario, const Report& report);

// Full entry point used by main: 0 success, 1 bound violation, 2 error.
int run_cli(int argc, char** argv);

}  // namespace lrl::cli

#endif  // LRLATTICE_TOOLS_SCENARIO_HPP
