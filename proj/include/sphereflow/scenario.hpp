#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sphereflow/curvature.hpp"
#include "sphereflow/flow.hpp"
#include "sphereflow/hypersurface.hpp"

namespace sphereflow {

// One scenario as described by a JSON config file.  Only "name" is required;
// every other field has the default shown here.  Unknown keys, type
// mismatches and out-of-range values all raise ConfigError.
struct ScenarioConfig {
  std::string name;
  int n = 2;
  int N = 64;
  FunctionSpec curvature = FunctionSpec::sigma(2);
  std::string initial_kind = "sphere";  // "sphere" | "perturbed_sphere"
  double r = 0.8;
  double amp = 0.0;
  int mode = 0;
  FlowDirection direction = FlowDirection::Contracting;
  double cfl = 0.2;
  int snapshot_stride = 100;
  StopRule stop = StopRule::min_radius_below(0.05);
  std::vector<double> sigmas = {0.0, 0.1};
  std::string out;          // explicit output directory (optional)
  std::uint64_t seed = 0;   // audit sampling
  int samples = 1000;       // audit sample count
  double tolerance = -1.0;  // dual-check / benchmark gate; -1 = command default
};

ScenarioConfig parse_scenario(std::istream& is, const std::string& origin);
ScenarioConfig parse_scenario_file(const std::string& path);

// Output directory precedence: --out root, then config "out" verbatim, then
// $SPHEREFLOW_OUT root, then ./out; roots get "/<name>" appended.
std::string resolve_out_dir(const ScenarioConfig& c, const std::string& cli_out);

GraphFunction initial_shape(const ScenarioConfig& c);

// Subcommand bodies.  Each returns the process exit code for its scenario:
// 0 success, 1 tolerance not met, 3 flow failure (diagnostic JSON written).
// Config-level problems throw ConfigError; the caller maps those to exit 2.
int cmd_run(const ScenarioConfig& c, const std::string& out_dir);
int cmd_dual_check(const ScenarioConfig& c, const std::string& out_dir);
int cmd_concavity_audit(const ScenarioConfig& c, const std::string& out_dir);
int cmd_benchmark(const ScenarioConfig& c, const std::string& out_dir);

}  // namespace sphereflow
