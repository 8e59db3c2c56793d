#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <iostream>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "sphereflow/errors.hpp"
#include "sphereflow/scenario.hpp"

namespace {

int dispatch(const std::string& verb, const sphereflow::ScenarioConfig& c,
             const std::string& out_dir) {
  if (verb == "run") return sphereflow::cmd_run(c, out_dir);
  if (verb == "dual-check") return sphereflow::cmd_dual_check(c, out_dir);
  if (verb == "concavity-audit")
    return sphereflow::cmd_concavity_audit(c, out_dir);
  return sphereflow::cmd_benchmark(c, out_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"axisymmetric curvature flows on the round sphere"};
  app.require_subcommand(1);

  std::string verb;
  std::vector<std::string> config_paths;
  int jobs = 1;
  std::string out_root;

  const struct {
    const char* name;
    const char* desc;
  } verbs[] = {
      {"run", "integrate a flow scenario and write its trajectory outputs"},
      {"dual-check",
       "contract, replay the expanding dual, report the graph distance"},
      {"concavity-audit",
       "sample curvature functions and audit their concavity certificates"},
      {"benchmark", "time a spherical scenario against the closed form"},
  };
  for (const auto& v : verbs) {
    CLI::App* sub = app.add_subcommand(v.name, v.desc);
    sub->add_option("--config", config_paths,
                    "scenario config file (repeatable)")
        ->required();
    sub->add_option("--jobs", jobs, "worker threads for independent scenarios")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", out_root,
                    "output root; overrides config \"out\" and SPHEREFLOW_OUT");
    sub->callback([&verb, name = std::string(v.name)] { verb = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::vector<sphereflow::ScenarioConfig> cfgs;
  std::vector<std::string> dirs;
  std::set<std::string> seen;
  try {
    for (const std::string& path : config_paths)
      cfgs.push_back(sphereflow::parse_scenario_file(path));
    for (const auto& c : cfgs) {
      std::string dir = sphereflow::resolve_out_dir(c, out_root);
      if (!seen.insert(dir).second)
        throw sphereflow::ConfigError("two scenarios resolve to the same "
                                      "output directory: " +
                                      dir);
      dirs.push_back(dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  std::atomic<std::size_t> next{0};
  std::vector<int> codes(cfgs.size(), 0);
  std::mutex log_mx;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= cfgs.size()) return;
      try {
        codes[i] = dispatch(verb, cfgs[i], dirs[i]);
      } catch (const sphereflow::ConfigError& e) {
        std::lock_guard<std::mutex> lk(log_mx);
        std::cerr << "error: " << e.what() << '\n';
        codes[i] = 2;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lk(log_mx);
        std::cerr << "error: scenario " << cfgs[i].name << ": " << e.what()
                  << '\n';
        codes[i] = 3;
      }
    }
  };

  std::size_t workers = std::min<std::size_t>(
      static_cast<std::size_t>(jobs), cfgs.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  return codes.empty() ? 0 : *std::max_element(codes.begin(), codes.end());
}
