#include "sphereflow/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "sphereflow/diagnostics.hpp"
#include "sphereflow/dual.hpp"
#include "sphereflow/errors.hpp"
#include "sphereflow/numfmt.hpp"
#include "sphereflow/rng.hpp"
#include "sphereflow/svg.hpp"

namespace sphereflow {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;
constexpr double kDualCheckDefaultTol = 5e-3;
constexpr double kBenchmarkDefaultTol = 1e-6;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw ConfigError("config " + origin + ": " + msg);
}

void expect_keys(const json& j, std::initializer_list<const char*> allowed,
                 const std::string& origin, const std::string& where) {
  for (const auto& item : j.items()) {
    bool known = std::any_of(allowed.begin(), allowed.end(),
                             [&](const char* k) { return item.key() == k; });
    if (!known)
      fail(origin, "unknown key \"" + item.key() + "\" in " + where);
  }
}

double num_field(const json& j, const char* key, double def,
                 const std::string& origin) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_number()) fail(origin, std::string(key) + " must be a number");
  return v.get<double>();
}

int int_field(const json& j, const char* key, int def,
              const std::string& origin) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_number_integer())
    fail(origin, std::string(key) + " must be an integer");
  return v.get<int>();
}

std::string str_field(const json& j, const char* key, const std::string& def,
                      const std::string& origin) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_string()) fail(origin, std::string(key) + " must be a string");
  return v.get<std::string>();
}

FunctionSpec parse_curvature(const json& cv, const std::string& origin) {
  if (!cv.is_object()) fail(origin, "curvature must be an object");
  expect_keys(cv, {"kind", "k", "inverse"}, origin, "curvature");
  std::string kind = str_field(cv, "kind", "", origin);
  FunctionSpec spec = FunctionSpec::mean();
  try {
    if (kind == "mean") {
      if (cv.contains("k")) fail(origin, "curvature kind \"mean\" takes no k");
    } else if (kind == "sigma") {
      spec = FunctionSpec::sigma(int_field(cv, "k", 2, origin));
    } else if (kind == "quotient") {
      spec = FunctionSpec::quotient(int_field(cv, "k", 1, origin));
    } else {
      fail(origin, "curvature kind must be \"mean\", \"sigma\" or \"quotient\"");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(origin, std::string("curvature: ") + e.what());
  }
  if (cv.contains("inverse")) {
    const json& inv = cv.at("inverse");
    if (!inv.is_boolean()) fail(origin, "curvature inverse must be a boolean");
    if (inv.get<bool>()) spec = FunctionSpec::inverse(spec);
  }
  return spec;
}

StopRule parse_stop(const json& st, const std::string& origin) {
  if (!st.is_object()) fail(origin, "stop must be an object");
  expect_keys(st, {"kind", "value"}, origin, "stop");
  std::string kind = str_field(st, "kind", "", origin);
  if (!st.contains("value")) fail(origin, "stop needs a value");
  double value = num_field(st, "value", 0.0, origin);
  try {
    if (kind == "min_radius_below") return StopRule::min_radius_below(value);
    if (kind == "max_radius_above") return StopRule::max_radius_above(value);
    if (kind == "time_reached") return StopRule::time_reached(value);
    if (kind == "pinch_ratio_above") return StopRule::pinch_ratio_above(value);
  } catch (const std::exception& e) {
    fail(origin, std::string("stop: ") + e.what());
  }
  fail(origin, "stop kind must be one of min_radius_below, max_radius_above, "
               "time_reached, pinch_ratio_above");
}

std::string stop_kind_name(StopRule::Kind k) {
  switch (k) {
    case StopRule::Kind::MinRadiusBelow: return "min_radius_below";
    case StopRule::Kind::MaxRadiusAbove: return "max_radius_above";
    case StopRule::Kind::TimeReached: return "time_reached";
    case StopRule::Kind::PinchRatioAbove: return "pinch_ratio_above";
  }
  return "?";
}

FlowSpec make_flow_spec(const ScenarioConfig& c) {
  return FlowSpec{c.direction, c.curvature, c.cfl, c.snapshot_stride, c.stop};
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << j.dump(2) << '\n';
  os.close();
  if (!os) throw std::runtime_error("write failed: " + path);
}

json config_echo(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["n"] = c.n;
  j["N"] = c.N;
  j["curvature"] = c.curvature.name();
  j["initial"] = {{"kind", c.initial_kind},
                  {"r", c.r},
                  {"amp", c.amp},
                  {"mode", c.mode}};
  j["direction"] = c.direction == FlowDirection::Contracting ? "contracting"
                                                             : "expanding";
  j["cfl"] = c.cfl;
  j["snapshot_stride"] = c.snapshot_stride;
  j["stop"] = {{"kind", stop_kind_name(c.stop.kind)}, {"value", c.stop.value}};
  j["sigmas"] = c.sigmas;
  j["seed"] = c.seed;
  return j;
}

// Flow-time failure: write the diagnostic record the exit contract promises,
// then let the caller return 3.
void write_error_json(const ScenarioConfig& c, const std::string& out_dir,
                      const std::string& type, const std::string& what) {
  json j;
  j["name"] = c.name;
  j["type"] = type;
  j["error"] = what;
  write_json_file(j, out_dir + "/error.json");
}

void emit(const std::string& line) { std::fputs(line.c_str(), stdout); }

std::string snapshot_path(const std::string& out_dir, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%06zu.txt", index);
  return out_dir + "/snapshots/" + buf;
}

void write_series_csv(const std::string& path,
                      const std::vector<DiagnosticsRecord>& recs,
                      const std::vector<double>& sigmas) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "t,theta_ref,u_min,u_max,pinch_ratio,F_tilde_min,F_tilde_max";
  for (double s : sigmas) os << ",f_sigma_" << fmt_sig(s, 6);
  os << ",tracefree\n";
  for (const auto& r : recs) {
    os << fmt17(r.t) << ',' << fmt17(r.theta) << ',' << fmt17(r.u_min) << ','
       << fmt17(r.u_max) << ',' << fmt17(r.pinch_ratio) << ','
       << fmt17(r.Ftilde_min) << ',' << fmt17(r.Ftilde_max);
    for (double f : r.f_sigma) os << ',' << fmt17(f);
    os << ',' << fmt17(r.tracefree) << '\n';
  }
  os.close();
  if (!os) throw std::runtime_error("write failed: " + path);
}

void append_fit(json& fits, const char* quantity,
                const std::vector<double>& tau,
                const std::vector<double>& value) {
  try {
    auto [lo, hi] = default_fit_window(tau, value);
    DecayFit f = fit_decay(tau, value, lo, hi);
    fits.push_back({{"quantity", quantity},
                    {"rate", f.rate},
                    {"residual", f.rms_residual},
                    {"window", json::array({f.tau_lo, f.tau_hi})}});
  } catch (const std::invalid_argument&) {
    // too few usable points in this run; no fit entry
  }
}

void write_profile_plot(const std::string& path, const ScenarioConfig& c,
                        const Trajectory& traj) {
  const auto& snaps = traj.snapshots;
  LinePlot plot;
  plot.title = c.name + ": profiles u(theta)";
  plot.x_label = "theta";
  plot.y_label = "u";
  std::size_t S = snaps.size();
  std::size_t want = std::min<std::size_t>(8, S);
  std::size_t last_pick = S;  // sentinel: no pick yet
  for (std::size_t i = 0; i < want; ++i) {
    std::size_t idx =
        want == 1 ? 0 : (i * (S - 1) + (want - 1) / 2) / (want - 1);
    if (idx == last_pick) continue;
    last_pick = idx;
    const auto& [t, g] = snaps[idx];
    PlotSeries ser;
    ser.label = "t = " + fmt_sig(t, 4);
    const AxiGrid& grid = g.grid();
    for (int jn = 0; jn <= grid.N; ++jn) {
      ser.x.push_back(grid.theta(jn));
      ser.y.push_back(g.u()[static_cast<std::size_t>(jn)]);
    }
    plot.series.push_back(std::move(ser));
  }
  write_svg_file(plot, path);
}

void write_decay_plot(const std::string& path, const ScenarioConfig& c,
                      const std::vector<double>& tau,
                      const std::vector<double>& tracefree,
                      const std::vector<double>& ftilde_range,
                      const std::vector<double>& u_dev,
                      const std::vector<double>& w_range) {
  LinePlot plot;
  plot.title = c.name + ": rescaled monitors";
  plot.x_label = "tau";
  plot.y_label = "monitor";
  plot.log_y = true;
  plot.series.push_back({"tracefree", tau, tracefree});
  plot.series.push_back({"Ftilde range", tau, ftilde_range});
  plot.series.push_back({"u rescaled dev", tau, u_dev});
  plot.series.push_back({"w range", tau, w_range});
  write_svg_file(plot, path);
}

void audit_row(std::ostream& os, const char* check, const std::string& target,
               int sample, int null_mult, double worst, double scale,
               bool violation) {
  os << check << ',' << target << ',' << sample << ',' << null_mult << ','
     << fmt17(worst) << ',' << fmt17(scale) << ',' << (violation ? 1 : 0)
     << '\n';
}

}  // namespace

ScenarioConfig parse_scenario(std::istream& is, const std::string& origin) {
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    fail(origin, e.what());
  }
  if (!j.is_object()) fail(origin, "top level must be an object");
  expect_keys(j,
              {"name", "n", "N", "curvature", "initial", "direction", "cfl",
               "snapshot_stride", "stop", "sigmas", "out", "seed", "samples",
               "tolerance"},
              origin, "scenario");

  ScenarioConfig c;
  c.name = str_field(j, "name", "", origin);
  if (c.name.empty()) fail(origin, "\"name\" is required");
  for (char ch : c.name)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' &&
        ch != '_' && ch != '.')
      fail(origin, "name may contain only letters, digits, '-', '_', '.'");
  if (c.name == "." || c.name == "..") fail(origin, "name is not a directory");

  c.n = int_field(j, "n", c.n, origin);
  c.N = int_field(j, "N", c.N, origin);
  try {
    AxiGrid probe(c.n, c.N);
  } catch (const std::exception& e) {
    fail(origin, e.what());
  }

  if (j.contains("curvature")) c.curvature = parse_curvature(j.at("curvature"), origin);
  try {
    c.curvature.validate_for_dimension(c.n);
  } catch (const std::exception& e) {
    fail(origin, e.what());
  }

  if (j.contains("initial")) {
    const json& in = j.at("initial");
    if (!in.is_object()) fail(origin, "initial must be an object");
    expect_keys(in, {"kind", "r", "amp", "mode"}, origin, "initial");
    c.initial_kind = str_field(in, "kind", "sphere", origin);
    if (c.initial_kind != "sphere" && c.initial_kind != "perturbed_sphere")
      fail(origin, "initial kind must be \"sphere\" or \"perturbed_sphere\"");
    c.r = num_field(in, "r", c.r, origin);
    c.amp = num_field(in, "amp", c.amp, origin);
    c.mode = int_field(in, "mode", c.mode, origin);
  }

  std::string dir = str_field(j, "direction", "contracting", origin);
  if (dir == "contracting")
    c.direction = FlowDirection::Contracting;
  else if (dir == "expanding")
    c.direction = FlowDirection::Expanding;
  else
    fail(origin, "direction must be \"contracting\" or \"expanding\"");

  c.cfl = num_field(j, "cfl", c.cfl, origin);
  if (!(c.cfl > 0.0) || c.cfl > 0.5) fail(origin, "cfl must lie in (0, 0.5]");
  c.snapshot_stride = int_field(j, "snapshot_stride", c.snapshot_stride, origin);
  if (c.snapshot_stride < 1) fail(origin, "snapshot_stride must be positive");

  if (j.contains("stop")) c.stop = parse_stop(j.at("stop"), origin);
  if (c.direction == FlowDirection::Contracting &&
      c.stop.kind == StopRule::Kind::MaxRadiusAbove)
    fail(origin, "max-radius stop never fires while contracting");
  if (c.direction == FlowDirection::Expanding &&
      c.stop.kind == StopRule::Kind::MinRadiusBelow)
    fail(origin, "min-radius stop never fires while expanding");

  if (j.contains("sigmas")) {
    const json& sg = j.at("sigmas");
    if (!sg.is_array()) fail(origin, "sigmas must be an array of numbers");
    c.sigmas.clear();
    for (const json& v : sg) {
      if (!v.is_number()) fail(origin, "sigmas must be an array of numbers");
      double s = v.get<double>();
      if (!std::isfinite(s)) fail(origin, "sigmas must be finite");
      c.sigmas.push_back(s);
    }
  }

  c.out = str_field(j, "out", "", origin);

  if (j.contains("seed")) {
    const json& v = j.at("seed");
    if (!v.is_number_unsigned() && !v.is_number_integer())
      fail(origin, "seed must be a nonnegative integer");
    if (v.is_number_integer() && v.get<long long>() < 0)
      fail(origin, "seed must be a nonnegative integer");
    c.seed = v.get<std::uint64_t>();
  }

  c.samples = int_field(j, "samples", c.samples, origin);
  if (c.samples < 1) fail(origin, "samples must be positive");

  if (j.contains("tolerance")) {
    c.tolerance = num_field(j, "tolerance", c.tolerance, origin);
    if (!(c.tolerance > 0.0)) fail(origin, "tolerance must be positive");
  }
  return c;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  return parse_scenario(is, path);
}

std::string resolve_out_dir(const ScenarioConfig& c,
                            const std::string& cli_out) {
  if (!cli_out.empty()) return cli_out + "/" + c.name;
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv("SPHEREFLOW_OUT"); env && *env)
    return std::string(env) + "/" + c.name;
  return "out/" + c.name;
}

GraphFunction initial_shape(const ScenarioConfig& c) {
  AxiGrid grid(c.n, c.N);
  try {
    if (c.initial_kind == "sphere") return sphere(grid, c.r);
    return perturbed_sphere(grid, c.r, c.amp, c.mode);
  } catch (const std::exception& e) {
    throw ConfigError("scenario " + c.name + ": initial shape: " + e.what());
  }
}

int cmd_run(const ScenarioConfig& c, const std::string& out_dir) {
  GraphFunction g0 = initial_shape(c);
  FlowSpec fs = make_flow_spec(c);
  std::filesystem::create_directories(out_dir + "/snapshots");

  Trajectory traj;
  try {
    traj = run(fs, g0);
  } catch (const ConvexityLoss& e) {
    write_error_json(c, out_dir, "convexity_loss", e.what());
    return 3;
  } catch (const HemisphereExit& e) {
    write_error_json(c, out_dir, "hemisphere_exit", e.what());
    return 3;
  } catch (const IntegratorFailure& e) {
    write_error_json(c, out_dir, "integrator_failure", e.what());
    return 3;
  }

  const auto& snaps = traj.snapshots;
  std::vector<DiagnosticsRecord> recs;
  recs.reserve(snaps.size());
  for (const auto& [t, g] : snaps)
    recs.push_back(snapshot_diagnostics(g, c.curvature, t, traj.tstar_est,
                                        c.direction, c.sigmas));

  write_series_csv(out_dir + "/series.csv", recs, c.sigmas);
  for (std::size_t i = 0; i < snaps.size(); ++i)
    write_graph_file(snaps[i].second, snapshot_path(out_dir, i));

  std::vector<double> tau, tracefree, ftilde_range, u_dev, w_range;
  for (const auto& r : recs) {
    tau.push_back(r.tau);
    tracefree.push_back(r.tracefree);
    ftilde_range.push_back(r.Ftilde_max - r.Ftilde_min);
    u_dev.push_back(r.u_rescaled_dev);
    w_range.push_back(r.w_max - r.w_min);
  }

  json fits = json::array();
  append_fit(fits, "tracefree", tau, tracefree);
  append_fit(fits, "Ftilde_range", tau, ftilde_range);
  append_fit(fits, "u_rescaled_dev", tau, u_dev);
  append_fit(fits, "w_range", tau, w_range);

  json meta = config_echo(c);
  meta["grid"] = {{"n", c.n}, {"N", c.N}, {"h", kPi / c.N}};
  meta["Tstar_lo"] = traj.tstar_lo;
  meta["Tstar_hi"] = traj.tstar_hi;
  meta["Tstar_est"] = traj.tstar_est;
  meta["steps"] = traj.accepted_dt.size();
  meta["snapshots"] = snaps.size();
  meta["decay_fits"] = fits;
  write_json_file(meta, out_dir + "/meta.json");

  write_profile_plot(out_dir + "/profiles.svg", c, traj);
  write_decay_plot(out_dir + "/decay.svg", c, tau, tracefree, ftilde_range,
                   u_dev, w_range);

  emit(c.name + ": steps = " + std::to_string(traj.accepted_dt.size()) +
       ", snapshots = " + std::to_string(snaps.size()) +
       ", Tstar_est = " + fmt_sig(traj.tstar_est, 8) + "\n");
  return 0;
}

int cmd_dual_check(const ScenarioConfig& c, const std::string& out_dir) {
  if (c.direction != FlowDirection::Contracting)
    throw ConfigError("scenario " + c.name +
                      ": dual-check drives the contracting leg; set "
                      "direction to \"contracting\"");
  GraphFunction g0 = initial_shape(c);
  double tol = c.tolerance > 0.0 ? c.tolerance : kDualCheckDefaultTol;
  std::filesystem::create_directories(out_dir);

  DualRunReport rep;
  try {
    rep = dual_run(c.curvature, g0, c.stop, c.cfl, c.snapshot_stride);
  } catch (const ConvexityLoss& e) {
    write_error_json(c, out_dir, "convexity_loss", e.what());
    return 3;
  } catch (const HemisphereExit& e) {
    write_error_json(c, out_dir, "hemisphere_exit", e.what());
    return 3;
  } catch (const IntegratorFailure& e) {
    write_error_json(c, out_dir, "integrator_failure", e.what());
    return 3;
  }

  std::ofstream os(out_dir + "/dual.csv");
  if (!os) throw std::runtime_error("cannot open " + out_dir + "/dual.csv");
  os << "t,d\n";
  for (std::size_t i = 0; i < rep.times.size(); ++i)
    os << fmt17(rep.times[i]) << ',' << fmt17(rep.distance[i]) << '\n';
  os.close();
  if (!os) throw std::runtime_error("write failed: " + out_dir + "/dual.csv");

  json meta = config_echo(c);
  meta["max_distance"] = rep.max_distance;
  meta["tolerance"] = tol;
  meta["Tstar_est"] = rep.contracting.tstar_est;
  meta["snapshots"] = rep.times.size();
  write_json_file(meta, out_dir + "/meta.json");

  bool ok = rep.max_distance <= tol;
  emit(c.name + ": max_distance = " + fmt_sig(rep.max_distance, 6) +
       " (tolerance " + fmt_sig(tol, 6) + ") " + (ok ? "ok" : "EXCEEDED") +
       "\n");
  return ok ? 0 : 1;
}

int cmd_concavity_audit(const ScenarioConfig& c, const std::string& out_dir) {
  if (c.n < 2)
    throw ConfigError("scenario " + c.name + ": concavity audit needs n >= 2");
  std::filesystem::create_directories(out_dir);
  const int n = c.n;
  const int S = c.samples;

  Xoshiro256pp rng(c.seed);
  std::vector<std::vector<double>> kappas(static_cast<std::size_t>(S)),
      xis(static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s) {
    auto& kv = kappas[static_cast<std::size_t>(s)];
    auto& xv = xis[static_cast<std::size_t>(s)];
    for (int i = 0; i < n; ++i) kv.push_back(rng.log_uniform(0.1, 10.0));
    for (int i = 0; i < n; ++i) xv.push_back(rng.uniform(-1.0, 1.0));
  }

  enum class Strictness { Required, NonStrictOk, ReportOnly };
  struct Target {
    FunctionSpec spec;
    Strictness strict;
    bool classk;
  };
  std::vector<Target> targets;
  targets.push_back({FunctionSpec::mean(), Strictness::NonStrictOk, false});
  for (int k = 2; k <= n; ++k)
    targets.push_back({FunctionSpec::sigma(k), Strictness::Required, false});
  targets.push_back(
      {FunctionSpec::inverse(FunctionSpec::mean()), Strictness::Required, true});
  for (int k = 2; k <= n; ++k)
    targets.push_back({FunctionSpec::inverse(FunctionSpec::sigma(k)),
                       Strictness::Required, true});
  for (int k = 1; k <= n - 1; ++k)
    targets.push_back({FunctionSpec::quotient(k), Strictness::ReportOnly, false});

  std::ofstream os(out_dir + "/audit.csv");
  if (!os) throw std::runtime_error("cannot open " + out_dir + "/audit.csv");
  os << "check,target,sample,null_mult,worst,scale,violation\n";
  long rows = 0, violations = 0;

  for (const Target& tg : targets) {
    for (int s = 0; s < S; ++s) {
      CurvatureVector kv{
          std::span<const double>(kappas[static_cast<std::size_t>(s)])};
      ConcavityVerdict v = check_strict_concavity(tg.spec, kv);
      double radius = std::max(std::abs(v.eigenvalues.front()),
                               std::abs(v.eigenvalues.back()));
      int nm = v.null_multiplicity;
      double worst_nonnull =
          nm < n ? v.eigenvalues[static_cast<std::size_t>(n - 1 - nm)] : 0.0;
      bool bad = tg.strict == Strictness::Required &&
                 !(nm == 1 && v.is_strictly_concave_at_point);
      audit_row(os, "strict_concavity", tg.spec.name(), s, nm, worst_nonnull,
                radius, bad);
      ++rows;
      violations += bad;
    }
  }

  for (int k = 1; k <= n - 1; ++k) {
    for (int s = 0; s < S; ++s) {
      CurvatureVector kv{
          std::span<const double>(kappas[static_cast<std::size_t>(s)])};
      double r = esym_concavity_residual(
          kv, k, std::span<const double>(xis[static_cast<std::size_t>(s)]));
      bool bad = r < -1e-10;
      audit_row(os, "esym_concavity", "e" + std::to_string(k + 1), s, 0, r, 1.0, bad);
      ++rows;
      violations += bad;
    }
  }

  for (const Target& tg : targets) {
    if (!tg.classk) continue;
    for (int s = 0; s < S; ++s) {
      CurvatureVector kv{
          std::span<const double>(kappas[static_cast<std::size_t>(s)])};
      std::vector<double> B = check_classK_bound(tg.spec, kv);
      std::vector<double> eigs = sym_eigenvalues(B, n);
      double radius =
          std::max(std::abs(eigs.front()), std::abs(eigs.back()));
      int nulls = static_cast<int>(
          std::count_if(eigs.begin(), eigs.end(), [&](double e) {
            return std::abs(e) <= 1e-10 * std::max(1.0, radius);
          }));
      bool bad = eigs.front() < -1e-10;
      audit_row(os, "classK_bound", tg.spec.name(), s, nulls, eigs.front(),
                radius, bad);
      ++rows;
      violations += bad;
    }
  }

  os.close();
  if (!os) throw std::runtime_error("write failed: " + out_dir + "/audit.csv");

  json meta;
  meta["name"] = c.name;
  meta["n"] = n;
  meta["samples"] = S;
  meta["seed"] = c.seed;
  meta["rows"] = rows;
  meta["violations"] = violations;
  write_json_file(meta, out_dir + "/meta.json");

  emit(c.name + ": audit rows = " + std::to_string(rows) +
       ", violations = " + std::to_string(violations) + "\n");
  return violations == 0 ? 0 : 1;
}

int cmd_benchmark(const ScenarioConfig& c, const std::string& out_dir) {
  if (c.initial_kind != "sphere")
    throw ConfigError("scenario " + c.name +
                      ": benchmark compares against the closed-form sphere; "
                      "initial kind must be \"sphere\"");
  GraphFunction g0 = initial_shape(c);
  FlowSpec fs = make_flow_spec(c);
  double tol = c.tolerance > 0.0 ? c.tolerance : kBenchmarkDefaultTol;
  std::filesystem::create_directories(out_dir);

  auto t0 = std::chrono::steady_clock::now();
  Trajectory traj;
  try {
    traj = run(fs, g0);
  } catch (const ConvexityLoss& e) {
    write_error_json(c, out_dir, "convexity_loss", e.what());
    return 3;
  } catch (const HemisphereExit& e) {
    write_error_json(c, out_dir, "hemisphere_exit", e.what());
    return 3;
  } catch (const IntegratorFailure& e) {
    write_error_json(c, out_dir, "integrator_failure", e.what());
    return 3;
  }
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  bool contracting = c.direction == FlowDirection::Contracting;
  double tstar_closed =
      contracting ? spherical_tstar(c.r) : -std::log(std::sin(c.r));
  double max_err = 0.0;
  for (const auto& [t, g] : traj.snapshots) {
    double theta = spherical_theta(t, tstar_closed);
    double ref = contracting ? theta : kPi / 2.0 - theta;
    for (double u : g.u()) max_err = std::max(max_err, std::abs(u - ref));
  }

  json meta = config_echo(c);
  meta["max_error"] = max_err;
  meta["tolerance"] = tol;
  meta["Tstar_est"] = traj.tstar_est;
  meta["Tstar_closed"] = tstar_closed;
  meta["Tstar_error"] = std::abs(traj.tstar_est - tstar_closed);
  meta["steps"] = traj.accepted_dt.size();
  meta["snapshots"] = traj.snapshots.size();
  write_json_file(meta, out_dir + "/benchmark.json");

  bool ok = max_err <= tol;
  emit(c.name + ": max_error = " + fmt_sig(max_err, 6) + " (tolerance " +
       fmt_sig(tol, 6) + "), runtime = " + fmt_sig(seconds, 4) + " s " +
       (ok ? "ok" : "EXCEEDED") + "\n");
  return ok ? 0 : 1;
}

}  // namespace sphereflow
