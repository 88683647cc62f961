#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <pilotwave/pilotwave.hpp>

namespace pilotwave::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json path_or_null(const std::optional<fs::path>& p) { return p ? json(p->string()) : json(nullptr); }

void write_manifest(const fs::path& out, const std::string& subcommand, const json& parameters,
                    std::optional<std::uint64_t> seed, const std::optional<fs::path>& config_path) {
  fs::create_directories(out);
  json manifest{{"subcommand", subcommand},
                {"parameters", parameters},
                {"seed", seed ? json(*seed) : json(nullptr)},
                {"config_path", path_or_null(config_path)},
                {"out_dir", out.string()},
                {"tool_version", kToolVersion},
                {"timestamp", utc_timestamp()}};
  write_json(out / "manifest.json", manifest);
}

PhysicalConfig resolve_config(const std::optional<fs::path>& path) {
  if (!path) return {};
  return load_config(*path);
}

json axes_json(const std::vector<ClapAxis>& axes) {
  json list = json::array();
  for (const auto& a : axes) {
    const Vec3& v = a.heads_direction();
    list.push_back({v.x, v.y, v.z});
  }
  return list;
}

/// Runs `body`, mapping exceptions to exit codes and a message on stderr.
template <class F>
int guarded(const char* name, F&& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    std::cerr << name << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const TrajectoryError& e) {
    std::cerr << name << ": trajectory " << e.index() << ": " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << name << ": " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace

json parse_inline_axes(const std::string& text) {
  json axes = json::array();
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ';')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }), item.end());
    if (item.empty()) throw ProtocolError("empty axis in '" + text + "'");
    if (item.find(',') == std::string::npos) {
      axes.push_back(item);
      continue;
    }
    json vec = json::array();
    std::stringstream parts(item);
    std::string part;
    while (std::getline(parts, part, ',')) {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(part, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != part.size()) throw ProtocolError("bad axis component '" + part + "'");
      vec.push_back(value);
    }
    axes.push_back(vec);
  }
  if (axes.empty()) throw ProtocolError("no axes given");
  return axes;
}

int cmd_coin(const CoinArgs& args) {
  return guarded("coin", [&] {
    const int sources = (args.preset ? 1 : 0) + (args.protocol ? 1 : 0) + (args.axes ? 1 : 0);
    if (sources == 0) throw UsageError("a protocol is required: --preset, --protocol or --axes");
    if (sources > 1) throw UsageError("give only one of --preset, --protocol and --axes");

    ProtocolSpec spec;
    if (args.preset) {
      spec.axes = coin_preset(*args.preset);
    } else if (args.protocol) {
      std::ifstream in(*args.protocol);
      if (!in) throw ProtocolError("cannot read protocol file " + args.protocol->string());
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw ProtocolError(std::string("protocol is not valid JSON: ") + e.what());
      }
      spec = protocol_from_json(j);
    } else {
      spec = protocol_from_json(json{{"axes", parse_inline_axes(*args.axes)}});
    }
    if (args.trials) spec.trials = *args.trials;
    if (args.seed) spec.seed = *args.seed;
    if (spec.trials < 1) throw ProtocolError("trials must be at least 1");

    json params{{"preset", args.preset ? json(*args.preset) : json(nullptr)},
                {"protocol", path_or_null(args.protocol)},
                {"axes", axes_json(spec.axes)},
                {"trials", spec.trials}};
    write_manifest(args.out, "coin", params, spec.seed, std::nullopt);

    const auto result = run_protocol(spec.axes, spec.trials, spec.seed);
    {
      auto csv = open_output(args.out / "coin_frequencies.csv");
      write_coin_csv(csv, result);
    }
    write_json(args.out / "coin_joint_counts.json", joint_counts_json(result));

    for (const auto& s : result.steps) {
      std::cout << "step " << s.step << ": P(heads) = " << s.p_heads;
      if (s.p_agree_prev) std::cout << ", P(agree with previous) = " << *s.p_agree_prev;
      std::cout << '\n';
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_curves(const CurvesArgs& args) {
  return guarded("curves", [&] {
    if (args.angle_count < 2) throw UsageError("--angles must be at least 2");
    write_manifest(args.out, "curves", json{{"angles", args.angle_count}}, std::nullopt, std::nullopt);
    const auto angles = curve_angles_deg(args.angle_count);
    auto csv = open_output(args.out / "agreement_curves.csv");
    write_curves_csv(csv, angles);
    std::cout << "wrote " << angles.size() << " angles to " << (args.out / "agreement_curves.csv").string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

namespace {

struct ResolvedSource {
  BeamSource source;
  std::size_t n;
  std::optional<std::string> preset;
};

ResolvedSource resolve_source(const SternGerlachArgs& args) {
  const int sources = (args.preset ? 1 : 0) + (args.pure ? 1 : 0) + (args.mixture ? 1 : 0);
  if (sources == 0) throw UsageError("a beam source is required: --preset, --pure or --mixture");
  if (sources > 1) throw UsageError("give only one of --preset, --pure and --mixture");

  ResolvedSource r{Mixture{}, 6, args.preset};
  if (args.preset) {
    const std::string& p = *args.preset;
    if (p == "fig7") {
      r.source = PureState{BlochAngles(std::numbers::pi / 3.0, 0.0)};
    } else if (p == "fig8") {
      r.source = PureState{BlochAngles(std::numbers::pi / 2.0, 0.0)};
    } else if (p == "fig9") {
      r.source = Mixture{};
    } else {
      throw UsageError("unknown preset '" + p + "' (expected fig7, fig8 or fig9)");
    }
  } else if (args.pure) {
    if (args.pure->size() != 2) throw UsageError("--pure takes THETA0 and PHI0 in degrees");
    double phi = degrees_to_radians((*args.pure)[1]);
    if (phi == 2.0 * std::numbers::pi) phi = 0.0;
    r.source = PureState{BlochAngles(degrees_to_radians((*args.pure)[0]), phi)};
  }
  if (args.n) r.n = *args.n;
  if (r.n < 1) throw UsageError("--n must be at least 1");
  return r;
}

json source_json(const BeamSource& source) {
  json j = to_json(source);
  if (const auto* pure = std::get_if<PureState>(&source)) {
    j["theta0_deg"] = radians_to_degrees(pure->angles.theta0());
    j["phi0_deg"] = radians_to_degrees(pure->angles.phi0());
  }
  return j;
}

std::vector<DensityRow> density_profiles(const BeamSource& source, const PhysicalConfig& config,
                                         const DerivedBeamParams& params, const std::vector<double>& times) {
  constexpr std::size_t kPoints = 401;
  std::vector<DensityRow> rows;
  std::optional<SpinorField> field;
  if (const auto* pure = std::get_if<PureState>(&source)) field = post_field_spinor(pure->angles, config, params);
  for (double t : times) {
    if (!(t >= 0.0)) throw std::invalid_argument("density snapshot times must be non-negative");
    const double reach = params.z_delta + params.u * t + 6.0 * config.sigma0;
    for (std::size_t k = 0; k < kPoints; ++k) {
      const double z = -reach + 2.0 * reach * static_cast<double>(k) / static_cast<double>(kPoints - 1);
      const double rho = field ? pure_density(*field, z, t) : mixture_density(config, params, z, t);
      rows.push_back({t, z, rho});
    }
  }
  return rows;
}

}  // namespace

int cmd_stern_gerlach(const SternGerlachArgs& args) {
  return guarded("stern-gerlach", [&] {
    const ResolvedSource resolved = resolve_source(args);
    if (args.record_every < 1) throw UsageError("--record-every must be at least 1");
    if (args.steps < 1) throw UsageError("--steps must be at least 1");
    const PhysicalConfig config = resolve_config(args.config);
    const DerivedBeamParams params = derive_beam_params(config);
    const std::vector<double> snapshots =
        args.snapshots ? *args.snapshots : std::vector<double>{0.0, params.t_screen / 2.0, params.t_screen};

    json parameters{{"preset", resolved.preset ? json(*resolved.preset) : json(nullptr)},
                    {"source", source_json(resolved.source)},
                    {"n", resolved.n},
                    {"snapshots", snapshots},
                    {"traj_limit", args.traj_limit},
                    {"record_every", args.record_every},
                    {"steps", args.steps},
                    {"verify_step_halving", args.verify_step_halving},
                    {"config", to_json(config)}};
    write_manifest(args.out, "stern-gerlach", parameters, args.seed, args.config);

    const EnsembleOptions options{args.steps, args.record_every, args.verify_step_halving};
    const EnsembleResult result = run_ensemble(resolved.source, resolved.n, config, args.seed, options);

    const std::size_t written =
        args.traj_limit == 0 ? result.trajectories.size() : std::min(args.traj_limit, result.trajectories.size());
    {
      auto csv = open_output(args.out / "trajectories.csv");
      write_trajectories_csv(csv, std::span<const Trajectory>(result.trajectories.data(), written), config.v_beam);
    }
    {
      auto csv = open_output(args.out / "density_profiles.csv");
      const auto rows = density_profiles(resolved.source, config, params, snapshots);
      write_density_csv(csv, rows);
    }
    const CrossingReport crossings = crossing_check(result.trajectories);
    write_json(args.out / "crossing_report.json", to_json(crossings));

    const SpotSummary spots = spot_statistics(result);
    std::uint64_t ties = 0;
    for (const auto& tr : result.trajectories) ties += tr.tie;
    json summary = to_json(spots);
    summary["source"] = source_json(result.source);
    summary["seed"] = result.seed;
    summary["ties"] = ties;
    summary["trajectories_written"] = written;
    summary["config"] = to_json(config);
    summary["beam"] = to_json(params);
    write_json(args.out / "ensemble_summary.json", summary);

    std::cout << "n = " << spots.n << ", up = " << spots.n_up << ", down = " << spots.n_down
              << ", fraction_up = " << spots.fraction_up << " +- " << spots.stderr_up;
    if (spots.expected) std::cout << " (Born " << *spots.expected << ", " << *summary["verdict"].get_ptr<const std::string*>() << ")";
    std::cout << "\ncrossings = " << crossings.crossings << " over " << crossings.pairs_checked << " pairs\n";
    return static_cast<int>(kExitOk);
  });
}

namespace {

struct Comparison {
  double measured;
  double expected;
  double relative_error;  // null in JSON when expected is zero
  bool pass;
};

/// Relative error within 5%, or, when the expected value is zero, an absolute
/// error below 5% of `scale`.
Comparison compare(double measured, double expected, double scale) {
  constexpr double kTolerance = 0.05;
  Comparison c{measured, expected, 0.0, false};
  if (expected != 0.0) {
    c.relative_error = std::abs(measured - expected) / std::abs(expected);
    c.pass = c.relative_error < kTolerance;
  } else {
    c.relative_error = std::numeric_limits<double>::quiet_NaN();
    c.pass = std::abs(measured) < kTolerance * scale;
  }
  return c;
}

json to_json(const Comparison& c) {
  return {{"measured", c.measured},
          {"expected", c.expected},
          {"relative_error", std::isfinite(c.relative_error) ? json(c.relative_error) : json(nullptr)},
          {"pass", c.pass}};
}

}  // namespace

int cmd_validate_field(const ValidateFieldArgs& args) {
  return guarded("validate-field", [&] {
    if (!(args.box_sigma > 0.0)) throw UsageError("--box must be positive");
    const PhysicalConfig config = resolve_config(args.config);
    const DerivedBeamParams params = derive_beam_params(config);
    GridSpec spec;
    spec.nx = args.nx;
    spec.nz = args.nz;
    spec.steps = args.steps;
    spec.extent_x = args.box_sigma * config.sigma0;
    spec.extent_z = args.box_sigma * config.sigma0;
    double phi = degrees_to_radians(args.phi_deg);
    if (phi == 2.0 * std::numbers::pi) phi = 0.0;
    const BlochAngles angles(degrees_to_radians(args.theta_deg), phi);

    json parameters{{"nx", spec.nx},       {"nz", spec.nz},           {"steps", spec.steps},
                    {"box_sigma", args.box_sigma}, {"theta0_deg", args.theta_deg}, {"phi0_deg", args.phi_deg},
                    {"snapshot", args.snapshot}, {"config", to_json(config)}};
    write_manifest(args.out, "validate-field", parameters, std::nullopt, args.config);

    const FieldEvolution ev = evolve_in_field(initial_spinor(angles, config), spec);
    const double up_norm = ev.state.component_norm(true);
    const double down_norm = ev.state.component_norm(false);

    // scales used when the expected value is zero
    const double offset_scale = 1e-3 * config.sigma0;
    const double velocity_scale = offset_scale / params.dt_field;
    json components = json::object();
    bool pass = true;
    if (up_norm > 0.0) {
      const auto c = compare(ev.centroid_plus, params.z_delta, offset_scale);
      const auto v = compare(ev.velocity_plus, params.u, velocity_scale);
      components["plus"] = {{"norm", up_norm}, {"offset", to_json(c)}, {"velocity", to_json(v)}, {"spread", ev.spread_plus}};
      pass = pass && c.pass && v.pass;
    }
    if (down_norm > 0.0) {
      const auto c = compare(ev.centroid_minus, -params.z_delta, offset_scale);
      const auto v = compare(ev.velocity_minus, -params.u, velocity_scale);
      components["minus"] = {{"norm", down_norm}, {"offset", to_json(c)}, {"velocity", to_json(v)}, {"spread", ev.spread_minus}};
      pass = pass && c.pass && v.pass;
    }
    if (up_norm > 0.0 && down_norm > 0.0) {
      const auto sep = compare(ev.centroid_plus - ev.centroid_minus, 2.0 * params.z_delta, 2.0 * offset_scale);
      const auto rel = compare(ev.velocity_plus - ev.velocity_minus, 2.0 * params.u, 2.0 * velocity_scale);
      components["separation"] = to_json(sep);
      components["relative_velocity"] = to_json(rel);
      pass = pass && sep.pass && rel.pass;
    }
    const double drift = ev.total_norm_drift / ev.initial_norm;
    const bool norm_ok = drift < 1e-6;
    const bool boundary_ok = ev.boundary_mass < kBoundaryMassLimit;
    pass = pass && norm_ok && boundary_ok;

    json report{{"verdict", pass ? "PASS" : "FAIL"},
                {"components", components},
                {"initial_norm", ev.initial_norm},
                {"relative_norm_drift", drift},
                {"max_step_norm_drift", ev.max_step_norm_drift},
                {"boundary_mass", ev.boundary_mass},
                {"free_spread_expected", free_spread(config, params.dt_field)},
                {"beam", to_json(params)},
                {"grid", {{"nx", spec.nx}, {"nz", spec.nz}, {"dx", spec.dx()}, {"dz", spec.dz()}, {"steps", spec.steps}}}};
    write_json(args.out / "field_validation.json", report);

    {
      const auto marginal = ev.state.z_marginal();
      std::vector<DensityRow> rows;
      rows.reserve(marginal.size());
      for (std::size_t j = 0; j < marginal.size(); ++j) rows.push_back({ev.state.time, spec.z_at(j), marginal[j]});
      auto csv = open_output(args.out / "field_density.csv");
      write_density_csv(csv, rows);
    }
    if (args.snapshot) {
      auto csv = open_output(args.out / "grid_snapshot.csv");
      write_grid_snapshot_csv(csv, ev.state);
    }

    std::cout << "field validation " << (pass ? "PASS" : "FAIL") << ": relative norm drift " << drift
              << ", boundary mass " << ev.boundary_mass << '\n';
    if (components.contains("separation"))
      std::cout << "separation " << ev.centroid_plus - ev.centroid_minus << " m (expected " << 2.0 * params.z_delta
                << "), relative velocity " << ev.velocity_plus - ev.velocity_minus << " m/s (expected "
                << 2.0 * params.u << ")\n";
    return static_cast<int>(pass ? kExitOk : kExitValidationFailed);
  });
}

}  // namespace pilotwave::cli
