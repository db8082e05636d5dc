// qwalk: command-line front end. Exit codes: 0 success, 2 configuration or
// I/O error, 3 numerical error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "params.hpp"
#include "qwalk/bloch.hpp"
#include "qwalk/edge.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/io.hpp"
#include "qwalk/lattice_walk.hpp"
#include "qwalk/optics.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/transport.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using namespace qw;

struct Run {
  std::string verb;
  json cfg;
  io::Meta meta;
  fs::path out;

  double num(const char* k) const { return cfg.at(k).get<double>(); }
  int integer(const char* k) const { return cfg.at(k).get<int>(); }
  std::string str(const char* k) const { return cfg.at(k).get<std::string>(); }
  std::string path(const std::string& name) const { return (out / name).string(); }
};

void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

Spinor coin_named(const std::string& name) {
  if (name == "H") return coin::H();
  if (name == "V") return coin::V();
  if (name == "A") return coin::A();
  if (name == "D") return coin::D();
  if (name == "L") return coin::L();
  return coin::R();
}

Band band_named(const std::string& s) { return s == "upper" ? Band::Upper : Band::Lower; }

OpticalConfig optics_from(const Run& r) {
  OpticalConfig c;
  c.wavelength = r.num("wavelength");
  c.waist = r.num("waist");
  c.period = r.num("period");
  c.focal_length = r.num("focal_length");
  c.plate_distance = r.num("plate_distance");
  c.validate();
  return c;
}

int cmd_evolve(const Run& r) {
  const auto protocol = protocol_U(r.num("delta"));
  const bool render = r.cfg.at("render").get<bool>();
  const OpticalConfig optics;
  int files = 0;
  evolve_observed(localized_state({0, 0}, coin_named(r.str("input"))), protocol,
                  r.integer("steps"), 0.0, {}, [&](int t, const WalkerState& psi) {
                    const auto d = distribution(psi);
                    const std::string stem = "t" + std::to_string(t);
                    io::write_distribution_csv(r.path(stem + ".csv"), d, r.meta);
                    io::write_json(r.path(stem + ".json"), io::to_json(d), r.meta);
                    ++files;
                    if (render) {
                      const auto img = render_focal_plane(d, optics);
                      if (img.clipped_fraction > 1e-3)
                        warn(stem + ": " + std::to_string(100 * img.clipped_fraction) +
                             "% of the power falls outside the raster");
                      write_pgm16(r.path(stem + ".pgm"), img, io::header_lines(r.meta));
                      ++files;
                    }
                  });
  std::cout << "wrote " << files << " files to " << r.out.string() << "\n";
  return 0;
}

int cmd_bands(const Run& r) {
  const int n = r.integer("grid");
  const auto grid = bz_grid(r.num("delta"), n, n);
  io::write_bands_csv(r.path("bands.csv"), grid, r.meta);
  std::cout << "wrote " << r.path("bands.csv") << " (" << grid.samples.size() << " points)\n";
  return 0;
}

int cmd_chern(const Run& r) {
  const Band band = band_named(r.str("band"));
  const auto res = chern_number_adaptive(r.num("delta"), band, r.integer("grid"));
  const std::string key = band == Band::Lower ? "chern_minus" : "chern_plus";
  json j = {{"delta", r.num("delta")},
            {key, res.value},
            {"raw", res.raw},
            {"grid", res.grid_n},
            {"min_gap", res.min_gap}};
  io::write_json(r.path("chern.json"), j, r.meta);
  std::cout << json{{key, res.value}}.dump() << "\n";
  return 0;
}

int cmd_phase_diagram(const Run& r) {
  const double a = r.num("from"), b = r.num("to");
  const int n = r.integer("count");
  std::vector<double> deltas(n);
  for (int i = 0; i < n; ++i) deltas[i] = a + (b - a) * i / (n - 1);
  const auto pd = phase_diagram(deltas);
  for (const auto& row : pd.rows)
    if (!row.note.empty()) warn("delta = " + std::to_string(row.delta) + ": " + row.note);
  io::write_phase_diagram_csv(r.path("phase_diagram.csv"), pd, r.meta);
  for (const auto& t : pd.transitions)
    std::cout << "transition at delta = " << t.delta << " in [" << t.lo << ", " << t.hi
              << "], gap " << (t.gap == '0' ? "0" : "pi") << " min " << t.gap_min << "\n";
  return 0;
}

int cmd_transport(const Run& r) {
  BandAverageOptions o;
  o.grid = r.integer("grid");
  o.steps = r.integer("steps");
  o.combine_inverse = r.cfg.at("combine_inverse").get<bool>();
  o.sigma_G = r.num("sigma_g");
  const double delta = r.num("delta"), F = r.num("force");
  const auto force = make_force(F, delta);
  if (force.warning())
    warn("force/gap ratio " + std::to_string(force.ratio()) + " may break adiabaticity");
  const auto res = band_averaged_displacement(delta, band_named(r.str("band")), F, o);
  io::write_trajectory_csv(r.path("trajectory.csv"), res.dx, res.dy, r.meta);
  json j = {{"delta", delta},
            {"F_x", F},
            {"nu_fit", res.nu_fit},
            {"nu_err", res.nu_err},
            {"nu_fit_origin", res.nu_fit_origin},
            {"nu_err_origin", res.nu_err_origin},
            {"slope_y", res.fit_y.slope},
            {"slope_x", res.fit_x.slope},
            {"combined", o.combine_inverse},
            {"adiabatic_warning", res.adiabatic_warning}};
  io::write_json(r.path("transport.json"), j, r.meta);
  std::cout << "nu_fit = " << res.nu_fit << " +- " << res.nu_err << "\n";
  return 0;
}

int cmd_velocity_map(const Run& r) {
  const auto m = velocity_map(r.num("delta"), band_named(r.str("band")), r.integer("grid"),
                              r.integer("steps"), r.num("sigma_g"));
  std::ofstream out(r.path("velocity_map.csv"));
  if (!out) fail(ErrorKind::Io, "cannot open " + r.path("velocity_map.csv"));
  out.precision(17);
  for (const auto& line : io::header_lines(r.meta)) out << "# " << line << "\n";
  out << "q_x,q_y,v_x,v_y,v_x_analytic,v_y_analytic\n";
  for (std::size_t k = 0; k < m.q.size(); ++k)
    out << m.q[k].x << "," << m.q[k].y << "," << m.measured[k].vx << "," << m.measured[k].vy
        << "," << m.analytic[k][0] << "," << m.analytic[k][1] << "\n";
  if (!out) fail(ErrorKind::Io, "write failed for " + r.path("velocity_map.csv"));
  std::cout << "max |v - grad eps|: x " << m.max_error_x << ", y " << m.max_error_y << "\n";
  return 0;
}

int cmd_edge(const Run& r) {
  const double delta = r.num("delta");
  const int N = r.integer("width");
  const auto boundary =
      r.str("boundary") == "truncated" ? StripBoundary::Truncated : StripBoundary::Reflecting;
  const auto s = strip_spectrum(delta, N, r.integer("qy_count"), boundary);
  io::write_strip_csv(r.path("strip.csv"), s, r.meta);
  json j = {{"delta", delta}, {"N", N}, {"gap0", s.bulk.gap0}, {"gappi", s.bulk.gappi}};
  if (s.bulk.gap0 <= 1e-3 || s.bulk.gappi <= 1e-3) {
    warn("near-critical retardation; edge counts skipped");
  } else {
    const int n0 = count_edge_modes(s, GapCenter::Zero, Edge::Right);
    const int npi = count_edge_modes(s, GapCenter::Pi, Edge::Right);
    const int nu = chern_number_adaptive(delta, Band::Lower).value;
    j["W0"] = std::abs(n0);
    j["Wpi"] = std::abs(npi);
    j["n0_right"] = n0;
    j["npi_right"] = npi;
    j["chern_minus"] = nu;
    j["consistent"] = nu == n0 - npi;
    std::cout << "W0 = " << std::abs(n0) << ", Wpi = " << std::abs(npi) << ", nu = " << nu
              << "\n";
  }
  io::write_json(r.path("edge.json"), j, r.meta);
  return 0;
}

Distribution optics_input(const Run& r) {
  const std::string from = r.str("from");
  if (!from.empty()) return io::read_distribution_csv(from);
  return distribution(evolve(localized_state({0, 0}, coin_named(r.str("input"))),
                             protocol_U(r.num("delta")), r.integer("steps")));
}

int support_order(const Distribution& d) {
  int m = 1;
  for (int y = d.window.y_min; y <= d.window.y_max; ++y)
    for (int x = d.window.x_min; x <= d.window.x_max; ++x)
      if (d.at(x, y) > 1e-15) m = std::max({m, std::abs(x), std::abs(y)});
  return m;
}

int cmd_optics(const Run& r) {
  const auto cfg = optics_from(r);
  const std::string mode = r.str("mode");
  if (mode == "constants") {
    json j = {{"site_pitch", cfg.site_pitch()},
              {"spot_radius", spot_radius(cfg)},
              {"rayleigh_range", cfg.rayleigh_range()},
              {"overlap", io::to_json(adjacent_mode_overlap(cfg))}};
    io::write_json(r.path("optics.json"), j, r.meta);
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  CalibrationOptions co;
  co.raster.nx = co.raster.ny = r.integer("raster");
  co.raster.pixel = r.num("pixel");
  co.raster.tilt = r.num("tilt");

  if (mode == "calibrate") {
    const int order = std::max(1, r.integer("max_order"));
    const auto grid = calibrate_sites(cfg, order, co);
    io::write_json(r.path("site_grid.json"), io::to_json(grid), r.meta);
    std::cout << "wrote " << r.path("site_grid.json") << "\n";
    return 0;
  }

  const Distribution d = optics_input(r);
  const int order = r.integer("max_order") > 0 ? r.integer("max_order") : support_order(d);
  const auto img = render_focal_plane(d, cfg, co.raster);
  if (img.clipped_fraction > 1e-3)
    warn(std::to_string(100 * img.clipped_fraction) + "% of the power falls outside the raster");
  write_pgm16(r.path("image.pgm"), img, io::header_lines(r.meta));
  const auto grid = calibrate_sites(cfg, order, co);
  const auto extracted = extract_distribution(img, grid);
  io::write_json(r.path("site_grid.json"), io::to_json(grid), r.meta);
  io::write_distribution_csv(r.path("extracted.csv"), extracted, r.meta);
  json j = {{"similarity", similarity(d, extracted)},
            {"boxed_power_fraction", boxed_power_fraction(img, grid)},
            {"clipped_fraction", img.clipped_fraction},
            {"max_order", order}};
  io::write_json(r.path("readout.json"), j, r.meta);
  std::cout << "read-out similarity " << j["similarity"].get<double>() << "\n";
  return 0;
}

int cmd_deviations(const Run& r) {
  const auto cfg = optics_from(r);
  const auto res = simulate_nonidealities_1d(r.num("delta"), r.integer("steps"), cfg,
                                             coin_named(r.str("input")));
  io::write_distribution_csv(r.path("ideal.csv"), res.ideal, r.meta);
  io::write_distribution_csv(r.path("real.csv"), res.real, r.meta);
  json j = {{"similarity", res.similarity},
            {"raw_total", res.raw_total},
            {"steps", r.integer("steps")},
            {"plate_distance", cfg.plate_distance}};
  io::write_json(r.path("deviations.json"), j, r.meta);
  std::cout << "similarity to ideal " << res.similarity << "\n";
  return 0;
}

int cmd_monte_carlo(const Run& r) {
  const auto res = misalignment_monte_carlo(
      protocol_U(r.num("delta")), localized_state({0, 0}, coin_named(r.str("input"))),
      r.integer("steps"), r.num("sigma_shift"), r.integer("samples"),
      r.cfg.at("seed").get<std::uint64_t>(), r.num("force"));
  std::ofstream out(r.path("samples.csv"));
  if (!out) fail(ErrorKind::Io, "cannot open " + r.path("samples.csv"));
  out.precision(17);
  for (const auto& line : io::header_lines(r.meta)) out << "# " << line << "\n";
  out << "sample,com_x,com_y\n";
  for (std::size_t k = 0; k < res.samples.size(); ++k)
    out << k << "," << res.samples[k][0] << "," << res.samples[k][1] << "\n";
  if (!out) fail(ErrorKind::Io, "write failed for " + r.path("samples.csv"));
  json j = {{"mean_x", res.mean_x}, {"mean_y", res.mean_y}, {"std_x", res.std_x},
            {"std_y", res.std_y}};
  io::write_json(r.path("monte_carlo.json"), j, r.meta);
  std::cout << j.dump() << "\n";
  return 0;
}

int dispatch(const Run& r) {
  if (r.verb == "evolve") return cmd_evolve(r);
  if (r.verb == "bands") return cmd_bands(r);
  if (r.verb == "chern") return cmd_chern(r);
  if (r.verb == "phase-diagram") return cmd_phase_diagram(r);
  if (r.verb == "transport") return cmd_transport(r);
  if (r.verb == "velocity-map") return cmd_velocity_map(r);
  if (r.verb == "edge") return cmd_edge(r);
  if (r.verb == "optics") return cmd_optics(r);
  if (r.verb == "deviations") return cmd_deviations(r);
  return cmd_monte_carlo(r);
}

json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::InvalidArgument, path + ": " + e.what());
  }
}

std::string dashed(std::string s) {
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological quantum walk simulator"};
  app.require_subcommand(0, 1);
  bool print_schema = false;
  app.add_flag("--print-schema", print_schema, "print the config JSON schema and exit");

  struct Sub {
    CLI::App* app;
    std::map<std::string, std::string> values;
    std::string config;
    bool dry_run = false;
    std::string mode;
  };
  std::map<std::string, Sub> subs;
  for (const auto& v : cli::verbs()) {
    Sub& s = subs[v.name];
    s.app = app.add_subcommand(v.name, v.help);
    s.app->add_option("--config", s.config, "JSON config file");
    s.app->add_flag("--dry-run", s.dry_run, "validate the configuration and print it");
    if (v.name == "optics") s.app->add_option("task", s.mode, "render, calibrate or constants");
    for (const auto& p : v.params) {
      std::string names = "--" + p.name;
      if (p.name.find('_') != std::string::npos) names += ",--" + dashed(p.name);
      auto* opt = s.app->add_option_function<std::string>(
          names, [&s, key = p.name](const std::string& val) { s.values[key] = val; }, p.help);
      opt->type_name(p.type == cli::ParamType::Bool ? "BOOL" : "VALUE");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (print_schema) {
    std::cout << cli::config_schema().dump(2) << "\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  Sub& s = subs.at(name);
  try {
    if (!s.mode.empty()) {
      if (s.values.count("mode"))
        fail(ErrorKind::InvalidArgument, "optics mode given twice");
      s.values["mode"] = s.mode;
    }
    const json file = s.config.empty() ? json() : read_config(s.config);
    Run r;
    r.verb = name;
    r.cfg = cli::resolve(cli::verb(name), file, s.values);
    if (s.dry_run) {
      std::cout << json{{"command", name}, {"config", r.cfg}}.dump(2) << "\n";
      return 0;
    }
    set_thread_count(static_cast<std::size_t>(r.cfg.at("threads").get<long long>()));
    // Outputs must not depend on where they go or how many threads made them.
    json hashed = r.cfg;
    hashed.erase("output");
    hashed.erase("threads");
    hashed["command"] = name;
    r.meta.command = name;
    r.meta.config_hash = io::config_hash(hashed);
    r.out = r.str("output");
    std::error_code ec;
    fs::create_directories(r.out, ec);
    if (ec) fail(ErrorKind::Io, "cannot create " + r.out.string() + ": " + ec.message());
    return dispatch(r);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::InvalidArgument || e.kind() == ErrorKind::Io ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
