#include "params.hpp"

#include <cmath>
#include <cstdlib>
#include <regex>

#include "qwalk/coin_ops.hpp"
#include "qwalk/errors.hpp"

namespace qw::cli {
namespace {

using nlohmann::json;

ParamSpec angle(std::string name, json def, std::string help) {
  return {std::move(name), ParamType::Angle, std::move(def), std::move(help), {}, {}, {}};
}
ParamSpec real(std::string name, double def, std::string help, std::optional<double> lo = {},
               std::optional<double> hi = {}) {
  return {std::move(name), ParamType::Real, def, std::move(help), {}, lo, hi};
}
ParamSpec integer(std::string name, long long def, std::string help, std::optional<double> lo = {},
                  std::optional<double> hi = {}) {
  return {std::move(name), ParamType::Int, def, std::move(help), {}, lo, hi};
}
ParamSpec boolean(std::string name, bool def, std::string help) {
  return {std::move(name), ParamType::Bool, def, std::move(help), {}, {}, {}};
}
ParamSpec choice(std::string name, std::string def, std::vector<std::string> opts,
                 std::string help) {
  return {std::move(name), ParamType::Choice, std::move(def), std::move(help), std::move(opts), {},
          {}};
}
ParamSpec text(std::string name, std::string def, std::string help) {
  return {std::move(name), ParamType::Text, std::move(def), std::move(help), {}, {}, {}};
}

std::vector<ParamSpec> with_common(std::vector<ParamSpec> p) {
  p.push_back(text("output", ".", "output directory"));
  p.push_back(integer("threads", 0, "worker threads (0: $QWALK_THREADS or all cores)", 0, 4096));
  return p;
}

std::vector<ParamSpec> optical(std::vector<ParamSpec> p) {
  p.push_back(real("wavelength", 632.8e-9, "wavelength (m)", 1e-9, 1e-3));
  p.push_back(real("waist", 5e-3, "beam waist w0 (m)", 1e-7, 1.0));
  p.push_back(real("period", 5e-3, "grating period (m)", 1e-7, 1.0));
  p.push_back(real("focal_length", 0.5, "lens focal length (m)", 1e-4, 100.0));
  p.push_back(real("plate_distance", 2e-2, "distance between plates (m)", 0.0, 100.0));
  return p;
}

const std::vector<std::string> kCoins{"H", "V", "A", "D", "L", "R"};

std::vector<VerbSpec> build() {
  std::vector<VerbSpec> v;
  v.push_back({"evolve", "position-space walk; one distribution file per step",
               with_common({angle("delta", "pi/2", "retardation of the gratings"),
                            integer("steps", 5, "number of steps", 0, 500),
                            choice("input", "H", kCoins, "input polarization at the origin"),
                            boolean("render", false, "also write a camera image per step")})});
  v.push_back({"bands", "quasi-energy, Bloch vector and lower-band curvature on a BZ grid",
               with_common({angle("delta", "pi/2", "retardation"),
                            integer("grid", 101, "points per axis", 2, 2001)})});
  v.push_back({"chern", "Chern number by the plaquette method",
               with_common({angle("delta", "pi/2", "retardation"),
                            integer("grid", 24, "initial points per axis", 4, 384),
                            choice("band", "lower", {"lower", "upper"}, "band")})});
  v.push_back({"phase-diagram", "Chern number and gaps over a retardation sweep",
               with_common({angle("from", 0.05, "first retardation"),
                            angle("to", 3.1, "last retardation"),
                            integer("count", 62, "number of samples", 2, 100000)})});
  v.push_back({"transport", "band-averaged displacement under a force along x",
               with_common({angle("delta", "pi/2", "retardation"),
                            angle("force", "pi/20", "force F_x"),
                            integer("grid", 11, "wavepackets per axis", 1, 101),
                            integer("steps", 5, "number of steps", 1, 200),
                            boolean("combine_inverse", true, "average with the U^-1 series"),
                            real("sigma_g", 10.0, "wavepacket width in sites", 0.5, 200.0),
                            choice("band", "lower", {"lower", "upper"}, "band")})});
  v.push_back({"velocity-map", "measured vs analytic group velocity over the BZ",
               with_common({angle("delta", "pi/2", "retardation"),
                            choice("band", "upper", {"lower", "upper"}, "band"),
                            integer("grid", 11, "wavepackets per axis", 1, 101),
                            integer("steps", 5, "number of steps", 2, 200),
                            real("sigma_g", 10.0, "wavepacket width in sites", 0.5, 200.0)})});
  v.push_back({"edge", "strip spectrum and edge-mode counts",
               with_common({angle("delta", "7pi/8", "retardation"),
                            integer("width", 30, "half-width N of the strip", 2, 400),
                            integer("qy_count", 201, "q_y samples", 8, 10001),
                            choice("boundary", "reflecting", {"reflecting", "truncated"},
                                   "treatment of unpaired edge modes")})});
  v.push_back({"optics", "camera rendering, calibration and read-out",
               with_common(optical(
                   {choice("mode", "render", {"render", "calibrate", "constants"}, "task"),
                    text("from", "", "distribution CSV to render (default: run evolve)"),
                    angle("delta", "pi/2", "retardation when no input file is given"),
                    integer("steps", 5, "steps when no input file is given", 0, 500),
                    choice("input", "H", kCoins, "input polarization when no file is given"),
                    integer("max_order", 0, "read-out half-range in sites (0: from the input)", 0,
                            200),
                    angle("tilt", 0.0, "lattice rotation on the camera"),
                    real("pixel", 5e-6, "pixel pitch (m)", 1e-8, 1e-2),
                    integer("raster", 1024, "pixels per side", 16, 16384)}))});
  v.push_back({"deviations", "1D walk with plate spacing effects vs the ideal walk",
               with_common(optical({angle("delta", "pi/2", "retardation"),
                                    integer("steps", 10, "number of steps", 0, 1000),
                                    choice("input", "R", kCoins, "input polarization")}))});
  v.push_back({"monte-carlo", "centre-of-mass spread under random grating shifts",
               with_common({angle("delta", "pi/2", "retardation"),
                            integer("steps", 5, "number of steps", 0, 500),
                            choice("input", "H", kCoins, "input polarization"),
                            real("sigma_shift", 0.01, "shift standard deviation in periods", 0.0,
                                 10.0),
                            integer("samples", 100, "number of samples", 1, 1000000),
                            integer("seed", 1, "random seed", 0, 9.0e15),
                            angle("force", 0.0, "force F_x")})});
  return v;
}

[[noreturn]] void bad(const ParamSpec& spec, const std::string& why) {
  fail(ErrorKind::InvalidArgument, "parameter '" + spec.name + "': " + why);
}

void check_range(const ParamSpec& spec, double x) {
  if (!std::isfinite(x)) bad(spec, "must be finite");
  if (spec.min && x < *spec.min) bad(spec, "below minimum " + std::to_string(*spec.min));
  if (spec.max && x > *spec.max) bad(spec, "above maximum " + std::to_string(*spec.max));
}

double parse_real(const std::string& t) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(t, &pos);
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidArgument, "not a number: '" + t + "'");
  }
  if (pos != t.size()) fail(ErrorKind::InvalidArgument, "not a number: '" + t + "'");
  return x;
}

}  // namespace

const std::vector<VerbSpec>& verbs() {
  static const std::vector<VerbSpec> table = build();
  return table;
}

const VerbSpec& verb(const std::string& name) {
  for (const auto& v : verbs())
    if (v.name == name) return v;
  fail(ErrorKind::InvalidArgument, "unknown command '" + name + "'");
}

double parse_angle(const std::string& raw) {
  std::string t;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  // "π" in UTF-8
  for (std::size_t p; (p = t.find("\xcf\x80")) != std::string::npos;) t.replace(p, 2, "pi");
  static const std::regex frac(R"(^([+-]?)(\d+(?:\.\d*)?)?\*?pi(?:/(\d+(?:\.\d*)?))?$)");
  std::smatch m;
  if (std::regex_match(t, m, frac)) {
    const double sign = m[1] == "-" ? -1.0 : 1.0;
    const double num = m[2].matched ? parse_real(m[2]) : 1.0;
    const double den = m[3].matched ? parse_real(m[3]) : 1.0;
    if (den == 0.0) fail(ErrorKind::InvalidArgument, "zero denominator in angle '" + raw + "'");
    return sign * num * kPi / den;
  }
  if (t.empty()) fail(ErrorKind::InvalidArgument, "empty angle");
  return parse_real(t);
}

json parse_value(const ParamSpec& spec, const std::string& t) {
  switch (spec.type) {
    case ParamType::Angle:
      return check_value(spec, parse_angle(t));
    case ParamType::Real:
      return check_value(spec, parse_real(t));
    case ParamType::Int: {
      const double x = parse_real(t);
      if (x != std::floor(x)) bad(spec, "expected an integer, got '" + t + "'");
      return check_value(spec, static_cast<long long>(x));
    }
    case ParamType::Bool:
      if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
      if (t == "false" || t == "0" || t == "no" || t == "off") return false;
      bad(spec, "expected true/false, got '" + t + "'");
    case ParamType::Choice:
    case ParamType::Text:
      return check_value(spec, t);
  }
  bad(spec, "unsupported type");
}

json check_value(const ParamSpec& spec, const json& v) {
  switch (spec.type) {
    case ParamType::Angle: {
      double x = 0.0;
      if (v.is_string())
        x = parse_angle(v.get<std::string>());
      else if (v.is_number())
        x = v.get<double>();
      else
        bad(spec, "expected an angle");
      check_range(spec, x);
      return x;
    }
    case ParamType::Real: {
      if (!v.is_number()) bad(spec, "expected a number");
      const double x = v.get<double>();
      check_range(spec, x);
      return x;
    }
    case ParamType::Int: {
      if (!v.is_number_integer()) bad(spec, "expected an integer");
      check_range(spec, static_cast<double>(v.get<long long>()));
      return v.get<long long>();
    }
    case ParamType::Bool:
      if (!v.is_boolean()) bad(spec, "expected true or false");
      return v;
    case ParamType::Choice: {
      if (!v.is_string()) bad(spec, "expected a string");
      const auto s = v.get<std::string>();
      for (const auto& c : spec.choices)
        if (c == s) return s;
      std::string opts;
      for (const auto& c : spec.choices) opts += (opts.empty() ? "" : ", ") + c;
      bad(spec, "'" + s + "' is not one of " + opts);
    }
    case ParamType::Text:
      if (!v.is_string()) bad(spec, "expected a string");
      return v;
  }
  bad(spec, "unsupported type");
}

json resolve(const VerbSpec& v, const json& file, const std::map<std::string, std::string>& flags) {
  if (!file.is_null() && !file.is_object())
    fail(ErrorKind::InvalidArgument, "config file must hold a JSON object");
  auto find = [&v](const std::string& key) -> const ParamSpec* {
    for (const auto& p : v.params)
      if (p.name == key) return &p;
    return nullptr;
  };
  json out = json::object();
  for (const auto& p : v.params) out[p.name] = check_value(p, p.default_value);
  if (file.is_object())
    for (const auto& [key, value] : file.items()) {
      if (key == "schema_version") {
        if (value != 1) fail(ErrorKind::InvalidArgument, "unsupported schema_version");
        continue;
      }
      if (key == "command") {
        if (value != v.name)
          fail(ErrorKind::InvalidArgument, "config file is for command " + value.dump() +
                                               ", not '" + v.name + "'");
        continue;
      }
      const ParamSpec* p = find(key);
      if (!p) fail(ErrorKind::InvalidArgument, "unknown key '" + key + "' for " + v.name);
      out[key] = check_value(*p, value);
    }
  for (const auto& [key, value] : flags) {
    const ParamSpec* p = find(key);
    if (!p) fail(ErrorKind::InvalidArgument, "unknown option '" + key + "' for " + v.name);
    out[key] = parse_value(*p, value);
  }
  return out;
}

json config_schema() {
  json variants = json::array();
  for (const auto& v : verbs()) {
    json props = {{"schema_version", {{"const", 1}}}, {"command", {{"const", v.name}}}};
    for (const auto& p : v.params) {
      json s;
      switch (p.type) {
        case ParamType::Angle:
          s = {{"oneOf",
                {{{"type", "number"}},
                 {{"type", "string"},
                  {"pattern",
                   R"(^\s*[+-]?((\d+(\.\d*)?)?\s*\*?\s*(pi|π)(\s*/\s*\d+(\.\d*)?)?|\d+(\.\d*)?([eE][+-]?\d+)?)\s*$)"}}}}};
          break;
        case ParamType::Real:
          s = {{"type", "number"}};
          break;
        case ParamType::Int:
          s = {{"type", "integer"}};
          break;
        case ParamType::Bool:
          s = {{"type", "boolean"}};
          break;
        case ParamType::Choice:
          s = {{"enum", p.choices}};
          break;
        case ParamType::Text:
          s = {{"type", "string"}};
          break;
      }
      if (p.min) s["minimum"] = *p.min;
      if (p.max) s["maximum"] = *p.max;
      s["description"] = p.help;
      s["default"] = p.default_value;
      props[p.name] = s;
    }
    variants.push_back({{"title", v.name},
                        {"description", v.help},
                        {"type", "object"},
                        {"required", {"command"}},
                        {"properties", props},
                        {"additionalProperties", false}});
  }
  return {{"$schema", "https://json-schema.org/draft/2020-12/schema"},
          {"$id", "qwalk-config.schema.json"},
          {"title", "qwalk command configuration"},
          {"oneOf", variants}};
}

}  // namespace qw::cli
