#include "qwalk/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "qwalk/errors.hpp"

namespace qw::io {
namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  out.precision(17);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

void put_header(std::ofstream& out, const Meta& meta) {
  for (const auto& line : header_lines(meta)) out << "# " << line << "\n";
}

}  // namespace

std::string config_hash(const nlohmann::json& config) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> header_lines(const Meta& meta) {
  std::vector<std::string> lines;
  lines.push_back("qwalk schema " + std::to_string(kSchemaVersion));
  if (!meta.command.empty()) lines.push_back("command " + meta.command);
  if (!meta.config_hash.empty()) lines.push_back("config_hash " + meta.config_hash);
  for (const auto& e : meta.extra) lines.push_back(e);
  return lines;
}

void write_distribution_csv(const std::string& path, const Distribution& d, const Meta& meta) {
  auto out = open_out(path);
  put_header(out, meta);
  out << "m_x,m_y,p\n";
  for (int y = d.window.y_min; y <= d.window.y_max; ++y)
    for (int x = d.window.x_min; x <= d.window.x_max; ++x) out << x << "," << y << "," << d.at(x, y) << "\n";
  finish(out, path);
}

Distribution read_distribution_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  std::map<std::pair<int, int>, double> entries;
  std::string line;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line.rfind("m_x,m_y,p", 0) != 0)
        fail(ErrorKind::Io, path + ": expected header m_x,m_y,p");
      header = true;
      continue;
    }
    std::istringstream ls(line);
    int x = 0, y = 0;
    double p = 0.0;
    char c1 = 0, c2 = 0;
    if (!(ls >> x >> c1 >> y >> c2 >> p) || c1 != ',' || c2 != ',')
      fail(ErrorKind::Io, path + ":" + std::to_string(lineno) + ": malformed row");
    entries[{y, x}] += p;
  }
  if (entries.empty()) fail(ErrorKind::Io, path + ": no distribution rows");
  Window w{entries.begin()->first.second, entries.begin()->first.second,
           entries.begin()->first.first, entries.begin()->first.first};
  for (const auto& [k, p] : entries) {
    w.x_min = std::min(w.x_min, k.second);
    w.x_max = std::max(w.x_max, k.second);
    w.y_min = std::min(w.y_min, k.first);
    w.y_max = std::max(w.y_max, k.first);
  }
  std::vector<double> p(w.sites(), 0.0);
  for (const auto& [k, v] : entries)
    p[static_cast<std::size_t>(k.first - w.y_min) * w.width() + (k.second - w.x_min)] = v;
  return make_distribution(w, std::move(p));
}

void write_bands_csv(const std::string& path, const BZGrid& grid, const Meta& meta) {
  auto out = open_out(path);
  put_header(out, meta);
  out << "q_x,q_y,epsilon,n_x,n_y,n_z,omega_minus\n";
  for (const auto& s : grid.samples)
    out << s.q.x << "," << s.q.y << "," << s.epsilon << "," << s.n.x() << "," << s.n.y() << ","
        << s.n.z() << "," << s.omega << "\n";
  finish(out, path);
}

void write_phase_diagram_csv(const std::string& path, const PhaseDiagram& pd, const Meta& meta) {
  auto out = open_out(path);
  Meta m = meta;
  for (const auto& t : pd.transitions) {
    std::ostringstream s;
    s.precision(10);
    s << "transition delta=" << t.delta << " bracket=[" << t.lo << "," << t.hi
      << "] gap=" << (t.gap == '0' ? "0" : "pi") << " gap_min=" << t.gap_min;
    m.extra.push_back(s.str());
  }
  put_header(out, m);
  out << "delta,chern_minus,gap0,gappi\n";
  for (const auto& r : pd.rows) {
    out << r.delta << ",";
    if (r.chern_minus) out << *r.chern_minus;
    out << "," << r.gap0 << "," << r.gappi << "\n";
  }
  finish(out, path);
}

void write_trajectory_csv(const std::string& path, const std::vector<double>& dx,
                          const std::vector<double>& dy, const Meta& meta) {
  require(dx.size() == dy.size(), "trajectory components differ in length");
  auto out = open_out(path);
  put_header(out, meta);
  out << "t,dx,dy\n";
  for (std::size_t t = 0; t < dx.size(); ++t) out << t << "," << dx[t] << "," << dy[t] << "\n";
  finish(out, path);
}

void write_strip_csv(const std::string& path, const StripSpectrum& s, const Meta& meta) {
  auto out = open_out(path);
  put_header(out, meta);
  out << "q_y,epsilon,lambda,mean_x\n";
  for (std::size_t j = 0; j < s.q_y.size(); ++j)
    for (const auto& st : s.states[j])
      out << s.q_y[j] << "," << st.epsilon << "," << st.lambda << "," << st.mean_x << "\n";
  finish(out, path);
}

void write_json(const std::string& path, nlohmann::json j, const Meta& meta) {
  j["meta"] = {{"schema_version", kSchemaVersion},
               {"command", meta.command},
               {"config_hash", meta.config_hash}};
  auto out = open_out(path);
  out << j.dump(2) << "\n";
  finish(out, path);
}

nlohmann::json to_json(const Distribution& d) {
  nlohmann::json rows = nlohmann::json::array();
  for (int y = d.window.y_min; y <= d.window.y_max; ++y)
    for (int x = d.window.x_min; x <= d.window.x_max; ++x) rows.push_back({x, y, d.at(x, y)});
  return {{"window",
           {{"x_min", d.window.x_min}, {"x_max", d.window.x_max},
            {"y_min", d.window.y_min}, {"y_max", d.window.y_max}}},
          {"total", d.total},
          {"rows", std::move(rows)}};
}

nlohmann::json to_json(const SiteGrid& g) {
  nlohmann::json sites = nlohmann::json::array();
  for (int my = -g.max_order; my <= g.max_order; ++my)
    for (int mx = -g.max_order; mx <= g.max_order; ++mx) {
      const auto r = g.position(mx, my);
      sites.push_back({{"m_x", mx}, {"m_y", my}, {"X", r[0]}, {"Y", r[1]}});
    }
  return {{"max_order", g.max_order},
          {"origin", g.origin},
          {"a_x", g.a_x},
          {"a_y", g.a_y},
          {"box_half_width", g.box_half_width},
          {"sites", sites}};
}

nlohmann::json to_json(const ModeOverlap& o) {
  return {{"amplitude", o.amplitude},
          {"power", o.power},
          {"box_leakage", o.box_leakage},
          {"adopted", "amplitude"}};
}

}  // namespace qw::io
