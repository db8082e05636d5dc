#pragma once

// Plain-text exports. Every file starts with '#' comment lines carrying the
// schema version and a hash of the producing configuration.

#include <string>
#include <vector>

#include <json.hpp>

#include "qwalk/bloch.hpp"
#include "qwalk/edge.hpp"
#include "qwalk/lattice_walk.hpp"
#include "qwalk/optics.hpp"
#include "qwalk/transport.hpp"

namespace qw::io {

inline constexpr int kSchemaVersion = 1;

struct Meta {
  std::string command;
  std::string config_hash;  // 16 hex digits
  std::vector<std::string> extra;  // additional comment lines
};

// FNV-1a 64 of the compact dump (keys are sorted by nlohmann::json).
std::string config_hash(const nlohmann::json& config);

std::vector<std::string> header_lines(const Meta& meta);

// m_x,m_y,p
void write_distribution_csv(const std::string& path, const Distribution& d, const Meta& meta);
Distribution read_distribution_csv(const std::string& path);

// q_x,q_y,epsilon,n_x,n_y,n_z,omega_minus (ε of the upper band)
void write_bands_csv(const std::string& path, const BZGrid& grid, const Meta& meta);

// delta,chern_minus,gap0,gappi (chern_minus empty when near-critical)
void write_phase_diagram_csv(const std::string& path, const PhaseDiagram& pd, const Meta& meta);

// t,dx,dy
void write_trajectory_csv(const std::string& path, const std::vector<double>& dx,
                          const std::vector<double>& dy, const Meta& meta);

// q_y,epsilon,lambda,mean_x
void write_strip_csv(const std::string& path, const StripSpectrum& s, const Meta& meta);

// Pretty JSON with a "meta" member added.
void write_json(const std::string& path, nlohmann::json j, const Meta& meta);

// {"window": {...}, "rows": [[m_x, m_y, p], ...]} in the CSV row order.
nlohmann::json to_json(const Distribution& d);
nlohmann::json to_json(const SiteGrid& g);
nlohmann::json to_json(const ModeOverlap& o);

}  // namespace qw::io
