#pragma once

// Strip (cylinder) geometry: open along x with sites m_x = -N..N, periodic
// along y with Bloch momentum q_y. Edge modes are counted as signed crossings
// of the gap centre by branches localized on one edge.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qwalk/bloch.hpp"

namespace qw {

enum class StripBoundary {
  Reflecting,  // unpaired edge modes pass the x-grating unchanged (unitary)
  Truncated,   // off-strip conversion amplitude deleted (sub-unitary)
};

enum class Edge { Left, Right };
enum class GapCenter { Zero, Pi };

// One-step operator of size 2(2N+1); basis index 2(m_x + N) + coin.
Eigen::MatrixXcd strip_operator(double delta, double q_y, int N,
                                StripBoundary boundary = StripBoundary::Reflecting);

struct StripState {
  double epsilon = 0.0;  // -arg(eigenvalue), in (-π, π]
  double lambda = 0.0;   // log10(1 - <|x|>/N), capped at -12
  double mean_x = 0.0;   // <x>, sign tells the edge
};

struct StripSpectrum {
  int N = 0;
  double delta = 0.0;
  StripBoundary boundary = StripBoundary::Reflecting;
  std::vector<double> q_y;                    // -π + 2π j/n, j = 0..n-1
  std::vector<std::vector<StripState>> states;  // per q_y, sorted by ε
  BandGaps bulk;
};

double localization_measure(double mean_abs_x, int N);

StripSpectrum strip_spectrum(double delta, int N = 30, int q_y_count = 201,
                             StripBoundary boundary = StripBoundary::Reflecting);

// Largest |ε_k + ε_{n-1-k}| over the sorted spectrum (ε -> -ε symmetry check).
double strip_symmetry_defect(const StripSpectrum& s);

struct EdgeCountOptions {
  double lambda_edge = -1.0;
  double window = 0.5;  // fraction of the bulk half-gap scanned around the gap centre
};

// Net chirality on one edge: +1 per branch crossing the gap centre upwards as
// q_y increases, -1 downwards. W = |result|.
int count_edge_modes(const StripSpectrum& s, GapCenter gap, Edge edge,
                     const EdgeCountOptions& options = {});

struct BulkEdgeReport {
  double delta = 0.0;
  int N = 0;
  int chern_minus = 0;
  int n0_right = 0, npi_right = 0;  // signed counts
  int n0_left = 0, npi_left = 0;
  int W0 = 0, Wpi = 0;
  bool consistent = false;  // ν = n0 - nπ on the right edge and left = -right
};

// Chern number from the bulk plus edge counts on the strip. Near-critical δ
// raises with the distance to the closing gap in the message.
BulkEdgeReport bulk_edge_check(double delta, int N = 20, int q_y_count = 201,
                               StripBoundary boundary = StripBoundary::Reflecting);

}  // namespace qw
