#include "qwalk/errors.hpp"

namespace qw {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::NumericalDomain: return "numerical-domain";
    case ErrorKind::DegeneratePoint: return "degenerate-point";
    case ErrorKind::NearCritical: return "near-critical";
    case ErrorKind::WindowOverflow: return "window-overflow";
    case ErrorKind::CombinatorialLimit: return "combinatorial-limit";
    case ErrorKind::RefineResolution: return "refine-resolution";
    case ErrorKind::FitDivergence: return "fit-divergence";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

}  // namespace qw
