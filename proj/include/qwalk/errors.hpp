#pragma once

#include <stdexcept>
#include <string>

namespace qw {

// Broad failure classes. The CLI maps these onto exit codes.
enum class ErrorKind {
  InvalidArgument,
  NumericalDomain,     // formula/implementation mismatch, e.g. |cos ε| > 1
  DegeneratePoint,     // gap closing at the requested quasi-momentum
  NearCritical,        // grid-wide gap below tolerance (Chern ill-defined)
  WindowOverflow,      // lattice window would need to grow but growth is off
  CombinatorialLimit,  // path-sum beyond its supported depth
  RefineResolution,    // edge-branch tracking ambiguous at this q_y spacing
  FitDivergence,       // spot fit failed to converge
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace qw
