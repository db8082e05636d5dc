#include "qwalk/coin_ops.hpp"

#include <cmath>

#include "qwalk/errors.hpp"

namespace qw {
namespace {

constexpr cplx kI{0.0, 1.0};

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, std::string(what) + " must be finite");
}

double reduce_retardation(double delta) {
  double r = std::fmod(delta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

// Plate matrix with an extra phase on the off-diagonal: e^{iθ} upper right, e^{-iθ} lower left.
Mat2 plate_matrix(double delta, double alpha, double theta) {
  const double c = std::cos(0.5 * delta);
  const double s = std::sin(0.5 * delta);
  Mat2 m;
  m(0, 0) = c;
  m(0, 1) = kI * s * std::exp(kI * (theta - 2.0 * alpha));
  m(1, 0) = kI * s * std::exp(-kI * (theta - 2.0 * alpha));
  m(1, 1) = c;
  return m;
}

}  // namespace

namespace coin {
Spinor L() { return Spinor(1.0, 0.0); }
Spinor R() { return Spinor(0.0, 1.0); }
Spinor H() { return Spinor(M_SQRT1_2, M_SQRT1_2); }
Spinor V() { return Spinor(M_SQRT1_2, -M_SQRT1_2); }
Spinor A() { return Spinor(cplx{M_SQRT1_2, 0.0}, cplx{0.0, -M_SQRT1_2}); }
Spinor D() { return Spinor(cplx{M_SQRT1_2, 0.0}, cplx{0.0, M_SQRT1_2}); }
}  // namespace coin

CoinOperator CoinOperator::operator*(const CoinOperator& rhs) const {
  return {matrix * rhs.matrix, label + "*" + rhs.label};
}

PlateDescriptor PlateDescriptor::uniform(double delta, double alpha0) {
  require_finite(delta, "delta");
  require_finite(alpha0, "alpha0");
  return {PlateKind::Uniform, Axis::X, reduce_retardation(delta), alpha0, 0.0};
}

PlateDescriptor PlateDescriptor::grating(Axis axis, double delta, double alpha0, double shift) {
  require_finite(delta, "delta");
  require_finite(alpha0, "alpha0");
  require_finite(shift, "shift");
  return {PlateKind::Grating, axis, reduce_retardation(delta), alpha0, shift};
}

double effective_alpha0(const PlateDescriptor& plate, double period) {
  if (plate.kind == PlateKind::Uniform) return plate.alpha0;
  return plate.alpha0 - kPi * plate.shift / period;
}

double shift_for_alpha_offset(double alpha_offset, double period) {
  return -alpha_offset * period / kPi;
}

void StepProtocol::validate() const {
  if (!(period > 0.0) || !std::isfinite(period))
    fail(ErrorKind::InvalidArgument, "grating period must be positive");
  if (plates.empty()) fail(ErrorKind::InvalidArgument, "protocol has no plates");
  for (const auto& p : plates) {
    require_finite(p.delta, "delta");
    require_finite(p.alpha0, "alpha0");
    require_finite(p.shift, "shift");
  }
}

CoinOperator lc_plate(double delta, double alpha) {
  require_finite(delta, "delta");
  require_finite(alpha, "alpha");
  return {plate_matrix(delta, alpha, 0.0), "L"};
}

CoinOperator g_plate_momentum(Axis axis, double delta, double alpha0, double q) {
  require_finite(delta, "delta");
  require_finite(alpha0, "alpha0");
  require_finite(q, "q");
  return {plate_matrix(delta, alpha0, q), axis == Axis::X ? "Tx" : "Ty"};
}

StepProtocol protocol_U(double delta, double period) {
  StepProtocol p;
  p.plates = {PlateDescriptor::uniform(kPi / 2.0, 0.0),
              PlateDescriptor::grating(Axis::X, delta, 0.0),
              PlateDescriptor::grating(Axis::Y, delta, 0.0)};
  p.period = period;
  p.name = "U";
  p.validate();
  return p;
}

StepProtocol protocol_U_inverse(double delta, double period) {
  StepProtocol p;
  p.plates = {PlateDescriptor::grating(Axis::Y, kTwoPi - delta, 0.0),
              PlateDescriptor::grating(Axis::X, kTwoPi - delta, 0.0),
              PlateDescriptor::uniform(1.5 * kPi, 0.0)};
  p.period = period;
  p.name = "U_inverse";
  p.validate();
  return p;
}

double force_alpha_offset(int step_index, double force) { return 0.5 * step_index * force; }

CoinOperator step_matrix(const StepProtocol& protocol, Quasimomentum q, int step_index,
                         double force) {
  protocol.validate();
  if (step_index < 0) fail(ErrorKind::InvalidArgument, "step index must be >= 0");
  require_finite(force, "force");
  Mat2 acc = Mat2::Identity();
  for (const auto& plate : protocol.plates) {
    const double a0 = effective_alpha0(plate, protocol.period);
    Mat2 m;
    if (plate.kind == PlateKind::Uniform) {
      m = plate_matrix(plate.delta, a0, 0.0);
    } else if (plate.axis == Axis::X) {
      m = plate_matrix(plate.delta, a0 + force_alpha_offset(step_index, force), q.x);
    } else {
      m = plate_matrix(plate.delta, a0, q.y);
    }
    acc = m * acc;
  }
  return {acc, protocol.name};
}

double phase_distance(const Mat2& a, const Mat2& b) {
  const cplx overlap = (b.adjoint() * a).trace();
  const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx{1.0};
  return (a - phase * b).norm();
}

double unitarity_defect(const Mat2& u) {
  return (u.adjoint() * u - Mat2::Identity()).cwiseAbs().maxCoeff();
}

}  // namespace qw
