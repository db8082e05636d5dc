#pragma once

// Coin-space and lattice operators realized by liquid-crystal plates.
//
// Basis: circular polarizations |L> = (1, 0), |R> = (0, 1).
// Operator products are written right-to-left: the first plate the light
// crosses is the rightmost factor, so U = T_y T_x W applies W first.
// Global phases are kept; compare operators with phase_distance().

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace qw {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Spinor = Eigen::Vector2cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

namespace coin {
Spinor L();
Spinor R();
Spinor H();  // (|L> + |R>)/sqrt2
Spinor V();  // (|L> - |R>)/sqrt2
Spinor A();  // (|L> - i|R>)/sqrt2
Spinor D();  // (|L> + i|R>)/sqrt2
}  // namespace coin

struct CoinOperator {
  Mat2 matrix = Mat2::Identity();
  std::string label;

  CoinOperator operator*(const CoinOperator& rhs) const;
};

enum class PlateKind { Uniform, Grating };
enum class Axis { X, Y };

// One LC plate. Retardation is stored reduced to [0, 2π).
// `shift` is the lateral displacement of a grating along its own axis, in the
// same length unit as StepProtocol::period; it only enters through
// effective_alpha0().
struct PlateDescriptor {
  PlateKind kind = PlateKind::Uniform;
  Axis axis = Axis::X;
  double delta = 0.0;
  double alpha0 = 0.0;
  double shift = 0.0;

  static PlateDescriptor uniform(double delta, double alpha0 = 0.0);
  static PlateDescriptor grating(Axis axis, double delta, double alpha0 = 0.0,
                                 double shift = 0.0);
};

// Optic-axis offset seen by the beam centre: moving a grating by `shift`
// (x -> x - shift) turns α0 into α0 - π·shift/Λ.
double effective_alpha0(const PlateDescriptor& plate, double period);

// Lateral grating shift that realizes an α0 offset of `alpha_offset`.
double shift_for_alpha_offset(double alpha_offset, double period);

struct StepProtocol {
  std::vector<PlateDescriptor> plates;  // physical order: plates[0] is crossed first
  double period = 1.0;                  // grating period Λ
  std::string name;

  void validate() const;
};

// Jones matrix of a uniform LC plate with retardation δ and optic axis α.
CoinOperator lc_plate(double delta, double alpha);

// Grating plate in quasi-momentum space; q is conjugate to the plate axis.
// t -> e^{iq}, t^† -> e^{-iq}, matching <m|q> ∝ e^{i q m}.
CoinOperator g_plate_momentum(Axis axis, double delta, double alpha0, double q);

// U = T_y(δ) T_x(δ) W with W the quarter-wave plate L(π/2, 0).
StepProtocol protocol_U(double delta, double period = 1.0);

// U^{-1} built from physical retardations only:
// L(3π/2, 0) T_x(2π-δ) T_y(2π-δ); T_y is crossed first.
StepProtocol protocol_U_inverse(double delta, double period = 1.0);

struct Quasimomentum {
  double x = 0.0;
  double y = 0.0;
};

// Force orientation: positive `force` drives q_x(t) = q_x - force·t. The
// x-gratings of step t see α0 + t·force/2, i.e. they are displaced by
// Δx_t = -t·force·Λ/(2π). At t = 1 the first step is already forced.
double force_alpha_offset(int step_index, double force);

// 2x2 Bloch matrix of one step at time index t under force F_x:
// equals U(q_x - F_x t, q_y) for the translation-invariant protocols.
CoinOperator step_matrix(const StepProtocol& protocol, Quasimomentum q, int step_index = 0,
                         double force = 0.0);

// min_φ ||a - e^{iφ} b||_F
double phase_distance(const Mat2& a, const Mat2& b);

// max |(U^† U - 1)_ij|
double unitarity_defect(const Mat2& u);

}  // namespace qw
