#pragma once

#include "perishell/surface.hpp"

#include <Eigen/Core>

#include <array>

namespace psh {

/// Scalar samples of a cell-periodic function on the uniform grid
/// x_i = i L1/n1, y_j = j L2/n2 (value(i, j) = f(x_i, y_j)).
struct PeriodicField {
  double L1 = 0.0;
  double L2 = 0.0;
  Eigen::MatrixXd values;  // n1 x n2

  int n1() const { return static_cast<int>(values.rows()); }
  int n2() const { return static_cast<int>(values.cols()); }
  void validate() const;
  double rms() const;
};

/// Samples an analytic surface (builtin or heightgrid) on an n1 x n2 grid.
PeriodicField sampleField(const SurfaceSpec& spec, int n1, int n2);

/// Central differences with periodic wraparound, second-order accurate.
struct FieldDerivatives {
  PeriodicField dx, dy, dxx, dyy, dxy;
};
FieldDerivatives fdDerivatives(const PeriodicField& f);

/// Pointwise Gauss curvature of the graph z = f(x, y),
/// K = (f_xx f_yy - f_xy^2) / (1 + |grad f|^2)^2.
/// `sqrtDenominator` switches the denominator exponent to 1/2.
PeriodicField gaussCurvatureGraph(const PeriodicField& f,
                                  bool sqrtDenominator = false);

/// Effective curvature triple (chi11, chi22, chi12) describing the
/// quadratic part chi11 x^2/2 + chi22 y^2/2 + chi12 x y of a deflection.
using CurvatureTriple = std::array<double, 3>;

/// Residual field and RMS norm of the linearized isometry equation for a
/// vertical deflection w of the graph of f:
///   f_yy w_xx - 2 f_xy w_xy + f_xx w_yy = 0.
/// The quadratic part of w enters through `chi` analytically (its second
/// derivatives are constants), keeping non-periodic data out of the FD.
struct GaussResidual {
  PeriodicField field;
  double rmsNorm = 0.0;
};
GaussResidual linearizedGaussResidual(const PeriodicField& f,
                                      const PeriodicField& wPeriodic,
                                      const CurvatureTriple& chi = {0, 0, 0});

}  // namespace psh
