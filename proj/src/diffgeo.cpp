#include "perishell/diffgeo.hpp"

#include "perishell/error.hpp"

#include <cmath>

namespace psh {

void PeriodicField::validate() const {
  if (!(L1 > 0.0) || !(L2 > 0.0))
    fail(ErrorKind::InvalidArgument, "field periods must be positive");
  if (n1() < 3 || n2() < 3)
    fail(ErrorKind::InvalidArgument, "field needs at least 3x3 samples");
  if (!values.allFinite())
    fail(ErrorKind::InvalidArgument, "field has non-finite samples");
}

double PeriodicField::rms() const {
  const double n = static_cast<double>(values.size());
  return std::sqrt(values.squaredNorm() / n);
}

PeriodicField sampleField(const SurfaceSpec& spec, int n1, int n2) {
  if (n1 < 3 || n2 < 3)
    fail(ErrorKind::InvalidArgument, "field sampling needs n1, n2 >= 3");
  const auto [L1, L2] = spec.periods();
  PeriodicField f;
  f.L1 = L1;
  f.L2 = L2;
  f.values.resize(n1, n2);
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i)
      f.values(i, j) = evaluate(spec, i * L1 / n1, j * L2 / n2);
  return f;
}

FieldDerivatives fdDerivatives(const PeriodicField& f) {
  f.validate();
  const int n1 = f.n1(), n2 = f.n2();
  const double h1 = f.L1 / n1, h2 = f.L2 / n2;
  FieldDerivatives d;
  for (PeriodicField* out : {&d.dx, &d.dy, &d.dxx, &d.dyy, &d.dxy}) {
    out->L1 = f.L1;
    out->L2 = f.L2;
    out->values.resize(n1, n2);
  }
  const auto& v = f.values;
  for (int j = 0; j < n2; ++j) {
    const int jm = (j + n2 - 1) % n2, jp = (j + 1) % n2;
    for (int i = 0; i < n1; ++i) {
      const int im = (i + n1 - 1) % n1, ip = (i + 1) % n1;
      d.dx.values(i, j) = (v(ip, j) - v(im, j)) / (2.0 * h1);
      d.dy.values(i, j) = (v(i, jp) - v(i, jm)) / (2.0 * h2);
      d.dxx.values(i, j) = (v(ip, j) - 2.0 * v(i, j) + v(im, j)) / (h1 * h1);
      d.dyy.values(i, j) = (v(i, jp) - 2.0 * v(i, j) + v(i, jm)) / (h2 * h2);
      d.dxy.values(i, j) =
          (v(ip, jp) - v(ip, jm) - v(im, jp) + v(im, jm)) / (4.0 * h1 * h2);
    }
  }
  return d;
}

PeriodicField gaussCurvatureGraph(const PeriodicField& f, bool sqrtDenominator) {
  const FieldDerivatives d = fdDerivatives(f);
  PeriodicField K;
  K.L1 = f.L1;
  K.L2 = f.L2;
  K.values.resize(f.n1(), f.n2());
  for (int j = 0; j < f.n2(); ++j)
    for (int i = 0; i < f.n1(); ++i) {
      const double numer = d.dxx.values(i, j) * d.dyy.values(i, j) -
                           d.dxy.values(i, j) * d.dxy.values(i, j);
      const double g = 1.0 + d.dx.values(i, j) * d.dx.values(i, j) +
                       d.dy.values(i, j) * d.dy.values(i, j);
      K.values(i, j) = numer / (sqrtDenominator ? std::sqrt(g) : g * g);
    }
  return K;
}

GaussResidual linearizedGaussResidual(const PeriodicField& f,
                                      const PeriodicField& wPeriodic,
                                      const CurvatureTriple& chi) {
  f.validate();
  wPeriodic.validate();
  if (f.n1() != wPeriodic.n1() || f.n2() != wPeriodic.n2() ||
      f.L1 != wPeriodic.L1 || f.L2 != wPeriodic.L2)
    fail(ErrorKind::InvalidArgument,
         "linearized Gauss residual needs matching grids for f and w");
  const FieldDerivatives df = fdDerivatives(f);
  const FieldDerivatives dw = fdDerivatives(wPeriodic);
  const Eigen::MatrixXd wxx = dw.dxx.values.array() + chi[0];
  const Eigen::MatrixXd wyy = dw.dyy.values.array() + chi[1];
  const Eigen::MatrixXd wxy = dw.dxy.values.array() + chi[2];
  GaussResidual r;
  r.field.L1 = f.L1;
  r.field.L2 = f.L2;
  r.field.values = df.dyy.values.cwiseProduct(wxx) -
                   2.0 * df.dxy.values.cwiseProduct(wxy) +
                   df.dxx.values.cwiseProduct(wyy);
  r.rmsNorm = r.field.rms();
  return r;
}

}  // namespace psh
