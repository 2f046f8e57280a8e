#include "perishell/diffgeo.hpp"

#include "perishell/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace psh;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi_v<double>;

PeriodicField trigField(int n1, int n2, int kx, int ky, double amp, double phase) {
  PeriodicField f;
  f.L1 = kTwoPi;
  f.L2 = kTwoPi;
  f.values.resize(n1, n2);
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i)
      f.values(i, j) =
          amp * std::cos(kx * (i * kTwoPi / n1) + phase) *
          std::cos(ky * (j * kTwoPi / n2) + 0.5 * phase);
  return f;
}

// Exact amplification of the 3-point second-difference applied to a
// sampled cosine: D2 cos(x) = -cos(x) * (2 - 2 cos h) / h^2.
double fdSecondDerivativeFactor(double h) { return (2.0 - 2.0 * std::cos(h)) / (h * h); }

}  // namespace

TEST_CASE("constant field has vanishing derivatives") {
  PeriodicField f;
  f.L1 = f.L2 = kTwoPi;
  f.values = Eigen::MatrixXd::Constant(8, 8, 3.25);
  const FieldDerivatives d = fdDerivatives(f);
  CHECK(d.dx.values.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(d.dy.values.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(d.dxx.values.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(d.dyy.values.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(d.dxy.values.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("second x-derivative of cos(x) at n=64") {
  const PeriodicField f = sampleField(builtinSpec("sine1d"), 64, 8);
  const FieldDerivatives d = fdDerivatives(f);
  double maxErr = 0.0;
  for (int j = 0; j < f.n2(); ++j)
    for (int i = 0; i < f.n1(); ++i) {
      const double x = i * kTwoPi / 64;
      maxErr = std::max(maxErr, std::abs(d.dxx.values(i, j) + std::cos(x)));
    }
  CHECK(maxErr <= 1e-2);
  // Sharper: the sampled-cosine stencil error is exactly |factor - 1|.
  const double factor = fdSecondDerivativeFactor(kTwoPi / 64);
  CHECK(maxErr == doctest::Approx(std::abs(factor - 1.0)).epsilon(1e-8));
}

TEST_CASE("x-independent field has exactly zero x-derivative") {
  PeriodicField f;
  f.L1 = f.L2 = kTwoPi;
  f.values.resize(8, 8);
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 8; ++i) f.values(i, j) = std::sin(j * kTwoPi / 8);
  const FieldDerivatives d = fdDerivatives(f);
  CHECK(d.dx.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.dxx.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.dxy.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gauss curvature of the plane and of developable corrugations") {
  const PeriodicField plane = sampleField(builtinSpec("plane"), 16, 16);
  CHECK(gaussCurvatureGraph(plane).values.cwiseAbs().maxCoeff() == 0.0);

  // cos(x) graph: f_yy and f_xy vanish identically, so K does too.
  const PeriodicField corr = sampleField(builtinSpec("sine1d"), 32, 8);
  CHECK(gaussCurvatureGraph(corr).values.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("gauss curvature of the eggbox at the dome point") {
  const int n = 64;
  const PeriodicField f = sampleField(builtinSpec("eggbox_smooth"), n, n);
  const PeriodicField K = gaussCurvatureGraph(f);
  // Grid node (16, 16) is (pi/2, pi/2): closed form gives K = 1 there,
  // and the discrete value is the product of two stencil factors.
  const double factor = fdSecondDerivativeFactor(kTwoPi / n);
  CHECK(K.values(16, 16) == doctest::Approx(factor * factor).epsilon(1e-10));
  CHECK(std::abs(K.values(16, 16) - 1.0) <= 2e-3);
}

TEST_CASE("gauss curvature converges to the closed form on the eggbox") {
  auto rmsError = [](int n) {
    const PeriodicField f = sampleField(builtinSpec("eggbox_smooth"), n, n);
    const PeriodicField K = gaussCurvatureGraph(f);
    double sq = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double x = i * kTwoPi / n, y = j * kTwoPi / n;
        const double sx = std::sin(x), sy = std::sin(y);
        const double cx = std::cos(x), cy = std::cos(y);
        const double numer = sx * sx * sy * sy - cx * cx * cy * cy;
        const double g = 1.0 + cx * cx * sy * sy + sx * sx * cy * cy;
        const double exact = numer / (g * g);
        sq += (K.values(i, j) - exact) * (K.values(i, j) - exact);
      }
    return std::sqrt(sq / (n * n));
  };
  const double e16 = rmsError(16);
  const double e32 = rmsError(32);
  const double order = std::log2(e16 / e32);
  CHECK(order >= 1.8);
}

TEST_CASE("paper-form denominator is available behind a flag") {
  const PeriodicField f = sampleField(builtinSpec("eggbox_smooth"), 32, 32);
  const PeriodicField Kstd = gaussCurvatureGraph(f, false);
  const PeriodicField Ksqrt = gaussCurvatureGraph(f, true);
  const FieldDerivatives d = fdDerivatives(f);
  for (int idx : {0, 5, 17}) {
    const int i = idx % 32, j = (idx * 7) % 32;
    const double g = 1.0 + d.dx.values(i, j) * d.dx.values(i, j) +
                     d.dy.values(i, j) * d.dy.values(i, j);
    CHECK(Ksqrt.values(i, j) ==
          doctest::Approx(Kstd.values(i, j) * g * g / std::sqrt(g)).epsilon(1e-12));
  }
}

TEST_CASE("w = xy solves the linearized isometry equation on sumsep") {
  const PeriodicField f = sampleField(builtinSpec("sumsep"), 32, 32);
  PeriodicField w;
  w.L1 = f.L1;
  w.L2 = f.L2;
  w.values = Eigen::MatrixXd::Zero(32, 32);
  const GaussResidual r = linearizedGaussResidual(f, w, {0.0, 0.0, 1.0});
  CHECK(r.rmsNorm <= 1e-12);
}

TEST_CASE("plane admits every quadratic deflection") {
  const PeriodicField f = sampleField(builtinSpec("plane"), 16, 16);
  PeriodicField w = sampleField(builtinSpec("eggbox_smooth"), 16, 16);
  const GaussResidual r = linearizedGaussResidual(f, w, {0.4, -1.0, 2.0});
  CHECK(r.rmsNorm == 0.0);
}

TEST_CASE("bending a corrugation across its waves is not isometric") {
  // f = cos(x) with w = y^2/2: residual is f_xx = -cos(x) up to the
  // stencil factor, whose grid RMS is 1/sqrt(2).
  const int n = 64;
  const PeriodicField f = sampleField(builtinSpec("sine1d"), n, n);
  PeriodicField w;
  w.L1 = f.L1;
  w.L2 = f.L2;
  w.values = Eigen::MatrixXd::Zero(n, n);
  const GaussResidual r = linearizedGaussResidual(f, w, {0.0, 1.0, 0.0});
  const double factor = fdSecondDerivativeFactor(kTwoPi / n);
  CHECK(r.rmsNorm == doctest::Approx(factor / std::sqrt(2.0)).epsilon(1e-10));
  CHECK(std::abs(r.rmsNorm - 1.0 / std::sqrt(2.0)) <= 1e-3);
}

TEST_CASE("the bilinear residual form is symmetric in f and w") {
  const PeriodicField f = trigField(24, 24, 2, 1, 0.8, 0.3);
  const PeriodicField w = trigField(24, 24, 1, 3, 1.1, 1.2);
  const GaussResidual rfw = linearizedGaussResidual(f, w);
  const GaussResidual rwf = linearizedGaussResidual(w, f);
  CHECK((rfw.field.values - rwf.field.values).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("grid mismatch is rejected") {
  const PeriodicField f = sampleField(builtinSpec("plane"), 8, 8);
  const PeriodicField w = sampleField(builtinSpec("plane"), 8, 10);
  CHECK_THROWS_AS(linearizedGaussResidual(f, w), Error);
}
