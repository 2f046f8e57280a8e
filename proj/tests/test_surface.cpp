#include "perishell/surface.hpp"

#include "perishell/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace psh;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi_v<double>;
}

TEST_CASE("plane evaluates to zero everywhere") {
  const SurfaceSpec plane = builtinSpec("plane");
  CHECK(evaluate(plane, 0.0, 0.0) == 0.0);
  CHECK(evaluate(plane, 1.234, -8.9) == 0.0);
  CHECK(evaluate(plane, 1e6, 1e-6) == 0.0);
}

TEST_CASE("sine1d is the cosine corrugation") {
  const SurfaceSpec s = builtinSpec("sine1d");
  CHECK(evaluate(s, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(evaluate(s, 0.0, 3.7) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(evaluate(s, std::numbers::pi, 0.0) == doctest::Approx(-1.0).epsilon(1e-15));
  // y-independence
  CHECK(evaluate(s, 1.1, 0.3) == evaluate(s, 1.1, 5.9));
}

TEST_CASE("sumsep sums the sine profile and the triangle profile") {
  const SurfaceSpec s = builtinSpec("sumsep");
  // Triangle peak sits at y = L2/2; the two 1-D profiles evaluated
  // independently give cos(pi) + 1.
  const double expected = std::cos(std::numbers::pi) + 1.0;
  CHECK(evaluate(s, std::numbers::pi, kTwoPi / 2.0) ==
        doctest::Approx(expected).epsilon(1e-15));

  const SurfaceSpec s2 = builtinSpec("sumsep", {{"amp_tri", 0.7}});
  CHECK(evaluate(s2, std::numbers::pi, kTwoPi / 2.0) ==
        doctest::Approx(std::cos(std::numbers::pi) + 0.7).epsilon(1e-14));
}

TEST_CASE("analytic builtins are exactly periodic") {
  std::mt19937_64 rng(20240901);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const char* name :
       {"plane", "sine1d", "trianglewave1d", "sumsep", "eggbox_smooth", "miura"}) {
    const SurfaceSpec s = builtinSpec(name);
    const auto [L1, L2] = s.periods();
    for (int k = 0; k < 100; ++k) {
      const double x = u(rng) * L1;
      const double y = u(rng) * L2;
      const double z = evaluate(s, x, y);
      const double xs = x + L1;
      const double ys = y + L2;
      // Arguments are reduced exactly, so whenever the translated input
      // is itself exact the values match bit for bit; otherwise only the
      // input rounding (one ulp of x + L1) can leak through.
      if (xs - L1 == x)
        CHECK(evaluate(s, xs, y) == z);
      else
        CHECK(std::abs(evaluate(s, xs, y) - z) <= 1e-13);
      if (ys - L2 == y)
        CHECK(evaluate(s, x, ys) == z);
      else
        CHECK(std::abs(evaluate(s, x, ys) - z) <= 1e-13);
    }
  }
}

TEST_CASE("plane 4x4 sampling: counts and exact tiling") {
  const PeriodicMesh m = sample(builtinSpec("plane"), 4, 4);
  CHECK(m.vertexCount() == 16);
  CHECK(m.triangleCount() == 32);
  CHECK(m.projectedAreaSum() ==
        doctest::Approx(m.L1 * m.L2).epsilon(1e-14));
}

TEST_CASE("sine1d sampling: z range and y-invariance") {
  const PeriodicMesh m = sample(builtinSpec("sine1d"), 16, 8);
  CHECK(m.vertexCount() == 16 * 8);
  for (const auto& v : m.vertices) {
    CHECK(v.z() <= 1.0);
    CHECK(v.z() >= -1.0);
  }
  for (int i = 0; i < 16; ++i)
    for (int j = 1; j < 8; ++j)
      CHECK(m.vertices[static_cast<size_t>(j * 16 + i)].z() ==
            m.vertices[static_cast<size_t>(i)].z());
}

TEST_CASE("sumsep 32x32 sampling has the grid Euler counts") {
  const PeriodicMesh m = sample(builtinSpec("sumsep"), 32, 32);
  CHECK(m.vertexCount() == 1024);
  CHECK(m.triangleCount() == 2048);
  // V - E + F = 0 with E = 3F/2 is enforced by validate(); spot-check it.
  CHECK(m.vertexCount() - 3 * m.triangleCount() / 2 + m.triangleCount() == 0);
}

TEST_CASE("catalog carries the required presets") {
  const auto entries = catalog();
  std::set<std::string> names;
  for (const auto& e : entries) names.insert(e.name);
  for (const char* required : {"plane", "sine1d", "trianglewave1d", "sumsep",
                               "eggbox_smooth", "miura"})
    CHECK(names.count(required) == 1);
  CHECK(names.count("sumsep_aniso2") == 1);
  CHECK(names.count("sumsep_aniso4") == 1);
}

TEST_CASE("every catalog preset tiles the cell under both diagonal rules") {
  for (const auto& e : catalog()) {
    for (const DiagonalRule rule : {DiagonalRule::Uniform, DiagonalRule::Alternating}) {
      for (const int n : {5, 8}) {
        const PeriodicMesh m = sample(e.spec, n, n, rule);
        for (const Triangle& t : m.triangles) CHECK(m.projectedArea(t) > 0.0);
        CHECK(m.projectedAreaSum() ==
              doctest::Approx(m.L1 * m.L2).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("triangle-wave kinks snap the grid") {
  const PeriodicMesh m = sample(builtinSpec("trianglewave1d", {{"waves", 2}}), 10, 6);
  CHECK(m.meta.requested_n1 == 10);
  CHECK(m.meta.grid_n1 == 12);  // next multiple of 2*waves
  CHECK(m.meta.grid_n2 == 6);
  // With kinks on grid lines every x-column sits exactly on the profile.
  const SurfaceSpec s = builtinSpec("trianglewave1d", {{"waves", 2}});
  for (const auto& v : m.vertices)
    CHECK(v.z() == doctest::Approx(evaluate(s, v.x(), v.y())).epsilon(1e-15));
}

TEST_CASE("sumsep snaps n2 to the triangle wave in y") {
  const PeriodicMesh m = sample(builtinSpec("sumsep"), 8, 7);
  CHECK(m.meta.grid_n2 == 8);
  CHECK(m.meta.requested_n2 == 7);
}

TEST_CASE("sampling is bit-reproducible") {
  const PeriodicMesh a = sample(builtinSpec("eggbox_smooth"), 12, 10);
  const PeriodicMesh b = sample(builtinSpec("eggbox_smooth"), 12, 10);
  REQUIRE(a.vertexCount() == b.vertexCount());
  for (int v = 0; v < a.vertexCount(); ++v)
    CHECK(a.vertices[static_cast<size_t>(v)] == b.vertices[static_cast<size_t>(v)]);
  CHECK(a.contentHash() == b.contentHash());
}

TEST_CASE("miura natural cell") {
  const PeriodicMesh m = sample(builtinSpec("miura"), 16, 16);
  CHECK(m.vertexCount() == 4);
  CHECK(m.triangleCount() == 8);
  // Heights alternate between 0 and the ridge height.
  std::set<double> zs;
  for (const auto& v : m.vertices) zs.insert(v.z());
  CHECK(zs.size() == 2);
  CHECK(*zs.begin() == 0.0);

  // The mesh is the graph of the builtin: vertices and panel midpoints
  // evaluate back onto the surface.
  const SurfaceSpec s = builtinSpec("miura");
  for (const auto& v : m.vertices)
    CHECK(evaluate(s, v.x(), v.y()) == doctest::Approx(v.z()).epsilon(1e-13));
  for (const Triangle& t : m.triangles) {
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (const Corner& corner : t.corners) c += m.cornerPosition(corner);
    c /= 3.0;
    CHECK(evaluate(s, c.x(), c.y()) == doctest::Approx(c.z()).epsilon(1e-12));
  }
}

TEST_CASE("miura replication scales the cell") {
  const PeriodicMesh m = sample(builtinSpec("miura", {{"replicate", 2}}), 3, 3);
  CHECK(m.vertexCount() == 16);
  CHECK(m.triangleCount() == 32);
  const PeriodicMesh one = sample(builtinSpec("miura"), 3, 3);
  CHECK(m.L1 == doctest::Approx(2.0 * one.L1).epsilon(1e-15));
}

TEST_CASE("surface config json round-trips") {
  const SurfaceSpec s = builtinSpec("sumsep", {{"L2", 3.0}, {"amp_tri", 0.5}});
  const SurfaceSpec back = surfaceFromJsonText(surfaceToJsonText(s));
  CHECK(evaluate(back, 0.3, 1.1) == evaluate(s, 0.3, 1.1));

  const PeriodicMesh m = sample(builtinSpec("sine1d"), 6, 4);
  const PeriodicMesh back2 = meshFromJsonText(meshToJsonText(m));
  CHECK(back2.contentHash() == m.contentHash());
  CHECK(back2.meta.source == "sine1d");
}

TEST_CASE("heightgrid evaluates by periodic bilinear interpolation") {
  HeightGridSpec g;
  g.L1 = 4.0;
  g.L2 = 4.0;
  g.heights.setZero(4, 4);
  g.heights(1, 2) = 2.0;
  const SurfaceSpec s{g};
  // Grid nodes reproduce samples exactly.
  CHECK(evaluate(s, 1.0, 2.0) == 2.0);
  CHECK(evaluate(s, 0.0, 0.0) == 0.0);
  // Halfway to a neighboring node: linear in each axis.
  CHECK(evaluate(s, 1.5, 2.0) == doctest::Approx(1.0));
  CHECK(evaluate(s, 1.0, 2.5) == doctest::Approx(1.0));
  // Wraps around the far boundary.
  CHECK(evaluate(s, 3.5, 0.0) == doctest::Approx(0.0));

  const PeriodicMesh m = sample(s, 4, 4);
  CHECK(m.vertices[static_cast<size_t>(2 * 4 + 1)].z() == 2.0);
}

TEST_CASE("input validation errors") {
  CHECK_THROWS_AS(builtinSpec("klein_bottle"), Error);
  CHECK_THROWS_AS(builtinSpec("sine1d", {{"waves", 0}}), Error);
  CHECK_THROWS_AS(builtinSpec("sine1d", {{"frequency", 2}}), Error);
  CHECK_THROWS_AS(
      builtinSpec("sine1d", {{"amplitude", std::numeric_limits<double>::infinity()}}),
      Error);
  CHECK_THROWS_AS(sample(builtinSpec("plane"), 2, 8), Error);
  CHECK_THROWS_AS(surfaceFromJsonText("{not json"), Error);
  CHECK_THROWS_AS(surfaceFromJsonText("{\"variant\":\"nope\"}"), Error);
  CHECK_THROWS_AS(evaluate(SurfaceSpec{sample(builtinSpec("plane"), 3, 3)}, 0, 0),
                  Error);
}

TEST_CASE("degenerate projected triangles are a hard error") {
  PeriodicMesh m = sample(builtinSpec("plane"), 3, 3);
  // Flip one triangle's winding: negative projected area must be rejected.
  std::swap(m.triangles[0].corners[0], m.triangles[0].corners[1]);
  CHECK_THROWS_AS(m.validate(), Error);
}
