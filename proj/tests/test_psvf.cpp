#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gurevich/error.hpp"
#include "gurevich/psvf.hpp"
#include "oracles.hpp"

using namespace gurevich;
using namespace gurevich::psvf;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("eval_field on and off the switching line") {
  const auto z = canonical_z_infinity();
  auto up = eval_field(z, {0.25, 1.0});
  REQUIRE(up.plus);
  CHECK_FALSE(up.minus);
  CHECK((*up.plus)[0] == doctest::Approx(1.0));
  CHECK((*up.plus)[1] == doctest::Approx(2.0));

  auto down = eval_field(z, {0.25, -1.0});
  REQUIRE(down.minus);
  CHECK_FALSE(down.plus);
  CHECK((*down.minus)[0] == doctest::Approx(-1.0));
  CHECK((*down.minus)[1] == doctest::Approx(2.0));

  auto both = eval_field(z, {0.25, 0.0});
  CHECK(both.multivalued());

  auto still = eval_field(z, {0.0, 1.0});
  CHECK((*still.plus)[0] == doctest::Approx(1.0));
  CHECK(std::abs((*still.plus)[1]) < 1e-15);
}

TEST_CASE("eval_field rejects non-finite points") {
  const auto z = canonical_z_infinity();
  CHECK_THROWS_AS(eval_field(z, {NAN, 0.0}), DomainError);
  CHECK_THROWS_AS(eval_field(z, {0.0, INFINITY}), DomainError);
}

TEST_CASE("Lie derivatives at reference points") {
  const auto z = canonical_z_infinity();
  CHECK(lie_derivative(z.plus, z.switching, {0.25, 0.0}, 1) == doctest::Approx(2.0));
  CHECK(lie_derivative(z.plus, z.switching, {0.0, 0.0}, 2) == doctest::Approx(4.0 * pi).epsilon(1e-12));
  CHECK(std::abs(lie_derivative(z.plus, z.switching, {0.5, 0.0}, 1)) < 1e-12);
  CHECK_THROWS_AS(lie_derivative(z.plus, z.switching, {0.0, 0.0}, 3), UnsupportedError);
}

TEST_CASE("boundary classification examples") {
  const auto z = canonical_z_infinity();
  auto c0 = classify_boundary_point(z, {0.0, 0.0});
  CHECK(c0.kind == BoundaryKind::two_fold);
  CHECK(c0.two_fold == TwoFoldKind::visible_visible);
  CHECK(describe(c0) == "two_fold(visible_visible)");

  auto half = classify_boundary_point(z, {0.5, 0.0});
  CHECK(half.kind == BoundaryKind::two_fold);
  CHECK(half.two_fold == TwoFoldKind::invisible_invisible);
  CHECK(half.plus_second == doctest::Approx(-4.0 * pi));
  CHECK(half.minus_second == doctest::Approx(4.0 * pi));

  CHECK(classify_boundary_point(z, {0.1, 0.0}).kind == BoundaryKind::crossing_plus);
  CHECK(classify_boundary_point(z, {0.6, 0.0}).kind == BoundaryKind::crossing_minus);
  CHECK(classify_boundary_point(z, {1.0, 0.0}).two_fold == TwoFoldKind::visible_visible);
  CHECK_THROWS_AS(classify_boundary_point(z, {0.3, 0.5}), DomainError);
}

TEST_CASE("integers are visible-visible, half-integers invisible-invisible") {
  const auto z = canonical_z_infinity();
  for (int j = -8; j <= 8; ++j) {
    auto c = classify_boundary_point(z, {static_cast<double>(j), 0.0});
    CHECK(c.kind == BoundaryKind::two_fold);
    CHECK(c.two_fold == TwoFoldKind::visible_visible);
    CHECK(c.plus_second == doctest::Approx(4.0 * pi).epsilon(1e-12));
    auto h = classify_boundary_point(z, {j + 0.5, 0.0});
    CHECK(h.kind == BoundaryKind::two_fold);
    CHECK(h.two_fold == TwoFoldKind::invisible_invisible);
  }
}

TEST_CASE("crossing iff the first Lie derivatives share a sign") {
  const auto z = canonical_z_infinity();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  int crossings = 0;
  for (int k = 0; k < 1000; ++k) {
    const double x = u(rng);
    const double a = lie_derivative(z.plus, z.switching, {x, 0.0}, 1);
    const double b = lie_derivative(z.minus, z.switching, {x, 0.0}, 1);
    if (std::abs(a) < 1e-6) continue;
    const auto c = classify_boundary_point(z, {x, 0.0});
    const bool crossing = c.kind == BoundaryKind::crossing_plus || c.kind == BoundaryKind::crossing_minus;
    CHECK(crossing == (a * b > 0));
    crossings += crossing;
  }
  CHECK(crossings > 900);
}

TEST_CASE("analytic Lie derivatives match finite differences") {
  const auto z = canonical_z_infinity();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(-5.0, 5.0), uy(-2.0, 2.0);
  const auto f = [](double, double y) { return y; };
  for (int side = 0; side < 2; ++side) {
    const double sx = side == 0 ? 1.0 : -1.0;
    const auto v = [sx](double x, double) { return std::pair{sx, 2.0 * std::sin(2.0 * pi * x)}; };
    const auto xf = [&](double x, double y) { return oracle::directional(f, v, x, y); };
    const auto& field = side == 0 ? z.plus : z.minus;
    for (int k = 0; k < 500; ++k) {
      const double x = ux(rng), y = uy(rng);
      const double d1 = lie_derivative(field, z.switching, {x, y}, 1);
      const double d2 = lie_derivative(field, z.switching, {x, y}, 2);
      const double fd1 = oracle::directional(f, v, x, y);
      const double fd2 = oracle::directional(xf, v, x, y, 1e-4);
      CHECK(std::abs(d1 - fd1) <= 1e-6 * std::max(1.0, std::abs(fd1)));
      CHECK(std::abs(d2 - fd2) <= 1e-6 * std::max(1.0, std::abs(fd2)) * 10.0);
    }
  }
}

TEST_CASE("the canonical field is divergence free") {
  const auto z = canonical_z_infinity();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  std::vector<PlanarPoint> pts;
  for (int k = 0; k < 1000; ++k) pts.push_back({u(rng), u(rng)});
  for (const auto& p : pts) {
    CHECK(std::abs(divergence(z.plus, p)) <= 1e-9);
    CHECK(std::abs(divergence(z.minus, p)) <= 1e-9);
  }
  const auto check = validate_field(z, pts);
  CHECK(check.ok);
  CHECK(check.max_divergence <= 1e-9);
  CHECK(check.max_jacobian_mismatch <= 1e-6);
}

TEST_CASE("to_string names") {
  CHECK(to_string(BoundaryKind::crossing_plus) == "crossing_plus");
  CHECK(to_string(TwoFoldKind::invisible_invisible) == "invisible_invisible");
}
