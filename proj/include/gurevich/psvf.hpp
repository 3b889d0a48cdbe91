#pragma once

// Planar piecewise smooth vector fields Z = (X+, X-) glued along the
// switching curve f = 0, with Lie-derivative based contact classification.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>

namespace gurevich::psvf {

struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;
};

using Vector2 = std::array<double, 2>;
/// Row-major 2x2 matrix: m[i][j] = d(component i)/d(coordinate j).
using Matrix2 = std::array<std::array<double, 2>, 2>;

/// A smooth planar field with its analytic jacobian.
struct SmoothField {
  std::function<Vector2(PlanarPoint)> velocity;
  std::function<Matrix2(PlanarPoint)> jacobian;
};

/// Switching function with analytic gradient and hessian.
struct ScalarField {
  std::function<double(PlanarPoint)> value;
  std::function<Vector2(PlanarPoint)> gradient;
  std::function<Matrix2(PlanarPoint)> hessian;
};

enum class Side { plus, minus };

struct PiecewiseField {
  SmoothField plus;   // valid on f >= 0
  SmoothField minus;  // valid on f <= 0
  ScalarField switching;
  std::string name;

  const SmoothField& field(Side side) const { return side == Side::plus ? plus : minus; }
};

/// Z(p). Exactly one member is set off the switching curve; both on it.
struct FieldValue {
  std::optional<Vector2> plus;
  std::optional<Vector2> minus;

  bool multivalued() const { return plus.has_value() && minus.has_value(); }
};

enum class BoundaryKind { crossing_plus, crossing_minus, tangency, two_fold, boundary_equilibrium };
enum class TwoFoldKind { visible_visible, invisible_invisible, visible_invisible };

struct BoundaryClassification {
  BoundaryKind kind = BoundaryKind::crossing_plus;
  Side tangency_side = Side::plus;  // tangency only
  bool visible = false;             // tangency only
  TwoFoldKind two_fold = TwoFoldKind::visible_visible;
  Side visible_side = Side::plus;   // visible_invisible two-folds only
  double plus_first = 0.0;
  double minus_first = 0.0;
  double plus_second = 0.0;
  double minus_second = 0.0;
};

struct Tolerances {
  double on_manifold = 1e-9;  // |f(p)| below this counts as p in the switching curve
  double derivative = 1e-9;   // |Lie derivative| below this counts as zero
  double equilibrium = 1e-12; // |X(p)| below this counts as an equilibrium
};

FieldValue eval_field(const PiecewiseField& z, PlanarPoint p, const Tolerances& tol = {});

/// X f (order 1) or X(X f) (order 2), both from analytic derivatives.
double lie_derivative(const SmoothField& x, const ScalarField& f, PlanarPoint p, int order);

BoundaryClassification classify_boundary_point(const PiecewiseField& z, PlanarPoint p,
                                               const Tolerances& tol = {});

/// X+ = (1, 2 sin 2πx) above y = 0, X- = (-1, 2 sin 2πx) below, f = y.
PiecewiseField canonical_z_infinity();

double divergence(const SmoothField& x, PlanarPoint p);

/// Worst-case violations of the field invariants over a set of sample points.
struct FieldCheck {
  double max_divergence = 0.0;
  double max_jacobian_mismatch = 0.0;  // relative, against central differences
  double min_gradient_norm_on_switching = 0.0;
  bool ok = false;
};

FieldCheck validate_field(const PiecewiseField& z, std::span<const PlanarPoint> samples,
                          double jacobian_rel_tol = 1e-6, double divergence_tol = 1e-9);

std::string to_string(BoundaryKind kind);
std::string to_string(TwoFoldKind kind);
std::string describe(const BoundaryClassification& c);

}  // namespace gurevich::psvf
