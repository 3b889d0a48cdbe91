#include "gurevich/psvf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gurevich/error.hpp"

namespace gurevich::psvf {

namespace {

bool finite(PlanarPoint p) { return std::isfinite(p.x) && std::isfinite(p.y); }

void require_finite(PlanarPoint p) {
  if (!finite(p)) {
    throw DomainError("non-finite planar point");
  }
}

double norm(const Vector2& v) { return std::hypot(v[0], v[1]); }

double dot(const Vector2& a, const Vector2& b) { return a[0] * b[0] + a[1] * b[1]; }

}  // namespace

FieldValue eval_field(const PiecewiseField& z, PlanarPoint p, const Tolerances& tol) {
  require_finite(p);
  const double fp = z.switching.value(p);
  FieldValue out;
  if (fp >= -tol.on_manifold) {
    out.plus = z.plus.velocity(p);
  }
  if (fp <= tol.on_manifold) {
    out.minus = z.minus.velocity(p);
  }
  return out;
}

double lie_derivative(const SmoothField& x, const ScalarField& f, PlanarPoint p, int order) {
  require_finite(p);
  if (order != 1 && order != 2) {
    throw UnsupportedError("Lie derivative order " + std::to_string(order) + " (only 1 and 2)");
  }
  const Vector2 v = x.velocity(p);
  const Vector2 g = f.gradient(p);
  if (order == 1) {
    return dot(g, v);
  }
  // d_i (Xf) = sum_k H_ik X_k + sum_k g_k dX_k/dx_i
  const Matrix2 h = f.hessian(p);
  const Matrix2 j = x.jacobian(p);
  Vector2 grad_xf{};
  for (int i = 0; i < 2; ++i) {
    grad_xf[i] = h[i][0] * v[0] + h[i][1] * v[1] + g[0] * j[0][i] + g[1] * j[1][i];
  }
  return dot(grad_xf, v);
}

BoundaryClassification classify_boundary_point(const PiecewiseField& z, PlanarPoint p,
                                               const Tolerances& tol) {
  require_finite(p);
  const double fp = z.switching.value(p);
  if (std::abs(fp) > tol.on_manifold) {
    std::ostringstream msg;
    msg << "point (" << p.x << ", " << p.y << ") is off the switching curve, f = " << fp;
    throw DomainError(msg.str());
  }

  BoundaryClassification c;
  if (norm(z.plus.velocity(p)) <= tol.equilibrium || norm(z.minus.velocity(p)) <= tol.equilibrium) {
    c.kind = BoundaryKind::boundary_equilibrium;
    return c;
  }

  c.plus_first = lie_derivative(z.plus, z.switching, p, 1);
  c.minus_first = lie_derivative(z.minus, z.switching, p, 1);
  c.plus_second = lie_derivative(z.plus, z.switching, p, 2);
  c.minus_second = lie_derivative(z.minus, z.switching, p, 2);

  const bool plus_zero = std::abs(c.plus_first) <= tol.derivative;
  const bool minus_zero = std::abs(c.minus_first) <= tol.derivative;

  if (!plus_zero && !minus_zero) {
    if (c.plus_first > 0.0 && c.minus_first > 0.0) {
      c.kind = BoundaryKind::crossing_plus;
    } else if (c.plus_first < 0.0 && c.minus_first < 0.0) {
      c.kind = BoundaryKind::crossing_minus;
    } else {
      throw UnsupportedError("sliding region (X+f * X-f < 0) is not supported");
    }
    return c;
  }

  const auto degenerate = [&](const char* side) {
    std::ostringstream msg;
    msg << "unclassified, higher-order contact of X" << side << " at (" << p.x << ", " << p.y
        << ")";
    throw ClassificationError(msg.str());
  };

  // Visible for X+ when the orbit bends back into f > 0; for X- when it bends into f < 0.
  const bool plus_visible = c.plus_second > 0.0;
  const bool minus_visible = c.minus_second < 0.0;

  if (plus_zero && minus_zero) {
    if (std::abs(c.plus_second) <= tol.derivative) degenerate("+");
    if (std::abs(c.minus_second) <= tol.derivative) degenerate("-");
    c.kind = BoundaryKind::two_fold;
    if (plus_visible && minus_visible) {
      c.two_fold = TwoFoldKind::visible_visible;
    } else if (!plus_visible && !minus_visible) {
      c.two_fold = TwoFoldKind::invisible_invisible;
    } else {
      c.two_fold = TwoFoldKind::visible_invisible;
      c.visible_side = plus_visible ? Side::plus : Side::minus;
    }
    return c;
  }

  c.kind = BoundaryKind::tangency;
  if (plus_zero) {
    if (std::abs(c.plus_second) <= tol.derivative) degenerate("+");
    c.tangency_side = Side::plus;
    c.visible = plus_visible;
  } else {
    if (std::abs(c.minus_second) <= tol.derivative) degenerate("-");
    c.tangency_side = Side::minus;
    c.visible = minus_visible;
  }
  return c;
}

PiecewiseField canonical_z_infinity() {
  using std::numbers::pi;
  PiecewiseField z;
  z.name = "z-infinity";
  z.plus.velocity = [](PlanarPoint p) { return Vector2{1.0, 2.0 * std::sin(2.0 * pi * p.x)}; };
  z.plus.jacobian = [](PlanarPoint p) {
    return Matrix2{{{0.0, 0.0}, {4.0 * pi * std::cos(2.0 * pi * p.x), 0.0}}};
  };
  z.minus.velocity = [](PlanarPoint p) { return Vector2{-1.0, 2.0 * std::sin(2.0 * pi * p.x)}; };
  z.minus.jacobian = z.plus.jacobian;
  z.switching.value = [](PlanarPoint p) { return p.y; };
  z.switching.gradient = [](PlanarPoint) { return Vector2{0.0, 1.0}; };
  z.switching.hessian = [](PlanarPoint) { return Matrix2{}; };
  return z;
}

double divergence(const SmoothField& x, PlanarPoint p) {
  require_finite(p);
  const Matrix2 j = x.jacobian(p);
  return j[0][0] + j[1][1];
}

FieldCheck validate_field(const PiecewiseField& z, std::span<const PlanarPoint> samples,
                          double jacobian_rel_tol, double divergence_tol) {
  FieldCheck check;
  check.min_gradient_norm_on_switching = std::numeric_limits<double>::infinity();
  constexpr double h = 1e-5;

  for (const PlanarPoint& p : samples) {
    require_finite(p);
    for (const SmoothField* x : {&z.plus, &z.minus}) {
      check.max_divergence = std::max(check.max_divergence, std::abs(divergence(*x, p)));
      const Matrix2 j = x->jacobian(p);
      for (int col = 0; col < 2; ++col) {
        PlanarPoint fwd = p;
        PlanarPoint bwd = p;
        (col == 0 ? fwd.x : fwd.y) += h;
        (col == 0 ? bwd.x : bwd.y) -= h;
        const Vector2 vf = x->velocity(fwd);
        const Vector2 vb = x->velocity(bwd);
        for (int row = 0; row < 2; ++row) {
          const double fd = (vf[row] - vb[row]) / (2.0 * h);
          const double scale = std::max(1.0, std::abs(j[row][col]));
          check.max_jacobian_mismatch =
              std::max(check.max_jacobian_mismatch, std::abs(fd - j[row][col]) / scale);
        }
      }
    }
    // 0 must be a regular value of f.
    if (std::abs(z.switching.value(p)) <= 1e-9) {
      check.min_gradient_norm_on_switching =
          std::min(check.min_gradient_norm_on_switching, norm(z.switching.gradient(p)));
    }
  }
  const bool gradient_ok = !(check.min_gradient_norm_on_switching <= 0.0);
  check.ok = check.max_divergence <= divergence_tol &&
             check.max_jacobian_mismatch <= jacobian_rel_tol && gradient_ok;
  return check;
}

std::string to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::crossing_plus: return "crossing_plus";
    case BoundaryKind::crossing_minus: return "crossing_minus";
    case BoundaryKind::tangency: return "tangency";
    case BoundaryKind::two_fold: return "two_fold";
    case BoundaryKind::boundary_equilibrium: return "boundary_equilibrium";
  }
  return "unknown";
}

std::string to_string(TwoFoldKind kind) {
  switch (kind) {
    case TwoFoldKind::visible_visible: return "visible_visible";
    case TwoFoldKind::invisible_invisible: return "invisible_invisible";
    case TwoFoldKind::visible_invisible: return "visible_invisible";
  }
  return "unknown";
}

std::string describe(const BoundaryClassification& c) {
  switch (c.kind) {
    case BoundaryKind::tangency:
      return std::string("tangency(") + (c.tangency_side == Side::plus ? "plus" : "minus") + ", " +
             (c.visible ? "visible" : "invisible") + ")";
    case BoundaryKind::two_fold:
      return "two_fold(" + to_string(c.two_fold) + ")";
    default:
      return to_string(c.kind);
  }
}

}  // namespace gurevich::psvf
