#include "gurevich/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gurevich/error.hpp"

namespace gurevich::trajectory {

using psvf::BoundaryKind;
using psvf::Side;
using psvf::TwoFoldKind;
using psvf::Vector2;
using std::numbers::pi;

double invariant_curve(double x) { return (1.0 - std::cos(2.0 * pi * x)) / pi; }
double invariant_curve_slope(double x) { return 2.0 * std::sin(2.0 * pi * x); }
double invariant_curve_curvature(double x) { return 4.0 * pi * std::cos(2.0 * pi * x); }

std::int64_t floor_div2(std::int64_t n) { return (n - (n & 1)) / 2; }

PlanarPoint Arc::at(double t) const {
  if (upper) {
    const double x = static_cast<double>(cell) + t;
    return {x, invariant_curve(x)};
  }
  const double x = static_cast<double>(cell) + 1.0 - t;
  return {x, -invariant_curve(x)};
}

std::int64_t Arc::start_two_fold() const { return upper ? cell : cell + 1; }
std::int64_t Arc::end_two_fold() const { return upper ? cell + 1 : cell; }

Arc arc(ArcIndex n) { return Arc{n, floor_div2(n), (n & 1) == 0}; }

std::array<ArcIndex, 2> successors(ArcIndex n) {
  if ((n & 1) == 0) return {n + 1, n + 2};
  return {n - 1, n - 2};
}

bool admissible_step(ArcIndex from, ArcIndex to) {
  const auto next = successors(from);
  return to == next[0] || to == next[1];
}

bool is_admissible(std::span<const ArcIndex> letters) {
  for (std::size_t i = 1; i < letters.size(); ++i) {
    if (!admissible_step(letters[i - 1], letters[i])) return false;
  }
  return true;
}

ArcIndex arc_leaving(std::int64_t two_fold, Branch branch) {
  return branch == Branch::upper ? 2 * two_fold : 2 * two_fold - 1;
}

std::optional<ArcIndex> arc_containing(PlanarPoint p, double tol) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || std::abs(p.y) <= tol) return std::nullopt;
  const auto cell = static_cast<std::int64_t>(std::floor(p.x));
  if (std::abs(std::abs(p.y) - invariant_curve(p.x)) > tol) return std::nullopt;
  return p.y > 0.0 ? 2 * cell : 2 * cell + 1;
}

Itinerary Itinerary::shifted(std::size_t k) const {
  if (k > letters.size()) throw HorizonError("shift beyond itinerary length");
  return Itinerary{{letters.begin() + static_cast<std::ptrdiff_t>(k), letters.end()}};
}

TrajectoryClass::TrajectoryClass(std::int64_t start_two_fold, std::vector<Branch> choices)
    : start_(start_two_fold), choices_(std::move(choices)) {
  arcs_.reserve(choices_.size());
  std::int64_t at = start_;
  for (Branch b : choices_) {
    const ArcIndex n = arc_leaving(at, b);
    arcs_.push_back(n);
    at = arc(n).end_two_fold();
  }
}

PlanarPoint TrajectoryClass::position(double t) const {
  if (arcs_.empty()) return {static_cast<double>(start_), 0.0};
  if (!(t >= 0.0) || t > static_cast<double>(arcs_.size())) {
    throw DomainError("time outside the trajectory's horizon");
  }
  auto i = static_cast<std::size_t>(std::floor(t));
  if (i >= arcs_.size()) i = arcs_.size() - 1;
  return arc(arcs_[i]).at(t - static_cast<double>(i));
}

TrajectoryClass build_trajectory(std::int64_t start_two_fold, std::vector<Branch> choices) {
  if (choices.empty()) throw InvalidInputError("a trajectory needs at least one branch choice");
  return TrajectoryClass(start_two_fold, std::move(choices));
}

TrajectoryClass trajectory_from_itinerary(std::span<const ArcIndex> letters) {
  if (letters.empty()) throw InvalidInputError("empty itinerary");
  if (!is_admissible(letters)) throw InvalidInputError("itinerary violates the successor rule");
  std::vector<Branch> choices;
  choices.reserve(letters.size());
  for (ArcIndex n : letters) choices.push_back((n & 1) == 0 ? Branch::upper : Branch::lower);
  return TrajectoryClass(arc(letters.front()).start_two_fold(), std::move(choices));
}

Itinerary itinerary_of(const TrajectoryClass& gamma, std::size_t length) {
  if (length > gamma.horizon()) {
    throw HorizonError("itinerary length " + std::to_string(length) + " exceeds horizon " +
                       std::to_string(gamma.horizon()));
  }
  const auto& arcs = gamma.arcs();
  return Itinerary{{arcs.begin(), arcs.begin() + static_cast<std::ptrdiff_t>(length)}};
}

Itinerary itinerary_of(const TrajectoryClass& gamma) { return Itinerary{gamma.arcs()}; }

TrajectoryClass time_one(const TrajectoryClass& gamma) {
  if (gamma.horizon() < 2) throw HorizonError("time-one map needs at least two branch choices");
  std::vector<Branch> rest(gamma.choices().begin() + 1, gamma.choices().end());
  return TrajectoryClass(arc(gamma.arc_at(0)).end_two_fold(), std::move(rest));
}

TrajectoryClass time_k(const TrajectoryClass& gamma, std::size_t k) {
  TrajectoryClass out = gamma;
  for (std::size_t i = 0; i < k; ++i) out = time_one(out);
  return out;
}

// ---------------------------------------------------------------------------
// Flow integration

namespace {

PlanarPoint rk4(const psvf::SmoothField& x, PlanarPoint p, double h) {
  const auto add = [](PlanarPoint a, const Vector2& v, double s) {
    return PlanarPoint{a.x + s * v[0], a.y + s * v[1]};
  };
  const Vector2 k1 = x.velocity(p);
  const Vector2 k2 = x.velocity(add(p, k1, 0.5 * h));
  const Vector2 k3 = x.velocity(add(p, k2, 0.5 * h));
  const Vector2 k4 = x.velocity(add(p, k3, h));
  return {p.x + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
          p.y + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

constexpr double kCrossThreshold = 1e-10;  // f must overshoot this far to count as a crossing
constexpr double kTouchTolerance = 1e-7;   // |f| at a located fold for it to count as contact
constexpr double kArmThreshold = 1e-9;     // |Xf| needed before fold detection is armed
constexpr double kEventDerivativeTol = 1e-6;

double sign_of(Side s) { return s == Side::plus ? 1.0 : -1.0; }
Side flip(Side s) { return s == Side::plus ? Side::minus : Side::plus; }

psvf::Tolerances event_tolerances() {
  psvf::Tolerances tol;
  tol.on_manifold = kTouchTolerance;
  tol.derivative = kEventDerivativeTol;
  return tol;
}

}  // namespace

FlowPath integrate_flow(const psvf::PiecewiseField& z, PlanarPoint p, double duration,
                        const FlowOptions& options) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DomainError("non-finite start point");
  if (!std::isfinite(duration) || duration < 0.0) throw DomainError("duration must be finite and >= 0");
  if (!(options.step > 0.0)) throw InvalidInputError("integration step must be positive");

  FlowPath path;
  path.end_point = p;
  const auto record = [&](double t, PlanarPoint q) {
    if (options.record_path) {
      path.times.push_back(t);
      path.points.push_back(q);
    }
  };
  record(0.0, p);

  const auto stationary = [&]() {
    path.stationary = true;
    path.end_time = duration;
    path.end_point = p;
    record(duration, p);
    return path;
  };

  Side side = Side::plus;
  const double f0 = z.switching.value(p);
  if (std::abs(f0) <= psvf::Tolerances{}.on_manifold) {
    const auto c = psvf::classify_boundary_point(z, p);
    switch (c.kind) {
      case BoundaryKind::crossing_plus: side = Side::plus; break;
      case BoundaryKind::crossing_minus: side = Side::minus; break;
      case BoundaryKind::boundary_equilibrium: return stationary();
      case BoundaryKind::tangency:
        if (options.initial_side) {
          side = *options.initial_side;
        } else {
          side = c.visible ? c.tangency_side : flip(c.tangency_side);
        }
        break;
      case BoundaryKind::two_fold:
        if (c.two_fold == TwoFoldKind::invisible_invisible) {
          path.events.push_back({FlowEventKind::singular_stop, 0.0, p, c});
          return stationary();
        }
        if (options.initial_side) {
          side = *options.initial_side;
        } else if (c.two_fold == TwoFoldKind::visible_invisible) {
          side = c.visible_side;
        } else {
          path.events.push_back({FlowEventKind::branch_point, 0.0, p, c});
          path.stopped_at_branch = true;
          path.end_time = 0.0;
          return path;
        }
        break;
    }
  } else {
    side = f0 > 0.0 ? Side::plus : Side::minus;
  }

  // g = s * Xf: negative while the orbit approaches the switching curve.
  const auto approach_rate = [&](Side s, PlanarPoint q) {
    return sign_of(s) * psvf::lie_derivative(z.field(s), z.switching, q, 1);
  };

  double t = 0.0;
  PlanarPoint x = p;
  double g_prev = approach_rate(side, x);
  bool armed = std::abs(g_prev) > kArmThreshold;
  const auto steps = static_cast<std::size_t>(std::ceil(duration / options.step - 1e-9));
  const double h = steps == 0 ? 0.0 : duration / static_cast<double>(steps);

  const auto handle_contact = [&](PlanarPoint q, double tq, bool& stop) {
    const auto c = psvf::classify_boundary_point(z, q, event_tolerances());
    if (c.kind == BoundaryKind::two_fold && c.two_fold == TwoFoldKind::visible_visible) {
      path.events.push_back({FlowEventKind::branch_point, tq, q, c});
      stop = options.stop_at_branch;
      path.stopped_at_branch = stop;
    } else if (c.kind == BoundaryKind::two_fold && c.two_fold == TwoFoldKind::invisible_invisible) {
      path.events.push_back({FlowEventKind::singular_stop, tq, q, c});
      stop = true;
    } else if (c.kind == BoundaryKind::crossing_plus || c.kind == BoundaryKind::crossing_minus) {
      path.events.push_back({FlowEventKind::crossing, tq, q, c});
      side = c.kind == BoundaryKind::crossing_plus ? Side::plus : Side::minus;
    } else {
      path.events.push_back({FlowEventKind::tangency, tq, q, c});
    }
  };

  bool stop = false;
  while (!stop && duration - t > 1e-14) {
    const double hk = std::min(h, duration - t);
    const psvf::SmoothField& field = z.field(side);
    const PlanarPoint next = rk4(field, x, hk);
    if (!std::isfinite(next.x) || !std::isfinite(next.y)) {
      throw IntegrationError("non-finite state during integration", t);
    }
    const double s = sign_of(side);
    const double f_next = z.switching.value(next);

    if (s * f_next < -kCrossThreshold) {
      // Transversal crossing inside this step: bisect on f.
      double lo = 0.0;
      double hi = hk;
      PlanarPoint at = next;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        at = rk4(field, x, mid);
        const double fm = s * z.switching.value(at);
        if (std::abs(fm) <= options.event_tolerance) {
          lo = hi = mid;
          break;
        }
        (fm > 0.0 ? lo : hi) = mid;
        if (hi - lo < 1e-16) break;
      }
      const double te = t + 0.5 * (lo + hi);
      if (std::abs(z.switching.value(at)) > kTouchTolerance) {
        throw IntegrationError("crossing localisation failed", t);
      }
      handle_contact(at, te, stop);
      x = at;
      t = te;
      record(t, x);
      g_prev = approach_rate(side, x);
      armed = false;
      continue;
    }

    const double g_next = approach_rate(side, next);
    if (armed && g_prev < 0.0 && g_next >= 0.0) {
      // Distance to the switching curve has a local minimum inside this step.
      double lo = 0.0;
      double hi = hk;
      PlanarPoint at = next;
      for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        at = rk4(field, x, mid);
        (approach_rate(side, at) < 0.0 ? lo : hi) = mid;
      }
      at = rk4(field, x, 0.5 * (lo + hi));
      if (std::abs(z.switching.value(at)) <= kTouchTolerance) {
        const double te = t + 0.5 * (lo + hi);
        handle_contact(at, te, stop);
        if (stop) {
          x = at;
          t = te;
          record(t, x);
          break;
        }
      }
    }

    x = next;
    t += hk;
    record(t, x);
    if (std::abs(g_next) > kArmThreshold) armed = true;
    g_prev = g_next;
  }

  // Arrival exactly at the end of the window.
  if (!stop && duration > 0.0 && std::abs(z.switching.value(x)) <= kTouchTolerance &&
      std::abs(psvf::lie_derivative(z.field(side), z.switching, x, 1)) <= kEventDerivativeTol &&
      (path.events.empty() || path.events.back().time < t - 1e-9)) {
    try {
      handle_contact(x, t, stop);
    } catch (const ClassificationError&) {
      // Higher-order contact at the final point is reported by the caller if it matters.
    }
  }

  path.end_time = t;
  path.end_point = x;
  path.end_side = side;
  return path;
}

NumericTrajectory integrate_trajectory(const psvf::PiecewiseField& z, const TrajectoryClass& gamma,
                                       std::size_t length, const FlowOptions& options) {
  if (length > gamma.horizon()) throw HorizonError("integration length exceeds trajectory horizon");
  NumericTrajectory out;
  PlanarPoint at{static_cast<double>(gamma.start_two_fold()), 0.0};
  double clock = 0.0;
  for (std::size_t i = 0; i < length; ++i) {
    FlowOptions seg = options;
    seg.initial_side = gamma.choices()[i] == Branch::upper ? Side::plus : Side::minus;
    seg.stop_at_branch = true;
    seg.record_path = true;
    const FlowPath path = integrate_flow(z, at, 1.5, seg);
    if (!path.stopped_at_branch) {
      throw IntegrationError("no two-fold reached within 1.5 time units of segment " +
                                 std::to_string(i),
                             clock + path.end_time);
    }
    // Midpoint of the segment locates the arc.
    const double half = 0.5 * path.end_time;
    const auto it = std::lower_bound(path.times.begin(), path.times.end(), half);
    const auto idx = static_cast<std::size_t>(std::distance(path.times.begin(), it));
    const auto arc_index = arc_containing(path.points.at(std::min(idx, path.points.size() - 1)));
    if (!arc_index) {
      throw IntegrationError("segment midpoint is not on the invariant curve", clock + half);
    }
    out.itinerary.letters.push_back(*arc_index);
    clock += path.end_time;
    at = path.end_point;
    out.two_fold_times.push_back(clock);
    out.two_fold_points.push_back(at);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hausdorff distances

namespace {

std::vector<PlanarPoint> sample_arc(ArcIndex n, std::size_t samples) {
  std::vector<PlanarPoint> pts(samples);
  const Arc a = arc(n);
  for (std::size_t i = 0; i < samples; ++i) {
    pts[i] = a.at(static_cast<double>(i) / static_cast<double>(samples - 1));
  }
  std::sort(pts.begin(), pts.end(), [](PlanarPoint l, PlanarPoint r) { return l.x < r.x; });
  return pts;
}

// sup over a in from of the distance to the nearest point of to (sorted by x).
double directed(const std::vector<PlanarPoint>& from, const std::vector<PlanarPoint>& to) {
  double worst = 0.0;
  for (const PlanarPoint& a : from) {
    auto it = std::lower_bound(to.begin(), to.end(), a.x,
                               [](PlanarPoint q, double x) { return q.x < x; });
    double best = std::numeric_limits<double>::infinity();
    for (auto r = it; r != to.end() && r->x - a.x < best; ++r) {
      best = std::min(best, std::hypot(r->x - a.x, r->y - a.y));
    }
    for (auto l = it; l != to.begin();) {
      --l;
      if (a.x - l->x >= best) break;
      best = std::min(best, std::hypot(l->x - a.x, l->y - a.y));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

HausdorffEstimate hausdorff_distance_arcs(ArcIndex m, ArcIndex n, std::size_t samples) {
  if (samples < 2) throw InvalidInputError("Hausdorff sampling needs at least two samples per arc");
  // Arc speed is at most sqrt(1 + 2^2); each curve point lies within half a
  // sample spacing (in arc length) of a sample.
  const double bound = std::sqrt(5.0) / static_cast<double>(samples - 1);
  if (m == n) return {0.0, 0.0};
  const auto a = sample_arc(m, samples);
  const auto b = sample_arc(n, samples);
  return {std::max(directed(a, b), directed(b, a)), bound};
}

HausdorffEstimate ArcDistanceTable::operator()(ArcIndex m, ArcIndex n) const {
  if (m == n) return {0.0, 0.0};
  const Arc am = arc(m);
  const Arc an = arc(n);
  const auto key = std::make_tuple(an.cell - am.cell, am.upper, an.upper);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  // Translate so that m sits in cell 0.
  const ArcIndex m0 = am.upper ? 0 : 1;
  const ArcIndex n0 = 2 * (an.cell - am.cell) + (an.upper ? 0 : 1);
  const HausdorffEstimate value = hausdorff_distance_arcs(m0, n0, samples_);
  std::lock_guard lock(mutex_);
  cache_.emplace(key, value);
  return value;
}

MetricEstimate rho_metric(const TrajectoryClass& a, const TrajectoryClass& b, std::size_t horizon,
                          const ArcDistanceTable& table) {
  if (horizon == 0) throw HorizonError("metric horizon must be at least one arc");
  if (horizon > a.horizon() || horizon > b.horizon()) {
    throw HorizonError("metric horizon exceeds a trajectory's horizon");
  }
  MetricEstimate out;
  double weight = 1.0;
  for (std::size_t i = 0; i < horizon; ++i) {
    const HausdorffEstimate d = table(a.arc_at(i), b.arc_at(i));
    out.value += weight * d.distance;
    out.sampling_error += weight * d.error_bound;
    weight *= 0.5;
  }
  // Cells of the two trajectories drift apart by at most 2 per step, and two
  // arcs whose cells differ by D are at Hausdorff distance <= D + 1 + 4/pi.
  const double gap = static_cast<double>(
      std::abs(arc(a.arc_at(horizon - 1)).cell - arc(b.arc_at(horizon - 1)).cell));
  const double base = gap + 1.0 + 4.0 / pi;
  out.tail_bound = std::ldexp(2.0 * base + 8.0, -static_cast<int>(horizon));
  return out;
}

MetricEstimate rho_metric(const TrajectoryClass& a, const TrajectoryClass& b, std::size_t horizon) {
  const ArcDistanceTable table;
  return rho_metric(a, b, horizon, table);
}

std::string to_string(Branch b) { return b == Branch::upper ? "upper" : "lower"; }

Branch parse_branch(const std::string& s) {
  if (s == "upper" || s == "up" || s == "right") return Branch::upper;
  if (s == "lower" || s == "down" || s == "left") return Branch::lower;
  throw InvalidInputError("unknown branch '" + s + "' (expected upper or lower)");
}

}  // namespace gurevich::trajectory
