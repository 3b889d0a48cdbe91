#pragma once

// Global trajectories of Z-infinity on the invariant curve pair, their arc
// itineraries, the time-one map, and the quotient metric on trajectory classes.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "gurevich/psvf.hpp"

namespace gurevich::trajectory {

using psvf::PlanarPoint;

/// Signed arc index n. I_{2j} is the upper arc over (j, j+1), I_{2j+1} the lower one.
using ArcIndex = std::int64_t;

/// Which arc to follow when leaving a visible-visible two-fold (j, 0):
/// upper takes I_{2j} towards (j+1, 0), lower takes I_{2j-1} towards (j-1, 0).
enum class Branch : std::uint8_t { upper, lower };

/// Height of the upper invariant curve, P(x) = (1 - cos 2πx) / π.
double invariant_curve(double x);
double invariant_curve_slope(double x);
double invariant_curve_curvature(double x);

struct Arc {
  ArcIndex index = 0;
  std::int64_t cell = 0;  // j = floor(n / 2)
  bool upper = true;      // n even

  /// Point reached after time t in [0, 1] along the flow.
  PlanarPoint at(double t) const;
  PlanarPoint start() const { return at(0.0); }
  PlanarPoint end() const { return at(1.0); }
  std::int64_t start_two_fold() const;
  std::int64_t end_two_fold() const;
};

Arc arc(ArcIndex n);

std::int64_t floor_div2(std::int64_t n);

/// Even n -> {n+1, n+2}; odd n -> {n-1, n-2}.
std::array<ArcIndex, 2> successors(ArcIndex n);
bool admissible_step(ArcIndex from, ArcIndex to);
bool is_admissible(std::span<const ArcIndex> letters);

ArcIndex arc_leaving(std::int64_t two_fold, Branch branch);

/// Arc whose relative interior contains p (|y| = P(x) to tol), if any.
std::optional<ArcIndex> arc_containing(PlanarPoint p, double tol = 1e-6);

struct Itinerary {
  std::vector<ArcIndex> letters;

  std::size_t size() const { return letters.size(); }
  bool admissible() const { return is_admissible(letters); }
  Itinerary shifted(std::size_t k = 1) const;
  bool operator==(const Itinerary&) const = default;
};

/// Trajectory class represented by its normalized representative, which sits
/// on the two-fold (start_two_fold, 0) at time zero.
class TrajectoryClass {
 public:
  TrajectoryClass(std::int64_t start_two_fold, std::vector<Branch> choices);

  std::int64_t start_two_fold() const { return start_; }
  const std::vector<Branch>& choices() const { return choices_; }
  std::size_t horizon() const { return choices_.size(); }
  /// Arc occupied on (i, i+1).
  ArcIndex arc_at(std::size_t i) const { return arcs_.at(i); }
  const std::vector<ArcIndex>& arcs() const { return arcs_; }
  /// Position of the representative at time t in [0, horizon].
  PlanarPoint position(double t) const;

  bool operator==(const TrajectoryClass& other) const {
    return start_ == other.start_ && choices_ == other.choices_;
  }

 private:
  std::int64_t start_;
  std::vector<Branch> choices_;
  std::vector<ArcIndex> arcs_;
};

TrajectoryClass build_trajectory(std::int64_t start_two_fold, std::vector<Branch> choices);

/// Inverse of the coding: the class whose itinerary is the given admissible word.
TrajectoryClass trajectory_from_itinerary(std::span<const ArcIndex> letters);

Itinerary itinerary_of(const TrajectoryClass& gamma, std::size_t length);
Itinerary itinerary_of(const TrajectoryClass& gamma);

TrajectoryClass time_one(const TrajectoryClass& gamma);
TrajectoryClass time_k(const TrajectoryClass& gamma, std::size_t k);

// ---------------------------------------------------------------------------
// Numerical flow

enum class FlowEventKind {
  crossing,          // transversal passage through the switching curve
  tangency,          // regular fold touched, same side continues
  branch_point,      // visible-visible two-fold: continuation is not unique
  singular_stop,     // invisible-invisible two-fold, the orbit is the point itself
};

struct FlowEvent {
  FlowEventKind kind;
  double time = 0.0;
  PlanarPoint point;
  psvf::BoundaryClassification classification;
};

struct FlowOptions {
  double step = 1e-3;
  double event_tolerance = 1e-10;  // |f| at located crossings
  /// Side to leave a switching point on; required at visible-visible two-folds.
  std::optional<psvf::Side> initial_side;
  bool stop_at_branch = true;
  bool record_path = true;
};

struct FlowPath {
  std::vector<double> times;
  std::vector<PlanarPoint> points;
  std::vector<FlowEvent> events;
  double end_time = 0.0;
  PlanarPoint end_point;
  psvf::Side end_side = psvf::Side::plus;
  bool stopped_at_branch = false;
  bool stationary = false;
};

/// Fixed-step RK4 with event localisation on the switching curve.
FlowPath integrate_flow(const psvf::PiecewiseField& z, PlanarPoint p, double duration,
                        const FlowOptions& options = {});

struct NumericTrajectory {
  Itinerary itinerary;                  // arcs located at segment midpoints
  std::vector<double> two_fold_times;   // times the flow reached a visible-visible two-fold
  std::vector<PlanarPoint> two_fold_points;
};

/// Integrates the representative of gamma arc by arc, choosing branches at
/// each two-fold from gamma's choices.
NumericTrajectory integrate_trajectory(const psvf::PiecewiseField& z, const TrajectoryClass& gamma,
                                       std::size_t length, const FlowOptions& options = {});

// ---------------------------------------------------------------------------
// Distances

struct HausdorffEstimate {
  double distance = 0.0;
  double error_bound = 0.0;  // |sampled - exact| <= error_bound
};

/// Hausdorff distance between closed arcs by uniform sampling in time.
HausdorffEstimate hausdorff_distance_arcs(ArcIndex m, ArcIndex n, std::size_t samples = 1000);

/// Memoised arc distances; the value depends only on the cell offset and sides.
class ArcDistanceTable {
 public:
  explicit ArcDistanceTable(std::size_t samples = 1000) : samples_(samples) {}
  HausdorffEstimate operator()(ArcIndex m, ArcIndex n) const;
  std::size_t samples() const { return samples_; }

 private:
  std::size_t samples_;
  mutable std::mutex mutex_;
  mutable std::map<std::tuple<std::int64_t, bool, bool>, HausdorffEstimate> cache_;
};

struct MetricEstimate {
  double value = 0.0;           // partial sum up to the horizon
  double tail_bound = 0.0;      // bound on the omitted terms
  double sampling_error = 0.0;  // bound from arc sampling (zero for exact terms)
};

MetricEstimate rho_metric(const TrajectoryClass& a, const TrajectoryClass& b, std::size_t horizon,
                          const ArcDistanceTable& table);
MetricEstimate rho_metric(const TrajectoryClass& a, const TrajectoryClass& b, std::size_t horizon);

std::string to_string(Branch b);
Branch parse_branch(const std::string& s);

}  // namespace gurevich::trajectory
