#pragma once

// Finite stochastic kernels: stationary laws, recurrence sampling, total
// variation, reversibility, Lyapunov drift certificates and the resulting
// mixing bound, cylinder measures and covariance mixing.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gurevich/shift.hpp"
#include "gurevich/trajectory.hpp"

namespace gurevich::markov {

using shift::State;
using Distribution = std::vector<double>;
using Rng = std::mt19937_64;

class StochasticKernel {
 public:
  using Row = std::vector<std::pair<std::size_t, double>>;

  /// Rows hold (column index, weight). Zero weights are dropped; rows must sum
  /// to 1 within row_tolerance.
  StochasticKernel(std::vector<State> labels, std::vector<Row> rows, double row_tolerance = 1e-12);
  static StochasticKernel from_dense(const Eigen::MatrixXd& w, std::vector<State> labels = {});

  std::size_t size() const { return labels_.size(); }
  State label(std::size_t i) const { return labels_.at(i); }
  const std::vector<State>& labels() const { return labels_; }
  std::optional<std::size_t> index_of(State s) const;
  std::size_t require_index(State s) const;

  const Row& row(std::size_t i) const { return rows_.at(i); }
  double weight(std::size_t i, std::size_t j) const;
  Eigen::MatrixXd dense() const;

  /// Distribution after one step: (p W)_j.
  Distribution step(const Distribution& p) const;
  /// Draws the next local index from row i.
  std::size_t sample(std::size_t i, Rng& rng) const;

  /// Throws unless every positive entry w(i, j) is an edge of the truncation
  /// (labels are read as graph states).
  void check_support(const shift::Truncation& t) const;

 private:
  std::vector<State> labels_;
  std::vector<Row> rows_;
  std::vector<std::vector<double>> cumulative_;
  std::unordered_map<State, std::size_t> index_;
};

StochasticKernel birth_death_chain(std::size_t top, double up, double down);
/// Uniform weights over each state's successors inside the truncation.
StochasticKernel uniform_kernel(const shift::Truncation& t);

void validate_distribution(const Distribution& p, std::size_t size, double tol = 1e-12);

struct StationaryResult {
  Distribution pi;
  std::size_t iterations = 0;      // lazy power iterations
  double residual = 0.0;           // max_j |(pi W)_j - pi_j|
  std::optional<double> direct_tv; // TV between power iterate and direct solve
  bool refined_by_direct = false;
};

struct StationaryOptions {
  double tv_tolerance = 1e-12;
  std::size_t max_iterations = 5'000'000;
  std::size_t direct_limit = 2000;  // direct sparse solve up to this many states
};

StationaryResult stationary_distribution(const StochasticKernel& w, const StationaryOptions& opt = {});

/// Throws InvalidInputError naming a non-communicating pair when reducible.
void require_irreducible(const StochasticKernel& w);

double total_variation(const Distribution& p, const Distribution& q);

enum class RecurrenceVerdict { transient, positive_recurrent, null_undetermined };

struct RecurrenceReport {
  RecurrenceVerdict verdict = RecurrenceVerdict::null_undetermined;
  std::size_t samples = 0;
  std::size_t returns = 0;
  std::size_t late_returns = 0;  // returns after horizon / 2
  double f_hat = 0.0;            // estimated return probability within the horizon
  double f_low = 0.0;            // Wilson 95% interval
  double f_high = 0.0;
  double mean_return_time = 0.0; // over returning samples
  double return_time_stderr = 0.0;
};

RecurrenceReport classify_recurrence(const StochasticKernel& w, State i, std::size_t horizon,
                                     std::size_t samples, std::uint64_t seed);

struct ReversibilityReport {
  bool reversible = false;
  double worst_violation = 0.0;
  std::size_t worst_i = 0;
  std::size_t worst_j = 0;
};

ReversibilityReport check_reversibility(const StochasticKernel& w, const Distribution& pi,
                                        double stationarity_tol = 1e-9);

struct LyapunovCertificate {
  std::vector<double> v;
  std::size_t base = 0;          // local index of a*
  double lambda = 0.0;           // proposed drift
  double achieved_drift = 0.0;   // max over a != a* of (W V)(a) / V(a)
  bool base_holds = false;       // w(a*, a*) > 0
  bool valid = false;
  std::size_t violations = 0;
  std::optional<std::size_t> worst_state;     // largest ratio among violations
  std::optional<std::size_t> first_violation;
  std::optional<std::size_t> last_violation;
};

LyapunovCertificate lyapunov_verify(const StochasticKernel& w, std::vector<double> v, State base,
                                    double lambda);

/// V(i) eta^{m+1} / (eta - theta) with theta the certificate's achieved drift.
double mixing_bound(const LyapunovCertificate& cert, double eta, std::size_t i, std::size_t m);

/// ||delta_i W^m - pi||_TV for m = 0..m_max, computed exactly.
std::vector<double> empirical_tv_curve(const StochasticKernel& w, const Distribution& pi, std::size_t i,
                                       std::size_t m_max);
double empirical_tv(const StochasticKernel& w, const Distribution& pi, std::size_t i, std::size_t m);

struct MixingPoint {
  std::size_t m = 0;
  double tv = 0.0;
  double bound = 0.0;
};

struct MixingReport {
  std::vector<MixingPoint> points;
  bool bound_dominates = false;
  bool tv_nonincreasing = false;
};

MixingReport mixing_report(const StochasticKernel& w, const Distribution& pi,
                           const LyapunovCertificate& cert, double eta, std::size_t i,
                           std::size_t m_max);

/// Product of letter probabilities; 0 for a letter outside the support.
double bernoulli_cylinder(std::span<const double> p, std::span<const State> word);

/// Stationary Markov measure of [word] at position 0 for the given initial law.
double markov_cylinder_measure(const StochasticKernel& w, const Distribution& initial,
                               std::span<const State> word);

/// C_n = mu(sigma^{-n} A intersect B) - mu(A) mu(B), cylinders based at 0.
double exact_markov_covariance(const StochasticKernel& w, const Distribution& pi,
                               std::span<const State> a, std::span<const State> b, std::size_t n);

struct CovarianceEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  double low = 0.0;   // estimate - 3 sigma
  double high = 0.0;  // estimate + 3 sigma
  double mu_a = 0.0;
  double mu_b = 0.0;
  std::size_t samples = 0;
};

CovarianceEstimate mc_covariance_bernoulli(std::span<const double> p, std::span<const State> a,
                                           std::span<const State> b, std::size_t n,
                                           std::size_t samples, std::uint64_t seed);
CovarianceEstimate mc_covariance_markov(const StochasticKernel& w, const Distribution& pi,
                                        std::span<const State> a, std::span<const State> b,
                                        std::size_t n, std::size_t samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Random branching on Z-infinity

/// Probability of taking the upper branch at each visible-visible two-fold.
struct BranchingRule {
  std::string name;
  std::function<double(std::int64_t)> p_upper;
  /// Two-folds outside [-window, window] are never reached from inside (0 = unbounded).
  std::int64_t window = 0;

  static BranchingRule fair();
  static BranchingRule constant(double p_upper);
  /// Drift towards the origin with probability p_in, reflecting at +-window.
  static BranchingRule inward_biased(double p_in, std::int64_t window);
};

/// Birth-death law of the visited two-folds on [-window, window].
StochasticKernel two_fold_kernel(const BranchingRule& rule);
/// Arc chain: arc n is followed by 2e or 2e - 1, e the end two-fold of n.
StochasticKernel z_infinity_arc_kernel(const BranchingRule& rule);

/// Law of the first arc for a given law of the start two-fold (labels of `two_folds`).
Distribution first_arc_law(const BranchingRule& rule, const StochasticKernel& arc_kernel,
                           const StochasticKernel& two_folds, const Distribution& start_law);

struct StartLaw {
  std::optional<std::int64_t> fixed;  // fixed start two-fold, else the stationary law
};

trajectory::TrajectoryClass sample_z_infinity(const BranchingRule& rule, std::int64_t start,
                                              std::size_t length, Rng& rng);

/// Samples start two-folds from the stationary law of two_fold_kernel(rule).
std::vector<trajectory::TrajectoryClass> sample_z_infinity_batch(const BranchingRule& rule,
                                                                 const StartLaw& start,
                                                                 std::size_t length,
                                                                 std::size_t samples,
                                                                 std::uint64_t seed);

struct FrequencyEstimate {
  double frequency = 0.0;
  double stderr_ = 0.0;
  std::size_t hits = 0;
  std::size_t samples = 0;
};

FrequencyEstimate cylinder_frequency(std::span<const trajectory::TrajectoryClass> sample,
                                     std::span<const trajectory::ArcIndex> word);

FrequencyEstimate empirical_itinerary_measure(const BranchingRule& rule, const StartLaw& start,
                                              std::span<const trajectory::ArcIndex> word,
                                              std::size_t samples, std::uint64_t seed);

std::string to_string(RecurrenceVerdict v);

}  // namespace gurevich::markov
