#pragma once

// Locally constant potentials on truncated Markov shifts: variations, the
// Ruelle operator, periodic-point partition sums, Gurevich pressure,
// first-return sums and the variational inequality.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gurevich/markov.hpp"
#include "gurevich/shift.hpp"
#include "gurevich/spectral.hpp"

namespace gurevich::thermo {

using shift::State;
using Word = std::vector<State>;

enum class PotentialKind { zero, neg_log_first, table, general };

class Potential {
 public:
  static Potential zero();
  /// psi(x) = -log(m (m + 1)) with m = rank(x_0) + 1 in the graph's enumeration.
  static Potential neg_log_first(const shift::CountableGraph& g);
  /// Depth-k table over words of length k; missing words are an error.
  static Potential table(std::size_t depth, std::map<Word, double> entries);
  /// Arbitrary function of a finite prefix; not locally constant as far as we know.
  static Potential general(std::string name, std::function<double(std::span<const State>)> f);

  PotentialKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  /// Number of coordinates the value depends on (0 for the zero potential).
  std::size_t depth() const { return depth_; }
  bool locally_constant() const { return kind_ != PotentialKind::general; }
  const std::map<Word, double>& entries() const { return entries_; }

  /// Value on any sequence starting with x (x must have at least depth() letters).
  double operator()(std::span<const State> x) const;

 private:
  PotentialKind kind_ = PotentialKind::zero;
  std::string name_ = "zero";
  std::size_t depth_ = 0;
  std::map<Word, double> entries_;
  std::function<double(std::span<const State>)> f_;
};

/// Var_n psi over sequences admissible in the truncation.
double variation(const Potential& psi, std::size_t n, const shift::Truncation& t);

struct VariationSummary {
  double partial_sum = 0.0;       // sum_{m=2}^{N} Var_m
  std::size_t terms = 0;
  std::size_t zero_beyond = 0;    // Var_m = 0 for m > zero_beyond
  bool summable = false;
};

VariationSummary summable_variations(const Potential& psi, const shift::Truncation& t, std::size_t n_max);

struct RuelleValue {
  double value = 0.0;
  std::size_t preimages = 0;  // 0 means an empty sum
};

/// (L_psi g)(x) = sum over u -> x_0 of e^{psi(ux)} g(ux).
RuelleValue ruelle_apply(const Potential& psi, const std::function<double(std::span<const State>)>& g,
                         std::span<const State> x, const shift::Truncation& t);

/// sup_x (L_psi 1)(x) over the truncation (depth <= 2).
double ruelle_norm_bound(const Potential& psi, const shift::Truncation& t);

/// W(u, v) = e^{psi(u)} (depth <= 1) or e^{psi(uv)} (depth 2) on edges u -> v.
spectral::SparseMatrix transfer_matrix(const Potential& psi, const shift::Truncation& t);

/// log z_n(psi, [a]) for n = 1..n_max (-inf where the sum is empty).
std::vector<double> log_partition_sequence(const Potential& psi, State a, std::size_t n_max,
                                           const shift::Truncation& t);
/// Same with the first return to [a] at time n.
std::vector<double> log_first_return_sequence(const Potential& psi, State a, std::size_t n_max,
                                              const shift::Truncation& t);

double partition_function(const Potential& psi, State a, std::size_t n, const shift::Truncation& t);
double log_partition_function(const Potential& psi, State a, std::size_t n, const shift::Truncation& t);
double first_return_partition(const Potential& psi, State a, std::size_t n, const shift::Truncation& t);

struct GrowthSummary {
  std::vector<double> values;  // (1/n) log s_n, n = 1..n_max
  std::size_t period = 0;      // gcd of n with s_n > 0
  double last = 0.0;           // last finite value
  double cesaro = 0.0;         // mean over the final third of finite values
  double growth = 0.0;         // log(s_N / s_{N-p}) / p at the largest support index N
  double trend = 0.0;          // least-squares slope of values over the final third
};

GrowthSummary summarize_growth(const std::vector<double>& log_values);

struct PressureEstimate {
  State base = 0;
  std::vector<double> log_z;
  GrowthSummary summary;
  double estimate = 0.0;      // growth-ratio estimate
  double spectral = 0.0;      // log rho(W_psi) of the truncation
  std::string spectral_method;
  bool mixing = false;        // truncation strongly connected and aperiodic
  std::optional<State> alt_base;
  std::optional<double> alt_estimate;
  std::optional<double> base_gap;
};

/// log of the spectral radius of W_psi; dense eigenvalues up to dense_limit states.
double log_spectral_radius(const Potential& psi, const shift::Truncation& t, std::string* method = nullptr,
                           std::size_t dense_limit = 300);

PressureEstimate gurevich_pressure(const Potential& psi, State a, std::size_t n_max,
                                   const shift::Truncation& t, bool second_base = true);

struct PressurePoint {
  std::uint64_t q = 0;
  PressureEstimate estimate;
};

std::vector<PressurePoint> pressure_sweep(const Potential& psi, const shift::CountableGraph& g,
                                          std::span<const std::uint64_t> q_schedule, State a,
                                          std::size_t n_max);

struct RecurrenceSummary {
  State base = 0;
  std::vector<double> log_z_star;  // log z*_n(0, [a])
  GrowthSummary summary;
  double d_infinity = 0.0;         // growth estimate of z*_n
  double entropy = 0.0;            // h_G of the truncation
  bool strongly_positive_recurrent = false;  // d_infinity < entropy
};

RecurrenceSummary d_infinity(State a, std::size_t n_max, const shift::Truncation& t);

struct VariationalCheck {
  double entropy = 0.0;   // h_mu
  double integral = 0.0;  // int psi dmu
  double lhs = 0.0;
  double rhs = 0.0;       // pressure of the truncation
  bool satisfied = false;
};

/// Markov measure given by a kernel on truncation states and its stationary law.
VariationalCheck variational_check(const Potential& psi, const markov::StochasticKernel& w,
                                   const markov::Distribution& pi, const shift::Truncation& t,
                                   double tolerance = 1e-9);

std::string to_string(PotentialKind k);

}  // namespace gurevich::thermo
