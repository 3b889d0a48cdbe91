#pragma once

// Entropy at infinity, escape on average, Hausdorff dimension bounds and an
// empirical box-counting estimate under the shift metric.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gurevich/markov.hpp"
#include "gurevich/shift.hpp"

namespace gurevich::dimension {

using shift::BigCount;
using shift::State;

struct ZCount {
  BigCount count = 0;
  bool undercount = false;      // a counted word reached the working cutoff
  std::uint64_t working_cutoff = 0;
};

/// Words a_0 .. a_{n+1} with rank(a_0), rank(a_{n+1}) <= q and at most
/// (n+2)/M letters of rank <= q. Exploration stops at rank 8 max(q, 1).
ZCount z_n_count(const shift::CountableGraph& g, std::size_t m, std::uint64_t q, std::size_t n);

/// z_n for n = 1..n_max in one sweep.
std::vector<ZCount> z_n_counts(const shift::CountableGraph& g, std::size_t m, std::uint64_t q,
                               std::size_t n_max);

struct InfinityCell {
  std::size_t m = 0;
  std::uint64_t q = 0;
  std::vector<ZCount> z;      // n = 1..n_max
  double h = 0.0;             // growth estimate of z_n (-inf if z_n vanishes)
  double last = 0.0;          // last finite (1/n) log z_n
  bool undercount = false;
};

struct InfinityEntropyEstimate {
  std::vector<InfinityCell> table;
  std::vector<std::pair<std::uint64_t, double>> per_q;  // min over the last half of the M schedule
  double estimate = 0.0;                                // min of per_q over the last half of the q schedule
  bool undercount = false;
};

InfinityEntropyEstimate entropy_at_infinity(const shift::CountableGraph& g,
                                            std::span<const std::size_t> m_schedule,
                                            std::span<const std::uint64_t> q_schedule,
                                            std::size_t n_max);

/// (1/n) #{i < n : x_i = base}.
double birkhoff_fraction(std::span<const State> x, State base, std::size_t n);

struct EscapeResult {
  std::vector<double> fractions;  // one per base cylinder
  double threshold = 0.0;         // 1 / sqrt(n)
  bool escaping = false;          // every fraction <= threshold
};

EscapeResult escape_on_average_test(std::span<const State> x, std::span<const State> bases, std::size_t n);

struct EscapeSampleReport {
  std::size_t samples = 0;
  std::size_t escaping = 0;
  double non_escaping_fraction = 0.0;
  double wilson_low = 0.0;   // 95% interval for the non-escaping proportion
  double wilson_high = 0.0;
};

EscapeSampleReport escape_sample(const markov::BranchingRule& rule, std::span<const State> bases,
                                 std::size_t horizon, std::size_t samples, std::uint64_t seed);

struct DimensionBounds {
  double recurrent = 0.0;          // h_G / log 2
  double escaping_recurrent = 0.0; // h_inf / log 2
  std::optional<bool> strict;      // set when a strong positive recurrence verdict is supplied
};

DimensionBounds hausdorff_bounds(double h_g, double h_inf, std::optional<bool> strongly_positive_recurrent = {});

struct DimensionEstimate {
  std::vector<std::size_t> depths;  // k, scale 2^{-k}
  std::vector<double> scales;
  std::vector<std::size_t> counts;  // distinct length-k prefixes
  double slope = 0.0;
  double stderr_ = 0.0;
  std::string note;
};

DimensionEstimate box_dimension_estimate(std::span<const std::vector<State>> sample,
                                         std::span<const std::size_t> depths);

}  // namespace gurevich::dimension
