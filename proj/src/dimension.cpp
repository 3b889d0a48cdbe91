#include "gurevich/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "gurevich/error.hpp"
#include "gurevich/thermo.hpp"

namespace gurevich::dimension {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::pair<double, double> wilson(std::size_t k, std::size_t n) {
  const double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double denom = 1.0 + z * z / nn;
  const double centre = (p + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace

std::vector<ZCount> z_n_counts(const shift::CountableGraph& g, std::size_t m, std::uint64_t q,
                               std::size_t n_max) {
  if (m == 0) throw InvalidInputError("M must be >= 1");
  if (n_max == 0) throw InvalidInputError("n must be >= 1");
  std::uint64_t cutoff = 8 * std::max<std::uint64_t>(q, 1);
  if (const auto size = g.size()) cutoff = std::min<std::uint64_t>(cutoff, *size - 1);
  const shift::Truncation window(g, cutoff);
  const std::size_t states = window.size();

  std::vector<char> low(states), boundary(states, 0);
  for (std::size_t i = 0; i < states; ++i) {
    low[i] = g.rank(window.state(i)) <= q;
    for (State s : g.successors(window.state(i))) {
      if (!window.index_of(s)) boundary[i] = 1;
    }
  }

  const std::size_t cap = (n_max + 2) / m;
  // dp[(c * 2 + b) * states + i]: words ending at i with c low letters, b = touched the cutoff.
  const auto at = [&](std::size_t c, std::size_t b, std::size_t i) { return (c * 2 + b) * states + i; };
  std::vector<BigCount> dp((cap + 1) * 2 * states), next(dp.size());
  if (cap >= 1) {
    for (std::size_t i = 0; i < states; ++i) {
      if (low[i]) dp[at(1, boundary[i], i)] = 1;
    }
  }

  std::vector<ZCount> out(n_max);
  for (std::size_t step = 1; step <= n_max + 1; ++step) {
    for (auto& x : next) x = 0;
    for (std::size_t c = 0; c <= cap; ++c) {
      for (std::size_t b = 0; b < 2; ++b) {
        for (std::size_t i = 0; i < states; ++i) {
          const BigCount& here = dp[at(c, b, i)];
          if (here.is_zero()) continue;
          for (auto j : window.out()[i]) {
            const std::size_t c2 = c + (low[j] ? 1 : 0);
            if (c2 > cap) continue;
            next[at(c2, (b || boundary[j]) ? 1 : 0, j)] += here;
          }
        }
      }
    }
    std::swap(dp, next);
    if (step < 2) continue;
    const std::size_t n = step - 1;  // words of length n + 2
    const std::size_t limit = std::min(cap, (n + 2) / m);
    ZCount z;
    z.working_cutoff = cutoff;
    for (std::size_t c = 0; c <= limit; ++c) {
      for (std::size_t b = 0; b < 2; ++b) {
        for (std::size_t i = 0; i < states; ++i) {
          if (!low[i]) continue;
          const BigCount& here = dp[at(c, b, i)];
          if (here.is_zero()) continue;
          z.count += here;
          if (b) z.undercount = true;
        }
      }
    }
    out[n - 1] = z;
  }
  return out;
}

ZCount z_n_count(const shift::CountableGraph& g, std::size_t m, std::uint64_t q, std::size_t n) {
  return z_n_counts(g, m, q, n).back();
}

InfinityEntropyEstimate entropy_at_infinity(const shift::CountableGraph& g,
                                            std::span<const std::size_t> m_schedule,
                                            std::span<const std::uint64_t> q_schedule,
                                            std::size_t n_max) {
  if (m_schedule.empty() || q_schedule.empty()) throw InvalidInputError("schedules must be nonempty");
  InfinityEntropyEstimate e;
  e.estimate = std::numeric_limits<double>::infinity();
  // liminf over a schedule, read off its last half
  const auto tail = [](std::size_t size, std::size_t k) { return k >= size / 2; };
  for (std::size_t qi = 0; qi < q_schedule.size(); ++qi) {
    const std::uint64_t q = q_schedule[qi];
    double per_q = std::numeric_limits<double>::infinity();
    for (std::size_t mi = 0; mi < m_schedule.size(); ++mi) {
      const std::size_t m = m_schedule[mi];
      InfinityCell cell;
      cell.m = m;
      cell.q = q;
      cell.z = z_n_counts(g, m, q, n_max);
      std::vector<double> logs;
      for (const auto& z : cell.z) {
        logs.push_back(shift::log_count(z.count));
        cell.undercount = cell.undercount || z.undercount;
      }
      const auto summary = thermo::summarize_growth(logs);
      // The letter budget (n + 2) / M steps up every M lengths, so compare
      // lengths a whole number of budget steps and periods apart.
      const std::size_t span = std::lcm(std::max<std::size_t>(summary.period, 1), m);
      cell.h = summary.growth;
      for (std::size_t n = logs.size(); n > span; --n) {
        if (std::isfinite(logs[n - 1]) && std::isfinite(logs[n - 1 - span])) {
          cell.h = (logs[n - 1] - logs[n - 1 - span]) / static_cast<double>(span);
          break;
        }
      }
      cell.last = summary.last;
      if (tail(m_schedule.size(), mi)) per_q = std::min(per_q, cell.h);
      e.undercount = e.undercount || cell.undercount;
      e.table.push_back(std::move(cell));
    }
    e.per_q.emplace_back(q, per_q);
    if (tail(q_schedule.size(), qi)) e.estimate = std::min(e.estimate, per_q);
  }
  return e;
}

double birkhoff_fraction(std::span<const State> x, State base, std::size_t n) {
  if (n == 0) throw InvalidInputError("horizon must be >= 1");
  if (x.size() < n) throw HorizonError("itinerary shorter than the Birkhoff horizon");
  const auto hits = std::count(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n), base);
  return static_cast<double>(hits) / static_cast<double>(n);
}

EscapeResult escape_on_average_test(std::span<const State> x, std::span<const State> bases, std::size_t n) {
  if (bases.empty()) throw InvalidInputError("no base cylinders given");
  EscapeResult r;
  r.threshold = 1.0 / std::sqrt(static_cast<double>(n));
  r.escaping = true;
  for (State b : bases) {
    r.fractions.push_back(birkhoff_fraction(x, b, n));
    if (r.fractions.back() > r.threshold) r.escaping = false;
  }
  return r;
}

EscapeSampleReport escape_sample(const markov::BranchingRule& rule, std::span<const State> bases,
                                 std::size_t horizon, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw InvalidInputError("samples must be positive");
  const auto batch = markov::sample_z_infinity_batch(rule, markov::StartLaw{}, horizon, samples, seed);
  EscapeSampleReport r;
  r.samples = samples;
  for (const auto& g : batch) {
    if (escape_on_average_test(g.arcs(), bases, horizon).escaping) ++r.escaping;
  }
  const std::size_t staying = samples - r.escaping;
  r.non_escaping_fraction = static_cast<double>(staying) / static_cast<double>(samples);
  std::tie(r.wilson_low, r.wilson_high) = wilson(staying, samples);
  return r;
}

DimensionBounds hausdorff_bounds(double h_g, double h_inf, std::optional<bool> spr) {
  const auto check = [](double h, const char* what) {
    if (std::isnan(h) || h == std::numeric_limits<double>::infinity()) {
      throw DomainError(std::string(what) + " must be finite");
    }
    return h == kNegInf ? 0.0 : std::max(0.0, h);
  };
  DimensionBounds b;
  b.recurrent = check(h_g, "h_G") / std::log(2.0);
  b.escaping_recurrent = check(h_inf, "h_inf") / std::log(2.0);
  b.strict = spr;
  return b;
}

DimensionEstimate box_dimension_estimate(std::span<const std::vector<State>> sample,
                                         std::span<const std::size_t> depths) {
  if (sample.size() < 1000) throw InvalidInputError("box counting needs at least 1000 sample points");
  if (depths.size() < 5) throw InvalidInputError("box counting needs at least 5 scales");
  DimensionEstimate e;
  e.depths.assign(depths.begin(), depths.end());
  std::sort(e.depths.begin(), e.depths.end());
  e.depths.erase(std::unique(e.depths.begin(), e.depths.end()), e.depths.end());
  if (e.depths.size() < 5) throw InvalidInputError("box counting needs at least 5 distinct scales");
  const std::size_t deepest = e.depths.back();
  for (const auto& x : sample) {
    if (x.size() < deepest) throw HorizonError("sample sequence shorter than the finest scale");
  }
  for (auto k : e.depths) {
    std::set<std::vector<State>> cells;
    for (const auto& x : sample) cells.emplace(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k));
    e.scales.push_back(std::ldexp(1.0, -static_cast<int>(k)));
    e.counts.push_back(cells.size());
  }
  if (e.counts.back() == 1) {
    e.note = "degenerate sample: all points coincide";
    return e;
  }
  const double n = static_cast<double>(e.depths.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < e.depths.size(); ++i) {
    mx += static_cast<double>(e.depths[i]) * std::log(2.0);
    my += std::log(static_cast<double>(e.counts[i]));
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < e.depths.size(); ++i) {
    const double x = static_cast<double>(e.depths[i]) * std::log(2.0) - mx;
    sxx += x * x;
    sxy += x * (std::log(static_cast<double>(e.counts[i])) - my);
  }
  e.slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < e.depths.size(); ++i) {
    const double x = static_cast<double>(e.depths[i]) * std::log(2.0) - mx;
    const double r = std::log(static_cast<double>(e.counts[i])) - my - e.slope * x;
    rss += r * r;
  }
  e.stderr_ = std::sqrt(rss / (n - 2.0) / sxx);
  return e;
}

}  // namespace gurevich::dimension
