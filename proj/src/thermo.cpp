#include "gurevich/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "gurevich/error.hpp"

namespace gurevich::thermo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string word_string(std::span<const State> w) {
  std::ostringstream s;
  for (std::size_t i = 0; i < w.size(); ++i) s << (i ? "," : "") << w[i];
  return s.str();
}

void require_edge_depth(const Potential& psi, const char* what) {
  if (!psi.locally_constant()) {
    throw UnsupportedError(std::string(what) + " needs a locally constant potential; '" + psi.name() +
                           "' is general");
  }
  if (psi.depth() > 2) {
    throw UnsupportedError(std::string(what) + " supports potentials of depth <= 2, got depth " +
                           std::to_string(psi.depth()));
  }
}

}  // namespace

Potential Potential::zero() { return Potential{}; }

Potential Potential::neg_log_first(const shift::CountableGraph& g) {
  Potential p;
  p.kind_ = PotentialKind::neg_log_first;
  p.name_ = "neg_log_first";
  p.depth_ = 1;
  p.f_ = [g](std::span<const State> x) {
    const double m = static_cast<double>(g.rank(x[0])) + 1.0;
    return -std::log(m * (m + 1.0));
  };
  return p;
}

Potential Potential::table(std::size_t depth, std::map<Word, double> entries) {
  if (depth == 0) throw InvalidInputError("table potential needs depth >= 1");
  for (const auto& [w, v] : entries) {
    if (w.size() != depth) {
      throw InvalidInputError("table entry '" + word_string(w) + "' does not have length " +
                              std::to_string(depth));
    }
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw InvalidInputError("table entry '" + word_string(w) + "' is not a real value");
    }
  }
  Potential p;
  p.kind_ = PotentialKind::table;
  p.name_ = "table";
  p.depth_ = depth;
  p.entries_ = std::move(entries);
  return p;
}

Potential Potential::general(std::string name, std::function<double(std::span<const State>)> f) {
  Potential p;
  p.kind_ = PotentialKind::general;
  p.name_ = std::move(name);
  p.depth_ = std::numeric_limits<std::size_t>::max();
  p.f_ = std::move(f);
  return p;
}

double Potential::operator()(std::span<const State> x) const {
  switch (kind_) {
    case PotentialKind::zero: return 0.0;
    case PotentialKind::general: return f_(x);
    default: break;
  }
  if (x.size() < depth_) {
    throw InvalidInputError("potential of depth " + std::to_string(depth_) + " evaluated on " +
                            std::to_string(x.size()) + " letters");
  }
  if (kind_ == PotentialKind::neg_log_first) return f_(x);
  const Word key(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(depth_));
  auto it = entries_.find(key);
  if (it == entries_.end()) throw DomainError("potential table has no entry for word " + word_string(key));
  return it->second;
}

// ---------------------------------------------------------------------------

double variation(const Potential& psi, std::size_t n, const shift::Truncation& t) {
  if (n == 0) throw InvalidInputError("variation index must be >= 1");
  if (!psi.locally_constant()) {
    throw UnsupportedError("variation of a general potential is not computable exactly");
  }
  if (n >= psi.depth()) return 0.0;
  // Enumerate admissible words of length depth; group by their first n letters.
  std::map<Word, std::pair<double, double>> range;
  Word w;
  const std::size_t k = psi.depth();
  std::function<void(std::size_t)> extend = [&](std::size_t i) {
    if (w.size() == k) {
      const double v = psi(w);
      const Word head(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(n));
      auto [it, fresh] = range.try_emplace(head, v, v);
      if (!fresh) {
        it->second.first = std::min(it->second.first, v);
        it->second.second = std::max(it->second.second, v);
      }
      return;
    }
    for (auto j : t.out()[i]) {
      w.push_back(t.state(j));
      extend(j);
      w.pop_back();
    }
  };
  for (std::size_t i = 0; i < t.size(); ++i) {
    w.assign(1, t.state(i));
    extend(i);
  }
  double var = 0.0;
  for (const auto& [head, mm] : range) {
    if (std::isfinite(mm.first) && std::isfinite(mm.second)) {
      var = std::max(var, mm.second - mm.first);
    } else if (mm.first != mm.second) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return var;
}

VariationSummary summable_variations(const Potential& psi, const shift::Truncation& t, std::size_t n_max) {
  VariationSummary s;
  for (std::size_t m = 2; m <= n_max; ++m) {
    s.partial_sum += variation(psi, m, t);
    ++s.terms;
  }
  s.zero_beyond = psi.depth();
  s.summable = std::isfinite(s.partial_sum);
  return s;
}

RuelleValue ruelle_apply(const Potential& psi, const std::function<double(std::span<const State>)>& g,
                         std::span<const State> x, const shift::Truncation& t) {
  if (x.empty()) throw InvalidInputError("Ruelle operator needs a nonempty prefix");
  if (psi.locally_constant() && x.size() + 1 < psi.depth()) {
    throw InvalidInputError("prefix too short to evaluate the potential on its preimages");
  }
  const std::size_t i = t.require_index(x[0]);
  RuelleValue r;
  Word y(x.size() + 1);
  std::copy(x.begin(), x.end(), y.begin() + 1);
  for (auto u : t.in()[i]) {
    y[0] = t.state(u);
    r.value += std::exp(psi(y)) * g(y);
    ++r.preimages;
  }
  return r;
}

double ruelle_norm_bound(const Potential& psi, const shift::Truncation& t) {
  require_edge_depth(psi, "Ruelle norm bound");
  double sup = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    double s = 0.0;
    for (auto u : t.in()[i]) {
      const Word y{t.state(u), t.state(i)};
      s += std::exp(psi(y));
    }
    sup = std::max(sup, s);
  }
  return sup;
}

spectral::SparseMatrix transfer_matrix(const Potential& psi, const shift::Truncation& t) {
  require_edge_depth(psi, "transfer matrix");
  spectral::SparseMatrix w(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (auto j : t.out()[i]) {
      const Word y{t.state(i), t.state(j)};
      const double weight = std::exp(psi(y));
      if (weight > 0.0) w.add(i, j, weight);
    }
  }
  return w;
}

namespace {

std::vector<double> log_sequence(const Potential& psi, State a, std::size_t n_max,
                                 const shift::Truncation& t, bool taboo) {
  if (n_max == 0) throw InvalidInputError("n must be >= 1");
  const auto w = transfer_matrix(psi, t);
  const std::size_t ia = t.require_index(a);
  std::vector<double> v(t.size(), 0.0), next(t.size());
  v[ia] = 1.0;
  double scale = 0.0;
  std::vector<double> out(n_max, kNegInf);
  for (std::size_t n = 1; n <= n_max; ++n) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (v[i] == 0.0) continue;
      for (const auto& [j, x] : w.rows[i]) next[j] += v[i] * x;
    }
    if (next[ia] > 0.0) out[n - 1] = std::log(next[ia]) + scale;
    if (taboo) next[ia] = 0.0;
    const double m = *std::max_element(next.begin(), next.end());
    if (m <= 0.0) break;
    for (double& x : next) x /= m;
    scale += std::log(m);
    std::swap(v, next);
  }
  return out;
}

}  // namespace

std::vector<double> log_partition_sequence(const Potential& psi, State a, std::size_t n_max,
                                           const shift::Truncation& t) {
  return log_sequence(psi, a, n_max, t, false);
}

std::vector<double> log_first_return_sequence(const Potential& psi, State a, std::size_t n_max,
                                              const shift::Truncation& t) {
  return log_sequence(psi, a, n_max, t, true);
}

double log_partition_function(const Potential& psi, State a, std::size_t n, const shift::Truncation& t) {
  return log_partition_sequence(psi, a, n, t).back();
}

double partition_function(const Potential& psi, State a, std::size_t n, const shift::Truncation& t) {
  return std::exp(log_partition_function(psi, a, n, t));
}

double first_return_partition(const Potential& psi, State a, std::size_t n, const shift::Truncation& t) {
  return std::exp(log_first_return_sequence(psi, a, n, t).back());
}

GrowthSummary summarize_growth(const std::vector<double>& log_values) {
  GrowthSummary s;
  const std::size_t n_max = log_values.size();
  s.values.resize(n_max);
  std::size_t last_support = 0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    s.values[n - 1] = log_values[n - 1] / static_cast<double>(n);
    if (std::isfinite(log_values[n - 1])) {
      s.period = std::gcd(s.period, n);
      last_support = n;
    }
  }
  if (last_support == 0) {
    s.last = s.cesaro = s.growth = kNegInf;
    return s;
  }
  s.last = s.values[last_support - 1];
  std::vector<std::pair<double, double>> tail;
  for (std::size_t n = 2 * n_max / 3 + 1; n <= n_max; ++n) {
    if (std::isfinite(s.values[n - 1])) tail.emplace_back(static_cast<double>(n), s.values[n - 1]);
  }
  if (tail.empty()) tail.emplace_back(static_cast<double>(last_support), s.last);
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : tail) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(tail.size());
  my /= static_cast<double>(tail.size());
  s.cesaro = my;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [x, y] : tail) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  s.trend = sxx > 0.0 ? sxy / sxx : 0.0;
  const std::size_t p = s.period;
  if (last_support > p && std::isfinite(log_values[last_support - p - 1])) {
    s.growth = (log_values[last_support - 1] - log_values[last_support - p - 1]) / static_cast<double>(p);
  } else {
    s.growth = s.last;
  }
  return s;
}

double log_spectral_radius(const Potential& psi, const shift::Truncation& t, std::string* method,
                           std::size_t dense_limit) {
  const auto w = transfer_matrix(psi, t);
  double rho = 0.0;
  if (t.size() <= dense_limit) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(t.size()),
                                              static_cast<Eigen::Index>(t.size()));
    for (std::size_t i = 0; i < t.size(); ++i) {
      for (const auto& [j, x] : w.rows[i]) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    if (es.info() != Eigen::Success) throw Error("dense eigenvalue solver failed");
    rho = es.eigenvalues().cwiseAbs().maxCoeff();
    if (method) *method = "dense_eigenvalues";
  } else {
    const auto r = spectral::spectral_radius(w);
    rho = r.radius;
    if (method) *method = "power_" + spectral::to_string(r.method);
  }
  return rho > 0.0 ? std::log(rho) : kNegInf;
}

PressureEstimate gurevich_pressure(const Potential& psi, State a, std::size_t n_max,
                                   const shift::Truncation& t, bool second_base) {
  PressureEstimate p;
  p.base = a;
  p.log_z = log_partition_sequence(psi, a, n_max, t);
  p.summary = summarize_growth(p.log_z);
  p.estimate = p.summary.growth;
  p.spectral = log_spectral_radius(psi, t, &p.spectral_method);
  const auto comps = spectral::strongly_connected_components(t.out());
  p.mixing = comps.size() == 1 && spectral::component_period(t.out(), comps.front()) == 1;
  if (second_base && t.size() > 1) {
    const std::size_t ia = t.require_index(a);
    const State b = t.state(ia == 0 ? 1 : 0);
    p.alt_base = b;
    p.alt_estimate = summarize_growth(log_partition_sequence(psi, b, n_max, t)).growth;
    p.base_gap = std::abs(*p.alt_estimate - p.estimate);
  }
  return p;
}

std::vector<PressurePoint> pressure_sweep(const Potential& psi, const shift::CountableGraph& g,
                                          std::span<const std::uint64_t> q_schedule, State a,
                                          std::size_t n_max) {
  if (q_schedule.empty()) throw InvalidInputError("empty truncation schedule");
  std::vector<PressurePoint> out;
  for (auto q : q_schedule) {
    const shift::Truncation t(g, q);
    out.push_back({q, gurevich_pressure(psi, a, n_max, t)});
  }
  return out;
}

RecurrenceSummary d_infinity(State a, std::size_t n_max, const shift::Truncation& t) {
  RecurrenceSummary r;
  r.base = a;
  const Potential zero = Potential::zero();
  r.log_z_star = log_first_return_sequence(zero, a, n_max, t);
  r.summary = summarize_growth(r.log_z_star);
  r.d_infinity = r.summary.growth;
  r.entropy = log_spectral_radius(zero, t);
  r.strongly_positive_recurrent = r.d_infinity < r.entropy;
  return r;
}

VariationalCheck variational_check(const Potential& psi, const markov::StochasticKernel& w,
                                   const markov::Distribution& pi, const shift::Truncation& t,
                                   double tolerance) {
  require_edge_depth(psi, "variational check");
  w.check_support(t);
  markov::validate_distribution(pi, w.size(), 1e-9);
  const auto next = w.step(pi);
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (std::abs(next[i] - pi[i]) > 1e-9) {
      throw InvalidInputError("measure is not stationary: (pi W - pi) at state " +
                              std::to_string(w.label(i)) + " is " + std::to_string(next[i] - pi[i]));
    }
  }
  VariationalCheck c;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (const auto& [j, x] : w.row(i)) {
      c.entropy -= pi[i] * x * std::log(x);
      if (psi.depth() == 2 && pi[i] > 0.0) c.integral += pi[i] * x * psi(Word{w.label(i), w.label(j)});
    }
    if (psi.depth() == 1 && pi[i] > 0.0) c.integral += pi[i] * psi(Word{w.label(i)});
  }
  c.lhs = c.entropy + c.integral;
  c.rhs = log_spectral_radius(psi, t);
  c.satisfied = c.lhs <= c.rhs + tolerance;
  return c;
}

std::string to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::zero: return "zero";
    case PotentialKind::neg_log_first: return "neg_log_first";
    case PotentialKind::table: return "table";
    case PotentialKind::general: return "general";
  }
  return "unknown";
}

}  // namespace gurevich::thermo
