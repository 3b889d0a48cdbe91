#include "gurevich/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "gurevich/error.hpp"

namespace gurevich::markov {

StochasticKernel::StochasticKernel(std::vector<State> labels, std::vector<Row> rows,
                                   double row_tolerance)
    : labels_(std::move(labels)), rows_(std::move(rows)) {
  const std::size_t n = labels_.size();
  if (n == 0) throw InvalidInputError("kernel has no states");
  if (rows_.size() != n) throw InvalidInputError("kernel row count differs from its state count");
  for (std::size_t i = 0; i < n; ++i) {
    if (!index_.emplace(labels_[i], i).second) {
      throw InvalidInputError("duplicate kernel state " + std::to_string(labels_[i]));
    }
  }
  cumulative_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Row& r = rows_[i];
    std::sort(r.begin(), r.end());
    Row merged;
    for (const auto& [j, w] : r) {
      if (j >= n) throw InvalidInputError("kernel entry column out of range in row " + std::to_string(i));
      if (!std::isfinite(w) || w < 0.0) {
        throw InvalidInputError("kernel entry w(" + std::to_string(labels_[i]) + ", " +
                                std::to_string(labels_[j]) + ") is negative or non-finite");
      }
      if (w == 0.0) continue;
      if (!merged.empty() && merged.back().first == j) {
        merged.back().second += w;
      } else {
        merged.emplace_back(j, w);
      }
    }
    r = std::move(merged);
    double total = 0.0;
    for (const auto& [j, w] : r) {
      total += w;
      cumulative_[i].push_back(total);
    }
    if (std::abs(total - 1.0) > row_tolerance) {
      throw InvalidInputError("row of state " + std::to_string(labels_[i]) + " sums to " +
                              std::to_string(total));
    }
  }
}

StochasticKernel StochasticKernel::from_dense(const Eigen::MatrixXd& w, std::vector<State> labels) {
  if (w.rows() != w.cols()) throw InvalidInputError("kernel matrix must be square");
  const auto n = static_cast<std::size_t>(w.rows());
  if (labels.empty()) {
    labels.resize(n);
    std::iota(labels.begin(), labels.end(), State{0});
  }
  std::vector<Row> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double x = w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (x != 0.0) rows[i].emplace_back(j, x);
    }
  }
  return StochasticKernel(std::move(labels), std::move(rows));
}

std::optional<std::size_t> StochasticKernel::index_of(State s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t StochasticKernel::require_index(State s) const {
  const auto i = index_of(s);
  if (!i) throw DomainError("state " + std::to_string(s) + " is not a kernel state");
  return *i;
}

double StochasticKernel::weight(std::size_t i, std::size_t j) const {
  const Row& r = rows_.at(i);
  auto it = std::lower_bound(r.begin(), r.end(), std::make_pair(j, -1.0));
  return (it != r.end() && it->first == j) ? it->second : 0.0;
}

Eigen::MatrixXd StochasticKernel::dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < size(); ++i) {
    for (const auto& [j, w] : rows_[i]) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
  }
  return m;
}

Distribution StochasticKernel::step(const Distribution& p) const {
  Distribution q(size(), 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    if (p[i] == 0.0) continue;
    for (const auto& [j, w] : rows_[i]) q[j] += p[i] * w;
  }
  return q;
}

std::size_t StochasticKernel::sample(std::size_t i, Rng& rng) const {
  const auto& c = cumulative_[i];
  std::uniform_real_distribution<double> u(0.0, c.back());
  const double x = u(rng);
  auto it = std::upper_bound(c.begin(), c.end(), x);
  if (it == c.end()) --it;
  return rows_[i][static_cast<std::size_t>(it - c.begin())].first;
}

void StochasticKernel::check_support(const shift::Truncation& t) const {
  for (std::size_t i = 0; i < size(); ++i) {
    const auto from = t.index_of(labels_[i]);
    if (!from) throw InvalidInputError("kernel state " + std::to_string(labels_[i]) + " not in truncation");
    for (const auto& [j, w] : rows_[i]) {
      const auto to = t.index_of(labels_[j]);
      if (!to || !t.has_edge(*from, *to)) {
        throw InvalidInputError("kernel moves " + std::to_string(labels_[i]) + " -> " +
                                std::to_string(labels_[j]) + " along a non-edge");
      }
    }
  }
}

StochasticKernel birth_death_chain(std::size_t top, double up, double down) {
  if (top == 0) throw InvalidInputError("birth-death chain needs at least two states");
  if (!(up > 0.0) || !(down > 0.0) || up + down > 1.0 + 1e-15) {
    throw InvalidInputError("birth-death probabilities must be positive with up + down <= 1");
  }
  std::vector<State> labels(top + 1);
  std::iota(labels.begin(), labels.end(), State{0});
  std::vector<StochasticKernel::Row> rows(top + 1);
  rows[0] = {{0, 1.0 - up}, {1, up}};
  for (std::size_t a = 1; a < top; ++a) {
    rows[a] = {{a - 1, down}, {a, 1.0 - up - down}, {a + 1, up}};
  }
  rows[top] = {{top - 1, down}, {top, 1.0 - down}};
  return StochasticKernel(std::move(labels), std::move(rows));
}

StochasticKernel uniform_kernel(const shift::Truncation& t) {
  std::vector<StochasticKernel::Row> rows(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& out = t.out()[i];
    if (out.empty()) {
      throw InvalidInputError("state " + std::to_string(t.state(i)) + " has no successor in the truncation");
    }
    for (auto j : out) rows[i].emplace_back(j, 1.0 / static_cast<double>(out.size()));
  }
  return StochasticKernel(t.states(), std::move(rows));
}

void validate_distribution(const Distribution& p, std::size_t size, double tol) {
  if (p.size() != size) throw InvalidInputError("distribution has the wrong number of states");
  double total = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0) throw InvalidInputError("distribution has a negative entry");
    total += x;
  }
  if (std::abs(total - 1.0) > tol) {
    throw InvalidInputError("distribution sums to " + std::to_string(total));
  }
}

double total_variation(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw InvalidInputError("total variation of distributions on different state sets");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

void require_irreducible(const StochasticKernel& w) {
  const std::size_t n = w.size();
  std::vector<std::vector<std::size_t>> fwd(n), bwd(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [j, x] : w.row(i)) {
      fwd[i].push_back(j);
      bwd[j].push_back(i);
    }
  }
  const auto unreached = [&](const std::vector<std::vector<std::size_t>>& adj) -> std::optional<std::size_t> {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto u : adj[v]) {
        if (!seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!seen[i]) return i;
    }
    return std::nullopt;
  };
  if (auto j = unreached(fwd)) {
    throw InvalidInputError("reducible kernel: state " + std::to_string(w.label(*j)) +
                            " is not reachable from state " + std::to_string(w.label(0)));
  }
  if (auto i = unreached(bwd)) {
    throw InvalidInputError("reducible kernel: state " + std::to_string(w.label(0)) +
                            " is not reachable from state " + std::to_string(w.label(*i)));
  }
}

namespace {

double stationarity_residual(const StochasticKernel& w, const Distribution& pi) {
  const Distribution next = w.step(pi);
  double r = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) r = std::max(r, std::abs(next[i] - pi[i]));
  return r;
}

std::optional<Distribution> direct_solve(const StochasticKernel& w) {
  const auto n = static_cast<Eigen::Index>(w.size());
  // (W^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (const auto& [j, x] : w.row(i)) {
      if (static_cast<Eigen::Index>(j) != n - 1) {
        entries.emplace_back(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i), x);
      }
    }
  }
  for (Eigen::Index i = 0; i + 1 < n; ++i) entries.emplace_back(i, i, -1.0);
  for (Eigen::Index i = 0; i < n; ++i) entries.emplace_back(n - 1, i, 1.0);
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(entries.begin(), entries.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) return std::nullopt;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  const Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success) return std::nullopt;
  Distribution pi(w.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    pi[static_cast<std::size_t>(i)] = std::max(0.0, x(i));
    total += pi[static_cast<std::size_t>(i)];
  }
  if (!(total > 0.0) || !std::isfinite(total)) return std::nullopt;
  for (double& p : pi) p /= total;
  return pi;
}

}  // namespace

StationaryResult stationary_distribution(const StochasticKernel& w, const StationaryOptions& opt) {
  require_irreducible(w);
  StationaryResult r;
  Distribution p(w.size(), 1.0 / static_cast<double>(w.size()));
  // The lazy kernel (I + W) / 2 has the same fixed points and is aperiodic.
  for (r.iterations = 1; r.iterations <= opt.max_iterations; ++r.iterations) {
    Distribution q = w.step(p);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = 0.5 * (q[i] + p[i]);
    const double change = total_variation(p, q);
    p = std::move(q);
    if (change <= opt.tv_tolerance) break;
  }
  r.pi = p;
  r.residual = stationarity_residual(w, p);
  if (w.size() <= opt.direct_limit) {
    if (auto direct = direct_solve(w)) {
      r.direct_tv = total_variation(p, *direct);
      const double direct_residual = stationarity_residual(w, *direct);
      if (direct_residual < r.residual) {
        r.pi = std::move(*direct);
        r.residual = direct_residual;
        r.refined_by_direct = true;
      }
    }
  }
  return r;
}

RecurrenceReport classify_recurrence(const StochasticKernel& w, State state, std::size_t horizon,
                                     std::size_t samples, std::uint64_t seed) {
  if (horizon == 0 || samples == 0) throw InvalidInputError("horizon and samples must be positive");
  const std::size_t start = w.require_index(state);
  RecurrenceReport r;
  r.samples = samples;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(k)};
    Rng rng(seq);
    std::size_t at = start;
    for (std::size_t m = 1; m <= horizon; ++m) {
      at = w.sample(at, rng);
      if (at == start) {
        ++r.returns;
        if (2 * m > horizon) ++r.late_returns;
        sum += static_cast<double>(m);
        sum_sq += static_cast<double>(m) * static_cast<double>(m);
        break;
      }
    }
  }
  const double n = static_cast<double>(samples);
  r.f_hat = static_cast<double>(r.returns) / n;
  constexpr double z = 1.959963984540054;
  const double denom = 1.0 + z * z / n;
  const double centre = (r.f_hat + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(r.f_hat * (1.0 - r.f_hat) / n + z * z / (4.0 * n * n)) / denom;
  r.f_low = std::max(0.0, centre - half);
  r.f_high = std::min(1.0, centre + half);
  if (r.returns > 0) {
    const double k = static_cast<double>(r.returns);
    r.mean_return_time = sum / k;
    const double var = std::max(0.0, sum_sq / k - r.mean_return_time * r.mean_return_time);
    r.return_time_stderr = std::sqrt(var / k);
  }
  if (r.returns == samples && r.late_returns == 0) {
    r.verdict = RecurrenceVerdict::positive_recurrent;
  } else if (r.f_high < 1.0 && r.late_returns == 0) {
    r.verdict = RecurrenceVerdict::transient;
  } else {
    r.verdict = RecurrenceVerdict::null_undetermined;
  }
  return r;
}

ReversibilityReport check_reversibility(const StochasticKernel& w, const Distribution& pi,
                                        double stationarity_tol) {
  validate_distribution(pi, w.size(), 1e-9);
  if (stationarity_residual(w, pi) > stationarity_tol) {
    throw InvalidInputError("distribution is not stationary for the kernel");
  }
  ReversibilityReport r;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (const auto& [j, x] : w.row(i)) {
      const double v = std::abs(pi[i] * x - pi[j] * w.weight(j, i));
      if (v > r.worst_violation) {
        r.worst_violation = v;
        r.worst_i = i;
        r.worst_j = j;
      }
    }
  }
  r.reversible = r.worst_violation <= 1e-10;
  return r;
}

LyapunovCertificate lyapunov_verify(const StochasticKernel& w, std::vector<double> v, State base,
                                    double lambda) {
  if (v.size() != w.size()) throw InvalidInputError("Lyapunov function has the wrong number of values");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || v[i] < 1.0) {
      throw InvalidInputError("Lyapunov function must be >= 1; V(" + std::to_string(w.label(i)) +
                              ") = " + std::to_string(v[i]));
    }
  }
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidInputError("drift must lie in (0, 1)");
  LyapunovCertificate c;
  c.base = w.require_index(base);
  c.lambda = lambda;
  c.base_holds = w.weight(c.base, c.base) > 0.0;
  double worst_ratio = -1.0;
  for (std::size_t a = 0; a < w.size(); ++a) {
    if (a == c.base) continue;
    double next = 0.0;
    for (const auto& [j, x] : w.row(a)) next += x * v[j];
    const double ratio = next / v[a];
    c.achieved_drift = std::max(c.achieved_drift, ratio);
    if (ratio > lambda) {
      ++c.violations;
      if (!c.first_violation) c.first_violation = a;
      c.last_violation = a;
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        c.worst_state = a;
      }
    }
  }
  c.v = std::move(v);
  c.valid = c.violations == 0 && c.base_holds;
  return c;
}

double mixing_bound(const LyapunovCertificate& cert, double eta, std::size_t i, std::size_t m) {
  if (!cert.valid) throw InvalidInputError("mixing bound needs a valid Lyapunov certificate");
  const double theta = cert.achieved_drift;
  if (!(eta > theta && eta < 1.0)) {
    throw InvalidInputError("eta must lie in (theta, 1) with theta = " + std::to_string(theta));
  }
  if (i >= cert.v.size()) throw DomainError("state index outside the certificate");
  return cert.v[i] * std::pow(eta, static_cast<double>(m + 1)) / (eta - theta);
}

std::vector<double> empirical_tv_curve(const StochasticKernel& w, const Distribution& pi, std::size_t i,
                                       std::size_t m_max) {
  validate_distribution(pi, w.size(), 1e-9);
  if (i >= w.size()) throw DomainError("start state outside the kernel");
  Distribution p(w.size(), 0.0);
  p[i] = 1.0;
  std::vector<double> tv;
  tv.reserve(m_max + 1);
  for (std::size_t m = 0; m <= m_max; ++m) {
    tv.push_back(total_variation(p, pi));
    if (m < m_max) p = w.step(p);
  }
  return tv;
}

double empirical_tv(const StochasticKernel& w, const Distribution& pi, std::size_t i, std::size_t m) {
  return empirical_tv_curve(w, pi, i, m).back();
}

MixingReport mixing_report(const StochasticKernel& w, const Distribution& pi,
                           const LyapunovCertificate& cert, double eta, std::size_t i,
                           std::size_t m_max) {
  MixingReport r;
  const auto tv = empirical_tv_curve(w, pi, i, m_max);
  r.bound_dominates = true;
  r.tv_nonincreasing = true;
  for (std::size_t m = 0; m <= m_max; ++m) {
    const double b = mixing_bound(cert, eta, i, m);
    r.points.push_back({m, tv[m], b});
    if (tv[m] > b) r.bound_dominates = false;
    if (m > 0 && tv[m] > tv[m - 1] + 1e-15) r.tv_nonincreasing = false;
  }
  return r;
}

double bernoulli_cylinder(std::span<const double> p, std::span<const State> word) {
  double m = 1.0;
  for (State a : word) {
    if (a < 0 || static_cast<std::size_t>(a) >= p.size()) return 0.0;
    m *= p[static_cast<std::size_t>(a)];
  }
  return m;
}

double markov_cylinder_measure(const StochasticKernel& w, const Distribution& initial,
                               std::span<const State> word) {
  validate_distribution(initial, w.size(), 1e-9);
  if (word.empty()) return 1.0;
  std::optional<std::size_t> prev = w.index_of(word[0]);
  if (!prev) return 0.0;
  double m = initial[*prev];
  for (std::size_t k = 1; k < word.size() && m > 0.0; ++k) {
    const auto next = w.index_of(word[k]);
    if (!next) return 0.0;
    m *= w.weight(*prev, *next);
    prev = next;
  }
  return m;
}

namespace {

// Position-wise constraints of B at 0 and A at n; nullopt when they clash.
std::optional<std::vector<std::optional<State>>> joint_constraints(std::span<const State> a,
                                                                   std::span<const State> b,
                                                                   std::size_t n) {
  const std::size_t len = std::max(b.size(), n + a.size());
  std::vector<std::optional<State>> c(len);
  for (std::size_t k = 0; k < b.size(); ++k) c[k] = b[k];
  for (std::size_t k = 0; k < a.size(); ++k) {
    auto& slot = c[n + k];
    if (slot && *slot != a[k]) return std::nullopt;
    slot = a[k];
  }
  return c;
}

void require_stationary(const StochasticKernel& w, const Distribution& pi) {
  validate_distribution(pi, w.size(), 1e-9);
  if (stationarity_residual(w, pi) > 1e-9) {
    throw InvalidInputError("covariance source must start from a stationary distribution");
  }
}

CovarianceEstimate finish(std::size_t hits, std::size_t samples, double mu_a, double mu_b) {
  CovarianceEstimate e;
  e.samples = samples;
  e.mu_a = mu_a;
  e.mu_b = mu_b;
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  e.estimate = p - mu_a * mu_b;
  e.stderr_ = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  e.low = e.estimate - 3.0 * e.stderr_;
  e.high = e.estimate + 3.0 * e.stderr_;
  return e;
}

}  // namespace

double exact_markov_covariance(const StochasticKernel& w, const Distribution& pi,
                               std::span<const State> a, std::span<const State> b, std::size_t n) {
  require_stationary(w, pi);
  if (a.empty() || b.empty()) throw InvalidInputError("cylinders must be nonempty");
  const double mu_a = markov_cylinder_measure(w, pi, a);
  const double mu_b = markov_cylinder_measure(w, pi, b);
  const auto c = joint_constraints(a, b, n);
  if (!c) return -mu_a * mu_b;
  std::vector<std::optional<std::size_t>> allowed(c->size());
  for (std::size_t k = 0; k < c->size(); ++k) {
    if ((*c)[k]) {
      allowed[k] = w.index_of(*(*c)[k]);
      if (!allowed[k]) return -mu_a * mu_b;
    }
  }
  const auto mask = [&](Distribution& p, std::size_t k) {
    if (!allowed[k]) return;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i != *allowed[k]) p[i] = 0.0;
    }
  };
  Distribution p = pi;
  mask(p, 0);
  for (std::size_t k = 1; k < c->size(); ++k) {
    p = w.step(p);
    mask(p, k);
  }
  return std::accumulate(p.begin(), p.end(), 0.0) - mu_a * mu_b;
}

CovarianceEstimate mc_covariance_bernoulli(std::span<const double> p, std::span<const State> a,
                                           std::span<const State> b, std::size_t n,
                                           std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw InvalidInputError("samples must be positive");
  if (a.empty() || b.empty()) throw InvalidInputError("cylinders must be nonempty");
  const double mu_a = bernoulli_cylinder(p, a);
  const double mu_b = bernoulli_cylinder(p, b);
  const auto c = joint_constraints(a, b, n);
  if (!c) return finish(0, samples, mu_a, mu_b);
  Rng rng(seed);
  std::discrete_distribution<std::size_t> letter(p.begin(), p.end());
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    bool ok = true;
    for (std::size_t k = 0; k < c->size(); ++k) {
      const auto x = static_cast<State>(letter(rng));
      if ((*c)[k] && *(*c)[k] != x) ok = false;
    }
    hits += ok ? 1 : 0;
  }
  return finish(hits, samples, mu_a, mu_b);
}

CovarianceEstimate mc_covariance_markov(const StochasticKernel& w, const Distribution& pi,
                                        std::span<const State> a, std::span<const State> b,
                                        std::size_t n, std::size_t samples, std::uint64_t seed) {
  require_stationary(w, pi);
  if (samples == 0) throw InvalidInputError("samples must be positive");
  if (a.empty() || b.empty()) throw InvalidInputError("cylinders must be nonempty");
  const double mu_a = markov_cylinder_measure(w, pi, a);
  const double mu_b = markov_cylinder_measure(w, pi, b);
  const auto c = joint_constraints(a, b, n);
  if (!c) return finish(0, samples, mu_a, mu_b);
  Rng rng(seed);
  std::discrete_distribution<std::size_t> start(pi.begin(), pi.end());
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    std::size_t at = start(rng);
    bool ok = !(*c)[0] || w.label(at) == *(*c)[0];
    for (std::size_t k = 1; k < c->size(); ++k) {
      at = w.sample(at, rng);
      if ((*c)[k] && w.label(at) != *(*c)[k]) ok = false;
    }
    hits += ok ? 1 : 0;
  }
  return finish(hits, samples, mu_a, mu_b);
}

// ---------------------------------------------------------------------------

BranchingRule BranchingRule::fair() { return constant(0.5); }

BranchingRule BranchingRule::constant(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInputError("branch probability must lie in (0, 1)");
  BranchingRule r;
  r.name = p == 0.5 ? "fair" : "constant";
  r.p_upper = [p](std::int64_t) { return p; };
  return r;
}

BranchingRule BranchingRule::inward_biased(double p_in, std::int64_t window) {
  if (!(p_in > 0.0 && p_in < 1.0)) throw InvalidInputError("inward probability must lie in (0, 1)");
  if (window < 1) throw InvalidInputError("window must be at least 1");
  BranchingRule r;
  r.name = "inward_biased";
  r.window = window;
  r.p_upper = [p_in, window](std::int64_t j) {
    if (j <= -window) return 1.0;
    if (j >= window) return 0.0;
    if (j == 0) return 0.5;
    return j < 0 ? p_in : 1.0 - p_in;
  };
  return r;
}

StochasticKernel two_fold_kernel(const BranchingRule& rule) {
  if (rule.window < 1) throw UnsupportedError("two-fold kernel needs a branching rule with a finite window");
  const std::int64_t J = rule.window;
  std::vector<State> labels;
  for (std::int64_t j = -J; j <= J; ++j) labels.push_back(j);
  std::vector<StochasticKernel::Row> rows(labels.size());
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const double p = rule.p_upper(labels[k]);
    if (p > 0.0) rows[k].emplace_back(k + 1, p);
    if (p < 1.0) rows[k].emplace_back(k - 1, 1.0 - p);
  }
  return StochasticKernel(std::move(labels), std::move(rows));
}

StochasticKernel z_infinity_arc_kernel(const BranchingRule& rule) {
  if (rule.window < 1) throw UnsupportedError("arc kernel needs a branching rule with a finite window");
  const std::int64_t J = rule.window;
  std::vector<State> labels;
  for (std::int64_t j = -J; j <= J; ++j) {
    const double p = rule.p_upper(j);
    if (p < 1.0) labels.push_back(trajectory::arc_leaving(j, trajectory::Branch::lower));
    if (p > 0.0) labels.push_back(trajectory::arc_leaving(j, trajectory::Branch::upper));
  }
  std::sort(labels.begin(), labels.end());
  std::unordered_map<State, std::size_t> index;
  for (std::size_t k = 0; k < labels.size(); ++k) index[labels[k]] = k;
  std::vector<StochasticKernel::Row> rows(labels.size());
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const std::int64_t e = trajectory::arc(labels[k]).end_two_fold();
    const double p = rule.p_upper(e);
    if (p > 0.0) rows[k].emplace_back(index.at(trajectory::arc_leaving(e, trajectory::Branch::upper)), p);
    if (p < 1.0) rows[k].emplace_back(index.at(trajectory::arc_leaving(e, trajectory::Branch::lower)), 1.0 - p);
  }
  return StochasticKernel(std::move(labels), std::move(rows));
}

Distribution first_arc_law(const BranchingRule& rule, const StochasticKernel& arc_kernel,
                           const StochasticKernel& two_folds, const Distribution& start_law) {
  validate_distribution(start_law, two_folds.size(), 1e-9);
  Distribution law(arc_kernel.size(), 0.0);
  for (std::size_t k = 0; k < two_folds.size(); ++k) {
    if (start_law[k] == 0.0) continue;
    const std::int64_t j = two_folds.label(k);
    const double p = rule.p_upper(j);
    if (p > 0.0) law[arc_kernel.require_index(trajectory::arc_leaving(j, trajectory::Branch::upper))] += start_law[k] * p;
    if (p < 1.0) law[arc_kernel.require_index(trajectory::arc_leaving(j, trajectory::Branch::lower))] += start_law[k] * (1.0 - p);
  }
  return law;
}

trajectory::TrajectoryClass sample_z_infinity(const BranchingRule& rule, std::int64_t start,
                                              std::size_t length, Rng& rng) {
  std::vector<trajectory::Branch> choices;
  choices.reserve(length);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::int64_t at = start;
  for (std::size_t k = 0; k < length; ++k) {
    const bool up = u(rng) < rule.p_upper(at);
    choices.push_back(up ? trajectory::Branch::upper : trajectory::Branch::lower);
    at += up ? 1 : -1;
  }
  return trajectory::build_trajectory(start, std::move(choices));
}

std::vector<trajectory::TrajectoryClass> sample_z_infinity_batch(const BranchingRule& rule,
                                                                 const StartLaw& start,
                                                                 std::size_t length,
                                                                 std::size_t samples,
                                                                 std::uint64_t seed) {
  std::vector<std::int64_t> folds;
  Distribution law;
  if (!start.fixed) {
    const StochasticKernel k = two_fold_kernel(rule);
    law = stationary_distribution(k).pi;
    folds = k.labels();
  }
  std::vector<trajectory::TrajectoryClass> out;
  out.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(s)};
    Rng rng(seq);
    std::int64_t j0 = 0;
    if (start.fixed) {
      j0 = *start.fixed;
    } else {
      std::discrete_distribution<std::size_t> pick(law.begin(), law.end());
      j0 = folds[pick(rng)];
    }
    out.push_back(sample_z_infinity(rule, j0, length, rng));
  }
  return out;
}

FrequencyEstimate cylinder_frequency(std::span<const trajectory::TrajectoryClass> sample,
                                     std::span<const trajectory::ArcIndex> word) {
  FrequencyEstimate f;
  f.samples = sample.size();
  if (sample.empty()) return f;
  for (const auto& g : sample) {
    if (g.horizon() < word.size()) throw HorizonError("sampled trajectory shorter than the cylinder");
    if (std::equal(word.begin(), word.end(), g.arcs().begin())) ++f.hits;
  }
  const double n = static_cast<double>(f.samples);
  f.frequency = static_cast<double>(f.hits) / n;
  f.stderr_ = std::sqrt(f.frequency * (1.0 - f.frequency) / n);
  return f;
}

FrequencyEstimate empirical_itinerary_measure(const BranchingRule& rule, const StartLaw& start,
                                              std::span<const trajectory::ArcIndex> word,
                                              std::size_t samples, std::uint64_t seed) {
  if (word.empty()) throw InvalidInputError("cylinder word is empty");
  const auto batch = sample_z_infinity_batch(rule, start, word.size(), samples, seed);
  return cylinder_frequency(batch, word);
}

std::string to_string(RecurrenceVerdict v) {
  switch (v) {
    case RecurrenceVerdict::transient: return "transient";
    case RecurrenceVerdict::positive_recurrent: return "recurrent(positive)";
    case RecurrenceVerdict::null_undetermined: return "recurrent(null-undetermined)";
  }
  return "unknown";
}

}  // namespace gurevich::markov
