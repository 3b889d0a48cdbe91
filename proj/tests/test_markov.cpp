#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gurevich/error.hpp"
#include "gurevich/markov.hpp"
#include "oracles.hpp"

using namespace gurevich;
using namespace gurevich::markov;

namespace {

StochasticKernel dense(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(rows.size(), rows.size());
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (double x : r) m(i, j++) = x;
    ++i;
  }
  return StochasticKernel::from_dense(m);
}

double residual(const StochasticKernel& w, const Distribution& pi) {
  const auto next = w.step(pi);
  double r = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) r = std::max(r, std::abs(next[i] - pi[i]));
  return r;
}

std::vector<double> geometric(const StochasticKernel& w, double ratio) {
  std::vector<double> v;
  for (auto s : w.labels()) v.push_back(std::pow(ratio, static_cast<double>(s)));
  return v;
}

}  // namespace

TEST_CASE("kernel construction") {
  CHECK_THROWS_AS(dense({{0.5, 0.4}, {0.5, 0.5}}), InvalidInputError);
  CHECK_THROWS_AS(dense({{1.5, -0.5}, {0.5, 0.5}}), InvalidInputError);
  const auto w = dense({{0.2, 0.8}, {1.0, 0.0}});
  CHECK(w.weight(0, 1) == doctest::Approx(0.8));
  CHECK(w.weight(1, 1) == 0.0);
  CHECK(w.row(1).size() == 1);
  Rng rng(1);
  for (int k = 0; k < 100; ++k) CHECK(w.sample(1, rng) == 0);
}

TEST_CASE("stationary distributions") {
  const auto half = dense({{0.5, 0.5}, {0.5, 0.5}});
  auto r = stationary_distribution(half);
  CHECK(r.pi[0] == doctest::Approx(0.5));
  CHECK(r.pi[1] == doctest::Approx(0.5));

  const auto bd = birth_death_chain(50, 0.3, 0.7);
  r = stationary_distribution(bd);
  const auto want = oracle::birth_death_stationary(50, 0.3, 0.7);
  for (std::size_t a = 0; a <= 50; ++a) CHECK(r.pi[a] == doctest::Approx(want[a]).epsilon(1e-9));
  CHECK(residual(bd, r.pi) <= 1e-10);

  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const int n = 3 + k;
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m(i, j) = u(rng);
      m.row(i) /= m.row(i).sum();
    }
    const auto w = StochasticKernel::from_dense(m);
    CHECK(residual(w, stationary_distribution(w).pi) <= 1e-10);
  }
}

TEST_CASE("reducible kernels are rejected") {
  const auto w = dense({{1.0, 0.0}, {0.5, 0.5}});
  CHECK_THROWS_AS(require_irreducible(w), InvalidInputError);
}

TEST_CASE("total variation") {
  CHECK(total_variation({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(1.0));
  CHECK(total_variation({0.5, 0.5}, {0.75, 0.25}) == doctest::Approx(0.25));
  CHECK(total_variation({0.3, 0.7}, {0.3, 0.7}) == 0.0);
  CHECK_THROWS_AS(total_variation({0.5, 0.5}, {1.0}), InvalidInputError);
}

TEST_CASE("recurrence verdicts") {
  const auto uniform = dense({{0.5, 0.5}, {0.5, 0.5}});
  auto r = classify_recurrence(uniform, 0, 200, 4000, 7);
  CHECK(r.verdict == RecurrenceVerdict::positive_recurrent);
  CHECK(r.f_hat == doctest::Approx(1.0));
  CHECK(std::abs(r.mean_return_time - 2.0) <= 3.0 * r.return_time_stderr);

  // Escape probability from 0: return needs a stay (0.3) or a step up that
  // comes back (0.7 * 3/7), so f = 0.6 with a long horizon.
  const auto away = birth_death_chain(1000, 0.7, 0.3);
  r = classify_recurrence(away, 0, 1000, 2000, 7);
  CHECK(r.verdict == RecurrenceVerdict::transient);
  CHECK(r.f_high < 1.0);
  CHECK(std::abs(r.f_hat - 0.6) <= 0.05);
  CHECK(to_string(r.verdict) == "transient");

  const auto absorbing = dense({{1.0, 0.0}, {0.5, 0.5}});
  r = classify_recurrence(absorbing, 0, 100, 100, 7);
  CHECK(r.verdict == RecurrenceVerdict::positive_recurrent);
  CHECK(r.mean_return_time == 1.0);
}

TEST_CASE("reversibility") {
  const auto bd = birth_death_chain(20, 0.4, 0.5);
  CHECK(check_reversibility(bd, stationary_distribution(bd).pi).reversible);

  const auto rot = dense({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
  const auto r = check_reversibility(rot, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK_FALSE(r.reversible);
  CHECK(r.worst_violation == doctest::Approx(1.0 / 3));

  const auto sym = dense({{0.2, 0.5, 0.3}, {0.5, 0.1, 0.4}, {0.3, 0.4, 0.3}});
  CHECK(check_reversibility(sym, {1.0 / 3, 1.0 / 3, 1.0 / 3}).reversible);
}

TEST_CASE("Lyapunov certificate of the biased walk") {
  const auto w = birth_death_chain(200, 0.3, 0.7);
  const double c = std::sqrt(7.0 / 3.0);
  const double tight = 0.7 / c + 0.3 * c;
  CHECK(tight == doctest::Approx(2.0 * std::sqrt(0.21)));

  auto cert = lyapunov_verify(w, geometric(w, c), 0, 0.92);
  CHECK(cert.valid);
  CHECK(cert.base_holds);
  CHECK(std::abs(cert.achieved_drift - tight) <= 1e-3);

  // The reflecting top state has ratio 0.7 / c + 0.3 < 0.9, so only 1..199 fail.
  cert = lyapunov_verify(w, geometric(w, c), 0, 0.90);
  CHECK_FALSE(cert.valid);
  CHECK(cert.violations == 199);
  CHECK(cert.first_violation == 1u);
  CHECK(cert.last_violation == 199u);

  cert = lyapunov_verify(w, std::vector<double>(201, 1.0), 0, 0.95);
  CHECK_FALSE(cert.valid);
  CHECK(cert.violations == 200);

  CHECK_THROWS_AS(lyapunov_verify(w, std::vector<double>(201, 0.5), 0, 0.95), InvalidInputError);
}

TEST_CASE("mixing bound against exact total variation") {
  const auto w = birth_death_chain(200, 0.3, 0.7);
  const auto cert = lyapunov_verify(w, geometric(w, std::sqrt(7.0 / 3.0)), 0, 0.92);
  const double eta = 0.95;
  CHECK(mixing_bound(cert, eta, 0, 0) == doctest::Approx(eta / (eta - cert.achieved_drift)));
  CHECK(mixing_bound(cert, eta, 0, 0) == doctest::Approx(28.4).epsilon(2e-3));
  CHECK_THROWS_AS(mixing_bound(cert, 0.9, 0, 0), InvalidInputError);

  const auto pi = stationary_distribution(w).pi;
  const auto rep = mixing_report(w, pi, cert, eta, 0, 200);
  CHECK(rep.bound_dominates);
  CHECK(rep.tv_nonincreasing);
  CHECK(rep.points.size() == 201);
  CHECK(rep.points[200].tv <= rep.points[200].bound);
  CHECK(empirical_tv(w, pi, 0, 200) == doctest::Approx(rep.points[200].tv));

  // Exact oracle: dense matrix powers.
  const Eigen::MatrixXd m = w.dense();
  Eigen::RowVectorXd p = Eigen::RowVectorXd::Zero(m.rows());
  p(0) = 1.0;
  for (int k = 0; k < 37; ++k) p = p * m;
  double tv = 0.0;
  for (int j = 0; j < m.rows(); ++j) tv += std::abs(p(j) - pi[j]);
  CHECK(rep.points[37].tv == doctest::Approx(tv / 2).epsilon(1e-9));
}

TEST_CASE("Bernoulli cylinders") {
  const std::vector<double> fair{0.5, 0.5}, skew{0.9, 0.1};
  CHECK(bernoulli_cylinder(fair, std::vector<State>{0, 1}) == doctest::Approx(0.25));
  CHECK(bernoulli_cylinder(skew, std::vector<State>{1, 1, 1}) == doctest::Approx(0.001));
  CHECK(bernoulli_cylinder(skew, std::vector<State>{2}) == 0.0);
  for (State a : {0, 1}) {
    double s = 0.0;
    for (State b : {0, 1}) s += bernoulli_cylinder(skew, std::vector<State>{a, b});
    CHECK(s == doctest::Approx(bernoulli_cylinder(skew, std::vector<State>{a})));
  }
}

TEST_CASE("exact Markov covariances decay like the second eigenvalue") {
  const auto iid = dense({{0.5, 0.5}, {0.5, 0.5}});
  const Distribution half{0.5, 0.5};
  const std::vector<State> a0{0}, a1{1};
  CHECK(exact_markov_covariance(iid, half, a0, a0, 0) == doctest::Approx(0.25));
  CHECK(std::abs(exact_markov_covariance(iid, half, a0, a1, 3)) < 1e-15);

  const auto w = dense({{0.7, 0.3}, {0.3, 0.7}});
  for (std::size_t n = 0; n <= 30; ++n) {
    CHECK(std::abs(exact_markov_covariance(w, half, a0, a0, n) - 0.25 * std::pow(0.4, n)) <= 1e-10);
  }
  const auto skew = dense({{0.9, 0.1}, {0.4, 0.6}});
  const auto pi = stationary_distribution(skew).pi;
  const double lam = 0.5;
  const double c1 = exact_markov_covariance(skew, pi, a0, a0, 1);
  for (std::size_t n = 1; n <= 30; ++n) {
    CHECK(std::abs(exact_markov_covariance(skew, pi, a0, a0, n) - c1 * std::pow(lam, n - 1)) <= 1e-10);
  }
}

TEST_CASE("Monte Carlo covariances") {
  const std::vector<double> p{0.5, 0.5};
  const std::vector<State> a0{0}, a1{1};
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto c = mc_covariance_bernoulli(p, a0, a1, n, 100000, 100 + n);
    CHECK(c.low <= 0.0);
    CHECK(c.high >= 0.0);
  }
  const auto w = dense({{0.7, 0.3}, {0.3, 0.7}});
  const auto c = mc_covariance_markov(w, {0.5, 0.5}, a0, a0, 2, 100000, 9);
  const double exact = exact_markov_covariance(w, {0.5, 0.5}, a0, a0, 2);
  CHECK(c.low <= exact);
  CHECK(exact <= c.high);
}

TEST_CASE("branching rules and the Z-infinity kernels") {
  const auto rule = BranchingRule::inward_biased(0.7, 4);
  CHECK(rule.p_upper(-4) == 1.0);
  CHECK(rule.p_upper(4) == 0.0);
  CHECK(rule.p_upper(0) == 0.5);
  CHECK(rule.p_upper(-2) == 0.7);
  CHECK(rule.p_upper(2) == doctest::Approx(0.3));
  CHECK_THROWS_AS(BranchingRule::constant(1.0), InvalidInputError);

  const auto folds = two_fold_kernel(rule);
  CHECK(folds.size() == 9);
  const auto arcs = z_infinity_arc_kernel(rule);
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    for (const auto& [j, x] : arcs.row(i)) CHECK(trajectory::admissible_step(arcs.label(i), arcs.label(j)));
  }
  CHECK_THROWS_AS(two_fold_kernel(BranchingRule::fair()), UnsupportedError);
}

TEST_CASE("sampling is reproducible and admissible") {
  const auto rule = BranchingRule::fair();
  const auto a = sample_z_infinity_batch(rule, StartLaw{0}, 64, 100, 7);
  const auto b = sample_z_infinity_batch(rule, StartLaw{0}, 64, 100, 7);
  CHECK(a == b);
  for (const auto& g : a) CHECK(trajectory::is_admissible(g.arcs()));
  CHECK_FALSE(a == sample_z_infinity_batch(rule, StartLaw{0}, 64, 100, 8));
}

TEST_CASE("itinerary frequencies match the Markov measure") {
  const auto fair = BranchingRule::fair();
  const std::vector<trajectory::ArcIndex> w01{0, 1}, w03{0, 3};
  auto f = empirical_itinerary_measure(fair, StartLaw{0}, w01, 40000, 3);
  CHECK(std::abs(f.frequency - 0.25) <= 3.0 * std::sqrt(0.25 * 0.75 / 40000));
  CHECK(empirical_itinerary_measure(fair, StartLaw{0}, w03, 1000, 3).hits == 0);

  const auto rule = BranchingRule::inward_biased(0.7, 4);
  const auto arcs = z_infinity_arc_kernel(rule);
  const auto folds = two_fold_kernel(rule);
  const auto start = stationary_distribution(folds).pi;
  const auto law = first_arc_law(rule, arcs, folds, start);
  // A stationary start makes the arc law stationary too.
  CHECK(residual(arcs, law) <= 1e-10);
  const std::size_t n = 40000;
  const auto sample = sample_z_infinity_batch(rule, StartLaw{}, 3, n, 5);
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const std::vector<trajectory::ArcIndex> word{arcs.label(i)};
    const double mu = markov_cylinder_measure(arcs, law, word);
    const auto fr = cylinder_frequency(sample, word);
    CHECK(std::abs(fr.frequency - mu) <= 3.0 * std::sqrt(mu * (1 - mu) / n) + 1e-12);
  }
}
