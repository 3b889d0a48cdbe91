#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gurevich/error.hpp"
#include "gurevich/markov.hpp"
#include "gurevich/shift.hpp"
#include "gurevich/thermo.hpp"

using namespace gurevich;
using namespace gurevich::thermo;
using shift::CountableGraph;
using shift::Truncation;

namespace {

Truncation full(std::size_t n) { return Truncation(CountableGraph::full(n), n - 1); }

// Strongly connected random graph: a Hamiltonian cycle plus random chords.
Truncation random_strong(std::mt19937_64& rng, std::size_t n, std::size_t chords_per_state = 1) {
  std::vector<std::pair<State, State>> edges;
  for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t e = 0; e < chords_per_state * n; ++e) edges.emplace_back(pick(rng), pick(rng));
  return Truncation(CountableGraph::from_edges("random", edges), n - 1);
}

// Random kernel supported on the truncation's edges.
markov::StochasticKernel random_kernel(std::mt19937_64& rng, const Truncation& t) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<markov::StochasticKernel::Row> rows(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    double s = 0.0;
    for (auto j : t.out()[i]) {
      rows[i].emplace_back(j, u(rng));
      s += rows[i].back().second;
    }
    for (auto& [j, w] : rows[i]) w /= s;
  }
  return markov::StochasticKernel(t.states(), std::move(rows), 1e-9);
}

}  // namespace

TEST_CASE("potential values") {
  const auto g = CountableGraph::full(3);
  const auto psi = Potential::neg_log_first(g);
  CHECK(psi.depth() == 1);
  CHECK(psi(std::vector<State>{0}) == doctest::Approx(-std::log(2.0)));
  CHECK(psi(std::vector<State>{2, 0}) == doctest::Approx(-std::log(12.0)));
  CHECK(Potential::zero()(std::vector<State>{}) == 0.0);

  const auto tab = Potential::table(2, {{{0, 0}, 0.0}, {{0, 1}, 1.0}});
  CHECK(tab(std::vector<State>{0, 1, 1}) == 1.0);
  CHECK_THROWS(tab(std::vector<State>{1, 1}));
  const auto deep = Potential::table(3, {{{0, 0, 0}, 1.0}});
  CHECK_THROWS_AS(transfer_matrix(deep, full(2)), UnsupportedError);
}

TEST_CASE("variations") {
  const auto t = full(2);
  CHECK(variation(Potential::neg_log_first(t.graph()), 2, t) == 0.0);
  CHECK(variation(Potential::zero(), 1, t) == 0.0);
  CHECK(variation(Potential::zero(), 7, t) == 0.0);
  const auto tab = Potential::table(2, {{{0, 0}, 0.0}, {{0, 1}, 1.0}, {{1, 0}, 0.0}, {{1, 1}, 1.0}});
  CHECK(variation(tab, 1, t) == doctest::Approx(1.0));
  CHECK(variation(tab, 2, t) == 0.0);
  const auto s = summable_variations(tab, t, 10);
  CHECK(s.summable);
  CHECK(s.partial_sum == 0.0);
}

TEST_CASE("Ruelle operator") {
  const auto t2 = full(2);
  const auto one = [](std::span<const State>) { return 1.0; };
  const auto r = ruelle_apply(Potential::zero(), one, std::vector<State>{1}, t2);
  CHECK(r.value == doctest::Approx(2.0));
  CHECK(r.preimages == 2);

  for (std::size_t n : {2u, 5u, 40u}) {
    const auto t = full(n);
    const auto psi = Potential::neg_log_first(t.graph());
    const double want = static_cast<double>(n) / (n + 1.0);
    CHECK(ruelle_apply(psi, one, std::vector<State>{0}, t).value == doctest::Approx(want).epsilon(1e-12));
    CHECK(ruelle_norm_bound(psi, t) == doctest::Approx(want).epsilon(1e-12));
    CHECK(ruelle_norm_bound(psi, t) < 1.0);
  }
}

TEST_CASE("partition functions") {
  const auto t = full(2);
  CHECK(partition_function(Potential::zero(), 0, 5, t) == doctest::Approx(16.0));
  CHECK(partition_function(Potential::neg_log_first(t.graph()), 0, 3, t) == doctest::Approx(2.0 / 9.0));
  CHECK(partition_function(Potential::zero(), 0, 1, t) == doctest::Approx(1.0));
  const Truncation p(CountableGraph::two_way_path(), 10);
  CHECK(partition_function(Potential::zero(), 0, 1, p) == 0.0);
  CHECK(std::isinf(log_partition_function(Potential::zero(), 0, 1, p)));
}

TEST_CASE("renewal identity for periodic and first-return sums") {
  const auto t = full(2);
  const auto psi = Potential::zero();
  std::vector<double> z(11, 1.0), zs(11, 0.0);
  for (std::size_t n = 1; n <= 10; ++n) {
    z[n] = partition_function(psi, 0, n, t);
    zs[n] = first_return_partition(psi, 0, n, t);
  }
  for (std::size_t n = 1; n <= 10; ++n) {
    double sum = 0.0;
    for (std::size_t k = 1; k <= n; ++k) sum += zs[k] * z[n - k];
    CHECK(sum == doctest::Approx(z[n]));
  }
  for (std::size_t n = 1; n <= 30; ++n) CHECK(first_return_partition(psi, 1, n, t) == doctest::Approx(1.0));
}

TEST_CASE("growth summary") {
  std::vector<double> lv;
  for (int n = 1; n <= 20; ++n) lv.push_back(n % 2 == 0 ? n * std::log(3.0) : -INFINITY);
  const auto s = summarize_growth(lv);
  CHECK(s.period == 2);
  CHECK(s.growth == doctest::Approx(std::log(3.0)));
  CHECK(s.last == doctest::Approx(std::log(3.0)));
}

TEST_CASE("pressure of the zero potential is the entropy") {
  const auto t = full(2);
  const auto p = gurevich_pressure(Potential::zero(), 0, 30, t);
  CHECK(p.estimate == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(p.spectral == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(p.mixing);

  std::mt19937_64 rng(47);
  for (int k = 0; k < 20; ++k) {
    const auto g = random_strong(rng, 5 + 2 * k);
    const double h = shift::truncation_entropy(g).log_radius;
    CHECK(std::abs(log_spectral_radius(Potential::zero(), g) - h) <= 1e-9);
  }
}

TEST_CASE("pressure of the normalised first-letter potential") {
  for (std::size_t n : {2u, 9u, 100u}) {
    const auto t = full(n);
    const auto p = gurevich_pressure(Potential::neg_log_first(t.graph()), 0, 30, t);
    const double want = std::log(n / (n + 1.0));
    CHECK(std::abs(p.estimate - want) <= 1e-3);
    CHECK(p.spectral == doctest::Approx(want).epsilon(1e-9));
    REQUIRE(p.base_gap);
    CHECK(*p.base_gap <= 1e-2);
  }
}

TEST_CASE("pressure does not depend on the base state on mixing truncations") {
  // With sparse chords the second eigenvalue can sit close to the first and
  // 30 periods are not enough; three chords per state keeps the gap open.
  std::mt19937_64 rng(53);
  for (int k = 0; k < 10; ++k) {
    const auto t = random_strong(rng, 8 + k, 3);
    const auto p = gurevich_pressure(Potential::zero(), t.state(0), 30, t);
    if (!p.mixing) continue;
    REQUIRE(p.base_gap);
    CHECK(*p.base_gap <= 1e-2);
  }
}

TEST_CASE("first-return growth and strong positive recurrence") {
  const auto t = full(2);
  const auto r = d_infinity(1, 30, t);
  for (double v : r.log_z_star) CHECK(v == 0.0);
  CHECK(r.d_infinity == 0.0);
  CHECK(r.entropy == doctest::Approx(std::log(2.0)));
  CHECK(r.strongly_positive_recurrent);
}

TEST_CASE("variational principle on Markov measures") {
  const auto t = full(2);
  const auto zero = Potential::zero();
  const auto uniform = markov::uniform_kernel(t);
  auto v = variational_check(zero, uniform, {0.5, 0.5}, t);
  CHECK(v.lhs == doctest::Approx(std::log(2.0)));
  CHECK(v.rhs == doctest::Approx(std::log(2.0)));
  CHECK(v.satisfied);

  const auto biased = markov::StochasticKernel::from_dense((Eigen::MatrixXd(2, 2) << 0.9, 0.1, 0.9, 0.1).finished());
  v = variational_check(zero, biased, {0.9, 0.1}, t);
  CHECK(v.lhs == doctest::Approx(0.9 * std::log(1 / 0.9) + 0.1 * std::log(1 / 0.1)));
  CHECK(v.lhs < v.rhs);

  // The Gibbs-like Bernoulli measure proportional to the weights (1/2, 1/6).
  const auto gibbs = markov::StochasticKernel::from_dense((Eigen::MatrixXd(2, 2) << 0.75, 0.25, 0.75, 0.25).finished());
  v = variational_check(Potential::neg_log_first(t.graph()), gibbs, {0.75, 0.25}, t);
  CHECK(std::abs(v.lhs - std::log(2.0 / 3.0)) <= 1e-6);
  CHECK(std::abs(v.rhs - std::log(2.0 / 3.0)) <= 1e-6);

  CHECK_THROWS_AS(variational_check(zero, biased, {0.5, 0.5}, t), InvalidInputError);
}

TEST_CASE("variational inequality for random Markov measures") {
  std::mt19937_64 rng(59);
  std::vector<Truncation> graphs{full(3), random_strong(rng, 6), random_strong(rng, 12)};
  for (const auto& t : graphs) {
    const auto psi = Potential::neg_log_first(t.graph());
    for (int k = 0; k < 100; ++k) {
      const auto w = random_kernel(rng, t);
      const auto pi = markov::stationary_distribution(w).pi;
      const auto v = variational_check(psi, w, pi, t);
      CHECK(v.lhs <= v.rhs + 1e-9);
      CHECK(v.satisfied);
    }
  }
}

TEST_CASE("transfer matrix weights") {
  const auto t = full(3);
  const auto w = transfer_matrix(Potential::neg_log_first(t.graph()), t);
  CHECK(w.n == 3);
  for (const auto& [j, x] : w.rows[2]) CHECK(x == doctest::Approx(1.0 / 12.0));
}
