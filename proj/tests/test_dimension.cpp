#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gurevich/dimension.hpp"
#include "gurevich/error.hpp"
#include "gurevich/shift.hpp"
#include "oracles.hpp"

using namespace gurevich;
using namespace gurevich::dimension;
using shift::CountableGraph;

TEST_CASE("z_n counts on Z-infinity") {
  const auto z = CountableGraph::z_infinity();
  // Frozen from an exhaustive enumeration without any cutoff.
  CHECK(z_n_count(z, 2, 4, 6).count == 40);
  const std::vector<std::uint64_t> by_m{215, 40, 5, 5};
  for (std::size_t m = 1; m <= 4; ++m) CHECK(z_n_count(z, m, 4, 6).count == by_m[m - 1]);
  const std::vector<std::uint64_t> by_n{12, 19, 37, 62};
  const auto counts = z_n_counts(z, 1, 4, 4);
  REQUIRE(counts.size() == 4);
  for (std::size_t n = 1; n <= 4; ++n) CHECK(counts[n - 1].count == by_n[n - 1]);

  for (std::size_t m = 1; m <= 3; ++m) {
    for (std::uint64_t q : {1u, 2u, 4u}) {
      const auto zc = z_n_counts(z, m, q, 8);
      for (std::size_t n = 1; n <= 8; ++n) {
        if (zc[n - 1].undercount) continue;
        CHECK(zc[n - 1].count == oracle::z_count(oracle::z_inf_succ, m, q, n));
      }
    }
  }
}

TEST_CASE("z_n counts on the two-way path match enumeration") {
  const auto p = CountableGraph::two_way_path();
  for (std::size_t m = 1; m <= 3; ++m) {
    const auto zc = z_n_counts(p, m, 3, 10);
    for (std::size_t n = 1; n <= 10; ++n) {
      CHECK_FALSE(zc[n - 1].undercount);
      CHECK(zc[n - 1].count == oracle::z_count(oracle::path_succ, m, 3, n));
    }
  }
}

TEST_CASE("z_n special cases") {
  const auto f = CountableGraph::full(2);
  CHECK(z_n_count(f, 2, 1, 6).count == 0);
  CHECK(z_n_count(f, 1, 1, 6).count == 256);
  CHECK(z_n_count(f, 1, 1, 6).working_cutoff == 1);  // capped at the graph size
}

TEST_CASE("z_n is monotone in M") {
  for (const auto& g : {CountableGraph::z_infinity(), CountableGraph::two_way_path(), CountableGraph::full(3)}) {
    for (std::uint64_t q : {1u, 2u, 4u, 6u}) {
      std::vector<std::vector<ZCount>> rows;
      for (std::size_t m = 1; m <= 5; ++m) rows.push_back(z_n_counts(g, m, q, 12));
      for (std::size_t m = 1; m < rows.size(); ++m) {
        for (std::size_t n = 0; n < 12; ++n) CHECK(rows[m][n].count <= rows[m - 1][n].count);
      }
    }
  }
}

TEST_CASE("entropy at infinity") {
  const std::vector<std::size_t> ms{2, 4};
  const std::vector<std::uint64_t> qs{4};
  const auto fin = entropy_at_infinity(CountableGraph::full(3), ms, qs, 20);
  CHECK(std::isinf(fin.estimate));
  CHECK(fin.estimate < 0);

  // Far from the window the path still branches in two directions.
  const std::vector<std::uint64_t> wide{16};
  const auto path = entropy_at_infinity(CountableGraph::two_way_path(), ms, wide, 40);
  CHECK_FALSE(path.undercount);
  CHECK(std::abs(path.estimate - std::log(2.0)) <= 0.05);

  const auto z = entropy_at_infinity(CountableGraph::z_infinity(), ms, qs, 30);
  CHECK(z.table.size() == 2);
  CHECK(std::isfinite(z.estimate));
  // Out-degree two: at most (q + 1) 2^{n+1} words. The ratio estimate itself
  // can overshoot log 2 at these lengths, so only the counts are bounded.
  for (const auto& cell : z.table) {
    for (std::size_t n = 1; n <= cell.z.size(); ++n) {
      CHECK(cell.z[n - 1].count <= shift::BigCount(cell.q + 1) << (n + 1));
    }
  }
}

TEST_CASE("escape on average") {
  std::vector<State> alt, mono;
  for (int i = 0; i < 1000; ++i) {
    alt.push_back(i % 2);
    mono.push_back(2 * i);
  }
  const std::vector<State> base{0};
  CHECK(birkhoff_fraction(alt, 0, 1000) == doctest::Approx(0.5));
  CHECK_FALSE(escape_on_average_test(alt, base, 1000).escaping);
  CHECK(birkhoff_fraction(mono, 0, 1000) == doctest::Approx(1e-3));
  const auto e = escape_on_average_test(mono, base, 1000);
  CHECK(e.escaping);
  CHECK(e.threshold == doctest::Approx(1.0 / std::sqrt(1000.0)));
  CHECK_THROWS_AS(birkhoff_fraction(alt, 0, 2000), HorizonError);
}

TEST_CASE("inward-biased Z-infinity itineraries do not escape") {
  const std::vector<State> bases{0, -1};
  const auto r = escape_sample(markov::BranchingRule::inward_biased(0.7, 6), bases, 10000, 200, 11);
  CHECK(r.escaping == 0);
  CHECK(r.wilson_low > 0.95);
}

TEST_CASE("Hausdorff dimension bounds") {
  CHECK(hausdorff_bounds(std::log(2.0), 0.0).recurrent == doctest::Approx(1.0));
  CHECK(hausdorff_bounds(0.0, 0.0).recurrent == 0.0);
  const auto b = hausdorff_bounds(0.5, 0.2, true);
  const auto b2 = hausdorff_bounds(1.0, 0.4, true);
  CHECK(b2.recurrent == doctest::Approx(2 * b.recurrent));
  CHECK(b2.escaping_recurrent == doctest::Approx(2 * b.escaping_recurrent));
  CHECK(b.strict == true);
  CHECK_FALSE(hausdorff_bounds(0.5, 0.2).strict);
  CHECK(hausdorff_bounds(0.5, -INFINITY).escaping_recurrent == 0.0);
  CHECK_THROWS_AS(hausdorff_bounds(NAN, 0.0), DomainError);
}

TEST_CASE("box-counting dimension") {
  std::mt19937_64 rng(13);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::vector<State>> sample(4000, std::vector<State>(12));
  for (auto& x : sample) {
    for (auto& a : x) a = coin(rng);
  }
  const std::vector<std::size_t> depths{1, 2, 3, 4, 5, 6, 7, 8};
  const auto est = box_dimension_estimate(sample, depths);
  CHECK(est.slope >= 0.9);
  CHECK(est.slope <= 1.1);
  CHECK(est.counts[2] == 8);

  const std::vector<std::vector<State>> same(1000, std::vector<State>(10, 3));
  const auto flat = box_dimension_estimate(same, depths);
  CHECK(flat.slope == 0.0);
  CHECK_FALSE(flat.note.empty());

  const std::vector<std::size_t> few{1, 2, 3};
  CHECK_THROWS_AS(box_dimension_estimate(sample, few), InvalidInputError);
  const std::vector<std::vector<State>> small(sample.begin(), sample.begin() + 10);
  CHECK_THROWS_AS(box_dimension_estimate(small, depths), InvalidInputError);
}

TEST_CASE("sampled Z-infinity itineraries respect the recurrent bound") {
  const std::vector<std::uint64_t> q{200};
  const double h = shift::gurevich_entropy(CountableGraph::z_infinity(), q, 0).estimate;
  const std::vector<std::size_t> depths{2, 3, 4, 5, 6, 7, 8};
  for (const auto& rule : {markov::BranchingRule::fair(), markov::BranchingRule::inward_biased(0.7, 4)}) {
    const markov::StartLaw start = rule.window > 0 ? markov::StartLaw{} : markov::StartLaw{0};
    std::vector<std::vector<State>> sample;
    for (const auto& g : markov::sample_z_infinity_batch(rule, start, 8, 5000, 21)) sample.push_back(g.arcs());
    const auto est = box_dimension_estimate(sample, depths);
    CHECK(est.slope <= hausdorff_bounds(h, 0.0).recurrent + 0.1);
  }
}
