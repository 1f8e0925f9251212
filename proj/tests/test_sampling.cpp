#include "cifti/sampling.hpp"
#include "cifti/transforms.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <doctest.h>

#include <numeric>
#include <set>

using namespace cifti;

TEST_CASE("vds pmf at N = 8") {
  auto const p = vds_pmf(8);
  // unnormalised weights 1/3, 1/2, 1, 1, 1, 1/2, 1/3, 1/4 sum to 59/12
  double const C = 59.0 / 12;
  std::vector<double> const w{1.0 / 3, 0.5, 1, 1, 1, 0.5, 1.0 / 3, 0.25};
  for(t_index s = 0; s < 8; ++s)
    CHECK(p(s) == doctest::Approx(w[s] / C).epsilon(1e-15));
  CHECK(p(3) == doctest::Approx(12.0 / 59).epsilon(1e-15));
  CHECK(frequency_of(3, 8) == 0);
}

TEST_CASE("vds pmf sums to one") {
  for(t_index n : {2, 8, 64, 1024, 4096})
    CHECK(std::abs(vds_pmf(n).sum() - 1) < 1e-12);
}

TEST_CASE("vds draws follow the pmf") {
  t_index const n = 8, draws = 100000;
  auto const pattern = sample_vds(n, draws, 42);
  REQUIRE(pattern.size() == draws);
  CHECK(pattern.kind == PatternKind::vds);
  auto const p = vds_pmf(n);
  std::vector<double> counts(n, 0);
  for(auto const s : pattern.omega) {
    REQUIRE(s >= 0);
    REQUIRE(s < n);
    ++counts[s];
  }
  for(t_index s = 0; s < n; ++s) {
    double const sigma = std::sqrt(draws * p(s) * (1 - p(s)));
    CHECK(std::abs(counts[s] - draws * p(s)) <= 3 * sigma);
  }
  for(t_index d = 0; d < draws; ++d) {
    CHECK(std::isfinite(pattern.weights(d)));
    REQUIRE(pattern.weights(d) == doctest::Approx(1 / std::sqrt(p(pattern.omega[d]))));
  }
  CHECK(pattern.weights.minCoeff() > 0);
  CHECK(pattern.alpha_factor == doctest::Approx(std::sqrt(double(draws))));
}

TEST_CASE("vds keeps duplicates and is reproducible") {
  auto const a = sample_vds(16, 64, 3);
  auto const b = sample_vds(16, 64, 3);
  CHECK(a.omega == b.omega);
  CHECK(a.weights == b.weights);
  std::set<t_index> const distinct(a.omega.begin(), a.omega.end());
  CHECK(distinct.size() < a.omega.size());
  CHECK(sample_vds(16, 64, 4).omega != a.omega);
  CHECK_THROWS_AS(sample_vds(16, 0, 1), DomainError);
}

TEST_CASE("vds budget") {
  CHECK(vds_budget(2, 4, 1) == 2);
  for(t_index K : {2, 3, 5, 8}) {
    auto const once = vds_budget(K, 1 << 20, 1);
    auto const twice = vds_budget(K, 1 << 20, 2);
    CHECK(twice >= once);
    CHECK(twice <= 2 * once);
    CHECK(twice >= 2 * once - 1);
  }
  CHECK(vds_budget(100, 64, 1) == 64);
  CHECK_THROWS_AS(vds_budget(1, 64, 1), DomainError);
}

TEST_CASE("mls containment at N = 1024, q = 6") {
  auto const W = build_dft_levels(1024, 6);
  std::vector<t_index> m(W.r(), 0);
  for(t_index t = 0; t < 6; ++t)
    m[t] = 16;
  auto const pattern = sample_mls(W, m, 9);
  CHECK(pattern.size() == 96);
  auto const owner = W.level_of();
  std::set<t_index> const distinct(pattern.omega.begin(), pattern.omega.end());
  CHECK(distinct.size() == 96);
  for(auto const s : pattern.omega)
    CHECK(owner[s] < 6);
  CHECK(pattern.weights == RealVector::Ones(96));
  CHECK(pattern.alpha_factor == doctest::Approx(std::sqrt(96.0 / 1024)));
}

TEST_CASE("mls edge cases") {
  auto const W = build_dhw_sampling_levels(64);
  std::vector<t_index> full(W.r());
  for(t_index t = 0; t < W.r(); ++t)
    full[t] = W.size(t);
  for(std::uint64_t seed : {1, 2, 3}) {
    auto const p = sample_mls(W, full, seed);
    std::set<t_index> const all(p.omega.begin(), p.omega.end());
    CHECK(all.size() == 64);
  }
  CHECK(sample_mls(W, std::vector<t_index>(W.r(), 0), 1).omega.empty());
  auto too_many = full;
  ++too_many[2];
  CHECK_THROWS_AS(sample_mls(W, too_many, 1), DomainError);
  CHECK_THROWS_AS(sample_mls(W, {1, 1}, 1), DimensionError);
}

TEST_CASE("mls draws are uniform within each level") {
  auto const W = build_dft_levels(64, 2);
  std::vector<t_index> const m{3, 7, 1, 15};
  auto const owner = W.level_of();
  std::vector<double> counts(64, 0);
  int const seeds = 10000;
  for(int seed = 0; seed < seeds; ++seed) {
    auto const p = sample_mls(W, m, std::uint64_t(seed));
    for(t_index t = 0, at = 0; t < W.r(); ++t) {
      std::set<t_index> level;
      for(t_index i = 0; i < m[t]; ++i, ++at) {
        REQUIRE(owner[p.omega[at]] == t);
        level.insert(p.omega[at]);
      }
      REQUIRE(level.size() == std::size_t(m[t]));
    }
    for(auto const s : p.omega)
      ++counts[s];
  }
  for(t_index t = 0; t < W.r(); ++t) {
    double const expected = double(seeds) * double(m[t]) / double(W.size(t));
    double stat = 0;
    for(auto const s : W.levels[t])
      stat += (counts[s] - expected) * (counts[s] - expected) / expected;
    boost::math::chi_squared const dist(double(W.size(t) - 1));
    CHECK(stat < boost::math::quantile(dist, 0.99));
  }
}

TEST_CASE("nyquist pattern") {
  auto const p = nyquist_pattern(16);
  CHECK(p.size() == 16);
  for(t_index s = 0; s < 16; ++s)
    CHECK(p.omega[s] == s);
  CHECK(p.weights == RealVector::Ones(16));
  CHECK(p.alpha_factor == 1);
}

TEST_CASE("in-order allocation") {
  auto const W = build_dft_levels(1024, 6);
  auto const m = allocate_in_order(W, 102);
  for(t_index t = 0; t < 6; ++t)
    CHECK(m[t] == 16);
  CHECK(m[6] == 6);
  CHECK(std::accumulate(m.begin(), m.end(), t_index(0)) == 102);
  CHECK_THROWS_AS(allocate_in_order(W, 2000), DomainError);
}

TEST_CASE("proportional allocation") {
  auto const W = build_dhw_sampling_levels(64);
  // sizes 2, 2, 4, 8, 16, 32
  std::vector<t_real> const equal(W.r(), 1);
  auto const m = allocate_proportional(W, equal, 30);
  CHECK(std::accumulate(m.begin(), m.end(), t_index(0)) == 30);
  CHECK(m[0] == 2);
  CHECK(m[1] == 2);
  CHECK(m[2] == 4);
  for(t_index t = 0; t < W.r(); ++t)
    CHECK(m[t] <= W.size(t));
  CHECK(m[3] + m[4] + m[5] == 22);

  for(t_index total = 0; total <= 64; ++total) {
    auto const a = allocate_proportional(W, dhw_level_weights({2, 1, 1, 0, 0, 0}), total);
    t_index sum = 0;
    for(t_index t = 0; t < W.r(); ++t) {
      CHECK(a[t] >= 0);
      CHECK(a[t] <= W.size(t));
      sum += a[t];
    }
    CHECK(sum == total);
  }
  auto const zero = allocate_proportional(W, std::vector<t_real>(W.r(), 0), 5);
  CHECK(zero[0] == 2);
  CHECK(zero[1] == 2);
  CHECK(zero[2] == 1);
}

TEST_CASE("haar level weights") {
  auto const w = dhw_level_weights({1, 0, 0});
  CHECK(w[0] == doctest::Approx(1));
  CHECK(w[1] == doctest::Approx(std::pow(2.0, -0.5)));
  CHECK(w[2] == doctest::Approx(0.5));
}

TEST_CASE("pattern json and mask") {
  auto const p = sample_vds(32, 20, 5);
  auto const j = to_json(p);
  CHECK(j.at("kind") == "vds");
  CHECK(j.at("omega")[0].get<t_index>() == p.omega[0] + 1);
  auto const back = pattern_from_json(j);
  CHECK(back.omega == p.omega);
  CHECK(back.weights == p.weights);
  CHECK(back.alpha_factor == p.alpha_factor);
  auto const mask = mask_row(p);
  std::set<t_index> const distinct(p.omega.begin(), p.omega.end());
  CHECK(std::accumulate(mask.begin(), mask.end(), 0) == int(distinct.size()));

  auto bad = j;
  bad["omega"][0] = 0;
  CHECK_THROWS_AS(pattern_from_json(bad), ParseError);
}
