#include "oracle.hpp"

#include "cifti/coherence.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace cifti;

namespace {

//! Entry (t, l) of the local coherence straight from its definition.
RealMatrix local_coherence_oracle(ComplexMatrix const &U, LevelScheme const &W, LevelScheme const &T) {
  RealMatrix mu(W.r(), T.r());
  for(t_index t = 0; t < W.r(); ++t) {
    double row_max = 0;
    for(auto const i : W.levels[t])
      for(t_index j = 0; j < U.cols(); ++j)
        row_max = std::max(row_max, std::norm(U(i, j)));
    for(t_index l = 0; l < T.r(); ++l) {
      double block_max = 0;
      for(auto const i : W.levels[t])
        for(auto const j : T.levels[l])
          block_max = std::max(block_max, std::norm(U(i, j)));
      mu(t, l) = std::sqrt(row_max * block_max);
    }
  }
  return mu;
}

//! max ||P_Wt U z||^2 over z in {-1, 0, 1}^N with at most k_l nonzeros in T_l.
RealVector relative_sparsity_oracle(ComplexMatrix const &U, LevelScheme const &W, LevelScheme const &T,
                                    std::vector<t_index> const &k) {
  t_index const n = U.cols();
  auto const owner = T.level_of();
  RealVector best = RealVector::Zero(W.r());
  t_index total = 1;
  for(t_index i = 0; i < n; ++i)
    total *= 3;
  for(t_index code = 0; code < total; ++code) {
    RealVector z(n);
    std::vector<t_index> used(T.r(), 0);
    t_index c = code;
    for(t_index i = 0; i < n; ++i, c /= 3) {
      z(i) = double(c % 3) - 1;
      if(z(i) != 0)
        ++used[owner[i]];
    }
    bool ok = true;
    for(t_index l = 0; l < T.r(); ++l)
      ok = ok && used[l] <= k[l];
    if(!ok)
      continue;
    ComplexVector const v = U * z.cast<t_complex>();
    for(t_index t = 0; t < W.r(); ++t) {
      double e = 0;
      for(auto const i : W.levels[t])
        e += std::norm(v(i));
      best(t) = std::max(best(t), e);
    }
  }
  return best;
}

LevelScheme one_level(t_index n) {
  LevelScheme s;
  s.N = n;
  s.boundaries = {n};
  s.levels.resize(1);
  for(t_index i = 0; i < n; ++i)
    s.levels[0].push_back(i);
  return s;
}

} // namespace

TEST_CASE("cross gram is the dense product") {
  for(t_index n : {4, 8, 16}) {
    ComplexMatrix const expected = oracle::dft_matrix(n) * oracle::haar_matrix(n).transpose().cast<t_complex>();
    CHECK((cross_gram(Basis::dft, Basis::dhw, n) - expected).norm() < 1e-12);
    CHECK((cross_gram(Basis::dft, Basis::dft, n) - ComplexMatrix::Identity(n, n)).norm() == 0);
  }
}

TEST_CASE("dft against itself gives a Kronecker delta") {
  auto const W = build_dft_levels(64, 3);
  auto const mu = local_coherence(Basis::dft, Basis::dft, W, W);
  REQUIRE(mu.values.rows() == 8);
  for(t_index t = 0; t < 8; ++t)
    for(t_index l = 0; l < 8; ++l)
      CHECK(mu.values(t, l) == (t == l ? 1.0 : 0.0));
}

TEST_CASE("dft against haar at N = 8 matches the dense oracle") {
  t_index const n = 8;
  auto const W = build_dhw_sampling_levels(n);
  auto const T = build_dhw_sparsity_levels(n);
  ComplexMatrix const U = oracle::dft_matrix(n) * oracle::haar_matrix(n).transpose().cast<t_complex>();
  auto const mu = local_coherence(Basis::dft, Basis::dhw, W, T);
  RealMatrix const expected = local_coherence_oracle(U, W, T);
  CHECK((mu.values - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((local_coherence(U, W, T) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single level reduces to global coherence") {
  for(t_index n : {8, 32}) {
    auto const L = one_level(n);
    auto const mu = local_coherence(Basis::dft, Basis::dhw, L, L);
    REQUIRE(mu.values.rows() == 1);
    CHECK(mu.values(0, 0) == doctest::Approx(coherence(cross_gram(Basis::dft, Basis::dhw, n))).epsilon(1e-14));
  }
}

TEST_CASE("coherence entries are at most 1 and every row reaches 1/N") {
  // single blocks can fall below 1/N, only the row maximum is bounded below
  for(t_index n : {8, 64, 256}) {
    auto const W = build_dhw_sampling_levels(n);
    auto const T = build_dhw_sparsity_levels(n);
    auto const mu = local_coherence(Basis::dft, Basis::dhw, W, T);
    for(t_index t = 0; t < mu.values.rows(); ++t) {
      CHECK(mu.values.row(t).minCoeff() >= 0);
      CHECK(mu.values.row(t).maxCoeff() <= 1 + 1e-12);
      CHECK(mu.values.row(t).maxCoeff() >= 1.0 / double(n) - 1e-12);
    }
    CHECK(mu.values.maxCoeff() <= 1 + 1e-12);
  }
}

TEST_CASE("haar local coherence decays away from the diagonal") {
  double worst = 0;
  for(t_index n : {8, 16, 32, 64, 128, 256}) {
    auto const W = build_dhw_sampling_levels(n);
    auto const T = build_dhw_sparsity_levels(n);
    auto const mu = local_coherence(Basis::dft, Basis::dhw, W, T);
    for(t_index t = 0; t < W.r(); ++t)
      for(t_index l = 0; l < T.r(); ++l)
        worst = std::max(worst, double(W.size(t)) * mu.values(t, l) / std::pow(2.0, -std::abs(double(t - l)) / 2));
  }
  MESSAGE("max |W_t| mu_tl 2^(|t-l|/2) over N <= 256: " << worst);
  CHECK(worst < 8);
}

TEST_CASE("relative sparsity on the identity") {
  t_index const n = 8;
  auto const T = build_dhw_sparsity_levels(n);
  ComplexMatrix const I = ComplexMatrix::Identity(n, n);
  std::vector<t_index> const k{1, 5, 3};
  auto const K = relative_sparsity_bruteforce(I, T, T, k);
  CHECK(K(0) == 1);
  CHECK(K(1) == 2);
  CHECK(K(2) == 3);
}

TEST_CASE("relative sparsity in the dft case") {
  for(int q : {1, 2}) {
    auto const W = build_dft_levels(16, q);
    ComplexMatrix const U = cross_gram(Basis::dft, Basis::dft, 16);
    std::vector<t_index> k(W.r(), 0);
    k[0] = 2;
    k[1] = 1;
    for(auto order : {EnumerationOrder::supports_then_signs, EnumerationOrder::ternary_scan}) {
      RelativeSparsityOptions options;
      options.order = order;
      options.enumeration_cap = 5e7;
      auto const K = relative_sparsity_bruteforce(U, W, W, k, options);
      for(t_index t = 0; t < W.r(); ++t)
        CHECK(K(t) == doctest::Approx(double(std::min(k[t], W.size(t)))).epsilon(1e-12));
    }
  }
}

TEST_CASE("relative sparsity of dft against haar at N = 8") {
  t_index const n = 8;
  auto const W = build_dhw_sampling_levels(n);
  auto const T = build_dhw_sparsity_levels(n);
  ComplexMatrix const U = cross_gram(Basis::dft, Basis::dhw, n);
  std::vector<t_index> const k{1, 1, 0};
  RelativeSparsityOptions a, b;
  a.order = EnumerationOrder::supports_then_signs;
  b.order = EnumerationOrder::ternary_scan;
  auto const Ka = relative_sparsity_bruteforce(U, W, T, k, a);
  auto const Kb = relative_sparsity_bruteforce(U, W, T, k, b);
  auto const expected = relative_sparsity_oracle(U, W, T, k);
  CHECK((Ka - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((Kb - expected).cwiseAbs().maxCoeff() < 1e-12);
  // complex phases can only widen the search
  RelativeSparsityOptions c;
  c.complex_phases = true;
  auto const Kc = relative_sparsity_bruteforce(U, W, T, k, c);
  for(t_index t = 0; t < W.r(); ++t)
    CHECK(Kc(t) >= Ka(t) - 1e-12);
}

TEST_CASE("relative sparsity enforces its cap") {
  ComplexMatrix const U = ComplexMatrix::Identity(32, 32);
  auto const T = build_dhw_sparsity_levels(32);
  CHECK_THROWS_AS(relative_sparsity_bruteforce(U, T, T, {1, 1, 1, 1, 1}), EnumerationCapError);
  RelativeSparsityOptions tiny;
  tiny.enumeration_cap = 10;
  auto const T8 = build_dhw_sparsity_levels(8);
  CHECK_THROWS_AS(relative_sparsity_bruteforce(ComplexMatrix::Identity(8, 8), T8, T8, {2, 2, 4}, tiny),
                  EnumerationCapError);
}

TEST_CASE("haar budget") {
  t_index const n = 1024;
  auto const W = build_dhw_sampling_levels(n);
  auto const zero = budget_dhw(std::vector<t_index>(10, 0), n, std::exp(-1.0));
  CHECK(zero.total == 0);
  for(auto const m : zero.m)
    CHECK(m == 0);

  std::vector<t_index> k(10, 0);
  k[2] = 2;
  auto const b = budget_dhw(k, n, std::exp(-1.0));
  CHECK(b.K == 2);
  // log(K / eps) = log(2e) = 1 + log 2
  double const logs = (1 + std::log(2.0)) * std::log(1024.0);
  for(t_index t = 0; t < 10; ++t) {
    double const raw = std::ceil(2 * std::pow(2.0, -std::abs(double(t - 2)) / 2) * logs);
    CHECK(b.m[t] == std::min<t_index>(W.size(t), t_index(raw)));
  }
  // at t = 3: ceil(2 (1 + log 2) log 1024) = 24, clamped to |W_3| = 4
  CHECK(b.m[2] == 4);

  auto const doubled = budget_dhw(k, n, std::exp(-1.0), 2);
  for(t_index t = 0; t < 10; ++t)
    CHECK(doubled.m[t] >= b.m[t]);
  auto bigger = k;
  bigger[5] = 7;
  auto const more = budget_dhw(bigger, n, std::exp(-1.0));
  for(t_index t = 0; t < 10; ++t)
    CHECK(more.m[t] >= b.m[t]);
  for(t_index t = 0; t < 10; ++t)
    CHECK(more.m[t] <= W.size(t));

  CHECK_THROWS_AS(budget_dhw(k, n, 0.5), DomainError);
  k[0] = 3;
  CHECK_THROWS_AS(budget_dhw(k, n, 0.1), DomainError);
}

TEST_CASE("dft budget") {
  auto const W = build_dft_levels(1024, 6);
  std::vector<t_index> k(64, 0);
  for(int t = 0; t < 6; ++t)
    k[t] = 3;
  auto const b = budget_dft(k, W);
  CHECK(b.total == 96);
  CHECK(double(b.total) / 1024 == doctest::Approx(0.09375));
  CHECK(budget_dft(std::vector<t_index>(64, 0), W, 2).total == 128);
  CHECK(budget_dft(std::vector<t_index>(64, 1), W).total == 1024);
  k[0] = 17;
  CHECK_THROWS_AS(budget_dft(k, W), DomainError);
}

TEST_CASE("measurement bound check") {
  t_index const n = 64;
  auto const W = build_dft_levels(n, 2);
  auto const mu = local_coherence(Basis::dft, Basis::dft, W, W);
  std::vector<t_index> const k{3, 0, 0, 0};
  RealVector const K = (RealVector(4) << 3, 0, 0, 0).finished();
  auto const sizes = W.sizes();
  std::vector<t_real> const m_hat{16, 1, 1, 1};
  auto const full = check_measurement_bounds(mu.values, K, sizes, {16, 1, 1, 1}, m_hat, k, n, std::exp(-1.0), 0.01);
  CHECK(full.satisfied);
  auto const starved = check_measurement_bounds(mu.values, K, sizes, {1, 1, 1, 1}, m_hat, k, n, std::exp(-1.0), 1);
  CHECK_FALSE(starved.satisfied);
  CHECK_FALSE(starved.per_level[0]);
}

TEST_CASE("error bound parameters") {
  auto const vds = error_bound_params(Approach::initial_vds, 64, 1024, 16, 4);
  CHECK(vds.alpha == doctest::Approx(2));
  CHECK(vds.beta1 == doctest::Approx(1));
  CHECK(vds.beta2 == doctest::Approx(4));

  auto const full = error_bound_params(Approach::mls_this_work, 256, 256, 1, 0, 1.5);
  CHECK(full.alpha == doctest::Approx(1));
  CHECK(full.beta1 == doctest::Approx(1.5));
  CHECK(full.beta2 == doctest::Approx(1.5));

  double previous = 0;
  for(t_index m = 8; m <= 256; m += 8) {
    auto const p = error_bound_params(Approach::mls_this_work, m, 256, 64, 0);
    CHECK(p.beta2 > previous);
    previous = p.beta2;
  }
  CHECK_THROWS_AS(error_bound_params(Approach::initial_vds, 64, 1024, 16, 0), DomainError);
  CHECK_THROWS_AS(error_bound_params(Approach::mls_this_work, 0, 1024, 16, 1), DomainError);
}

TEST_CASE("coherence json") {
  auto const W = build_dft_levels(16, 1);
  auto const j = to_json(local_coherence(Basis::dft, Basis::dft, W, W));
  CHECK(j.at("r") == 2);
  CHECK(j.at("values")[0][0].get<double>() == 1.0);
  CHECK(j.at("values")[0][1].get<double>() == 0.0);
}
