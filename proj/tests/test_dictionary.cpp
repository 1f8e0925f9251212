#include "oracle.hpp"

#include "cifti/dictionary.hpp"
#include "cifti/rng.hpp"
#include "cifti/transforms.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using namespace cifti;

TEST_CASE("parse a small dictionary with a wavelength grid") {
  std::istringstream in("wavelength_nm,dyeA,\"dye, B\"\n"
                        "500,0,1\n"
                        "510,1,-0.01\n"
                        "520,0.5,0.5\n"
                        "530,0,0\n");
  auto const d = parse_dictionary(in, 4);
  CHECK(d.size() == 2);
  CHECK(d.bands() == 4);
  CHECK(d.names == std::vector<std::string>{"dyeA", "dye, B"});
  CHECK(d.clamped == 1);
  REQUIRE(d.wavelengths_nm);
  CHECK((*d.wavelengths_nm)(0) == doctest::Approx(500));
  CHECK((*d.wavelengths_nm)(3) == doctest::Approx(530));
  CHECK(d.H.minCoeff() >= 0);
  // the grid already matches the target, so samples pass through
  CHECK(d.H(1, 0) == doctest::Approx(1));
  CHECK(d.H(1, 1) == doctest::Approx(0));
}

TEST_CASE("parse resamples linearly") {
  std::istringstream in("a\n0\n1\n2\n");
  auto const d = parse_dictionary(in, 8);
  CHECK(d.size() == 1);
  for(t_index i = 0; i < 8; ++i)
    CHECK(d.H(i, 0) == doctest::Approx(2.0 * double(i) / 7));
  CHECK_FALSE(d.wavelengths_nm);
}

TEST_CASE("single constant spectrum") {
  std::istringstream in("flat\n0.7\n0.7\n0.7\n");
  auto const d = parse_dictionary(in, 16);
  CHECK(d.size() == 1);
  CHECK((d.H.col(0).array() - 0.7).abs().maxCoeff() < 1e-14);
}

TEST_CASE("a 38-column dictionary") {
  std::ostringstream csv;
  csv << "nm";
  for(int c = 0; c < 38; ++c)
    csv << ",dye" << c;
  csv << '\n';
  for(int i = 0; i < 301; ++i) {
    csv << 400 + i;
    for(int c = 0; c < 38; ++c)
      csv << ',' << std::exp(-0.5 * std::pow((i - 5.0 * c - 50) / 12.0, 2));
    csv << '\n';
  }
  std::istringstream in(csv.str());
  auto const d = parse_dictionary(in, 1024);
  CHECK(d.size() == 38);
  CHECK(d.bands() == 1024);
}

TEST_CASE("malformed dictionaries are rejected") {
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_dictionary(empty, 8), ParseError);
  std::istringstream header_only("a,b\n");
  CHECK_THROWS_AS(parse_dictionary(header_only, 8), ParseError);
  std::istringstream ragged("a,b\n1,2\n3\n");
  CHECK_THROWS_AS(parse_dictionary(ragged, 8), ParseError);
  std::istringstream text("a\n1\nx\n");
  CHECK_THROWS_AS(parse_dictionary(text, 8), ParseError);
  std::istringstream zeros("a,b\n0,1\n0,2\n");
  CHECK_THROWS_AS(parse_dictionary(zeros, 8), DomainError);
  std::istringstream backwards("nm,a\n510,1\n500,2\n");
  CHECK_THROWS_AS(parse_dictionary(backwards, 8), ParseError);
  CHECK_THROWS_AS(load_dictionary("/nonexistent/dictionary.csv", 8), IoError);
}

TEST_CASE("synthetic dictionary") {
  auto const a = synth_dictionary(38, 1024, 11);
  auto const b = synth_dictionary(38, 1024, 11);
  CHECK(a.H == b.H);
  CHECK(a.names == b.names);
  CHECK(a.size() == 38);
  for(t_index c = 0; c < a.size(); ++c) {
    CHECK(a.H.col(c).minCoeff() >= 0);
    CHECK(a.H.col(c).maxCoeff() == doctest::Approx(1).epsilon(1e-15));
  }
  CHECK_FALSE(synth_dictionary(38, 1024, 12).H == a.H);
}

TEST_CASE("energy support") {
  RealVector v(4);
  v << 3, 0, 4, 0;
  CHECK(energy_support(v, 0.8) == std::vector<t_index>{2});
  CHECK(energy_support(v, 0.81).size() == 2);
  CHECK(energy_support(v, 0).empty());
  CHECK(energy_support(v, 1) == std::vector<t_index>{2, 0});
  RealVector tie(3);
  tie << 1, 1, 1;
  CHECK(energy_support(tie, 0.5) == std::vector<t_index>{0});
  CHECK_THROWS_AS(energy_support(v, 1.5), DomainError);
}

TEST_CASE("hand-computable profile") {
  // one spectrum whose Haar coefficients are (3, 0, 4, 0)
  RealVector s(4);
  s << 3, 0, 4, 0;
  SpectralDictionary d;
  d.H = dhw_inverse(s);
  d.names = {"h"};
  auto const T = build_dhw_sparsity_levels(4);
  auto const p = estimate_profile(d, Basis::dhw, T, 0.8);
  CHECK(p.kept == std::vector<t_index>{1});
  CHECK(p.k == std::vector<t_index>{0, 1});
  CHECK(p.r0 == 2);
  CHECK(p.ratios() == std::vector<t_real>{0, 0.5});
}

TEST_CASE("profile properties on a synthetic dictionary") {
  auto const d = synth_dictionary(16, 256, 3);
  for(auto const psi : {Basis::dhw, Basis::dft}) {
    auto const T = psi == Basis::dft ? build_dft_levels(256, 4) : build_dhw_sparsity_levels(256);
    auto const zero = estimate_profile(d, psi, T, 0);
    for(auto const k : zero.k)
      CHECK(k == 0);
    CHECK(zero.r0 == 0);

    auto const full = estimate_profile(d, psi, T, 1);
    for(t_index i = 0; i < d.size(); ++i) {
      RealVector const mags = analyse(psi, RealVector(d.H.col(i))).cwiseAbs();
      t_index support = 0;
      for(auto const m : mags)
        support += m > 1e-12 * mags.norm();
      t_index sum = 0;
      for(auto const k : full.per_fluorochrome[i])
        sum += k;
      CHECK(sum == support);
    }

    std::vector<t_real> const grid{0.5, 0.9, 0.93, 0.96, 0.99, 0.999};
    std::vector<t_index> previous(T.r(), 0);
    for(auto const rho : grid) {
      auto const p = estimate_profile(d, psi, T, rho);
      t_index total = 0;
      for(t_index l = 0; l < T.r(); ++l) {
        CHECK(p.k[l] >= previous[l]);
        CHECK(p.k[l] <= T.size(l));
        total += p.k[l];
      }
      CHECK(total >= *std::max_element(p.kept.begin(), p.kept.end()));
      previous = p.k;
    }

    // scaling a column leaves its per-level counts unchanged
    SpectralDictionary scaled = d;
    scaled.H.col(2) *= 37.5;
    scaled.H.col(5) *= 1e-3;
    auto const a = estimate_profile(d, psi, T, 0.96);
    auto const b = estimate_profile(scaled, psi, T, 0.96);
    CHECK(a.per_fluorochrome == b.per_fluorochrome);
  }
}

TEST_CASE("dft profile concentrates in low levels") {
  auto const d = synth_dictionary(38, 1024, 7);
  auto const p = estimate_profile(d, Basis::dft, build_dft_levels(1024, 6), 0.99);
  MESSAGE("r0 of the synthetic 38-dye dictionary at rho = 0.99: " << p.r0);
  CHECK(p.r0 >= 1);
  CHECK(p.r0 <= 8);
  CHECK(p.r0 == 2);
}

TEST_CASE("linear mixing") {
  auto const d = synth_dictionary(5, 64, 2);
  RealMatrix G = RealMatrix::Zero(5, 3);
  G(0, 0) = 1;
  auto const v = lmm_mix(d, G);
  CHECK(v.X.col(0) == d.H.col(0));
  CHECK(v.X.col(1).isZero(0));
  G(1, 1) = -0.1;
  CHECK_THROWS_AS(lmm_mix(d, G), DomainError);
  CHECK_THROWS_AS(lmm_mix(d, RealMatrix::Zero(4, 1)), DimensionError);
}

TEST_CASE("mixtures stay inside the union of supports") {
  // columns with sparse, partly overlapping Haar supports
  t_index const n = 64;
  SpectralDictionary d;
  d.H.resize(n, 4);
  Rng rng(5);
  std::set<t_index> union_support;
  for(t_index c = 0; c < 4; ++c) {
    RealVector s = RealVector::Zero(n);
    for(int e = 0; e < 6; ++e) {
      auto const at = static_cast<t_index>(rng.index(n));
      s(at) = rng.uniform(0.5, 1.5);
      union_support.insert(at);
    }
    d.H.col(c) = dhw_inverse(s);
  }
  for(int trial = 0; trial < 100; ++trial) {
    RealVector g(4);
    for(auto &x : g)
      x = rng.uniform();
    RealVector const mix = dhw_forward(lmm_mix(d, g).X.col(0));
    for(t_index i = 0; i < n; ++i)
      if(std::abs(mix(i)) > 1e-10)
        CHECK(union_support.count(i) == 1);
  }

  // and for a smooth dictionary in both bases
  auto const smooth = synth_dictionary(6, n, 9);
  for(auto const psi : {Basis::dhw, Basis::dft}) {
    std::set<t_index> support;
    for(t_index c = 0; c < smooth.size(); ++c) {
      auto const coeffs = analyse(psi, RealVector(smooth.H.col(c)));
      for(t_index i = 0; i < n; ++i)
        if(std::abs(coeffs(i)) > 1e-10)
          support.insert(i);
    }
    for(int trial = 0; trial < 100; ++trial) {
      RealVector g(6);
      for(auto &x : g)
        x = rng.uniform();
      auto const coeffs = analyse(psi, RealVector(smooth.H * g));
      for(t_index i = 0; i < n; ++i)
        if(std::abs(coeffs(i)) > 1e-10)
          CHECK(support.count(i) == 1);
    }
  }
}

TEST_CASE("profile json") {
  auto const d = synth_dictionary(3, 32, 1);
  auto const p = estimate_profile(d, Basis::dft, build_dft_levels(32, 2), 0.9);
  auto const j = to_json(p);
  CHECK(j.at("r") == 4);
  CHECK(j.at("k").get<std::vector<t_index>>() == p.k);
  CHECK(j.at("psi") == "dft");
}
