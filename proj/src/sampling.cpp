#include "cifti/sampling.hpp"
#include "cifti/rng.hpp"
#include "cifti/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cifti {

std::string_view to_string(PatternKind kind) {
  switch(kind) {
  case PatternKind::mls:
    return "mls";
  case PatternKind::vds:
    return "vds";
  case PatternKind::nyquist:
    return "nyquist";
  }
  return "unknown";
}

PatternKind parse_pattern_kind(std::string_view name) {
  if(name == "mls")
    return PatternKind::mls;
  if(name == "vds")
    return PatternKind::vds;
  if(name == "nyquist")
    return PatternKind::nyquist;
  throw DomainError("unknown pattern kind '" + std::string(name) + "'");
}

SamplingPattern sample_mls(LevelScheme const &W, std::vector<t_index> const &m, std::uint64_t seed) {
  if(static_cast<t_index>(m.size()) != W.r())
    throw DimensionError("sample_mls: m must have one entry per level");
  SamplingPattern pattern;
  pattern.kind = PatternKind::mls;
  pattern.N = W.N;
  pattern.seed = seed;
  pattern.m = m;
  Rng rng(seed);
  for(t_index t = 0; t < W.r(); ++t) {
    if(m[t] < 0 || m[t] > W.size(t))
      throw DomainError("sample_mls: m_" + std::to_string(t + 1) + " = " + std::to_string(m[t])
                        + " outside [0, |W_t| = " + std::to_string(W.size(t)) + "]");
    std::vector<t_index> pool = W.levels[t];
    // partial Fisher-Yates: the first m_t slots become a uniform m_t-subset
    for(t_index i = 0; i < m[t]; ++i) {
      auto const j = i + static_cast<t_index>(rng.index(static_cast<std::uint64_t>(pool.size() - i)));
      std::swap(pool[i], pool[j]);
    }
    std::sort(pool.begin(), pool.begin() + m[t]);
    pattern.omega.insert(pattern.omega.end(), pool.begin(), pool.begin() + m[t]);
  }
  pattern.weights = RealVector::Ones(pattern.size());
  pattern.alpha_factor = std::sqrt(t_real(pattern.size()) / t_real(W.N));
  return pattern;
}

RealVector vds_pmf(t_index n) {
  require_power_of_two(n, "vds_pmf");
  RealVector p(n);
  for(t_index s = 0; s < n; ++s) {
    t_index const f = frequency_of(s, n);
    p(s) = f == 0 ? 1.0 : std::min(1.0, 1.0 / t_real(std::abs(f)));
  }
  return p / p.sum();
}

SamplingPattern sample_vds(t_index n, t_index m_xi, std::uint64_t seed) {
  if(m_xi < 1)
    throw DomainError("sample_vds: need at least one draw");
  RealVector const p = vds_pmf(n);
  std::vector<t_real> cumulative(n);
  std::partial_sum(p.data(), p.data() + n, cumulative.begin());
  SamplingPattern pattern;
  pattern.kind = PatternKind::vds;
  pattern.N = n;
  pattern.seed = seed;
  pattern.weights.resize(m_xi);
  Rng rng(seed);
  for(t_index d = 0; d < m_xi; ++d) {
    t_real const u = rng.uniform() * cumulative.back();
    auto const it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    auto const s = std::min<t_index>(n - 1, static_cast<t_index>(it - cumulative.begin()));
    pattern.omega.push_back(s);
    pattern.weights(d) = 1 / std::sqrt(p(s));
  }
  pattern.alpha_factor = std::sqrt(t_real(m_xi));
  return pattern;
}

SamplingPattern nyquist_pattern(t_index n) {
  require_power_of_two(n, "nyquist_pattern");
  SamplingPattern pattern;
  pattern.kind = PatternKind::nyquist;
  pattern.N = n;
  pattern.omega.resize(n);
  std::iota(pattern.omega.begin(), pattern.omega.end(), t_index(0));
  pattern.weights = RealVector::Ones(n);
  pattern.alpha_factor = 1;
  return pattern;
}

t_index vds_budget(t_index K, t_index n, t_real C) {
  if(K < 2)
    throw DomainError("vds_budget: K must be at least 2");
  if(!(C > 0))
    throw DomainError("vds_budget: C must be positive");
  t_real const lk = std::log(t_real(K));
  t_real const ln = std::log(t_real(n));
  t_real const raw = std::ceil(C * t_real(K) * lk * lk * lk * ln * ln);
  return raw >= t_real(n) ? n : static_cast<t_index>(raw);
}

std::vector<t_index> allocate_in_order(LevelScheme const &W, t_index m_xi) {
  if(m_xi < 0 || m_xi > W.N)
    throw DomainError("allocate_in_order: budget outside [0, N]");
  std::vector<t_index> m(W.r(), 0);
  t_index remaining = m_xi;
  for(t_index t = 0; t < W.r() && remaining > 0; ++t) {
    m[t] = std::min(remaining, W.size(t));
    remaining -= m[t];
  }
  return m;
}

std::vector<t_index>
allocate_proportional(LevelScheme const &W, std::vector<t_real> const &weights, t_index m_xi) {
  if(static_cast<t_index>(weights.size()) != W.r())
    throw DimensionError("allocate_proportional: one weight per level required");
  if(m_xi < 0 || m_xi > W.N)
    throw DomainError("allocate_proportional: budget outside [0, N]");
  t_index const r = W.r();
  std::vector<t_index> m(r, 0);
  std::vector<bool> capped(r, false);
  t_index remaining = m_xi;
  // water-filling: saturate levels whose proportional share exceeds their size
  while(true) {
    t_real total = 0;
    for(t_index t = 0; t < r; ++t)
      if(!capped[t])
        total += std::max(weights[t], t_real(0));
    if(!(total > 0))
      break;
    bool changed = false;
    for(t_index t = 0; t < r; ++t) {
      if(capped[t])
        continue;
      t_real const share = t_real(remaining) * std::max(weights[t], t_real(0)) / total;
      if(share >= t_real(W.size(t))) {
        capped[t] = true;
        m[t] = W.size(t);
        remaining -= m[t];
        changed = true;
      }
    }
    if(changed)
      continue;
    std::vector<t_real> fraction(r, -1);
    t_index assigned = 0;
    for(t_index t = 0; t < r; ++t) {
      if(capped[t])
        continue;
      t_real const share = t_real(remaining) * std::max(weights[t], t_real(0)) / total;
      m[t] = static_cast<t_index>(std::floor(share));
      fraction[t] = share - std::floor(share);
      assigned += m[t];
    }
    std::vector<t_index> order(r);
    std::iota(order.begin(), order.end(), t_index(0));
    std::stable_sort(order.begin(), order.end(),
                     [&](t_index a, t_index b) { return fraction[a] > fraction[b]; });
    for(auto const t : order) {
      if(assigned == remaining)
        break;
      if(capped[t] || m[t] >= W.size(t))
        continue;
      ++m[t];
      ++assigned;
    }
    remaining -= assigned;
    break;
  }
  // leftovers (zero weights everywhere else) fill levels in order
  for(t_index t = 0; t < r && remaining > 0; ++t) {
    t_index const extra = std::min(remaining, W.size(t) - m[t]);
    m[t] += extra;
    remaining -= extra;
  }
  return m;
}

std::vector<t_real> dhw_level_weights(std::vector<t_index> const &k) {
  auto const r = static_cast<t_index>(k.size());
  std::vector<t_real> weights(r, 0);
  for(t_index t = 0; t < r; ++t)
    for(t_index l = 0; l < r; ++l)
      weights[t] += std::pow(2.0, -std::abs(t_real(t - l)) / 2) * t_real(k[l]);
  return weights;
}

std::vector<int> mask_row(SamplingPattern const &pattern) {
  std::vector<int> mask(pattern.N, 0);
  for(auto const s : pattern.omega)
    mask[s] = 1;
  return mask;
}

nlohmann::json to_json(SamplingPattern const &pattern) {
  std::vector<t_index> omega(pattern.omega.size());
  std::transform(pattern.omega.begin(), pattern.omega.end(), omega.begin(),
                 [](t_index s) { return s + 1; });
  std::vector<t_real> weights(pattern.weights.data(), pattern.weights.data() + pattern.weights.size());
  return {{"kind", std::string(to_string(pattern.kind))},
          {"N", pattern.N},
          {"seed", pattern.seed},
          {"omega", omega},
          {"weights", weights},
          {"m", pattern.m},
          {"alpha_factor", pattern.alpha_factor}};
}

SamplingPattern pattern_from_json(nlohmann::json const &j) {
  SamplingPattern pattern;
  pattern.kind = parse_pattern_kind(j.at("kind").get<std::string>());
  pattern.N = j.at("N").get<t_index>();
  pattern.seed = j.value("seed", std::uint64_t(0));
  for(auto const &i : j.at("omega")) {
    auto const s = i.get<t_index>() - 1;
    if(s < 0 || s >= pattern.N)
      throw ParseError("pattern: omega index outside [1, N]");
    pattern.omega.push_back(s);
  }
  auto const weights = j.at("weights").get<std::vector<t_real>>();
  if(weights.size() != pattern.omega.size())
    throw ParseError("pattern: weights and omega differ in length");
  pattern.weights = Eigen::Map<RealVector const>(weights.data(), static_cast<t_index>(weights.size()));
  pattern.m = j.value("m", std::vector<t_index>{});
  pattern.alpha_factor = j.value("alpha_factor", 1.0);
  return pattern;
}

} // namespace cifti
