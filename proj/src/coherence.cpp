#include "cifti/coherence.hpp"
#include "cifti/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace cifti {

namespace {

ComplexVector synthesise(Basis basis, ComplexVector const &coefficients) {
  if(basis == Basis::dft)
    return dft_inverse_complex(coefficients);
  ComplexVector out(coefficients.size());
  out.real() = dhw_inverse(coefficients.real().eval());
  out.imag() = dhw_inverse(coefficients.imag().eval());
  return out;
}

ComplexVector analyse_complex(Basis basis, ComplexVector const &x) {
  if(basis == Basis::dft) {
    ComplexVector out = dft_forward(x.real().eval());
    out += t_complex(0, 1) * dft_forward(x.imag().eval());
    return out;
  }
  ComplexVector out(x.size());
  out.real() = dhw_forward(x.real().eval());
  out.imag() = dhw_forward(x.imag().eval());
  return out;
}

t_real binomial(t_index n, t_index k) {
  t_real result = 1;
  for(t_index i = 1; i <= k; ++i)
    result = result * t_real(n - k + i) / t_real(i);
  return result;
}

void require_same_n(LevelScheme const &W, LevelScheme const &T, t_index n) {
  if(W.N != n || T.N != n)
    throw DimensionError("level schemes and operator must share N");
}

} // namespace

ComplexMatrix cross_gram(Basis phi, Basis psi, t_index n) {
  require_power_of_two(n, "cross_gram");
  if(phi == psi)
    return ComplexMatrix::Identity(n, n);
  ComplexMatrix u(n, n);
  for(t_index j = 0; j < n; ++j) {
    ComplexVector e = ComplexVector::Zero(n);
    e(j) = 1;
    u.col(j) = analyse_complex(phi, synthesise(psi, e));
  }
  return u;
}

RealMatrix local_coherence(ComplexMatrix const &u, LevelScheme const &W, LevelScheme const &T) {
  if(u.rows() != u.cols())
    throw DimensionError("local_coherence: operator must be square");
  require_same_n(W, T, u.rows());
  RealMatrix const magnitude = u.cwiseAbs2();
  auto const column_level = T.level_of();
  RealMatrix result = RealMatrix::Zero(W.r(), T.r());
  for(t_index t = 0; t < W.r(); ++t) {
    t_real row_max = 0;
    std::vector<t_real> block_max(T.r(), 0);
    for(auto const i : W.levels[t])
      for(t_index j = 0; j < u.cols(); ++j) {
        t_real const v = magnitude(i, j);
        row_max = std::max(row_max, v);
        if(column_level[j] >= 0)
          block_max[column_level[j]] = std::max(block_max[column_level[j]], v);
      }
    for(t_index l = 0; l < T.r(); ++l)
      result(t, l) = std::sqrt(row_max * block_max[l]);
  }
  return result;
}

CoherenceMatrix
local_coherence(Basis phi, Basis psi, LevelScheme const &W, LevelScheme const &T) {
  if(W.N != T.N)
    throw DimensionError("local_coherence: schemes have different N");
  CoherenceMatrix out;
  out.values = local_coherence(cross_gram(phi, psi, W.N), W, T);
  out.phi = phi;
  out.psi = psi;
  out.W = W;
  out.T = T;
  return out;
}

RealVector relative_sparsity_bruteforce(ComplexMatrix const &u,
                                        LevelScheme const &W,
                                        LevelScheme const &T,
                                        std::vector<t_index> const &k,
                                        RelativeSparsityOptions const &options) {
  t_index const n = u.rows();
  if(u.cols() != n)
    throw DimensionError("relative_sparsity_bruteforce: operator must be square");
  require_same_n(W, T, n);
  if(static_cast<t_index>(k.size()) != T.r())
    throw DimensionError("relative_sparsity_bruteforce: k must have one entry per sparsity level");
  if(n > options.max_dimension)
    throw EnumerationCapError("relative_sparsity_bruteforce: N = " + std::to_string(n)
                              + " exceeds the oracle dimension limit");

  std::vector<t_index> k_eff(k.size());
  for(std::size_t l = 0; l < k.size(); ++l) {
    if(k[l] < 0)
      throw DomainError("relative_sparsity_bruteforce: negative sparsity");
    k_eff[l] = std::min(k[l], T.size(static_cast<t_index>(l)));
  }

  RealVector best = RealVector::Zero(W.r());
  auto score = [&](ComplexVector const &v) {
    for(t_index t = 0; t < W.r(); ++t) {
      t_real energy = 0;
      for(auto const i : W.levels[t])
        energy += std::norm(v(i));
      best(t) = std::max(best(t), energy);
    }
  };

  if(options.order == EnumerationOrder::ternary_scan) {
    if(options.complex_phases)
      throw DomainError("relative_sparsity_bruteforce: ternary scan supports real signs only");
    t_real const visits = std::pow(3.0, t_real(n));
    if(visits > options.enumeration_cap)
      throw EnumerationCapError("relative_sparsity_bruteforce: 3^N exceeds the enumeration cap");
    auto const owner = T.level_of();
    std::vector<int> digit(n, 0);
    std::vector<t_index> count(T.r(), 0);
    ComplexVector v = ComplexVector::Zero(n);
    // odometer over {0, +1, -1}^N with incremental updates of v and level counts
    while(true) {
      bool admissible = true;
      for(t_index l = 0; l < T.r(); ++l)
        admissible = admissible && count[l] <= k_eff[l];
      if(admissible)
        score(v);
      t_index pos = 0;
      while(pos < n) {
        int const old = digit[pos];
        int const now = (old + 1) % 3;
        digit[pos] = now;
        t_real const before = old == 0 ? 0 : (old == 1 ? 1 : -1);
        t_real const after = now == 0 ? 0 : (now == 1 ? 1 : -1);
        v += (after - before) * u.col(pos);
        if(owner[pos] >= 0) {
          count[owner[pos]] += (now != 0) - (old != 0);
        }
        if(now != 0)
          break;
        ++pos;
      }
      if(pos == n)
        break;
    }
    return best;
  }

  t_index const phases = options.complex_phases ? 4 : 2;
  t_real visits = 1;
  t_index K = 0;
  for(t_index l = 0; l < T.r(); ++l) {
    visits *= binomial(T.size(l), k_eff[l]);
    K += k_eff[l];
  }
  visits *= std::pow(t_real(phases), t_real(K));
  if(visits > options.enumeration_cap)
    throw EnumerationCapError("relative_sparsity_bruteforce: " + std::to_string(visits)
                              + " candidates exceed the enumeration cap");

  static t_complex const phase_values[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  std::vector<t_index> support;
  support.reserve(K);
  auto visit_signs = [&] {
    t_index const size = static_cast<t_index>(support.size());
    std::vector<int> digit(size, 0);
    while(true) {
      ComplexVector v = ComplexVector::Zero(n);
      for(t_index a = 0; a < size; ++a)
        v += phase_values[digit[a]] * u.col(support[a]);
      score(v);
      t_index pos = 0;
      while(pos < size && ++digit[pos] == phases)
        digit[pos++] = 0;
      if(pos == size)
        break;
    }
  };
  std::function<void(t_index, t_index, t_index)> choose = [&](t_index level, t_index start,
                                                               t_index remaining) {
    if(level == T.r()) {
      visit_signs();
      return;
    }
    if(remaining == 0) {
      t_index const next = level + 1;
      choose(next, 0, next < T.r() ? k_eff[next] : 0);
      return;
    }
    auto const &members = T.levels[level];
    for(t_index i = start; i + remaining <= static_cast<t_index>(members.size()); ++i) {
      support.push_back(members[i]);
      choose(level, i + 1, remaining - 1);
      support.pop_back();
    }
  };
  choose(0, 0, T.r() > 0 ? k_eff[0] : 0);
  return best;
}

MeasurementBudget budget_dhw(std::vector<t_index> const &k, t_index n, t_real eps, t_real C) {
  auto const T = build_dhw_sparsity_levels(n);
  auto const W = build_dhw_sampling_levels(n);
  if(static_cast<t_index>(k.size()) != T.r())
    throw DimensionError("budget_dhw: k must have log2(N) entries");
  if(!(eps > 0) || eps > std::exp(-1.0))
    throw DomainError("budget_dhw: eps must lie in (0, exp(-1)]");
  if(!(C > 0))
    throw DomainError("budget_dhw: C must be positive");
  MeasurementBudget budget;
  budget.C = C;
  budget.eps = eps;
  for(t_index l = 0; l < T.r(); ++l) {
    if(k[l] < 0 || k[l] > T.size(l))
      throw DomainError("budget_dhw: k_" + std::to_string(l + 1) + " outside [0, |T_l|]");
    budget.K += k[l];
  }
  budget.m.assign(W.r(), 0);
  if(budget.K == 0)
    return budget;
  t_real const logs = std::log(t_real(budget.K) / eps) * std::log(t_real(n));
  for(t_index t = 0; t < W.r(); ++t) {
    t_real weight = 0;
    for(t_index l = 0; l < T.r(); ++l)
      weight += std::pow(2.0, -std::abs(t_real(t - l)) / 2) * t_real(k[l]);
    t_real const raw = std::ceil(C * weight * logs);
    budget.m[t] = std::min(W.size(t), static_cast<t_index>(raw));
    budget.total += budget.m[t];
  }
  return budget;
}

MeasurementBudget budget_dft(std::vector<t_index> const &k, LevelScheme const &W, t_index floor_m) {
  if(W.kind != LevelKind::dft_symmetric)
    throw DomainError("budget_dft: sampling scheme must be dft-symmetric");
  if(static_cast<t_index>(k.size()) != W.r())
    throw DimensionError("budget_dft: k must have one entry per level");
  if(floor_m < 0)
    throw DomainError("budget_dft: negative floor");
  MeasurementBudget budget;
  budget.m.assign(W.r(), 0);
  for(t_index t = 0; t < W.r(); ++t) {
    if(k[t] < 0 || k[t] > W.size(t))
      throw DomainError("budget_dft: k_" + std::to_string(t + 1) + " outside [0, |W_t|]");
    budget.K += k[t];
    budget.m[t] = k[t] > 0 ? W.size(t) : std::min(floor_m, W.size(t));
    budget.total += budget.m[t];
  }
  return budget;
}

BoundCheck check_measurement_bounds(RealMatrix const &mu,
                                    RealVector const &relative_sparsity,
                                    std::vector<t_index> const &level_sizes,
                                    std::vector<t_index> const &m,
                                    std::vector<t_real> const &m_hat,
                                    std::vector<t_index> const &k,
                                    t_index n,
                                    t_real eps,
                                    t_real C) {
  auto const r = static_cast<t_index>(level_sizes.size());
  if(mu.rows() != r || mu.cols() != static_cast<t_index>(k.size())
     || relative_sparsity.size() != r || static_cast<t_index>(m.size()) != r
     || static_cast<t_index>(m_hat.size()) != r)
    throw DimensionError("check_measurement_bounds: inconsistent level counts");
  if(!(eps > 0) || eps > std::exp(-1.0))
    throw DomainError("check_measurement_bounds: eps must lie in (0, exp(-1)]");
  t_index K = 0;
  for(auto const kl : k)
    K += kl;
  BoundCheck check;
  check.per_level.assign(r, true);
  check.balance.assign(k.size(), true);
  t_real const logs = K > 0 ? std::log(t_real(K) / eps) * std::log(t_real(n)) : 0;
  for(t_index t = 0; t < r; ++t) {
    t_real weighted = 0;
    for(t_index l = 0; l < mu.cols(); ++l)
      weighted += mu(t, l) * t_real(k[l]);
    t_real const first = C * t_real(level_sizes[t]) * weighted * logs;
    t_real const second = C * m_hat[t] * logs;
    check.per_level[t] = t_real(m[t]) >= first && t_real(m[t]) >= second;
  }
  for(t_index l = 0; l < mu.cols(); ++l) {
    t_real sum = 0;
    for(t_index t = 0; t < r; ++t) {
      if(!(m_hat[t] > 0))
        throw DomainError("check_measurement_bounds: m_hat must be positive");
      sum += (t_real(level_sizes[t]) / m_hat[t] - 1) * mu(t, l) * relative_sparsity(t);
    }
    check.balance[l] = 1 >= C * sum;
  }
  check.satisfied = std::all_of(check.per_level.begin(), check.per_level.end(), [](bool b) { return b; })
                    && std::all_of(check.balance.begin(), check.balance.end(), [](bool b) { return b; });
  return check;
}

ErrorBoundParams
error_bound_params(Approach approach, t_index m_xi, t_index n_xi, t_index n_p, t_index K, t_real c) {
  if(m_xi <= 0 || n_xi <= 0 || n_p <= 0)
    throw DomainError("error_bound_params: sizes must be positive");
  ErrorBoundParams p;
  p.approach = approach;
  p.c = c;
  t_real const M = t_real(m_xi), N = t_real(n_xi), P = t_real(n_p);
  if(approach == Approach::initial_vds) {
    if(K <= 0)
      throw DomainError("error_bound_params: initial-vds needs K > 0");
    p.alpha = std::sqrt(M / P);
    p.beta1 = 2 / std::sqrt(t_real(K));
    p.beta2 = std::sqrt(P);
  } else {
    p.alpha = std::sqrt(M / (N * P));
    p.beta1 = c;
    p.beta2 = c * std::sqrt(M * P / N);
  }
  return p;
}

nlohmann::json to_json(CoherenceMatrix const &coherence) {
  nlohmann::json values = nlohmann::json::array();
  for(t_index t = 0; t < coherence.values.rows(); ++t) {
    nlohmann::json row = nlohmann::json::array();
    for(t_index l = 0; l < coherence.values.cols(); ++l)
      row.push_back(coherence.values(t, l));
    values.push_back(std::move(row));
  }
  return {{"r", coherence.values.rows()},
          {"phi", std::string(to_string(coherence.phi))},
          {"psi", std::string(to_string(coherence.psi))},
          {"N", coherence.W.N},
          {"values", std::move(values)}};
}

nlohmann::json to_json(MeasurementBudget const &budget) {
  return {{"r", budget.m.size()},
          {"m", budget.m},
          {"M_xi", budget.total},
          {"K", budget.K},
          {"eps", budget.eps},
          {"C", budget.C}};
}

} // namespace cifti
