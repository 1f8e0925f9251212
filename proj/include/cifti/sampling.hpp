#ifndef CIFTI_SAMPLING_HPP
#define CIFTI_SAMPLING_HPP

#include "cifti/levels.hpp"
#include "cifti/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace cifti {

enum class PatternKind { mls, vds, nyquist };

std::string_view to_string(PatternKind kind);
PatternKind parse_pattern_kind(std::string_view name);

//! Selected OPD rows (0-based storage indices) with their fidelity weights.
struct SamplingPattern {
  PatternKind kind = PatternKind::nyquist;
  t_index N = 0;
  std::uint64_t seed = 0;
  //! Selected rows; level by level and ascending within a level for mls, draw order for vds.
  std::vector<t_index> omega;
  //! Diagonal of D aligned with omega.
  RealVector weights;
  //! Per-level counts (mls only).
  std::vector<t_index> m;
  //! alpha * sqrt(N_p): sqrt(M/N) for mls and nyquist, sqrt(M) for vds.
  t_real alpha_factor = 1;

  t_index size() const { return static_cast<t_index>(omega.size()); }
};

//! m_t distinct rows drawn uniformly without replacement inside each level W_t.
SamplingPattern sample_mls(LevelScheme const &W, std::vector<t_index> const &m, std::uint64_t seed);

//! M rows drawn i.i.d. from p(i) ~ min(1, 1/|f(i)|), duplicates kept, weights p^(-1/2).
SamplingPattern sample_vds(t_index n, t_index m_xi, std::uint64_t seed);

//! Every row, unit weights.
SamplingPattern nyquist_pattern(t_index n);

//! Normalised variable-density pmf over storage indices.
RealVector vds_pmf(t_index n);

//! min(N, ceil(C K log^3 K log^2 N)).
t_index vds_budget(t_index K, t_index n, t_real C = 1);

//! Spends M samples on levels 1, 2, ... in order, each filled before the next.
std::vector<t_index> allocate_in_order(LevelScheme const &W, t_index m_xi);

//! Splits M samples proportionally to @p weights, capping each level at |W_t| and
//! redistributing the overflow; integer parts by largest remainder.
std::vector<t_index>
allocate_proportional(LevelScheme const &W, std::vector<t_real> const &weights, t_index m_xi);

//! Per-level factors sum_l 2^(-|t-l|/2) k_l of the Haar-sparsity budget.
std::vector<t_real> dhw_level_weights(std::vector<t_index> const &k);

//! 1 x N indicator of the selected rows.
std::vector<int> mask_row(SamplingPattern const &pattern);

nlohmann::json to_json(SamplingPattern const &pattern);
SamplingPattern pattern_from_json(nlohmann::json const &j);

} // namespace cifti

#endif
