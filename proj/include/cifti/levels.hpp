#ifndef CIFTI_LEVELS_HPP
#define CIFTI_LEVELS_HPP

#include "cifti/types.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace cifti {

enum class LevelKind { dhw_sparsity, dhw_sampling, dft_symmetric };

std::string_view to_string(LevelKind kind);
LevelKind parse_level_kind(std::string_view name);

//! Ordered partition of the 0-based storage indices [0, N) into r levels.
struct LevelScheme {
  t_index N = 0;
  LevelKind kind = LevelKind::dhw_sparsity;
  //! l_1..l_r for sparsity levels, n_1..n_r for sampling levels.
  std::vector<t_index> boundaries;
  //! Sorted 0-based storage indices of each level.
  std::vector<std::vector<t_index>> levels;

  t_index r() const { return static_cast<t_index>(levels.size()); }
  t_index size(t_index level) const { return static_cast<t_index>(levels[level].size()); }
  std::vector<t_index> sizes() const;
  //! Level (0-based) of every storage index; -1 where uncovered.
  std::vector<t_index> level_of() const;
};

//! Haar sparsity levels: T_1 = {1,2}, T_l = {2^(l-1)+1, ..., 2^l}.
LevelScheme build_dhw_sparsity_levels(t_index n);
//! Dyadic frequency annuli: W_1 = {0,1}, W_(t+1) = {-2^t+1..2^t} minus all previous levels.
LevelScheme build_dhw_sampling_levels(t_index n);
//! r = 2^q symmetric frequency bands of N/r indices; sampling levels equal sparsity levels.
LevelScheme build_dft_levels(t_index n, int q);

//! Human-readable list of violated scheme invariants; empty iff the scheme is valid.
std::vector<std::string> validate_scheme(LevelScheme const &scheme);

void to_json(nlohmann::json &j, LevelScheme const &scheme);
void from_json(nlohmann::json const &j, LevelScheme &scheme);

} // namespace cifti

#endif
