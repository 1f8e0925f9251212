#ifndef CIFTI_COHERENCE_HPP
#define CIFTI_COHERENCE_HPP

#include "cifti/levels.hpp"
#include "cifti/types.hpp"

#include <json.hpp>

#include <vector>

namespace cifti {

//! Dense N x N matrix Phi* Psi in centred-frequency / coefficient ordering.
ComplexMatrix cross_gram(Basis phi, Basis psi, t_index n);

//! mu(U) = max |U_ij|^2.
template <class Derived> t_real coherence(Eigen::MatrixBase<Derived> const &u) {
  return u.size() == 0 ? t_real(0) : t_real(u.cwiseAbs2().maxCoeff());
}

struct CoherenceMatrix {
  //! r x r local coherences mu_(t,l), rows indexed by sampling level.
  RealMatrix values;
  Basis phi = Basis::dft;
  Basis psi = Basis::dft;
  LevelScheme W;
  LevelScheme T;
};

//! Local coherence mu_(t,l) = sqrt(mu(P_Wt U) mu(P_Wt U P_Tl)) with U = Phi* Psi.
CoherenceMatrix
local_coherence(Basis phi, Basis psi, LevelScheme const &W, LevelScheme const &T);
//! Same, for an explicit isometry U.
RealMatrix local_coherence(ComplexMatrix const &u, LevelScheme const &W, LevelScheme const &T);

enum class EnumerationOrder { supports_then_signs, ternary_scan };

struct RelativeSparsityOptions {
  //! Largest number of candidate vectors the enumeration may visit.
  double enumeration_cap = 5e7;
  t_index max_dimension = 16;
  EnumerationOrder order = EnumerationOrder::supports_then_signs;
  //! Use phases {+-1, +-i} on the support instead of real signs.
  bool complex_phases = false;
};

//! Relative sparsities K_t by exhaustive search over level-sparse box vertices.
RealVector relative_sparsity_bruteforce(ComplexMatrix const &u,
                                        LevelScheme const &W,
                                        LevelScheme const &T,
                                        std::vector<t_index> const &k,
                                        RelativeSparsityOptions const &options = {});

struct MeasurementBudget {
  std::vector<t_index> m;
  t_index total = 0;
  //! Constant standing in for the hidden factor of the order bounds.
  t_real C = 1;
  t_real eps = 0;
  t_index K = 0;
};

//! Haar-sparsity budget m_t = min(|W_t|, ceil(C (sum_l 2^(-|t-l|/2) k_l) log(K/eps) log N)).
MeasurementBudget budget_dhw(std::vector<t_index> const &k, t_index n, t_real eps, t_real C = 1);

//! Fourier-sparsity budget: fully sample every level with k_t > 0, floor_m elsewhere.
MeasurementBudget
budget_dft(std::vector<t_index> const &k, LevelScheme const &W, t_index floor_m = 0);

//! Outcome of checking a budget against the general multilevel measurement conditions.
struct BoundCheck {
  //! Per sampling level t: both lower bounds on m_t hold.
  std::vector<bool> per_level;
  //! Per sparsity level l: the m_hat balance condition holds.
  std::vector<bool> balance;
  bool satisfied = false;
};

//! Checks m and m_hat against the general conditions for given coherences and
//! relative sparsities; "a >~ b" is read as a >= C b.
BoundCheck check_measurement_bounds(RealMatrix const &mu,
                                    RealVector const &relative_sparsity,
                                    std::vector<t_index> const &level_sizes,
                                    std::vector<t_index> const &m,
                                    std::vector<t_real> const &m_hat,
                                    std::vector<t_index> const &k,
                                    t_index n,
                                    t_real eps,
                                    t_real C = 1);

struct ErrorBoundParams {
  t_real alpha = 0;
  t_real beta1 = 0;
  t_real beta2 = 0;
  Approach approach = Approach::mls_this_work;
  t_real c = 1;
};

//! Constraint scaling and error-bound constants of each reconstruction approach.
ErrorBoundParams
error_bound_params(Approach approach, t_index m_xi, t_index n_xi, t_index n_p, t_index K, t_real c = 1);

nlohmann::json to_json(CoherenceMatrix const &coherence);
nlohmann::json to_json(MeasurementBudget const &budget);

} // namespace cifti

#endif
