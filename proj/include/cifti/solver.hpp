#ifndef CIFTI_SOLVER_HPP
#define CIFTI_SOLVER_HPP

#include "cifti/sampling.hpp"
#include "cifti/types.hpp"

#include <string>
#include <vector>

namespace cifti {

struct SolverOptions {
  t_index max_iter = 20000;
  //! Relative slack allowed on the fidelity constraint.
  t_real feas_tol = 1e-6;
  //! Relative fixed-point residual at which iterations stop.
  t_real opt_tol = 1e-6;
  //! Douglas-Rachford step, relative to the RMS of the zero-filled coefficients.
  t_real step = 0.5;
};

enum class SolverStatus { converged, max_iter, infeasible_tolerance };

std::string_view to_string(SolverStatus status);

struct SolverResult {
  RealVector u;
  //! ||Psi* u||_1
  t_real objective = 0;
  //! ||D (y - P_Omega Phi* u)||
  t_real residual = 0;
  t_index iterations = 0;
  SolverStatus status = SolverStatus::max_iter;
  //! Smallest achievable weighted residual over real u.
  t_real distance_to_range = 0;
  //! Radius actually enforced after the tau = 0 relaxation.
  t_real tau_effective = 0;
  std::string diagnostics;
};

//! min ||Psi* u||_1 s.t. ||D (y - P_Omega Phi* u)|| <= tau, u real.
struct BpdnProblem {
  ComplexVector y;
  SamplingPattern pattern;
  Basis psi = Basis::dhw;
  Basis phi = Basis::dft;
  t_real tau = 0;
};

//! Weighted basis-pursuit denoising for one fixed sampling pattern.
//!
//! A real unknown observed through complex Fourier rows only sees the real
//! orthonormal Fourier coordinates r = R u, so the fidelity term is an
//! axis-aligned weighted quadratic in r. The solver runs Douglas-Rachford
//! splitting in the sparsity coordinates s = Psi* u, alternating the l1 prox
//! (grouped over conjugate pairs for the DFT basis) with the exact projection
//! onto that ellipsoid. The pattern geometry is set up once; solve() is const
//! and may be called concurrently.
class BpdnSolver {
public:
  BpdnSolver(SamplingPattern pattern, Basis psi, SolverOptions options = {});

  SolverResult solve(ComplexVector const &y, t_real tau) const;

  SamplingPattern const &pattern() const { return pattern_; }
  Basis psi() const { return psi_; }
  SolverOptions const &options() const { return options_; }

private:
  struct Contribution {
    t_index first;
    t_index second; //!< -1 for DC and Nyquist rows
    t_real sign;    //!< sign of the imaginary part in the second coordinate
  };
  struct Fidelity {
    RealVector centre;
    t_real radius2 = 0;
    t_real offset = 0;
    t_real norm_dy = 0;
  };

  Fidelity fidelity(ComplexVector const &y) const;
  RealVector to_fourier(RealVector const &s) const;
  RealVector from_fourier(RealVector const &r) const;
  void project(RealVector &s, Fidelity const &fid) const;
  void shrink(RealVector &s, t_real threshold) const;
  t_real group_l1(RealVector const &s) const;

  SamplingPattern pattern_;
  Basis psi_;
  SolverOptions options_;
  t_index n_;
  std::vector<Contribution> rows_;
  //! Accumulated weight of every Fourier coordinate.
  RealVector curvature_;
  std::vector<t_index> observed_;
};

SolverResult solve_bpdn(BpdnProblem const &problem, SolverOptions const &options = {});

//! ||D (y - P_Omega Phi* u)|| recomputed from u with a forward DFT.
t_real residual_check(RealVector const &u, BpdnProblem const &problem);
t_real residual_check(RealVector const &u, ComplexVector const &y, SamplingPattern const &pattern);

//! ||Psi* u||_1 with complex magnitudes for the DFT basis.
t_real sparsity_l1(RealVector const &u, Basis psi);

//! P_Omega Phi* x: the noiseless Fourier rows of a real signal.
ComplexVector measure(RealVector const &x, SamplingPattern const &pattern);

} // namespace cifti

#endif
