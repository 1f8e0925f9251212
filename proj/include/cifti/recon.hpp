#ifndef CIFTI_RECON_HPP
#define CIFTI_RECON_HPP

#include "cifti/coherence.hpp"
#include "cifti/levels.hpp"
#include "cifti/sampling.hpp"
#include "cifti/solver.hpp"
#include "cifti/types.hpp"
#include "cifti/volume.hpp"

#include <json.hpp>

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace cifti {

enum class NoiseKind { none, gaussian_bounded };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view name);

struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  //! Volume-wide Nyquist noise budget; each pixel gets at most eps_nyq / sqrt(N_p).
  t_real eps_nyq = 0;
  std::uint64_t seed = 0;
};

//! Coded acquisition Y = P_Omega Phi* X + W, one column per pixel.
struct CiFtiMeasurements {
  ComplexMatrix Y;
  SamplingPattern pattern;
  t_real eps_nyq = 0;

  t_index pixels() const { return Y.cols(); }
};

//! N_xi x N_p complex Gaussian noise; columns drawn above eps/sqrt(N_p) are scaled onto it.
ComplexMatrix nyquist_noise(NoiseModel const &noise, t_index n_xi, t_index n_p);

CiFtiMeasurements
acquire(HSVolume const &volume, SamplingPattern const &pattern, NoiseModel const &noise = {});

struct ReconReport {
  //! ||x_j - xhat_j||^2 / ||x_j||^2 per pixel; empty without ground truth.
  std::vector<t_real> relative_errors;
  //! ||X - Xhat||_F over the stacked pixels; NaN without ground truth.
  t_real aggregate_error = std::numeric_limits<t_real>::quiet_NaN();
  std::vector<SolverStatus> statuses;
  std::vector<t_index> iterations;
  //! Fidelity radius alpha * eps_nyq used for every pixel.
  t_real tau = 0;
  t_real eps_nyq = 0;
  //! sigma_{k,T}(Psi* x_j) per pixel; empty unless computed by error_report.
  std::vector<t_real> sigma;
  std::optional<ErrorBoundParams> bound;
  //! beta1 * sum_j sigma_j + beta2 * eps_nyq, when bound and sigma are known.
  std::optional<t_real> bound_rhs;
  std::optional<bool> bound_holds;

  t_index failures() const;
  //! NaN when no errors are recorded.
  t_real median_relative_error() const;
};

struct ReconOptions {
  Basis psi = Basis::dft;
  Approach approach = Approach::mls_this_work;
  //! Universal constant of the mls error bound.
  t_real c = 1;
  //! Total sparsity K; needed only for the initial-vds bound constants.
  t_index sparsity = 0;
  SolverOptions solver;
  //! 0 uses every core.
  unsigned threads = 0;
};

struct Reconstruction {
  HSVolume X_hat;
  ReconReport report;
};

//! Pixel-wise l1 reconstruction; @p truth, when given, fills the error fields.
Reconstruction reconstruct(CiFtiMeasurements const &measurements, ReconOptions const &options = {},
                           HSVolume const *truth = nullptr);

//! Best (k,T)-term l1 tail: everything outside the k_l largest magnitudes of each level.
t_real sigma_kt(RealVector const &magnitudes, std::vector<t_index> const &k, LevelScheme const &T);

//! Errors, sigma_{k,T}(Psi* x_j) and, when @p bound is given, the error-bound check.
ReconReport error_report(HSVolume const &truth, HSVolume const &estimate, std::vector<t_index> const &k,
                         LevelScheme const &T, Basis psi,
                         std::optional<ErrorBoundParams> const &bound = std::nullopt, t_real eps_nyq = 0);

nlohmann::json to_json(ReconReport const &report);

} // namespace cifti

#endif
