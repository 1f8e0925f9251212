#include "cifti/recon.hpp"
#include "cifti/parallel.hpp"
#include "cifti/rng.hpp"
#include "cifti/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace cifti {

std::string_view to_string(NoiseKind kind) {
  return kind == NoiseKind::none ? "none" : "gaussian-bounded";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if(name == "none")
    return NoiseKind::none;
  if(name == "gaussian-bounded")
    return NoiseKind::gaussian_bounded;
  throw ParseError("unknown noise model '" + std::string(name) + "'");
}

ComplexMatrix nyquist_noise(NoiseModel const &noise, t_index n_xi, t_index n_p) {
  if(!(noise.eps_nyq >= 0))
    throw DomainError("noise: eps_nyq must be nonnegative");
  ComplexMatrix W = ComplexMatrix::Zero(n_xi, n_p);
  if(noise.kind == NoiseKind::none || noise.eps_nyq == 0 || n_p == 0)
    return W;
  t_real const bound = noise.eps_nyq / std::sqrt(t_real(n_p));
  // E||w_j||^2 = bound^2
  t_real const sigma = bound / std::sqrt(2 * t_real(n_xi));
  for(t_index j = 0; j < n_p; ++j) {
    Rng rng(derive_seed(noise.seed, {static_cast<std::uint64_t>(j)}));
    for(t_index i = 0; i < n_xi; ++i) {
      t_real const re = rng.normal();
      t_real const im = rng.normal();
      W(i, j) = t_complex(sigma * re, sigma * im);
    }
    t_real const norm = W.col(j).norm();
    if(norm > bound)
      W.col(j) *= bound / norm;
  }
  return W;
}

CiFtiMeasurements acquire(HSVolume const &volume, SamplingPattern const &pattern, NoiseModel const &noise) {
  volume.validate();
  if(pattern.N != volume.bands())
    throw DimensionError("acquire: pattern is for N = " + std::to_string(pattern.N) + " but the volume has "
                         + std::to_string(volume.bands()) + " bands");
  ComplexMatrix const W = nyquist_noise(noise, volume.bands(), volume.pixels());
  CiFtiMeasurements out;
  out.pattern = pattern;
  out.eps_nyq = noise.kind == NoiseKind::none ? 0 : noise.eps_nyq;
  out.Y.resize(pattern.size(), volume.pixels());
  for(t_index j = 0; j < volume.pixels(); ++j) {
    ComplexVector const spectrum = dft_forward(volume.X.col(j));
    for(t_index i = 0; i < pattern.size(); ++i)
      out.Y(i, j) = spectrum(pattern.omega[i]) + W(pattern.omega[i], j);
  }
  return out;
}

t_index ReconReport::failures() const {
  return std::count_if(statuses.begin(), statuses.end(),
                       [](SolverStatus s) { return s != SolverStatus::converged; });
}

t_real ReconReport::median_relative_error() const {
  if(relative_errors.empty())
    return std::numeric_limits<t_real>::quiet_NaN();
  std::vector<t_real> sorted = relative_errors;
  std::sort(sorted.begin(), sorted.end());
  std::size_t const mid = sorted.size() / 2;
  return sorted.size() % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2;
}

namespace {

void check_approach(PatternKind kind, Approach approach) {
  if(kind == PatternKind::vds && approach != Approach::initial_vds)
    throw DomainError("reconstruct: a vds pattern requires the initial-vds approach");
  if(kind == PatternKind::mls && approach != Approach::mls_this_work)
    throw DomainError("reconstruct: an mls pattern requires the mls-this-work approach");
}

void fill_errors(ReconReport &report, HSVolume const &truth, HSVolume const &estimate) {
  if(truth.X.rows() != estimate.X.rows() || truth.X.cols() != estimate.X.cols())
    throw DimensionError("error report: ground truth and estimate differ in shape");
  report.relative_errors.resize(truth.pixels());
  t_real total = 0;
  for(t_index j = 0; j < truth.pixels(); ++j) {
    t_real const err = (truth.X.col(j) - estimate.X.col(j)).squaredNorm();
    t_real const ref = truth.X.col(j).squaredNorm();
    total += err;
    report.relative_errors[j] = ref > 0 ? err / ref : (err > 0 ? std::numeric_limits<t_real>::infinity() : 0);
  }
  report.aggregate_error = std::sqrt(total);
}

} // namespace

Reconstruction reconstruct(CiFtiMeasurements const &measurements, ReconOptions const &options,
                           HSVolume const *truth) {
  auto const &pattern = measurements.pattern;
  if(measurements.Y.rows() != pattern.size())
    throw DimensionError("reconstruct: Y has " + std::to_string(measurements.Y.rows()) + " rows for "
                         + std::to_string(pattern.size()) + " pattern rows");
  if(!(measurements.eps_nyq >= 0))
    throw DomainError("reconstruct: eps_nyq must be nonnegative");
  check_approach(pattern.kind, options.approach);
  t_index const n_p = measurements.pixels();

  Reconstruction out;
  auto &report = out.report;
  report.eps_nyq = measurements.eps_nyq;
  report.tau = n_p > 0 ? pattern.alpha_factor / std::sqrt(t_real(n_p)) * measurements.eps_nyq : 0;
  if(n_p > 0 && pattern.size() > 0
     && (options.approach == Approach::mls_this_work || options.sparsity > 0))
    report.bound = error_bound_params(options.approach, pattern.size(), pattern.N, n_p, options.sparsity,
                                      options.c);

  out.X_hat.X = RealMatrix::Zero(pattern.N, n_p);
  if(truth)
    out.X_hat.shape = truth->shape;
  report.statuses.assign(n_p, SolverStatus::converged);
  report.iterations.assign(n_p, 0);

  BpdnSolver const solver(pattern, options.psi, options.solver);
  parallel_for(n_p, options.threads, [&](t_index j) {
    SolverResult const result = solver.solve(measurements.Y.col(j), report.tau);
    out.X_hat.X.col(j) = result.u;
    report.statuses[j] = result.status;
    report.iterations[j] = result.iterations;
  });

  if(truth)
    fill_errors(report, *truth, out.X_hat);
  return out;
}

t_real sigma_kt(RealVector const &magnitudes, std::vector<t_index> const &k, LevelScheme const &T) {
  if(magnitudes.size() != T.N)
    throw DimensionError("sigma_kt: coefficient length does not match the level scheme");
  if(static_cast<t_index>(k.size()) != T.r())
    throw DimensionError("sigma_kt: k has " + std::to_string(k.size()) + " entries for "
                         + std::to_string(T.r()) + " levels");
  t_real tail = 0;
  std::vector<t_real> level;
  for(t_index l = 0; l < T.r(); ++l) {
    level.clear();
    for(auto const i : T.levels[l])
      level.push_back(std::abs(magnitudes(i)));
    std::size_t const keep = static_cast<std::size_t>(std::clamp<t_index>(k[l], 0, T.size(l)));
    std::nth_element(level.begin(), level.begin() + keep, level.end(), std::greater<>());
    for(std::size_t i = keep; i < level.size(); ++i)
      tail += level[i];
  }
  return tail;
}

ReconReport error_report(HSVolume const &truth, HSVolume const &estimate, std::vector<t_index> const &k,
                         LevelScheme const &T, Basis psi, std::optional<ErrorBoundParams> const &bound,
                         t_real eps_nyq) {
  ReconReport report;
  fill_errors(report, truth, estimate);
  report.eps_nyq = eps_nyq;
  report.bound = bound;
  report.sigma.resize(truth.pixels());
  t_real sigma_sum = 0;
  for(t_index j = 0; j < truth.pixels(); ++j) {
    RealVector const coefficients = analyse(psi, truth.X.col(j)).cwiseAbs();
    report.sigma[j] = sigma_kt(coefficients, k, T);
    sigma_sum += report.sigma[j];
  }
  if(bound) {
    report.bound_rhs = bound->beta1 * sigma_sum + bound->beta2 * eps_nyq;
    report.bound_holds = report.aggregate_error <= *report.bound_rhs;
  }
  return report;
}

nlohmann::json to_json(ReconReport const &report) {
  nlohmann::json j;
  j["pixels"] = report.statuses.empty() ? report.relative_errors.size() : report.statuses.size();
  j["tau"] = report.tau;
  j["eps_nyq"] = report.eps_nyq;
  std::vector<std::string> statuses;
  for(auto const s : report.statuses)
    statuses.emplace_back(to_string(s));
  j["statuses"] = statuses;
  j["iterations"] = report.iterations;
  j["failures"] = report.failures();
  if(!report.relative_errors.empty()) {
    j["relative_errors"] = report.relative_errors;
    j["median_relative_error"] = report.median_relative_error();
    j["aggregate_error"] = report.aggregate_error;
  }
  if(!report.sigma.empty())
    j["sigma_kT"] = report.sigma;
  if(report.bound) {
    j["bound"] = {{"approach", std::string(to_string(report.bound->approach))},
                  {"alpha", report.bound->alpha},
                  {"beta1", report.bound->beta1},
                  {"beta2", report.bound->beta2},
                  {"c", report.bound->c}};
  }
  if(report.bound_rhs)
    j["bound_rhs"] = *report.bound_rhs;
  if(report.bound_holds)
    j["bound_holds"] = *report.bound_holds;
  return j;
}

} // namespace cifti
