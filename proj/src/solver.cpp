#include "cifti/solver.hpp"
#include "cifti/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cifti {

namespace {
constexpr t_index balance_period = 10;
constexpr t_real balance_ratio = 2;
} // namespace

std::string_view to_string(SolverStatus status) {
  switch(status) {
  case SolverStatus::converged:
    return "converged";
  case SolverStatus::max_iter:
    return "max-iter";
  case SolverStatus::infeasible_tolerance:
    return "infeasible-tolerance";
  }
  return "unknown";
}

ComplexVector measure(RealVector const &x, SamplingPattern const &pattern) {
  if(x.size() != pattern.N)
    throw DimensionError("measure: signal length " + std::to_string(x.size())
                         + " does not match pattern N = " + std::to_string(pattern.N));
  ComplexVector const spectrum = dft_forward(x);
  ComplexVector y(pattern.size());
  for(t_index i = 0; i < pattern.size(); ++i)
    y(i) = spectrum(pattern.omega[i]);
  return y;
}

t_real residual_check(RealVector const &u, ComplexVector const &y, SamplingPattern const &pattern) {
  if(y.size() != pattern.size())
    throw DimensionError("residual_check: measurement count does not match the pattern");
  ComplexVector const predicted = measure(u, pattern);
  t_real sum = 0;
  for(t_index i = 0; i < pattern.size(); ++i)
    sum += pattern.weights(i) * pattern.weights(i) * std::norm(y(i) - predicted(i));
  return std::sqrt(sum);
}

t_real residual_check(RealVector const &u, BpdnProblem const &problem) {
  return residual_check(u, problem.y, problem.pattern);
}

t_real sparsity_l1(RealVector const &u, Basis psi) { return analyse(psi, u).cwiseAbs().sum(); }

BpdnSolver::BpdnSolver(SamplingPattern pattern, Basis psi, SolverOptions options)
    : pattern_(std::move(pattern)), psi_(psi), options_(options), n_(pattern_.N) {
  require_power_of_two(n_, "BpdnSolver");
  if(pattern_.weights.size() != pattern_.size())
    throw DimensionError("BpdnSolver: weights and omega differ in length");
  if(pattern_.size() > 0 && !(pattern_.weights.minCoeff() > 0))
    throw DomainError("BpdnSolver: weights must be strictly positive");
  if(options_.max_iter < 1 || !(options_.step > 0))
    throw DomainError("BpdnSolver: invalid options");

  curvature_ = RealVector::Zero(n_);
  for(t_index i = 0; i < pattern_.size(); ++i) {
    t_index const s = pattern_.omega[i];
    if(s < 0 || s >= n_)
      throw DomainError("BpdnSolver: row index outside [0, N)");
    t_index const f = frequency_of(s, n_);
    t_real const w2 = pattern_.weights(i) * pattern_.weights(i);
    if(f == 0 || f == n_ / 2) {
      rows_.push_back({s, -1, 1});
      curvature_(s) += w2;
    } else {
      t_index const g = std::abs(f);
      Contribution c{storage_of(g, n_), storage_of(-g, n_), f > 0 ? 1.0 : -1.0};
      rows_.push_back(c);
      curvature_(c.first) += w2 / 2;
      curvature_(c.second) += w2 / 2;
    }
  }
  for(t_index j = 0; j < n_; ++j)
    if(curvature_(j) > 0)
      observed_.push_back(j);
}

// Each measured row contributes w^2 |y - c_f|^2. With c_f = (r_g + i sign r_-g)/sqrt2
// this is (w^2/2)[(sqrt2 Re y - r_g)^2 + (sqrt2 sign Im y - r_-g)^2]; DC and Nyquist
// rows see a real coefficient and leave w^2 (Im y)^2 as an irreducible offset.
// Summing per coordinate gives curvature (r - centre)^2 plus a constant offset.
BpdnSolver::Fidelity BpdnSolver::fidelity(ComplexVector const &y) const {
  if(y.size() != pattern_.size())
    throw DimensionError("BpdnSolver: " + std::to_string(y.size()) + " measurements for "
                         + std::to_string(pattern_.size()) + " pattern rows");
  t_real const sq2 = std::sqrt(2.0);
  Fidelity fid;
  RealVector weighted = RealVector::Zero(n_);
  auto target = [&](std::size_t i, bool second) {
    auto const &c = rows_[i];
    if(c.second < 0)
      return y(static_cast<t_index>(i)).real();
    return second ? sq2 * c.sign * y(static_cast<t_index>(i)).imag()
                  : sq2 * y(static_cast<t_index>(i)).real();
  };
  for(std::size_t i = 0; i < rows_.size(); ++i) {
    t_real const w2 = pattern_.weights(static_cast<t_index>(i)) * pattern_.weights(static_cast<t_index>(i));
    auto const &c = rows_[i];
    fid.norm_dy += w2 * std::norm(y(static_cast<t_index>(i)));
    if(c.second < 0) {
      weighted(c.first) += w2 * target(i, false);
      fid.offset += w2 * y(static_cast<t_index>(i)).imag() * y(static_cast<t_index>(i)).imag();
    } else {
      weighted(c.first) += w2 / 2 * target(i, false);
      weighted(c.second) += w2 / 2 * target(i, true);
    }
  }
  fid.norm_dy = std::sqrt(fid.norm_dy);
  fid.centre = RealVector::Zero(n_);
  for(auto const j : observed_)
    fid.centre(j) = weighted(j) / curvature_(j);
  // spread of repeated or conjugate observations around their weighted mean
  for(std::size_t i = 0; i < rows_.size(); ++i) {
    t_real const w2 = pattern_.weights(static_cast<t_index>(i)) * pattern_.weights(static_cast<t_index>(i));
    auto const &c = rows_[i];
    if(c.second < 0) {
      t_real const d = target(i, false) - fid.centre(c.first);
      fid.offset += w2 * d * d;
    } else {
      t_real const d1 = target(i, false) - fid.centre(c.first);
      t_real const d2 = target(i, true) - fid.centre(c.second);
      fid.offset += w2 / 2 * (d1 * d1 + d2 * d2);
    }
  }
  return fid;
}

RealVector BpdnSolver::to_fourier(RealVector const &s) const {
  if(psi_ == Basis::dft)
    return s;
  return real_dft_forward(dhw_inverse(s));
}

RealVector BpdnSolver::from_fourier(RealVector const &r) const {
  if(psi_ == Basis::dft)
    return r;
  return dhw_forward(real_dft_inverse(r));
}

void BpdnSolver::project(RealVector &s, Fidelity const &fid) const {
  RealVector r = to_fourier(s);
  t_real g0 = 0;
  for(auto const j : observed_) {
    t_real const d = r(j) - fid.centre(j);
    g0 += curvature_(j) * d * d;
  }
  if(g0 > fid.radius2) {
    if(fid.radius2 <= 0) {
      for(auto const j : observed_)
        r(j) = fid.centre(j);
    } else {
      // Newton on 1/sqrt(g(lambda)) - 1/radius, concave in lambda: monotone from lambda = 0
      t_real const inv_radius = 1 / std::sqrt(fid.radius2);
      t_real lambda = 0;
      for(int it = 0; it < 100; ++it) {
        t_real g = 0, dg = 0;
        for(auto const j : observed_) {
          t_real const a = curvature_(j);
          t_real const d = r(j) - fid.centre(j);
          t_real const q = 1 / (1 + lambda * a);
          g += a * d * d * q * q;
          dg -= 2 * a * a * d * d * q * q * q;
        }
        t_real const phi = 1 / std::sqrt(g) - inv_radius;
        if(std::abs(phi) <= 1e-14 * inv_radius)
          break;
        t_real const dphi = -0.5 * dg / (g * std::sqrt(g));
        t_real const next = lambda - phi / dphi;
        if(!(next > lambda))
          break;
        lambda = next;
      }
      for(auto const j : observed_) {
        t_real const a = curvature_(j);
        r(j) = (r(j) + lambda * a * fid.centre(j)) / (1 + lambda * a);
      }
    }
  }
  s = from_fourier(r);
}

void BpdnSolver::shrink(RealVector &s, t_real threshold) const {
  if(psi_ == Basis::dhw) {
    for(t_index j = 0; j < n_; ++j) {
      t_real const v = s(j);
      s(j) = std::copysign(std::max(std::abs(v) - threshold, t_real(0)), v);
    }
    return;
  }
  // DC and Nyquist are single real coefficients; every other frequency pair (f, -f)
  // costs |c_f| + |c_-f| = sqrt2 ||(r_f, r_-f)||.
  for(t_index const f : {t_index(0), n_ / 2}) {
    t_index const j = storage_of(f, n_);
    t_real const v = s(j);
    s(j) = std::copysign(std::max(std::abs(v) - threshold, t_real(0)), v);
  }
  t_real const group_threshold = std::sqrt(2.0) * threshold;
  for(t_index f = 1; f < n_ / 2; ++f) {
    t_index const a = storage_of(f, n_), b = storage_of(-f, n_);
    t_real const norm = std::hypot(s(a), s(b));
    t_real const scale = norm > group_threshold ? 1 - group_threshold / norm : 0;
    s(a) *= scale;
    s(b) *= scale;
  }
}

t_real BpdnSolver::group_l1(RealVector const &s) const {
  if(psi_ == Basis::dhw)
    return s.cwiseAbs().sum();
  t_real total = std::abs(s(storage_of(0, n_))) + std::abs(s(storage_of(n_ / 2, n_)));
  for(t_index f = 1; f < n_ / 2; ++f)
    total += std::sqrt(2.0) * std::hypot(s(storage_of(f, n_)), s(storage_of(-f, n_)));
  return total;
}

SolverResult BpdnSolver::solve(ComplexVector const &y, t_real tau) const {
  if(!(tau >= 0))
    throw DomainError("BpdnSolver: tau must be nonnegative");
  Fidelity fid = fidelity(y);
  SolverResult result;
  result.distance_to_range = std::sqrt(fid.offset);
  result.tau_effective = std::max(tau, 1e-12 * fid.norm_dy);
  // aim slightly inside the ball so the recomputed residual survives rounding
  t_real const enforced
      = result.tau_effective - std::min(0.5 * result.tau_effective, 1e-13 * fid.norm_dy);
  fid.radius2 = enforced * enforced - fid.offset;
  bool const infeasible = result.tau_effective < result.distance_to_range;
  fid.radius2 = std::max(fid.radius2, t_real(0));

  // start from the zero-filled least-squares point
  RealVector z = from_fourier(fid.centre);
  project(z, fid);
  t_real const scale = z.norm() / std::sqrt(t_real(n_));
  RealVector x(n_), v(n_), p = z;

  if(scale > 0) {
    // Residual balancing: every few iterations gamma is rescaled so that the
    // primal gap ||p - x|| and the movement of x stay within a factor of each
    // other. The dual estimate (x - z) / gamma is kept, so the fixed point is too.
    t_real gamma = options_.step * scale;
    RealVector x_prev = RealVector::Zero(n_);
    t_real primal = 0, dual = 0;
    for(result.iterations = 1; result.iterations <= options_.max_iter; ++result.iterations) {
      x = z;
      shrink(x, gamma);
      v = 2 * x - z;
      p = v;
      project(p, fid);
      z += p - x;
      t_real const gap = (p - x).norm();
      primal += gap;
      dual += (x - x_prev).norm();
      x_prev = x;
      if(gap <= options_.opt_tol * std::max(p.norm(), std::numeric_limits<t_real>::min())) {
        result.status = SolverStatus::converged;
        break;
      }
      if(result.iterations % balance_period == 0) {
        t_real factor = 1;
        if(primal > balance_ratio * dual)
          factor = 0.5;
        else if(dual > balance_ratio * primal)
          factor = 2;
        if(factor != 1) {
          z = x + factor * (z - x);
          gamma *= factor;
        }
        primal = dual = 0;
      }
    }
    result.iterations = std::min(result.iterations, options_.max_iter);
  } else {
    result.status = SolverStatus::converged;
  }

  result.u = psi_ == Basis::dft ? real_dft_inverse(p) : dhw_inverse(p);
  result.objective = sparsity_l1(result.u, psi_);
  result.residual = residual_check(result.u, y, pattern_);

  std::ostringstream diagnostics;
  if(infeasible) {
    result.status = SolverStatus::infeasible_tolerance;
    diagnostics << "tau = " << tau << " is below the distance " << result.distance_to_range
                << " from y to the range of the measurement operator; solved at that distance";
  } else if(result.status == SolverStatus::converged
            && result.residual > result.tau_effective * (1 + options_.feas_tol)) {
    result.status = SolverStatus::max_iter;
    diagnostics << "residual " << result.residual << " exceeds tau " << result.tau_effective;
  } else if(result.status == SolverStatus::max_iter) {
    diagnostics << "stopped after " << options_.max_iter << " iterations";
  }
  result.diagnostics = diagnostics.str();
  return result;
}

SolverResult solve_bpdn(BpdnProblem const &problem, SolverOptions const &options) {
  if(problem.phi != Basis::dft)
    throw DomainError("solve_bpdn: only the DFT sensing basis is supported");
  if(problem.y.size() != problem.pattern.size())
    throw DimensionError("solve_bpdn: |y| does not match |Omega|");
  return BpdnSolver(problem.pattern, problem.psi, options).solve(problem.y, problem.tau);
}

} // namespace cifti
