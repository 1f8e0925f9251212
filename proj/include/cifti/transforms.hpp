#ifndef CIFTI_TRANSFORMS_HPP
#define CIFTI_TRANSFORMS_HPP

// Unitary 1-D DFT and orthonormal Haar transforms.
//
// Frequency storage convention (shared by every module): a length-N spectrum is
// stored so that 0-based storage index s holds frequency f(s) = s + 1 - N/2,
// i.e. frequencies -N/2+1, ..., N/2 in increasing order, with DC at s = N/2 - 1
// (1-based index N/2).

#include "cifti/types.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <string>

namespace cifti {

inline void require_power_of_two(t_index n, char const *what) {
  if(n < 2 || !is_power_of_two(n))
    throw SizeError(std::string(what) + ": length " + std::to_string(n)
                    + " is not a power of two >= 2");
}

//! Frequency held by 0-based storage index @p s.
inline t_index frequency_of(t_index s, t_index n) { return s + 1 - n / 2; }
//! 0-based storage index of frequency @p f in (-N/2, N/2].
inline t_index storage_of(t_index f, t_index n) { return f + n / 2 - 1; }
//! FFT bin (0..N-1) of frequency @p f.
inline t_index bin_of(t_index f, t_index n) { return ((f % n) + n) % n; }

namespace detail {
template <class Real> Eigen::FFT<Real> &fft_engine() {
  // kissfft caches twiddles internally; one engine per thread keeps calls reentrant.
  thread_local Eigen::FFT<Real> engine;
  return engine;
}
} // namespace detail

//! Unitary analysis Phi* x of a real signal; output in centred frequency storage.
template <class Derived>
Vector<std::complex<typename Derived::Scalar>> dft_forward(Eigen::MatrixBase<Derived> const &x) {
  using Real = typename Derived::Scalar;
  t_index const n = x.size();
  require_power_of_two(n, "dft_forward");
  Vector<Real> const dense = x;
  std::vector<Real> in(dense.data(), dense.data() + n);
  std::vector<std::complex<Real>> bins;
  detail::fft_engine<Real>().fwd(bins, in);
  Real const scale = Real(1) / std::sqrt(Real(n));
  Vector<std::complex<Real>> out(n);
  for(t_index s = 0; s < n; ++s)
    out(s) = bins[bin_of(frequency_of(s, n), n)] * scale;
  return out;
}

//! Unitary synthesis Phi y of a complex spectrum in centred storage, complex result.
template <class Derived>
Vector<typename Derived::Scalar> dft_inverse_complex(Eigen::MatrixBase<Derived> const &y) {
  using Complex = typename Derived::Scalar;
  using Real = typename Complex::value_type;
  t_index const n = y.size();
  require_power_of_two(n, "dft_inverse");
  std::vector<Complex> bins(n);
  for(t_index s = 0; s < n; ++s)
    bins[bin_of(frequency_of(s, n), n)] = y(s);
  std::vector<Complex> out;
  auto &engine = detail::fft_engine<Real>();
  engine.SetFlag(Eigen::FFT<Real>::Unscaled);
  engine.inv(out, bins);
  engine.ClearFlag(Eigen::FFT<Real>::Unscaled);
  Real const scale = Real(1) / std::sqrt(Real(n));
  Vector<Complex> result(n);
  for(t_index i = 0; i < n; ++i)
    result(i) = out[i] * scale;
  return result;
}

//! Record of what dft_inverse discarded when projecting onto real signals.
template <class Real> struct InverseDiagnostics {
  Real max_imaginary = 0;
  //! True when the discarded part exceeded 1e-10 relative to the input norm.
  bool significant = false;
};

//! Real part of the unitary synthesis, i.e. the adjoint of dft_forward for the real inner product.
template <class Derived, class Real = typename Derived::Scalar::value_type>
Vector<Real>
dft_inverse(Eigen::MatrixBase<Derived> const &y, InverseDiagnostics<Real> *diagnostics = nullptr) {
  auto const full = dft_inverse_complex(y);
  if(diagnostics) {
    Real const imag = full.imag().cwiseAbs().maxCoeff();
    diagnostics->max_imaginary = imag;
    diagnostics->significant = imag > Real(1e-10) * std::max(y.norm(), Real(1));
  }
  return full.real();
}

//! Orthonormal Haar analysis Psi* x: scaling coefficient first, then details coarse to fine.
template <class Derived>
Vector<typename Derived::Scalar> dhw_forward(Eigen::MatrixBase<Derived> const &x) {
  using Real = typename Derived::Scalar;
  t_index const n = x.size();
  require_power_of_two(n, "dhw_forward");
  Real const r2 = Real(1) / std::sqrt(Real(2));
  Vector<Real> approx = x;
  Vector<Real> out(n);
  for(t_index len = n; len >= 2; len /= 2) {
    t_index const half = len / 2;
    for(t_index i = 0; i < half; ++i) {
      out(half + i) = (approx(2 * i) - approx(2 * i + 1)) * r2;
      approx(i) = (approx(2 * i) + approx(2 * i + 1)) * r2;
    }
  }
  out(0) = approx(0);
  return out;
}

//! Orthonormal Haar synthesis Psi s, inverse of dhw_forward.
template <class Derived>
Vector<typename Derived::Scalar> dhw_inverse(Eigen::MatrixBase<Derived> const &s) {
  using Real = typename Derived::Scalar;
  t_index const n = s.size();
  require_power_of_two(n, "dhw_inverse");
  Real const r2 = Real(1) / std::sqrt(Real(2));
  Vector<Real> approx(n);
  approx(0) = s(0);
  Vector<Real> next(n);
  for(t_index half = 1; half < n; half *= 2) {
    for(t_index i = 0; i < half; ++i) {
      next(2 * i) = (approx(i) + s(half + i)) * r2;
      next(2 * i + 1) = (approx(i) - s(half + i)) * r2;
    }
    approx.head(2 * half) = next.head(2 * half);
  }
  return approx;
}

// Real orthonormal Fourier coordinates.
//
// For real u the unitary spectrum c = Phi* u is conjugate symmetric, so it is
// carried by N real numbers r = R u with R orthogonal. They are laid out on the
// centred storage grid: r(DC) = c_0, r(N/2) = c_{N/2}, and for 0 < f < N/2,
// r(f) = sqrt2 Re c_f and r(-f) = sqrt2 Im c_f.

template <class Derived>
Vector<typename Derived::Scalar> real_dft_forward(Eigen::MatrixBase<Derived> const &u) {
  using Real = typename Derived::Scalar;
  t_index const n = u.size();
  auto const c = dft_forward(u);
  Real const sq2 = std::sqrt(Real(2));
  Vector<Real> r(n);
  r(storage_of(0, n)) = c(storage_of(0, n)).real();
  r(storage_of(n / 2, n)) = c(storage_of(n / 2, n)).real();
  for(t_index f = 1; f < n / 2; ++f) {
    auto const cf = c(storage_of(f, n));
    r(storage_of(f, n)) = sq2 * cf.real();
    r(storage_of(-f, n)) = sq2 * cf.imag();
  }
  return r;
}

template <class Derived>
Vector<typename Derived::Scalar> real_dft_inverse(Eigen::MatrixBase<Derived> const &r) {
  using Real = typename Derived::Scalar;
  t_index const n = r.size();
  require_power_of_two(n, "real_dft_inverse");
  Real const inv_sq2 = Real(1) / std::sqrt(Real(2));
  Vector<std::complex<Real>> c(n);
  c(storage_of(0, n)) = r(storage_of(0, n));
  c(storage_of(n / 2, n)) = r(storage_of(n / 2, n));
  for(t_index f = 1; f < n / 2; ++f) {
    std::complex<Real> const cf(r(storage_of(f, n)) * inv_sq2, r(storage_of(-f, n)) * inv_sq2);
    c(storage_of(f, n)) = cf;
    c(storage_of(-f, n)) = std::conj(cf);
  }
  return dft_inverse_complex(c).real();
}

//! Analysis in the named basis; DFT coefficients are complex, DHW real (returned as complex).
template <class Derived>
Vector<std::complex<typename Derived::Scalar>>
analyse(Basis basis, Eigen::MatrixBase<Derived> const &x) {
  if(basis == Basis::dft)
    return dft_forward(x);
  return dhw_forward(x).template cast<std::complex<typename Derived::Scalar>>();
}

} // namespace cifti

#endif
