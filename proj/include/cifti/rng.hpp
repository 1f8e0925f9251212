#ifndef CIFTI_RNG_HPP
#define CIFTI_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace cifti {

//! SplitMix64 finaliser, used for seed derivation.
std::uint64_t mix64(std::uint64_t x);

//! Derives a child seed from a master seed and a sequence of integer tags.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags);

//! Stable 64-bit hash of a string (FNV-1a), for tagging seeds with names.
std::uint64_t hash_tag(std::string_view text);

//! Seedable generator with bit-reproducible output on every platform.
//!
//! The engine is std::mt19937_64 (fully specified by the standard). The
//! distributions are implemented here because std:: distributions are not
//! specified bit-for-bit.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next() { return engine_(); }
  //! Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  //! Uniform integer in [0, n), unbiased.
  std::uint64_t index(std::uint64_t n);
  //! Standard normal via Box-Muller.
  double normal();

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0;
};

} // namespace cifti

#endif
