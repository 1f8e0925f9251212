#include "cifti/rng.hpp"

#include <cmath>
#include <numbers>

namespace cifti {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = mix64(master);
  for(auto const tag : tags)
    h = mix64(h ^ mix64(tag + 0x632be59bd9b4e019ULL));
  return h;
}

std::uint64_t hash_tag(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for(unsigned char const c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::index(std::uint64_t n) {
  if(n <= 1)
    return 0;
  // rejection on the top of the range keeps every residue equally likely
  std::uint64_t const limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do
    x = engine_();
  while(x >= limit);
  return x % n;
}

double Rng::normal() {
  if(has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1;
  do
    u1 = uniform();
  while(u1 <= 0.0);
  double const u2 = uniform();
  double const radius = std::sqrt(-2.0 * std::log(u1));
  double const angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

} // namespace cifti
