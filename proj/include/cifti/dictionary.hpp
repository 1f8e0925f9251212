#ifndef CIFTI_DICTIONARY_HPP
#define CIFTI_DICTIONARY_HPP

#include "cifti/levels.hpp"
#include "cifti/types.hpp"
#include "cifti/volume.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cifti {

//! Fluorochrome emission spectra, one nonnegative column per dye.
struct SpectralDictionary {
  RealMatrix H;
  std::vector<std::string> names;
  //! Wavelength grid (nm) of the resampled rows, when the source provided one.
  std::optional<RealVector> wavelengths_nm;
  //! Number of negative readings clamped to zero while loading.
  t_index clamped = 0;

  t_index bands() const { return H.rows(); }
  t_index size() const { return H.cols(); }
};

//! Reads a dictionary CSV (header of names, one sample row per line) and
//! resamples every column linearly onto @p target_length uniform points.
//!
//! A first column named "wavelength", "wavelength_nm" or "nm" is taken as the
//! sample grid instead of a spectrum.
SpectralDictionary load_dictionary(std::filesystem::path const &path, t_index target_length);
SpectralDictionary parse_dictionary(std::istream &input, t_index target_length);

//! Seeded synthetic dictionary of smooth Gaussian-bump spectra, each normalised to max 1.
SpectralDictionary synth_dictionary(t_index n_f, t_index n_nu, std::uint64_t seed);

struct LocalSparsityProfile {
  t_real rho = 0;
  //! Worst-case local sparsity k_l^0 per level.
  std::vector<t_index> k;
  //! k_(i,l) for every dictionary column i.
  std::vector<std::vector<t_index>> per_fluorochrome;
  //! k_i(rho): number of coefficients kept for column i.
  std::vector<t_index> kept;
  //! Last level (1-based) with k_l^0 > 0, 0 if none.
  t_index r0 = 0;
  Basis psi = Basis::dft;
  LevelScheme T;

  //! k_l^0 / |T_l|.
  std::vector<t_real> ratios() const;
};

//! Local sparsity pattern of the dictionary in basis @p psi over levels @p T at energy fraction rho.
LocalSparsityProfile
estimate_profile(SpectralDictionary const &dictionary, Basis psi, LevelScheme const &T, t_real rho);

//! Indices of the largest-magnitude entries (ties by ascending index) that capture a
//! fraction rho of the l2 energy; entries below 1e-12 of the norm count as zero.
std::vector<t_index> energy_support(RealVector const &magnitudes, t_real rho);

//! Linear mixing X = H G with nonnegative concentrations.
HSVolume lmm_mix(SpectralDictionary const &dictionary, RealMatrix const &G);

nlohmann::json to_json(LocalSparsityProfile const &profile);

} // namespace cifti

#endif
