#ifndef CIFTI_EXPERIMENTS_HPP
#define CIFTI_EXPERIMENTS_HPP

#include "cifti/dictionary.hpp"
#include "cifti/levels.hpp"
#include "cifti/recon.hpp"
#include "cifti/sampling.hpp"
#include "cifti/solver.hpp"
#include "cifti/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cifti {

//! Acquisition strategies compared by the experiments.
enum class Strategy { mls_dhw, mls_dft, initial_vds };

std::string_view to_string(Strategy strategy);
Strategy parse_strategy(std::string_view name);
Approach approach_of(Strategy strategy);
Basis sparsity_basis(Strategy strategy);

struct ExperimentConfig {
  t_index n_xi = 1024;
  t_index n_x = 8;
  t_index n_y = 8;
  //! DFT levels use r = 2^q bands.
  int q = 6;
  std::vector<Basis> bases{Basis::dhw, Basis::dft};
  std::vector<t_real> rho{0.93, 0.96, 0.99};
  //! Energy fraction behind the mls-dhw budget split and the error bound.
  t_real design_rho = 0.99;
  std::vector<t_real> ratios{0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  //! Measurement ratio of `sample` and `reconstruct`.
  t_real ratio = 0.1;
  t_index trials = 100;
  std::uint64_t seed = 1;
  std::vector<Strategy> strategies{Strategy::mls_dhw, Strategy::mls_dft, Strategy::initial_vds};
  //! Strategy of `sample` and `reconstruct`.
  Strategy strategy = Strategy::mls_dft;
  t_real eps_nyq = 0;
  //! Read eps_nyq as a fraction of ||X||_F.
  bool eps_relative = false;
  std::optional<std::filesystem::path> dictionary;
  t_index fluorochromes = 16;
  std::uint64_t dictionary_seed = 7;
  std::optional<std::filesystem::path> volume;
  //! 0-based bands exported as spatial maps; empty picks N/4, N/2, 3N/4.
  std::vector<t_index> bands;
  t_real c = 1;
  SolverOptions solver;
  unsigned threads = 0;
  std::filesystem::path output_dir = "cifti-out";

  //! Throws ConfigError on the first violated constraint.
  void validate() const;
};

//! Invalid experiment configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

//! Default output directory: $CIFTI_OUTPUT_DIR, else "cifti-out".
std::filesystem::path default_output_dir();

//! Overwrites every field present in @p j; unknown keys are rejected.
void apply_json(ExperimentConfig &config, nlohmann::json const &j);
nlohmann::json to_json(ExperimentConfig const &config);

//! Number of rows a ratio buys: floor(ratio N).
t_index rows_for_ratio(t_real ratio, t_index n);

SpectralDictionary experiment_dictionary(ExperimentConfig const &config);
LevelScheme sparsity_levels(Basis psi, ExperimentConfig const &config);

//! Everything needed to draw patterns of one strategy at any ratio.
struct StrategyPlan {
  Strategy strategy;
  Basis psi;
  LevelScheme W;
  //! Per-level split weights for mls-dhw.
  std::vector<t_real> weights;
};

StrategyPlan plan_strategy(Strategy strategy, SpectralDictionary const &dictionary, ExperimentConfig const &config);
//! Full sampling at M = N uses the Nyquist pattern for every strategy.
SamplingPattern draw_pattern(StrategyPlan const &plan, t_index m_xi, std::uint64_t seed);

struct PhasePoint {
  Strategy strategy;
  t_real ratio = 0;
  t_index m = 0;
  t_index trials = 0;
  t_index successes = 0;
  t_index solver_failures = 0;

  t_real rate() const { return trials ? t_real(successes) / t_real(trials) : 0; }
};

struct PhaseTransition {
  std::vector<PhasePoint> points;
  //! First ratio reaching the success level, per strategy in config order.
  std::vector<std::optional<t_real>> crossing;
};

constexpr t_real success_threshold = 1e-4;
constexpr t_real crossing_level = 0.95;

PhaseTransition run_phase_transition(ExperimentConfig const &config);

//! Synthetic LMM volume with concentrations uniform on [0, 1].
HSVolume synthetic_volume(SpectralDictionary const &dictionary, ExperimentConfig const &config);

struct ReconstructionRun {
  //! The requested config with the dimensions of a loaded volume filled in.
  ExperimentConfig config;
  HSVolume truth;
  CiFtiMeasurements measurements;
  Reconstruction result;
};

ReconstructionRun run_reconstruction(ExperimentConfig const &config);

// Command bodies: each writes its artifacts under config.output_dir and
// returns the process exit code.
int cmd_levels(ExperimentConfig const &config);
int cmd_coherence(ExperimentConfig const &config);
int cmd_profile(ExperimentConfig const &config);
int cmd_sample(ExperimentConfig const &config);
int cmd_phase_transition(ExperimentConfig const &config);
int cmd_reconstruct(ExperimentConfig const &config);

namespace exit_code {
constexpr int ok = 0;
constexpr int config = 2;
constexpr int io = 3;
constexpr int solver = 4;
} // namespace exit_code

} // namespace cifti

#endif
