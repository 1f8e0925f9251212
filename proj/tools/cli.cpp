#include "cli.hpp"

#include "cifti/experiments.hpp"
#include "cifti/io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <iostream>
#include <map>

namespace cifti {

namespace {

// Flag values are collected here and only copied onto the config when given,
// so a --config file can supply everything else.
struct Flags {
  std::string config;
  std::string output;
  t_index n_xi = 0, n_x = 0, n_y = 0, trials = 0, fluorochromes = 0, max_iter = 0;
  int q = 0;
  std::vector<std::string> bases, strategies;
  std::string strategy, dictionary, volume;
  std::vector<t_real> rho, ratios;
  std::vector<t_index> bands;
  t_real design_rho = 0, ratio = 0, eps = 0, c = 0, opt_tol = 0, step = 0;
  std::uint64_t seed = 0, dictionary_seed = 0;
  bool eps_relative = false;
  unsigned threads = 0;
};

void add_flags(CLI::App &app, Flags &f) {
  app.add_option("--config", f.config, "JSON file with any ExperimentConfig field")->check(CLI::ExistingFile);
  app.add_option("-o,--output", f.output, "Output directory (default $CIFTI_OUTPUT_DIR or cifti-out)");
  app.add_option("--n-xi", f.n_xi, "Spectral length N_xi (power of two)");
  app.add_option("--n-x", f.n_x, "Image width N_x");
  app.add_option("--n-y", f.n_y, "Image height N_y");
  app.add_option("--q", f.q, "DFT levels: r = 2^q bands");
  app.add_option("--basis", f.bases, "Sparsity bases (dft, dhw)")->delimiter(',');
  app.add_option("--rho", f.rho, "Energy fractions of the sparsity profile")->delimiter(',');
  app.add_option("--design-rho", f.design_rho, "Energy fraction behind budgets and bounds");
  app.add_option("--ratios", f.ratios, "Measurement-ratio grid of the phase transition")->delimiter(',');
  app.add_option("--ratio", f.ratio, "Measurement ratio of sample and reconstruct");
  app.add_option("--trials", f.trials, "Trials per phase-transition point");
  app.add_option("--seed", f.seed, "Master seed");
  app.add_option("--strategies", f.strategies, "Phase-transition strategies (mls-dhw, mls-dft, initial-vds)")
      ->delimiter(',');
  app.add_option("--strategy", f.strategy, "Strategy of sample and reconstruct");
  app.add_option("--eps", f.eps, "Nyquist noise budget eps_nyq");
  app.add_flag("--eps-relative", f.eps_relative, "Read --eps as a fraction of ||X||_F");
  app.add_option("--dictionary", f.dictionary, "Dictionary CSV (default: synthetic)");
  app.add_option("--fluorochromes", f.fluorochromes, "Size of the synthetic dictionary");
  app.add_option("--dictionary-seed", f.dictionary_seed, "Seed of the synthetic dictionary");
  app.add_option("--volume", f.volume, "Input volume (.bin with JSON sidecar) for reconstruct");
  app.add_option("--bands", f.bands, "0-based bands exported as spatial maps")->delimiter(',');
  app.add_option("--c", f.c, "Constant of the mls error bound");
  app.add_option("--max-iter", f.max_iter, "Solver iteration budget");
  app.add_option("--opt-tol", f.opt_tol, "Solver stopping tolerance");
  app.add_option("--step", f.step, "Solver step, relative to the data scale");
  app.add_option("--threads", f.threads, "Worker threads (0 = all cores)");
}

ExperimentConfig resolve(CLI::App const &app, Flags const &f) {
  ExperimentConfig config;
  config.output_dir = default_output_dir();
  if(!f.config.empty()) {
    nlohmann::json j;
    try {
      j = read_json(f.config);
    } catch(ParseError const &e) {
      throw ConfigError(e.what());
    }
    apply_json(config, j);
  }
  auto given = [&](char const *name) { return app.count(name) > 0; };
  if(given("--output"))
    config.output_dir = f.output;
  if(given("--n-xi"))
    config.n_xi = f.n_xi;
  if(given("--n-x"))
    config.n_x = f.n_x;
  if(given("--n-y"))
    config.n_y = f.n_y;
  if(given("--q"))
    config.q = f.q;
  try {
    if(given("--basis")) {
      config.bases.clear();
      for(auto const &b : f.bases)
        config.bases.push_back(parse_basis(b));
    }
  } catch(DomainError const &e) {
    throw ConfigError(e.what());
  }
  if(given("--rho"))
    config.rho = f.rho;
  if(given("--design-rho"))
    config.design_rho = f.design_rho;
  if(given("--ratios"))
    config.ratios = f.ratios;
  if(given("--ratio"))
    config.ratio = f.ratio;
  if(given("--trials"))
    config.trials = f.trials;
  if(given("--seed"))
    config.seed = f.seed;
  if(given("--strategies")) {
    config.strategies.clear();
    for(auto const &s : f.strategies)
      config.strategies.push_back(parse_strategy(s));
  }
  if(given("--strategy"))
    config.strategy = parse_strategy(f.strategy);
  if(given("--eps"))
    config.eps_nyq = f.eps;
  if(given("--eps-relative"))
    config.eps_relative = f.eps_relative;
  if(given("--dictionary"))
    config.dictionary = f.dictionary;
  if(given("--fluorochromes"))
    config.fluorochromes = f.fluorochromes;
  if(given("--dictionary-seed"))
    config.dictionary_seed = f.dictionary_seed;
  if(given("--volume"))
    config.volume = f.volume;
  if(given("--bands"))
    config.bands = f.bands;
  if(given("--c"))
    config.c = f.c;
  if(given("--max-iter"))
    config.solver.max_iter = f.max_iter;
  if(given("--opt-tol"))
    config.solver.opt_tol = f.opt_tol;
  if(given("--step"))
    config.solver.step = f.step;
  if(given("--threads"))
    config.threads = f.threads;
  config.validate();
  return config;
}

} // namespace

int run_cli(int argc, char const *const *argv) {
  CLI::App app{"Coded-illumination FTI experiments: level schemes, coherence, sparsity profiles, "
               "sampling patterns, phase transitions and reconstruction."};
  app.fallthrough();
  app.require_subcommand(1);
  Flags flags;
  add_flags(app, flags);

  std::map<std::string, std::function<int(ExperimentConfig const &)>> const commands{
      {"levels", cmd_levels},
      {"coherence", cmd_coherence},
      {"profile", cmd_profile},
      {"sample", cmd_sample},
      {"phase-transition", cmd_phase_transition},
      {"reconstruct", cmd_reconstruct}};
  app.add_subcommand("levels", "Write the Haar and DFT level schemes");
  app.add_subcommand("coherence", "Write local coherence matrices of the DFT against each basis");
  app.add_subcommand("profile", "Write the local sparsity profile of the dictionary for every rho and basis");
  app.add_subcommand("sample", "Draw one sampling pattern and write it with its mask row");
  app.add_subcommand("phase-transition", "Success rate against measurement ratio for each strategy");
  app.add_subcommand("reconstruct", "Acquire, reconstruct and report on a hyperspectral volume");

  try {
    app.parse(argc, argv);
  } catch(CLI::ParseError const &e) {
    int const code = app.exit(e);
    return code == 0 ? exit_code::ok : exit_code::config;
  }

  try {
    ExperimentConfig const config = resolve(app, flags);
    for(auto const *sub : app.get_subcommands())
      return commands.at(sub->get_name())(config);
  } catch(ConfigError const &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_code::config;
  } catch(IoError const &e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return exit_code::io;
  } catch(ParseError const &e) {
    std::cerr << "input error: " << e.what() << '\n';
    return exit_code::io;
  } catch(std::filesystem::filesystem_error const &e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return exit_code::io;
  } catch(Error const &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::config;
  }
  return exit_code::ok;
}

int run_cli(std::vector<std::string> const &args) {
  std::vector<char const *> argv{"cifti"};
  for(auto const &a : args)
    argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

} // namespace cifti
