#include "cifti/experiments.hpp"
#include "cifti/coherence.hpp"
#include "cifti/io.hpp"
#include "cifti/parallel.hpp"
#include "cifti/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <set>
#include <sstream>

namespace cifti {

std::string_view to_string(Strategy strategy) {
  switch(strategy) {
  case Strategy::mls_dhw:
    return "mls-dhw";
  case Strategy::mls_dft:
    return "mls-dft";
  case Strategy::initial_vds:
    return "initial-vds";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for(auto const s : {Strategy::mls_dhw, Strategy::mls_dft, Strategy::initial_vds})
    if(name == to_string(s))
      return s;
  throw ConfigError("unknown strategy '" + std::string(name)
                    + "' (expected mls-dhw, mls-dft or initial-vds)");
}

Approach approach_of(Strategy strategy) {
  return strategy == Strategy::initial_vds ? Approach::initial_vds : Approach::mls_this_work;
}

Basis sparsity_basis(Strategy strategy) { return strategy == Strategy::mls_dft ? Basis::dft : Basis::dhw; }

std::filesystem::path default_output_dir() {
  if(char const *env = std::getenv("CIFTI_OUTPUT_DIR"); env && *env)
    return env;
  return "cifti-out";
}

namespace {

void require(bool ok, std::string const &message) {
  if(!ok)
    throw ConfigError(message);
}

bool in_unit_interval(t_real v) { return v > 0 && v <= 1; }

} // namespace

void ExperimentConfig::validate() const {
  require(n_xi >= 4 && is_power_of_two(n_xi), "N_xi must be a power of two >= 4, got " + std::to_string(n_xi));
  require(n_x >= 1 && n_y >= 1, "N_x and N_y must be positive");
  require(q >= 0 && (t_index(1) << std::min(q, 62)) <= n_xi / 2 && (n_xi / 2) % (t_index(1) << q) == 0,
          "q = " + std::to_string(q) + " needs 2^q to divide N_xi/2");
  require(!bases.empty(), "at least one basis is required");
  require(!rho.empty(), "at least one rho is required");
  for(auto const r : rho)
    require(in_unit_interval(r), "rho values must lie in (0, 1]");
  require(in_unit_interval(design_rho), "design_rho must lie in (0, 1]");
  require(!ratios.empty(), "the ratio grid is empty");
  for(auto const r : ratios)
    require(in_unit_interval(r), "ratios must lie in (0, 1], got " + format_number(r));
  require(in_unit_interval(ratio), "ratio must lie in (0, 1], got " + format_number(ratio));
  require(trials >= 1, "trials must be >= 1");
  require(!strategies.empty(), "at least one strategy is required");
  require(eps_nyq >= 0, "eps_nyq must be nonnegative");
  require(fluorochromes >= 1, "fluorochromes must be >= 1");
  for(auto const b : bands)
    require(b >= 0 && b < n_xi, "band " + std::to_string(b) + " outside [0, N_xi)");
  require(c > 0, "c must be positive");
  require(solver.max_iter >= 1 && solver.step > 0 && solver.opt_tol > 0 && solver.feas_tol >= 0,
          "invalid solver options");
  if(dictionary)
    require(std::filesystem::is_regular_file(*dictionary), "dictionary '" + dictionary->string() + "' not found");
  if(volume)
    require(std::filesystem::is_regular_file(*volume), "volume '" + volume->string() + "' not found");
}

void apply_json(ExperimentConfig &config, nlohmann::json const &j) {
  require(j.is_object(), "config must be a JSON object");
  try {
    for(auto const &[key, value] : j.items()) {
      if(key == "N_xi")
        config.n_xi = value.get<t_index>();
      else if(key == "N_x")
        config.n_x = value.get<t_index>();
      else if(key == "N_y")
        config.n_y = value.get<t_index>();
      else if(key == "q")
        config.q = value.get<int>();
      else if(key == "bases") {
        config.bases.clear();
        for(auto const &b : value)
          config.bases.push_back(parse_basis(b.get<std::string>()));
      } else if(key == "rho")
        config.rho = value.get<std::vector<t_real>>();
      else if(key == "design_rho")
        config.design_rho = value.get<t_real>();
      else if(key == "ratios")
        config.ratios = value.get<std::vector<t_real>>();
      else if(key == "ratio")
        config.ratio = value.get<t_real>();
      else if(key == "trials")
        config.trials = value.get<t_index>();
      else if(key == "seed")
        config.seed = value.get<std::uint64_t>();
      else if(key == "strategies") {
        config.strategies.clear();
        for(auto const &s : value)
          config.strategies.push_back(parse_strategy(s.get<std::string>()));
      } else if(key == "strategy")
        config.strategy = parse_strategy(value.get<std::string>());
      else if(key == "eps_nyq")
        config.eps_nyq = value.get<t_real>();
      else if(key == "eps_relative")
        config.eps_relative = value.get<bool>();
      else if(key == "dictionary")
        config.dictionary = value.get<std::string>();
      else if(key == "fluorochromes")
        config.fluorochromes = value.get<t_index>();
      else if(key == "dictionary_seed")
        config.dictionary_seed = value.get<std::uint64_t>();
      else if(key == "volume")
        config.volume = value.get<std::string>();
      else if(key == "bands")
        config.bands = value.get<std::vector<t_index>>();
      else if(key == "c")
        config.c = value.get<t_real>();
      else if(key == "max_iter")
        config.solver.max_iter = value.get<t_index>();
      else if(key == "opt_tol")
        config.solver.opt_tol = value.get<t_real>();
      else if(key == "feas_tol")
        config.solver.feas_tol = value.get<t_real>();
      else if(key == "step")
        config.solver.step = value.get<t_real>();
      else if(key == "threads")
        config.threads = value.get<unsigned>();
      else if(key == "output_dir")
        config.output_dir = value.get<std::string>();
      else
        throw ConfigError("unknown config key '" + key + "'");
    }
  } catch(nlohmann::json::exception const &e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch(DomainError const &e) {
    throw ConfigError(e.what());
  }
}

// The output directory and thread count do not affect results and are left out
// so that artifacts of identical runs stay byte-identical wherever they land.
nlohmann::json to_json(ExperimentConfig const &config) {
  std::vector<std::string> bases, strategies;
  for(auto const b : config.bases)
    bases.emplace_back(to_string(b));
  for(auto const s : config.strategies)
    strategies.emplace_back(to_string(s));
  nlohmann::json j{{"N_xi", config.n_xi},
                   {"N_x", config.n_x},
                   {"N_y", config.n_y},
                   {"q", config.q},
                   {"bases", bases},
                   {"rho", config.rho},
                   {"design_rho", config.design_rho},
                   {"ratios", config.ratios},
                   {"ratio", config.ratio},
                   {"trials", config.trials},
                   {"seed", config.seed},
                   {"strategies", strategies},
                   {"strategy", std::string(to_string(config.strategy))},
                   {"eps_nyq", config.eps_nyq},
                   {"eps_relative", config.eps_relative},
                   {"fluorochromes", config.fluorochromes},
                   {"dictionary_seed", config.dictionary_seed},
                   {"bands", config.bands},
                   {"c", config.c},
                   {"max_iter", config.solver.max_iter},
                   {"opt_tol", config.solver.opt_tol},
                   {"feas_tol", config.solver.feas_tol},
                   {"step", config.solver.step}};
  if(config.dictionary)
    j["dictionary"] = config.dictionary->string();
  if(config.volume)
    j["volume"] = config.volume->string();
  return j;
}

t_index rows_for_ratio(t_real ratio, t_index n) {
  // the small slack keeps ratios such as 0.1 * 1000 from rounding down a row
  return std::clamp<t_index>(static_cast<t_index>(std::floor(ratio * t_real(n) + 1e-9)), 0, n);
}

SpectralDictionary experiment_dictionary(ExperimentConfig const &config) {
  if(config.dictionary)
    return load_dictionary(*config.dictionary, config.n_xi);
  return synth_dictionary(config.fluorochromes, config.n_xi, config.dictionary_seed);
}

LevelScheme sparsity_levels(Basis psi, ExperimentConfig const &config) {
  return psi == Basis::dft ? build_dft_levels(config.n_xi, config.q) : build_dhw_sparsity_levels(config.n_xi);
}

StrategyPlan plan_strategy(Strategy strategy, SpectralDictionary const &dictionary, ExperimentConfig const &config) {
  StrategyPlan plan{strategy, sparsity_basis(strategy), {}, {}};
  if(strategy == Strategy::mls_dft) {
    plan.W = build_dft_levels(config.n_xi, config.q);
  } else if(strategy == Strategy::mls_dhw) {
    plan.W = build_dhw_sampling_levels(config.n_xi);
    auto const profile
        = estimate_profile(dictionary, Basis::dhw, build_dhw_sparsity_levels(config.n_xi), config.design_rho);
    plan.weights = dhw_level_weights(profile.k);
  } else {
    plan.W.N = config.n_xi;
  }
  return plan;
}

SamplingPattern draw_pattern(StrategyPlan const &plan, t_index m_xi, std::uint64_t seed) {
  t_index const n = plan.W.N;
  if(m_xi >= n)
    return nyquist_pattern(n);
  switch(plan.strategy) {
  case Strategy::mls_dft:
    return sample_mls(plan.W, allocate_in_order(plan.W, m_xi), seed);
  case Strategy::mls_dhw:
    return sample_mls(plan.W, allocate_proportional(plan.W, plan.weights, m_xi), seed);
  case Strategy::initial_vds:
    break;
  }
  if(m_xi <= 0) {
    SamplingPattern empty;
    empty.kind = PatternKind::vds;
    empty.N = n;
    empty.seed = seed;
    empty.alpha_factor = 0;
    return empty;
  }
  return sample_vds(n, m_xi, seed);
}

PhaseTransition run_phase_transition(ExperimentConfig const &config) {
  config.validate();
  auto const dictionary = experiment_dictionary(config);
  t_index const n = config.n_xi;
  t_index const n_ratios = static_cast<t_index>(config.ratios.size());
  PhaseTransition out;
  for(auto const strategy : config.strategies) {
    StrategyPlan const plan = plan_strategy(strategy, dictionary, config);
    std::uint64_t const tag = hash_tag(to_string(strategy));
    std::vector<char> success(static_cast<std::size_t>(n_ratios * config.trials), 0);
    std::vector<char> failed(success.size(), 0);
    parallel_for(n_ratios * config.trials, config.threads, [&](t_index task) {
      t_index const ri = task / config.trials, trial = task % config.trials;
      std::uint64_t const trial_seed
          = derive_seed(config.seed, {tag, static_cast<std::uint64_t>(ri), static_cast<std::uint64_t>(trial)});
      Rng rng(derive_seed(trial_seed, {0}));
      RealVector g(dictionary.size());
      for(auto &gi : g)
        gi = rng.uniform();
      RealVector const x = dictionary.H * g;
      SamplingPattern const pattern
          = draw_pattern(plan, rows_for_ratio(config.ratios[ri], n), derive_seed(trial_seed, {1}));
      SolverResult const result = BpdnSolver(pattern, plan.psi, config.solver).solve(measure(x, pattern), 0);
      t_real const ref = x.squaredNorm();
      t_real const err = ref > 0 ? (result.u - x).squaredNorm() / ref : (result.u.squaredNorm() > 0 ? 1 : 0);
      failed[task] = result.status != SolverStatus::converged;
      success[task] = !failed[task] && err <= success_threshold;
    });
    std::optional<t_real> crossing;
    for(t_index ri = 0; ri < n_ratios; ++ri) {
      PhasePoint point{strategy, config.ratios[ri], rows_for_ratio(config.ratios[ri], n), config.trials, 0, 0};
      for(t_index t = 0; t < config.trials; ++t) {
        point.successes += success[ri * config.trials + t];
        point.solver_failures += failed[ri * config.trials + t];
      }
      if(point.rate() >= crossing_level && (!crossing || point.ratio < *crossing))
        crossing = point.ratio;
      out.points.push_back(point);
    }
    out.crossing.push_back(crossing);
  }
  return out;
}

HSVolume synthetic_volume(SpectralDictionary const &dictionary, ExperimentConfig const &config) {
  t_index const n_p = config.n_x * config.n_y;
  Rng rng(derive_seed(config.seed, {hash_tag("concentrations")}));
  RealMatrix G(dictionary.size(), n_p);
  // column by column so that pixel j's mixture does not depend on N_p
  for(t_index j = 0; j < n_p; ++j)
    for(t_index i = 0; i < dictionary.size(); ++i)
      G(i, j) = rng.uniform();
  HSVolume volume = lmm_mix(dictionary, G);
  volume.shape = SpatialShape{config.n_x, config.n_y};
  return volume;
}

namespace {

LevelScheme single_level(t_index n) {
  LevelScheme T;
  T.N = n;
  T.kind = LevelKind::dhw_sparsity;
  T.boundaries = {n};
  T.levels.resize(1);
  for(t_index i = 0; i < n; ++i)
    T.levels[0].push_back(i);
  return T;
}

} // namespace

ReconstructionRun run_reconstruction(ExperimentConfig const &requested) {
  ReconstructionRun run;
  run.config = requested;
  auto &config = run.config;
  // a volume on disk fixes the cube dimensions
  if(config.volume) {
    run.truth = load_volume(*config.volume);
    config.n_xi = run.truth.bands();
    config.n_x = run.truth.shape ? run.truth.shape->nx : run.truth.pixels();
    config.n_y = run.truth.shape ? run.truth.shape->ny : 1;
  }
  config.validate();
  auto const dictionary = experiment_dictionary(config);
  if(!config.volume)
    run.truth = synthetic_volume(dictionary, config);

  StrategyPlan const plan = plan_strategy(config.strategy, dictionary, config);
  SamplingPattern const pattern = draw_pattern(plan, rows_for_ratio(config.ratio, config.n_xi),
                                               derive_seed(config.seed, {hash_tag("pattern")}));
  t_real const eps = config.eps_relative ? config.eps_nyq * run.truth.X.norm() : config.eps_nyq;
  NoiseModel const noise{eps > 0 ? NoiseKind::gaussian_bounded : NoiseKind::none, eps,
                         derive_seed(config.seed, {hash_tag("noise")})};
  run.measurements = acquire(run.truth, pattern, noise);

  // sparsity model behind the error bound: per-level k for mls, a single K for vds
  LevelScheme const T = sparsity_levels(plan.psi, config);
  auto const profile = estimate_profile(dictionary, plan.psi, T, config.design_rho);
  t_index K = 0;
  for(auto const k : profile.k)
    K += k;

  ReconOptions options;
  options.psi = plan.psi;
  options.approach = approach_of(config.strategy);
  options.c = config.c;
  options.sparsity = K;
  options.solver = config.solver;
  options.threads = config.threads;
  run.result = reconstruct(run.measurements, options, &run.truth);

  ReconReport report = options.approach == Approach::initial_vds
                           ? error_report(run.truth, run.result.X_hat, {K}, single_level(config.n_xi),
                                          plan.psi, run.result.report.bound, eps)
                           : error_report(run.truth, run.result.X_hat, profile.k, T, plan.psi,
                                          run.result.report.bound, eps);
  report.statuses = run.result.report.statuses;
  report.iterations = run.result.report.iterations;
  report.tau = run.result.report.tau;
  run.result.report = std::move(report);
  return run;
}

namespace {

std::string csv_text(auto &&fill) {
  std::ostringstream out;
  CsvWriter csv(out);
  fill(csv);
  return out.str();
}

void announce(std::filesystem::path const &path) { std::cout << path.string() << '\n'; }

void emit_json(ExperimentConfig const &config, std::string const &name, nlohmann::json const &j) {
  auto const path = config.output_dir / name;
  write_json(path, j);
  announce(path);
}

void emit_text(ExperimentConfig const &config, std::string const &name, std::string const &text) {
  auto const path = config.output_dir / name;
  write_text(path, text);
  announce(path);
}

std::vector<LevelScheme> all_schemes(ExperimentConfig const &config) {
  return {build_dhw_sparsity_levels(config.n_xi), build_dhw_sampling_levels(config.n_xi),
          build_dft_levels(config.n_xi, config.q)};
}

} // namespace

int cmd_levels(ExperimentConfig const &config) {
  config.validate();
  auto const schemes = all_schemes(config);
  nlohmann::json j = nlohmann::json::array();
  for(auto const &scheme : schemes) {
    auto const problems = validate_scheme(scheme);
    if(!problems.empty())
      throw Error("level scheme " + std::string(to_string(scheme.kind)) + " is invalid: " + problems.front());
    j.push_back(scheme);
  }
  emit_json(config, "levels.json", {{"config", to_json(config)}, {"schemes", j}});
  emit_text(config, "levels.csv", csv_text([&](CsvWriter &csv) {
              csv.row({"scheme", "level", "size", "index"});
              for(auto const &scheme : schemes)
                for(t_index l = 0; l < scheme.r(); ++l)
                  for(auto const i : scheme.levels[l])
                    csv.field(to_string(scheme.kind)).field(l + 1).field(scheme.size(l)).field(i + 1).end_row();
            }));
  return exit_code::ok;
}

int cmd_coherence(ExperimentConfig const &config) {
  config.validate();
  nlohmann::json j = nlohmann::json::array();
  std::vector<CoherenceMatrix> matrices;
  for(auto const psi : config.bases) {
    LevelScheme const W = psi == Basis::dft ? build_dft_levels(config.n_xi, config.q)
                                            : build_dhw_sampling_levels(config.n_xi);
    matrices.push_back(local_coherence(Basis::dft, psi, W, sparsity_levels(psi, config)));
    j.push_back(to_json(matrices.back()));
  }
  emit_json(config, "coherence.json", {{"config", to_json(config)}, {"matrices", j}});
  emit_text(config, "coherence.csv", csv_text([&](CsvWriter &csv) {
              csv.row({"phi", "psi", "t", "l", "mu"});
              for(auto const &m : matrices)
                for(t_index t = 0; t < m.values.rows(); ++t)
                  for(t_index l = 0; l < m.values.cols(); ++l)
                    csv.field(to_string(m.phi)).field(to_string(m.psi)).field(t + 1).field(l + 1)
                        .field(m.values(t, l)).end_row();
            }));
  return exit_code::ok;
}

int cmd_profile(ExperimentConfig const &config) {
  config.validate();
  auto const dictionary = experiment_dictionary(config);
  nlohmann::json j = nlohmann::json::array();
  for(auto const psi : config.bases) {
    LevelScheme const T = sparsity_levels(psi, config);
    std::vector<LocalSparsityProfile> profiles;
    for(auto const rho : config.rho) {
      profiles.push_back(estimate_profile(dictionary, psi, T, rho));
      j.push_back(to_json(profiles.back()));
    }
    emit_text(config, "profile_" + std::string(to_string(psi)) + ".csv", csv_text([&](CsvWriter &csv) {
                csv.field("rho");
                for(t_index l = 0; l < T.r(); ++l)
                  csv.field("level_" + std::to_string(l + 1));
                csv.end_row();
                for(auto const &p : profiles) {
                  csv.field(p.rho);
                  for(auto const v : p.ratios())
                    csv.field(v);
                  csv.end_row();
                }
              }));
  }
  emit_json(config, "profile.json", {{"config", to_json(config)},
                                     {"fluorochromes", dictionary.names},
                                     {"clamped", dictionary.clamped},
                                     {"profiles", j}});
  return exit_code::ok;
}

int cmd_sample(ExperimentConfig const &config) {
  config.validate();
  auto const dictionary = experiment_dictionary(config);
  StrategyPlan const plan = plan_strategy(config.strategy, dictionary, config);
  SamplingPattern const pattern = draw_pattern(plan, rows_for_ratio(config.ratio, config.n_xi),
                                               derive_seed(config.seed, {hash_tag("pattern")}));
  emit_json(config, "pattern.json", {{"config", to_json(config)},
                                     {"strategy", std::string(to_string(config.strategy))},
                                     {"pattern", to_json(pattern)}});
  std::ostringstream mask;
  write_mask_row(mask, pattern);
  emit_text(config, "mask.csv", mask.str());
  return exit_code::ok;
}

int cmd_phase_transition(ExperimentConfig const &config) {
  auto const result = run_phase_transition(config);
  emit_text(config, "phase_transition.csv", csv_text([&](CsvWriter &csv) {
              csv.row({"strategy", "ratio", "M", "trials", "successes", "success_rate", "solver_failures"});
              for(auto const &p : result.points)
                csv.field(to_string(p.strategy)).field(p.ratio).field(p.m).field(p.trials).field(p.successes)
                    .field(p.rate()).field(p.solver_failures).end_row();
            }));
  nlohmann::json crossing = nlohmann::json::object();
  for(std::size_t i = 0; i < config.strategies.size(); ++i)
    crossing[std::string(to_string(config.strategies[i]))]
        = result.crossing[i] ? nlohmann::json(*result.crossing[i]) : nlohmann::json(nullptr);
  nlohmann::json points = nlohmann::json::array();
  for(auto const &p : result.points)
    points.push_back({{"strategy", std::string(to_string(p.strategy))},
                      {"ratio", p.ratio},
                      {"M", p.m},
                      {"trials", p.trials},
                      {"successes", p.successes},
                      {"success_rate", p.rate()},
                      {"solver_failures", p.solver_failures}});
  emit_json(config, "phase_transition.json", {{"config", to_json(config)},
                                              {"success_threshold", success_threshold},
                                              {"crossing_level", crossing_level},
                                              {"crossing", crossing},
                                              {"points", points}});
  return exit_code::ok;
}

int cmd_reconstruct(ExperimentConfig const &requested) {
  auto const run = run_reconstruction(requested);
  auto const &config = run.config;
  auto const &xhat = run.result.X_hat;
  save_volume(config.output_dir / "xhat.bin", xhat);
  announce(config.output_dir / "xhat.bin");
  if(!config.volume) {
    save_volume(config.output_dir / "truth.bin", run.truth);
    announce(config.output_dir / "truth.bin");
  }
  save_measurements(config.output_dir / "measurements.bin", run.measurements);
  announce(config.output_dir / "measurements.bin");

  std::ostringstream mask;
  write_mask_row(mask, run.measurements.pattern);
  emit_text(config, "mask.csv", mask.str());

  std::vector<t_index> bands = config.bands;
  if(bands.empty())
    bands = {config.n_xi / 4, config.n_xi / 2, 3 * config.n_xi / 4};
  for(auto const b : bands) {
    std::ostringstream map;
    write_band_map(map, xhat, b);
    emit_text(config, "band_" + std::to_string(b) + ".csv", map.str());
  }

  nlohmann::json report = to_json(run.result.report);
  report["config"] = to_json(config);
  report["strategy"] = std::string(to_string(config.strategy));
  report["M"] = run.measurements.pattern.size();
  emit_json(config, "report.json", report);

  auto const &statuses = run.result.report.statuses;
  bool const budget_hit = std::any_of(statuses.begin(), statuses.end(),
                                      [](SolverStatus s) { return s == SolverStatus::max_iter; });
  if(budget_hit) {
    std::cerr << "warning: " << run.result.report.failures() << " pixel(s) did not converge\n";
    return exit_code::solver;
  }
  return exit_code::ok;
}

} // namespace cifti
