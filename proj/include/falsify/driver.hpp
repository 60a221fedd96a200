#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "falsify/hillclimb.hpp"
#include "falsify/mcts.hpp"
#include "falsify/models.hpp"
#include "falsify/stl.hpp"

namespace falsify::driver {

enum class Method { Random, HillClimb, MctsBasic, MctsPW };
Method parse_method(std::string_view s);
std::string_view to_string(Method m);

struct SpecPreset {
  std::string name;
  std::string model;
  std::string text;
};

const std::vector<SpecPreset>& spec_presets();
/// Preset by name, nullptr if there is none.
const SpecPreset* find_spec_preset(std::string_view name);

/// Per-model defaults for the time-staging parameters.
struct ModelDefaults {
  std::size_t K;
  std::vector<std::size_t> L;
  std::size_t oversample;
  std::string spec;
};
ModelDefaults model_defaults(std::string_view model_id);

struct ExperimentConfig {
  // [model]
  std::string model = "ffr";
  std::optional<models::ExternalModelSpec> external;
  std::optional<std::size_t> oversample;
  // [spec]: preset name or formula text
  std::optional<std::string> spec;
  // [search]
  Method variant = Method::MctsBasic;
  hillclimb::Solver solver = hillclimb::Solver::CMAES;
  std::optional<std::size_t> K;
  std::optional<std::vector<std::size_t>> L;
  double c = 0.2;
  double C = 0.7;
  double alpha = 0.85;
  std::size_t mcts_budget = 40;
  bool warm_start = true;
  // [budget]
  std::size_t playout_sims = 100;
  std::size_t final_sims = 2000;
  std::size_t sim_cap = 6000;
  std::optional<double> playout_wall_s;
  std::optional<double> final_wall_s;
  // [report]
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  std::string out = "falsify-out";
  /// Worker threads for trials, 0 for the OpenMP default.
  std::size_t workers = 0;
  bool tree_dump = false;
  /// Exit non-zero when no trial falsified.
  bool fail_if_none = true;

  /// Fills model-dependent defaults and validates everything. Throws
  /// std::invalid_argument with a readable message.
  void finalize();

  std::size_t k() const { return *K; }
  const std::vector<std::size_t>& l() const { return *L; }
};

/// Reads a TOML config. Unknown keys are errors.
ExperimentConfig load_config(const std::filesystem::path& file);
ExperimentConfig parse_config(std::string_view toml_text, const std::string& source = "config");
/// The finalized config as TOML, loadable by parse_config.
void print_config(std::ostream& out, const ExperimentConfig& cfg);

/// Sets one parameter from its textual value; used by sweeps and CLI
/// overrides. Names: c, C, alpha, budget, playout_sims, final_sims, sim_cap,
/// K, L (as "3x5"), trials, seed.
void set_parameter(ExperimentConfig& cfg, std::string_view name, std::string_view value);

/// Model, formula and input space of a finalized config.
struct Resolved {
  std::shared_ptr<const models::SystemModel> model;
  stl::Formula formula;
  std::string spec_text;
  mcts::Problem problem;
};
Resolved resolve(const ExperimentConfig& cfg);

struct TrialResult {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  mcts::FalsificationOutcome outcome;
  std::vector<mcts::NodeDump> tree;
};

struct BatchReport {
  std::vector<TrialResult> trials;
  std::size_t successes = 0;
  /// Means over successful trials, NaN when there are none.
  double mean_wall_s = 0.0;
  double mean_simulations = 0.0;
};

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial);

/// One trial with seed `seed`.
TrialResult run_trial(const ExperimentConfig& cfg, const Resolved& r, std::size_t trial,
                      std::uint64_t seed);

/// Uniform i.i.d. piecewise-constant inputs until falsified or the cap.
mcts::FalsificationOutcome run_random_baseline(const mcts::Problem& p, std::size_t cap,
                                               std::uint64_t seed);
/// One solver run over the full K x M box with the whole cap.
mcts::FalsificationOutcome run_hillclimb_baseline(const mcts::Problem& p, hillclimb::Solver s,
                                                  std::size_t cap, std::uint64_t seed,
                                                  std::optional<double> wall_s = {});

/// Runs cfg.trials trials concurrently. When `out_dir` is set, writes
/// trial_<i>.json and batch.csv there.
BatchReport run_batch(const ExperimentConfig& cfg,
                      const std::optional<std::filesystem::path>& out_dir = {});

/// One batch per value under out_dir/<param>=<value>/, all with the same
/// master seed.
std::vector<BatchReport> run_sweep(const ExperimentConfig& cfg, std::string_view param,
                                   const std::vector<std::string>& values,
                                   const std::filesystem::path& out_dir);

// Reports ------------------------------------------------------------------

inline constexpr std::string_view kBatchHeader =
    "variant,solver,trial,seed,falsified,robustness,simulations,wall_s";

/// Shortest round-trip text for a double; "inf" and "-inf" for infinities.
std::string format_double(double v);

void write_trial_json(std::ostream& out, const ExperimentConfig& cfg, const TrialResult& t);
void write_batch_csv(std::ostream& out, const ExperimentConfig& cfg, const BatchReport& b);

}  // namespace falsify::driver
