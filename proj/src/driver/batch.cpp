#include <omp.h>

#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <random>

#include "falsify/driver.hpp"
#include "falsify/random.hpp"

namespace falsify::driver {

Resolved resolve(const ExperimentConfig& cfg) {
  std::shared_ptr<const models::SystemModel> model;
  if (cfg.model == "external") {
    if (!cfg.external) throw std::invalid_argument("external model without a description");
    model = std::make_shared<models::ExternalModel>(*cfg.external);
  } else {
    model = models::make_model(cfg.model);
  }
  if (!cfg.spec || !cfg.K || !cfg.L || !cfg.oversample) {
    throw std::logic_error("resolve: config not finalized");
  }
  const SpecPreset* preset = find_spec_preset(*cfg.spec);
  std::string text = preset ? preset->text : *cfg.spec;
  stl::Formula phi = stl::parse(text);
  mcts::InputSpace space(model->inputs(), *cfg.K, *cfg.L, model->default_horizon());
  mcts::Problem problem = mcts::make_problem(model, phi, space, *cfg.oversample);
  return {model, std::move(phi), std::move(text), std::move(problem)};
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) {
  return master ^ static_cast<std::uint64_t>(trial);
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

hillclimb::BoxDomain search_box(const mcts::InputSpace& space) {
  const auto seg = space.full_box();
  std::vector<double> lo, hi;
  for (std::size_t i = 0; i < space.control_points(); ++i) {
    lo.insert(lo.end(), seg.lo().begin(), seg.lo().end());
    hi.insert(hi.end(), seg.hi().begin(), seg.hi().end());
  }
  return {lo, hi};
}

mcts::SearchParams search_params(const ExperimentConfig& cfg, std::uint64_t seed) {
  mcts::SearchParams p;
  p.variant = cfg.variant == Method::MctsPW ? mcts::Variant::PW : mcts::Variant::Basic;
  p.solver = cfg.solver;
  p.c = cfg.c;
  p.C = cfg.C;
  p.alpha = cfg.alpha;
  p.mcts_budget = cfg.mcts_budget;
  p.playout_evals = cfg.playout_sims;
  p.final_evals = cfg.final_sims;
  p.simulation_cap = cfg.sim_cap;
  p.playout_wall_s = cfg.playout_wall_s;
  p.final_wall_s = cfg.final_wall_s;
  p.warm_start = cfg.warm_start;
  p.seed = seed;
  return p;
}

}  // namespace

mcts::FalsificationOutcome run_random_baseline(const mcts::Problem& p, std::size_t cap,
                                               std::uint64_t seed) {
  if (cap == 0) throw std::invalid_argument("random baseline: cap must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  const auto box = search_box(p.space);
  std::mt19937_64 rng(derive_seed(seed, Stream::Baseline));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  mcts::FalsificationOutcome o;
  std::vector<double> z(box.dim());
  for (std::size_t s = 0; s < cap; ++s) {
    for (double& v : z) v = unit(rng);
    auto x = box.from_unit(z);
    auto u = mcts::to_input(p.space, x);
    double r = p.robustness(u);
    if (std::isnan(r)) r = mcts::kInf;
    ++o.simulations;
    if (r < o.robustness || o.input.levels.empty()) {
      if (r < o.robustness) o.robustness = r;
      o.input = std::move(u);
    }
    if (r < 0.0) {
      o.falsified = true;
      break;
    }
  }
  o.wall_s = seconds_since(t0);
  return o;
}

mcts::FalsificationOutcome run_hillclimb_baseline(const mcts::Problem& p, hillclimb::Solver s,
                                                  std::size_t cap, std::uint64_t seed,
                                                  std::optional<double> wall_s) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto box = search_box(p.space);
  hillclimb::Objective f = [&p](std::span<const double> x) {
    return p.robustness(mcts::to_input(p.space, x));
  };
  hillclimb::Options opt;
  opt.stop_on_negative = true;
  opt.record_history = false;
  const auto r = hillclimb::minimize(s, f, box, hillclimb::Budget{cap, wall_s},
                                     derive_seed(seed, Stream::Baseline), opt);
  mcts::FalsificationOutcome o;
  o.robustness = r.best_value;
  o.falsified = r.best_value < 0.0;
  o.input = mcts::to_input(p.space, r.best_point);
  o.simulations = r.evals_used;
  o.wall_s = seconds_since(t0);
  return o;
}

TrialResult run_trial(const ExperimentConfig& cfg, const Resolved& r, std::size_t trial,
                      std::uint64_t seed) {
  TrialResult t;
  t.trial = trial;
  t.seed = seed;
  switch (cfg.variant) {
    case Method::Random:
      t.outcome = run_random_baseline(r.problem, cfg.sim_cap, seed);
      break;
    case Method::HillClimb: {
      std::optional<double> wall;
      if (cfg.final_wall_s) wall = *cfg.final_wall_s;
      t.outcome = run_hillclimb_baseline(r.problem, cfg.solver, cfg.sim_cap, seed, wall);
      break;
    }
    case Method::MctsBasic:
    case Method::MctsPW: {
      mcts::Search search(r.problem, search_params(cfg, seed));
      t.outcome = search.run();
      if (cfg.tree_dump) t.tree = search.dump_tree();
      break;
    }
  }
  return t;
}

BatchReport run_batch(const ExperimentConfig& cfg,
                      const std::optional<std::filesystem::path>& out_dir) {
  const Resolved r = resolve(cfg);
  BatchReport b;
  b.trials.resize(cfg.trials);
  std::vector<std::exception_ptr> errors(cfg.trials);
  const int n = static_cast<int>(cfg.trials);
  const int threads = cfg.workers ? static_cast<int>(cfg.workers) : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < n; ++i) {
    const auto trial = static_cast<std::size_t>(i);
    try {
      b.trials[trial] = run_trial(cfg, r, trial, trial_seed(cfg.seed, trial));
    } catch (...) {
      errors[trial] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  double wall = 0.0, sims = 0.0;
  for (const auto& t : b.trials) {
    if (!t.outcome.falsified) continue;
    ++b.successes;
    wall += t.outcome.wall_s;
    sims += static_cast<double>(t.outcome.simulations);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  b.mean_wall_s = b.successes ? wall / static_cast<double>(b.successes) : nan;
  b.mean_simulations = b.successes ? sims / static_cast<double>(b.successes) : nan;

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    for (const auto& t : b.trials) {
      std::ofstream f(*out_dir / ("trial_" + std::to_string(t.trial) + ".json"));
      write_trial_json(f, cfg, t);
      if (!f) throw std::runtime_error("cannot write trial report in " + out_dir->string());
    }
    std::ofstream f(*out_dir / "batch.csv");
    write_batch_csv(f, cfg, b);
    if (!f) throw std::runtime_error("cannot write " + (*out_dir / "batch.csv").string());
  }
  return b;
}

std::vector<BatchReport> run_sweep(const ExperimentConfig& cfg, std::string_view param,
                                   const std::vector<std::string>& values,
                                   const std::filesystem::path& out_dir) {
  if (values.empty()) throw std::invalid_argument("sweep: no values");
  std::vector<ExperimentConfig> cfgs;
  for (const auto& v : values) {
    ExperimentConfig c = cfg;
    set_parameter(c, param, v);
    c.finalize();
    cfgs.push_back(std::move(c));
  }
  std::vector<BatchReport> out;
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    out.push_back(run_batch(cfgs[i], out_dir / (std::string(param) + "=" + values[i])));
  }
  return out;
}

}  // namespace falsify::driver
