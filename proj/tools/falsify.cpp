#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "falsify/driver.hpp"

namespace fd = falsify::driver;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> model, spec, variant, solver, out;
  std::optional<std::string> K, L, c, C, alpha, budget, playout_sims, final_sims, sim_cap,
      trials, seed;
  std::optional<std::size_t> workers;
  bool no_warm_start = false;
  bool tree_dump = false;
  bool print_config = false;
  bool keep_going = false;
};

void add_overrides(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "TOML experiment config")->check(CLI::ExistingFile);
  app->add_option("--model", o.model, "model id: ffr, car, external");
  app->add_option("--spec", o.spec, "spec preset name or STL formula");
  app->add_option("--variant", o.variant, "random, hillclimb, mcts-basic, mcts-pw");
  app->add_option("--solver", o.solver, "sa, gnm, cmaes");
  app->add_option("--K", o.K, "control points");
  app->add_option("--L", o.L, "partitions per input dimension, e.g. 3x5");
  app->add_option("--c", o.c, "UCB exploration constant");
  app->add_option("--C", o.C, "progressive widening constant");
  app->add_option("--alpha", o.alpha, "progressive widening exponent");
  app->add_option("--budget", o.budget, "MCTS iterations");
  app->add_option("--playout-sims", o.playout_sims, "simulations per playout");
  app->add_option("--final-sims", o.final_sims, "simulations for the final hill-climb");
  app->add_option("--sim-cap", o.sim_cap, "simulations per trial");
  app->add_option("--trials", o.trials, "number of trials");
  app->add_option("--seed", o.seed, "master seed");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--workers", o.workers, "worker threads, 0 for all cores");
  app->add_flag("--no-warm-start", o.no_warm_start, "final hill-climb starts cold");
  app->add_flag("--tree-dump", o.tree_dump, "include the search tree in trial reports");
  app->add_flag("--print-effective-config", o.print_config, "print the merged config and exit");
  app->add_flag("--no-fail-if-none", o.keep_going, "exit 0 even when nothing was falsified");
}

fd::ExperimentConfig merge(const Overrides& o) {
  fd::ExperimentConfig cfg = o.config.empty() ? fd::ExperimentConfig{} : fd::load_config(o.config);
  if (o.model && *o.model != cfg.model) {
    cfg.model = *o.model;
    cfg.K.reset();
    cfg.L.reset();
    cfg.oversample.reset();
    if (!o.spec) cfg.spec.reset();
  }
  if (o.spec) cfg.spec = *o.spec;
  if (o.variant) cfg.variant = fd::parse_method(*o.variant);
  if (o.solver) cfg.solver = falsify::hillclimb::parse_solver(*o.solver);
  if (o.out) cfg.out = *o.out;
  if (o.workers) cfg.workers = *o.workers;
  if (o.no_warm_start) cfg.warm_start = false;
  if (o.tree_dump) cfg.tree_dump = true;
  if (o.keep_going) cfg.fail_if_none = false;
  const std::pair<const char*, const std::optional<std::string>*> params[] = {
      {"K", &o.K},           {"L", &o.L},
      {"c", &o.c},           {"C", &o.C},
      {"alpha", &o.alpha},   {"budget", &o.budget},
      {"playout_sims", &o.playout_sims}, {"final_sims", &o.final_sims},
      {"sim_cap", &o.sim_cap}, {"trials", &o.trials},
      {"seed", &o.seed}};
  for (const auto& [name, v] : params) {
    if (*v) fd::set_parameter(cfg, name, **v);
  }
  cfg.finalize();
  return cfg;
}

void summarize(const fd::ExperimentConfig& cfg, const fd::BatchReport& b, std::ostream& out) {
  out << fd::to_string(cfg.variant) << '/' << falsify::hillclimb::to_string(cfg.solver) << ": "
      << b.successes << '/' << b.trials.size() << " falsified";
  if (b.successes) {
    out << ", mean " << fd::format_double(b.mean_simulations) << " simulations, "
        << fd::format_double(b.mean_wall_s) << " s";
  }
  out << '\n';
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    out.push_back(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Falsification of hybrid systems by MCTS-guided hill-climbing"};
  app.require_subcommand(1);

  Overrides run_opts;
  CLI::App* run = app.add_subcommand("run", "run a batch of falsification trials");
  add_overrides(run, run_opts);

  Overrides sweep_opts;
  std::string param;
  std::string values;
  CLI::App* sweep = app.add_subcommand("sweep", "one batch per value of a parameter");
  add_overrides(sweep, sweep_opts);
  sweep->add_option("--param", param, "parameter to vary")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();

  std::string model_id, spec, input_path, external_config;
  std::size_t oversample = 0;
  CLI::App* rob = app.add_subcommand("robustness", "simulate one input and print its robustness");
  rob->add_option("--model", model_id, "model id")->required();
  rob->add_option("--spec", spec, "spec preset name or STL formula")->required();
  rob->add_option("--input", input_path, "input signal CSV (t,<inputs...>)")
      ->required()
      ->check(CLI::ExistingFile);
  rob->add_option("--config", external_config, "TOML config describing an external model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      const auto cfg = merge(run_opts);
      if (run_opts.print_config) {
        fd::print_config(std::cout, cfg);
        return 0;
      }
      const auto b = fd::run_batch(cfg, std::filesystem::path(cfg.out));
      summarize(cfg, b, std::cout);
      return (b.successes > 0 || !cfg.fail_if_none) ? 0 : 1;
    }
    if (*sweep) {
      const auto cfg = merge(sweep_opts);
      if (sweep_opts.print_config) {
        fd::print_config(std::cout, cfg);
        return 0;
      }
      const auto vals = split(values);
      const auto reports = fd::run_sweep(cfg, param, vals, cfg.out);
      std::size_t total = 0;
      for (std::size_t i = 0; i < reports.size(); ++i) {
        std::cout << param << '=' << vals[i] << "  ";
        summarize(cfg, reports[i], std::cout);
        total += reports[i].successes;
      }
      return (total > 0 || !cfg.fail_if_none) ? 0 : 1;
    }
    if (*rob) {
      fd::ExperimentConfig cfg;
      if (!external_config.empty()) cfg = fd::load_config(external_config);
      cfg.model = model_id;
      cfg.spec = spec;
      cfg.finalize();
      const auto r = fd::resolve(cfg);
      std::ifstream in(input_path);
      const falsify::Signal u = falsify::read_csv(in);
      const falsify::Signal w = r.model->simulate(u);
      std::cout << fd::format_double(falsify::stl::robustness(w, r.formula)) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "falsify: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
