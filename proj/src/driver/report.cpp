#include <json.hpp>

#include <charconv>
#include <cmath>
#include <ostream>

#include "falsify/driver.hpp"

namespace falsify::driver {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

nlohmann::json actions(const std::vector<mcts::Action>& word) {
  auto a = nlohmann::json::array();
  for (const auto& act : word) a.push_back(act);
  return a;
}

}  // namespace

void write_trial_json(std::ostream& out, const ExperimentConfig& cfg, const TrialResult& t) {
  const auto& o = t.outcome;
  nlohmann::json j;
  j["variant"] = to_string(cfg.variant);
  j["solver"] = hillclimb::to_string(cfg.solver);
  j["model"] = cfg.model;
  j["spec"] = cfg.spec.value_or("");
  j["trial"] = t.trial;
  j["seed"] = t.seed;
  j["falsified"] = o.falsified;
  j["robustness"] = number(o.robustness);
  j["simulations"] = o.simulations;
  j["preprocess_simulations"] = o.preprocess_simulations;
  j["iterations"] = o.iterations;
  j["found_in_preprocess"] = o.found_in_preprocess;
  j["wall_s"] = o.wall_s;
  j["best_prefix"] = actions(o.best_prefix);
  j["best_prefix_reward"] = number(o.best_prefix_reward);
  nlohmann::json params{{"K", cfg.K.value_or(0)},
                        {"L", cfg.L.value_or(std::vector<std::size_t>{})},
                        {"c", cfg.c},
                        {"C", cfg.C},
                        {"alpha", cfg.alpha},
                        {"budget", cfg.mcts_budget},
                        {"playout_sims", cfg.playout_sims},
                        {"final_sims", cfg.final_sims},
                        {"sim_cap", cfg.sim_cap},
                        {"warm_start", cfg.warm_start}};
  j["params"] = params;
  nlohmann::json input{{"control_points", o.input.control_points},
                       {"dims", o.input.dims},
                       {"horizon", o.input.horizon}};
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < o.input.control_points; ++i) {
    auto r = o.input.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  input["levels"] = rows;
  j["input"] = input;
  j["tree"] = {{"nodes", o.tree_stats.nodes}, {"depth_histogram", o.tree_stats.depth_histogram}};
  if (!t.tree.empty()) {
    auto nodes = nlohmann::json::array();
    for (const auto& n : t.tree) {
      nodes.push_back({{"word", actions(n.word)}, {"N", n.N}, {"R", number(n.R)}});
    }
    j["tree"]["dump"] = nodes;
  }
  out << j.dump(2) << '\n';
}

void write_batch_csv(std::ostream& out, const ExperimentConfig& cfg, const BatchReport& b) {
  out << kBatchHeader << '\n';
  for (const auto& t : b.trials) {
    const auto& o = t.outcome;
    out << to_string(cfg.variant) << ',' << hillclimb::to_string(cfg.solver) << ',' << t.trial
        << ',' << t.seed << ',' << (o.falsified ? 1 : 0) << ',' << format_double(o.robustness)
        << ',' << o.simulations << ',' << format_double(o.wall_s) << '\n';
  }
}

}  // namespace falsify::driver
