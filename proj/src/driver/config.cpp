#include <toml.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "falsify/driver.hpp"

namespace falsify::driver {

Method parse_method(std::string_view s) {
  if (s == "random") return Method::Random;
  if (s == "hillclimb") return Method::HillClimb;
  if (s == "mcts-basic") return Method::MctsBasic;
  if (s == "mcts-pw") return Method::MctsPW;
  throw std::invalid_argument("unknown variant '" + std::string(s) +
                              "' (random, hillclimb, mcts-basic, mcts-pw)");
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Random: return "random";
    case Method::HillClimb: return "hillclimb";
    case Method::MctsBasic: return "mcts-basic";
    case Method::MctsPW: return "mcts-pw";
  }
  return "?";
}

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw std::invalid_argument(where + ": " + what);
}

template <class T>
T parse_number(std::string_view name, std::string_view text) {
  T v{};
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end) {
    throw std::invalid_argument("bad value '" + std::string(text) + "' for " + std::string(name));
  }
  return v;
}

std::vector<std::size_t> parse_partitions(std::string_view text) {
  std::vector<std::size_t> L;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t x = text.find_first_of("x,", start);
    const std::string_view part =
        text.substr(start, x == std::string_view::npos ? std::string_view::npos : x - start);
    L.push_back(parse_number<std::size_t>("L", part));
    if (x == std::string_view::npos) break;
    start = x + 1;
  }
  return L;
}

// Typed access to one TOML section that rejects keys it was not asked about.
class Section {
 public:
  Section(const toml::table& root, std::string name) : name_(std::move(name)) {
    if (const toml::node* n = root.get(name_)) {
      table_ = n->as_table();
      if (!table_) bad(name_, "must be a table");
    }
  }

  bool has(std::string_view key) const { return table_ && table_->contains(key); }

  template <class T>
  std::optional<T> get(std::string_view key) {
    seen_.insert(std::string(key));
    if (!table_) return std::nullopt;
    const toml::node* n = table_->get(key);
    if (!n) return std::nullopt;
    if constexpr (std::is_same_v<T, double>) {
      if (auto v = n->value<double>()) return *v;
    } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
      if (auto v = n->value<std::int64_t>(); v && *v >= 0) return static_cast<T>(*v);
    } else {
      if (auto v = n->value<T>()) return *v;
    }
    bad(name_ + "." + std::string(key), "wrong type");
  }

  const toml::array* array(std::string_view key) {
    seen_.insert(std::string(key));
    if (!table_) return nullptr;
    const toml::node* n = table_->get(key);
    if (!n) return nullptr;
    if (!n->is_array()) bad(name_ + "." + std::string(key), "must be an array");
    return n->as_array();
  }

  void finish() const {
    if (!table_) return;
    for (auto&& [k, v] : *table_) {
      if (!seen_.count(std::string(k.str()))) bad(name_, "unknown key '" + std::string(k.str()) + "'");
    }
  }

  const std::string& name() const { return name_; }

 private:
  std::string name_;
  const toml::table* table_ = nullptr;
  std::set<std::string> seen_;
};

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream s;
    s << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
      << e.description();
    throw std::invalid_argument(s.str());
  }
  for (auto&& [k, v] : root) {
    const std::string key(k.str());
    if (key != "model" && key != "spec" && key != "search" && key != "budget" && key != "report") {
      bad(source, "unknown section '" + key + "'");
    }
  }

  ExperimentConfig cfg;
  Section model(root, "model");
  if (auto v = model.get<std::string>("id")) cfg.model = *v;
  if (auto v = model.get<std::size_t>("oversample")) cfg.oversample = *v;
  {
    auto command = model.get<std::string>("command");
    auto horizon = model.get<double>("horizon");
    auto timeout = model.get<double>("timeout_s");
    const toml::array* inputs = model.array("inputs");
    const toml::array* outputs = model.array("outputs");
    if (cfg.model == "external") {
      models::ExternalModelSpec spec;
      if (!command) bad("model", "external model needs 'command'");
      spec.command = *command;
      if (!horizon) bad("model", "external model needs 'horizon'");
      spec.horizon = *horizon;
      if (timeout) {
        spec.timeout = std::chrono::milliseconds(static_cast<long long>(std::llround(*timeout * 1000)));
      }
      if (!inputs || !outputs) bad("model", "external model needs 'inputs' and 'outputs'");
      for (const auto& n : *inputs) {
        const toml::table* t = n.as_table();
        if (!t) bad("model.inputs", "entries must be tables {name, lo, hi}");
        auto name = (*t)["name"].value<std::string>();
        auto lo = (*t)["lo"].value<double>();
        auto hi = (*t)["hi"].value<double>();
        if (!name || !lo || !hi) bad("model.inputs", "entries need name, lo and hi");
        spec.inputs.push_back({*name, *lo, *hi});
      }
      for (const auto& n : *outputs) {
        auto s = n.value<std::string>();
        if (!s) bad("model.outputs", "entries must be strings");
        spec.outputs.push_back(*s);
      }
      cfg.external = spec;
    } else if (command || horizon || timeout || inputs || outputs) {
      bad("model", "command/inputs/outputs/horizon/timeout_s apply only to id = \"external\"");
    }
  }
  model.finish();

  Section spec(root, "spec");
  auto preset = spec.get<std::string>("preset");
  auto formula = spec.get<std::string>("formula");
  if (preset && formula) bad("spec", "give either 'preset' or 'formula', not both");
  if (preset) cfg.spec = *preset;
  if (formula) cfg.spec = *formula;
  spec.finish();

  Section search(root, "search");
  if (auto v = search.get<std::string>("variant")) cfg.variant = parse_method(*v);
  if (auto v = search.get<std::string>("solver")) cfg.solver = hillclimb::parse_solver(*v);
  if (auto v = search.get<std::size_t>("K")) cfg.K = *v;
  if (const toml::array* a = search.array("L")) {
    std::vector<std::size_t> L;
    for (const auto& n : *a) {
      auto v = n.value<std::int64_t>();
      if (!v || *v < 1) bad("search.L", "entries must be positive integers");
      L.push_back(static_cast<std::size_t>(*v));
    }
    cfg.L = L;
  }
  if (auto v = search.get<double>("c")) cfg.c = *v;
  if (auto v = search.get<double>("C")) cfg.C = *v;
  if (auto v = search.get<double>("alpha")) cfg.alpha = *v;
  if (auto v = search.get<std::size_t>("budget")) cfg.mcts_budget = *v;
  if (auto v = search.get<bool>("warm_start")) cfg.warm_start = *v;
  search.finish();

  Section budget(root, "budget");
  auto eps = budget.get<double>("evals_per_second");
  auto to_po = budget.get<double>("to_po_s");
  auto to_final = budget.get<double>("final_to_s");
  if ((to_po || to_final) && !eps) bad("budget", "to_po_s/final_to_s need evals_per_second");
  if (eps && !(*eps > 0)) bad("budget.evals_per_second", "must be > 0");
  auto to_evals = [&](double s) {
    return static_cast<std::size_t>(std::max(1.0, std::round(s * *eps)));
  };
  if (to_po) cfg.playout_sims = to_evals(*to_po);
  if (to_final) cfg.final_sims = to_evals(*to_final);
  if (auto v = budget.get<std::size_t>("playout_sims")) {
    if (to_po) bad("budget", "give either playout_sims or to_po_s");
    cfg.playout_sims = *v;
  }
  if (auto v = budget.get<std::size_t>("final_sims")) {
    if (to_final) bad("budget", "give either final_sims or final_to_s");
    cfg.final_sims = *v;
  }
  if (auto v = budget.get<std::size_t>("sim_cap")) cfg.sim_cap = *v;
  if (auto v = budget.get<double>("playout_wall_s")) cfg.playout_wall_s = *v;
  if (auto v = budget.get<double>("final_wall_s")) cfg.final_wall_s = *v;
  budget.finish();

  Section report(root, "report");
  if (auto v = report.get<std::size_t>("trials")) cfg.trials = *v;
  if (auto v = report.get<std::uint64_t>("seed")) cfg.seed = *v;
  if (auto v = report.get<std::string>("out")) cfg.out = *v;
  if (auto v = report.get<std::size_t>("workers")) cfg.workers = *v;
  if (auto v = report.get<bool>("tree_dump")) cfg.tree_dump = *v;
  if (auto v = report.get<bool>("fail_if_none")) cfg.fail_if_none = *v;
  report.finish();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot read config " + file.string());
  std::stringstream s;
  s << in.rdbuf();
  return parse_config(s.str(), file.string());
}

void ExperimentConfig::finalize() {
  if (model == "external") {
    if (!external) throw std::invalid_argument("model 'external' needs [model] command/inputs/outputs");
  } else {
    const auto ids = models::builtin_model_ids();
    if (std::find(ids.begin(), ids.end(), model) == ids.end()) {
      throw std::invalid_argument("unknown model '" + model + "'");
    }
  }
  const ModelDefaults d = model_defaults(model);
  const std::size_t inputs = external ? external->inputs.size() : d.L.size();
  if (!K) K = d.K;
  if (!L) L = external ? std::vector<std::size_t>(inputs, 2) : d.L;
  if (!oversample) oversample = d.oversample;
  if (!spec) {
    if (d.spec.empty()) throw std::invalid_argument("no specification given");
    spec = d.spec;
  }
  if (*K == 0) throw std::invalid_argument("K must be >= 1");
  if (L->size() != inputs) {
    throw std::invalid_argument("L needs " + std::to_string(inputs) + " entries for model '" +
                                model + "', got " + std::to_string(L->size()));
  }
  for (std::size_t l : *L) {
    if (l == 0) throw std::invalid_argument("L entries must be >= 1");
  }
  if (*oversample == 0) throw std::invalid_argument("oversample must be >= 1");
  if (!(c >= 0.0)) throw std::invalid_argument("c must be >= 0");
  if (!(C > 0.0)) throw std::invalid_argument("C must be > 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (mcts_budget == 0) throw std::invalid_argument("MCTS budget must be >= 1");
  if (playout_sims == 0 || final_sims == 0 || sim_cap == 0) {
    throw std::invalid_argument("simulation budgets must be >= 1");
  }
  for (auto w : {playout_wall_s, final_wall_s}) {
    if (w && !(*w > 0.0)) throw std::invalid_argument("wall-clock budgets must be > 0");
  }
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  if (out.empty()) throw std::invalid_argument("report.out must not be empty");
  if (const SpecPreset* p = find_spec_preset(*spec); p && p->model != model) {
    throw std::invalid_argument("spec preset '" + p->name + "' is for model '" + p->model +
                                "', not '" + model + "'");
  }
}

void print_config(std::ostream& out, const ExperimentConfig& cfg) {
  auto arr = [](const auto& v) {
    toml::array a;
    for (auto x : v) a.push_back(static_cast<std::int64_t>(x));
    return a;
  };
  toml::table model{{"id", cfg.model}};
  if (cfg.oversample) model.insert("oversample", static_cast<std::int64_t>(*cfg.oversample));
  if (cfg.external) {
    model.insert("command", cfg.external->command);
    model.insert("horizon", cfg.external->horizon);
    model.insert("timeout_s", static_cast<double>(cfg.external->timeout.count()) / 1000.0);
    toml::array ins, outs;
    for (const auto& r : cfg.external->inputs) {
      ins.push_back(toml::table{{"name", r.name}, {"lo", r.lo}, {"hi", r.hi}});
    }
    for (const auto& o : cfg.external->outputs) outs.push_back(o);
    model.insert("inputs", ins);
    model.insert("outputs", outs);
  }
  toml::table spec;
  if (cfg.spec) spec.insert(find_spec_preset(*cfg.spec) ? "preset" : "formula", *cfg.spec);
  toml::table search{{"variant", std::string(to_string(cfg.variant))},
                     {"solver", std::string(hillclimb::to_string(cfg.solver))},
                     {"c", cfg.c},
                     {"C", cfg.C},
                     {"alpha", cfg.alpha},
                     {"budget", static_cast<std::int64_t>(cfg.mcts_budget)},
                     {"warm_start", cfg.warm_start}};
  if (cfg.K) search.insert("K", static_cast<std::int64_t>(*cfg.K));
  if (cfg.L) search.insert("L", arr(*cfg.L));
  toml::table budget{{"playout_sims", static_cast<std::int64_t>(cfg.playout_sims)},
                     {"final_sims", static_cast<std::int64_t>(cfg.final_sims)},
                     {"sim_cap", static_cast<std::int64_t>(cfg.sim_cap)}};
  if (cfg.playout_wall_s) budget.insert("playout_wall_s", *cfg.playout_wall_s);
  if (cfg.final_wall_s) budget.insert("final_wall_s", *cfg.final_wall_s);
  if (cfg.seed > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    throw std::invalid_argument("seed too large for TOML output");
  }
  toml::table report{{"trials", static_cast<std::int64_t>(cfg.trials)},
                     {"seed", static_cast<std::int64_t>(cfg.seed)},
                     {"out", cfg.out},
                     {"workers", static_cast<std::int64_t>(cfg.workers)},
                     {"tree_dump", cfg.tree_dump},
                     {"fail_if_none", cfg.fail_if_none}};
  toml::table root{{"model", model}, {"spec", spec},     {"search", search},
                   {"budget", budget}, {"report", report}};
  out << root << '\n';
}

void set_parameter(ExperimentConfig& cfg, std::string_view name, std::string_view value) {
  if (name == "c") cfg.c = parse_number<double>(name, value);
  else if (name == "C") cfg.C = parse_number<double>(name, value);
  else if (name == "alpha") cfg.alpha = parse_number<double>(name, value);
  else if (name == "budget") cfg.mcts_budget = parse_number<std::size_t>(name, value);
  else if (name == "playout_sims") cfg.playout_sims = parse_number<std::size_t>(name, value);
  else if (name == "final_sims") cfg.final_sims = parse_number<std::size_t>(name, value);
  else if (name == "sim_cap") cfg.sim_cap = parse_number<std::size_t>(name, value);
  else if (name == "K") cfg.K = parse_number<std::size_t>(name, value);
  else if (name == "L") cfg.L = parse_partitions(value);
  else if (name == "trials") cfg.trials = parse_number<std::size_t>(name, value);
  else if (name == "seed") cfg.seed = parse_number<std::uint64_t>(name, value);
  else {
    throw std::invalid_argument(
        "unknown parameter '" + std::string(name) +
        "' (c, C, alpha, budget, playout_sims, final_sims, sim_cap, K, L, trials, seed)");
  }
}

}  // namespace falsify::driver
