#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "falsify/driver.hpp"
#include "falsify/random.hpp"

using namespace falsify;
using namespace falsify::driver;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("falsify_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream s(line);
    std::string c;
    while (std::getline(s, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

ExperimentConfig quick_ffr() {
  ExperimentConfig c;
  c.playout_sims = 10;
  c.final_sims = 100;
  c.sim_cap = 200;
  c.mcts_budget = 8;
  c.trials = 3;
  c.seed = 5;
  c.finalize();
  return c;
}

}  // namespace

TEST_CASE("presets parse and refer to their model's outputs") {
  for (const auto& p : spec_presets()) {
    CAPTURE(p.name);
    const auto phi = stl::parse(p.text);
    const auto m = models::make_model(p.model);
    for (const auto& v : stl::variables(phi)) {
      CHECK(std::find(m->outputs().begin(), m->outputs().end(), v) != m->outputs().end());
    }
  }
  CHECK(find_spec_preset("s4") != nullptr);
  CHECK(find_spec_preset("nope") == nullptr);
}

TEST_CASE("finalize fills model defaults") {
  ExperimentConfig c;
  c.finalize();
  CHECK(c.k() == 3);
  CHECK(c.l() == std::vector<std::size_t>{2, 2, 2, 2});
  CHECK(*c.spec == "strap");

  ExperimentConfig car;
  car.model = "car";
  car.finalize();
  CHECK(car.k() == 5);
  CHECK(car.l() == std::vector<std::size_t>{3, 5});
  CHECK(*car.spec == "s1");

  ExperimentConfig bad;
  bad.model = "car";
  bad.spec = "strap";
  CHECK_THROWS_AS(bad.finalize(), std::invalid_argument);
  ExperimentConfig badL;
  badL.L = std::vector<std::size_t>{2, 2};
  CHECK_THROWS_AS(badL.finalize(), std::invalid_argument);
  ExperimentConfig alpha;
  alpha.alpha = 1.5;
  CHECK_THROWS_AS(alpha.finalize(), std::invalid_argument);
}

TEST_CASE("config parsing") {
  const auto c = parse_config(R"toml(
[model]
id = "car"
[spec]
preset = "s4"
[search]
variant = "mcts-pw"
solver = "gnm"
K = 4
L = [2, 2]
c = 0.5
budget = 60
[budget]
playout_sims = 25
sim_cap = 3000
[report]
trials = 7
seed = 42
)toml");
  CHECK(c.model == "car");
  CHECK(*c.spec == "s4");
  CHECK(c.variant == Method::MctsPW);
  CHECK(c.solver == hillclimb::Solver::GNM);
  CHECK(*c.K == 4);
  CHECK(*c.L == std::vector<std::size_t>{2, 2});
  CHECK(c.c == 0.5);
  CHECK(c.mcts_budget == 60);
  CHECK(c.playout_sims == 25);
  CHECK(c.sim_cap == 3000);
  CHECK(c.trials == 7);
  CHECK(c.seed == 42);

  CHECK_THROWS_AS(parse_config("[search]\nbogus = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[other]\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[search]\nc = \"x\"\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[search\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[spec]\npreset = \"s1\"\nformula = \"true\"\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[model]\ncommand = \"cat\"\n"), std::invalid_argument);
}

TEST_CASE("timeouts convert to simulation budgets") {
  const auto c = parse_config("[budget]\nevals_per_second = 20\nto_po_s = 1.5\n");
  CHECK(c.playout_sims == 30);
  CHECK_THROWS_AS(parse_config("[budget]\nto_po_s = 1.5\n"), std::invalid_argument);
}

TEST_CASE("printed config parses back to the same config") {
  ExperimentConfig c;
  c.model = "car";
  c.spec = "s4";
  c.variant = Method::HillClimb;
  c.solver = hillclimb::Solver::SA;
  c.c = 0.02;
  c.alpha = 0.5;
  c.playout_wall_s = 2.5;
  c.warm_start = false;
  c.seed = 123456789;
  c.finalize();
  std::ostringstream s;
  print_config(s, c);
  auto back = parse_config(s.str());
  back.finalize();
  std::ostringstream s2;
  print_config(s2, back);
  CHECK(s.str() == s2.str());
  CHECK(back.c == c.c);
  CHECK(back.alpha == c.alpha);
  CHECK(*back.L == *c.L);
  CHECK(back.variant == c.variant);
  CHECK(!back.warm_start);

  ExperimentConfig ext = parse_config(R"toml(
[model]
id = "external"
command = "cat"
horizon = 2.0
timeout_s = 3.0
inputs = [{name = "u", lo = -1.0, hi = 1.0}]
outputs = ["u"]
[spec]
formula = "[](u < 0.5)"
)toml");
  ext.finalize();
  std::ostringstream e1;
  print_config(e1, ext);
  auto ext2 = parse_config(e1.str());
  ext2.finalize();
  std::ostringstream e2;
  print_config(e2, ext2);
  CHECK(e1.str() == e2.str());
  CHECK(ext2.external->inputs.size() == 1);
  CHECK(ext2.external->timeout.count() == 3000);
}

TEST_CASE("set_parameter") {
  ExperimentConfig c;
  set_parameter(c, "c", "0.5");
  set_parameter(c, "L", "3x5");
  set_parameter(c, "seed", "17");
  CHECK(c.c == 0.5);
  CHECK(*c.L == std::vector<std::size_t>{3, 5});
  CHECK(c.seed == 17);
  CHECK_THROWS_AS(set_parameter(c, "c", "abc"), std::invalid_argument);
  CHECK_THROWS_AS(set_parameter(c, "c", "0.5x"), std::invalid_argument);
  CHECK_THROWS_AS(set_parameter(c, "nope", "1"), std::invalid_argument);
}

TEST_CASE("format_double round-trips") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(mcts::kInf) == "inf");
  CHECK(format_double(-mcts::kInf) == "-inf");
  const double v = -0.06971669945616377;
  CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("trial seeds are master xor index") {
  CHECK(trial_seed(42, 0) == 42);
  CHECK(trial_seed(42, 3) == (42u ^ 3u));
}

TEST_CASE("baselines") {
  auto always_true = mcts::Problem{mcts::InputSpace({{"u", 0, 1}}, 2, {2}, 1.0),
                                   [](const PiecewiseConstantInput&) { return 1.0; }};
  auto falsum = mcts::Problem{mcts::InputSpace({{"u", 0, 1}}, 2, {2}, 1.0),
                              [](const PiecewiseConstantInput&) { return -1.0; }};
  for (auto s : {hillclimb::Solver::SA, hillclimb::Solver::GNM, hillclimb::Solver::CMAES}) {
    const auto t = run_hillclimb_baseline(always_true, s, 50, 1);
    CHECK(!t.falsified);
    CHECK(t.simulations == 50);
    const auto f = run_hillclimb_baseline(falsum, s, 50, 1);
    CHECK(f.falsified);
    CHECK(f.simulations == 1);
  }
  const auto r = run_random_baseline(always_true, 40, 3);
  CHECK(!r.falsified);
  CHECK(r.simulations == 40);
  CHECK(r.input.levels.size() == 2);
  const auto rf = run_random_baseline(falsum, 40, 3);
  CHECK(rf.falsified);
  CHECK(rf.simulations == 1);
  CHECK(run_random_baseline(always_true, 10, 3).input ==
        run_random_baseline(always_true, 10, 3).input);
}

TEST_CASE("batch writes reports and is deterministic") {
  auto cfg = quick_ffr();
  const auto dir = scratch("batch");
  const auto b1 = run_batch(cfg, dir);
  REQUIRE(b1.trials.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::filesystem::exists(dir / ("trial_" + std::to_string(i) + ".json")));
  }
  const auto rows = read_rows(dir / "batch.csv");
  REQUIRE(rows.size() == 4);
  std::string header;
  for (std::size_t i = 0; i < rows[0].size(); ++i) header += (i ? "," : "") + rows[0][i];
  CHECK(header == kBatchHeader);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].size() == 8);
    CHECK(rows[i][0] == "mcts-basic");
    CHECK(rows[i][3] == std::to_string(trial_seed(5, i - 1)));
  }

  cfg.workers = 1;
  const auto b2 = run_batch(cfg);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(b1.trials[i].outcome.falsified == b2.trials[i].outcome.falsified);
    CHECK(b1.trials[i].outcome.simulations == b2.trials[i].outcome.simulations);
    CHECK(format_double(b1.trials[i].outcome.robustness) ==
          format_double(b2.trials[i].outcome.robustness));
  }
  const Resolved r = resolve(cfg);
  const auto single = run_trial(cfg, r, 2, trial_seed(cfg.seed, 2));
  CHECK(single.outcome.simulations == b1.trials[2].outcome.simulations);
  CHECK(single.outcome.input == b1.trials[2].outcome.input);
  std::filesystem::remove_all(dir);
}

TEST_CASE("tree dump lands in the trial report") {
  auto cfg = quick_ffr();
  cfg.trials = 1;
  cfg.tree_dump = true;
  const auto b = run_batch(cfg);
  CHECK(!b.trials[0].tree.empty());
  std::ostringstream s;
  write_trial_json(s, cfg, b.trials[0]);
  CHECK(s.str().find("\"dump\"") != std::string::npos);
}

TEST_CASE("baseline variants run through the batch") {
  for (auto m : {Method::Random, Method::HillClimb}) {
    auto cfg = quick_ffr();
    cfg.variant = m;
    const auto b = run_batch(cfg);
    for (const auto& t : b.trials) CHECK(t.outcome.simulations <= cfg.sim_cap);
  }
}

TEST_CASE("sweep writes one paired batch per value") {
  auto cfg = quick_ffr();
  const auto dir = scratch("sweep");
  const std::vector<std::string> values{"0.02", "0.2", "0.5", "1.0"};
  const auto reports = run_sweep(cfg, "c", values, dir);
  CHECK(reports.size() == 4);
  std::vector<std::vector<std::vector<std::string>>> all;
  for (const auto& v : values) all.push_back(read_rows(dir / ("c=" + v) / "batch.csv"));
  for (const auto& rows : all) {
    REQUIRE(rows.size() == cfg.trials + 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i][2] == all[0][i][2]);
      CHECK(rows[i][3] == all[0][i][3]);
    }
  }
  CHECK_THROWS_AS(run_sweep(cfg, "c", {"-1"}, dir), std::invalid_argument);
  std::filesystem::remove_all(dir);
}

TEST_CASE("external model batch") {
  auto cfg = parse_config(R"toml(
[model]
id = "external"
command = "cat"
horizon = 1.0
inputs = [{name = "u", lo = 0.0, hi = 1.0}]
outputs = ["u"]
[spec]
formula = "[](u < 0.9)"
[budget]
sim_cap = 40
final_sims = 20
playout_sims = 5
[search]
budget = 4
[report]
trials = 2
)toml");
  cfg.finalize();
  const auto b = run_batch(cfg);
  CHECK(b.successes == 2);
}

#ifdef FALSIFY_CLI
TEST_CASE("command line") {
  const auto dir = scratch("cli");
  std::filesystem::create_directories(dir);
  const std::string cli = FALSIFY_CLI;
  const std::string out = (dir / "out").string();
  const std::string run = cli + " run --trials 2 --playout-sims 10 --final-sims 50 --sim-cap 100 "
                                "--budget 4 --seed 3 --out " + out + " > " +
                          (dir / "log").string() + " 2>&1";
  const int rc = std::system(run.c_str());
  CHECK(WEXITSTATUS(rc) <= 1);
  CHECK(std::filesystem::exists(dir / "out" / "batch.csv"));
  CHECK(std::filesystem::exists(dir / "out" / "trial_1.json"));

  const std::string cfg_path = (dir / "eff.toml").string();
  const std::string print = cli + " run --model car --spec s4 --L 2x2 --c 0.5 "
                                  "--print-effective-config > " + cfg_path;
  CHECK(std::system(print.c_str()) == 0);
  auto printed = load_config(cfg_path);
  printed.finalize();
  CHECK(printed.model == "car");
  CHECK(*printed.L == std::vector<std::size_t>{2, 2});
  CHECK(printed.c == 0.5);

  {
    std::ofstream in(dir / "input.csv");
    in << "t,throttle,brake\n";
    for (int i = 0; i <= 60; ++i) in << i * 0.5 << ",100,0\n";
  }
  const std::string rob = cli + " robustness --model car --spec s1 --input " +
                          (dir / "input.csv").string() + " > " + (dir / "rob").string();
  CHECK(std::system(rob.c_str()) == 0);
  std::ifstream r(dir / "rob");
  double v = 0;
  r >> v;
  CHECK(std::isfinite(v));

  const std::string bad = cli + " run --variant nope > /dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(bad.c_str())) == 2);
  std::filesystem::remove_all(dir);
}
#endif
