#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "falsify/mcts.hpp"
#include "falsify/random.hpp"

namespace falsify::mcts {

Variant parse_variant(std::string_view s) {
  if (s == "mcts-basic" || s == "basic") return Variant::Basic;
  if (s == "mcts-pw" || s == "pw") return Variant::PW;
  throw std::invalid_argument("unknown MCTS variant '" + std::string(s) + "'");
}

std::string_view to_string(Variant v) { return v == Variant::Basic ? "mcts-basic" : "mcts-pw"; }

PiecewiseConstantInput to_input(const InputSpace& space, std::span<const double> x) {
  if (x.size() != space.control_points() * space.dims()) {
    throw std::invalid_argument("input vector has wrong length");
  }
  return PiecewiseConstantInput(space.control_points(), space.dims(), space.horizon(),
                                std::vector<double>(x.begin(), x.end()));
}

Problem make_problem(std::shared_ptr<const models::SystemModel> model, stl::Formula phi,
                     InputSpace space, std::size_t oversample) {
  if (!model) throw std::invalid_argument("problem: no model");
  if (oversample == 0) throw std::invalid_argument("problem: oversample must be >= 1");
  const auto& outs = model->outputs();
  for (const auto& v : stl::variables(phi)) {
    if (std::find(outs.begin(), outs.end(), v) == outs.end()) {
      throw std::invalid_argument("specification refers to '" + v + "', which model '" +
                                  model->id() + "' does not output");
    }
  }
  if (space.dims() != model->inputs().size()) {
    throw std::invalid_argument("input space dimension differs from the model's inputs");
  }
  const double step =
      space.horizon() / static_cast<double>(space.control_points() * oversample);
  std::vector<std::string> names;
  for (const auto& r : model->inputs()) names.push_back(r.name);
  RobustnessFn f = [model, phi = std::move(phi), step, names](const PiecewiseConstantInput& u) {
    try {
      return stl::robustness(model->simulate(realize(u, step, names)), phi);
    } catch (const models::SimulationError&) {
      return kInf;
    }
  };
  return Problem{std::move(space), std::move(f)};
}

namespace {

hillclimb::BoxDomain product(std::span<const hillclimb::BoxDomain> segments) {
  std::vector<double> lo, hi;
  for (const auto& b : segments) {
    lo.insert(lo.end(), b.lo().begin(), b.lo().end());
    hi.insert(hi.end(), b.hi().begin(), b.hi().end());
  }
  return {lo, hi};
}

}  // namespace

std::pair<PiecewiseConstantInput, double> constrained_playout(
    const Problem& problem, std::span<const hillclimb::BoxDomain> prefix_regions,
    hillclimb::Solver solver, const hillclimb::Budget& budget, std::uint64_t seed,
    bool stop_on_negative) {
  const InputSpace& space = problem.space;
  if (prefix_regions.size() > space.control_points()) {
    throw std::invalid_argument("playout: more regions than control points");
  }
  std::vector<hillclimb::BoxDomain> segs(prefix_regions.begin(), prefix_regions.end());
  while (segs.size() < space.control_points()) segs.push_back(space.full_box());
  const hillclimb::BoxDomain dom = product(segs);
  hillclimb::Options opt;
  opt.stop_on_negative = stop_on_negative;
  opt.record_history = false;
  auto f = [&](std::span<const double> x) { return problem.robustness(to_input(space, x)); };
  const auto r = hillclimb::minimize(solver, f, dom, budget, seed, opt);
  if (!std::isfinite(r.best_value) && r.best_value > 0) {
    throw std::runtime_error("playout: every simulation failed");
  }
  return {to_input(space, r.best_point), r.best_value};
}

Search::Search(Problem problem, SearchParams params)
    : problem_(std::move(problem)),
      params_(params),
      tree_(problem_.space.action_count()),
      tree_rng_(derive_seed(params.seed, Stream::Tree)),
      playout_rng_(derive_seed(params.seed, Stream::Playout)),
      subset_rng_(derive_seed(params.seed, Stream::Subset)) {
  if (params_.mcts_budget == 0) throw std::invalid_argument("MCTS budget must be >= 1");
  if (params_.playout_evals == 0) throw std::invalid_argument("playout budget must be >= 1");
  if (params_.simulation_cap == 0) throw std::invalid_argument("simulation cap must be >= 1");
  if (!(params_.c >= 0.0)) throw std::invalid_argument("c must be >= 0");
  if (!(params_.C > 0.0)) throw std::invalid_argument("C must be > 0");
  if (!(params_.alpha > 0.0 && params_.alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1]");
  }
  if (!problem_.robustness) throw std::invalid_argument("problem has no robustness function");
}

std::size_t Search::remaining_simulations() const {
  return simulations_ >= params_.simulation_cap ? 0 : params_.simulation_cap - simulations_;
}

void Search::record(const std::vector<double>& x, double value) {
  ++simulations_;
  if (value < best_value_ || best_x_.empty()) {
    if (value < best_value_) best_value_ = value;
    best_x_ = x;
  }
}

hillclimb::BoxDomain Search::constrained_box(
    std::span<const std::size_t> prefix, const std::optional<hillclimb::BoxDomain>& next) const {
  const InputSpace& space = problem_.space;
  std::vector<hillclimb::BoxDomain> segs;
  for (std::size_t a : prefix) segs.push_back(reg(space, space.action(a)));
  if (next) segs.push_back(*next);
  while (segs.size() < space.control_points()) segs.push_back(space.full_box());
  return product(segs);
}

Search::Playout Search::hill_climb(const hillclimb::BoxDomain& dom, std::size_t evals,
                                   std::optional<double> wall_s, std::uint64_t seed,
                                   const std::optional<std::vector<double>>& start) {
  hillclimb::Options opt;
  opt.stop_on_negative = true;
  opt.record_history = false;
  opt.start = start;
  auto f = [&](std::span<const double> x) {
    const double v = problem_.robustness(to_input(problem_.space, x));
    record(std::vector<double>(x.begin(), x.end()), v);
    return v;
  };
  const auto r = hillclimb::minimize(params_.solver, f, dom, hillclimb::Budget{evals, wall_s},
                                     seed, opt);
  return {r.best_point, r.best_value};
}

void Search::expand(std::size_t id, SampleEvent& ev) {
  const InputSpace& space = problem_.space;
  const std::size_t A = space.action_count();
  ev.expanded_at = id;
  ev.children_before = tree_.node(id).expanded;
  ev.visits = tree_.node(id).N;
  const std::vector<std::size_t> word = tree_.node(id).word;
  const std::size_t d = word.size();

  std::vector<bool> unexpanded(A);
  for (std::size_t a = 0; a < A; ++a) unexpanded[a] = tree_.node(id).children[a] == kNoChild;

  std::size_t action = kNoChild;
  CellBox box;
  if (params_.variant == Variant::Basic) {
    std::vector<std::size_t> free;
    for (std::size_t a = 0; a < A; ++a) {
      if (unexpanded[a]) free.push_back(a);
    }
    action = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(tree_rng_)];
    const Action act = space.action(action);
    for (std::size_t i = 0; i < space.dims(); ++i) {
      box.lo.push_back(act[i] - 1);
      box.hi.push_back(act[i] - 1);
    }
  } else {
    box = maximal_convex_subset(space, unexpanded, subset_rng_);
    ev.region = box;
  }

  const hillclimb::BoxDomain dom = constrained_box(word, cell_box_region(space, box));
  const std::size_t evals = std::min(params_.playout_evals, remaining_simulations());
  const Playout p = hill_climb(dom, evals, params_.playout_wall_s, playout_rng_(), std::nullopt);

  const std::span<const double> next(p.x.data() + d * space.dims(), space.dims());
  if (params_.variant == Variant::PW) {
    action = space.index_of(containing_action(space, next, box));
    ev.first_free_level.assign(next.begin(), next.end());
  }
  const std::size_t child = tree_.add_child(id, action);
  ev.expanded_child = child;
  tree_.node(child).N = 0;
  tree_.node(child).R = p.value;

  if (p.value < 0.0 && !falsifying_) falsifying_ = Witness{p.x, p.value};
  if (p.value < r_min_) {
    r_min_ = p.value;
    a_min_ = tree_.node(child).word;
  }
  tree_.back_propagate(id);
}

void Search::sample(std::size_t id, SampleEvent& ev) {
  ++tree_.node(id).N;
  if (tree_.node(id).word.size() >= problem_.space.control_points()) return;
  const TreeNode& n = tree_.node(id);
  bool descend = n.expanded == tree_.action_count();
  if (params_.variant == Variant::PW) {
    descend = descend || static_cast<double>(n.expanded) >=
                             params_.C * std::pow(static_cast<double>(n.N), params_.alpha);
  }
  if (!descend) {
    expand(id, ev);
    return;
  }
  const auto children = tree_.children_of(id);
  const std::size_t pos =
      ucb_select(children, n.N, tree_.max_finite_reward(), params_.c);
  sample(tree_.node(id).children[children[pos].action], ev);
  tree_.back_propagate(id);
}

FalsificationOutcome Search::preprocess() {
  if (!preprocessed_) {
    const auto t0 = std::chrono::steady_clock::now();
    while (!(tree_.node(0).R < 0.0) && iterations_ < params_.mcts_budget &&
           remaining_simulations() > 0) {
      SampleEvent ev;
      ev.iteration = iterations_;
      sample(0, ev);
      ++iterations_;
      if (audit_) audit_(tree_, ev);
    }
    preprocess_simulations_ = simulations_;
    preprocessed_ = true;
    wall_s_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return outcome();
}

FalsificationOutcome Search::run() {
  preprocess();
  if (falsifying_ || finished_) return outcome();
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t evals = std::min(params_.final_evals, remaining_simulations());
  if (evals > 0) {
    std::optional<std::vector<double>> start;
    if (params_.warm_start && !best_x_.empty()) start = best_x_;
    const Playout p = hill_climb(constrained_box(a_min_, std::nullopt), evals,
                                 params_.final_wall_s, derive_seed(params_.seed, Stream::Final),
                                 start);
    if (p.value < 0.0) falsifying_ = Witness{p.x, p.value};
  }
  finished_ = true;
  wall_s_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return outcome();
}

FalsificationOutcome Search::outcome() const {
  const InputSpace& space = problem_.space;
  FalsificationOutcome o;
  o.falsified = falsifying_.has_value();
  o.found_in_preprocess = o.falsified && simulations_ == preprocess_simulations_ && preprocessed_;
  if (falsifying_) {
    o.robustness = falsifying_->value;
    o.input = to_input(space, falsifying_->x);
  } else {
    o.robustness = best_value_;
    if (!best_x_.empty()) o.input = to_input(space, best_x_);
  }
  for (std::size_t a : a_min_) o.best_prefix.push_back(space.action(a));
  o.best_prefix_reward = r_min_;
  o.iterations = iterations_;
  o.simulations = simulations_;
  o.preprocess_simulations = preprocess_simulations_;
  o.wall_s = wall_s_;
  o.tree_stats.nodes = tree_.size();
  o.tree_stats.depth_histogram = tree_.depth_histogram();
  return o;
}

std::vector<NodeDump> Search::dump_tree() const {
  std::vector<NodeDump> out;
  for (std::size_t i = 0; i < tree_.size(); ++i) {
    const TreeNode& n = tree_.node(i);
    NodeDump d{{}, n.N, n.R};
    for (std::size_t a : n.word) d.word.push_back(problem_.space.action(a));
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace falsify::mcts
