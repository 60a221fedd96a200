#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "falsify/hillclimb.hpp"
#include "falsify/models.hpp"
#include "falsify/signal.hpp"
#include "falsify/stl.hpp"

namespace falsify::mcts {

/// Per-dimension partition indices k_i with 1 <= k_i <= L_i.
using Action = std::vector<std::size_t>;

/// Input ranges, control points K and partition counts L.
class InputSpace {
 public:
  InputSpace(std::vector<models::InputRange> ranges, std::size_t K, std::vector<std::size_t> L,
             double horizon);

  std::size_t dims() const { return ranges_.size(); }
  std::size_t control_points() const { return K_; }
  double horizon() const { return horizon_; }
  const std::vector<models::InputRange>& ranges() const { return ranges_; }
  const std::vector<std::size_t>& partitions() const { return L_; }

  /// |A| = prod L_i.
  std::size_t action_count() const { return count_; }
  /// Flat 0-based index of an action; the first dimension varies fastest.
  std::size_t index_of(const Action& a) const;
  Action action(std::size_t index) const;

  /// The M-dimensional input box I_1 x ... x I_M.
  hillclimb::BoxDomain full_box() const;

 private:
  std::vector<models::InputRange> ranges_;
  std::size_t K_;
  std::vector<std::size_t> L_;
  double horizon_;
  std::size_t count_;
};

/// Input region of one action.
hillclimb::BoxDomain reg(const InputSpace& space, const Action& a);

/// Inclusive 0-based cell index range per dimension.
struct CellBox {
  std::vector<std::size_t> lo, hi;

  bool contains(const Action& a) const;
  std::size_t cell_count() const;
  friend bool operator==(const CellBox&, const CellBox&) = default;
};

hillclimb::BoxDomain cell_box_region(const InputSpace& space, const CellBox& box);

/// A box of cells, all unexpanded, that no single slab extension can grow.
/// Grown greedily from a uniformly drawn unexpanded seed cell with axes and
/// directions visited in random order. `unexpanded[i]` refers to the flat
/// action index i; at least one entry must be true.
CellBox maximal_convex_subset(const InputSpace& space, const std::vector<bool>& unexpanded,
                              std::mt19937_64& rng);

/// The action whose cell contains x, restricted to the cells of `within`.
Action containing_action(const InputSpace& space, std::span<const double> x,
                         const CellBox& within);

struct ChildStats {
  std::size_t action;  // flat index
  double R;
  std::size_t N;
};

/// UCB choice among expanded children. Returns a position in
/// `children`. Unvisited children come first (smallest R, then smallest
/// action). Rewards are normalized by tree_max; when tree_max <= 0 or is not
/// finite the exploitation term is 0.
std::size_t ucb_select(std::span<const ChildStats> children, std::size_t parent_visits,
                       double tree_max, double c);
double ucb_score(const ChildStats& child, std::size_t parent_visits, double tree_max, double c);

// Search tree ----------------------------------------------------------------

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kNoChild = static_cast<std::size_t>(-1);

struct TreeNode {
  std::vector<std::size_t> word;  // flat action indices from the root
  std::size_t N = 0;
  double R = kInf;
  std::size_t parent = kNoChild;
  std::vector<std::size_t> children;  // node id per action, kNoChild if unexpanded
  std::size_t expanded = 0;
};

class SearchTree {
 public:
  explicit SearchTree(std::size_t action_count);

  const TreeNode& node(std::size_t id) const { return nodes_[id]; }
  TreeNode& node(std::size_t id) { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t action_count() const { return actions_; }

  std::size_t add_child(std::size_t parent, std::size_t action);
  /// Expanded children of a node, in action order.
  std::vector<ChildStats> children_of(std::size_t id) const;
  /// Largest finite R in the tree, -inf if none.
  double max_finite_reward() const;
  /// R(w) <- min over expanded children; no-op without children.
  void back_propagate(std::size_t id);
  std::vector<std::size_t> depth_histogram() const;

 private:
  std::size_t actions_;
  std::vector<TreeNode> nodes_;
};

// Falsification ----------------------------------------------------------------

enum class Variant { Basic, PW };
Variant parse_variant(std::string_view s);
std::string_view to_string(Variant v);

struct SearchParams {
  Variant variant = Variant::Basic;
  hillclimb::Solver solver = hillclimb::Solver::CMAES;
  double c = 0.2;
  double C = 0.7;
  double alpha = 0.85;
  std::size_t mcts_budget = 40;
  std::size_t playout_evals = 100;
  std::size_t final_evals = 2000;
  /// Simulations across preprocessing and the final stage.
  std::size_t simulation_cap = 6000;
  std::optional<double> playout_wall_s;
  std::optional<double> final_wall_s;
  bool warm_start = true;
  std::uint64_t seed = 0;
};

/// Robustness of the system under a piecewise-constant input. Failed
/// simulations return +inf.
using RobustnessFn = std::function<double(const PiecewiseConstantInput&)>;

struct Problem {
  InputSpace space;
  RobustnessFn robustness;
};

/// Simulates `model` on realize(u, step) with step = T / (K * oversample) and
/// evaluates `phi` on the output.
Problem make_problem(std::shared_ptr<const models::SystemModel> model, stl::Formula phi,
                     InputSpace space, std::size_t oversample);

/// Row-major K x M levels <-> PiecewiseConstantInput.
PiecewiseConstantInput to_input(const InputSpace& space, std::span<const double> x);

struct TreeStats {
  std::size_t nodes = 0;
  std::vector<std::size_t> depth_histogram;
};

struct NodeDump {
  std::vector<Action> word;
  std::size_t N;
  double R;
};

struct FalsificationOutcome {
  bool falsified = false;
  /// Robustness of `input`: the best value seen overall.
  double robustness = kInf;
  /// Best input seen; empty levels when every simulation failed.
  PiecewiseConstantInput input;
  /// a_min as actions (may be shorter than K).
  std::vector<Action> best_prefix;
  double best_prefix_reward = kInf;
  bool found_in_preprocess = false;
  std::size_t iterations = 0;
  std::size_t simulations = 0;
  std::size_t preprocess_simulations = 0;
  double wall_s = 0.0;
  TreeStats tree_stats;
};

/// Audit record for one MCTS sample.
struct SampleEvent {
  std::size_t iteration = 0;
  /// Node at which a child was expanded, kNoChild if the sample ended at a
  /// depth-K leaf.
  std::size_t expanded_at = kNoChild;
  std::size_t expanded_child = kNoChild;
  /// Expanded-children count and N(w) at the expansion node before expanding.
  std::size_t children_before = 0;
  std::size_t visits = 0;
  /// PW: cells of the expansion region S and the playout's u_{d+1}.
  std::optional<CellBox> region;
  std::vector<double> first_free_level;
};

using AuditHook = std::function<void(const SearchTree&, const SampleEvent&)>;

class Search {
 public:
  Search(Problem problem, SearchParams params);

  void set_audit(AuditHook hook) { audit_ = std::move(hook); }

  /// Samples from the root while R(root) >= 0 within
  /// the MCTS budget and the simulation cap.
  FalsificationOutcome preprocess();
  /// Preprocessing, then the final constrained hill-climb.
  FalsificationOutcome run();

  const SearchTree& tree() const { return tree_; }
  std::vector<NodeDump> dump_tree() const;

 private:
  struct Playout {
    std::vector<double> x;
    double value;
  };
  using Witness = Playout;

  void sample(std::size_t id, SampleEvent& ev);
  void expand(std::size_t id, SampleEvent& ev);
  Playout hill_climb(const hillclimb::BoxDomain& dom, std::size_t evals,
                     std::optional<double> wall_s, std::uint64_t seed,
                     const std::optional<std::vector<double>>& start);
  hillclimb::BoxDomain constrained_box(std::span<const std::size_t> prefix,
                                       const std::optional<hillclimb::BoxDomain>& next) const;
  std::size_t remaining_simulations() const;
  void record(const std::vector<double>& x, double value);
  FalsificationOutcome outcome() const;

  Problem problem_;
  SearchParams params_;
  SearchTree tree_;
  AuditHook audit_;
  std::mt19937_64 tree_rng_, playout_rng_, subset_rng_;

  std::size_t iterations_ = 0;
  std::size_t simulations_ = 0;
  std::size_t preprocess_simulations_ = 0;
  bool preprocessed_ = false;
  bool finished_ = false;
  std::optional<Witness> falsifying_;
  std::vector<double> best_x_;
  double best_value_ = kInf;
  std::vector<std::size_t> a_min_;
  double r_min_ = kInf;
  double wall_s_ = 0.0;
};

/// Constrained hill-climb over the K x M box with u_1..u_{d+1} confined to
/// the given regions. Returns (best input, its robustness).
std::pair<PiecewiseConstantInput, double> constrained_playout(
    const Problem& problem, std::span<const hillclimb::BoxDomain> prefix_regions,
    hillclimb::Solver solver, const hillclimb::Budget& budget, std::uint64_t seed,
    bool stop_on_negative = true);

}  // namespace falsify::mcts
