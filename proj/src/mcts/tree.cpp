#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "falsify/mcts.hpp"

namespace falsify::mcts {

SearchTree::SearchTree(std::size_t action_count) : actions_(action_count) {
  if (actions_ == 0) throw std::invalid_argument("search tree: empty action set");
  nodes_.emplace_back();
  nodes_.back().children.assign(actions_, kNoChild);
}

std::size_t SearchTree::add_child(std::size_t parent, std::size_t action) {
  if (action >= actions_) throw std::logic_error("search tree: action out of range");
  if (nodes_[parent].children[action] != kNoChild) {
    throw std::logic_error("search tree: child already expanded");
  }
  TreeNode child;
  child.word = nodes_[parent].word;
  child.word.push_back(action);
  child.parent = parent;
  child.children.assign(actions_, kNoChild);
  const std::size_t id = nodes_.size();
  nodes_.push_back(std::move(child));
  nodes_[parent].children[action] = id;
  ++nodes_[parent].expanded;
  return id;
}

std::vector<ChildStats> SearchTree::children_of(std::size_t id) const {
  std::vector<ChildStats> out;
  const TreeNode& n = nodes_[id];
  for (std::size_t a = 0; a < actions_; ++a) {
    if (n.children[a] == kNoChild) continue;
    const TreeNode& ch = nodes_[n.children[a]];
    out.push_back({a, ch.R, ch.N});
  }
  return out;
}

double SearchTree::max_finite_reward() const {
  double m = -kInf;
  for (const auto& n : nodes_) {
    if (std::isfinite(n.R)) m = std::max(m, n.R);
  }
  return m;
}

void SearchTree::back_propagate(std::size_t id) {
  TreeNode& n = nodes_[id];
  if (n.expanded == 0) return;
  double r = kInf;
  for (std::size_t c : n.children) {
    if (c != kNoChild) r = std::min(r, nodes_[c].R);
  }
  n.R = r;
}

std::vector<std::size_t> SearchTree::depth_histogram() const {
  std::vector<std::size_t> h;
  for (const auto& n : nodes_) {
    if (h.size() <= n.word.size()) h.resize(n.word.size() + 1, 0);
    ++h[n.word.size()];
  }
  return h;
}

}  // namespace falsify::mcts
