#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "falsify/mcts.hpp"

namespace falsify::mcts {

InputSpace::InputSpace(std::vector<models::InputRange> ranges, std::size_t K,
                       std::vector<std::size_t> L, double horizon)
    : ranges_(std::move(ranges)), K_(K), L_(std::move(L)), horizon_(horizon), count_(1) {
  if (ranges_.empty()) throw std::invalid_argument("input space: no inputs");
  if (K_ == 0) throw std::invalid_argument("input space: K must be >= 1");
  if (L_.size() != ranges_.size()) {
    throw std::invalid_argument("input space: need one partition count per input (" +
                                std::to_string(ranges_.size()) + "), got " +
                                std::to_string(L_.size()));
  }
  if (!(horizon_ > 0.0)) throw std::invalid_argument("input space: horizon must be > 0");
  for (std::size_t i = 0; i < L_.size(); ++i) {
    if (L_[i] == 0) throw std::invalid_argument("input space: partition counts must be >= 1");
    if (!(ranges_[i].lo < ranges_[i].hi)) {
      throw std::invalid_argument("input space: empty range for " + ranges_[i].name);
    }
    count_ *= L_[i];
  }
}

std::size_t InputSpace::index_of(const Action& a) const {
  if (a.size() != dims()) throw std::invalid_argument("action: wrong dimension");
  std::size_t idx = 0, stride = 1;
  for (std::size_t i = 0; i < dims(); ++i) {
    if (a[i] < 1 || a[i] > L_[i]) throw std::invalid_argument("action: index out of range");
    idx += (a[i] - 1) * stride;
    stride *= L_[i];
  }
  return idx;
}

Action InputSpace::action(std::size_t index) const {
  if (index >= count_) throw std::invalid_argument("action: flat index out of range");
  Action a(dims());
  for (std::size_t i = 0; i < dims(); ++i) {
    a[i] = index % L_[i] + 1;
    index /= L_[i];
  }
  return a;
}

hillclimb::BoxDomain InputSpace::full_box() const {
  std::vector<double> lo, hi;
  for (const auto& r : ranges_) {
    lo.push_back(r.lo);
    hi.push_back(r.hi);
  }
  return {lo, hi};
}

namespace {

double cell_edge(const models::InputRange& r, std::size_t k, std::size_t L) {
  if (k == L) return r.hi;
  return r.lo + static_cast<double>(k) / static_cast<double>(L) * r.width();
}

}  // namespace

hillclimb::BoxDomain reg(const InputSpace& space, const Action& a) {
  space.index_of(a);  // validates
  CellBox box;
  for (std::size_t i = 0; i < space.dims(); ++i) {
    box.lo.push_back(a[i] - 1);
    box.hi.push_back(a[i] - 1);
  }
  return cell_box_region(space, box);
}

bool CellBox::contains(const Action& a) const {
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (a[i] - 1 < lo[i] || a[i] - 1 > hi[i]) return false;
  }
  return true;
}

std::size_t CellBox::cell_count() const {
  std::size_t n = 1;
  for (std::size_t i = 0; i < lo.size(); ++i) n *= hi[i] - lo[i] + 1;
  return n;
}

hillclimb::BoxDomain cell_box_region(const InputSpace& space, const CellBox& box) {
  std::vector<double> lo, hi;
  for (std::size_t i = 0; i < space.dims(); ++i) {
    const auto& r = space.ranges()[i];
    const std::size_t L = space.partitions()[i];
    lo.push_back(cell_edge(r, box.lo[i], L));
    hi.push_back(cell_edge(r, box.hi[i] + 1, L));
  }
  return {lo, hi};
}

namespace {

// True when every cell of `box` with coordinate `axis` fixed to `at` is
// unexpanded.
bool slab_free(const InputSpace& space, const std::vector<bool>& unexpanded, CellBox box,
               std::size_t axis, std::size_t at) {
  box.lo[axis] = box.hi[axis] = at;
  Action a(box.lo.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = box.lo[i] + 1;
  while (true) {
    if (!unexpanded[space.index_of(a)]) return false;
    std::size_t i = 0;
    for (; i < a.size(); ++i) {
      if (a[i] - 1 < box.hi[i]) {
        ++a[i];
        break;
      }
      a[i] = box.lo[i] + 1;
    }
    if (i == a.size()) return true;
  }
}

}  // namespace

CellBox maximal_convex_subset(const InputSpace& space, const std::vector<bool>& unexpanded,
                              std::mt19937_64& rng) {
  if (unexpanded.size() != space.action_count()) {
    throw std::invalid_argument("convex subset: mask size differs from |A|");
  }
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < unexpanded.size(); ++i) {
    if (unexpanded[i]) free.push_back(i);
  }
  if (free.empty()) throw std::invalid_argument("convex subset: no unexpanded cell");
  const Action seed =
      space.action(free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)]);

  const std::size_t m = space.dims();
  CellBox box;
  for (std::size_t i = 0; i < m; ++i) {
    box.lo.push_back(seed[i] - 1);
    box.hi.push_back(seed[i] - 1);
  }
  // (axis, direction) moves; a full pass without growth means maximal
  std::vector<std::pair<std::size_t, int>> moves;
  for (std::size_t i = 0; i < m; ++i) {
    moves.emplace_back(i, -1);
    moves.emplace_back(i, +1);
  }
  for (bool grew = true; grew;) {
    grew = false;
    std::shuffle(moves.begin(), moves.end(), rng);
    for (const auto& [axis, dir] : moves) {
      const std::size_t L = space.partitions()[axis];
      while (true) {
        if (dir < 0 && box.lo[axis] == 0) break;
        if (dir > 0 && box.hi[axis] + 1 == L) break;
        const std::size_t at = dir < 0 ? box.lo[axis] - 1 : box.hi[axis] + 1;
        if (!slab_free(space, unexpanded, box, axis, at)) break;
        (dir < 0 ? box.lo[axis] : box.hi[axis]) = at;
        grew = true;
      }
    }
  }
  return box;
}

Action containing_action(const InputSpace& space, std::span<const double> x,
                         const CellBox& within) {
  Action a(space.dims());
  for (std::size_t i = 0; i < space.dims(); ++i) {
    const auto& r = space.ranges()[i];
    const double L = static_cast<double>(space.partitions()[i]);
    const double pos = std::floor((x[i] - r.lo) / r.width() * L);
    const double k = std::clamp(pos, static_cast<double>(within.lo[i]),
                                static_cast<double>(within.hi[i]));
    a[i] = static_cast<std::size_t>(k) + 1;
  }
  return a;
}

double ucb_score(const ChildStats& child, std::size_t parent_visits, double tree_max, double c) {
  if (child.N == 0) return kInf;
  double exploit = 0.0;
  if (std::isfinite(tree_max) && tree_max > 0.0) {
    exploit = std::isfinite(child.R) ? 1.0 - child.R / tree_max : -kInf;
  }
  const double explore = std::sqrt(2.0 * std::log(static_cast<double>(parent_visits)) /
                                   static_cast<double>(child.N));
  return exploit + c * explore;
}

std::size_t ucb_select(std::span<const ChildStats> children, std::size_t parent_visits,
                       double tree_max, double c) {
  if (children.empty()) throw std::logic_error("ucb: node has no expanded children");
  std::size_t best = 0;
  bool best_fresh = children[0].N == 0;
  double best_score = ucb_score(children[0], parent_visits, tree_max, c);
  for (std::size_t i = 1; i < children.size(); ++i) {
    const ChildStats& ch = children[i];
    const bool fresh = ch.N == 0;
    if (best_fresh || fresh) {
      if (!fresh) continue;
      const ChildStats& b = children[best];
      if (!best_fresh || ch.R < b.R || (ch.R == b.R && ch.action < b.action)) {
        best = i;
        best_fresh = true;
      }
      continue;
    }
    const double s = ucb_score(ch, parent_visits, tree_max, c);
    if (s > best_score || (s == best_score && ch.action < children[best].action)) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

}  // namespace falsify::mcts
