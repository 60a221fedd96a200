#pragma once

// Checks the search-tree invariants after every MCTS sample.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "falsify/mcts.hpp"

namespace testing {

struct TreeAuditor {
  const falsify::mcts::InputSpace* space;
  falsify::mcts::SearchParams params;
  std::size_t samples = 0;
  std::size_t checks = 0;
  std::vector<std::string> violations;

  void fail(const std::string& what) {
    std::ostringstream s;
    s << "sample " << samples << ": " << what;
    violations.push_back(s.str());
  }

  void operator()(const falsify::mcts::SearchTree& t, const falsify::mcts::SampleEvent& e) {
    using namespace falsify::mcts;
    ++samples;
    const std::size_t K = space->control_points();
    if (t.size() > samples + 1) fail("node count exceeds samples + 1");
    for (std::size_t id = 0; id < t.size(); ++id) {
      const TreeNode& n = t.node(id);
      ++checks;
      if (n.word.size() > K) fail("node deeper than K");
      std::size_t child_visits = 0;
      double r = kInf;
      std::size_t expanded = 0;
      for (std::size_t c : n.children) {
        if (c == kNoChild) continue;
        ++expanded;
        child_visits += t.node(c).N;
        r = std::min(r, t.node(c).R);
        if (t.node(c).parent != id) fail("broken parent link");
      }
      if (expanded != n.expanded) fail("expanded count out of sync");
      if (expanded > 0 && !(n.R == r)) fail("R is not the min over expanded children");
      if (child_visits > n.N) fail("children visited more often than their parent");
    }
    if (e.expanded_at == kNoChild) return;
    const TreeNode& w = t.node(e.expanded_at);
    if (e.children_before >= t.action_count()) fail("expanded a fully expanded node");
    if (params.variant == Variant::PW) {
      const double threshold = params.C * std::pow(static_cast<double>(e.visits), params.alpha);
      if (!(static_cast<double>(e.children_before) < threshold)) {
        fail("PW expansion although the widening threshold was met");
      }
      const Action a = space->action(t.node(e.expanded_child).word.back());
      if (!e.region || !e.region->contains(a)) fail("expanded child outside the region S");
      const auto box = reg(*space, a);
      if (!box.contains(e.first_free_level)) fail("expanded cell does not contain u_{d+1}");
    }
    if (w.expanded != e.children_before + 1) fail("sample expanded more than one node");
  }
};

}  // namespace testing
