#include "alns/insertion.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace alns {
namespace {

struct Candidate {
  Cost cost;
  Node after;
};

bool cheaper(const Candidate& a, const Candidate& b) {
  return a.cost < b.cost || (a.cost == b.cost && a.after < b.after);
}

// The `capacity` cheapest edges for one node, kept sorted.
class TopEdges {
 public:
  void reset(int capacity) {
    capacity_ = capacity;
    size_ = 0;
  }

  void offer(Candidate c) {
    int pos = size_;
    while (pos > 0 && cheaper(c, items_[static_cast<std::size_t>(pos - 1)])) --pos;
    if (pos >= capacity_) return;
    const int last = std::min(size_, capacity_ - 1);
    for (int i = last; i > pos; --i) items_[static_cast<std::size_t>(i)] = items_[static_cast<std::size_t>(i - 1)];
    items_[static_cast<std::size_t>(pos)] = c;
    size_ = std::min(size_ + 1, capacity_);
  }

  bool uses_edge_from(Node a) const {
    for (int i = 0; i < size_; ++i) {
      if (items_[static_cast<std::size_t>(i)].after == a) return true;
    }
    return false;
  }

  int size() const { return size_; }
  const Candidate& operator[](int i) const { return items_[static_cast<std::size_t>(i)]; }

 private:
  std::array<Candidate, 3> items_{};
  int size_ = 0;
  int capacity_ = 1;
};

}  // namespace

Tour insertion_repair(PartialSolution partial, const Instance& instance, const InsertionRule& rule,
                      std::vector<InsertionStep>* trace) {
  const std::size_t n = instance.size();
  if (rule.order < 1 || rule.order > 3) throw std::invalid_argument("insertion order must be 1, 2 or 3");
  if (!is_valid_partial(partial, n)) throw std::invalid_argument("partial solution does not partition the nodes");

  auto& pending = partial.unrouted;
  std::sort(pending.begin(), pending.end());
  auto& fragment = partial.fragment;
  while (fragment.size() < 2) {
    fragment.push_back(pending.front());
    pending.erase(pending.begin());
  }

  std::vector<Node> next(n, -1);
  for (std::size_t i = 0; i < fragment.size(); ++i) next[static_cast<std::size_t>(fragment[i])] = fragment[(i + 1) % fragment.size()];
  const Node head = fragment.front();

  const auto insertion_cost = [&](Node a, Node u, Node b) {
    return instance.dist(a, u) + instance.dist(u, b) - instance.dist(a, b);
  };

  std::vector<TopEdges> tops(n);
  const auto recompute = [&](Node u) {
    auto& top = tops[static_cast<std::size_t>(u)];
    top.reset(rule.order);
    Node a = head;
    do {
      const Node b = next[static_cast<std::size_t>(a)];
      top.offer({insertion_cost(a, u, b), a});
      a = b;
    } while (a != head);
  };
  for (Node u : pending) recompute(u);

  const auto score_of = [&](const TopEdges& top) {
    const double c1 = static_cast<double>(top[0].cost);
    double regret = 0.0;
    for (int j = 1; j < rule.order; ++j) {
      const double cj = j < top.size() ? static_cast<double>(top[j].cost) : kMissingPositionCost;
      regret += cj - c1;
    }
    return rule.regret_weight * regret - rule.cost_weight * c1;
  };

  while (!pending.empty()) {
    std::size_t best_pos = 0;
    double best_score = 0.0;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      const auto& top = tops[static_cast<std::size_t>(pending[i])];
      const double s = score_of(top);
      if (i == 0) {
        best_score = s;
        continue;
      }
      const auto& incumbent = tops[static_cast<std::size_t>(pending[best_pos])];
      // pending is sorted, so a later index never wins a full tie
      if (s > best_score || (s == best_score && top[0].cost < incumbent[0].cost)) {
        best_pos = i;
        best_score = s;
      }
    }

    const Node u = pending[best_pos];
    const Candidate where = tops[static_cast<std::size_t>(u)][0];
    const Node a = where.after;
    const Node b = next[static_cast<std::size_t>(a)];
    next[static_cast<std::size_t>(a)] = u;
    next[static_cast<std::size_t>(u)] = b;
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best_pos));
    if (trace) trace->push_back({u, a, where.cost});

    for (Node w : pending) {
      auto& top = tops[static_cast<std::size_t>(w)];
      if (top.uses_edge_from(a)) {
        recompute(w);
      } else {
        top.offer({insertion_cost(a, w, u), a});
        top.offer({insertion_cost(u, w, b), u});
      }
    }
  }

  Tour tour;
  tour.order.reserve(n);
  Node v = head;
  do {
    tour.order.push_back(v);
    v = next[static_cast<std::size_t>(v)];
  } while (v != head);
  if (tour.order.size() != n) throw std::logic_error("insertion repair lost nodes");
  for (std::size_t i = 0; i < n; ++i) tour.cost += instance.dist(tour.order[i], tour.order[(i + 1) % n]);
  return tour;
}

}  // namespace alns
