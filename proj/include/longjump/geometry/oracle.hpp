#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "longjump/geometry/geometry.hpp"
#include "longjump/group/element.hpp"
#include "longjump/group/group.hpp"

namespace longjump {
namespace detail {

using Usage = std::vector<std::uint32_t>;

inline bool usage_dominates(const Usage& a, const Usage& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

// Pareto-minimal usage vectors attached to one reached element.
struct UsageFrontier {
  std::vector<Usage> mins;

  // Returns false when u is dominated by a stored vector; otherwise inserts
  // u and evicts everything it dominates.
  bool insert(const Usage& u) {
    for (const auto& m : mins)
      if (usage_dominates(m, u)) return false;
    mins.erase(std::remove_if(mins.begin(), mins.end(),
                              [&](const Usage& m) {
                                return usage_dominates(u, m);
                              }),
               mins.end());
    mins.push_back(u);
    return true;
  }
};

struct LetterMoves {
  std::vector<Element> step;      // letter or its inverse
  std::vector<std::size_t> which; // index of the letter consumed
};

inline LetterMoves letter_moves(const Group& G,
                                const std::vector<SystemLetter>& letters) {
  LetterMoves mv;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    Element g = letters[i].rep;
    Element gi = G.inv(g);
    mv.step.push_back(g);
    mv.which.push_back(i);
    if (!(gi == g)) {
      mv.step.push_back(gi);
      mv.which.push_back(i);
    }
  }
  return mv;
}

}  // namespace detail

// Candidate radii where some integer budget floor(F_s(R)) increments.
inline std::vector<double> oracle_grid(const std::vector<SystemLetter>& letters,
                                       double budgetCap) {
  if (!(budgetCap > 0.0))
    throw std::invalid_argument("oracle budget cap must be positive");
  std::vector<double> grid;
  for (const auto& l : letters) {
    i64 top = l.weight.budget(budgetCap);
    if (top > 200000)
      throw std::invalid_argument("oracle budget cap is too large");
    for (i64 m = 1; m <= top; ++m)
      grid.push_back(l.weight.inverse(static_cast<double>(m)));
  }
  std::sort(grid.begin(), grid.end());
  std::vector<double> out;
  for (double r : grid) {
    if (out.empty() || r - out.back() > 1e-9 * std::max(1.0, out.back()))
      out.push_back(r);
  }
  return out;
}

// Whether g admits a word whose per-letter usage stays within the budgets.
inline bool oracle_feasible(const Group& G,
                            const std::vector<SystemLetter>& letters,
                            const std::vector<i64>& budgets, const Element& g,
                            std::size_t maxStates = 4000000) {
  if (g == G.identity()) return true;
  detail::LetterMoves mv = detail::letter_moves(G, letters);
  std::unordered_map<Element, detail::UsageFrontier, ElementHash> reached;
  std::deque<std::pair<Element, detail::Usage>> queue;
  detail::Usage zero(letters.size(), 0);
  reached[G.identity()].insert(zero);
  queue.emplace_back(G.identity(), zero);
  std::size_t states = 1;
  while (!queue.empty()) {
    auto [cur, usage] = std::move(queue.front());
    queue.pop_front();
    for (std::size_t k = 0; k < mv.step.size(); ++k) {
      std::size_t li = mv.which[k];
      if (static_cast<i64>(usage[li]) + 1 > budgets[li]) continue;
      detail::Usage nu = usage;
      ++nu[li];
      Element nxt = G.mul(cur, mv.step[k]);
      if (!reached[nxt].insert(nu)) continue;
      if (nxt == g) return true;
      if (++states > maxStates)
        throw std::runtime_error("oracle feasibility search exceeded state cap");
      queue.emplace_back(std::move(nxt), std::move(nu));
    }
  }
  return false;
}

// Exact quasi-norm by binary search over the budget-increment grid; absent
// when g is unreachable within the budget cap.
inline std::optional<double> oracle_norm(const Group& G,
                                         const WeightSystem& system,
                                         const Element& g, double budgetCap,
                                         std::size_t maxStates = 4000000) {
  if (g == G.identity()) return 0.0;
  const auto& letters = system.letters();
  std::vector<double> grid = oracle_grid(letters, budgetCap);
  auto budgetsAt = [&](double R) {
    std::vector<i64> b;
    b.reserve(letters.size());
    for (const auto& l : letters) b.push_back(l.weight.budget(R));
    return b;
  };
  if (grid.empty() || !oracle_feasible(G, letters, budgetsAt(grid.back()), g,
                                       maxStates))
    return std::nullopt;
  std::size_t lo = 0, hi = grid.size() - 1;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (oracle_feasible(G, letters, budgetsAt(grid[mid]), g, maxStates))
      hi = mid;
    else
      lo = mid + 1;
  }
  return grid[lo];
}

// All quasi-norms up to the cap in one closure: explores the Pareto frontier
// of usage vectors and reads each norm off as min over frontier vectors of
// max_s F_s^{-1}(u_s).
inline std::unordered_map<Element, double, ElementHash> oracle_norm_table(
    const Group& G, const WeightSystem& system, double budgetCap,
    std::size_t maxStates = 8000000) {
  const auto& letters = system.letters();
  std::vector<i64> budgets;
  for (const auto& l : letters) {
    i64 b = l.weight.budget(budgetCap);
    if (b > 100000)
      throw std::invalid_argument("oracle budget cap is too large");
    budgets.push_back(b);
  }
  detail::LetterMoves mv = detail::letter_moves(G, letters);
  std::unordered_map<Element, detail::UsageFrontier, ElementHash> reached;
  std::deque<std::pair<Element, detail::Usage>> queue;
  detail::Usage zero(letters.size(), 0);
  reached[G.identity()].insert(zero);
  queue.emplace_back(G.identity(), zero);
  std::size_t states = 1;
  while (!queue.empty()) {
    auto [cur, usage] = std::move(queue.front());
    queue.pop_front();
    for (std::size_t k = 0; k < mv.step.size(); ++k) {
      std::size_t li = mv.which[k];
      if (static_cast<i64>(usage[li]) + 1 > budgets[li]) continue;
      detail::Usage nu = usage;
      ++nu[li];
      Element nxt = G.mul(cur, mv.step[k]);
      if (!reached[nxt].insert(nu)) continue;
      if (++states > maxStates)
        throw std::runtime_error("oracle norm table exceeded state cap");
      queue.emplace_back(std::move(nxt), std::move(nu));
    }
  }
  std::unordered_map<Element, double, ElementHash> norms;
  norms.reserve(reached.size());
  for (const auto& [g, frontier] : reached) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& u : frontier.mins) {
      double r = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] == 0) continue;
        r = std::max(r, letters[i].weight.inverse(static_cast<double>(u[i])));
      }
      best = std::min(best, r);
    }
    if (best <= budgetCap * (1.0 + 1e-12)) norms[g] = best;
  }
  norms[G.identity()] = 0.0;
  return norms;
}

}  // namespace longjump
