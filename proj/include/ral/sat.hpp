#pragma once

// Small DPLL solver: two-watched-literal unit propagation, chronological
// backtracking, and guarded "at most b false" cardinality constraints.

#include <cstdint>
#include <cstdlib>
#include <utility>
#include <vector>

namespace ral::sat {

/// Literal encoding: 2*var for the positive literal, 2*var+1 for its negation.
using Lit = int;
inline Lit pos(int var) { return 2 * var; }
inline Lit neg(int var) { return 2 * var + 1; }
inline Lit negate(Lit l) { return l ^ 1; }
inline int var_of(Lit l) { return l >> 1; }

class Solver {
 public:
  int new_var() {
    value_.push_back(Unassigned);
    level_.push_back(0);
    card_of_.emplace_back();
    watches_.emplace_back();
    watches_.emplace_back();
    return static_cast<int>(value_.size()) - 1;
  }
  int num_vars() const { return static_cast<int>(value_.size()); }

  void add_clause(std::vector<Lit> lits) {
    if (inconsistent_) return;
    // drop duplicate literals, detect tautologies
    std::vector<Lit> c;
    for (Lit l : lits) {
      bool dup = false;
      for (Lit m : c) {
        if (m == l) dup = true;
        if (m == negate(l)) return;
      }
      if (!dup) c.push_back(l);
    }
    if (c.empty()) {
      inconsistent_ = true;
      return;
    }
    if (c.size() == 1) {
      units_.push_back(c[0]);
      return;
    }
    int idx = static_cast<int>(clauses_.size());
    watches_[negate(c[0])].push_back(idx);
    watches_[negate(c[1])].push_back(idx);
    clauses_.push_back(std::move(c));
  }

  /// If `guard` is true, at most `bound` of `vars` may be false.
  void add_at_most_false(Lit guard, std::vector<int> vars, std::size_t bound) {
    int idx = static_cast<int>(cards_.size());
    cards_.push_back(Card{guard, std::move(vars), bound});
    card_of_[var_of(guard)].push_back(idx);
    for (int v : cards_.back().vars) card_of_[v].push_back(idx);
  }

  bool solve() {
    if (inconsistent_) return false;
    for (Lit u : units_)
      if (!enqueue(u, 0)) return false;
    for (const auto& c : cards_)
      if (!check_card(c, 0)) return false;
    // (decision literal, already flipped)
    std::vector<std::pair<Lit, bool>> decisions;
    int next_var = 0;
    for (;;) {
      if (!propagate()) {
        for (;;) {
          if (decisions.empty()) return false;
          auto [d, flipped] = decisions.back();
          int lvl = static_cast<int>(decisions.size());
          undo_to(lvl - 1);
          decisions.pop_back();
          if (!flipped) {
            decisions.emplace_back(negate(d), true);
            enqueue(negate(d), lvl);
            break;
          }
        }
        next_var = 0;
        continue;
      }
      while (next_var < num_vars() && value_[next_var] != Unassigned) ++next_var;
      if (next_var == num_vars()) return true;
      decisions.emplace_back(neg(next_var), false);
      enqueue(neg(next_var), static_cast<int>(decisions.size()));
    }
  }

  bool value_of(int var) const { return value_[var] == True; }

 private:
  enum : std::int8_t { False = 0, True = 1, Unassigned = 2 };
  struct Card {
    Lit guard;
    std::vector<int> vars;
    std::size_t bound;
  };

  std::int8_t lit_value(Lit l) const {
    std::int8_t v = value_[var_of(l)];
    if (v == Unassigned) return Unassigned;
    return (l & 1) ? static_cast<std::int8_t>(1 - v) : v;
  }

  bool enqueue(Lit l, int lvl) {
    std::int8_t v = lit_value(l);
    if (v == True) return true;
    if (v == False) return false;
    value_[var_of(l)] = (l & 1) ? False : True;
    level_[var_of(l)] = lvl;
    trail_.push_back(l);
    return true;
  }

  int current_level() const { return trail_.empty() ? 0 : level_[var_of(trail_.back())]; }

  void undo_to(int lvl) {
    while (!trail_.empty() && level_[var_of(trail_.back())] > lvl) {
      value_[var_of(trail_.back())] = Unassigned;
      trail_.pop_back();
    }
    if (head_ > trail_.size()) head_ = trail_.size();
  }

  bool check_card(const Card& c, int lvl) {
    if (lit_value(c.guard) != True) {
      // guard unknown: if already too many false, guard must be false
      if (lit_value(c.guard) == Unassigned && count_false(c) > c.bound) return enqueue(negate(c.guard), lvl);
      return true;
    }
    std::size_t f = count_false(c);
    if (f > c.bound) return false;
    if (f == c.bound)
      for (int v : c.vars)
        if (value_[v] == Unassigned && !enqueue(pos(v), lvl)) return false;
    return true;
  }

  std::size_t count_false(const Card& c) const {
    std::size_t f = 0;
    for (int v : c.vars)
      if (value_[v] == False) ++f;
    return f;
  }

  bool propagate() {
    int lvl = current_level();
    while (head_ < trail_.size()) {
      Lit l = trail_[head_++];
      // clauses watching ~l (they hold l's negation as a watched literal)
      auto& ws = watches_[l];
      for (std::size_t i = 0; i < ws.size();) {
        int ci = ws[i];
        auto& c = clauses_[ci];
        Lit falsified = negate(l);
        if (c[0] == falsified) std::swap(c[0], c[1]);
        if (lit_value(c[0]) == True) {
          ++i;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (lit_value(c[k]) != False) {
            std::swap(c[1], c[k]);
            watches_[negate(c[1])].push_back(ci);
            ws[i] = ws.back();
            ws.pop_back();
            moved = true;
            break;
          }
        }
        if (moved) continue;
        if (!enqueue(c[0], lvl)) {
          head_ = trail_.size();
          return false;
        }
        ++i;
      }
      for (int cidx : card_of_[var_of(l)]) {
        if (!check_card(cards_[cidx], lvl)) {
          head_ = trail_.size();
          return false;
        }
      }
    }
    return true;
  }

  std::vector<std::int8_t> value_;
  std::vector<int> level_;
  std::vector<Lit> trail_;
  std::size_t head_ = 0;
  std::vector<std::vector<Lit>> clauses_;
  std::vector<std::vector<int>> watches_;
  std::vector<Card> cards_;
  std::vector<std::vector<int>> card_of_;
  std::vector<Lit> units_;
  bool inconsistent_ = false;
};

}  // namespace ral::sat
