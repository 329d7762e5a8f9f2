#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "foodmap/bic.hpp"
#include "foodmap/count_table.hpp"
#include "foodmap/dag.hpp"
#include "foodmap/errors.hpp"

namespace foodmap {

enum class MoveKind : std::uint8_t { Add = 0, Remove = 1, Reverse = 2 };

inline std::string move_kind_name(MoveKind kind) {
  switch (kind) {
    case MoveKind::Add: return "add";
    case MoveKind::Remove: return "remove";
    case MoveKind::Reverse: return "reverse";
  }
  return "?";
}

struct Move {
  MoveKind kind = MoveKind::Add;
  int parent = 0;
  int child = 0;
};

struct TraceEntry {
  Move move;
  double score_before = 0.0;
  double score_after = 0.0;
};

struct SearchTrace {
  Dag initial_graph{0};
  Dag final_graph{0};
  double initial_score = 0.0;
  double final_score = 0.0;
  bool converged = false;
  bool any_singular = false;
  std::vector<TraceEntry> iterations;
};

namespace detail {

// Memo for family scores keyed by (child, parent set). The same family
// is probed many times across iterations, so this dominates the cost of
// the search on wider tables.
class FamilyCache {
 public:
  explicit FamilyCache(const CountTable& table) : table_(table) {}

  const FamilyScore& get(int child, std::uint32_t parent_mask) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(child)) << 32) |
        parent_mask;
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, family_bic(table_, child, parent_mask)).first;
    return it->second;
  }

 private:
  const CountTable& table_;
  std::unordered_map<std::uint64_t, FamilyScore> cache_;
};

}  // namespace detail

// Greedy local search over DAG structures. Each iteration enumerates
// every legal add, remove, and reverse of a single edge, evaluates the
// score change through the decomposable family scores (adds and removes
// touch the child family only; a reversal touches both endpoints), and
// applies the best strictly improving move. Ties go to the move seen
// first in enumeration order: all adds, then removes, then reversals,
// each scanned by (parent, child). Stops when no move improves the score
// or after max_iterations moves.
inline SearchTrace hill_climb(const CountTable& table, const Dag& initial,
                              int max_iterations = 200) {
  if (initial.node_count() != table.n_cols)
    throw Error("hill_climb: graph size does not match table width");
  if (max_iterations < 0)
    throw Error("hill_climb: max_iterations must be non-negative");

  const int n = static_cast<int>(table.n_cols);
  detail::FamilyCache cache(table);

  SearchTrace trace;
  trace.initial_graph = initial;

  Dag graph = initial;
  double score = 0.0;
  for (int child = 0; child < n; ++child) {
    const FamilyScore& fs = cache.get(child, graph.parent_mask(child));
    score += fs.score;
    trace.any_singular = trace.any_singular || fs.singular;
  }
  trace.initial_score = score;

  for (int iter = 0; iter < max_iterations; ++iter) {
    double best_delta = 0.0;
    Move best_move;
    bool found = false;

    auto consider = [&](Move move, double delta) {
      if (delta > best_delta) {
        best_delta = delta;
        best_move = move;
        found = true;
      }
    };

    for (int p = 0; p < n; ++p)
      for (int c = 0; c < n; ++c) {
        if (!graph.can_add(p, c)) continue;
        const std::uint32_t mask = graph.parent_mask(c);
        const double delta = cache.get(c, mask | (1u << p)).score -
                             cache.get(c, mask).score;
        consider({MoveKind::Add, p, c}, delta);
      }

    for (int p = 0; p < n; ++p)
      for (int c = 0; c < n; ++c) {
        if (!graph.has_edge(p, c)) continue;
        const std::uint32_t mask = graph.parent_mask(c);
        const double delta = cache.get(c, mask & ~(1u << p)).score -
                             cache.get(c, mask).score;
        consider({MoveKind::Remove, p, c}, delta);
      }

    for (int p = 0; p < n; ++p)
      for (int c = 0; c < n; ++c) {
        if (!graph.can_reverse(p, c)) continue;
        const std::uint32_t child_mask = graph.parent_mask(c);
        const std::uint32_t parent_mask = graph.parent_mask(p);
        const double delta =
            cache.get(c, child_mask & ~(1u << p)).score -
            cache.get(c, child_mask).score +
            cache.get(p, parent_mask | (1u << c)).score -
            cache.get(p, parent_mask).score;
        consider({MoveKind::Reverse, p, c}, delta);
      }

    if (!found) {
      trace.converged = true;
      break;
    }

    switch (best_move.kind) {
      case MoveKind::Add: graph.add_edge(best_move.parent, best_move.child); break;
      case MoveKind::Remove: graph.remove_edge(best_move.parent, best_move.child); break;
      case MoveKind::Reverse: graph.reverse_edge(best_move.parent, best_move.child); break;
    }

    TraceEntry entry;
    entry.move = best_move;
    entry.score_before = score;
    score += best_delta;
    entry.score_after = score;
    trace.iterations.push_back(entry);
  }

  for (int child = 0; child < n; ++child)
    trace.any_singular =
        trace.any_singular || cache.get(child, graph.parent_mask(child)).singular;

  trace.final_graph = graph;
  trace.final_score = score;
  return trace;
}

}  // namespace foodmap
