#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "foodmap/errors.hpp"

namespace foodmap {

// Directed acyclic graph over up to 32 nodes, stored as one parent bitmask per
// node. Edges are unique ordered pairs; (a,b) and (b,a) are mutually
// exclusive; every mutation preserves acyclicity.
class Dag {
 public:
  explicit Dag(std::size_t n) : n_(n), parents_(n, 0) {
    if (n > 32) throw Error("Dag: at most 32 nodes supported");
  }

  std::size_t node_count() const { return n_; }

  std::uint32_t parent_mask(std::size_t child) const { return parents_[child]; }

  bool has_edge(std::size_t parent, std::size_t child) const {
    return (parents_[child] >> parent) & 1u;
  }

  std::vector<std::size_t> parents_of(std::size_t child) const {
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < n_; ++p)
      if (has_edge(p, child)) out.push_back(p);
    return out;
  }

  std::size_t edge_count() const {
    std::size_t total = 0;
    for (std::uint32_t mask : parents_) total += std::popcount(mask);
    return total;
  }

  // Directed reachability (true if from == to).
  bool has_path(std::size_t from, std::size_t to) const {
    if (from == to) return true;
    std::uint32_t visited = 1u << from;
    std::uint32_t frontier = visited;
    while (frontier) {
      std::uint32_t next = 0;
      for (std::size_t c = 0; c < n_; ++c) {
        if ((visited >> c) & 1u) continue;
        if (parents_[c] & frontier) next |= 1u << c;
      }
      if ((next >> to) & 1u) return true;
      visited |= next;
      frontier = next;
    }
    return false;
  }

  bool can_add(std::size_t parent, std::size_t child) const {
    if (parent == child) return false;
    if (has_edge(parent, child) || has_edge(child, parent)) return false;
    return !has_path(child, parent);
  }

  // Legal iff reversing (parent,child) to (child,parent) leaves the graph
  // acyclic: no second directed path parent -> child may exist.
  bool can_reverse(std::size_t parent, std::size_t child) const {
    if (!has_edge(parent, child)) return false;
    Dag tmp = *this;
    tmp.parents_[child] &= ~(1u << parent);
    return !tmp.has_path(parent, child);
  }

  void add_edge(std::size_t parent, std::size_t child) {
    if (!can_add(parent, child))
      throw Error("Dag: illegal edge " + std::to_string(parent) + "->" +
                  std::to_string(child));
    parents_[child] |= 1u << parent;
  }

  void remove_edge(std::size_t parent, std::size_t child) {
    if (!has_edge(parent, child))
      throw Error("Dag: no edge " + std::to_string(parent) + "->" +
                  std::to_string(child));
    parents_[child] &= ~(1u << parent);
  }

  void reverse_edge(std::size_t parent, std::size_t child) {
    if (!can_reverse(parent, child))
      throw Error("Dag: illegal reversal " + std::to_string(parent) + "->" +
                  std::to_string(child));
    parents_[child] &= ~(1u << parent);
    parents_[parent] |= 1u << child;
  }

  bool is_acyclic() const {
    // Kahn peeling over the masks.
    std::uint32_t removed = 0;
    const std::uint32_t all = n_ == 32 ? ~0u : (1u << n_) - 1u;
    for (std::size_t round = 0; round < n_; ++round) {
      bool progressed = false;
      for (std::size_t c = 0; c < n_; ++c) {
        if ((removed >> c) & 1u) continue;
        if ((parents_[c] & ~removed) == 0) {
          removed |= 1u << c;
          progressed = true;
        }
      }
      if (removed == all) return true;
      if (!progressed) return false;
    }
    return removed == all;
  }

  // Every pair i<j carries edge i->j: the canonical fully connected DAG.
  static Dag full(std::size_t n) {
    Dag d(n);
    for (std::size_t j = 0; j < n; ++j)
      d.parents_[j] = (j == 0) ? 0u : static_cast<std::uint32_t>((1u << j) - 1u);
    return d;
  }

  friend bool operator==(const Dag&, const Dag&) = default;

 private:
  std::size_t n_;
  std::vector<std::uint32_t> parents_;
};

// Edges sorted by (parent, child) in canonical node order.
inline std::vector<std::pair<std::size_t, std::size_t>> to_edge_list(const Dag& dag) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t p = 0; p < dag.node_count(); ++p)
    for (std::size_t c = 0; c < dag.node_count(); ++c)
      if (dag.has_edge(p, c)) edges.emplace_back(p, c);
  return edges;
}

// Undirected edge set as ordered (min,max) pairs, for structure comparison.
inline std::vector<std::pair<std::size_t, std::size_t>> skeleton(const Dag& dag) {
  auto edges = to_edge_list(dag);
  for (auto& [a, b] : edges)
    if (a > b) std::swap(a, b);
  std::sort(edges.begin(), edges.end());
  return edges;
}

}  // namespace foodmap
