#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dmcore/metric.hpp"

namespace dmcore {

// Hierarchical 2^i-nets N_L <= ... <= N_1 <= N_0 = X. Levels below 0 are
// virtual (they equal X). L is the top level: 2^(L-1) <= diam(X) < 2^L and
// |N_L| = 1; a single point has L = 0 by convention.
struct NetHierarchy {
  int L = 0;
  std::vector<std::vector<int>> levels;  // levels[i] = ids of N_i, ascending

  bool contains(int level, int id) const;
};

// Greedy net construction: scan N_{i-1} in greedy_order and admit a point to
// N_i iff it is >= 2^i from everything already admitted. Empty order means
// ascending id order.
NetHierarchy build_hierarchy(const MetricSpace& M,
                             std::span<const int> greedy_order = {});

enum class TreeFlavor { kSimple, kDecomposition };

// Net tree over a hierarchy: each (point, level i) node has one parent in
// N_{i+1}. Simple trees pick the nearest net point (1-covering); the
// randomized-decomposition flavor partitions each cluster with truncated
// exponential radii (2-covering).
class NetTree {
 public:
  const NetHierarchy& hierarchy() const { return hierarchy_; }
  const MetricSpace& metric() const { return *metric_; }
  TreeFlavor flavor() const { return flavor_; }
  double c_cover() const { return c_cover_; }
  std::uint64_t seed() const { return seed_; }
  double chi() const { return chi_; }
  int top_level() const { return hierarchy_.L; }

  // Ancestor of x in N_i; identity for i <= 0.
  int parent_at(int x, int level) const;

  // Leaf descendants of the level-i node of v: {x : parent_at(x, i) == v}.
  std::vector<int> descendants(int v, int level) const;

  // Largest level j <= upper at which x and y share an ancestor.
  int meet_level(int x, int y) const;

  // Max child count over nodes (diagnostic).
  int max_fanout() const;

  std::string to_json() const;

  friend NetTree build_simple_tree(const MetricSpace& M,
                                   const NetHierarchy& H);
  friend NetTree build_decomposition_tree(const MetricSpace& M,
                                          const NetHierarchy& H,
                                          std::uint64_t seed, double chi);

 private:
  NetTree() = default;
  void build_ancestors();

  const MetricSpace* metric_ = nullptr;
  NetHierarchy hierarchy_;
  TreeFlavor flavor_ = TreeFlavor::kSimple;
  double c_cover_ = 1.0;
  std::uint64_t seed_ = 0;
  double chi_ = 0.0;
  // parent_[i] is parallel to hierarchy_.levels[i]; value is the id of the
  // N_{i+1} parent. Defined for i = 0..L-1.
  std::vector<std::vector<int>> parent_;
  // anc_[x * (L+1) + i] = ancestor of x in N_i (anc at level 0 is x).
  std::vector<int> anc_;
};

NetTree build_simple_tree(const MetricSpace& M, const NetHierarchy& H);

// chi >= 2. Per level i each net point draws a radius 2^i + h_u with h_u from
// the truncated exponential on [0, 2^i]; points join the first center in a
// seeded random order that covers them, confined to their parent cluster so
// the partitions stay laminar (nearest in-cluster center when uncovered).
NetTree build_decomposition_tree(const MetricSpace& M, const NetHierarchy& H,
                                 std::uint64_t seed, double chi);

// True iff the level-i partition places all of P inside a single subtree.
bool contained_at_level(const NetTree& T, std::span<const int> P, int level);

}  // namespace dmcore
