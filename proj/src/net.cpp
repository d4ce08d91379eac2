#include "dmcore/net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "dmcore/errors.hpp"
#include "dmcore/rng.hpp"
#include "nlohmann/json.hpp"

namespace dmcore {

bool NetHierarchy::contains(int level, int id) const {
  if (level <= 0) return true;
  if (level > L) return false;
  const auto& v = levels[level];
  return std::binary_search(v.begin(), v.end(), id);
}

NetHierarchy build_hierarchy(const MetricSpace& M,
                             std::span<const int> greedy_order) {
  int n = M.n();
  std::vector<int> order(greedy_order.begin(), greedy_order.end());
  if (order.empty()) {
    order.resize(n);
    for (int i = 0; i < n; ++i) order[i] = i;
  }
  if (static_cast<int>(order.size()) != n)
    throw validation_error("greedy order must be a permutation of all ids");

  NetHierarchy H;
  H.levels.emplace_back();
  H.levels[0].resize(n);
  for (int i = 0; i < n; ++i) H.levels[0][i] = i;
  if (n == 1) {
    H.L = 0;
    return H;
  }

  double diam = M.diameter();
  H.L = static_cast<int>(std::floor(std::log2(diam))) + 1;
  std::vector<char> in_prev(n, 1);
  for (int lvl = 1; lvl <= H.L; ++lvl) {
    double radius = std::ldexp(1.0, lvl);
    std::vector<int> net;
    std::vector<char> in_net(n, 0);
    for (int id : order) {
      if (!in_prev[id]) continue;
      bool far = true;
      for (int u : net)
        if (M.distance(id, u) < radius - kDistanceTol) {
          far = false;
          break;
        }
      if (far) {
        net.push_back(id);
        in_net[id] = 1;
      }
    }
    std::sort(net.begin(), net.end());
    H.levels.push_back(std::move(net));
    in_prev = std::move(in_net);
  }
  if (H.levels[H.L].size() != 1)
    throw internal_error("top net level is not a singleton");
  return H;
}

void NetTree::build_ancestors() {
  int n = metric_->n();
  int L = hierarchy_.L;
  anc_.assign(static_cast<std::size_t>(n) * (L + 1), -1);
  // per-level id -> slot lookup
  std::vector<std::unordered_map<int, int>> slot(L + 1);
  for (int lvl = 0; lvl <= L; ++lvl)
    for (std::size_t s = 0; s < hierarchy_.levels[lvl].size(); ++s)
      slot[lvl].emplace(hierarchy_.levels[lvl][s], static_cast<int>(s));
  for (int x = 0; x < n; ++x) {
    int cur = x;
    anc_[static_cast<std::size_t>(x) * (L + 1)] = x;
    for (int lvl = 0; lvl < L; ++lvl) {
      cur = parent_[lvl][slot[lvl].at(cur)];
      anc_[static_cast<std::size_t>(x) * (L + 1) + lvl + 1] = cur;
    }
  }
}

int NetTree::parent_at(int x, int level) const {
  if (level <= 0) return x;
  if (level > hierarchy_.L)
    throw validation_error("level above the tree root");
  return anc_[static_cast<std::size_t>(x) * (hierarchy_.L + 1) + level];
}

std::vector<int> NetTree::descendants(int v, int level) const {
  std::vector<int> out;
  if (level <= 0) {
    out.push_back(v);
    return out;
  }
  for (int x = 0; x < metric_->n(); ++x)
    if (parent_at(x, level) == v) out.push_back(x);
  return out;
}

int NetTree::meet_level(int x, int y) const {
  int L = hierarchy_.L;
  if (x == y) return 0;
  for (int lvl = 1; lvl <= L; ++lvl)
    if (parent_at(x, lvl) == parent_at(y, lvl)) return lvl;
  throw internal_error("points never meet below the root");
}

int NetTree::max_fanout() const {
  int best = 0;
  for (int lvl = 0; lvl + 1 <= hierarchy_.L; ++lvl) {
    std::unordered_map<int, int> counts;
    for (int p : parent_[lvl]) ++counts[p];
    for (auto& [_, c] : counts) best = std::max(best, c);
  }
  return best;
}

std::string NetTree::to_json() const {
  nlohmann::ordered_json j;
  j["levels"] = hierarchy_.levels;
  auto edges = nlohmann::ordered_json::array();
  for (int lvl = 0; lvl + 1 <= hierarchy_.L; ++lvl)
    for (std::size_t s = 0; s < hierarchy_.levels[lvl].size(); ++s)
      edges.push_back({lvl, hierarchy_.levels[lvl][s], parent_[lvl][s]});
  j["parent"] = edges;
  j["flavor"] = flavor_ == TreeFlavor::kSimple ? "simple" : "decomposition";
  j["seed"] = seed_;
  j["chi"] = chi_;
  j["c_cover"] = c_cover_;
  return j.dump();
}

NetTree build_simple_tree(const MetricSpace& M, const NetHierarchy& H) {
  NetTree T;
  T.metric_ = &M;
  T.hierarchy_ = H;
  T.flavor_ = TreeFlavor::kSimple;
  T.c_cover_ = 1.0;
  T.parent_.resize(std::max(0, H.L));
  for (int lvl = 0; lvl < H.L; ++lvl) {
    const auto& cur = H.levels[lvl];
    const auto& up = H.levels[lvl + 1];
    T.parent_[lvl].resize(cur.size());
    for (std::size_t s = 0; s < cur.size(); ++s) {
      int best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (int cand : up) {
        double d = M.distance(cur[s], cand);
        if (d < best_d - kDistanceTol ||
            (std::abs(d - best_d) <= kDistanceTol && cand < best)) {
          best = cand;
          best_d = d;
        }
      }
      T.parent_[lvl][s] = best;
    }
  }
  T.build_ancestors();
  return T;
}

NetTree build_decomposition_tree(const MetricSpace& M, const NetHierarchy& H,
                                 std::uint64_t seed, double chi) {
  if (chi < 2.0) throw validation_error("chi must be >= 2");
  NetTree T;
  T.metric_ = &M;
  T.hierarchy_ = H;
  T.flavor_ = TreeFlavor::kDecomposition;
  T.c_cover_ = 2.0;
  T.seed_ = seed;
  T.chi_ = chi;
  int L = H.L;
  T.parent_.resize(std::max(0, L));

  Rng root_rng(seed);
  for (int lvl = 0; lvl < L; ++lvl) {
    const auto& net = H.levels[lvl];
    const auto& up = H.levels[lvl + 1];
    double width = std::ldexp(1.0, lvl + 1);

    // radii drawn in ascending-id order, order pi drawn separately
    std::unordered_map<int, double> radius;
    Rng h_rng = root_rng.derive("radius", static_cast<std::uint64_t>(lvl + 1));
    for (int w : up)
      radius.emplace(w, width + sample_truncated_exponential(h_rng, width, chi));
    std::vector<int> pi(up.begin(), up.end());
    Rng pi_rng = root_rng.derive("order", static_cast<std::uint64_t>(lvl + 1));
    pi_rng.shuffle(pi);

    // a net member keeps itself as parent (its cluster nests through itself);
    // everyone else joins the first covering cluster in pi order. Coverage is
    // guaranteed: the nearest upper net point is within 2^(lvl+1) <= radius.
    T.parent_[lvl].resize(net.size());
    for (std::size_t s = 0; s < net.size(); ++s) {
      int u = net[s];
      if (std::binary_search(up.begin(), up.end(), u)) {
        T.parent_[lvl][s] = u;
        continue;
      }
      int chosen = -1;
      for (int w : pi)
        if (M.distance(u, w) <= radius.at(w)) {
          chosen = w;
          break;
        }
      if (chosen < 0)
        throw internal_error("net point not covered by any upper cluster");
      T.parent_[lvl][s] = chosen;
    }
  }
  T.build_ancestors();
  return T;
}

bool contained_at_level(const NetTree& T, std::span<const int> P, int level) {
  if (P.empty()) return true;
  int anchor = T.parent_at(P[0], level);
  for (int x : P)
    if (T.parent_at(x, level) != anchor) return false;
  return true;
}

}  // namespace dmcore
