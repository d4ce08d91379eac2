#include "dmcore/ranges.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include "dmcore/errors.hpp"

namespace dmcore {

namespace {

struct VecHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (int x : v) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b9;
      h *= 0x100000001b3ULL;
    }
    return h;
  }
};

using RangeSet = std::unordered_set<std::vector<int>, VecHash>;

double dim_estimate_of(std::uint64_t count, std::size_t m) {
  if (m < 2 || count < 2) return 0.0;
  return std::log(static_cast<double>(count)) /
         std::log(static_cast<double>(m));
}

}  // namespace

FunctionFamily FunctionFamily::plain(const MetricSpace& M, std::vector<int> H,
                                     std::vector<double> w, double z) {
  FunctionFamily F;
  F.metric = &M;
  F.index_set = std::move(H);
  F.weights = std::move(w);
  F.z = z;
  F.kernel = Kernel::kPlainD;
  if (F.weights.empty()) F.weights.assign(F.index_set.size(), 1.0);
  if (F.weights.size() != F.index_set.size())
    throw validation_error("weights must parallel the index set");
  for (double x : F.weights)
    if (x < 0.0) throw validation_error("weights must be nonnegative");
  return F;
}

FunctionFamily FunctionFamily::over_smoothed(const SmoothedMetric& S,
                                             std::vector<int> H,
                                             std::vector<double> w) {
  FunctionFamily F = plain(S.metric(), std::move(H), std::move(w), S.z());
  F.kernel = Kernel::kSmoothedDelta;
  F.smoothed = &S;
  return F;
}

double FunctionFamily::kernel_value(int x, int y) const {
  return kernel == Kernel::kPlainD ? metric->distance(x, y)
                                   : smoothed->delta(x, y);
}

double FunctionFamily::value(std::size_t index_pos, int center) const {
  return weights[index_pos] * pow_z(kernel_value(index_set[index_pos], center), z);
}

double FunctionFamily::value_at_set(std::size_t index_pos,
                                    std::span<const int> C) const {
  double best = std::numeric_limits<double>::infinity();
  for (int c : C) best = std::min(best, pow_z(kernel_value(index_set[index_pos], c), z));
  return weights[index_pos] * best;
}

bool FunctionFamily::is_gap_weighted(double c) const {
  std::vector<double> distinct(weights);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  for (std::size_t i = 1; i < distinct.size(); ++i) {
    if (distinct[i - 1] == 0.0) return false;
    if (distinct[i] / distinct[i - 1] < c) return false;
  }
  return true;
}

std::uint64_t binomial_capped(int n, int k, std::uint64_t cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    if (r > cap) return cap + 1;
  }
  return r;
}

void for_each_combination(
    int n, int k, const std::function<void(std::span<const int>)>& fn) {
  if (k <= 0 || k > n) throw validation_error("need 1 <= k <= n");
  std::vector<int> c(k);
  for (int i = 0; i < k; ++i) c[i] = i;
  for (;;) {
    fn(std::span<const int>(c.data(), c.size()));
    int i = k - 1;
    while (i >= 0 && c[i] == n - k + i) --i;
    if (i < 0) return;
    ++c[i];
    for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
}

namespace {

// Collects all distinct prefix sets (by nondecreasing f value, ties entering
// together) across the callers' centers into `out`.
class PrefixCollector {
 public:
  explicit PrefixCollector(const FunctionFamily& F) : F_(F) {
    order_.resize(F.index_set.size());
  }

  void add_center(const std::function<double(std::size_t)>& value_of,
                  RangeSet& out) {
    std::size_t m = F_.index_set.size();
    values_.resize(m);
    for (std::size_t i = 0; i < m; ++i) values_[i] = value_of(i);
    for (std::size_t i = 0; i < m; ++i) order_[i] = i;
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      if (values_[a] != values_[b]) return values_[a] < values_[b];
      return F_.index_set[a] < F_.index_set[b];
    });
    std::vector<int> prefix;
    prefix.reserve(m);
    out.emplace();  // the empty range is always a range
    for (std::size_t i = 0; i < m;) {
      std::size_t j = i;
      while (j < m && values_[order_[j]] == values_[order_[i]]) {
        prefix.push_back(F_.index_set[order_[j]]);
        ++j;
      }
      std::vector<int> key(prefix);
      std::sort(key.begin(), key.end());
      out.insert(std::move(key));
      i = j;
    }
  }

 private:
  const FunctionFamily& F_;
  std::vector<double> values_;
  std::vector<std::size_t> order_;
};

RangeReport report_from(RangeSet&& set, std::size_t m, bool keep_ranges) {
  RangeReport rep;
  rep.distinct_count = set.size();
  rep.dim_estimate = dim_estimate_of(rep.distinct_count, m);
  if (keep_ranges) {
    std::vector<std::vector<int>> all(set.begin(), set.end());
    std::sort(all.begin(), all.end());
    rep.ranges = std::move(all);
  }
  return rep;
}

}  // namespace

RangeReport enumerate_ranges_singleton(const FunctionFamily& F,
                                       bool keep_ranges) {
  const MetricSpace& M = *F.metric;
  std::size_t m = F.index_set.size();
  if (m == 0) throw validation_error("empty index set");
  if (static_cast<std::uint64_t>(M.n()) * m > 10'000'000ULL)
    throw guard_error("range enumeration guard exceeded: |X|*|H| > 1e7");
  RangeSet set;
  PrefixCollector collect(F);
  for (int c = 0; c < M.n(); ++c)
    collect.add_center([&](std::size_t i) { return F.value(i, c); }, set);
  return report_from(std::move(set), m, keep_ranges);
}

RangeReport enumerate_ranges_ksubset(const FunctionFamily& F, int k,
                                     bool keep_ranges) {
  const MetricSpace& M = *F.metric;
  std::size_t m = F.index_set.size();
  if (m == 0) throw validation_error("empty index set");
  if (binomial_capped(M.n(), k, 1'000'000ULL) > 1'000'000ULL)
    throw guard_error("range enumeration guard exceeded: C(n,k) > 1e6");
  RangeSet set;
  PrefixCollector collect(F);
  std::vector<int> C(k);
  for_each_combination(M.n(), k, [&](std::span<const int> comb) {
    std::copy(comb.begin(), comb.end(), C.begin());
    collect.add_center([&](std::size_t i) { return F.value_at_set(i, C); },
                       set);
  });
  return report_from(std::move(set), m, keep_ranges);
}

double alpha_deviation(const FunctionFamily& F, std::span<const int> sample,
                       int ground_k) {
  if (sample.empty()) throw validation_error("empty sample");
  std::size_t m = F.index_set.size();
  std::unordered_map<int, int> in_index;
  for (std::size_t i = 0; i < m; ++i) in_index.emplace(F.index_set[i], 1);
  std::unordered_map<int, double> sample_count;
  for (int id : sample) {
    if (!in_index.count(id))
      throw validation_error("sample id not in the index set");
    sample_count[id] += 1.0;
  }
  double s = static_cast<double>(sample.size());
  double worst = 0.0;

  std::vector<std::size_t> order(m);
  std::vector<double> values(m);
  auto scan_center = [&](const std::function<double(std::size_t)>& value_of) {
    for (std::size_t i = 0; i < m; ++i) values[i] = value_of(i);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return values[a] < values[b];
    });
    double in_range = 0.0, in_sample = 0.0;
    for (std::size_t i = 0; i < m;) {
      std::size_t j = i;
      while (j < m && values[order[j]] == values[order[i]]) {
        in_range += 1.0;
        auto it = sample_count.find(F.index_set[order[j]]);
        if (it != sample_count.end()) in_sample += it->second;
        ++j;
      }
      worst = std::max(worst, std::abs(in_range / static_cast<double>(m) -
                                       in_sample / s));
      i = j;
    }
  };

  const MetricSpace& M = *F.metric;
  if (ground_k <= 1) {
    for (int c = 0; c < M.n(); ++c)
      scan_center([&](std::size_t i) { return F.value(i, c); });
  } else {
    if (binomial_capped(M.n(), ground_k, 100'000ULL) > 100'000ULL)
      throw guard_error("deviation guard exceeded: C(n,k) > 1e5");
    std::vector<int> C(ground_k);
    for_each_combination(M.n(), ground_k, [&](std::span<const int> comb) {
      std::copy(comb.begin(), comb.end(), C.begin());
      scan_center([&](std::size_t i) { return F.value_at_set(i, C); });
    });
  }
  return worst;
}

BallDecomposition decompose_ball_subtrees(const SmoothedMetric& S, int x,
                                          double r) {
  if (r <= 0.0) throw validation_error("radius must be positive");
  const NetTree& T = S.tree();
  int n = S.metric().n();
  int j = S.ball_level(r);

  std::vector<char> in_ball(n, 0);
  for (int y : S.ball(x, r)) in_ball[y] = 1;

  BallDecomposition out;
  out.level = j;
  std::vector<char> root_seen(n, 0);
  for (int y = 0; y < n; ++y) {
    if (!in_ball[y]) continue;
    int v = T.parent_at(y, j);
    if (!root_seen[v]) {
      root_seen[v] = 1;
      out.roots.push_back(v);
    }
  }
  std::sort(out.roots.begin(), out.roots.end());
  // exactness: every leaf under a chosen root must lie inside the ball
  for (int y = 0; y < n; ++y) {
    int v = T.parent_at(y, j);
    if (root_seen[v] && !in_ball[y])
      throw internal_error(
          "ball is not a union of whole subtrees at the chosen level");
  }
  return out;
}

}  // namespace dmcore
