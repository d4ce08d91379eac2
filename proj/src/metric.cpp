#include "dmcore/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "dmcore/errors.hpp"
#include "dmcore/rng.hpp"

namespace dmcore {

namespace {

void validate_matrix(const std::vector<double>& m, int n) {
  for (int i = 0; i < n; ++i) {
    double diag = m[static_cast<std::size_t>(i) * n + i];
    if (std::abs(diag) > kDistanceTol)
      throw validation_error("distance matrix has nonzero diagonal at row " +
                             std::to_string(i));
    for (int j = i + 1; j < n; ++j) {
      double a = m[static_cast<std::size_t>(i) * n + j];
      double b = m[static_cast<std::size_t>(j) * n + i];
      if (a < 0.0 || b < 0.0)
        throw validation_error("negative distance at (" + std::to_string(i) +
                               "," + std::to_string(j) + ")");
      if (std::abs(a - b) > kDistanceTol * std::max(1.0, std::abs(a)))
        throw validation_error("distance matrix not symmetric at (" +
                               std::to_string(i) + "," + std::to_string(j) +
                               ")");
    }
  }
}

void validate_triangles(const MetricSpace& M) {
  int n = M.n();
  auto check = [&](int a, int b, int c) {
    double ab = M.distance(a, b), bc = M.distance(b, c), ac = M.distance(a, c);
    if (ac > ab + bc + kDistanceTol)
      throw validation_error(
          "triangle inequality violated on (" + std::to_string(a) + "," +
          std::to_string(b) + "," + std::to_string(c) + "): " +
          std::to_string(ac) + " > " + std::to_string(ab + bc));
  };
  if (n <= 200) {
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        for (int c = b + 1; c < n; ++c) {
          check(a, b, c);
          check(b, c, a);
          check(c, a, b);
        }
  } else {
    Rng rng(0x7261647321ULL);  // fixed seed: load validation is deterministic
    for (int t = 0; t < 10000; ++t) {
      int a = static_cast<int>(rng.uniform_int(n));
      int b = static_cast<int>(rng.uniform_int(n));
      int c = static_cast<int>(rng.uniform_int(n));
      if (a != b && b != c && a != c) check(a, b, c);
    }
  }
}

}  // namespace

MetricSpace MetricSpace::from_coordinates(std::vector<std::vector<double>> rows,
                                          bool rescale) {
  if (rows.empty()) throw validation_error("empty coordinate input");
  std::size_t dim = rows[0].size();
  if (dim == 0) throw validation_error("coordinate rows have no columns");
  for (const auto& r : rows)
    if (r.size() != dim)
      throw validation_error("ragged coordinate rows");

  // merge exactly coincident rows, keeping first-seen order
  std::map<std::vector<double>, int> seen;
  MetricSpace M;
  M.dim_ = static_cast<int>(dim);
  for (auto& r : rows) {
    auto it = seen.find(r);
    if (it != seen.end()) {
      ++M.multiplicity_[it->second];
    } else {
      int id = static_cast<int>(seen.size());
      seen.emplace(r, id);
      M.coords_.insert(M.coords_.end(), r.begin(), r.end());
      M.multiplicity_.push_back(1);
    }
  }
  M.n_ = static_cast<int>(M.multiplicity_.size());
  M.finalize(rescale);
  return M;
}

MetricSpace MetricSpace::from_distance_matrix(std::vector<double> flat, int n,
                                              bool rescale, bool validate) {
  if (n < 1) throw validation_error("empty distance matrix");
  if (flat.size() != static_cast<std::size_t>(n) * n)
    throw validation_error("distance matrix is not n x n");
  if (validate) validate_matrix(flat, n);

  // merge ids at distance exactly zero
  std::vector<int> rep(n, -1);
  std::vector<int> keep;
  std::vector<std::int64_t> mult;
  for (int i = 0; i < n; ++i) {
    if (rep[i] >= 0) continue;
    int id = static_cast<int>(keep.size());
    rep[i] = id;
    keep.push_back(i);
    mult.push_back(1);
    for (int j = i + 1; j < n; ++j)
      if (rep[j] < 0 && flat[static_cast<std::size_t>(i) * n + j] == 0.0) {
        rep[j] = id;
        ++mult[id];
      }
  }
  MetricSpace M;
  M.n_ = static_cast<int>(keep.size());
  M.multiplicity_ = std::move(mult);
  M.matrix_.resize(static_cast<std::size_t>(M.n_) * M.n_);
  for (int a = 0; a < M.n_; ++a)
    for (int b = 0; b < M.n_; ++b)
      M.matrix_[static_cast<std::size_t>(a) * M.n_ + b] =
          a == b ? 0.0 : flat[static_cast<std::size_t>(keep[a]) * n + keep[b]];
  M.finalize(rescale);
  if (validate && M.n_ >= 3) validate_triangles(M);
  return M;
}

void MetricSpace::finalize(bool rescale) {
  total_weight_ = 0;
  for (auto m : multiplicity_) total_weight_ += m;
  if (n_ < 2 || !rescale) return;

  double min_pos = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) {
      double d = distance(i, j);
      if (d > 0.0) min_pos = std::min(min_pos, d);
    }
  if (!std::isfinite(min_pos) || min_pos <= 0.0)
    throw validation_error("no positive distance to rescale by");
  scale_factor_ = 1.0 / min_pos;
  if (std::abs(scale_factor_ - 1.0) < 1e-15) {
    scale_factor_ = 1.0;
    return;
  }
  if (!coords_.empty()) {
    for (double& c : coords_) c *= scale_factor_;
  } else {
    for (double& d : matrix_) d *= scale_factor_;
  }
}

double MetricSpace::diameter() const {
  if (diameter_ >= 0.0) return diameter_;
  double d = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) d = std::max(d, distance(i, j));
  diameter_ = d;
  return d;
}

double MetricSpace::distance_to_set(int i, std::span<const int> C) const {
  double best = std::numeric_limits<double>::infinity();
  for (int c : C) best = std::min(best, distance(i, c));
  return best;
}

CenterSet::CenterSet(std::vector<int> ids, const MetricSpace& M)
    : ids_(std::move(ids)) {
  if (ids_.empty() || static_cast<int>(ids_.size()) > M.n())
    throw validation_error("center set must have 1 <= k <= n ids");
  std::vector<int> sorted = ids_;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 0 || sorted[i] >= M.n())
      throw validation_error("center id out of range: " +
                             std::to_string(sorted[i]));
    if (i > 0 && sorted[i] == sorted[i - 1])
      throw validation_error("duplicate center id: " +
                             std::to_string(sorted[i]));
  }
}

double kdist(const MetricSpace& M, const CenterSet& C, double z) {
  if (z <= 0.0) throw validation_error("z must be positive");
  double total = 0.0;
  for (int i = 0; i < M.n(); ++i) {
    double d = M.distance_to_set(i, C.ids());
    total += static_cast<double>(M.multiplicity(i)) * pow_z(d, z);
  }
  return total;
}

std::int64_t trim_keep_count(std::int64_t m, double gamma) {
  // ceil((1-gamma)*m), nudged so exact integer products do not round up
  double v = (1.0 - gamma) * static_cast<double>(m);
  auto keep = static_cast<std::int64_t>(std::ceil(v - 1e-9));
  return std::max<std::int64_t>(1, std::min(keep, m));
}

namespace {

double trimmed_sum(std::vector<std::pair<double, std::int64_t>>& value_mult,
                   std::int64_t keep) {
  // entries already carry a (value, id)-stable order key via prior sort
  double total = 0.0;
  for (const auto& [v, m] : value_mult) {
    if (keep <= 0) break;
    std::int64_t take = std::min(keep, m);
    total += v * static_cast<double>(take);
    keep -= take;
  }
  return total;
}

}  // namespace

double kdist_trimmed(const MetricSpace& M, const CenterSet& C,
                     const CostQuery& q) {
  if (q.z <= 0.0) throw validation_error("z must be positive");
  if (q.gamma < 0.0 || q.gamma >= 1.0)
    throw validation_error("gamma must lie in [0, 1)");
  std::vector<std::pair<double, std::int64_t>> vals;
  vals.reserve(M.n());
  std::vector<int> order(M.n());
  for (int i = 0; i < M.n(); ++i) order[i] = i;
  std::vector<double> cost(M.n());
  for (int i = 0; i < M.n(); ++i)
    cost[i] = pow_z(M.distance_to_set(i, C.ids()), q.z);
  // ties kept by smallest point id
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (cost[a] != cost[b]) return cost[a] < cost[b];
    return a < b;
  });
  for (int i : order) vals.emplace_back(cost[i], M.multiplicity(i));
  return trimmed_sum(vals, trim_keep_count(M.total_weight(), q.gamma));
}

double kdist_trimmed_multiset(const MetricSpace& M, std::span<const int> ids,
                              const CenterSet& C, const CostQuery& q) {
  if (ids.empty()) throw validation_error("empty id multiset");
  std::vector<std::pair<double, int>> vals;
  vals.reserve(ids.size());
  for (int id : ids)
    vals.emplace_back(pow_z(M.distance_to_set(id, C.ids()), q.z), id);
  std::sort(vals.begin(), vals.end());
  std::int64_t keep = trim_keep_count(static_cast<std::int64_t>(ids.size()),
                                      q.gamma);
  double total = 0.0;
  for (std::int64_t i = 0; i < keep; ++i) total += vals[i].first;
  return total;
}

MetricSpace hard_instance(int n) {
  if (n < 1 || n > 12)
    throw validation_error("hard_instance requires 1 <= n <= 12");
  int left = n;
  int right = 1 << n;
  int total = left + right;
  double cross = std::ldexp(1.0, n + 1);  // 2^(n+1)
  std::vector<double> m(static_cast<std::size_t>(total) * total, 0.0);
  auto at = [&](int a, int b) -> double& {
    return m[static_cast<std::size_t>(a) * total + b];
  };
  for (int i = 0; i < left; ++i)
    for (int j = 0; j < left; ++j) at(i, j) = std::abs(i - j);
  for (int a = 0; a < right; ++a)
    for (int b = 0; b < right; ++b) at(left + a, left + b) = std::abs(a - b);
  for (int i = 1; i <= left; ++i)
    for (int j = 0; j < right; ++j) {
      double d = cross + (((j >> (i - 1)) & 1) ? 1.0 : 0.0);
      at(i - 1, left + j) = d;
      at(left + j, i - 1) = d;
    }
  return MetricSpace::from_distance_matrix(std::move(m), total,
                                           /*rescale=*/true, /*validate=*/true);
}

namespace {

// Greedy cover of `members` by half-radius balls, scanning in id order.
int greedy_half_radius_cover(const MetricSpace& M,
                             const std::vector<int>& members, double half_r) {
  std::vector<char> covered(members.size(), 0);
  int balls = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (covered[i]) continue;
    ++balls;
    for (std::size_t j = i; j < members.size(); ++j)
      if (!covered[j] &&
          M.distance(members[i], members[j]) <= half_r + kDistanceTol)
        covered[j] = 1;
  }
  return balls;
}

}  // namespace

double estimate_doubling_dim(const MetricSpace& M) {
  int n = M.n();
  if (n <= 2) return 0.0;
  double diam = M.diameter();
  int levels = std::max(0, static_cast<int>(std::floor(std::log2(diam))) + 1);

  std::vector<int> centers;
  if (n <= 512) {
    centers.resize(n);
    for (int i = 0; i < n; ++i) centers[i] = i;
  } else {
    for (int t = 0; t < 64; ++t)
      centers.push_back(static_cast<int>(static_cast<std::int64_t>(t) * n / 64));
  }

  double best = 0.0;
  std::vector<int> members;
  for (int c : centers) {
    for (int lvl = 0; lvl <= levels; ++lvl) {
      double r = std::ldexp(1.0, lvl);
      members.clear();
      for (int j = 0; j < n; ++j)
        if (M.distance(c, j) <= r + kDistanceTol) members.push_back(j);
      if (members.size() < 3) continue;
      int cover = greedy_half_radius_cover(M, members, r / 2.0);
      if (cover >= 3) best = std::max(best, std::log2(cover));
    }
  }
  return best;
}

}  // namespace dmcore
