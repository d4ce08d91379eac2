#include "dmcore/coreset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dmcore/errors.hpp"
#include "dmcore/parallel.hpp"
#include "dmcore/rng.hpp"
#include "nlohmann/json.hpp"

namespace dmcore {

std::int64_t coreset_size_formula(std::int64_t n, int k, double z, double eps,
                                  double tau, double ddim, double A) {
  auto pos = [](double v) { return std::max(0.0, v); };
  double kk = static_cast<double>(k);
  double main = A * (kk * kk * kk / (eps * eps)) *
                pos(ddim * pos(std::log(z / eps)) + std::log(kk) +
                    pos(std::log(pos(std::log(1.0 / tau)))));
  double tail = A * (kk * kk / (eps * eps)) * pos(std::log(1.0 / tau));
  auto size = static_cast<std::int64_t>(std::ceil(main + tail));
  return std::clamp<std::int64_t>(size, 1, n);
}

WeightedCoreset build_coreset(const MetricSpace& M, const CoresetParams& p) {
  if (p.eps <= 0.0 || p.eps >= 0.01 || p.tau <= 0.0 || p.tau >= 0.01)
    throw validation_error("eps and tau must lie in (0, 1/100)");
  if (p.k < 1 || p.k > M.n()) throw validation_error("need 1 <= k <= n");
  if (p.z <= 0.0) throw validation_error("z must be positive");

  Rng root(p.seed);
  WeightedCoreset W;
  W.params = p;
  BicriteriaSolution B =
      dz_seed(M, p.k, p.z, p.restarts, root.derive("bicriteria").next_u64());
  double c_assumed = p.c_assumed.value_or(default_c_assumed(p.z));
  W.profile = sensitivity_bounds(M, B, p.z, c_assumed);
  if (p.ddim_override)
    W.ddim_used = *p.ddim_override;
  else if (p.size_override)
    W.ddim_used = 0.0;  // unused: the override pins the sample count
  else
    W.ddim_used = estimate_doubling_dim(M);
  W.gamma = p.size_override.value_or(coreset_size_formula(
      M.total_weight(), p.k, p.z, p.eps, p.tau, W.ddim_used, p.A));
  if (W.gamma < 1) throw validation_error("coreset size must be >= 1");

  // categorical over multiplicity * theta
  std::vector<double> cum(M.n());
  double acc = 0.0;
  for (int x = 0; x < M.n(); ++x) {
    acc += static_cast<double>(M.multiplicity(x)) * W.profile.theta[x];
    cum[x] = acc;
  }
  Rng draws = root.derive("draws");
  W.entries.reserve(W.gamma);
  for (std::int64_t t = 0; t < W.gamma; ++t) {
    double u = draws.uniform() * acc;
    int x = static_cast<int>(
        std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    x = std::min(x, M.n() - 1);
    double w = W.profile.total_theta /
               (static_cast<double>(W.gamma) * W.profile.theta[x]);
    W.entries.push_back({x, w, static_cast<int>(t)});
  }
  return W;
}

EvalReport evaluate_coreset(const MetricSpace& M,
                            const std::vector<WeightedCoreset::Entry>& entries,
                            const std::vector<std::vector<int>>& center_sets,
                            double z, double eps) {
  if (center_sets.empty()) throw validation_error("no center sets to evaluate");
  EvalReport rep;
  rep.rows.resize(center_sets.size());
  parallel_for(center_sets.size(), [&](std::size_t i) {
    CenterSet C(center_sets[i], M);
    double truth = kdist(M, C, z);
    double approx = 0.0;
    for (const auto& e : entries)
      approx += e.weight * pow_z(M.distance_to_set(e.id, C.ids()), z);
    double rel;
    if (truth == 0.0)
      rel = approx == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    else
      rel = std::abs(approx - truth) / truth;
    rep.rows[i] = {center_sets[i], truth, approx, rel};
  });
  double sum = 0.0;
  std::size_t over = 0;
  for (const auto& r : rep.rows) {
    rep.max_error = std::max(rep.max_error, r.rel_error);
    sum += r.rel_error;
    if (r.rel_error > eps) ++over;
  }
  rep.mean_error = sum / static_cast<double>(rep.rows.size());
  rep.frac_exceeding =
      static_cast<double>(over) / static_cast<double>(rep.rows.size());
  return rep;
}

std::string coreset_to_json(const WeightedCoreset& W) {
  nlohmann::ordered_json j;
  j["meta"] = {{"k", W.params.k},       {"z", W.params.z},
               {"eps", W.params.eps},   {"tau", W.params.tau},
               {"gamma", W.gamma},      {"seed", W.params.seed},
               {"A", W.params.A},       {"ddim_used", W.ddim_used},
               {"total_theta", W.profile.total_theta}};
  auto entries = nlohmann::ordered_json::array();
  for (const auto& e : W.entries)
    entries.push_back({{"id", e.id}, {"weight", e.weight}});
  j["entries"] = entries;
  return j.dump(2) + "\n";
}

WeightedCoreset coreset_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  WeightedCoreset W;
  const auto& meta = j.at("meta");
  W.params.k = meta.at("k").get<int>();
  W.params.z = meta.at("z").get<double>();
  W.params.eps = meta.at("eps").get<double>();
  W.params.tau = meta.at("tau").get<double>();
  W.params.seed = meta.at("seed").get<std::uint64_t>();
  W.params.A = meta.value("A", 1.0);
  W.ddim_used = meta.value("ddim_used", 0.0);
  W.gamma = meta.at("gamma").get<std::int64_t>();
  int t = 0;
  for (const auto& e : j.at("entries"))
    W.entries.push_back(
        {e.at("id").get<int>(), e.at("weight").get<double>(), t++});
  return W;
}

}  // namespace dmcore
