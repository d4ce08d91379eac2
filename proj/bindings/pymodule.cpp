#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dmcore/centroid.hpp"
#include "dmcore/coreset.hpp"
#include "dmcore/errors.hpp"
#include "dmcore/ranges.hpp"
#include "dmcore/robust.hpp"
#include "dmcore/sensitivity.hpp"
#include "dmcore/smooth.hpp"

namespace py = pybind11;
using namespace dmcore;

namespace {

FunctionFamily make_family(const MetricSpace& M, const SmoothedMetric* S,
                           std::vector<int> H, std::vector<double> w,
                           double z) {
  if (S) return FunctionFamily::over_smoothed(*S, std::move(H), std::move(w));
  return FunctionFamily::plain(M, std::move(H), std::move(w), z);
}

}  // namespace

PYBIND11_MODULE(_dmcore, m) {
  m.doc() = "coresets, robust coresets and centroid sets for (k,z)-clustering";

  py::register_exception<validation_error>(m, "ValidationError",
                                           PyExc_ValueError);
  py::register_exception<guard_error>(m, "GuardError", PyExc_RuntimeError);

  py::class_<MetricSpace>(m, "Metric")
      .def_static("from_coordinates", &MetricSpace::from_coordinates,
                  py::arg("rows"), py::arg("rescale") = true)
      .def_static(
          "from_matrix",
          [](std::vector<std::vector<double>> rows, bool rescale) {
            int n = static_cast<int>(rows.size());
            std::vector<double> flat;
            for (auto& r : rows) {
              if (static_cast<int>(r.size()) != n)
                throw validation_error("matrix must be square");
              flat.insert(flat.end(), r.begin(), r.end());
            }
            return MetricSpace::from_distance_matrix(std::move(flat), n,
                                                     rescale);
          },
          py::arg("rows"), py::arg("rescale") = true)
      .def_static("hard_instance", &hard_instance, py::arg("n"))
      .def_property_readonly("n", &MetricSpace::n)
      .def_property_readonly("total_weight", &MetricSpace::total_weight)
      .def_property_readonly("scale_factor", &MetricSpace::scale_factor)
      .def("multiplicity", &MetricSpace::multiplicity)
      .def("distance", &MetricSpace::distance)
      .def("diameter", &MetricSpace::diameter);

  m.def("kdist",
        [](const MetricSpace& M, std::vector<int> centers, double z) {
          return kdist(M, CenterSet(std::move(centers), M), z);
        },
        py::arg("metric"), py::arg("centers"), py::arg("z"));
  m.def("kdist_trimmed",
        [](const MetricSpace& M, std::vector<int> centers, double z,
           double gamma) {
          return kdist_trimmed(M, CenterSet(std::move(centers), M),
                               {z, gamma});
        },
        py::arg("metric"), py::arg("centers"), py::arg("z"), py::arg("gamma"));
  m.def("estimate_doubling_dim", &estimate_doubling_dim, py::arg("metric"));

  py::class_<NetHierarchy>(m, "Hierarchy")
      .def_property_readonly("top_level",
                             [](const NetHierarchy& H) { return H.L; })
      .def("level",
           [](const NetHierarchy& H, int i) { return H.levels.at(i); });
  m.def("build_hierarchy",
        [](const MetricSpace& M) { return build_hierarchy(M); },
        py::keep_alive<0, 1>(), py::arg("metric"));

  py::class_<NetTree>(m, "Tree")
      .def_property_readonly("top_level", &NetTree::top_level)
      .def_property_readonly("c_cover", &NetTree::c_cover)
      .def("parent_at", &NetTree::parent_at, py::arg("x"), py::arg("level"))
      .def("descendants", &NetTree::descendants, py::arg("v"),
           py::arg("level"))
      .def("max_fanout", &NetTree::max_fanout)
      .def("to_json", &NetTree::to_json);
  m.def("build_simple_tree", &build_simple_tree, py::keep_alive<0, 1>(),
        py::keep_alive<0, 2>(), py::arg("metric"), py::arg("hierarchy"));
  m.def("build_decomposition_tree", &build_decomposition_tree,
        py::keep_alive<0, 1>(), py::keep_alive<0, 2>(), py::arg("metric"),
        py::arg("hierarchy"), py::arg("seed"), py::arg("chi"));

  py::class_<SmoothedMetric>(m, "Smoothed")
      .def(py::init<const NetTree&, double, double>(), py::keep_alive<1, 2>(),
           py::arg("tree"), py::arg("eps"), py::arg("z") = 1.0)
      .def_property_readonly("eps", &SmoothedMetric::eps)
      .def_property_readonly("lam", &SmoothedMetric::lambda)
      .def("smoothing_level", &SmoothedMetric::smoothing_level)
      .def("delta", &SmoothedMetric::delta)
      .def("delta_z", &SmoothedMetric::delta_z)
      .def("ball", &SmoothedMetric::ball, py::arg("x"), py::arg("r"));

  m.def("enumerate_ranges",
        [](const MetricSpace& M, const SmoothedMetric* S, std::vector<int> H,
           std::vector<double> w, double z, int k) {
          auto F = make_family(M, S, std::move(H), std::move(w), z);
          RangeReport rep = k <= 1 ? enumerate_ranges_singleton(F)
                                   : enumerate_ranges_ksubset(F, k);
          return py::dict(py::arg("count") = rep.distinct_count,
                          py::arg("dim_estimate") = rep.dim_estimate);
        },
        py::arg("metric"), py::arg("smoothed") = nullptr,
        py::arg("index_set") = std::vector<int>{},
        py::arg("weights") = std::vector<double>{}, py::arg("z") = 1.0,
        py::arg("k") = 1);
  m.def("alpha_deviation",
        [](const MetricSpace& M, const SmoothedMetric* S, std::vector<int> H,
           std::vector<double> w, double z, std::vector<int> sample, int k) {
          auto F = make_family(M, S, std::move(H), std::move(w), z);
          return alpha_deviation(F, sample, k);
        },
        py::arg("metric"), py::arg("smoothed") = nullptr, py::arg("index_set"),
        py::arg("weights"), py::arg("z"), py::arg("sample"), py::arg("k") = 1);
  m.def("decompose_ball",
        [](const SmoothedMetric& S, int x, double r) {
          auto d = decompose_ball_subtrees(S, x, r);
          return py::dict(py::arg("level") = d.level,
                          py::arg("roots") = d.roots);
        },
        py::arg("smoothed"), py::arg("x"), py::arg("r"));

  m.def("dz_seed",
        [](const MetricSpace& M, int k, double z, int restarts,
           std::uint64_t seed) {
          BicriteriaSolution B = dz_seed(M, k, z, restarts, seed);
          return py::dict(py::arg("centers") = B.centers,
                          py::arg("cost") = B.cost,
                          py::arg("assignment") = B.assignment,
                          py::arg("cluster_sizes") = B.cluster_sizes);
        },
        py::arg("metric"), py::arg("k"), py::arg("z"), py::arg("restarts") = 5,
        py::arg("seed") = 0);
  m.def("sensitivity_bounds",
        [](const MetricSpace& M, int k, double z, int restarts,
           std::uint64_t seed, double c_assumed) {
          BicriteriaSolution B = dz_seed(M, k, z, restarts, seed);
          if (c_assumed <= 0) c_assumed = default_c_assumed(z);
          SensitivityProfile P = sensitivity_bounds(M, B, z, c_assumed);
          return py::dict(py::arg("pi") = P.pi, py::arg("theta") = P.theta,
                          py::arg("total_pi") = P.total_pi,
                          py::arg("total_theta") = P.total_theta);
        },
        py::arg("metric"), py::arg("k"), py::arg("z"), py::arg("restarts") = 5,
        py::arg("seed") = 0, py::arg("c_assumed") = -1.0);
  m.def("brute_sensitivity", &brute_sensitivity, py::arg("metric"),
        py::arg("k"), py::arg("z"));

  m.def("build_coreset",
        [](const MetricSpace& M, int k, double z, double eps, double tau,
           std::uint64_t seed, std::int64_t size, double A, int restarts) {
          CoresetParams p;
          p.k = k;
          p.z = z;
          p.eps = eps;
          p.tau = tau;
          p.seed = seed;
          p.A = A;
          p.restarts = restarts;
          if (size > 0) p.size_override = size;
          WeightedCoreset W = build_coreset(M, p);
          std::vector<std::pair<int, double>> entries;
          for (const auto& e : W.entries) entries.emplace_back(e.id, e.weight);
          return py::dict(py::arg("entries") = entries,
                          py::arg("gamma") = W.gamma,
                          py::arg("total_theta") = W.profile.total_theta);
        },
        py::arg("metric"), py::arg("k"), py::arg("z"), py::arg("eps") = 0.005,
        py::arg("tau") = 0.005, py::arg("seed") = 0, py::arg("size") = -1,
        py::arg("A") = 1.0, py::arg("restarts") = 5);
  m.def("evaluate_coreset",
        [](const MetricSpace& M, std::vector<std::pair<int, double>> entries,
           std::vector<std::vector<int>> centers, double z, double eps) {
          std::vector<WeightedCoreset::Entry> es;
          int t = 0;
          for (auto& [id, w] : entries) es.push_back({id, w, t++});
          EvalReport rep = evaluate_coreset(M, es, centers, z, eps);
          return py::dict(py::arg("max_error") = rep.max_error,
                          py::arg("mean_error") = rep.mean_error,
                          py::arg("frac_exceeding") = rep.frac_exceeding);
        },
        py::arg("metric"), py::arg("entries"), py::arg("centers"),
        py::arg("z"), py::arg("eps"));

  m.def("uniform_sample",
        [](const MetricSpace& M, std::int64_t size, std::uint64_t seed) {
          return uniform_sample(M, size, seed).ids;
        },
        py::arg("metric"), py::arg("size"), py::arg("seed") = 0);
  m.def("robust_check",
        [](const MetricSpace& M, std::vector<int> sample, double alpha,
           double eps, double z, int k, std::vector<double> gammas) {
          if (gammas.empty()) gammas = default_gamma_grid(alpha);
          auto centers = enumerate_center_sets(M, k);
          auto res =
              robust_check(M, sample, alpha, eps, z, k, gammas, centers);
          return py::dict(py::arg("ok") = res.pass,
                          py::arg("worst_margin") = res.worst_margin,
                          py::arg("worst_gamma") = res.worst_gamma);
        },
        py::arg("metric"), py::arg("sample"), py::arg("alpha"), py::arg("eps"),
        py::arg("z"), py::arg("k"),
        py::arg("gammas") = std::vector<double>{});
  m.def("bicriteria_outliers",
        [](const MetricSpace& M, std::vector<int> subset, int k, double z,
           double gamma, bool exhaustive, std::uint64_t seed) {
          return bicriteria_outliers(
              M, subset, k, z, gamma,
              exhaustive ? OutlierMode::kExhaustive : OutlierMode::kHeuristic,
              seed);
        },
        py::arg("metric"), py::arg("subset") = std::vector<int>{},
        py::arg("k") = 1, py::arg("z") = 1.0, py::arg("gamma") = 0.1,
        py::arg("exhaustive") = true, py::arg("seed") = 0);
  m.def("property_test",
        [](const MetricSpace& M, int k, double z, double Delta, double gamma,
           double alpha, double eps, double tau, double lam,
           std::uint64_t seed, std::int64_t size) {
          PropertyTestParams p;
          p.k = k;
          p.z = z;
          p.Delta = Delta;
          p.gamma = gamma;
          p.alpha = alpha;
          p.eps = eps;
          p.tau = tau;
          p.lambda = lam;
          p.seed = seed;
          if (size > 0) p.size_override = size;
          TestVerdict v = property_test(M, p);
          return py::dict(py::arg("accept") = v.accept,
                          py::arg("Lambda") = v.Lambda,
                          py::arg("threshold") = v.threshold,
                          py::arg("sample_size") = v.sample_size);
        },
        py::arg("metric"), py::arg("k"), py::arg("z"), py::arg("Delta"),
        py::arg("gamma"), py::arg("alpha"), py::arg("eps"), py::arg("tau"),
        py::arg("lam") = 1.0, py::arg("seed") = 0, py::arg("size") = -1);

  m.def("invariant_intervals",
        [](std::vector<int> S, const NetTree& T) {
          return invariant_intervals(S, T).intervals;
        },
        py::arg("S"), py::arg("tree"));
  m.def("build_centroid_set",
        [](const MetricSpace& M, const NetTree& T, std::vector<int> S,
           std::vector<double> w, double eps, int k, double z) {
          CentroidSet H = build_centroid_set(M, T, S, w, eps, k, z);
          return py::dict(py::arg("ids") = H.ids,
                          py::arg("size_cap") = H.size_cap);
        },
        py::arg("metric"), py::arg("tree"), py::arg("S"), py::arg("weights"),
        py::arg("eps"), py::arg("k"), py::arg("z"));
  m.def("local_search",
        [](const MetricSpace& M, std::vector<int> H, std::vector<int> S,
           std::vector<double> w, int k, double z, int rho,
           double improve_factor, std::uint64_t seed) {
          auto [centers, trace] =
              local_search(M, H, S, w, k, z, rho, improve_factor, seed);
          std::vector<std::pair<int, double>> steps;
          for (const auto& s : trace.steps)
            steps.emplace_back(s.iteration, s.cost);
          return py::dict(py::arg("centers") = centers,
                          py::arg("initial_cost") = trace.initial_cost,
                          py::arg("final_cost") = trace.final_cost,
                          py::arg("steps") = steps);
        },
        py::arg("metric"), py::arg("candidates"), py::arg("support"),
        py::arg("weights"), py::arg("k"), py::arg("z"), py::arg("rho") = 1,
        py::arg("improve_factor") = 1.0, py::arg("seed") = 0);
}
