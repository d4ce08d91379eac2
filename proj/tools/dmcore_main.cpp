// dmcore: coresets, robust coresets and centroid sets for (k,z)-clustering
// over finite doubling metrics. One subcommand per pipeline; every artifact
// embeds the full run configuration and all randomness flows from --seed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "dmcore/centroid.hpp"
#include "dmcore/coreset.hpp"
#include "dmcore/errors.hpp"
#include "dmcore/io.hpp"
#include "dmcore/parallel.hpp"
#include "dmcore/ranges.hpp"
#include "dmcore/robust.hpp"
#include "dmcore/rng.hpp"
#include "dmcore/sensitivity.hpp"
#include "dmcore/smooth.hpp"
#include "nlohmann/json.hpp"

namespace {

using nlohmann::ordered_json;
using namespace dmcore;

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

InputFormat parse_format(const std::string& s) {
  if (s == "coords") return InputFormat::kCoordinates;
  if (s == "matrix") return InputFormat::kMatrix;
  throw validation_error("unknown input format: " + s);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

NetTree make_tree(const MetricSpace& M, const std::string& flavor,
                  std::uint64_t seed, double chi_flag) {
  NetHierarchy H = build_hierarchy(M);
  if (flavor == "simple") return build_simple_tree(M, H);
  if (flavor == "decomposition") {
    double chi = chi_flag > 0 ? chi_flag
                              : std::max(2.0, std::ldexp(1.0, static_cast<int>(
                                             std::ceil(estimate_doubling_dim(M)))));
    return build_decomposition_tree(M, H, seed, chi);
  }
  throw validation_error("unknown tree flavor: " + flavor);
}

std::vector<std::vector<int>> centers_from_file(const std::string& path) {
  std::vector<std::vector<int>> out;
  for (const auto& row : parse_csv(read_file(path))) {
    std::vector<int> ids;
    for (const auto& cell : row)
      if (!cell.empty()) ids.push_back(std::stoi(cell));
    if (!ids.empty()) out.push_back(ids);
  }
  if (out.empty()) throw validation_error("no center rows in " + path);
  return out;
}

struct CommonOpts {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string format = "coords";
};

// Echoed into every artifact. Thread count is excluded on purpose: results
// are independent of it and artifacts must be byte-identical across --threads.
ordered_json config_json(const CommonOpts& c) {
  return {{"seed", c.seed}, {"format", c.format}};
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"coresets and centroid sets for (k,z)-clustering on finite metrics"};
  app.require_subcommand(1);
  CommonOpts common;
  if (const char* env = std::getenv("DMCORE_THREADS"))
    common.threads = std::atoi(env);
  app.add_option("--seed", common.seed, "master RNG seed");
  app.add_option("--threads", common.threads,
                 "worker threads (0 = hardware, env DMCORE_THREADS)");
  app.add_option("--format", common.format, "input format: coords|matrix");

  // ---- hard-instance ----
  auto* hard = app.add_subcommand("hard-instance",
                                  "emit the two-line shattering instance");
  int hard_n = 3;
  std::string hard_out;
  hard->add_option("--n", hard_n, "instance parameter (1..12)");
  hard->add_option("output", hard_out, "matrix CSV path")->required();

  // ---- build-coreset ----
  auto* bc = app.add_subcommand("build-coreset", "importance-sampling coreset");
  CoresetParams bc_params;
  std::int64_t bc_size = -1;
  double bc_ddim = -1.0, bc_cassumed = -1.0;
  std::string bc_in, bc_out;
  bc->add_option("--k", bc_params.k, "number of centers")->required();
  bc->add_option("--z", bc_params.z, "cost exponent")->required();
  bc->add_option("--eps", bc_params.eps, "target relative error");
  bc->add_option("--tau", bc_params.tau, "failure probability");
  bc->add_option("--size", bc_size, "override the sample count");
  bc->add_option("--A", bc_params.A, "size-formula multiplier");
  bc->add_option("--ddim", bc_ddim, "doubling dimension override");
  bc->add_option("--restarts", bc_params.restarts, "seeding restarts");
  bc->add_option("--c-assumed", bc_cassumed, "assumed bicriteria ratio");
  bc->add_option("input", bc_in, "points CSV")->required();
  bc->add_option("output", bc_out, "coreset JSON")->required();

  // ---- eval-coreset ----
  auto* ec = app.add_subcommand("eval-coreset", "relative-error report");
  std::string ec_in, ec_out, ec_coreset, ec_centers_file;
  int ec_sample_centers = 0;
  ec->add_option("--coreset", ec_coreset, "coreset JSON")->required();
  ec->add_option("--centers-file", ec_centers_file, "CSV of center id rows");
  ec->add_option("--sample-centers", ec_sample_centers,
                 "draw this many random k-subsets instead");
  ec->add_option("input", ec_in, "points CSV")->required();
  ec->add_option("output", ec_out, "report CSV")->required();

  // ---- sensitivity ----
  auto* sn = app.add_subcommand("sensitivity", "per-point sampling bounds");
  int sn_k = 1, sn_restarts = 5;
  double sn_z = 1.0, sn_cassumed = -1.0;
  std::string sn_in, sn_out;
  sn->add_option("--k", sn_k)->required();
  sn->add_option("--z", sn_z)->required();
  sn->add_option("--restarts", sn_restarts);
  sn->add_option("--c-assumed", sn_cassumed);
  sn->add_option("input", sn_in)->required();
  sn->add_option("output", sn_out)->required();

  // ---- ranges-report ----
  auto* rr = app.add_subcommand("ranges-report", "distinct range counting");
  int rr_k = 1, rr_hsize = 0;
  double rr_eps = 1.0 / 16, rr_z = 1.0, rr_chi = 0.0;
  std::string rr_kernel = "plain", rr_weights = "unit", rr_tree = "simple";
  std::string rr_in, rr_out;
  rr->add_option("--k", rr_k, "ground-set subset size");
  rr->add_option("--kernel", rr_kernel, "plain|smoothed");
  rr->add_option("--eps", rr_eps, "smoothing parameter");
  rr->add_option("--z", rr_z);
  rr->add_option("--h-size", rr_hsize, "random |H| (0 = all points)");
  rr->add_option("--weights", rr_weights, "unit|gap2");
  rr->add_option("--tree", rr_tree, "simple|decomposition");
  rr->add_option("--chi", rr_chi, "decomposition parameter");
  rr->add_option("input", rr_in)->required();
  rr->add_option("output", rr_out)->required();

  // ---- probe-smooth ----
  auto* ps = app.add_subcommand("probe-smooth", "distortion histogram");
  double ps_eps = 1.0 / 16, ps_z = 1.0, ps_chi = 0.0;
  std::string ps_tree = "simple", ps_in, ps_out;
  ps->add_option("--eps", ps_eps)->required();
  ps->add_option("--z", ps_z);
  ps->add_option("--tree", ps_tree, "simple|decomposition");
  ps->add_option("--chi", ps_chi);
  ps->add_option("input", ps_in)->required();
  ps->add_option("output", ps_out)->required();

  // ---- robust-sample ----
  auto* rs = app.add_subcommand("robust-sample", "uniform i.i.d. sample");
  std::int64_t rs_size = 0;
  double rs_alpha = 0.1, rs_eps = 0.1;
  std::string rs_in, rs_out;
  rs->add_option("--size", rs_size)->required();
  rs->add_option("--alpha", rs_alpha);
  rs->add_option("--eps", rs_eps);
  rs->add_option("input", rs_in)->required();
  rs->add_option("output", rs_out)->required();

  // ---- robust-check ----
  auto* rc = app.add_subcommand("robust-check", "trimmed-cost bracket check");
  double rc_alpha = 0.1, rc_eps = 0.1, rc_z = 1.0;
  int rc_k = 1, rc_centers_count = 100;
  std::int64_t rc_sample_size = 0;
  std::string rc_gammas, rc_sample_file, rc_centers_mode = "exhaustive";
  std::string rc_in, rc_out;
  rc->add_option("--alpha", rc_alpha)->required();
  rc->add_option("--eps", rc_eps)->required();
  rc->add_option("--z", rc_z)->required();
  rc->add_option("--k", rc_k)->required();
  rc->add_option("--gammas", rc_gammas, "comma list (default: 9-point grid)");
  rc->add_option("--sample-file", rc_sample_file, "robust-sample JSON");
  rc->add_option("--sample-size", rc_sample_size, "draw a fresh sample");
  rc->add_option("--centers-mode", rc_centers_mode, "exhaustive|sample");
  rc->add_option("--centers-count", rc_centers_count);
  rc->add_option("input", rc_in)->required();
  rc->add_option("output", rc_out)->required();

  // ---- cluster-test ----
  auto* ct = app.add_subcommand("cluster-test", "clusterability tester");
  PropertyTestParams ct_params;
  std::int64_t ct_size = -1;
  std::string ct_inner = "exhaustive", ct_in, ct_out;
  ct->add_option("--k", ct_params.k)->required();
  ct->add_option("--z", ct_params.z)->required();
  ct->add_option("--delta", ct_params.Delta)->required();
  ct->add_option("--gamma", ct_params.gamma)->required();
  ct->add_option("--alpha", ct_params.alpha)->required();
  ct->add_option("--eps", ct_params.eps)->required();
  ct->add_option("--tau", ct_params.tau)->required();
  ct->add_option("--lambda", ct_params.lambda);
  ct->add_option("--A", ct_params.A);
  ct->add_option("--size", ct_size, "sample size override");
  ct->add_option("--inner", ct_inner, "exhaustive|heuristic");
  ct->add_option("input", ct_in)->required();
  ct->add_option("output", ct_out)->required();

  // ---- centroid ----
  auto* cd = app.add_subcommand("centroid", "candidate-center superset");
  double cd_eps = 0.1, cd_z = 1.0;
  int cd_k = 1;
  bool cd_use_all = false;
  std::string cd_coreset, cd_in, cd_out;
  cd->add_option("--eps", cd_eps)->required();
  cd->add_option("--k", cd_k)->required();
  cd->add_option("--z", cd_z)->required();
  cd->add_option("--coreset", cd_coreset, "coreset JSON supplying (S, w)");
  cd->add_flag("--use-all", cd_use_all, "use every point with unit weight");
  cd->add_option("input", cd_in)->required();
  cd->add_option("output", cd_out)->required();

  // ---- solve ----
  auto* sv = app.add_subcommand("solve",
                                "coreset -> centroid set -> local search");
  int sv_k = 1, sv_rho = 1;
  double sv_z = 1.0, sv_eps = 0.2, sv_improve = -1.0;
  std::int64_t sv_coreset_size = -1;
  std::string sv_in, sv_out, sv_trace;
  sv->add_option("--k", sv_k)->required();
  sv->add_option("--z", sv_z)->required();
  sv->add_option("--eps", sv_eps)->required();
  sv->add_option("--rho", sv_rho, "swap width (<= k)");
  sv->add_option("--coreset-size", sv_coreset_size);
  sv->add_option("--improve-factor", sv_improve,
                 "swap acceptance factor (default 1 - eps/(10k))");
  sv->add_option("--trace", sv_trace, "swap trace CSV path");
  sv->add_option("input", sv_in)->required();
  sv->add_option("output", sv_out)->required();

  // ---- bench ----
  auto* bn = app.add_subcommand("bench", "coreset quality sweep over a corpus");
  std::string bn_corpus, bn_sizes = "100,200", bn_eps_list = "0.1,0.2";
  int bn_seeds = 3, bn_k = 5, bn_centers = 50;
  double bn_z = 2.0;
  std::string bn_out;
  bn->add_option("--corpus", bn_corpus, "directory of coordinate CSVs")
      ->required();
  bn->add_option("--sizes", bn_sizes, "comma list of coreset sizes");
  bn->add_option("--eps-list", bn_eps_list);
  bn->add_option("--seeds", bn_seeds);
  bn->add_option("--k", bn_k);
  bn->add_option("--z", bn_z);
  bn->add_option("--centers", bn_centers, "evaluation center sets per seed");
  bn->add_option("output", bn_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // bad flags are validation errors
  }
  set_thread_count(common.threads);

  if (*hard) {
    MetricSpace M = hard_instance(hard_n);
    write_file(hard_out, metric_to_matrix_csv(M));
    return 0;
  }

  if (*bc) {
    if (bc_size > 0) bc_params.size_override = bc_size;
    if (bc_ddim >= 0) bc_params.ddim_override = bc_ddim;
    if (bc_cassumed > 0) bc_params.c_assumed = bc_cassumed;
    bc_params.seed = common.seed;
    MetricSpace M = load_metric_file(bc_in, parse_format(common.format));
    WeightedCoreset W = build_coreset(M, bc_params);
    ordered_json j = nlohmann::ordered_json::parse(coreset_to_json(W));
    j["config"] = config_json(common);
    write_file(bc_out, j.dump(2) + "\n");
    return 0;
  }

  if (*ec) {
    MetricSpace M = load_metric_file(ec_in, parse_format(common.format));
    WeightedCoreset W = coreset_from_json(read_file(ec_coreset));
    std::vector<std::vector<int>> centers;
    if (!ec_centers_file.empty())
      centers = centers_from_file(ec_centers_file);
    else if (ec_sample_centers > 0)
      centers = sample_center_sets(M, W.params.k, ec_sample_centers,
                                   Rng(common.seed).derive("eval").next_u64());
    else
      throw validation_error("need --centers-file or --sample-centers");
    EvalReport rep = evaluate_coreset(M, W.entries, centers, W.params.z,
                                      W.params.eps);
    std::ostringstream out;
    out << "center_ids,true_cost,coreset_cost,rel_error\n";
    for (const auto& r : rep.rows) {
      for (std::size_t i = 0; i < r.centers.size(); ++i)
        out << (i ? ";" : "") << r.centers[i];
      out << ',' << fmt(r.true_cost) << ',' << fmt(r.coreset_cost) << ','
          << fmt(r.rel_error) << '\n';
    }
    ordered_json footer = {{"max_error", rep.max_error},
                           {"mean_error", rep.mean_error},
                           {"frac_exceeding", rep.frac_exceeding},
                           {"config", config_json(common)}};
    out << "# " << footer.dump() << '\n';
    write_file(ec_out, out.str());
    return 0;
  }

  if (*sn) {
    MetricSpace M = load_metric_file(sn_in, parse_format(common.format));
    BicriteriaSolution B = dz_seed(M, sn_k, sn_z, sn_restarts,
                                   Rng(common.seed).derive("bicriteria").next_u64());
    double c = sn_cassumed > 0 ? sn_cassumed : default_c_assumed(sn_z);
    SensitivityProfile P = sensitivity_bounds(M, B, sn_z, c);
    std::ostringstream out;
    out << "id,pi,theta\n";
    for (int x = 0; x < M.n(); ++x)
      out << x << ',' << fmt(P.pi[x]) << ',' << fmt(P.theta[x]) << '\n';
    ordered_json footer = {{"total_pi", P.total_pi},
                           {"total_theta", P.total_theta},
                           {"c_assumed", P.c_assumed},
                           {"bicriteria_cost", B.cost},
                           {"k", sn_k},
                           {"z", sn_z},
                           {"config", config_json(common)}};
    out << "# " << footer.dump() << '\n';
    write_file(sn_out, out.str());
    return 0;
  }

  if (*rr) {
    MetricSpace M = load_metric_file(rr_in, parse_format(common.format));
    Rng rng(common.seed);
    std::vector<int> H;
    if (rr_hsize > 0 && rr_hsize < M.n()) {
      std::vector<int> ids(M.n());
      for (int i = 0; i < M.n(); ++i) ids[i] = i;
      Rng pick = rng.derive("H");
      pick.shuffle(ids);
      H.assign(ids.begin(), ids.begin() + rr_hsize);
      std::sort(H.begin(), H.end());
    } else {
      H.resize(M.n());
      for (int i = 0; i < M.n(); ++i) H[i] = i;
    }
    std::vector<double> w(H.size(), 1.0);
    if (rr_weights == "gap2") {
      Rng wr = rng.derive("weights");
      for (auto& x : w) x = std::ldexp(1.0, -static_cast<int>(wr.uniform_int(8)));
    } else if (rr_weights != "unit") {
      throw validation_error("unknown weights mode: " + rr_weights);
    }
    RangeReport rep;
    std::optional<NetTree> tree;
    std::optional<SmoothedMetric> S;
    if (rr_kernel == "smoothed") {
      tree = make_tree(M, rr_tree, rng.derive("tree").next_u64(), rr_chi);
      S.emplace(*tree, rr_eps, rr_z);
      FunctionFamily F = FunctionFamily::over_smoothed(*S, H, w);
      rep = rr_k <= 1 ? enumerate_ranges_singleton(F)
                      : enumerate_ranges_ksubset(F, rr_k);
    } else if (rr_kernel == "plain") {
      FunctionFamily F = FunctionFamily::plain(M, H, w, rr_z);
      rep = rr_k <= 1 ? enumerate_ranges_singleton(F)
                      : enumerate_ranges_ksubset(F, rr_k);
    } else {
      throw validation_error("unknown kernel: " + rr_kernel);
    }
    ordered_json j = {{"m", H.size()},
                      {"k", rr_k},
                      {"eps", rr_eps},
                      {"z", rr_z},
                      {"count", rep.distinct_count},
                      {"dim_estimate", rep.dim_estimate},
                      {"seed", common.seed},
                      {"kernel", rr_kernel},
                      {"tree", rr_tree},
                      {"weights", rr_weights},
                      {"config", config_json(common)}};
    write_file(rr_out, j.dump(2) + "\n");
    return 0;
  }

  if (*ps) {
    MetricSpace M = load_metric_file(ps_in, parse_format(common.format));
    NetTree tree = make_tree(M, ps_tree, Rng(common.seed).derive("tree").next_u64(),
                             ps_chi);
    SmoothedMetric S(tree, ps_eps, ps_z);
    constexpr int kBins = 40;
    double c = tree.c_cover();
    double lo = 1.0 - 8.0 * c * ps_eps, hi = 1.0 + 8.0 * c * ps_eps;
    std::vector<std::int64_t> bins(kBins, 0);
    for (int x = 0; x < M.n(); ++x)
      for (int y = x + 1; y < M.n(); ++y) {
        double ratio = M.distance(x, y) / S.delta(x, y);
        int b = static_cast<int>((ratio - lo) / (hi - lo) * kBins);
        bins[std::clamp(b, 0, kBins - 1)]++;
      }
    std::ostringstream out;
    out << "ratio_low,ratio_high,count\n";
    for (int b = 0; b < kBins; ++b)
      out << fmt(lo + (hi - lo) * b / kBins) << ','
          << fmt(lo + (hi - lo) * (b + 1) / kBins) << ',' << bins[b] << '\n';
    ordered_json footer = {{"eps", ps_eps},
                           {"z", ps_z},
                           {"tree", ps_tree},
                           {"config", config_json(common)}};
    out << "# " << footer.dump() << '\n';
    write_file(ps_out, out.str());
    return 0;
  }

  if (*rs) {
    MetricSpace M = load_metric_file(rs_in, parse_format(common.format));
    RobustSample S = uniform_sample(M, rs_size, common.seed, rs_alpha, rs_eps);
    ordered_json j = {{"ids", S.ids},
                      {"alpha", S.alpha},
                      {"eps", S.eps},
                      {"seed", S.seed},
                      {"config", config_json(common)}};
    write_file(rs_out, j.dump(2) + "\n");
    return 0;
  }

  if (*rc) {
    MetricSpace M = load_metric_file(rc_in, parse_format(common.format));
    std::vector<int> sample;
    if (!rc_sample_file.empty()) {
      auto j = nlohmann::json::parse(read_file(rc_sample_file));
      sample = j.at("ids").get<std::vector<int>>();
    } else if (rc_sample_size > 0) {
      sample = uniform_sample(M, rc_sample_size, common.seed).ids;
    } else {
      throw validation_error("need --sample-file or --sample-size");
    }
    std::vector<double> gammas = rc_gammas.empty()
                                     ? default_gamma_grid(rc_alpha)
                                     : parse_list(rc_gammas);
    std::vector<std::vector<int>> centers =
        rc_centers_mode == "exhaustive"
            ? enumerate_center_sets(M, rc_k)
            : sample_center_sets(M, rc_k, rc_centers_count,
                                 Rng(common.seed).derive("centers").next_u64());
    RobustCheckResult res =
        robust_check(M, sample, rc_alpha, rc_eps, rc_z, rc_k, gammas, centers);
    ordered_json j = {{"pass", res.pass},
                      {"worst_margin", res.worst_margin},
                      {"worst_gamma", res.worst_gamma},
                      {"worst_centers", res.worst_centers},
                      {"checks", res.checks},
                      {"alpha", rc_alpha},
                      {"eps", rc_eps},
                      {"z", rc_z},
                      {"k", rc_k},
                      {"config", config_json(common)}};
    write_file(rc_out, j.dump(2) + "\n");
    return 0;
  }

  if (*ct) {
    MetricSpace M = load_metric_file(ct_in, parse_format(common.format));
    ct_params.seed = common.seed;
    if (ct_size > 0) ct_params.size_override = ct_size;
    ct_params.inner = ct_inner == "heuristic" ? OutlierMode::kHeuristic
                                              : OutlierMode::kExhaustive;
    TestVerdict v = property_test(M, ct_params);
    ordered_json j = {{"accept", v.accept},
                      {"Lambda", v.Lambda},
                      {"threshold", v.threshold},
                      {"sample_size", v.sample_size},
                      {"params",
                       {{"k", v.params.k},
                        {"z", v.params.z},
                        {"Delta", v.params.Delta},
                        {"gamma", v.params.gamma},
                        {"alpha", v.params.alpha},
                        {"eps", v.params.eps},
                        {"tau", v.params.tau},
                        {"lambda", v.params.lambda},
                        {"A", v.params.A}}},
                      {"config", config_json(common)}};
    write_file(ct_out, j.dump(2) + "\n");
    return 0;
  }

  if (*cd) {
    MetricSpace M = load_metric_file(cd_in, parse_format(common.format));
    std::vector<int> S;
    std::vector<double> w;
    if (!cd_coreset.empty()) {
      WeightedCoreset W = coreset_from_json(read_file(cd_coreset));
      for (const auto& e : W.entries) {
        S.push_back(e.id);
        w.push_back(e.weight);
      }
    } else if (cd_use_all) {
      for (int i = 0; i < M.n(); ++i) {
        S.push_back(i);
        w.push_back(static_cast<double>(M.multiplicity(i)));
      }
    } else {
      throw validation_error("need --coreset or --use-all");
    }
    NetTree T = build_simple_tree(M, build_hierarchy(M));
    CentroidSet H = build_centroid_set(M, T, S, w, cd_eps, cd_k, cd_z);
    ordered_json j = {{"ids", H.ids},
                      {"size", H.ids.size()},
                      {"size_cap", H.size_cap},
                      {"eps", cd_eps},
                      {"k", cd_k},
                      {"z", cd_z},
                      {"source_size", S.size()},
                      {"config", config_json(common)}};
    write_file(cd_out, j.dump(2) + "\n");
    return 0;
  }

  if (*sv) {
    MetricSpace M = load_metric_file(sv_in, parse_format(common.format));
    if (sv_z <= 0) throw validation_error("z must be positive");
    Rng rng(common.seed);
    CoresetParams cp;
    cp.k = sv_k;
    cp.z = sv_z;
    cp.eps = std::min(0.009, sv_eps / 2.0);
    cp.tau = 0.005;
    cp.seed = rng.derive("coreset").next_u64();
    if (sv_coreset_size > 0) cp.size_override = sv_coreset_size;
    WeightedCoreset W = build_coreset(M, cp);
    // deduplicate entries into (id, weight) support
    std::map<int, double> support;
    for (const auto& e : W.entries) support[e.id] += e.weight;
    std::vector<int> S;
    std::vector<double> w;
    for (auto& [id, weight] : support) {
      S.push_back(id);
      w.push_back(weight);
    }
    NetTree T = build_simple_tree(M, build_hierarchy(M));
    double centroid_eps = std::min(sv_eps / (2.0 * sv_z), 0.99 / sv_z);
    CentroidSet H = build_centroid_set(M, T, S, w, centroid_eps, sv_k, sv_z);
    double improve = sv_improve > 0 ? sv_improve
                                    : 1.0 - sv_eps / (10.0 * sv_k);
    auto [centers, trace] =
        local_search(M, H.ids, S, w, sv_k, sv_z, sv_rho, improve,
                     rng.derive("search").next_u64());
    CenterSet C(centers, M);
    double full_cost = kdist(M, C, sv_z);
    ordered_json j = {{"centers", centers},
                      {"full_cost", full_cost},
                      {"weighted_cost", trace.final_cost},
                      {"coreset_size", W.entries.size()},
                      {"centroid_size", H.ids.size()},
                      {"iterations", trace.steps.size()},
                      {"k", sv_k},
                      {"z", sv_z},
                      {"eps", sv_eps},
                      {"rho", sv_rho},
                      {"config", config_json(common)}};
    write_file(sv_out, j.dump(2) + "\n");
    if (!sv_trace.empty()) {
      std::ostringstream out;
      out << "iteration,cost,swap_out,swap_in\n";
      for (const auto& s : trace.steps) {
        out << s.iteration << ',' << fmt(s.cost) << ',';
        for (std::size_t i = 0; i < s.swapped_out.size(); ++i)
          out << (i ? ";" : "") << s.swapped_out[i];
        out << ',';
        for (std::size_t i = 0; i < s.swapped_in.size(); ++i)
          out << (i ? ";" : "") << s.swapped_in[i];
        out << '\n';
      }
      write_file(sv_trace, out.str());
    }
    return 0;
  }

  if (*bn) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    if (!fs::is_directory(bn_corpus))
      throw validation_error("corpus directory does not exist: " + bn_corpus);
    for (const auto& entry : fs::directory_iterator(bn_corpus))
      if (entry.is_regular_file()) files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw validation_error("corpus directory is empty");
    std::vector<double> sizes = parse_list(bn_sizes);
    std::vector<double> eps_list = parse_list(bn_eps_list);

    std::ostringstream out;
    out << "size,eps,mean_err,p95_err,runtime_ms,uniform_mean_err,"
           "uniform_p95_err\n";
    for (double size_d : sizes) {
      auto size = static_cast<std::int64_t>(size_d);
      for (double eps : eps_list) {
        std::vector<double> errs, uerrs;
        double runtime_ms = 0.0;
        for (const auto& file : files) {
          MetricSpace M = load_metric_file(file, parse_format(common.format));
          std::string stem = fs::path(file).filename().string();
          for (int s = 0; s < bn_seeds; ++s) {
            Rng rng = Rng(common.seed).derive(stem, s);
            CoresetParams cp;
            cp.k = bn_k;
            cp.z = bn_z;
            cp.eps = 0.005;
            cp.tau = 0.005;
            cp.seed = rng.derive("coreset").next_u64();
            cp.size_override = std::min<std::int64_t>(size, M.total_weight());
            auto t0 = std::chrono::steady_clock::now();
            WeightedCoreset W = build_coreset(M, cp);
            runtime_ms += std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
            auto centers = sample_center_sets(
                M, bn_k, bn_centers, rng.derive("centers").next_u64());
            EvalReport rep =
                evaluate_coreset(M, W.entries, centers, bn_z, eps);
            for (const auto& r : rep.rows) errs.push_back(r.rel_error);
            // uniform baseline at equal size through the same evaluator
            RobustSample U = uniform_sample(M, *cp.size_override,
                                            rng.derive("uniform").next_u64());
            std::vector<WeightedCoreset::Entry> uentries;
            double uw = static_cast<double>(M.total_weight()) /
                        static_cast<double>(U.ids.size());
            for (std::size_t i = 0; i < U.ids.size(); ++i)
              uentries.push_back({U.ids[i], uw, static_cast<int>(i)});
            EvalReport urep = evaluate_coreset(M, uentries, centers, bn_z, eps);
            for (const auto& r : urep.rows) uerrs.push_back(r.rel_error);
          }
        }
        auto pct = [](std::vector<double> v, double q) {
          std::sort(v.begin(), v.end());
          if (v.empty()) return 0.0;
          auto idx = static_cast<std::size_t>(q * (v.size() - 1));
          return v[idx];
        };
        double mean = 0.0, umean = 0.0;
        for (double e : errs) mean += e;
        for (double e : uerrs) umean += e;
        mean /= errs.empty() ? 1 : errs.size();
        umean /= uerrs.empty() ? 1 : uerrs.size();
        out << size << ',' << fmt(eps) << ',' << fmt(mean) << ','
            << fmt(pct(errs, 0.95)) << ',' << fmt(runtime_ms) << ','
            << fmt(umean) << ',' << fmt(pct(uerrs, 0.95)) << '\n';
      }
    }
    write_file(bn_out, out.str());
    return 0;
  }

  return 0;
}

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const dmcore::validation_error& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const dmcore::guard_error& e) {
    std::cerr << "guard exceeded: " << e.what() << '\n';
    return 3;
  } catch (const dmcore::internal_error& e) {
    std::cerr << "internal check failed: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
