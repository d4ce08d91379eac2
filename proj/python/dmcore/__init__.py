"""Coresets, robust coresets and centroid sets for (k,z)-clustering."""

try:
    from ._dmcore import *  # noqa: F401,F403  (installed layout)
except ImportError:  # in-tree use: _dmcore.so on sys.path from the build dir
    from _dmcore import *  # noqa: F401,F403

__all__ = [
    "Metric",
    "Hierarchy",
    "Tree",
    "Smoothed",
    "kdist",
    "kdist_trimmed",
    "estimate_doubling_dim",
    "build_hierarchy",
    "build_simple_tree",
    "build_decomposition_tree",
    "enumerate_ranges",
    "alpha_deviation",
    "decompose_ball",
    "dz_seed",
    "sensitivity_bounds",
    "brute_sensitivity",
    "build_coreset",
    "evaluate_coreset",
    "uniform_sample",
    "robust_check",
    "bicriteria_outliers",
    "property_test",
    "invariant_intervals",
    "build_centroid_set",
    "local_search",
]
