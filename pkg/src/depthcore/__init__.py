"""Data depth for point clouds via neighborhood-graph centrality.

Discrete side: degree, iterated H-index, and coreness on the r-neighborhood
graph of a sample, turned into depth functions by one-point insertion.
Continuum side: the ball-average, H, and limiting-coreness transforms of a
density on a grid, which the discrete measures approach as n grows.
"""

from .errors import BoundViolationError, InputError, ResourceError
from .density import (DensityModel, GaussianComponent, RingComponent,
                      evaluate, make_model, modulus_bound,
                      parse_density_config, preset, preset_config,
                      sample, serialize_density_config, PRESET_NAMES)
from .geometry import (GridIndex, NeighborhoodGraph, PointCloud,
                       build_graph, build_index, connected_components,
                       graph_diameter, load_cloud_csv, neighbors_of_point,
                       normalization, save_cloud_csv, save_edges_csv,
                       unit_ball_volume, ball_intersection_volume_mc,
                       DEFAULT_EDGE_CAP)
from .centrality import (KmaxBounds, VertexScores, coreness_bruteforce,
                         coreness_bucket, coreness_by_iteration,
                         degree_scores, depth_profile, h_transform_graph,
                         iterated_h, kmax_bounds, parse_measure, point_depth,
                         save_scores_csv)
from .continuum import (GridSpec, ScalarField, ball_average,
                        c0_variational_1d, continuum_coreness_extrapolate,
                        continuum_r_coreness, discretize_density,
                        field_h_transform, iterate_h, save_field_csv)
from .harness import (ExperimentConfig, ExperimentRecord, KMAX_HEADER,
                      default_config, estimate_deviation,
                      estimated_cost_seconds, load_experiment_config,
                      load_experiment_config_file, run_convergence,
                      run_kmax_sweep, run_rate_sweep, run_selftest,
                      cli_dispatch)

__version__ = "0.1.0"

__all__ = [
    "BoundViolationError", "InputError", "ResourceError",
    "DensityModel", "GaussianComponent", "RingComponent", "evaluate",
    "make_model", "modulus_bound", "parse_density_config", "preset",
    "preset_config", "sample", "serialize_density_config", "PRESET_NAMES",
    "GridIndex", "NeighborhoodGraph", "PointCloud", "build_graph",
    "build_index", "connected_components", "graph_diameter",
    "load_cloud_csv", "neighbors_of_point", "normalization",
    "save_cloud_csv", "save_edges_csv", "unit_ball_volume",
    "ball_intersection_volume_mc", "DEFAULT_EDGE_CAP",
    "KmaxBounds", "VertexScores", "coreness_bruteforce", "coreness_bucket",
    "coreness_by_iteration", "degree_scores", "depth_profile",
    "h_transform_graph", "iterated_h", "kmax_bounds", "parse_measure",
    "point_depth", "save_scores_csv",
    "GridSpec", "ScalarField", "ball_average", "c0_variational_1d",
    "continuum_coreness_extrapolate", "continuum_r_coreness",
    "discretize_density", "field_h_transform", "iterate_h",
    "save_field_csv",
    "ExperimentConfig", "ExperimentRecord", "KMAX_HEADER", "default_config",
    "estimate_deviation", "estimated_cost_seconds", "load_experiment_config",
    "load_experiment_config_file", "run_convergence", "run_kmax_sweep",
    "run_rate_sweep", "run_selftest", "cli_dispatch",
    "__version__",
]
