"""Graph reduction for cheaper QAOA parameter search on MaxCut."""

__version__ = "0.1.0"

from .graphs import (Graph, GraphError, GraphFormatError, MoveExhaustedError, NodeSubset,
                     average_node_degree, degree_summary, enumerate_connected_subsets,
                     generate_connected_erdos_renyi, generate_cycle, generate_erdos_renyi,
                     induced_subgraph, is_connected, load_edge_list, neighbor_subset,
                     read_edge_list, write_edge_list)
from .landscape import EnergyLandscape, LandscapeSpec, load_landscape, sample_landscape
from .metrics import (ComparisonReport, DegenerateLandscapeError, LandscapeMismatchError,
                      approximation_ratio, compare_landscapes, mse, normalize_energies,
                      optimal_point_distance, torus_distance)
from .noise import NoiseModel, NoisyEvaluator, noisy_expectation_dm, noisy_expectation_global
from .pipeline import (OptimizationTrace, OptimizerConfig, PipelineResult, bench_reduction_stats,
                       optimize_params, run_baseline, run_red_qaoa, transfer_params)
from .reduction import (ReductionResult, SAConfig, adaptive_cooling_factor, find_reduced_graph,
                        sa_reduce)
from .simulator import (ParamVector, SimulationGuardError, cut_spectrum, edge_expectations,
                        local_edge_expectation, max_cut_bruteforce, qaoa_expectation,
                        qaoa_gradient, qaoa_sample_counts, qaoa_state)
