"""Exact-rational solvers and a truthful mechanism for knapsack problems
with complex-valued demands."""

from .errors import (CkpError, CombinatorialCap, GridTooLarge,
                     InternalInconsistency, InvalidParams, MixedQuadrantBid,
                     OracleCap, ParseError)
from .limits import DEFAULT_LIMITS, Limits
from .model import (Allocation, ComplexRational, Instance, MultiMindedBid,
                    Rational, SingleMindedBid, ZERO_DEMAND, as_multi,
                    build_allocation, closure_value, cx, empty_allocation,
                    frac, load_and_check, partial_order_leq,
                    quadrant_partition, validate_instance)
from .rounding import (GridConfig, GridPoint, ProjectionGrids,
                       RoundedDemandSpace, grid_unit, projection_grids,
                       round_demand, rounded_demand_space)
from .dp_exact import (multi_two_dkp_exact, traceback_to_declared,
                       two_dkp_exact)
from .fptas import (GuessTuple, SolverResult, SolverStats, ckp_bifptas,
                    guess_admissible, multickp_fptas)
from .ptas_range import (BoxBid, BucketVector, HeavySet, PtasResult,
                         box_bid_from_complex, box_closure, bucket_dp,
                         bucket_vector, enumerate_heavy_sets, heavy_size,
                         multi_mdkp_ptas)
from .mechanism import (MechanismOutcome, RangeDescriptor, admissible_guesses,
                        build_range, mechanism_outcome, mir_allocate,
                        misreport_trial, vcg_payments)
from .oracle import (OracleResult, brute_force_ckp, brute_force_exact_fit,
                     brute_force_multi)
from .instances import (SubSumSpec, gen_random, gen_subsum_reduction,
                        instance_from_json_dict, instance_hash,
                        instance_to_json_dict, read_instance, subsum_manifest,
                        subsum_beta_slack, write_instance)

__version__ = "0.1.0"
