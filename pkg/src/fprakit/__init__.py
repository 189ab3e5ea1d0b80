"""Cost-aware unsplittable rounding from face-preserving rounding algorithms.

Exact rational arithmetic throughout; every run yields a certificate that
:mod:`fprakit.verify` re-checks without touching a solver.
"""
from .errors import *  # noqa: F401,F403
from .fpra import (
    BruteForceRingFpra,
    BruteForceSsufFpra,
    GreedyPathStripFpra,
    brute_force_ring_fpra,
    brute_force_ssuf_fpra,
    flow_decomposition,
    greedy_path_strip_fpra,
)
from .generate import random_crossing_ring, random_ring, random_ssuf
from .meta import RoundingCertificate, compute_epsilon, round_with_cost, verify_proof_points
from .model import (
    Arc,
    BoxErrorBody,
    Commodity,
    RingEdge,
    RingInstance,
    Terminal,
    UnsplittablePathFlow,
    WeightedSsufNetwork,
    check_membership_Q,
    eliminate_cycle_flow,
    induced_load,
    minkowski_diff_body,
    ring_fractional_load,
    ring_induced_load,
)
from .ring import (
    RingCertificate,
    UniformReductionRingFpra,
    canonicalize_crossing,
    nonuniform_to_uniform,
    preprocess,
    ring_round_with_cost,
    strip_artificials,
)
from .verify import VerificationReport, verify_report, verify_ring_run, verify_ssuf_run

__version__ = "0.1.0"
