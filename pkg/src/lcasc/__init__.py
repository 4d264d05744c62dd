"""Local computation algorithms for approximate set cover.

Probes answer "is this set in the cover?" (or "which set covers this
element?") by reading a small, query-counted portion of the instance
through an adjacency oracle, consistently across independent probes that
share a seed.
"""

from .access import AlgoParams, ProbeContext
from .estimator import EstimateReport, estimate_opt
from .instance import (BlockPlanted, FractionalCover, IntegralCover,
                       SetCoverInstance, Star, UniformRandom, generate_instance,
                       load_instance, save_instance, validate_cover)
from .integral import (covered_estimate, integral_probe_element,
                       integral_probe_set, warmup_integral_probe)
from .main_lca import BoostFrame, DegreeOutcome, degree_estimate, main_probe_weight, weight_estimate
from .randomness import Label, RandomTape, RoundingTape, Tag, sample_multiset
from .reference import (DegreeEstimator, ExactDegreeEstimator, RunTrace,
                        SampledDegreeEstimator, SlackPolicy, exact_cover,
                        greedy_cover, run_alg1, run_alg2, run_alg6,
                        run_integral_rounding)
from .warmup_lca import DensityVerdict, get_weight, is_ele_cov, is_set_dense, lca_weight

__version__ = "0.1.0"
