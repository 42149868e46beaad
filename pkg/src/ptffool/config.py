"""Central namespace for tolerances, budgets, and tunable defaults.

Numeric literals that govern pass/fail decisions live here and nowhere
else.  Each constant documents what it protects.  The few constants that
come from proofs rather than engineering judgment say so; everything else
is a defensible default that callers may override through function
arguments or :class:`RunConfig`.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, asdict


# --------------------------------------------------------------------------
# hard caps and exact-arithmetic budgets

#: Largest sample-space support that may be materialized point by point.
SUPPORT_BUDGET = 2 ** 24

#: Largest n for which worst-case LPs over the full cube are attempted.
LP_MAX_N = 14

#: Largest n for exhaustive enumeration of the hypercube in moment and
#: tail computations.
ENUM_MAX_N = 20

#: Largest moment order accepted by the exact enumeration paths.
MOMENT_MAX_K = 16

#: Largest matrix side accepted by the Jacobi eigensolver.
EIGEN_MAX_N = 2048

#: Largest support size for which the exact rational repair of an LP
#: witness is attempted (the fraction-free solve is cubic in this).
WITNESS_REPAIR_MAX_SUPPORT = 512


# --------------------------------------------------------------------------
# eigensolver and spectral decomposition

#: Off-diagonal Frobenius mass, relative to the input Frobenius norm, at
#: which the cyclic Jacobi iteration declares convergence.
EIGEN_OFFDIAG_REL = 1e-12

#: Sweep budget for Jacobi before raising ConvergenceError.
EIGEN_MAX_SWEEPS = 40

#: Absolute reconstruction and orthogonality tolerance for an accepted
#: eigendecomposition of a unit-scale matrix.
EIGEN_CHECK_TOL = 1e-10

#: Eigenvalues within this absolute distance of the split threshold are
#: routed to the small-eigenvalue bucket so the split is stable.
SPECTRAL_TIE_TOL = 1e-12

#: Square-root arguments in the mixed evaluation map are clamped to zero
#: above this floor; anything more negative is treated as corruption.
SQRT_CLAMP_FLOOR = -1e-6

#: Reconstruction tolerance for the three-way quadratic split.
SPECTRAL_RECONSTRUCT_TOL = 1e-10


# --------------------------------------------------------------------------
# LP harness and certificates

#: Feasibility/optimality tolerance requested from the floating LP solve.
LP_FEAS_TOL = 1e-9

#: Denominator cap when rounding dual certificates to exact rationals.
CERT_DENOMINATOR = 2 ** 32

#: A repaired certificate must reproduce the floating LP gap this closely.
CERT_GAP_TOL = 1e-6

#: Entries of an LP solution below this threshold are treated as zero when
#: reconstructing the witness support.
WITNESS_SUPPORT_TOL = 1e-9


# --------------------------------------------------------------------------
# mollifier numerics

#: Relative tolerance target for quadrature-based integral checks.
QUAD_TOL = 1e-3

#: The truncation radius is grown until the analytic tail envelope
#: contributes less than this fraction of the active tolerance.
TAIL_FRACTION = 0.1

#: Switch to the Taylor series for the closed-form transform profile when
#: the radius falls below this value.
BHAT_SERIES_CUTOFF = 1e-2

#: Number of Taylor terms used below the cutoff.
BHAT_SERIES_TERMS = 6


# --------------------------------------------------------------------------
# sample spaces

#: Default number of quantile levels for the inverse-CDF Gaussian space.
GAUSSIAN_LEVELS_DEFAULT = 2 ** 20

#: Default averaging depth N for the bit-averaging Gaussian space.
BINOMIAL_N_DEFAULT = 10 ** 4

#: Acceptable deviation of an inverse-CDF marginal's variance from 1.
GAUSSIAN_VARIANCE_TOL = 1e-2


# --------------------------------------------------------------------------
# regularity trees

#: Independence margin added on top of the ceil(2*log2(1/tau)) floor when
#: the builder constructs its own leaf test spaces.
TREE_TEST_SPACE_MARGIN = 2

#: Hard cap on tree depth regardless of tau.
TREE_DEPTH_CAP = 18


# --------------------------------------------------------------------------
# rounding experiments

#: Numerator of the default independence order k = ceil(GW_K_NUM / eps^2).
GW_K_NUM = 4

#: How far an embedding row's Euclidean norm may sit from 1.
EMBED_UNIT_TOL = 1e-8


# --------------------------------------------------------------------------
# constants carried by proofs (do not tune)

#: Hard moment-ratio ceiling for centered quadratic forms: the proof fixes
#: a base constant of 64 which one power-mean step doubles.
EIGENBOUND_CONST = 128.0

#: Uncalibrated default for the independence-vs-accuracy trade-off
#: constant in the fooling heuristics; exposed, never asserted against.
KWISE_FOOLS_B = 4.0


def worker_count() -> int:
    """Worker cap for the embarrassingly parallel sweeps.

    Reads ``PTF_FOOL_THREADS``; defaults to 1 (fully sequential).  All
    parallel reductions in this package merge in task-index order, so the
    value changes wall time only, never results.
    """
    raw = os.environ.get("PTF_FOOL_THREADS", "1")
    try:
        v = int(raw)
    except ValueError:
        return 1
    return max(1, v)


@dataclass
class RunConfig:
    """Reproducibility envelope for a command-line run.

    Everything that can change a report's numbers is either a field here
    or a deterministic function of one.  Serializing the config alongside
    its results lets a later run replay the exact computation.
    """

    master_seed: int = 0
    support_budget: int = SUPPORT_BUDGET
    lp_max_n: int = LP_MAX_N
    cert_gap_tol: float = CERT_GAP_TOL
    quad_tol: float = QUAD_TOL
    gaussian_levels: int = GAUSSIAN_LEVELS_DEFAULT
    binomial_depth: int = BINOMIAL_N_DEFAULT
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        kwargs = {k: v for k, v in d.items() if k in known}
        return cls(**kwargs)
