"""Degree distributions for LT fountain codes.

Implements the Ideal Soliton and Robust Soliton distributions, the fixed
ten-term degree table used by Raptor-style codes, inverse-CDF degree
sampling, and Luby's analytic bound on the number of encoded symbols needed
for complete decoding with probability at least 1 - delta.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

__all__ = [
    "DegreeDistribution",
    "RobustSolitonParams",
    "ideal_soliton",
    "robust_soliton",
    "shokrollahi_table",
    "sample_degree",
    "mean_degree",
    "analytic_symbol_bound",
]

# The table coefficients are stored unrenormalized and sum to 0.999998;
# every constructed pmf must be at least this close to 1.
PMF_SUM_TOLERANCE = 2e-6


@dataclass(frozen=True)
class DegreeDistribution:
    """Probability mass function over encoding degrees, plus its sampling CDF.

    Degrees are strictly increasing and confined to [1, k].  The final CDF
    entry is treated as exactly 1 when sampling, which absorbs the 2e-6
    deficit of the unrenormalized table coefficients.
    """

    k: int
    degrees: tuple[int, ...]
    probabilities: tuple[float, ...]
    cdf: tuple[float, ...]

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if not self.degrees or len(self.degrees) != len(self.probabilities):
            raise ValueError("degrees and probabilities must align and be non-empty")
        prev = 0
        for d in self.degrees:
            if d < 1 or d > self.k:
                raise ValueError(f"degree {d} outside [1, {self.k}]")
            if d <= prev:
                raise ValueError("degrees must be strictly increasing")
            prev = d
        if any(p < 0.0 for p in self.probabilities):
            raise ValueError("probabilities must be non-negative")
        total = math.fsum(self.probabilities)
        if abs(total - 1.0) > PMF_SUM_TOLERANCE:
            raise ValueError(f"pmf sums to {total!r}, not within {PMF_SUM_TOLERANCE} of 1")
        if len(self.cdf) != len(self.degrees):
            raise ValueError("cdf length mismatch")
        if any(b < a for a, b in zip(self.cdf, self.cdf[1:])):
            raise ValueError("cdf must be nondecreasing")

    @property
    def max_degree(self) -> int:
        return self.degrees[-1]

    def probability(self, degree: int) -> float:
        """P(degree), 0.0 for degrees outside the support."""
        i = bisect.bisect_left(self.degrees, degree)
        if i < len(self.degrees) and self.degrees[i] == degree:
            return self.probabilities[i]
        return 0.0


@dataclass(frozen=True)
class RobustSolitonParams:
    """Derived quantities of a Robust Soliton construction.

    R = c * ln(k/delta) * sqrt(k) is the expected ripple size (expected
    number of degree-one encoded symbols kept alive during decoding); beta
    is the normalizer; spike_degree is where the extra mass concentrates,
    round(k/R) clamped to [1, k].
    """

    k: int
    c: float
    delta: float
    R: float
    beta: float
    spike_degree: int


def _build(k: int, degrees: list[int], probabilities: list[float]) -> DegreeDistribution:
    cdf = []
    running = 0.0
    for p in probabilities:
        running += p
        cdf.append(running)
    return DegreeDistribution(
        k=k,
        degrees=tuple(degrees),
        probabilities=tuple(probabilities),
        cdf=tuple(cdf),
    )


def ideal_soliton(k: int) -> DegreeDistribution:
    """Ideal Soliton: rho(1) = 1/k, rho(d) = 1/(d(d-1)) for d = 2..k.

    Sums to 1 exactly by the telescoping identity; in practice it fails
    because the expected ripple size is only 1.
    """
    if k < 2:
        raise ValueError("ideal soliton needs k >= 2")
    probabilities = [1.0 / k] + [1.0 / (d * (d - 1)) for d in range(2, k + 1)]
    return _build(k, list(range(1, k + 1)), probabilities)


def robust_soliton(
    k: int, c: float, delta: float
) -> tuple[RobustSolitonParams, DegreeDistribution]:
    """Robust Soliton: mu(d) = (rho(d) + tau(d)) / beta.

    tau adds R/(d*k) for d below the spike and a spike of R*ln(R/delta)/k at
    d = round(k/R); when the spike lands on degree 1 it takes the spike value
    only, so no mass is double counted.  Rounding is symmetric
    (floor(x + 0.5)) to keep the spike position platform-independent.
    """
    if k < 2:
        raise ValueError("robust soliton needs k >= 2")
    if c <= 0.0:
        raise ValueError("c must be positive")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    R = c * math.log(k / delta) * math.sqrt(k)
    if R < 1.0:
        raise ValueError(
            f"robust soliton degenerates for k={k}, c={c}, delta={delta}: "
            f"R={R:.6g} < 1 would place the spike above k"
        )
    spike = int(math.floor(k / R + 0.5))
    spike = min(max(spike, 1), k)

    rho = [0.0] * (k + 1)
    rho[1] = 1.0 / k
    for d in range(2, k + 1):
        rho[d] = 1.0 / (d * (d - 1))
    tau = [0.0] * (k + 1)
    for d in range(1, spike):
        tau[d] = R / (d * k)
    tau[spike] = R * math.log(R / delta) / k

    beta = math.fsum(rho[1:]) + math.fsum(tau[1:])
    probabilities = [(rho[d] + tau[d]) / beta for d in range(1, k + 1)]
    params = RobustSolitonParams(k=k, c=c, delta=delta, R=R, beta=beta, spike_degree=spike)
    return params, _build(k, list(range(1, k + 1)), probabilities)


# Raptor-code degree table (Shokrollahi's optimized distribution): constant
# average degree 5.87 independent of k.  Coefficients are kept verbatim so
# they stay auditable; they sum to 0.999998 and the sampler's final CDF
# bucket absorbs the deficit.
_TABLE = (
    (1, 0.007969),
    (2, 0.493570),
    (3, 0.166220),
    (4, 0.072646),
    (5, 0.082558),
    (8, 0.056058),
    (9, 0.037229),
    (19, 0.055590),
    (65, 0.025023),
    (66, 0.003135),
)


def shokrollahi_table() -> DegreeDistribution:
    """The fixed ten-term degree table with support {1..5, 8, 9, 19, 65, 66}."""
    degrees = [d for d, _ in _TABLE]
    probabilities = [p for _, p in _TABLE]
    return _build(66, degrees, probabilities)


def sample_degree(dist: DegreeDistribution, u: float) -> int:
    """Inverse-CDF sampling: smallest degree whose CDF entry exceeds u.

    Deterministic in (dist, u); the final CDF entry is treated as exactly 1,
    so every u in [0, 1) maps to a degree.
    """
    if not 0.0 <= u < 1.0:
        raise ValueError(f"u must lie in [0, 1), got {u!r}")
    i = bisect.bisect_right(dist.cdf, u)
    if i >= len(dist.degrees):
        i = len(dist.degrees) - 1
    return dist.degrees[i]


def mean_degree(dist: DegreeDistribution) -> float:
    return math.fsum(d * p for d, p in zip(dist.degrees, dist.probabilities))


def analytic_symbol_bound(params: RobustSolitonParams) -> float:
    """k + 2*R*ln(R/delta): symbols that suffice for complete recovery
    with probability at least 1 - delta."""
    if params.R <= params.delta:
        raise ValueError(f"bound needs R > delta, got R={params.R}, delta={params.delta}")
    return params.k + 2.0 * params.R * math.log(params.R / params.delta)
