"""Self-contained verification suites over the proved identities and bounds.

Each suite re-checks one family of exact statements numerically over a
fixed default grid and reports a summary; nothing here depends on the
spectral code, so a failure isolates a defect in the enumeration or
summation layers.  The command-line `verify` command runs every suite and
maps any failure to a nonzero exit code.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .ball_geometry import diameter_sum
from .partition import (
    dirichlet_coefficients,
    euler_totient,
    verify_sandwich,
    verify_telescope,
    z_knauf,
    zeta_ratio,
)

SANDWICH_LEVELS = range(2, 19)
SANDWICH_BETAS = (-1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0)
TELESCOPE_LEVELS = range(2, 17)
TELESCOPE_BETAS = (0.25, 0.5, 1.0, 2.0)


@dataclass(frozen=True, slots=True)
class CheckResult:
    suite: str
    cases: int
    failures: int
    detail: str  # first failing case, or a one-line summary statistic

    @property
    def ok(self) -> bool:
        return self.failures == 0


def check_sandwich(threads: int = 1) -> CheckResult:
    """Two-sided bounds between the tree sum and the even chain sums."""
    cases = failures = 0
    first = ""
    for k in SANDWICH_LEVELS:
        for beta in SANDWICH_BETAS:
            cases += 1
            rep = verify_sandwich(k, beta, threads)
            if not rep.holds:
                failures += 1
                first = first or f"k={k} beta={beta}: {rep.detail}"
    return CheckResult("sandwich", cases, failures, first or "all bounds strict")


def check_telescope(threads: int = 1) -> CheckResult:
    """Level telescoping of the even sums, plus the growth bound below beta=1."""
    cases = failures = 0
    first = ""
    for k in TELESCOPE_LEVELS:
        for beta in TELESCOPE_BETAS:
            cases += 1
            rep = verify_telescope(k, beta, threads)
            bad = not rep.identity_ok or rep.growth_holds is False
            if bad:
                failures += 1
                first = first or (
                    f"k={k} beta={beta}: residual={rep.residual:.2e} growth={rep.growth_holds}"
                )
    return CheckResult("telescope", cases, failures, first or "identity and growth hold")


def check_totient(k: int = 30, n_max: int = 50) -> CheckResult:
    """Denominator multiplicities: monotone in k, bounded by and reaching phi(n).

    A denominator n is fully populated once every coprime numerator has
    appeared, which takes exactly n-1 levels (the 1/n and (n-1)/n entries
    arrive last); so equality with the classical totient is asserted only
    for n <= k+1 and the bound elsewhere.
    """
    by_depth = _kernels.dirichlet_by_depth(k, n_max)
    profiles = np.cumsum(by_depth, axis=0)  # row j = counts at level j
    cases = failures = 0
    first = ""
    for n in range(1, n_max + 1):
        cases += 1
        col = profiles[:, n]
        phi = euler_totient(n)
        bad = ""
        if np.any(np.diff(col) < 0):
            bad = f"phi_k({n}) not monotone in k"
        elif col[-1] > phi:
            bad = f"phi_{k}({n})={col[-1]} exceeds phi({n})={phi}"
        elif n <= k + 1 and col[-1] != phi:
            bad = f"phi_{k}({n})={col[-1]} != phi({n})={phi}"
        if bad:
            failures += 1
            first = first or bad
    return CheckResult("totient", cases, failures, first or f"levels<=k fully populated, k={k}")


def check_zeta_ratio(k: int = 24, tol: float = 5e-3, threads: int = 1) -> CheckResult:
    """Large-level limit of the level sums at exponent 4 against zeta(3)/zeta(4)."""
    target = zeta_ratio(2.0)
    val = z_knauf(k, 4.0, threads).value
    prev = z_knauf(k - 4, 4.0, threads).value
    gap = abs(val - target)
    failures = 0
    detail = f"Z_{k}(4)={val:.9f} target={target:.9f} gap={gap:.2e}"
    if gap >= tol or not prev < val < target:
        failures = 1
    return CheckResult("zeta-ratio", 1, failures, detail)


def check_ball_sums(k_max: int = 20) -> CheckResult:
    """Total ball diameter stays below the unit interval length at every level."""
    cases = failures = 0
    first = ""
    worst = 0.0
    for k in range(2, k_max + 1):
        cases += 1
        s = diameter_sum(k)
        worst = max(worst, s)
        if not s < 1.0:
            failures += 1
            first = first or f"k={k}: sum={s!r}"
    return CheckResult("ball-sum", cases, failures, first or f"max sum {worst:.6f}")


def check_bounded_sums(k_max: int = 30) -> CheckResult:
    """Even sums below 2 and level sums below 2k+1 at exponent 2, one pass."""
    sums, comps, _ts, _tc = _kernels.knauf_chunk(1, 1, 0, k_max, 2.0, False)
    even = sums - comps  # row j-1 = even sum at level j
    cases = failures = 0
    first = ""
    total = 1.0  # the 0/1 endpoint
    for j in range(1, k_max + 1):
        cases += 1
        total += even[j - 1]
        bad = ""
        if not even[j - 1] < 2.0:
            bad = f"even sum at k={j} is {even[j - 1]!r}"
        elif not total <= 2 * j + 1:
            bad = f"level sum at k={j} is {total!r} > {2 * j + 1}"
        if bad:
            failures += 1
            first = first or bad
    return CheckResult("bounded-sum", cases, failures, first or f"Z_{k_max}(2)={total:.6f}")


def run_all(threads: int = 1) -> list[CheckResult]:
    """Every suite in a fixed order; cheap enumerations first."""
    return [
        check_totient(),
        check_sandwich(threads),
        check_telescope(threads),
        check_zeta_ratio(threads=threads),
        check_ball_sums(),
        check_bounded_sums(),
    ]
