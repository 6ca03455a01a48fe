"""Free energy, internal energy, and specific heat around the transition.

Everything is derived from the leading eigenvalue lambda(beta) through
phi(beta) = beta*f(beta) = -ln lambda(beta), which is the natural quantity
to differentiate: f itself carries a removable 1/beta factor.  For beta >= 1
the free energy vanishes identically, so the interesting window is
0 < beta < 1 and especially the approach beta -> 1- where the transition is
second order: f stays continuous while the specific heat diverges like
1/(eps * ln^2 eps) with eps = 1 - beta.

Numerical policy: lambda comes from the truncated operator matrix at a
dimension chosen by a doubling ladder (256 -> 2048), accepted once the
doubling step moves lambda by less than 10% of |ln lambda|.  Derivative
stencils always evaluate every phi-point at one fixed dimension -- the
truncation error is smooth in beta, so a fixed dimension cancels most of it
in differences, while mixing dimensions inside one stencil would inject
jumps amplified by 1/h^2.
"""
from __future__ import annotations

import enum
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import transfer
from .errors import TruncationError
from .partition import Model, z_farey_chain, z_farey_tree, z_knauf

M_LADDER = (256, 512, 1024, 2048)
# Doubling step must move lambda by less than this fraction of |ln lambda|.
TRUNCATION_SIGNAL_FRACTION = 0.1
_EIGEN_TOL = 1e-12

_lambda_memo: dict[tuple[float, int], float] = {}


class LambdaSource(enum.Enum):
    MATRIX = "matrix"
    RATIO = "ratio"


@dataclass(frozen=True, slots=True)
class EscalationResult:
    lambda_: float
    dim: int
    drift: float  # |lambda(dim) - lambda(dim/2)|
    converged: bool


@dataclass(frozen=True, slots=True)
class HeatEstimate:
    """Specific heat at one beta: plain stencils, Richardson value, error gauge."""

    beta: float
    value: float
    plain_h: float
    plain_half_h: float
    richardson_error: float
    h: float
    dim: int


@dataclass(frozen=True, slots=True)
class ThermoCurve:
    grid: tuple[float, ...]
    f: tuple[float, ...]
    u: tuple[float, ...]
    c: tuple[float, ...]
    lambda_source: LambdaSource
    uncertainty: tuple[float, ...]


@dataclass(frozen=True, slots=True)
class TransitionFit:
    """Leading-form fit near beta=1: beta*f ~ c*eps/ln(eps), eps = 1-beta."""

    window: tuple[float, float]
    eps: tuple[float, ...]
    c_values: tuple[float, ...]
    c_hat: float
    stability: float  # max |c(eps)/c_hat - 1|
    heat_products: tuple[float, ...]  # C(eps) * eps * ln^2(eps)
    heat_flatness: float  # max/min of heat_products
    dims: tuple[int, ...]
    uncertainties: tuple[float, ...]


@dataclass(frozen=True, slots=True)
class HausdorffReport:
    """Growth directions of the tree partition sum around beta = 1."""

    rows: tuple[tuple[float, str, bool, tuple[float, ...]], ...]
    ok: bool


def _lambda(beta: float, dim: int) -> float:
    key = (beta, dim)
    got = _lambda_memo.get(key)
    if got is None:
        mat = transfer.build_matrix(beta, dim)
        got = transfer.leading_eigen(mat, tol=_EIGEN_TOL).lambda_
        _lambda_memo[key] = got
    return got


def lambda_escalated(beta: float) -> EscalationResult:
    """Climb the dimension ladder until the doubling drift is below the gate.

    Returns the last rung even when the gate is never met (converged=False);
    strict callers must check the flag.
    """
    prev = _lambda(beta, M_LADDER[0])
    drift = math.inf
    for dim in M_LADDER[1:]:
        cur = _lambda(beta, dim)
        drift = abs(cur - prev)
        if drift <= TRUNCATION_SIGNAL_FRACTION * abs(math.log(cur)):
            return EscalationResult(cur, dim, drift, True)
        prev = cur
    return EscalationResult(prev, M_LADDER[-1], drift, False)


def free_energy(beta: float, source: str | LambdaSource = LambdaSource.MATRIX,
                k: int = 26, dim: int | None = None) -> float:
    """Free energy per site: -(1/beta) ln lambda(beta) below 1, zero above.

    source selects where lambda comes from: the truncated-matrix route
    (dimension ladder, or a fixed dim if given) or the finite-level
    partition ratio at level k.
    """
    if beta <= 0.0:
        raise ValueError(f"free energy needs beta > 0, got {beta}")
    if beta >= 1.0:
        return 0.0
    src = LambdaSource(source)
    if src is LambdaSource.RATIO:
        lam = transfer.lambda_from_ratio(beta, k)
    elif dim is not None:
        lam = _lambda(beta, dim)
    else:
        lam = lambda_escalated(beta).lambda_
    return -math.log(lam) / beta


def f_spinchain(beta: float) -> float:
    """Chain-unit free energy f(beta/2): moves the transition to beta_c = 2."""
    return free_energy(beta / 2.0)


def finite_size_free_energy(model: Model, k: int, beta: float, threads: int = 1) -> float:
    """-ln Z_k / (beta k) for one model at finite level k."""
    if beta == 0.0:
        raise ValueError("finite-size free energy is undefined at beta = 0")
    if model is Model.KNAUF:
        z = z_knauf(k, beta, threads)
    elif model is Model.FAREY_CHAIN:
        z = z_farey_chain(k, beta, threads)
    elif model is Model.FAREY_TREE:
        z = z_farey_tree(k, beta, threads)
    else:
        raise ValueError(f"finite-size free energy defined for the three full models, not {model}")
    return -math.log(z.value) / (beta * k)


def _phi(beta: float, dim: int) -> float:
    # beta*f(beta) = -ln lambda; identically zero from the transition on.
    if beta >= 1.0:
        return 0.0
    return -math.log(_lambda(beta, dim))


def _default_h(beta: float) -> float:
    return min((1.0 - beta) / 10.0, 1e-3)


def _stencil_dim(beta: float, dim: int | None) -> int:
    return dim if dim is not None else lambda_escalated(beta).dim


def internal_energy(beta: float, h: float | None = None, dim: int | None = None) -> float:
    """u = d(beta f)/d beta by central difference; zero for beta >= 1."""
    if beta <= 0.0:
        raise ValueError(f"internal energy needs beta > 0, got {beta}")
    if beta >= 1.0:
        return 0.0
    if h is None:
        h = _default_h(beta)
    if beta + h >= 1.0:
        raise ValueError(f"step h={h} collides with the boundary at beta=1")
    m = _stencil_dim(beta, dim)
    return (_phi(beta + h, m) - _phi(beta - h, m)) / (2.0 * h)


def specific_heat_detail(beta: float, h: float | None = None,
                         dim: int | None = None) -> HeatEstimate:
    """Second-difference specific heat with Richardson extrapolation over h, h/2."""
    if not 0.0 < beta < 1.0:
        raise ValueError(f"specific heat stencil needs 0 < beta < 1, got {beta}")
    if h is None:
        h = _default_h(beta)
    if beta + h >= 1.0:
        raise ValueError(f"step h={h} collides with the boundary at beta=1")
    m = _stencil_dim(beta, dim)

    def second(step: float) -> float:
        d2 = (_phi(beta + step, m) - 2.0 * _phi(beta, m) + _phi(beta - step, m)) / (step * step)
        return -beta * beta * d2

    plain = second(h)
    half = second(h / 2.0)
    value = (4.0 * half - plain) / 3.0
    return HeatEstimate(
        beta=beta,
        value=value,
        plain_h=plain,
        plain_half_h=half,
        richardson_error=abs(half - plain) / 3.0,
        h=h,
        dim=m,
    )


def specific_heat(beta: float, h: float | None = None, dim: int | None = None) -> float:
    """Richardson-extrapolated specific heat -beta^2 d^2(beta f)/d beta^2."""
    return specific_heat_detail(beta, h, dim).value


def thermo_curve(grid: list[float] | tuple[float, ...],
                 source: str | LambdaSource = LambdaSource.MATRIX,
                 k: int = 26, threads: int = 1) -> ThermoCurve:
    """f, u, c over a beta grid, with per-point truncation uncertainty."""
    src = LambdaSource(source)
    pts = [float(b) for b in grid]
    if any(b <= 0.0 for b in pts):
        raise ValueError("thermo grid must be strictly positive")

    def one(beta: float) -> tuple[float, float, float, float]:
        if beta >= 1.0:
            return 0.0, 0.0, 0.0, 0.0
        if src is LambdaSource.RATIO:
            lam = transfer.lambda_from_ratio(beta, k)
            f = -math.log(lam) / beta
            # no second route at the same k to gauge against; report half the
            # step to the previous level as a crude finite-level uncertainty
            unc = abs(lam - transfer.lambda_from_ratio(beta, k - 1)) / 2.0
            return f, math.nan, math.nan, unc
        esc = lambda_escalated(beta)
        f = -math.log(esc.lambda_) / beta
        if beta + _default_h(beta) >= 1.0:
            u = c = math.nan
        else:
            u = internal_energy(beta, dim=esc.dim)
            c = specific_heat(beta, dim=esc.dim)
        return f, u, c, esc.drift

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(one, pts))
    else:
        rows = [one(b) for b in pts]
    f, u, c, unc = zip(*rows) if rows else ((), (), (), ())
    return ThermoCurve(tuple(pts), tuple(f), tuple(u), tuple(c), src, tuple(unc))


def prellberg_fit(eps_grid: list[float] | tuple[float, ...]) -> TransitionFit:
    """Pointwise c(eps) = beta f(beta) ln(eps)/eps over the window, median-fitted.

    Also evaluates the specific-heat form C(eps)*eps*ln^2(eps), whose
    flatness (max/min) gauges how well the divergence shape holds.  Refuses
    to fit when the truncation uncertainty at some grid point exceeds 10%
    of the signal |beta f|.
    """
    eps = sorted(float(e) for e in eps_grid)
    if not eps:
        raise ValueError("empty epsilon grid")
    if eps[0] < 1e-3 or eps[-1] > 1e-1:
        raise ValueError(f"epsilon window must lie inside [1e-3, 1e-1], got [{eps[0]}, {eps[-1]}]")

    c_values: list[float] = []
    products: list[float] = []
    dims: list[int] = []
    drifts: list[float] = []
    for e in eps:
        beta = 1.0 - e
        esc = lambda_escalated(beta)
        bf = -math.log(esc.lambda_)
        if not esc.converged or esc.drift > TRUNCATION_SIGNAL_FRACTION * abs(bf):
            raise TruncationError(
                f"truncation uncertainty {esc.drift:.3e} exceeds 10% of |beta f| = "
                f"{abs(bf):.3e} at eps={e:g}",
                required_dim=2 * esc.dim,
            )
        c_values.append(bf * math.log(e) / e)
        heat = specific_heat(beta, dim=esc.dim)
        products.append(heat * e * math.log(e) ** 2)
        dims.append(esc.dim)
        drifts.append(esc.drift)

    c_hat = statistics.median(c_values)
    stability = max(abs(c / c_hat - 1.0) for c in c_values)
    return TransitionFit(
        window=(eps[0], eps[-1]),
        eps=tuple(eps),
        c_values=tuple(c_values),
        c_hat=c_hat,
        stability=stability,
        heat_products=tuple(products),
        heat_flatness=max(products) / min(products),
        dims=tuple(dims),
        uncertainties=tuple(drifts),
    )


def hausdorff_check(beta_grid: list[float] | tuple[float, ...],
                    k_grid: list[int] | tuple[int, ...]) -> HausdorffReport:
    """Tree-sum growth directions: up for beta<1, down for beta>1, in (0,1) at 1.

    The flip of the growth direction exactly at beta = 1 is the numerical
    signature that the ball set has unit Hausdorff dimension.
    """
    betas = [float(b) for b in beta_grid]
    ks = sorted(int(k) for k in k_grid)
    if len(ks) < 2:
        raise ValueError("need at least two levels to compare growth")
    if min(betas) >= 1.0 or max(betas) <= 1.0:
        raise ValueError("beta grid must bracket the transition at beta = 1")

    rows = []
    all_ok = True
    for beta in betas:
        vals = tuple(z_farey_tree(k, beta).value for k in ks)
        if beta < 1.0:
            direction = "growing"
            ok = all(a < b for a, b in zip(vals, vals[1:]))
        elif beta > 1.0:
            direction = "shrinking"
            ok = all(a > b for a, b in zip(vals, vals[1:]))
        else:
            direction = "bounded"
            ok = all(0.0 < v < 1.0 for v in vals)
        rows.append((beta, direction, ok, vals))
        all_ok = all_ok and ok
    return HausdorffReport(tuple(rows), all_ok)
