"""Norm and quasinorm estimators for Lebesgue, oscillation and Hardy-type spaces.

Oscillation suprema run over all grid-representable dyadic cubes; on the unit
torus the whole domain is the single cube of measure >= 1, which is how the
local oscillation space degenerates here (recorded in the report method).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .core import DyadicCube, SampledFunction, distance_field
from .errors import ConfigurationError, DomainError
from .wavelets import WaveletBasis, analyze, projection_stack, wavelet_square_function

OSCILLATION_MODES = ("BMO", "BMOplus", "bmo", "BMOlog")
HARDY_MODES = ("H1_square", "H1_maximal", "h1", "Hlog")


@dataclass(frozen=True)
class NormReport:
    """One computed norm value together with the estimator that produced it."""

    space: str
    value: float
    method: str
    resolution: int

    def to_dict(self) -> dict:
        return asdict(self)


def lp_norm(f: SampledFunction, p: float) -> float:
    """Grid Riemann-sum Lp norm; p = inf gives the sup norm."""
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    a = np.abs(f.values)
    if math.isinf(p):
        return float(a.max())
    return float((a ** p).mean() ** (1.0 / p))


def weak_lp_quasinorm(f: SampledFunction, p: float) -> float:
    """sup over lambda of lambda * |{|f| > lambda}|^(1/p), exact for step data.

    The supremum over positive lambda is attained just below one of the
    attained values of |f|, so scanning the sorted value lattice is exact.
    """
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    a = np.sort(np.abs(f.values).ravel())[::-1]
    if a[0] == 0.0:
        return 0.0
    measures = np.arange(1, a.size + 1) / a.size
    return float(np.max(a * measures ** (1.0 / p)))


def _level_means(values: np.ndarray, level: int) -> np.ndarray:
    """Averages of `values` over every dyadic cube of one level."""
    N = values.shape[0]
    step = N >> level
    if values.ndim == 1:
        return values.reshape(1 << level, step).mean(axis=1)
    return values.reshape(1 << level, step, 1 << level, step).mean(axis=(1, 3))


def _level_oscillations(values: np.ndarray, level: int) -> np.ndarray:
    """Mean oscillation (1/|I|) int_I |f - f_I| for every cube of one level."""
    N = values.shape[0]
    step = N >> level
    if values.ndim == 1:
        blocks = values.reshape(1 << level, step)
        means = blocks.mean(axis=1, keepdims=True)
        return np.abs(blocks - means).mean(axis=1)
    blocks = values.reshape(1 << level, step, 1 << level, step)
    means = blocks.mean(axis=(1, 3), keepdims=True)
    return np.abs(blocks - means).mean(axis=(1, 3))


def _cube_centers(dim: int, level: int):
    side = 2.0 ** (-level)
    axis = (np.arange(1 << level) + 0.5) * side
    if dim == 1:
        return (axis,)
    return np.meshgrid(axis, axis, indexing="ij")


def oscillation_norm(f: SampledFunction, mode: str = "BMO") -> float:
    """Dyadic-cube mean-oscillation norms: BMO, BMO with anchored average,
    the local variant, and the logarithmically weighted variant."""
    if mode not in OSCILLATION_MODES:
        raise ConfigurationError(f"unknown oscillation mode {mode!r}")
    v = f.values
    J = f.finest_level
    sup = 0.0
    for level in range(0, J + 1):
        osc = _level_oscillations(v, level)
        if mode == "BMOlog":
            centers = _cube_centers(f.dim, level)
            dist = np.zeros_like(osc)
            for axis in range(f.dim):
                dist = dist + np.minimum(centers[axis] % 1.0, 1.0 - centers[axis] % 1.0) ** 2
            weight = level * math.log(2.0) + np.log(math.e + np.sqrt(dist))
            osc = osc * weight
        sup = max(sup, float(osc.max()))
    if mode == "BMOplus":
        sup += abs(f.mean())
    elif mode == "bmo":
        # the only torus cube of measure >= 1 is the whole domain
        sup += float(np.abs(v).mean())
    return sup


def llog_quasinorm(f: SampledFunction, tol: float = 1e-6, max_iter: int = 200) -> float:
    """Luxemburg-type quasinorm with the weight log(e+|x|) + log(e+|f|/lambda).

    Found by bisection on lambda; the defining integral at the returned value
    lies within `tol` of 1 unless f is identically zero.
    """
    a = np.abs(f.values)
    if not a.any():
        return 0.0
    dist = distance_field(f.dim, f.resolution, (0.0,) * f.dim)
    logx = np.log(math.e + dist)

    def integral(lam: float) -> float:
        r = a / lam
        return float((r / (logx + np.log(math.e + r))).mean())

    lo = None
    hi = float(a.mean()) + 1e-300
    while integral(hi) >= 1.0:
        hi *= 2.0
    lo = hi / 2.0
    while integral(lo) < 1.0:
        lo /= 2.0
        if lo < 1e-300:
            return 0.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        val = integral(mid)
        if abs(val - 1.0) <= tol:
            return mid
        if val > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def hardy_square_parts(f: SampledFunction, basis: WaveletBasis,
                       coarse_level: int | None = None) -> tuple[float, float]:
    """(detail, coarse) L1 masses of the square-function Hardy estimator.

    The coarse part is the L1 norm of the sampled coarse scaling projection;
    a genuinely cancellative input has a negligible coarse part.
    """
    tree = analyze(f, basis, coarse_level)
    detail = lp_norm(wavelet_square_function(tree), 1.0)
    coarse_proj = projection_stack(tree, basis)[tree.coarse_level]
    return detail, float(np.abs(coarse_proj).mean())


def hardy_norm(f: SampledFunction, mode: str, basis: WaveletBasis | None = None,
               coarse_level: int | None = None, maximal=None) -> float:
    """Hardy-scale estimators: wavelet square function, grand/local maximal
    function L1 norms, and the log-weighted maximal quasinorm."""
    if mode not in HARDY_MODES:
        raise ConfigurationError(f"unknown hardy mode {mode!r}")
    if mode == "H1_square":
        if basis is None:
            raise ConfigurationError("H1_square needs a wavelet basis")
        detail, coarse = hardy_square_parts(f, basis, coarse_level)
        return detail + coarse
    from .sublinear import maximal_function  # local import to avoid a cycle
    if mode == "H1_maximal":
        return lp_norm(maximal_function(f, local=False, operator=maximal), 1.0)
    if mode == "h1":
        return lp_norm(maximal_function(f, local=True, operator=maximal), 1.0)
    return llog_quasinorm(maximal_function(f, local=False, operator=maximal))


def norm_report(f: SampledFunction, space: str, basis: WaveletBasis | None = None,
                coarse_level: int | None = None) -> NormReport:
    """Compute one named norm and wrap it with its method description."""
    N = f.resolution
    if space.startswith("Lp:"):
        p = float(space.split(":", 1)[1])
        return NormReport(space, lp_norm(f, p), f"riemann-sum-L{p:g}", N)
    if space.startswith("weakLp:"):
        p = float(space.split(":", 1)[1])
        return NormReport(space, weak_lp_quasinorm(f, p), "sorted-lattice-weak", N)
    if space == "Llog":
        return NormReport(space, llog_quasinorm(f), "luxemburg-bisection", N)
    if space in OSCILLATION_MODES:
        method = "dyadic-oscillation-sup"
        if space == "bmo":
            method += "[measure>=1 clause degenerates to the whole torus]"
        return NormReport(space, oscillation_norm(f, space), method, N)
    if space in HARDY_MODES:
        if space == "H1_square":
            detail, coarse = hardy_square_parts(f, basis, coarse_level)
            method = f"wavelet-square/{basis.family}{basis.order}"
            if coarse > 1e-8 * (1.0 + detail):
                method += f"[coarse part {coarse:.3g} flagged]"
            return NormReport(space, detail + coarse, method, N)
        return NormReport(space, hardy_norm(f, space), "maximal-dictionary", N)
    raise ConfigurationError(f"unknown space {space!r}")


@dataclass(frozen=True)
class AtomCheck:
    """Outcome of a classical/weighted atom validation."""

    ok: bool
    failed_clause: str
    support_leak: float
    size_norm: float
    size_budget: float
    mean_abs: float
    weighted_mean_abs: float | None

    def __bool__(self):
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "atom ok"
        return f"atom fails clause {self.failed_clause}"


def validate_atom(f: SampledFunction, Q: DyadicCube, q: float,
                  b: SampledFunction | None = None) -> AtomCheck:
    """Check support in Q, the Lq size bound and the cancellation clauses."""
    if not 1 < q:
        raise DomainError(f"q must lie in (1, inf], got {q}")
    outside = f.values.copy()
    outside[Q.grid_slices(f.resolution)] = 0.0
    support_leak = float(np.max(np.abs(outside)))
    size = lp_norm(f, q)
    budget = Q.measure ** (1.0 / q - 1.0) if not math.isinf(q) else 1.0 / Q.measure
    mean_abs = abs(f.integral())
    wmean = abs((f * b).integral()) if b is not None else None
    failed = ""
    if support_leak > 1e-12 * (1.0 + size):
        failed = "i (support)"
    elif size > budget * (1.0 + 1e-10):
        failed = "ii (size)"
    elif mean_abs > 1e-10:
        failed = "iii (cancellation)"
    elif wmean is not None and wmean > 1e-10:
        failed = "iii (weighted cancellation)"
    return AtomCheck(failed == "", failed, support_leak, size, budget, mean_abs, wmean)
