"""Grand maximal operator, its local variant, and the Lusin area integral.

Both operators are built from finitely many linear convolution fields
(a fixed bump dictionary over a dyadic scale grid for the maximal operator,
Poisson-extension gradients over a dyadic height grid for the area integral).
Because of that, the pointwise-shifted commutator input (b(x) - b(.)) f(.)
expands algebraically: T((b(x) f - h))(x) is computed exactly without one
operator application per grid point.  Window maxima and window means use
explicit circular shifts so that every code path shares the same discrete
window; the subadditivity used by the sandwich estimates is then exact.
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np

from .core import SampledFunction
from .errors import ConfigurationError, ShapeError
from .operators import frequency_grid

_BUMP_SHAPES = ((0.5, 2), (0.75, 3), (1.0, 4))  # (width, polynomial power)


def default_scales(resolution: int, top_exponent: int = 1,
                   bottom_exponent: int = -14, min_cells: int = 4) -> tuple:
    """Dyadic scale grid 2^top .. 2^bottom, dropping scales under min_cells cells."""
    ts = [2.0 ** e for e in range(top_exponent, bottom_exponent - 1, -1)]
    return tuple(t for t in ts if t * resolution >= min_cells)


def _bump(u: np.ndarray, width: float, power: int) -> np.ndarray:
    inside = u < width
    out = np.zeros_like(u)
    out[inside] = (1.0 - (u[inside] / width) ** 2) ** power
    return out


def _bump_grad(u: np.ndarray, width: float, power: int) -> np.ndarray:
    inside = u < width
    out = np.zeros_like(u)
    r = u[inside] / width
    out[inside] = power * (1.0 - r ** 2) ** (power - 1) * 2.0 * r / width
    return out


def _bump_amplitude(width: float, power: int, dim: int) -> float:
    """Largest multiple keeping |phi| + |grad phi| under (1+|x|^2)^-(dim+1)."""
    u = np.linspace(0.0, width, 4001)
    size = _bump(u, width, power) + np.abs(_bump_grad(u, width, power))
    cap = (1.0 + u ** 2) ** (-(dim + 1))
    with np.errstate(divide="ignore"):
        ratio = np.where(size > 0, cap / size, np.inf)
    return float(0.999 * ratio.min())


def _bump_mass(width: float, power: int, dim: int) -> float:
    """Integral of the normalized bump over the plane/line."""
    amp = _bump_amplitude(width, power, dim)
    u = np.linspace(0.0, width, 20001)
    vals = amp * _bump(u, width, power)
    if dim == 1:
        return float(2.0 * np.trapezoid(vals, u))
    return float(2.0 * math.pi * np.trapezoid(vals * u, u))


def _window_radius(t: float, resolution: int) -> int:
    return min(int(t * resolution), resolution // 2)


def _axis_window_max(a: np.ndarray, radius: int, axis: int) -> np.ndarray:
    out = a.copy()
    for d in range(1, radius + 1):
        np.maximum(out, np.roll(a, d, axis=axis), out=out)
        np.maximum(out, np.roll(a, -d, axis=axis), out=out)
    return out


def window_max(a: np.ndarray, radius: int) -> np.ndarray:
    """Max over the circular box window of per-axis radius `radius`."""
    out = a
    for axis in range(a.ndim):
        out = _axis_window_max(out, radius, axis)
    return out


def window_mean(a: np.ndarray, radius: int) -> np.ndarray:
    """Mean over the circular box window of per-axis radius `radius`."""
    out = a
    for axis in range(a.ndim):
        acc = out.copy()
        for d in range(1, radius + 1):
            acc = acc + np.roll(out, d, axis=axis) + np.roll(out, -d, axis=axis)
        out = acc / (2 * radius + 1)
    return out


class GrandMaximal:
    """Nontangential maximal operator over a finite bump dictionary.

    The true object takes a sup over an infinite family of test functions;
    this realization fixes three spline bumps normalized into the admissible
    class and a dyadic scale grid, which is all the norm equivalences used
    here require (constants are fitted, never assumed).
    """

    is_linear = False

    def __init__(self, dim: int, resolution: int, scales=None):
        self.dim = dim
        self.resolution = resolution
        self.scales = tuple(scales) if scales is not None else default_scales(resolution)
        if not self.scales:
            raise ConfigurationError("empty scale grid for the maximal operator")
        self.name = "grand_maximal"
        self._kernel_ffts = {}
        for width, power in _BUMP_SHAPES:
            amp = _bump_amplitude(width, power, dim)
            for t in self.scales:
                self._kernel_ffts[(width, power, t)] = np.fft.fftn(
                    self._sampled_kernel(width, power, amp, t))
        self.dictionary_mass = max(_bump_mass(w, p, dim) for w, p in _BUMP_SHAPES)

    def _sampled_kernel(self, width, power, amp, t):
        """Periodized dilation t^-n phi(./t) sampled on the grid."""
        N, dim = self.resolution, self.dim
        axis = np.arange(N) / N
        reach = int(math.ceil(width * t + 1.0))
        shifts = range(-reach, reach + 1)
        out = np.zeros((N,) * dim)
        if dim == 1:
            for m in shifts:
                out += _bump(np.abs(axis + m) / t, width, power)
        else:
            ax0, ax1 = np.meshgrid(axis, axis, indexing="ij")
            for m0 in shifts:
                for m1 in shifts:
                    r = np.sqrt((ax0 + m0) ** 2 + (ax1 + m1) ** 2) / t
                    out += _bump(r, width, power)
        return amp * out / t ** dim

    def _scale_set(self, local: bool):
        ts = [t for t in self.scales if (t < 1.0 if local else True)]
        if not ts:
            raise ConfigurationError("no scales under 1 available for the local variant")
        return ts

    def _fields(self, f: SampledFunction, local: bool):
        F = np.fft.fftn(f.values)
        for (width, power, t), K in self._kernel_ffts.items():
            if local and t >= 1.0:
                continue
            u = np.fft.ifftn(F * K).real / f.values.size
            yield t, u

    def apply(self, f: SampledFunction, local: bool = False) -> SampledFunction:
        self._check(f)
        self._scale_set(local)
        out = np.zeros_like(f.values)
        for t, u in self._fields(f, local):
            r = _window_radius(t, self.resolution)
            np.maximum(out, window_max(np.abs(u), r), out=out)
        return SampledFunction(out)

    def pointwise_shifted(self, b: SampledFunction, f: SampledFunction,
                          h: SampledFunction, local: bool = False) -> SampledFunction:
        """x -> value at x of the operator applied to b(x) f(.) - h(.).

        Exact: the convolution fields of f and h are formed once and the
        window sup of |b(x) A(y) - H(y)| is taken over explicit shifts.
        """
        self._check(f)
        if b.values.shape != f.values.shape or h.values.shape != f.values.shape:
            raise ShapeError("mismatched resolutions")
        F = np.fft.fftn(f.values)
        H = np.fft.fftn(h.values)
        bv = b.values
        out = np.zeros_like(f.values)
        size = f.values.size
        for (width, power, t), K in self._kernel_ffts.items():
            if local and t >= 1.0:
                continue
            A = np.fft.ifftn(F * K).real / size
            Hh = np.fft.ifftn(H * K).real / size
            r = _window_radius(t, self.resolution)
            if self.dim == 1:
                for d in range(-r, r + 1):
                    cand = np.abs(bv * np.roll(A, -d) - np.roll(Hh, -d))
                    np.maximum(out, cand, out=out)
            else:
                for d0, d1 in product(range(-r, r + 1), repeat=2):
                    cand = np.abs(bv * np.roll(A, (-d0, -d1), (0, 1))
                                  - np.roll(Hh, (-d0, -d1), (0, 1)))
                    np.maximum(out, cand, out=out)
        return SampledFunction(out)

    def _check(self, f):
        if f.dim != self.dim or f.resolution != self.resolution:
            raise ShapeError("operator built for a different grid")


class LusinArea:
    """Area integral of the Poisson extension over discretized cones.

    The cone integral is a fixed nonnegative quadrature over a dyadic height
    grid: weight t^(1-n) * dt * window measure times the window mean of
    |grad u|^2, so the operator is an exact L2 norm of linear fields.
    """

    is_linear = False

    def __init__(self, dim: int, resolution: int, scales=None):
        self.dim = dim
        self.resolution = resolution
        self.scales = tuple(scales) if scales is not None else default_scales(
            resolution, top_exponent=-1, bottom_exponent=-13, min_cells=1)
        if not self.scales:
            raise ConfigurationError("empty height grid for the area integral")
        self.name = "lusin_area"
        k = frequency_grid(dim, resolution)
        self._knorm = np.sqrt(sum(ki ** 2 for ki in k))
        self._kaxes = k

    def _gradient_multipliers(self, t: float):
        pois = np.exp(-2.0 * math.pi * t * self._knorm)
        mults = [2.0j * math.pi * ka * pois for ka in self._kaxes]
        mults.append(-2.0 * math.pi * self._knorm * pois)
        return mults

    def _weights(self):
        N = self.resolution
        for t in self.scales:
            r = _window_radius(t, N)
            measure = ((2 * r + 1) / N) ** self.dim
            yield t, r, t ** (1 - self.dim) * (t / 2.0) * measure

    def _cone_quadratic(self, F, G) -> np.ndarray:
        """Cone quadrature of the product of gradient fields of two inputs."""
        acc = np.zeros((self.resolution,) * self.dim)
        for t, r, w in self._weights():
            dot = np.zeros_like(acc)
            for mult in self._gradient_multipliers(t):
                a = np.fft.ifftn(F * mult).real
                bb = a if G is F else np.fft.ifftn(G * mult).real
                dot += a * bb
            acc += w * window_mean(dot, r)
        return acc

    def apply(self, f: SampledFunction) -> SampledFunction:
        self._check(f)
        F = np.fft.fftn(f.values)
        return SampledFunction(np.sqrt(np.maximum(self._cone_quadratic(F, F), 0.0)))

    def pointwise_shifted(self, b: SampledFunction, f: SampledFunction,
                          h: SampledFunction) -> SampledFunction:
        """x -> area integral at x of b(x) f(.) - h(.), by quadratic expansion."""
        self._check(f)
        if b.values.shape != f.values.shape or h.values.shape != f.values.shape:
            raise ShapeError("mismatched resolutions")
        F = np.fft.fftn(f.values)
        H = np.fft.fftn(h.values)
        qa = self._cone_quadratic(F, F)
        qc = self._cone_quadratic(F, H)
        qb = self._cone_quadratic(H, H)
        bv = b.values
        return SampledFunction(np.sqrt(np.maximum(bv * bv * qa - 2.0 * bv * qc + qb, 0.0)))

    def _check(self, f):
        if f.dim != self.dim or f.resolution != self.resolution:
            raise ShapeError("operator built for a different grid")


_MAXIMAL_CACHE: dict = {}
_LUSIN_CACHE: dict = {}


def grand_maximal(dim: int, resolution: int) -> GrandMaximal:
    key = (dim, resolution)
    if key not in _MAXIMAL_CACHE:
        _MAXIMAL_CACHE[key] = GrandMaximal(dim, resolution)
    return _MAXIMAL_CACHE[key]


def lusin_area(dim: int, resolution: int) -> LusinArea:
    key = (dim, resolution)
    if key not in _LUSIN_CACHE:
        _LUSIN_CACHE[key] = LusinArea(dim, resolution)
    return _LUSIN_CACHE[key]


def maximal_function(f: SampledFunction, local: bool = False,
                     operator: GrandMaximal | None = None) -> SampledFunction:
    """Grand maximal function of f (sup restricted to scales < 1 when local)."""
    op = operator if operator is not None else grand_maximal(f.dim, f.resolution)
    return op.apply(f, local=local)


def lusin_area_integral(f: SampledFunction,
                        operator: LusinArea | None = None) -> SampledFunction:
    """Lusin area integral of f over the default cone quadrature."""
    op = operator if operator is not None else lusin_area(f.dim, f.resolution)
    return op.apply(f)


def pointwise_commutator_naive(T, b: SampledFunction, f: SampledFunction) -> SampledFunction:
    """Literal per-evaluation-point commutator x -> T((b(x)-b(.)) f(.))(x).

    Costs one operator application per grid point; used as the reference
    oracle for the algebraically expanded fast paths.
    """
    out = np.zeros_like(f.values)
    it = np.ndindex(f.values.shape)
    for idx in it:
        shifted = SampledFunction((b.values[idx] - b.values) * f.values)
        out[idx] = T.apply(shifted).values[idx]
    return SampledFunction(out)
