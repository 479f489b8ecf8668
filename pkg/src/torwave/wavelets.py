"""Periodized compactly supported orthonormal wavelet bases on the torus.

Coefficients follow the grid-L2 convention: a detail coefficient stored in a
tree equals the grid inner product of the function with the corresponding
discrete wavelet, and the synthesized wavelet of a unit coefficient has grid
L2 norm exactly 1.  All transforms are circular, so analysis/synthesis is an
orthogonal map and reconstruction is exact to roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .core import DyadicCube, SampledFunction
from .errors import ConfigurationError, DomainError, ResolutionError, ShapeError

# Detail (high-pass) filters for the standard minimum-phase Daubechies family,
# order = number of vanishing moments, filter length 2*order.
_DETAIL_TAPS = {
    1: [-0.7071067811865476, 0.7071067811865476],
    2: [-0.48296291314469025, 0.836516303737469, -0.22414386804185735,
        -0.12940952255092145],
    3: [-0.3326705529509569, 0.8068915093133388, -0.4598775021193313,
        -0.13501102001039084, 0.08544127388224149, 0.035226291882100656],
    4: [-0.23037781330885523, 0.7148465705525415, -0.6308807679295904,
        -0.02798376941698385, 0.18703481171888114, 0.030841381835986965,
        -0.032883011666982945, -0.010597401784997278],
    5: [-0.160102397974125, 0.6038292697974729, -0.7243085284385744,
        0.13842814590110342, 0.24229488706619015, -0.03224486958502952,
        -0.07757149384006515, -0.006241490213011705, 0.012580751999015526,
        0.003335725285001549],
    6: [-0.11154074335008017, 0.4946238903983854, -0.7511339080215775,
        0.3152503517092432, 0.22626469396516913, -0.12976686756709563,
        -0.09750160558707936, 0.02752286553001629, 0.031582039318031156,
        0.0005538422009938016, -0.004777257511010651, -0.00107730108499558],
    7: [-0.07785205408506236, 0.39653931948230575, -0.7291320908465551,
        0.4697822874053586, 0.14390600392910627, -0.22403618499416572,
        -0.07130921926705004, 0.0806126091510659, 0.03802993693503463,
        -0.01657454163101562, -0.012550998556013784, 0.00042957797300470274,
        0.0018016407039998328, 0.0003537138000010399],
    8: [-0.05441584224308161, 0.3128715909144659, -0.6756307362980128,
        0.5853546836548691, 0.015829105256023893, -0.2840155429624281,
        -0.00047248457399797254, 0.128747426620186, 0.01736930100202211,
        -0.04408825393106472, -0.013981027917015516, 0.008746094047015655,
        0.00487035299301066, -0.0003917403729959771, -0.0006754494059985568,
        -0.00011747678400228192],
    9: [-0.03807794736316728, 0.24383467463766728, -0.6048231236767786,
        0.6572880780366389, -0.13319738582208895, -0.29327378327258685,
        0.09684078322087904, 0.14854074933476008, -0.030725681478322865,
        -0.06763282905952399, -0.00025094711499193845, 0.022361662123515244,
        0.004723204757894831, -0.004281503681904723, -0.0018476468829611268,
        0.00023038576399541288, 0.0002519631889981789, 3.9347319995026124e-05],
    10: [-0.026670057900950818, 0.18817680007762133, -0.5272011889309198,
         0.6884590394525921, -0.2811723436604265, -0.24984642432648865,
         0.19594627437659665, 0.12736934033574265, -0.09305736460380659,
         -0.07139414716586077, 0.02945753682194567, 0.03321267405893324,
         -0.0036065535669883944, -0.010733175482979604, -0.0013953517469940798,
         0.00199240529499085, 0.0006858566950046825, -0.0001164668549943862,
         -9.358867000108985e-05, -1.326420300235487e-05],
}

MAX_DAUBECHIES_ORDER = max(_DETAIL_TAPS)


@dataclass(frozen=True, eq=False)
class WaveletBasis:
    """Quadrature-mirror filter pair with its derived metadata."""

    family: str
    order: int
    scaling_filter: np.ndarray = field(repr=False)
    detail_filter: np.ndarray = field(repr=False)
    support_factor: float
    vanishing_moments: int

    def __post_init__(self):
        for name in ("scaling_filter", "detail_filter"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    # identity is (family, order); the filters are a pure function of it
    def __eq__(self, other):
        return (isinstance(other, WaveletBasis)
                and (self.family, self.order) == (other.family, other.order))

    def __hash__(self):
        return hash((self.family, self.order))

    def __repr__(self):
        return f"WaveletBasis({self.family}, order={self.order})"


def _constraint_residuals(h: np.ndarray, order: int) -> np.ndarray:
    """Defining equations of the order-p Daubechies scaling taps (zero at solution)."""
    L = len(h)
    rows = [np.dot(h[: L - s], h[s:]) - (1.0 if s == 0 else 0.0)
            for s in range(0, L, 2)]
    rows.append(h.sum() - math.sqrt(2.0))
    g = ((-1.0) ** np.arange(L)) * h[::-1]
    k = np.arange(L) / L
    rows.extend(np.dot(k ** p, g) for p in range(order))
    return np.array(rows)


def _refine_taps(h: np.ndarray, order: int) -> np.ndarray:
    """Polish tabulated taps to machine precision by Gauss-Newton on the constraints."""
    h = h.astype(float).copy()
    for _ in range(4):
        res = _constraint_residuals(h, order)
        if np.max(np.abs(res)) < 1e-15:
            break
        jac = np.empty((len(res), len(h)))
        eps = 1e-7
        for i in range(len(h)):
            bump = np.zeros_like(h)
            bump[i] = eps
            jac[:, i] = (_constraint_residuals(h + bump, order)
                         - _constraint_residuals(h - bump, order)) / (2 * eps)
        h -= np.linalg.lstsq(jac, res, rcond=None)[0]
    return h


_REFINED_SCALING_TAPS: dict[int, np.ndarray] = {}


def _scaling_taps(order: int) -> np.ndarray:
    if order not in _REFINED_SCALING_TAPS:
        raw = np.array([(-1.0) ** (i + 1) * v
                        for i, v in enumerate(_DETAIL_TAPS[order])])
        _REFINED_SCALING_TAPS[order] = _refine_taps(raw, order)
    return _REFINED_SCALING_TAPS[order]


def build_basis(family: str, order: int) -> WaveletBasis:
    """Construct a haar or daubechies(order) basis and check its filter identities."""
    if family == "haar":
        if order != 1:
            raise ConfigurationError(f"haar admits only order 1, got order={order}")
    elif family == "daubechies":
        if order not in _DETAIL_TAPS:
            raise ConfigurationError(
                f"daubechies order must be in 1..{MAX_DAUBECHIES_ORDER}, got {order}")
    else:
        raise ConfigurationError(f"unsupported wavelet family {family!r}")

    h = _scaling_taps(1 if family == "haar" else order)
    L = len(h)
    g = np.array([(-1.0) ** m * h[L - 1 - m] for m in range(L)])

    basis = WaveletBasis(
        family=family,
        order=order,
        scaling_filter=h,
        detail_filter=g,
        support_factor=float(2 * L - 3) if L > 2 else 1.0,
        vanishing_moments=order,
    )
    _check_filters(basis)
    return basis


def _check_filters(basis: WaveletBasis):
    h, g = basis.scaling_filter, basis.detail_filter
    L = len(h)
    for shift in range(0, L, 2):
        target = 1.0 if shift == 0 else 0.0
        if abs(np.dot(h[: L - shift], h[shift:]) - target) > 1e-12:
            raise ConfigurationError(f"{basis}: filter fails orthonormality at shift {shift}")
    if abs(h.sum() - math.sqrt(2.0)) > 1e-12:
        raise ConfigurationError(f"{basis}: scaling taps do not sum to sqrt(2)")
    if abs(g.sum()) > 1e-12:
        raise ConfigurationError(f"{basis}: detail taps do not sum to 0")
    if basis.order >= 2 and abs(np.dot(np.arange(L), g)) > 1e-10:
        raise ConfigurationError(f"{basis}: first discrete moment of detail taps not 0")


def min_coarse_level(basis: WaveletBasis) -> int:
    """Smallest coarse level with exact circular orthogonality.

    The coarsest transform step circularly convolves an array of 2^(j0+1)
    entries; the filter must not wrap onto itself, i.e. len <= 2^(j0+1).
    """
    L = len(basis.scaling_filter)
    return max(0, (L - 1).bit_length() - 1)


def default_coarse_level(basis: WaveletBasis) -> int:
    return max(2, min_coarse_level(basis))


def sigma_set(dim: int) -> tuple[tuple[int, ...], ...]:
    """Detail orientations: all 0/1 tuples of length dim except all zeros."""
    if dim == 1:
        return ((1,),)
    if dim == 2:
        return ((0, 1), (1, 0), (1, 1))
    raise DomainError(f"dim must be 1 or 2, got {dim}")


# ---------------------------------------------------------------------------
# circular filter-bank steps
# ---------------------------------------------------------------------------

def _down(a: np.ndarray, taps: np.ndarray, axis: int) -> np.ndarray:
    """Circular convolution with `taps` followed by dyadic decimation."""
    keep = [slice(None)] * a.ndim
    keep[axis] = slice(0, None, 2)
    keep = tuple(keep)
    acc = taps[0] * a[keep]
    for m in range(1, len(taps)):
        acc = acc + taps[m] * np.roll(a, -m, axis=axis)[keep]
    return acc


def _up_pair(lo: np.ndarray, hi: np.ndarray, h: np.ndarray, g: np.ndarray,
             axis: int) -> np.ndarray:
    """Adjoint of `_down` for both channels: upsample, filter, add."""
    shape = list(lo.shape)
    shape[axis] *= 2
    write = [slice(None)] * lo.ndim
    write[axis] = slice(0, None, 2)
    write = tuple(write)
    u = np.zeros(shape)
    u[write] = lo
    w = np.zeros(shape)
    w[write] = hi
    acc = h[0] * u + g[0] * w
    for m in range(1, len(h)):
        acc = acc + h[m] * np.roll(u, m, axis=axis) + g[m] * np.roll(w, m, axis=axis)
    return acc


def _step_down(s: np.ndarray, basis: WaveletBasis):
    """One analysis step: scaling array at level j+1 -> (level-j scaling, details)."""
    h, g = basis.scaling_filter, basis.detail_filter
    if s.ndim == 1:
        return _down(s, h, 0), {(1,): _down(s, g, 0)}
    lo0 = _down(s, h, 0)
    hi0 = _down(s, g, 0)
    return _down(lo0, h, 1), {
        (0, 1): _down(lo0, g, 1),
        (1, 0): _down(hi0, h, 1),
        (1, 1): _down(hi0, g, 1),
    }


def _step_up(s: np.ndarray, details: dict, basis: WaveletBasis) -> np.ndarray:
    """One synthesis step, exact inverse of `_step_down`."""
    h, g = basis.scaling_filter, basis.detail_filter
    if s.ndim == 1:
        return _up_pair(s, details[(1,)], h, g, 0)
    lo0 = _up_pair(s, details[(0, 1)], h, g, 1)
    hi0 = _up_pair(details[(1, 0)], details[(1, 1)], h, g, 1)
    return _up_pair(lo0, hi0, h, g, 0)


def _zero_details(dim: int, level: int) -> dict:
    shape = (1 << level,) * dim
    return {s: np.zeros(shape) for s in sigma_set(dim)}


# ---------------------------------------------------------------------------
# coefficient trees
# ---------------------------------------------------------------------------

class CoefficientTree:
    """Scaling coefficients at one coarse level plus detail layers up to J-1."""

    __slots__ = ("dim", "coarse_level", "finest_level", "scaling", "details")

    def __init__(self, dim: int, coarse_level: int, finest_level: int,
                 scaling: np.ndarray, details: dict):
        if dim not in (1, 2):
            raise DomainError(f"dim must be 1 or 2, got {dim}")
        if not 0 <= coarse_level < finest_level:
            raise ResolutionError(
                f"need 0 <= coarse_level < finest_level, got {coarse_level}, {finest_level}")
        self.dim = dim
        self.coarse_level = coarse_level
        self.finest_level = finest_level
        scaling = np.array(scaling, dtype=float)
        if scaling.shape != (1 << coarse_level,) * dim:
            raise ShapeError(f"scaling array has shape {scaling.shape}")
        scaling.flags.writeable = False
        self.scaling = scaling
        sigs = sigma_set(dim)
        out = {}
        for j in range(coarse_level, finest_level):
            layer = {}
            for s in sigs:
                arr = np.array(details[j][s], dtype=float)
                if arr.shape != (1 << j,) * dim:
                    raise ShapeError(f"detail layer {j}/{s} has shape {arr.shape}")
                arr.flags.writeable = False
                layer[s] = arr
            out[j] = layer
        self.details = out

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zeros(cls, dim: int, coarse_level: int, finest_level: int) -> "CoefficientTree":
        scaling = np.zeros((1 << coarse_level,) * dim)
        details = {j: _zero_details(dim, j) for j in range(coarse_level, finest_level)}
        return cls(dim, coarse_level, finest_level, scaling, details)

    @classmethod
    def unit_detail(cls, cube: DyadicCube, sigma: tuple, coarse_level: int,
                    finest_level: int) -> "CoefficientTree":
        tree = cls.zeros(cube.dim, coarse_level, finest_level)
        d = tree.mutable_details()
        d[cube.level][tuple(sigma)][cube.offset] = 1.0
        return cls(cube.dim, coarse_level, finest_level, tree.scaling, d)

    def replace(self, scaling=None, details=None) -> "CoefficientTree":
        return CoefficientTree(
            self.dim, self.coarse_level, self.finest_level,
            self.scaling if scaling is None else scaling,
            self.details if details is None else details,
        )

    def mutable_details(self) -> dict:
        return {j: {s: a.copy() for s, a in layer.items()}
                for j, layer in self.details.items()}

    # -- accessors ------------------------------------------------------------

    @property
    def resolution(self) -> int:
        return 1 << self.finest_level

    def levels(self) -> range:
        return range(self.coarse_level, self.finest_level)

    def detail(self, cube: DyadicCube, sigma: tuple) -> float:
        return float(self.details[cube.level][tuple(sigma)][cube.offset])

    def scaling_coeff(self, cube: DyadicCube) -> float:
        if cube.level != self.coarse_level:
            raise ShapeError(f"scaling coefficients live at level {self.coarse_level}")
        return float(self.scaling[cube.offset])

    def iter_details(self, threshold: float = 0.0):
        """Yield (cube, sigma, value) with |value| > threshold, in fixed order."""
        for j in self.levels():
            for s in sigma_set(self.dim):
                arr = self.details[j][s]
                for idx in np.argwhere(np.abs(arr) > threshold):
                    off = tuple(int(i) for i in idx)
                    yield DyadicCube(self.dim, j, off), s, float(arr[off])

    def energy(self) -> float:
        total = float(np.sum(self.scaling ** 2))
        return total + self.detail_energy()

    def detail_energy(self) -> float:
        return float(sum(np.sum(a ** 2) for layer in self.details.values()
                         for a in layer.values()))

    # -- linear structure -----------------------------------------------------

    def _binary(self, other, op):
        if (self.dim, self.coarse_level, self.finest_level) != \
                (other.dim, other.coarse_level, other.finest_level):
            raise ShapeError("tree layouts do not match")
        details = {j: {s: op(self.details[j][s], other.details[j][s])
                       for s in self.details[j]} for j in self.details}
        return CoefficientTree(self.dim, self.coarse_level, self.finest_level,
                               op(self.scaling, other.scaling), details)

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, c):
        c = float(c)
        details = {j: {s: c * a for s, a in layer.items()}
                   for j, layer in self.details.items()}
        return CoefficientTree(self.dim, self.coarse_level, self.finest_level,
                               c * self.scaling, details)

    __rmul__ = __mul__

    def __repr__(self):
        return (f"CoefficientTree(dim={self.dim}, j0={self.coarse_level}, "
                f"J={self.finest_level})")


def same_layout(*trees: CoefficientTree) -> None:
    ref = (trees[0].dim, trees[0].coarse_level, trees[0].finest_level)
    for t in trees[1:]:
        if (t.dim, t.coarse_level, t.finest_level) != ref:
            raise ShapeError("tree layouts do not match")


# ---------------------------------------------------------------------------
# analysis / synthesis
# ---------------------------------------------------------------------------

def _require_valid_levels(basis: WaveletBasis, coarse_level: int, finest_level: int):
    if not 0 <= coarse_level < finest_level:
        raise ResolutionError(
            f"need 0 <= coarse_level < J, got {coarse_level} and J={finest_level}")
    L = len(basis.scaling_filter)
    if L > 1 << (coarse_level + 1):
        raise ResolutionError(
            f"filter length {L} wraps on the coarsest step; "
            f"need coarse_level >= {min_coarse_level(basis)} for {basis}")


def analyze(f: SampledFunction, basis: WaveletBasis,
            coarse_level: int | None = None) -> CoefficientTree:
    """Decompose a sampled function into its coefficient tree."""
    J = f.finest_level
    j0 = default_coarse_level(basis) if coarse_level is None else coarse_level
    _require_valid_levels(basis, j0, J)
    s = f.values * float(f.resolution) ** (-f.dim / 2.0)
    details = {}
    for j in range(J - 1, j0 - 1, -1):
        s, details[j] = _step_down(s, basis)
    return CoefficientTree(f.dim, j0, J, s, details)


def synthesize(tree: CoefficientTree, basis: WaveletBasis) -> SampledFunction:
    """Reconstruct the sampled function from its coefficient tree."""
    _require_valid_levels(basis, tree.coarse_level, tree.finest_level)
    s = tree.scaling
    for j in tree.levels():
        s = _step_up(s, tree.details[j], basis)
    return SampledFunction(s * float(tree.resolution) ** (tree.dim / 2.0))


def scaling_cascade(tree: CoefficientTree, basis: WaveletBasis) -> dict:
    """Scaling coefficient arrays at every level j0..J (J entry reproduces f)."""
    out = {tree.coarse_level: tree.scaling}
    s = tree.scaling
    for j in tree.levels():
        s = _step_up(s, tree.details[j], basis)
        out[j + 1] = s
    return out


def projection_stack(tree: CoefficientTree, basis: WaveletBasis) -> dict:
    """Sampled scaling-space projections P_j f for j = j0..J.

    P_J f equals the synthesized function exactly; successive differences
    P_{j+1}f - P_j f are the sampled detail layers.
    """
    cascade = scaling_cascade(tree, basis)
    scale = float(tree.resolution) ** (tree.dim / 2.0)
    out = {}
    for j in range(tree.coarse_level, tree.finest_level + 1):
        s = cascade[j]
        for jj in range(j, tree.finest_level):
            s = _step_up(s, _zero_details(tree.dim, jj), basis)
        out[j] = s * scale
    return out


@lru_cache(maxsize=512)
def mother_wavelet(basis: WaveletBasis, dim: int, finest_level: int, level: int,
                   sigma: tuple) -> np.ndarray:
    """Sampled wavelet of a unit coefficient at offset 0 (read-only array).

    Every same-level wavelet is a circular shift of this one by multiples of
    N / 2^level grid cells per axis.
    """
    cube = DyadicCube(dim, level, (0,) * dim)
    tree = CoefficientTree.unit_detail(cube, sigma, level, finest_level)
    vals = synthesize(tree, basis).values
    vals.flags.writeable = False
    return vals


def sampled_wavelet(basis: WaveletBasis, finest_level: int, cube: DyadicCube,
                    sigma: tuple) -> np.ndarray:
    base = mother_wavelet(basis, cube.dim, finest_level, cube.level, tuple(sigma))
    shift = tuple(k * ((1 << finest_level) >> cube.level) for k in cube.offset)
    return np.roll(base, shift, axis=tuple(range(cube.dim)))


# ---------------------------------------------------------------------------
# square function and psi-atoms
# ---------------------------------------------------------------------------

def _expand(arr: np.ndarray, factor: int) -> np.ndarray:
    """Blow a level array up to the sampling grid (piecewise constant)."""
    out = arr
    for axis in range(arr.ndim):
        out = np.repeat(out, factor, axis=axis)
    return out


def wavelet_square_function(tree: CoefficientTree) -> SampledFunction:
    """Pointwise l2 aggregate of detail coefficients weighted by 1/|I| on each cube."""
    N = tree.resolution
    acc = np.zeros((N,) * tree.dim)
    for j in tree.levels():
        sq = sum(a ** 2 for a in tree.details[j].values())
        acc += _expand(sq, N >> j) * 2.0 ** (j * tree.dim)
    return SampledFunction(np.sqrt(acc))


@dataclass(frozen=True)
class PsiAtomCheck:
    """Outcome of a psi-atom validation with the offending data when it fails."""

    ok: bool
    coeff_l2: float
    budget: float
    bad_cubes: tuple
    scaling_max: float

    def __bool__(self):
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return f"psi-atom ok: coefficient l2 {self.coeff_l2:.6g} within {self.budget:.6g}"
        parts = []
        if self.scaling_max > 0:
            parts.append(f"scaling coefficients present (max {self.scaling_max:.3g})")
        if self.bad_cubes:
            listed = ", ".join(c.key() for c in self.bad_cubes[:8])
            parts.append(f"coefficients outside the cube on: {listed}")
        if self.coeff_l2 > self.budget:
            parts.append(f"coefficient l2 {self.coeff_l2:.6g} exceeds budget {self.budget:.6g}")
        return "psi-atom violations: " + "; ".join(parts)


def validate_psi_atom(tree: CoefficientTree, R: DyadicCube,
                      tol: float = 1e-10) -> PsiAtomCheck:
    """Check that a tree is a unit-budget wavelet packet supported inside R."""
    if R.level < 0 or R.dim != tree.dim:
        raise ShapeError("cube dimension does not match the tree")
    l2 = math.sqrt(tree.detail_energy())
    zero_tol = 1e-12 * (1.0 + l2)
    scaling_max = float(np.max(np.abs(tree.scaling))) if tree.scaling.size else 0.0
    bad = []
    for j in tree.levels():
        inside = _inside_mask(tree.dim, j, R)
        for s, arr in tree.details[j].items():
            hit = np.abs(arr) > zero_tol
            if inside is not None:
                hit &= ~inside
            for idx in np.argwhere(hit):
                bad.append(DyadicCube(tree.dim, j, tuple(int(i) for i in idx)))
    budget = R.measure ** -0.5 * (1.0 + tol)
    ok = (not bad) and scaling_max <= zero_tol and l2 <= budget
    return PsiAtomCheck(ok, l2, budget, tuple(bad), 0.0 if scaling_max <= zero_tol else scaling_max)


def _inside_mask(dim: int, level: int, R: DyadicCube):
    """Boolean array over level-`level` offsets marking cubes contained in R."""
    if level < R.level:
        return np.zeros((1 << level,) * dim, dtype=bool)
    shift = level - R.level
    axes = []
    for k in R.offset:
        idx = np.arange(1 << level) >> shift
        axes.append(idx == k)
    if dim == 1:
        return axes[0]
    return np.logical_and.outer(axes[0], axes[1])
