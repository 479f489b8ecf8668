"""Grid primitives: dyadic cubes and sampled functions on the unit torus [0,1)^n."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError


@dataclass(frozen=True)
class DyadicCube:
    """Dyadic cube of side 2**-level identified by per-axis integer offsets."""

    dim: int
    level: int
    offset: tuple[int, ...]

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise DomainError(f"dim must be 1 or 2, got {self.dim}")
        if self.level < 0:
            raise DomainError(f"level must be >= 0, got {self.level}")
        off = tuple(int(k) for k in self.offset)
        object.__setattr__(self, "offset", off)
        if len(off) != self.dim:
            raise ShapeError(f"offset {off} has {len(off)} entries, dim is {self.dim}")
        top = 1 << self.level
        for k in off:
            if not 0 <= k < top:
                raise DomainError(f"offset {off} outside [0, 2^{self.level}) per axis")

    @property
    def side(self) -> float:
        return 2.0 ** (-self.level)

    @property
    def measure(self) -> float:
        return 2.0 ** (-self.level * self.dim)

    @property
    def center(self) -> tuple[float, ...]:
        return tuple((k + 0.5) * self.side for k in self.offset)

    def contains(self, other: "DyadicCube") -> bool:
        """Dyadic containment: other is a descendant of (or equal to) this cube."""
        if other.dim != self.dim or other.level < self.level:
            return False
        shift = other.level - self.level
        return all((ko >> shift) == ks for ko, ks in zip(other.offset, self.offset))

    def ancestor(self, level: int) -> "DyadicCube":
        if level > self.level:
            raise DomainError("ancestor level must be <= cube level")
        shift = self.level - level
        return DyadicCube(self.dim, level, tuple(k >> shift for k in self.offset))

    def grid_slices(self, resolution: int) -> tuple[slice, ...]:
        """Index slices selecting this cube's cells on a 2^J grid."""
        step = resolution >> self.level
        if step == 0:
            raise ShapeError(f"cube level {self.level} finer than resolution {resolution}")
        return tuple(slice(k * step, (k + 1) * step) for k in self.offset)

    def key(self) -> str:
        """Stable text key 'level:offsets' used by triplet exports."""
        return f"{self.level}:" + ",".join(str(k) for k in self.offset)


class SampledFunction:
    """Real function sampled on the uniform 2^J grid of the unit torus.

    Values are stored as an n-dimensional float array of shape (N,)*n with
    N a power of two; grid point i corresponds to x = i/N per axis.
    """

    __slots__ = ("values",)

    def __init__(self, values):
        v = np.asarray(values, dtype=float)
        if v.ndim not in (1, 2):
            raise DomainError(f"only dimensions 1 and 2 are supported, got ndim={v.ndim}")
        n = v.shape[0]
        if n & (n - 1) or any(s != n for s in v.shape):
            raise ShapeError(f"grid must be square with power-of-two side, got shape {v.shape}")
        v = v.copy()
        v.flags.writeable = False
        self.values = v

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def resolution(self) -> int:
        return self.values.shape[0]

    @property
    def finest_level(self) -> int:
        return int(self.resolution).bit_length() - 1

    def mean(self) -> float:
        return float(self.values.mean())

    def integral(self) -> float:
        # cell measure is N^-n, so the grid integral is the plain mean
        return self.mean()

    # -- arithmetic (pointwise; scalars broadcast) ----------------------------

    def _coerce(self, other):
        if isinstance(other, SampledFunction):
            if other.values.shape != self.values.shape:
                raise ShapeError("mismatched resolutions")
            return other.values
        return other

    def __add__(self, other):
        return SampledFunction(self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return SampledFunction(self.values - self._coerce(other))

    def __rsub__(self, other):
        return SampledFunction(self._coerce(other) - self.values)

    def __mul__(self, other):
        return SampledFunction(self.values * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return SampledFunction(-self.values)

    def __abs__(self):
        return SampledFunction(np.abs(self.values))

    def __repr__(self):
        return f"SampledFunction(dim={self.dim}, N={self.resolution})"


def zeros(dim: int, resolution: int) -> SampledFunction:
    return SampledFunction(np.zeros((resolution,) * dim))


def constant(dim: int, resolution: int, value: float) -> SampledFunction:
    return SampledFunction(np.full((resolution,) * dim, float(value)))


def grid_coordinates(dim: int, resolution: int) -> tuple[np.ndarray, ...]:
    """Meshgrid coordinate arrays (each of shape (N,)*n) for the sampling lattice."""
    axis = np.arange(resolution) / resolution
    if dim == 1:
        return (axis,)
    return tuple(np.meshgrid(axis, axis, indexing="ij"))


def torus_delta(a, b):
    """Per-axis geodesic distance on the unit torus, vectorized."""
    d = np.abs(np.asarray(a) - np.asarray(b)) % 1.0
    return np.minimum(d, 1.0 - d)


def torus_distance(x, y) -> float:
    """Euclidean geodesic distance between two points of the torus."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    return float(np.sqrt(np.sum(torus_delta(x, y) ** 2)))


def distance_field(dim: int, resolution: int, center) -> np.ndarray:
    """Grid array of torus distances from each grid point to `center`."""
    c = np.atleast_1d(np.asarray(center, dtype=float))
    coords = grid_coordinates(dim, resolution)
    sq = np.zeros((resolution,) * dim)
    for axis in range(dim):
        sq += torus_delta(coords[axis], c[axis]) ** 2
    return np.sqrt(sq)


def inner(f: SampledFunction, g: SampledFunction) -> float:
    """Grid L2 inner product (Riemann sum with cell measure N^-n)."""
    if f.values.shape != g.values.shape:
        raise ShapeError("mismatched resolutions")
    return float((f.values * g.values).mean())


def sup_norm(f: SampledFunction) -> float:
    return float(np.max(np.abs(f.values)))


def cube_mask(cube: DyadicCube, resolution: int) -> np.ndarray:
    """Boolean indicator of the cube's cells on the grid."""
    mask = np.zeros((resolution,) * cube.dim, dtype=bool)
    mask[cube.grid_slices(resolution)] = True
    return mask


def all_cubes(dim: int, level: int):
    """Iterate the 2^(level*dim) dyadic cubes of one level in lexicographic order."""
    top = 1 << level
    if dim == 1:
        for k in range(top):
            yield DyadicCube(1, level, (k,))
    else:
        for k0 in range(top):
            for k1 in range(top):
                yield DyadicCube(2, level, (k0, k1))
