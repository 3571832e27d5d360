"""Sampled elements of the domain algebras.

A dimension-drop element is a matrix function on [0, 1] whose endpoint values
have scalar (or l x l) tensor form; it is stored on a sample grid together
with its small endpoint blocks, and evaluated by linear interpolation.  The
underline evaluation returns the small endpoint block instead of the inflated
endpoint matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._linalg import opnorm, tensor_factor
from .errors import DomainError, MalformedRepresentationError

UNDER0 = "under0"
UNDER1 = "under1"

_ENDPOINT_TOL = 1e-8


def _merge_grid(extra: Sequence[float], num: int) -> np.ndarray:
    grid = np.unique(np.concatenate([np.linspace(0.0, 1.0, num), np.asarray(extra, float)]))
    return np.clip(grid, 0.0, 1.0)


@dataclass(frozen=True)
class DimensionDropElement:
    """Element of M_l(I_k): lk x lk samples with l x l endpoint blocks."""

    k: int
    l: int
    grid: np.ndarray
    values: np.ndarray
    a: np.ndarray
    b: np.ndarray
    name: str = ""

    def __post_init__(self):
        lk = self.l * self.k
        if self.values.shape != (self.grid.size, lk, lk):
            raise MalformedRepresentationError("sample array shape mismatch")
        if self.grid[0] != 0.0 or self.grid[-1] != 1.0:
            raise MalformedRepresentationError("grid must span [0, 1]")
        eye = np.eye(self.k)
        for end, blk in ((0, self.a), (-1, self.b)):
            if blk.shape != (self.l, self.l):
                raise MalformedRepresentationError("endpoint block has wrong size")
            if opnorm(self.values[end] - np.kron(blk, eye)) > _ENDPOINT_TOL:
                raise MalformedRepresentationError(
                    "endpoint sample is not the inflation of its boundary block"
                )

    @property
    def size(self) -> int:
        return self.l * self.k

    def eval(self, t: float) -> np.ndarray:
        """Full-size value at t by linear interpolation of the samples."""
        t = float(t)
        if t <= 0.0:
            return self.values[0]
        if t >= 1.0:
            return self.values[-1]
        j = int(np.searchsorted(self.grid, t))
        t0, t1 = self.grid[j - 1], self.grid[j]
        lam = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
        return (1.0 - lam) * self.values[j - 1] + lam * self.values[j]

    def eval_underline(self, t) -> np.ndarray:
        if t == UNDER0:
            return self.a
        if t == UNDER1:
            return self.b
        return self.eval(t)

    def osc_within(self, lo: float, hi: float) -> float:
        """sup of ||f(s) - f(t)|| over the sampled window [lo, hi]."""
        sel = (self.grid >= lo - 1e-15) & (self.grid <= hi + 1e-15)
        pts = self.values[sel]
        if pts.shape[0] < 2:
            return 0.0
        worst = 0.0
        for i in range(pts.shape[0]):
            for j in range(i + 1, pts.shape[0]):
                worst = max(worst, opnorm(pts[i] - pts[j]))
        return worst

    def deviation_from_zero_end(self, hi: float) -> float:
        """sup over [0, hi] of ||f(t) - f(0)||, the cap estimate driver."""
        sel = self.grid <= hi + 1e-15
        return max(opnorm(v - self.values[0]) for v in self.values[sel])

    def deviation_from_one_end(self, lo: float) -> float:
        sel = self.grid >= lo - 1e-15
        return max(opnorm(v - self.values[-1]) for v in self.values[sel])

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return all(opnorm(v - v.conj().T) <= tol for v in self.values)

    @classmethod
    def from_callable(
        cls,
        fn: Callable[[float], np.ndarray],
        k: int,
        l: int = 1,
        num: int = 257,
        breakpoints: Sequence[float] = (),
        name: str = "",
    ) -> "DimensionDropElement":
        grid = _merge_grid(breakpoints, num)
        values = np.stack([np.asarray(fn(t), dtype=complex) for t in grid])
        a, ra = tensor_factor(values[0], k)
        bblk, rb = tensor_factor(values[-1], k)
        if max(ra, rb) > _ENDPOINT_TOL:
            raise MalformedRepresentationError(
                "callable violates the endpoint tensor constraint"
            )
        return cls(k=k, l=l, grid=grid, values=values, a=a, b=bblk, name=name)

    @classmethod
    def from_scalar(
        cls,
        fn: Callable[[float], complex],
        k: int,
        l: int = 1,
        num: int = 257,
        breakpoints: Sequence[float] = (),
        name: str = "",
    ) -> "DimensionDropElement":
        eye = np.eye(l * k, dtype=complex)
        return cls.from_callable(
            lambda t: complex(fn(t)) * eye, k=k, l=l, num=num, breakpoints=breakpoints, name=name
        )

    @classmethod
    def canonical_h(cls, k: int, l: int = 1, num: int = 129) -> "DimensionDropElement":
        """The central coordinate h(t) = t * identity."""
        return cls.from_scalar(lambda t: t, k=k, l=l, num=num, name="h")

    @classmethod
    def one(cls, k: int, l: int = 1) -> "DimensionDropElement":
        return cls.from_scalar(lambda t: 1.0, k=k, l=l, num=3, name="1")


def eval_underline(f: DimensionDropElement, t) -> np.ndarray:
    """Value of the irreducible representation at t, with underline endpoints."""
    return f.eval_underline(t)


@dataclass(frozen=True)
class FullMatrixElement:
    """Element of M_k(C[0,1]): no endpoint constraint."""

    k: int
    grid: np.ndarray
    values: np.ndarray
    name: str = ""

    def eval(self, t: float) -> np.ndarray:
        t = float(t)
        if t <= 0.0:
            return self.values[0]
        if t >= 1.0:
            return self.values[-1]
        j = int(np.searchsorted(self.grid, t))
        t0, t1 = self.grid[j - 1], self.grid[j]
        lam = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
        return (1.0 - lam) * self.values[j - 1] + lam * self.values[j]

    @classmethod
    def from_callable(cls, fn, k: int, num: int = 257, name: str = "") -> "FullMatrixElement":
        grid = np.linspace(0.0, 1.0, num)
        return cls(k=k, grid=grid, values=np.stack([np.asarray(fn(t), complex) for t in grid]), name=name)


def include_in_full(f: DimensionDropElement) -> FullMatrixElement:
    """Canonical inclusion of a dimension-drop element into M_{lk}(C[0,1])."""
    return FullMatrixElement(k=f.size, grid=f.grid, values=f.values, name=f.name)


@dataclass(frozen=True)
class TentFunction:
    """Piecewise-linear plateau: 1 on a closed set, 0 beyond reach, linear between."""

    intervals: tuple[tuple[float, float], ...]
    reach: float

    def __call__(self, t: float) -> float:
        d = min(self._dist(t, lo, hi) for lo, hi in self.intervals)
        if d <= 0.0:
            return 1.0
        if d >= self.reach:
            return 0.0
        return 1.0 - d / self.reach

    @staticmethod
    def _dist(t: float, lo: float, hi: float) -> float:
        if t < lo:
            return lo - t
        if t > hi:
            return t - hi
        return 0.0

    def breakpoints(self) -> list[float]:
        out = []
        for lo, hi in self.intervals:
            out.extend([lo - self.reach, lo, hi, hi + self.reach])
        return [min(max(x, 0.0), 1.0) for x in out]

    def element(self, k: int, l: int = 1, num: int = 257) -> DimensionDropElement:
        return DimensionDropElement.from_scalar(
            self, k=k, l=l, num=num, breakpoints=self.breakpoints(), name="tent"
        )


def test_function(intervals, eta: float, n: int) -> TentFunction:
    """Plateau function equal to 1 on the interval union, supported within
    distance eta/(12 n) of it."""
    if eta <= 0 or n < 1:
        raise DomainError("eta must be positive and n >= 1")
    ivs = tuple((float(lo), float(hi)) for lo, hi in intervals)
    if not ivs or any(hi < lo for lo, hi in ivs):
        raise DomainError("the closed set must be a nonempty union of intervals")
    return TentFunction(intervals=ivs, reach=eta / (12.0 * n))


class ComplexFunction:
    """Scalar function on a simplicial complex, wrapped with a name."""

    def __init__(self, fn: Callable, name: str = ""):
        self._fn = fn
        self.name = name

    def __call__(self, point) -> complex:
        return complex(self._fn(point))


def coordinate_functions(complex_) -> list[ComplexFunction]:
    """Chart-coordinate generators (requires a globally embedded complex)."""
    if complex_.vertex_positions is None:
        raise DomainError("complex carries no embedding for coordinate functions")

    def make(i):
        return ComplexFunction(lambda p: complex_.global_position(p)[i], name=f"x{i}")

    return [make(0), make(1)]
