"""Spectral multisets with fractional endpoint multiplicity.

A spectrum of a dimension-drop representation is a multiset on [0, 1] in
which interior points carry integer multiplicity while the endpoints carry
weight in units of 1/k.  The stored form keeps all endpoint mass as units
(end0_units = n0, end1_units = n1) and keeps interior points strictly inside
(0, 1); comparisons canonicalize to the reduced form k0 = n0 mod k, with the
excess endpoint units converted to interior points sitting at 0 or 1.

The distance between two multisets of the same (n, k) class is 1 when the
reduced endpoint unit counts differ, and otherwise the max elementwise gap of
the order-matched sorted value lists.  Pairing within eta over [0, 1] reduces
to the sorted elementwise comparison; over a simplicial complex it is a
bottleneck assignment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import BlockStructureError, ClassMismatchError, DomainError, MalformedRepresentationError


@dataclass(frozen=True)
class SpectralMultiset:
    """Point of the weight-n/k symmetric product of [0, 1]."""

    k: int
    end0_units: int
    end1_units: int
    interior: tuple[tuple[float, int], ...]

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        if self.end0_units < 0 or self.end1_units < 0:
            raise ValueError("endpoint unit counts must be nonnegative")
        last = 0.0
        for t, mult in self.interior:
            if not 0.0 < t < 1.0:
                raise ValueError(f"interior point {t} outside (0, 1)")
            if mult < 1:
                raise ValueError("interior multiplicity must be positive")
            if t <= last and last > 0.0:
                raise ValueError("interior points must be strictly increasing")
            last = t

    @property
    def total_n(self) -> int:
        return self.end0_units + self.k * sum(m for _, m in self.interior) + self.end1_units

    @property
    def weight(self) -> float:
        return self.total_n / self.k

    def reduced_endpoint_units(self) -> tuple[int, int]:
        return self.end0_units % self.k, self.end1_units % self.k

    def reduced_values(self) -> np.ndarray:
        """Sorted value list of the reduced form; 0/1 entries carry the excess."""
        k0 = self.end0_units % self.k
        k1 = self.end1_units % self.k
        vals = [0.0] * ((self.end0_units - k0) // self.k)
        for t, m in self.interior:
            vals.extend([t] * m)
        vals.extend([1.0] * ((self.end1_units - k1) // self.k))
        return np.array(sorted(vals))

    def expand(self) -> np.ndarray:
        """Eigenvalue list of the composition with the center C[0,1]."""
        vals = [0.0] * self.end0_units
        for t, m in self.interior:
            vals.extend([t] * (self.k * m))
        vals.extend([1.0] * self.end1_units)
        return np.array(vals)

    def weighted_points(self) -> list[tuple[float, float]]:
        """(value, weight) pairs; endpoint units weigh 1/k, interior 1 per mult."""
        pts = []
        if self.end0_units:
            pts.append((0.0, self.end0_units / self.k))
        pts.extend((t, float(m)) for t, m in self.interior)
        if self.end1_units:
            pts.append((1.0, self.end1_units / self.k))
        return pts

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "n": self.total_n,
            "end0_units": self.end0_units,
            "end1_units": self.end1_units,
            "interior": [[repr(float(t)), int(m)] for t, m in self.interior],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SpectralMultiset":
        ms = cls(
            k=int(data["k"]),
            end0_units=int(data["end0_units"]),
            end1_units=int(data["end1_units"]),
            interior=tuple((float(t), int(m)) for t, m in data["interior"]),
        )
        if "n" in data and ms.total_n != int(data["n"]):
            raise MalformedRepresentationError("total weight identity violated in JSON")
        return ms

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass(frozen=True)
class ComplexMultiset:
    """Multiset of points of a simplicial complex (or any metric space)."""

    points: tuple[tuple[object, int], ...]

    @property
    def total(self) -> int:
        return sum(m for _, m in self.points)

    def expanded(self) -> list[object]:
        out = []
        for x, m in self.points:
            out.extend([x] * m)
        return out


def _check_same_class(a: SpectralMultiset, b: SpectralMultiset) -> None:
    if a.k != b.k or a.total_n != b.total_n:
        raise ClassMismatchError(
            f"multisets in different classes: (n={a.total_n}, k={a.k}) vs (n={b.total_n}, k={b.k})"
        )


def pnk_distance(a: SpectralMultiset, b: SpectralMultiset) -> float:
    """Two-case metric on a fixed (n, k) class.

    Distance 1 when the reduced endpoint unit counts disagree; otherwise the
    max elementwise gap between the sorted reduced value lists.
    """
    _check_same_class(a, b)
    if a.reduced_endpoint_units() != b.reduced_endpoint_units():
        return 1.0
    va, vb = a.reduced_values(), b.reduced_values()
    if va.size != vb.size:
        raise ClassMismatchError("reduced value lists of different lengths")
    if va.size == 0:
        return 0.0
    return float(np.max(np.abs(va - vb)))


def bottleneck_matching(
    xs: Sequence[object],
    ys: Sequence[object],
    eta: float,
    dist: Callable[[object, object], float],
) -> Optional[list[tuple[int, int]]]:
    """Bijective matching with all matched distances < eta, or None.

    Feasibility at the threshold is decided by a perfect matching in the
    bipartite graph of pairs closer than eta (rectangular assignment on the
    thresholded cost).
    """
    n = len(xs)
    if n != len(ys):
        raise ClassMismatchError("multisets of different totals cannot be matched")
    if n == 0:
        return []
    d = np.array([[dist(x, y) for y in ys] for x in xs], dtype=float)
    cost = np.where(d < eta, 0.0, 1.0)
    rows, cols = linear_sum_assignment(cost)
    if cost[rows, cols].sum() > 0:
        return None
    return list(zip(rows.tolist(), cols.tolist()))


def bottleneck_value(
    xs: Sequence[object], ys: Sequence[object], dist: Callable[[object, object], float]
) -> float:
    """Minimal max matched distance over all bijections."""
    n = len(xs)
    if n != len(ys):
        raise ClassMismatchError("multisets of different totals cannot be matched")
    if n == 0:
        return 0.0
    d = np.array([[dist(x, y) for y in ys] for x in xs], dtype=float)
    values = np.unique(d)
    lo, hi = 0, values.size - 1
    # matching feasible with all distances <= values[idx]?
    def feasible(idx: int) -> bool:
        cost = np.where(d <= values[idx], 0.0, 1.0)
        r, c = linear_sum_assignment(cost)
        return cost[r, c].sum() == 0

    if feasible(0):
        return float(values[0])
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return float(values[hi])


def pair_within(a, b, eta: float):
    """Matching moving no element by eta or more, or None when impossible.

    For multisets over [0, 1] this is the sorted elementwise comparison; over
    a complex use ComplexMultiset and pass the metric through
    ``pair_within_complex``.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    if isinstance(a, SpectralMultiset) and isinstance(b, SpectralMultiset):
        _check_same_class(a, b)
        if a.reduced_endpoint_units() != b.reduced_endpoint_units():
            # distance is exactly 1 across reduced classes
            return None if eta <= 1.0 else []
        va, vb = a.reduced_values(), b.reduced_values()
        if va.size and float(np.max(np.abs(va - vb))) >= eta:
            return None
        return _sorted_pairs(va.size)
    if isinstance(a, ComplexMultiset) and isinstance(b, ComplexMultiset):
        raise DomainError("complex multisets need a metric: use pair_within_complex")
    # plain sequences of reals over [0, 1]
    xs = np.sort(np.asarray(a, dtype=float))
    ys = np.sort(np.asarray(b, dtype=float))
    if xs.size != ys.size:
        raise ClassMismatchError("multisets of different totals cannot be paired")
    if xs.size and float(np.max(np.abs(xs - ys))) >= eta:
        return None
    order_a = np.argsort(np.asarray(a, dtype=float), kind="stable")
    order_b = np.argsort(np.asarray(b, dtype=float), kind="stable")
    return list(zip(order_a.tolist(), order_b.tolist()))


def pair_within_complex(
    a: ComplexMultiset, b: ComplexMultiset, eta: float, dist: Callable[[object, object], float]
):
    if a.total != b.total:
        raise ClassMismatchError("multisets of different totals cannot be paired")
    return bottleneck_matching(a.expanded(), b.expanded(), eta, dist)


def _sorted_pairs(n: int) -> list[tuple[int, int]]:
    return [(j, j) for j in range(n)]


@dataclass(frozen=True)
class SdpReport:
    passed: bool
    eta: float
    delta: float
    min_count: float
    required: float
    worst_center: object
    worst_sample: int

    def to_json(self) -> dict:
        center = self.worst_center
        if isinstance(center, (np.floating, float)):
            center = float(center)
        else:
            center = repr(center)
        return {
            "passed": bool(self.passed),
            "eta": self.eta,
            "delta": self.delta,
            "min_count": self.min_count,
            "required": self.required,
            "worst_center": center,
            "worst_sample": int(self.worst_sample),
        }


def _interval_ball_min(points: list[tuple[float, float]], eta: float) -> tuple[float, float]:
    """(min occupancy, minimizing center) of open eta-balls over [0, 1].

    Occupancy is piecewise constant with breakpoints at value +- eta, so the
    exact minimum is attained on the breakpoint set, the midpoints between
    consecutive breakpoints, and a safety grid of step eta/10.
    """
    breaks = {0.0, 1.0}
    for v, _ in points:
        for b in (v - eta, v + eta, v):
            if 0.0 <= b <= 1.0:
                breaks.add(float(b))
    sb = sorted(breaks)
    centers = list(sb)
    centers.extend(0.5 * (x + y) for x, y in zip(sb, sb[1:]))
    centers.extend(np.arange(0.0, 1.0 + 1e-12, eta / 10.0).tolist())
    best = (np.inf, 0.0)
    for c in centers:
        occ = sum(w for v, w in points if abs(v - c) < eta)
        if occ < best[0]:
            best = (occ, c)
    return best


def check_sdp(hom, eta: float, delta: float) -> SdpReport:
    """Spectral distribution check: every open eta-ball of the domain spectrum
    captures at least a delta fraction of the spectrum at every codomain
    sample, counting (fractional) multiplicity.

    ``hom`` must expose ``all_spectra()`` and, for a complex domain,
    ``domain_grid()`` returning candidate ball centers with a metric.
    """
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    if eta <= 0:
        raise ValueError("eta must be positive")
    spectra = hom.all_spectra()
    if not spectra:
        raise MalformedRepresentationError("homomorphism carries no sampled spectra")
    best = None
    for idx, sp in enumerate(spectra):
        if isinstance(sp, SpectralMultiset):
            points = sp.weighted_points()
            if not points:
                raise MalformedRepresentationError(f"empty spectrum at sample {idx}")
            total = sp.weight
            occ, center = _interval_ball_min(points, eta)
        else:
            grid, dist = hom.domain_grid()
            pts = [(x, float(m)) for x, m in sp.points]
            if not pts:
                raise MalformedRepresentationError(f"empty spectrum at sample {idx}")
            total = float(sp.total)
            occ, center = np.inf, None
            for c in grid:
                o = sum(w for x, w in pts if dist(x, c) < eta)
                if o < occ:
                    occ, center = o, c
        required = delta * total
        margin = occ - required
        if best is None or margin < best[0]:
            best = (margin, occ, required, center, idx)
    margin, occ, required, center, idx = best
    return SdpReport(
        passed=bool(occ >= required),
        eta=eta,
        delta=delta,
        min_count=float(occ),
        required=float(required),
        worst_center=center,
        worst_sample=idx,
    )


def fractionalize(
    eigenvalues: Sequence[float], k: int, tol_end: float = 1e-9
) -> SpectralMultiset:
    """Fold an eigenvalue list into a fractional multiset.

    Values within tol_end of an endpoint become endpoint units of weight 1/k;
    the remaining interior values must come in groups of k equal values
    (within tol_end), each group contributing one interior point.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    vals = np.sort(np.asarray(eigenvalues, dtype=float))
    if vals.size == 0:
        raise DomainError("empty eigenvalue list")
    if vals[0] < -tol_end or vals[-1] > 1.0 + tol_end:
        raise DomainError("eigenvalues outside [-tol_end, 1 + tol_end]")
    n0 = int(np.sum(vals <= tol_end))
    n1 = int(np.sum(vals >= 1.0 - tol_end))
    inner = vals[n0 : vals.size - n1]
    if inner.size % k:
        raise BlockStructureError(
            f"interior eigenvalue count {inner.size} not divisible by k={k}"
        )
    groups = []
    for j in range(0, inner.size, k):
        block = inner[j : j + k]
        if block[-1] - block[0] > tol_end:
            raise BlockStructureError(
                f"eigenvalue block spread {block[-1] - block[0]:.3g} exceeds tol_end"
            )
        groups.append(float(np.mean(block)))
    interior: list[tuple[float, int]] = []
    for g in groups:
        if interior and g - interior[-1][0] <= tol_end:
            interior[-1] = (interior[-1][0], interior[-1][1] + 1)
        else:
            interior.append((g, 1))
    return SpectralMultiset(
        k=k, end0_units=n0, end1_units=n1, interior=tuple(interior)
    )
