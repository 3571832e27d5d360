"""Sampled matrix fields and pointwise-diagonal homomorphism representations.

A homomorphism is stored per mesh sample as a unitary together with a list of
diagonal blocks; each block names an irreducible representation of the domain
(an endpoint underline block, an interior point, a full matrix point, or a
point of a complex).  Assembling the representation at a sample conjugates
the block diagonal by the unitary and pads with the kernel of the cut
projection.

Meshes tie samples to an adjacency structure used for measured moduli of
continuity; nothing here assumes continuity, it is always measured.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ._linalg import block_diag, hermitize, is_unitary, opnorm
from ._linalg import geodesic_unitaries
from .elements import UNDER0, UNDER1
from .errors import (
    DomainError,
    GapViolationError,
    MalformedRepresentationError,
    MeshIncompatibilityError,
)
from .geometry import Point, SimplicialComplex2, make_point, path_distance, vertex_point
from .multisets import ComplexMultiset, SpectralMultiset

_MERGE_TOL = 1e-12


# ---------------------------------------------------------------------------
# meshes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Mesh:
    """Flat list of samples with adjacency; positions depend on the kind."""

    kind: str
    positions: tuple
    adjacency: tuple[tuple[int, int], ...]

    @property
    def size(self) -> int:
        return len(self.positions)


def interval_mesh(ts: Sequence[float]) -> Mesh:
    ts = tuple(float(t) for t in ts)
    if list(ts) != sorted(ts):
        raise MeshIncompatibilityError("interval mesh nodes must be sorted")
    adj = tuple((i, i + 1) for i in range(len(ts) - 1))
    return Mesh(kind="interval", positions=ts, adjacency=adj)


def circle_mesh(m: int) -> Mesh:
    angles = tuple(2.0 * np.pi * j / m for j in range(m))
    adj = tuple((j, (j + 1) % m) for j in range(m))
    return Mesh(kind="circle", positions=angles, adjacency=adj)


def disk_mesh(m_r: int, m_theta: int) -> Mesh:
    """Polar mesh of the closed disk: one center plus m_r rings of m_theta."""
    if m_r < 1 or m_theta < 3:
        raise MeshIncompatibilityError("disk mesh needs m_r >= 1 and m_theta >= 3")
    positions = [(0.0, 0.0)]
    for i in range(1, m_r + 1):
        for j in range(m_theta):
            positions.append((i / m_r, 2.0 * np.pi * j / m_theta))

    def idx(i: int, j: int) -> int:
        return 1 + (i - 1) * m_theta + (j % m_theta)

    adj = []
    for j in range(m_theta):
        adj.append((0, idx(1, j)))
    for i in range(1, m_r + 1):
        for j in range(m_theta):
            adj.append((idx(i, j), idx(i, j + 1)))
            if i < m_r:
                adj.append((idx(i, j), idx(i + 1, j)))
    return Mesh(kind="disk", positions=tuple(positions), adjacency=tuple(adj))


def disk_index(mesh: Mesh, i: int, j: int) -> int:
    m_theta = sum(1 for p in mesh.positions if abs(p[0] - 1.0) < 1e-12)
    if i == 0:
        return 0
    return 1 + (i - 1) * m_theta + (j % m_theta)


class ComplexMesh:
    """Structured sampling of a 2-complex.

    Every edge carries m_edge+1 samples (endpoints shared with the vertex
    samples); every triangle carries a polar grid around its barycenter whose
    outer ring is exactly the cycle of boundary edge samples, so restriction
    to the boundary is literal index sharing.
    """

    kind = "complex2"

    def __init__(self, complex_: SimplicialComplex2, m_edge: int = 8, m_ring: int = 4):
        if m_edge % 2 or m_ring % 2:
            raise MeshIncompatibilityError("m_edge and m_ring must be even")
        self.complex_ = complex_
        self.m_edge = m_edge
        self.m_ring = m_ring
        pts: list[Point] = []
        adjacency: list[tuple[int, int]] = []

        def add(p: Point) -> int:
            pts.append(p)
            return len(pts) - 1

        self.vertex_sample = {v: add(vertex_point(v)) for v in complex_.vertices}
        self.edge_samples = {}
        for e in complex_.edges:
            a, b = e
            row = [self.vertex_sample[a]]
            for s in range(1, m_edge):
                row.append(add(make_point(e, (1.0 - s / m_edge, s / m_edge))))
            row.append(self.vertex_sample[b])
            self.edge_samples[e] = row
            adjacency.extend((row[i], row[i + 1]) for i in range(m_edge))
        self.tri_center = {}
        self.tri_rings = {}
        for t in complex_.triangles:
            cyc = self.boundary_cycle(t)
            n_theta = len(cyc)
            center = add(make_point(t, (1 / 3, 1 / 3, 1 / 3)))
            self.tri_center[t] = center
            rings = np.zeros((m_ring + 1, n_theta), dtype=int)
            rings[0, :] = center
            rings[m_ring, :] = cyc
            for i in range(1, m_ring):
                rho = i / m_ring
                for j in range(n_theta):
                    pb = pts[cyc[j]]
                    cb = self._to_triangle_bary(pb, t)
                    bary = tuple(
                        (1.0 - rho) / 3.0 + rho * cb[q] for q in range(3)
                    )
                    rings[i, j] = add(make_point(t, bary))
            self.tri_rings[t] = rings
            for i in range(1, m_ring + 1):
                for j in range(n_theta):
                    adjacency.append((rings[i, j], rings[i, (j + 1) % n_theta]))
                    adjacency.append((rings[i - 1, j], rings[i, j]))
        self.points = pts
        self.positions = tuple(pts)
        self.adjacency = tuple(
            (a, b) for a, b in adjacency if a != b
        )

    @property
    def size(self) -> int:
        return len(self.points)

    def _to_triangle_bary(self, p: Point, t: tuple[int, ...]) -> tuple[float, float, float]:
        w = {v: 0.0 for v in t}
        for v, c in zip(p.simplex, p.coords):
            w[v] = c
        return tuple(w[v] for v in t)

    def boundary_cycle(self, t: tuple[int, ...]) -> list[int]:
        """Sample indices around the triangle boundary: a->b->c->a, corners once."""
        a, b, c = t
        cyc: list[int] = []
        for x, y in ((a, b), (b, c), (c, a)):
            e = tuple(sorted((x, y)))
            row = self.edge_samples[e]
            row = row if e == (x, y) else row[::-1]
            cyc.extend(row[:-1])
        return cyc

    def simplex_samples(self, simplex: tuple[int, ...]) -> list[int]:
        if len(simplex) == 1:
            return [self.vertex_sample[simplex[0]]]
        if len(simplex) == 2:
            return list(self.edge_samples[simplex])
        rings = self.tri_rings[simplex]
        out = [self.tri_center[simplex]]
        for i in range(1, self.m_ring + 1):
            out.extend(int(x) for x in rings[i])
        return out


def mesh_equal(m1, m2) -> bool:
    if m1 is m2:
        return True
    if getattr(m1, "kind", None) != getattr(m2, "kind", None):
        return False
    p1, p2 = m1.positions, m2.positions
    if len(p1) != len(p2):
        return False
    if m1.kind == "complex2":
        return p1 == p2
    return bool(np.allclose(np.asarray(p1, dtype=float), np.asarray(p2, dtype=float)))


# ---------------------------------------------------------------------------
# matrix fields and projection fields
# ---------------------------------------------------------------------------


@dataclass
class MatrixField:
    """Matrix-valued function sampled on a mesh, continuity measured not assumed."""

    mesh: object
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        if self.values.ndim != 3 or self.values.shape[0] != self.mesh.size:
            raise MalformedRepresentationError("field shape does not match the mesh")

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def is_hermitian(self, tol: float = 1e-9) -> bool:
        return all(opnorm(v - v.conj().T) <= tol for v in self.values)

    def modulus(self) -> float:
        """Measured modulus of continuity: max jump across adjacent samples."""
        return max(
            (opnorm(self.values[a] - self.values[b]) for a, b in self.mesh.adjacency),
            default=0.0,
        )

    def to_json(self) -> dict:
        vals = np.stack([self.values.real, self.values.imag], axis=-1)
        return {
            "kind": getattr(self.mesh, "kind", "unknown"),
            "samples": int(self.values.shape[0]),
            "size": int(self.values.shape[1]),
            "name": self.name,
            "data": vals.reshape(self.values.shape[0], -1).tolist(),
        }


@dataclass
class ProjectionField(MatrixField):
    rank: int = 0

    def validate(self, tol: float = 1e-8) -> None:
        for i, p in enumerate(self.values):
            if opnorm(p @ p - p) > tol or opnorm(p - p.conj().T) > tol:
                raise MalformedRepresentationError(
                    f"field value {i} is not an orthogonal projection"
                )
            if abs(float(np.trace(p).real) - self.rank) > 1e-6:
                raise MalformedRepresentationError(
                    f"rank drifts at sample {i}: trace {np.trace(p).real:.6f}"
                )


def spectral_projection(
    field: MatrixField, window: tuple[float, float], gap: float
) -> ProjectionField:
    """Projection field onto eigenvalues inside the closed window.

    Requires every eigenvalue to stay at least gap away from both window
    boundaries at every sample; rank must come out constant.
    """
    lo, hi = window
    if gap <= 0:
        raise ValueError("gap must be positive")
    out = np.zeros_like(field.values)
    rank = None
    for i, v in enumerate(field.values):
        w, vecs = np.linalg.eigh(hermitize(v))
        near = np.minimum(np.abs(w - lo), np.abs(w - hi)) < gap
        if near.any():
            raise GapViolationError(
                f"eigenvalue within {gap} of the window boundary at sample {i}"
            )
        sel = (w > lo) & (w < hi)
        r = int(sel.sum())
        if rank is None:
            rank = r
        elif r != rank:
            raise GapViolationError(
                f"window rank jumps from {rank} to {r} at sample {i}"
            )
        cols = vecs[:, sel]
        out[i] = cols @ cols.conj().T
    pf = ProjectionField(mesh=field.mesh, values=out, name=f"spec[{lo},{hi}]", rank=rank or 0)
    for a, b in field.mesh.adjacency:
        if opnorm(pf.values[a] - pf.values[b]) >= 1.0:
            raise GapViolationError(
                f"projection field jumps across samples {a}-{b}; clusters crossed the window"
            )
    return pf


# ---------------------------------------------------------------------------
# homomorphism representations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Domain:
    kind: str  # "Ik" | "MlIk" | "MkC01" | "CX"
    k: int = 1
    l: int = 1
    complex_: Optional[SimplicialComplex2] = None

    def __post_init__(self):
        if self.kind not in ("Ik", "MlIk", "MkC01", "CX"):
            raise DomainError(f"unknown domain kind {self.kind}")
        if self.kind == "CX" and self.complex_ is None:
            raise DomainError("CX domain needs its complex")


@dataclass(frozen=True)
class Block:
    kind: str  # "under0" | "under1" | "interior" | "full" | "point"
    value: object = None

    def size(self, domain: Domain) -> int:
        if self.kind in (UNDER0, UNDER1):
            return domain.l
        if self.kind == "interior":
            return domain.l * domain.k
        if self.kind == "full":
            return domain.k
        if self.kind == "point":
            return 1
        raise MalformedRepresentationError(f"unknown block kind {self.kind}")


def interior_block(t: float) -> Block:
    if not 0.0 < t < 1.0:
        raise MalformedRepresentationError(f"interior block value {t} outside (0,1)")
    return Block("interior", float(t))


def under_block(which: int) -> Block:
    return Block(UNDER0 if which == 0 else UNDER1)


class HomRep:
    """Pointwise diagonal homomorphism data: per sample a unitary and blocks."""

    def __init__(
        self,
        domain: Domain,
        mesh,
        blocks: Sequence[Sequence[Block]],
        unitaries: Sequence[np.ndarray],
        check: bool = True,
    ):
        self.domain = domain
        self.mesh = mesh
        self.blocks = tuple(tuple(b) for b in blocks)
        self.unitaries = np.stack([np.asarray(u, dtype=complex) for u in unitaries])
        if len(self.blocks) != mesh.size or self.unitaries.shape[0] != mesh.size:
            raise MalformedRepresentationError("sample count does not match the mesh")
        self.ambient = self.unitaries.shape[1]
        ranks = {sum(b.size(domain) for b in bl) for bl in self.blocks}
        if len(ranks) != 1:
            raise MalformedRepresentationError(f"cut rank varies across samples: {ranks}")
        self.rank = ranks.pop()
        if self.rank > self.ambient:
            raise MalformedRepresentationError("blocks exceed the ambient size")
        if check:
            for i, u in enumerate(self.unitaries):
                if not is_unitary(u):
                    raise MalformedRepresentationError(f"non-unitary frame at sample {i}")

    # -- structure ----------------------------------------------------------

    @property
    def sample_count(self) -> int:
        return len(self.blocks)

    def block_offsets(self, i: int) -> list[int]:
        out = [0]
        for b in self.blocks[i]:
            out.append(out[-1] + b.size(self.domain))
        return out

    def block_columns(self, i: int, j: int) -> np.ndarray:
        off = self.block_offsets(i)
        return self.unitaries[i][:, off[j] : off[j + 1]]

    def projection(self, i: int) -> np.ndarray:
        cols = self.unitaries[i][:, : self.rank]
        return cols @ cols.conj().T

    def cut_projection_field(self) -> ProjectionField:
        vals = np.stack([self.projection(i) for i in range(self.sample_count)])
        return ProjectionField(mesh=self.mesh, values=vals, name="P", rank=self.rank)

    def aligned(self) -> bool:
        sig0 = tuple((b.kind) for b in self.blocks[0])
        return all(tuple(b.kind for b in bl) == sig0 for bl in self.blocks)

    def zero_block_count(self, i: int) -> int:
        return sum(1 for b in self.blocks[i] if b.kind == UNDER0)

    def one_block_count(self, i: int) -> int:
        return sum(1 for b in self.blocks[i] if b.kind == UNDER1)

    # -- evaluation -----------------------------------------------------------

    def _block_value(self, b: Block, f) -> np.ndarray:
        if b.kind == UNDER0:
            return np.atleast_2d(np.asarray(f.a, dtype=complex))
        if b.kind == UNDER1:
            return np.atleast_2d(np.asarray(f.b, dtype=complex))
        if b.kind == "interior":
            return np.asarray(f.eval(b.value), dtype=complex)
        if b.kind == "full":
            return np.asarray(f.eval(b.value), dtype=complex)
        if b.kind == "point":
            return np.array([[complex(f(b.value))]])
        raise MalformedRepresentationError(f"unknown block kind {b.kind}")

    def assemble(self, f, i: int) -> np.ndarray:
        """Sampled value u * diag(blocks, 0-pad) * u^*."""
        mats = [self._block_value(b, f) for b in self.blocks[i]]
        d = block_diag(mats, self.ambient)
        u = self.unitaries[i]
        return u @ d @ u.conj().T

    def matrix_field(self, f, name: str = "") -> MatrixField:
        vals = np.stack([self.assemble(f, i) for i in range(self.sample_count)])
        return MatrixField(mesh=self.mesh, values=vals, name=name)

    # -- spectra ----------------------------------------------------------------

    def spectrum_at(self, i: int):
        if self.domain.kind in ("Ik", "MlIk"):
            n0 = self.zero_block_count(i)
            n1 = self.one_block_count(i)
            vals = sorted(b.value for b in self.blocks[i] if b.kind == "interior")
            return SpectralMultiset(
                k=self.domain.k,
                end0_units=n0,
                end1_units=n1,
                interior=_merge_values(vals),
            )
        if self.domain.kind == "MkC01":
            n0 = sum(1 for b in self.blocks[i] if b.kind == "full" and b.value <= 0.0)
            n1 = sum(1 for b in self.blocks[i] if b.kind == "full" and b.value >= 1.0)
            vals = sorted(
                b.value for b in self.blocks[i] if b.kind == "full" and 0.0 < b.value < 1.0
            )
            return SpectralMultiset(
                k=1, end0_units=n0, end1_units=n1, interior=_merge_values(vals)
            )
        pts: dict = {}
        for b in self.blocks[i]:
            pts[b.value] = pts.get(b.value, 0) + 1
        return ComplexMultiset(points=tuple(pts.items()))

    def all_spectra(self):
        return [self.spectrum_at(i) for i in range(self.sample_count)]

    def domain_grid(self):
        if self.domain.kind != "CX":
            raise DomainError("only complex domains carry a search grid")
        cx = self.domain.complex_
        nodes, _, _, _, _ = cx._graph()
        return nodes, lambda a, b: path_distance(cx, a, b)

    def expanded_eigenvalues(self, i: int) -> np.ndarray:
        """Eigenvalue list of the composition with the interval center."""
        sp = self.spectrum_at(i)
        if isinstance(sp, SpectralMultiset):
            return sp.expand()
        raise DomainError("complex-domain spectra have no interval expansion")

    def pairing_modulus(self) -> float:
        """Max adjacent-sample spectral movement (sorted elementwise over [0,1];
        bottleneck over a complex)."""
        worst = 0.0
        if self.domain.kind == "CX":
            cx = self.domain.complex_
            for a, b in self.mesh.adjacency:
                xs = [bl.value for bl in self.blocks[a]]
                ys = [bl.value for bl in self.blocks[b]]
                d = _cheap_bottleneck(cx, xs, ys)
                worst = max(worst, d)
            return worst
        for a, b in self.mesh.adjacency:
            va = self.expanded_eigenvalues(a)
            vb = self.expanded_eigenvalues(b)
            if va.size != vb.size:
                return np.inf
            worst = max(worst, float(np.max(np.abs(np.sort(va) - np.sort(vb)))) if va.size else 0.0)
        return worst

    # -- misc -------------------------------------------------------------------

    def with_samples(self, blocks, unitaries) -> "HomRep":
        return HomRep(self.domain, self.mesh, blocks, unitaries, check=False)


def _merge_values(vals: Sequence[float]) -> tuple[tuple[float, int], ...]:
    out: list[tuple[float, int]] = []
    for v in vals:
        if out and v - out[-1][0] <= _MERGE_TOL:
            out[-1] = (out[-1][0], out[-1][1] + 1)
        else:
            out.append((float(v), 1))
    return tuple(out)


def _cheap_bottleneck(cx, xs, ys) -> float:
    from .multisets import bottleneck_value

    def dist(a, b):
        d = cx.local_distance(a, b)
        if d == np.inf:
            d = path_distance(cx, a, b)
        return d

    return bottleneck_value(xs, ys, dist)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def assemble_hom(rep: HomRep, f, i: int) -> np.ndarray:
    return rep.assemble(f, i)


def hom_distance_on_F(rep1: HomRep, rep2: HomRep, fs: Sequence) -> float:
    """max over the family and the mesh of the operator-norm difference."""
    if not mesh_equal(rep1.mesh, rep2.mesh):
        raise MeshIncompatibilityError("representations live on different meshes")
    worst = 0.0
    for f in fs:
        for i in range(rep1.sample_count):
            worst = max(worst, opnorm(rep1.assemble(f, i) - rep2.assemble(f, i)))
    return worst


def aff_trace(rep: HomRep, h) -> np.ndarray:
    """Normalized trace field y -> tr(phi(h)(y)) / rank(P(y))."""
    if rep.rank == 0:
        raise DomainError("zero-rank cut projection has no normalized trace")
    herm = getattr(h, "is_hermitian", None)
    if callable(herm) and not h.is_hermitian():
        raise DomainError("aff_trace needs a hermitian-valued element")
    out = np.empty(rep.sample_count)
    for i in range(rep.sample_count):
        out[i] = float(np.trace(rep.assemble(h, i)).real) / rep.rank
    return out


def unitary_geodesic(u: np.ndarray, v: np.ndarray, steps: int) -> list[np.ndarray]:
    """Path u * exp(s log(u^* v)) at steps+1 equispaced parameters."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    for name, m in (("u", u), ("v", v)):
        if not is_unitary(np.asarray(m, dtype=complex)):
            raise MalformedRepresentationError(f"{name} is not unitary within tolerance")
    return geodesic_unitaries(np.asarray(u, complex), np.asarray(v, complex), steps)


def field_from_json(data: dict, mesh) -> MatrixField:
    arr = np.asarray(data["data"], dtype=float).reshape(
        data["samples"], data["size"], data["size"], 2
    )
    return MatrixField(mesh=mesh, values=arr[..., 0] + 1j * arr[..., 1], name=data.get("name", ""))
