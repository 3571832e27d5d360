"""Internal dense linear-algebra helpers.

Everything here is a pure function on small complex matrices (ambient sizes
stay in the tens).  Frames are matrices whose orthonormal columns span a
subspace; a projection field is carried around as the frame that spans it.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import BranchAmbiguityError, ContinuityError, RankError

HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-9


def opnorm(a: np.ndarray) -> float:
    """Operator (spectral) norm."""
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def hermitize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    n = u.shape[0]
    return bool(opnorm(u.conj().T @ u - np.eye(n)) <= tol)


def polar_unitary(a: np.ndarray) -> np.ndarray:
    """Unitary factor of the polar decomposition (closest unitary to a)."""
    u, _, vh = np.linalg.svd(a)
    return u @ vh


def principal_log_unitary(u: np.ndarray, branch_margin: float = 1e-12) -> np.ndarray:
    """Principal logarithm of a unitary, eigenphases in (-pi, pi].

    Raises BranchAmbiguityError when an eigenvalue sits on the branch cut,
    i.e. at angle pi within branch_margin.
    """
    # Schur form of a unitary is diagonal, which keeps the eigenbasis orthonormal
    # even for repeated eigenvalues.
    t, z = scipy.linalg.schur(u.astype(complex), output="complex")
    phases = np.angle(np.diag(t))
    if np.any(np.pi - np.abs(phases) < branch_margin):
        raise BranchAmbiguityError(
            "unitary has an eigenvalue at -1; the logarithm branch is ambiguous"
        )
    return z @ np.diag(1j * phases) @ z.conj().T


def unitary_power(u: np.ndarray, s: float) -> np.ndarray:
    """Principal fractional power u**s of a unitary."""
    t, z = scipy.linalg.schur(u.astype(complex), output="complex")
    phases = np.angle(np.diag(t))
    return z @ np.diag(np.exp(1j * s * phases)) @ z.conj().T


def geodesic_unitaries(u: np.ndarray, v: np.ndarray, steps: int) -> list[np.ndarray]:
    """Path w(s) = u * exp(s * log(u^* v)) sampled at steps+1 points."""
    log = principal_log_unitary(u.conj().T @ v)
    return [u @ scipy.linalg.expm(s * log) for s in np.linspace(0.0, 1.0, steps + 1)]


def orthonormal_frame(p: np.ndarray, rank: int, tol: float = 1e-8) -> np.ndarray:
    """Frame (n x rank) spanning the range of the hermitian projection p."""
    w, v = np.linalg.eigh(hermitize(p))
    order = np.argsort(w)[::-1]
    if rank and w[order[rank - 1]] < 1.0 - 1e-6:
        raise RankError(f"projection has rank < {rank} (eigenvalue {w[order[rank-1]]:.3g})")
    if rank < p.shape[0] and w[order[rank]] > 1e-6:
        raise RankError(f"projection has rank > {rank}")
    cols = v[:, order[:rank]]
    q, _ = np.linalg.qr(cols)
    return q


def transport_frame(p_next: np.ndarray, frame: np.ndarray, min_sv: float = 0.2) -> np.ndarray:
    """Move a frame into the range of the next projection along a field.

    Projects the columns and re-orthonormalizes through the polar factor, the
    maximal-overlap continuation.  A small singular value means the two ranges
    are nearly orthogonal, which breaks the continuation.
    """
    b = p_next @ frame
    u, s, vh = np.linalg.svd(b, full_matrices=False)
    if s.size and s.min() < min_sv:
        raise ContinuityError(
            f"subspace continuation broke: overlap singular value {s.min():.3g}"
        )
    return u @ vh


def frame_gauge(frame_from: np.ndarray, frame_to: np.ndarray) -> np.ndarray:
    """Unitary g minimizing ||frame_to @ g - frame_from|| (polar alignment)."""
    return polar_unitary(frame_to.conj().T @ frame_from)


def rotate_subframe_path(
    frame_a: np.ndarray, frame_b: np.ndarray, ambient_frame: np.ndarray, s: float
) -> np.ndarray:
    """Isometry path from frame_a to frame_b inside the span of ambient_frame.

    Both frames must have columns inside the ambient span.  The rotation is
    the geodesic of the unitary mapping a completed basis of frame_a to one of
    frame_b, expressed in ambient coordinates.
    """
    a = ambient_frame.conj().T @ frame_a
    b = ambient_frame.conj().T @ frame_b
    r = a.shape[0]
    qa = _complete_isometry(a, r)
    qb = _complete_isometry(b, r)
    u = qb @ qa.conj().T
    w = unitary_power(u, s)
    return ambient_frame @ (w @ a)


def _complete_isometry(a: np.ndarray, n: int) -> np.ndarray:
    """Complete an n x k isometry to an n x n unitary."""
    k = a.shape[1]
    if k == n:
        return a
    # project a random orthonormal complement against the existing columns
    q, _ = np.linalg.qr(np.hstack([a, np.eye(n, dtype=complex)]))
    out = np.hstack([a, q[:, k : n]])
    # final polish: polar of the assembled square matrix
    return polar_unitary(out)


def tensor_factor(a: np.ndarray, k: int) -> tuple[np.ndarray, float]:
    """Best b with a ~ kron(b, eye(k)); returns (b, residual in operator norm)."""
    n = a.shape[0]
    if n % k:
        raise ValueError("matrix size not divisible by k")
    q = n // k
    blocks = a.reshape(q, k, q, k)
    b = np.einsum("isjs->ij", blocks) / k
    residual = opnorm(a - np.kron(b, np.eye(k)))
    return b, residual


def block_diag(blocks: list[np.ndarray], total: int) -> np.ndarray:
    """Stack square blocks on the diagonal, zero-padded to total x total."""
    out = np.zeros((total, total), dtype=complex)
    pos = 0
    for b in blocks:
        m = b.shape[0]
        out[pos : pos + m, pos : pos + m] = b
        pos += m
    if pos > total:
        raise ValueError("blocks exceed the ambient size")
    return out


def contract_unitary_loop(
    loop: np.ndarray, levels: int, minus_one_margin: float = 0.3
) -> np.ndarray:
    """Contract a closed null-winding unitary loop to its basepoint.

    loop has shape (M, n, n) with loop[0] the basepoint; closure loop[M] ==
    loop[0] is implicit (the sample at index M is not stored).  Returns an
    array w of shape (levels + 1, M, n, n) of loops with w[0] the constant
    basepoint loop and w[levels] the input loop, adjacent levels close in
    operator norm, and every level closing exactly around the circle.

    The loop is rebuilt from its multiplicative increments scaled by
    s = level/levels; the accumulated non-closure h(s) is spread evenly
    around the circle through its principal M-th root.  That root is only
    continuous in s while h(s) keeps its eigenvalues away from -1, which
    holds whenever the loop's total winding content is zero; the margin is
    checked and reported rather than assumed.
    """
    m, n, _ = loop.shape
    closed = np.concatenate([loop, loop[:1]], axis=0)
    incs = []
    for j in range(m):
        step = closed[j].conj().T @ closed[j + 1]
        incs.append(principal_log_unitary(step, branch_margin=1e-9))
    out = np.zeros((levels + 1, m, n, n), dtype=complex)
    base = loop[0]
    for lev in range(levels + 1):
        s = lev / levels
        cur = np.eye(n, dtype=complex)
        partial = [cur]
        for j in range(m - 1):
            cur = cur @ scipy.linalg.expm(s * incs[j])
            partial.append(cur)
        hol = cur @ scipy.linalg.expm(s * incs[m - 1])
        gap = _minus_one_gap(hol)
        if gap < minus_one_margin and 0 < lev < levels:
            raise ContinuityError(
                "loop contraction holonomy approached the logarithm branch cut "
                f"(margin {gap:.3g}); the loop may carry nonzero winding"
            )
        root = unitary_power(hol, -1.0 / m)
        for j in range(m):
            corr = np.linalg.matrix_power(root, j)
            out[lev, j] = base @ partial[j] @ corr
    # the top level reproduces the input exactly up to roundoff
    return out


def _minus_one_gap(u: np.ndarray) -> float:
    phases = np.angle(np.linalg.eigvals(u))
    return float(np.min(np.pi - np.abs(phases)))
