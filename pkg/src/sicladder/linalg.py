"""Dense complex linear algebra used by every other module.

All functions are pure and operate on plain numpy arrays. Vectors are 1-d
complex arrays, matrices 2-d with column eigenvectors. Tolerances are explicit
parameters with structural default 1e-10 (well-conditioned desk-scale checks).
"""
from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionMismatch, NotOrthonormal, NotUnitary, RankDeficient


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, orthonormal for normal input
    tolerance: float


def phase_fix_columns(B: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Rescale each column so its first component of magnitude > tol is real positive."""
    B = np.array(B, dtype=complex, copy=True)
    for k in range(B.shape[1]):
        col = B[:, k]
        sig = np.nonzero(np.abs(col) > tol)[0]
        if sig.size:
            z = col[sig[0]]
            B[:, k] = col * (np.conj(z) / abs(z))
    return B


def eig_unitary(A: np.ndarray, tol: float = 1e-10) -> EigenDecomposition:
    """Eigendecomposition of a unitary matrix with deterministic ordering.

    Eigenvalues are sorted by phase ascending in [0, 2pi). Eigenvalues closer
    than the grouping tolerance 1e-8 are treated as one degenerate group; each
    group gets a canonical orthonormal basis built by projecting the standard
    basis vectors onto the eigenspace and orthogonalizing in index order, so
    the result does not depend on LAPACK internals. Columns are phase fixed
    (first significant component real positive).
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    if A.shape != (n, n):
        raise DimensionMismatch(f"square matrix required, got {A.shape}")
    herm_err = np.abs(A @ A.conj().T - np.eye(n)).max()
    if herm_err > tol:
        raise NotUnitary(f"||A A^dag - 1||_max = {herm_err:.3e} > {tol:.1e}")

    vals, vecs = np.linalg.eig(A)
    order = np.argsort(np.angle(vals) % (2 * np.pi), kind="stable")
    vals, vecs = vals[order], vecs[:, order]

    # cluster by distance on the unit circle, including the 0 / 2pi seam
    group_tol = 1e-8
    groups: list[list[int]] = []
    for k in range(n):
        if groups and abs(vals[k] - vals[groups[-1][-1]]) < group_tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    if len(groups) > 1 and abs(vals[groups[0][0]] - vals[groups[-1][-1]]) < group_tol:
        groups[0] = groups.pop() + groups[0]

    out_vals = np.empty(n, dtype=complex)
    out_vecs = np.empty((n, n), dtype=complex)
    pos = 0
    for idx in groups:
        block = vecs[:, idx]
        q, _ = np.linalg.qr(block)
        basis = _canonical_eigenbasis(q)
        m = len(idx)
        rep = vals[idx].mean()
        out_vals[pos:pos + m] = rep
        out_vecs[:, pos:pos + m] = basis
        pos += m
    # re-sort groups by phase of representative (seam merge can disorder them)
    order = np.argsort(np.angle(out_vals) % (2 * np.pi), kind="stable")
    return EigenDecomposition(out_vals[order], phase_fix_columns(out_vecs[:, order]), tol)


def _canonical_eigenbasis(q: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Canonical orthonormal basis of span(q): project standard basis vectors
    onto the span and keep the ones with nonnegligible residual, in index order."""
    n, m = q.shape
    proj = q @ q.conj().T
    basis: list[np.ndarray] = []
    for i in range(n):
        v = proj[:, i].copy()
        for b in basis:
            v -= b * (b.conj() @ v)
        nv = np.linalg.norm(v)
        if nv > 1e-6:
            v /= nv
            for b in basis:  # one reorthogonalization pass
                v -= b * (b.conj() @ v)
            basis.append(v / np.linalg.norm(v))
        if len(basis) == m:
            break
    if len(basis) != m:
        raise RankDeficient("could not span eigenspace from standard basis projections")
    return np.column_stack(basis)


def gram_schmidt(vectors: Sequence[np.ndarray], tol: float = 1e-10) -> list[np.ndarray]:
    """Modified Gram-Schmidt with one reorthogonalization pass.

    Raises RankDeficient if some residual norm falls below tol. Span is
    preserved; output is orthonormal to ~1e-12.
    """
    out: list[np.ndarray] = []
    for v in vectors:
        w = np.array(v, dtype=complex, copy=True)
        for b in out:
            w -= b * (b.conj() @ w)
        nw = np.linalg.norm(w)
        if nw < tol:
            raise RankDeficient(f"residual norm {nw:.3e} < {tol:.1e}")
        w /= nw
        for b in out:
            w -= b * (b.conj() @ w)
        out.append(w / np.linalg.norm(w))
    return out


def partial_trace(M: np.ndarray, dimA: int, dimB: int, side: str = "B") -> np.ndarray:
    """Trace out one tensor factor of a (dimA*dimB) x (dimA*dimB) matrix.

    side is the factor that is traced out: "B" keeps the dimA x dimA reduced
    matrix, "A" keeps dimB x dimB. Index convention is row major (left factor
    slow), matching numpy.kron.
    """
    M = np.asarray(M, dtype=complex)
    if M.shape != (dimA * dimB, dimA * dimB):
        raise DimensionMismatch(f"expected {(dimA * dimB,) * 2}, got {M.shape}")
    T = M.reshape(dimA, dimB, dimA, dimB)
    if side == "B":
        return np.einsum("abcb->ac", T)
    if side == "A":
        return np.einsum("abad->bd", T)
    raise ValueError("side must be 'A' or 'B'")


def principal_angles(U1: np.ndarray, U2: np.ndarray) -> np.ndarray:
    """Principal angles between the column spans of two orthonormal matrices.

    Returns the angles in ascending order; their cosines are the singular
    values of U1^dag U2 sorted descending, clipped to [0, 1].
    """
    for U in (U1, U2):
        U = np.asarray(U)
        g = U.conj().T @ U
        err = np.abs(g - np.eye(U.shape[1])).max()
        if err > 1e-8:
            raise NotOrthonormal(f"columns not orthonormal, deviation {err:.3e}")
    if U1.shape[1] != U2.shape[1]:
        raise DimensionMismatch("subspaces must have equal dimension")
    sv = np.linalg.svd(np.asarray(U1).conj().T @ np.asarray(U2), compute_uv=False)
    return np.arccos(np.clip(np.sort(sv)[::-1], 0.0, 1.0))
