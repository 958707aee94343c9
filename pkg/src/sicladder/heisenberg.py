"""Weyl-Heisenberg group in odd dimension d.

Conventions, used consistently everywhere:

    omega = exp(2 pi i / d),   tau = -exp(i pi / d) = omega^((d+1)/2)

    (D_{i,j})[r, s] = tau^(i j + 2 j s) delta_{r, s+i}   (indices mod d)

so D_{0,0} = 1, D_{1,0} = X (cyclic shift), D_{0,1} = Z = diag(omega^s),
D_p is unitary and D_p^dagger = D_{-p}. Exponents of tau live mod 2d. The
product of D_p D_q D_p^dag D_q^dag is the scalar omega^(j_p i_q - i_p j_q);
that exponent is determined numerically by weyl_commutation_check, never
assumed.

Tensor products are row major (left factor slow), matching numpy.kron; the
Chinese-remainder permutation V maps the global index r to the tensor index
(r mod n1, r mod n2) and satisfies V D^(n1 n2)_p V^dag = D_{p'} (x) D_{p''}
with global phase +1.
"""
import functools

import numpy as np

from .errors import BadDimension, NotCoprime


def _check_dim(d):
    if d < 3 or d % 2 == 0:
        raise BadDimension(f"odd dimension >= 3 required, got {d}")


def omega(d):
    return np.exp(2j * np.pi / d)


def tau(d):
    return -np.exp(1j * np.pi / d)


@functools.lru_cache(maxsize=None)
def tau_powers(d):
    """tau^k for k = 0 .. 2d-1, as a read-only array."""
    t = tau(d) ** np.arange(2 * d)
    t.setflags(write=False)
    return t


@functools.lru_cache(maxsize=4096)
def displacement(d, i, j):
    """The d x d displacement matrix D_{i,j}. Cached and read-only."""
    _check_dim(d)
    i, j = i % d, j % d
    t = tau_powers(d)
    M = np.zeros((d, d), dtype=complex)
    for s in range(d):
        M[(s + i) % d, s] = t[(i * j + 2 * j * s) % (2 * d)]
    M.setflags(write=False)
    return M


def displaced_vector(psi, i, j):
    """D_{i,j} psi without forming the matrix."""
    d = len(psi)
    t = tau_powers(d)
    s = np.arange(d)
    ph = t[(i * j + 2 * j * s) % (2 * d)]
    out = np.zeros(d, dtype=complex)
    out[(s + i) % d] = ph * psi[s]
    return out


def wh_orbit(psi):
    """All d^2 orbit vectors D_p psi, as a (d^2, d) array, p lexicographic in (i, j)."""
    d = len(psi)
    t = tau_powers(d)
    r = np.arange(d)
    out = np.empty((d * d, d), dtype=complex)
    for i in range(d):
        rolled = np.roll(psi, i)  # rolled[r] = psi[r-i]
        for j in range(d):
            out[i * d + j] = t[(i * j + 2 * j * ((r - i) % d)) % (2 * d)] * rolled
    return out


def overlap_table(psi):
    """All overlaps <psi|D_{i,j}|psi> as a d x d array, computed by FFT.

    <psi|D_{i,j}|psi> = tau^(ij) sum_s conj(psi_{s+i}) psi_s omega^(js),
    and the s-sum over j is d * ifft of conj(roll(psi, -i)) * psi.
    """
    d = len(psi)
    t = tau_powers(d)
    out = np.empty((d, d), dtype=complex)
    j = np.arange(d)
    for i in range(d):
        c = np.conj(np.roll(psi, -i)) * psi
        out[i] = t[(i * j) % (2 * d)] * (np.fft.ifft(c) * d)
    return out


def overlap_table_naive(psi):
    """Same table as overlap_table, by explicit matrix elements. Oracle route."""
    d = len(psi)
    out = np.empty((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            out[i, j] = np.vdot(psi, displacement(d, i, j) @ psi)
    return out


def weyl_commutation_check(d, tol=1e-12):
    """True iff ZX = omega XZ, X^d = Z^d = 1, and every D_p D_q D_p^dag D_q^dag
    is the scalar omega^<p,q> for a single bilinear form <p,q>, all within tol.

    The symplectic-form exponent is fitted from the computed scalars and then
    verified against all pairs, not assumed.
    """
    _check_dim(d)
    w = omega(d)
    X = displacement(d, 1, 0)
    Z = displacement(d, 0, 1)
    if np.abs(Z @ X - w * X @ Z).max() > tol:
        return False
    if np.abs(np.linalg.matrix_power(X, d) - np.eye(d)).max() > tol:
        return False
    if np.abs(np.linalg.matrix_power(Z, d) - np.eye(d)).max() > tol:
        return False

    Ds = np.stack([displacement(d, i, j) for i in range(d) for j in range(d)])
    scal = np.empty((d * d, d * d), dtype=complex)
    for a in range(d * d):
        A = Ds[a]
        AB = np.einsum("ij,qjk->qik", A, Ds)
        ABAd = AB @ A.conj().T
        E = np.einsum("qik,qjk->qij", ABAd, Ds.conj())
        # scalar matrix: all diagonal entries equal, off-diagonal zero
        off = np.abs(E - E[:, 0, 0][:, None, None] * np.eye(d)).max()
        if off > 10 * tol * d:
            return False
        scal[a] = E[:, 0, 0]
    # fit the exponent from the (1,0) x (0,1) pair and verify bilinearity
    exps = np.round(np.angle(scal) / (2 * np.pi / d)).astype(int) % d
    idx = np.arange(d * d)
    ip, jp = idx // d, idx % d
    predicted = (jp[:, None] * ip[None, :] - ip[:, None] * jp[None, :]) % d
    if not np.array_equal(exps, predicted):
        return False
    return bool(np.abs(scal - w ** predicted).max() <= 10 * tol * d)


@functools.lru_cache(maxsize=16)
def crt_permutation(n1, n2):
    """Permutation matrix V with V[n2*(r mod n1) + (r mod n2), r] = 1.

    Realizes the ring isomorphism Z_{n1 n2} -> Z_{n1} x Z_{n2}; V is unitary
    and V D^(n1 n2)_p V^dag is a pure tensor for every p (certified in tests).
    Cached; treat the result as read-only.
    """
    if np.gcd(n1, n2) != 1:
        raise NotCoprime(f"gcd({n1},{n2}) != 1")
    N = n1 * n2
    V = np.zeros((N, N))
    for r in range(N):
        V[n2 * (r % n1) + (r % n2), r] = 1.0
    V.setflags(write=False)
    return V


def crt_split_index(p, n1, n2):
    """Split a displacement index of dimension n1*n2 into tensor factor indices.

    Returns (p', p'') with V D^(n1 n2)_p V^dag = D^(n1)_{p'} (x) D^(n2)_{p''},
    global phase +1. The shift component follows the residues; the clock
    component picks up the inverse of the complementary modulus.
    """
    if np.gcd(n1, n2) != 1:
        raise NotCoprime(f"gcd({n1},{n2}) != 1")
    i, j = p
    q1 = pow(n2, -1, n1) if n1 > 1 else 0
    q2 = pow(n1, -1, n2) if n2 > 1 else 0
    return (i % n1, (q1 * j) % n1), (i % n2, (q2 * j) % n2)


def crt_split_certificate(n1, n2, ps=None):
    """Max deviation of V D_p V^dag from D_{p'} (x) D_{p''} over the given
    index list (all of them by default). Returns (max_err, max_phase_dev)
    where max_phase_dev measures how far the implied global phase is from +1.
    """
    V = crt_permutation(n1, n2)
    N = n1 * n2
    if ps is None:
        ps = [(i, j) for i in range(N) for j in range(N)]
    max_err = 0.0
    max_ph = 0.0
    for p in ps:
        lhs = V @ displacement(N, *p) @ V.T
        pa, pb = crt_split_index(p, n1, n2)
        rhs = np.kron(displacement(n1, *pa), displacement(n2, *pb))
        max_err = max(max_err, np.abs(lhs - rhs).max())
        k = np.unravel_index(np.argmax(np.abs(rhs)), rhs.shape)
        max_ph = max(max_ph, abs(lhs[k] / rhs[k] - 1.0))
    return max_err, max_ph
