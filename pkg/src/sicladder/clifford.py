"""Symplectic (metaplectic) unitaries over Z_d for odd d.

For F = [[a, b], [g, e]] in SL(2, Z_d) there is a unitary U_F, unique up to
a global phase, with

    U_F D_p U_F^dag = D_{F p}   exactly (no extra phase in odd d).

When b is invertible mod d the standard closed form applies,

    (U_F)[r, s] = tau^( b^{-1} (e r^2 - 2 r s + a s^2) ) / sqrt(d),

otherwise F is factored as [[0,-1],[1,x]] * [[xa+g, xb+e],[-a,-b]] with x
chosen so both factors have invertible upper-right entries, and the two
closed forms are multiplied. Covariance is exact either way; the global
phase is then pinned, where needed, to a prescribed eigenvalue-multiplicity
pattern (fix_phase_to_table) or to the principal root (fix_phase_principal).
"""
import functools
import itertools

import numpy as np

from .errors import (BadDimension, EmptyEigenspace, NoMatchingPhase,
                     NotCoprime, NotSymplectic, SicladderError)
from .heisenberg import displacement, tau_powers
from .linalg import eig_unitary


def _as_modmatrix(F, d):
    F = np.asarray(F, dtype=int) % d
    if F.shape != (2, 2):
        raise NotSymplectic(f"expected a 2x2 integer matrix, got shape {F.shape}")
    return F


def is_symplectic(F, d):
    F = np.asarray(F, dtype=int)
    return int(F[0, 0] * F[1, 1] - F[0, 1] * F[1, 0]) % d == 1


def _closed_form(F, d):
    # requires gcd(F[0,1], d) == 1
    a, b = int(F[0, 0]), int(F[0, 1])
    g, e = int(F[1, 0]), int(F[1, 1])
    binv = pow(b, -1, d)
    r = np.arange(d)
    expo = (binv * (e * r[:, None] ** 2 - 2 * np.outer(r, r) + a * r[None, :] ** 2)) % (2 * d)
    return tau_powers(d)[expo] / np.sqrt(d)


def symplectic_unitary(F, d):
    """Unitary representative of F in SL(2, Z_d), exact covariance, d odd."""
    if d < 3 or d % 2 == 0:
        raise BadDimension(f"odd dimension >= 3 required, got {d}")
    F = _as_modmatrix(F, d)
    if not is_symplectic(F, d):
        raise NotSymplectic(f"det != 1 mod {d}: {F.tolist()}")
    a, b, g, e = int(F[0, 0]), int(F[0, 1]), int(F[1, 0]), int(F[1, 1])
    if np.gcd(b, d) == 1:
        return _closed_form(F, d)
    # upper-right entry not invertible: peel off one shear
    for x in range(d):
        if np.gcd((x * b + e) % d, d) == 1:
            break
    else:  # unreachable for det 1: some residue avoids every prime factor
        raise NotSymplectic(f"no valid shear for {F.tolist()} mod {d}")
    F1 = np.array([[0, d - 1], [1, x]])
    F2 = np.array([[(x * a + g) % d, (x * b + e) % d], [(-a) % d, (-b) % d]])
    return _closed_form(F1, d) @ _closed_form(F2, d)


def symplectic_order(F, d, cap=10000):
    """Smallest k >= 1 with F^k = 1 mod d."""
    F = _as_modmatrix(F, d)
    M = F.copy()
    for k in range(1, cap + 1):
        if np.array_equal(M, np.eye(2, dtype=int)):
            return k
        M = (M @ F) % d
    raise SicladderError(f"order of {F.tolist()} mod {d} exceeds {cap}")


def _expected_multiplicities(d, order):
    if order == 2:
        return ((d + 1) // 2, (d - 1) // 2)
    if order == 3:
        k, r = divmod(d, 6)
        if r == 1:
            return (2 * k + 1, 2 * k, 2 * k)
        if r == 3:
            return (2 * k + 2, 2 * k + 1, 2 * k)
        if r == 5:
            return (2 * k + 1, 2 * k + 2, 2 * k + 2)
        raise BadDimension(f"no multiplicity pattern for even d={d}")
    raise ValueError(f"no multiplicity table for order {order}")


def _scalar_of_power(U, order):
    Up = np.linalg.matrix_power(U, order)
    c = Up[0, 0]
    if np.abs(Up - c * np.eye(len(U))).max() > 1e-8:
        raise NoMatchingPhase("U^order is not a scalar matrix")
    return c


def fix_phase_to_table(U, order):
    """Rescale U so U^order = 1 with the prescribed eigenvalue multiplicities.

    The multiplicity pattern is the standard one for order 3 (the three
    residue classes of d mod 6) and ((d+1)/2, (d-1)/2) for order 2. The
    rescaling must reproduce the pattern's eigenvalue-1 multiplicity and the
    remaining multiplicities as a multiset; that pins it uniquely, since the
    eigenvalue-1 entry differs from the others in every pattern.
    NoMatchingPhase if no rescaling works (symplectics whose spectrum is
    shaped differently, e.g. most involutions other than parity).
    """
    d = len(U)
    expected = _expected_multiplicities(d, order)
    c = _scalar_of_power(U, order)
    base = (1.0 / c) ** (1.0 / order)  # principal branch
    lam = np.linalg.eigvals(U)
    for k in range(order):
        r = base * np.exp(2j * np.pi * k / order)
        lr = lam * r
        m = np.round(np.angle(lr) * order / (2 * np.pi)).astype(int) % order
        if np.abs(lr - np.exp(2j * np.pi * m / order)).max() > 1e-6:
            continue
        counts = tuple(int(np.sum(m == q)) for q in range(order))
        if counts[0] == expected[0] and sorted(counts) == sorted(expected):
            return r * U
    raise NoMatchingPhase(
        f"no global phase gives multiplicities {expected} at order {order}")


def fix_phase_principal(U, order):
    """Rescale U so U^order = 1, taking the principal root of the scalar."""
    c = _scalar_of_power(U, order)
    return (1.0 / c) ** (1.0 / order) * U


def parity_matrix(d):
    """Minus the identity in SL(2, Z_d), i.e. diag(d-1, d-1)."""
    return np.array([[d - 1, 0], [0, d - 1]])


def parity_operator(d):
    """The permutation r -> -r mod d, the phase-fixed representative of parity."""
    P = np.zeros((d, d))
    P[(-np.arange(d)) % d, np.arange(d)] = 1.0
    return P


def zauner_matrix_standard(d):
    """The standard order-3 element [[0, -1], [1, -1]] mod d."""
    return np.array([[0, d - 1], [1, d - 1]])


def order3_elements(d):
    """All order-3 elements of SL(2, Z_d), lexicographic in (a, b, g, e)."""
    out = []
    I = np.eye(2, dtype=int)
    for a, b, g, e in itertools.product(range(d), repeat=4):
        if (a * e - b * g) % d != 1:
            continue
        M = np.array([[a, b], [g, e]])
        if np.array_equal(M, I):
            continue
        if np.array_equal((M @ M @ M) % d, I):
            out.append(M)
    return out


def _is_monomial(U, tol=1e-8):
    return bool(np.all(np.sum(np.abs(U) > tol, axis=1) == 1))


@functools.lru_cache(maxsize=None)
def canonical_order3(d):
    """Preferred order-3 symplectic for dimension d.

    The first order-3 element, in lexicographic order, whose unitary is
    monomial and admits the tabulated phase fix; if no such element exists
    (true already at d=5) the standard [[0,-1],[1,-1]] is used. Monomial
    representatives keep eigenbases sparse and reproducible.
    """
    for F in order3_elements(d):
        U = symplectic_unitary(F, d)
        if not _is_monomial(U):
            continue
        try:
            fix_phase_to_table(U, 3)
        except NoMatchingPhase:
            continue
        F.setflags(write=False)
        return F
    F = zauner_matrix_standard(d)
    F.setflags(write=False)
    return F


def eigenspace_basis(U, eigenvalue, tol=1e-8):
    """Orthonormal basis (columns) of the eigenvalue's eigenspace of unitary U."""
    dec = eig_unitary(U)
    mask = np.abs(dec.eigenvalues - eigenvalue) <= tol
    if not np.any(mask):
        raise EmptyEigenspace(f"no eigenvalue within {tol} of {eigenvalue}")
    return dec.eigenvectors[:, mask]


def crt_split_symplectic(F, n1, n2):
    """Reduce F mod n1*n2 to the pair acting on the tensor factors.

    With V the index permutation of crt_permutation and q1 = n2^{-1} mod n1,
    q2 = n1^{-1} mod n2, the factors are

        F1 = [[a, n2 b], [q1 g, e]] mod n1,   F2 = [[a, n1 b], [q2 g, e]] mod n2,

    and V U_F V^dag equals U_{F1} (x) U_{F2} up to global phase; that
    operator identity is certified here to 1e-8.
    """
    if np.gcd(n1, n2) != 1:
        raise NotCoprime(f"gcd({n1},{n2}) != 1")
    N = n1 * n2
    F = _as_modmatrix(F, N)
    if not is_symplectic(F, N):
        raise NotSymplectic(f"det != 1 mod {N}: {F.tolist()}")
    a, b, g, e = int(F[0, 0]), int(F[0, 1]), int(F[1, 0]), int(F[1, 1])
    q1, q2 = pow(n2, -1, n1), pow(n1, -1, n2)
    F1 = np.array([[a, n2 * b], [q1 * g, e]]) % n1
    F2 = np.array([[a, n1 * b], [q2 * g, e]]) % n2
    from .heisenberg import crt_permutation
    V = crt_permutation(n1, n2)
    A = V @ symplectic_unitary(F, N) @ V.T
    B = np.kron(symplectic_unitary(F1, n1), symplectic_unitary(F2, n2))
    k = np.unravel_index(np.argmax(np.abs(B)), B.shape)
    err = np.abs(A - (A[k] / B[k]) * B).max()
    if err > 1e-8:
        raise SicladderError(f"tensor split certificate failed: {err:.3e}")
    return F1, F2


def crt_glue_symplectic(F1, n1, F2, n2):
    """Inverse of crt_split_symplectic: the unique F mod n1*n2 splitting to (F1, F2)."""
    if np.gcd(n1, n2) != 1:
        raise NotCoprime(f"gcd({n1},{n2}) != 1")
    N = n1 * n2
    F1 = _as_modmatrix(F1, n1)
    F2 = _as_modmatrix(F2, n2)
    q1, q2 = pow(n2, -1, n1), pow(n1, -1, n2)
    # undo the clock-axis twist on each factor, then CRT entrywise
    G1 = np.array([[F1[0, 0], q1 * F1[0, 1]], [n2 * F1[1, 0], F1[1, 1]]]) % n1
    G2 = np.array([[F2[0, 0], q2 * F2[0, 1]], [n1 * F2[1, 0], F2[1, 1]]]) % n2
    u1 = n2 * q1  # 1 mod n1, 0 mod n2
    u2 = n1 * q2  # 0 mod n1, 1 mod n2
    F = (u1 * G1 + u2 * G2) % N
    chk1, chk2 = crt_split_symplectic(F, n1, n2)
    if not (np.array_equal(chk1, F1) and np.array_equal(chk2, F2)):
        raise SicladderError("glue/split round trip failed")
    return F
