"""Independent brute-force oracles used to derive expected test values.

Each oracle deliberately avoids the code path it checks: characteristic
polynomials come from Newton's identities on traces of powers, feasibility
from a blind lambda sweep, diagonalizability from the index-one rank test,
and the relation form order from its definition on operator parts.
"""

import numpy as np


def charpoly_roots(H):
    """Eigenvalues via Newton's identities + companion-matrix roots."""
    H = np.asarray(H, dtype=np.complex128)
    n = H.shape[0]
    power = np.eye(n, dtype=np.complex128)
    traces = []
    for _ in range(n):
        power = power @ H
        traces.append(np.trace(power))
    coeffs = [1.0 + 0j]
    for k in range(1, n + 1):
        s = traces[k - 1]
        for j in range(1, k):
            s += coeffs[j] * traces[k - 1 - j]
        coeffs.append(-s / k)
    return np.roots(np.array(coeffs))


def penrose_residuals(T, P):
    """Relative residuals of the four Penrose identities for P ~ T^+."""
    T, P = np.asarray(T), np.asarray(P)
    scale = 1.0 + np.linalg.norm(T) + np.linalg.norm(P)
    return [
        np.linalg.norm(T @ P @ T - T) / scale,
        np.linalg.norm(P @ T @ P - P) / scale,
        np.linalg.norm((T @ P).conj().T - T @ P) / scale,
        np.linalg.norm((P @ T).conj().T - P @ T) / scale,
    ]


def lambda_sweep_feasible(T, B, points=64, tol=1e-8):
    """Does some lambda on a fixed geometric grid make lambda T*B - T*T PSD?

    The PSD test is relative to ||T*T||, not to the swept matrix, so a
    fixed-size negative dip is never absorbed by a huge lambda.
    """
    T, B = np.asarray(T), np.asarray(B)
    M = T.conj().T @ B
    M = 0.5 * (M + M.conj().T)
    TT = T.conj().T @ T
    floor = -tol * (1.0 + np.linalg.norm(TT, 2))
    scale = max(np.linalg.norm(TT, 2), 1e-12) / max(np.linalg.norm(M, 2), 1e-12)
    for lam in np.geomspace(1e-8, 1e8, points) * scale:
        gap = lam * M - TT
        gap = 0.5 * (gap + gap.conj().T)
        w = np.linalg.eigvalsh(gap)
        if w[0] >= floor:
            return True
    return False


def index_one_diagonalizable(T, rtol=1e-9):
    """Diagonalizable iff rank(T - lam I) = rank((T - lam I)^2) per eigenvalue.

    Uses clustered eigenvalues only to pick probe points; the verdict itself
    comes from the rank-of-powers criterion (index of each eigenvalue is 1).
    """
    T = np.asarray(T, dtype=np.complex128)
    n = T.shape[0]
    w = np.linalg.eigvals(T)
    scale = max(np.linalg.norm(T, 2), 1e-300)
    probes = []
    for lam in w:
        if all(abs(lam - p) > 1e-6 * scale for p in probes):
            probes.append(lam)
    def rank(a):
        s = np.linalg.svd(a, compute_uv=False)
        return int(np.count_nonzero(s > 1e-6 * scale * max(1.0, s[0] / max(scale, 1e-300))))
    for lam in probes:
        A = T - lam * np.eye(n)
        if rank(A) != rank(A @ A):
            return False
    return True


def form_order_leq_definition(Tlo, Thi, tol=1e-8):
    """Form order by definition: domain inclusion plus norm comparison of the
    operator-part square roots on the form domain of the larger relation."""
    from psdfactor.linrel import rel_parts
    from psdfactor.numkernel import herm, psd_power, subspace_contains, opnorm

    plo, phi = rel_parts(Tlo), rel_parts(Thi)
    if not subspace_contains(plo.dom, phi.dom, tol=tol):
        return False
    rlo = psd_power(herm(plo.operator_part_matrix), 0.5)
    rhi = psd_power(herm(phi.operator_part_matrix), 0.5)
    D = phi.dom.basis
    Q = herm(D.conj().T @ (rhi.conj().T @ rhi - rlo.conj().T @ rlo) @ D)
    if Q.size == 0:
        return True
    w = np.linalg.eigvalsh(Q)
    return bool(w[0] >= -tol * (1.0 + opnorm(Q)))


def sylvester_dimension(eigs_T, eigs_S, tol=1e-9):
    """dim{G : GT = SG} for diagonalizable T, S = sum of multiplicity products
    over shared eigenvalues."""
    eigs_T = list(eigs_T)
    eigs_S = list(eigs_S)
    reps = []
    for lam in eigs_T + eigs_S:
        if all(abs(lam - r) > tol for r in reps):
            reps.append(lam)
    total = 0
    for r in reps:
        mt = sum(1 for lam in eigs_T if abs(lam - r) <= tol)
        ms = sum(1 for lam in eigs_S if abs(lam - r) <= tol)
        total += mt * ms
    return total


def hausdorff(a, b):
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def random_psd(rng, n, singular=False, floor=0.1, top=2.0):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, _ = np.linalg.qr(A)
    w = rng.uniform(floor, top, size=n)
    if singular and n > 1:
        w[: rng.integers(1, n)] = 0.0
    H = (q * w) @ q.conj().T
    return 0.5 * (H + H.conj().T)


def random_unitary(rng, n):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q


def conditioned_invertible(rng, n, cond):
    """Invertible matrix with 2-norm condition number exactly cond."""
    q1 = random_unitary(rng, n)
    q2 = random_unitary(rng, n)
    if n == 1:
        s = np.array([1.0])
    else:
        s = np.exp(rng.uniform(np.log(1.0 / cond), 0.0, size=n))
        s[0], s[-1] = 1.0, 1.0 / cond
    return (q1 * s) @ q2.conj().T
