"""Dense complex linear-algebra kernel.

Everything downstream (relations, theorem engines, the diagonal model's
truncations) is built on the handful of primitives here: Hermitian
eigendecomposition, Moore-Penrose inverses, PSD fractional powers, polar
decomposition, the Loewner order, spectra with a diagonalizability verdict,
and Sylvester intertwiner spaces.  Matrices are plain ``numpy`` arrays of
``complex128``; a :class:`Subspace` is an orthonormal column basis.

Two global conventions keep kernels consistent across operations:

* rank threshold: singular/eigen values below ``RANK_RTOL`` times the largest
  one are treated as zero everywhere (kernels, pseudo-inverses, PSD powers);
* identity checks default to relative Frobenius tolerance ``DEFAULT_TOL``,
  overridable per call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NotHermitian, NotPSD, NotSquare

RANK_RTOL = 1e-10
DEFAULT_TOL = 1e-8

__all__ = [
    "RANK_RTOL",
    "DEFAULT_TOL",
    "HermEig",
    "PolarParts",
    "Spectrum",
    "Intertwiners",
    "Subspace",
    "as_matrix",
    "frob",
    "opnorm",
    "herm",
    "hermitian_eig",
    "psd_power",
    "moore_penrose",
    "polar",
    "loewner_leq",
    "spectrum",
    "sylvester_intertwiners",
    "hausdorff_distance",
    "matrix_rank",
    "kernel_basis",
    "range_basis",
    "span",
    "full_space",
    "zero_space",
    "subspace_sum",
    "subspace_intersect",
    "subspace_complement",
    "subspace_contains",
    "subspace_distance",
    "subspace_equal",
]


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite 2-d complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={m.ndim}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise ValueError("matrix entries must be finite")
    return m


def frob(a) -> float:
    return float(np.linalg.norm(a, "fro"))


def opnorm(a) -> float:
    a = np.asarray(a)
    if a.size == 0 or not a.any():
        return 0.0
    return float(np.linalg.norm(a, 2))


def herm(a) -> np.ndarray:
    """Hermitian part (a + a*)/2."""
    a = as_matrix(a)
    return 0.5 * (a + a.conj().T)


def _require_square(a, who):
    if a.shape[0] != a.shape[1]:
        raise NotSquare(f"{who}: expected square matrix, got {a.shape}")


def _require_hermitian(a, tol, who):
    dev = frob(a - a.conj().T)
    if dev > tol * (1.0 + frob(a)):
        raise NotHermitian(f"{who}: deviation from Hermitian {dev:.3e} exceeds tolerance")


@dataclass(frozen=True)
class HermEig:
    """Spectral decomposition H = V diag(w) V* with w ascending, V unitary."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class PolarParts:
    """G = unitary_factor @ modulus with modulus = (G*G)^(1/2) PSD.

    ``unitary_factor`` is the canonical partial isometry with initial space
    ran(modulus); it is unitary exactly when G is invertible.
    """

    unitary_factor: np.ndarray
    modulus: np.ndarray


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    diagonalizable: bool
    eigvec_condition: float


@dataclass(frozen=True)
class Intertwiners:
    """Solution space of G T = S G plus a maximal-rank representative."""

    basis: list
    max_rank_element: np.ndarray
    rank: int


def hermitian_eig(H, tol: float = DEFAULT_TOL) -> HermEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Raises NotHermitian when ||H - H*||_F > tol * ||H||_F (with an absolute
    floor so the zero matrix passes), NoConvergence if LAPACK fails.
    """
    H = as_matrix(H)
    _require_square(H, "hermitian_eig")
    _require_hermitian(H, tol, "hermitian_eig")
    try:
        w, v = np.linalg.eigh(herm(H))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    return HermEig(eigenvalues=w, eigenvectors=v)


def psd_power(P, alpha: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Spectral power P^alpha of a PSD matrix.

    Eigenvalues below the global rank threshold are treated as exact zeros and
    stay zero for every alpha (for alpha < 0 this is the power of the
    Moore-Penrose inverse acting on ran P).
    """
    P = as_matrix(P)
    _require_square(P, "psd_power")
    dev = frob(P - P.conj().T)
    if dev > tol * (1.0 + frob(P)):
        raise NotPSD(f"psd_power: matrix is not Hermitian (deviation {dev:.3e})")
    w, v = np.linalg.eigh(herm(P))
    scale = max(float(w[-1]), 0.0) if w.size else 0.0
    if w.size and float(w[0]) < -tol * max(scale, 1.0):
        raise NotPSD(f"psd_power: min eigenvalue {w[0]:.3e} below -tol*||P||")
    cut = RANK_RTOL * scale
    wa = np.zeros_like(w)
    live = w > cut
    wa[live] = w[live] ** alpha
    return (v * wa) @ v.conj().T


def moore_penrose(T, atol: float = 0.0) -> np.ndarray:
    """Moore-Penrose pseudo-inverse via SVD with the global rank threshold.

    ``atol`` adds an absolute floor below which singular values count as
    zero; callers working with orthonormal data use it to keep numerical
    dust out of the inverse.
    """
    T = as_matrix(T)
    if T.size == 0:
        return T.conj().T.copy()
    u, s, vh = np.linalg.svd(T, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        return np.zeros((T.shape[1], T.shape[0]), dtype=np.complex128)
    cut = max(RANK_RTOL * s[0], atol)
    inv = np.where(s > cut, 1.0 / np.where(s > cut, s, 1.0), 0.0)
    return (vh.conj().T * inv) @ u.conj().T


def polar(G) -> PolarParts:
    """Polar decomposition G = U |G| of a square matrix.

    U is the partial isometry W_r V_r* from the thin SVD G = W diag(s) V*,
    i.e. the zero extension of the isometry ran|G| -> ran G; the modulus is
    V diag(s) V*.
    """
    G = as_matrix(G)
    _require_square(G, "polar")
    w, s, vh = np.linalg.svd(G)
    cut = RANK_RTOL * (s[0] if s.size else 0.0)
    r = int(np.count_nonzero(s > cut))
    u = w[:, :r] @ vh[:r, :]
    modulus = herm((vh.conj().T * s) @ vh)
    return PolarParts(unitary_factor=u, modulus=modulus)


def loewner_leq(P, Q, tol: float = DEFAULT_TOL):
    """Decide P <= Q in the Loewner order for Hermitian P, Q.

    Returns (flag, margin) where margin is the smallest eigenvalue of Q - P
    and flag is margin >= -tol * (1 + ||Q - P||).
    """
    P, Q = as_matrix(P), as_matrix(Q)
    if P.shape != Q.shape:
        raise NotSquare(f"loewner_leq: shape mismatch {P.shape} vs {Q.shape}")
    _require_hermitian(P, tol, "loewner_leq")
    _require_hermitian(Q, tol, "loewner_leq")
    D = herm(Q - P)
    w = np.linalg.eigvalsh(D)
    margin = float(w[0]) if w.size else 0.0
    flag = margin >= -tol * (1.0 + opnorm(D))
    return flag, margin


def _cluster(values, ctol):
    """Greedy chain clustering of complex values at distance ctol."""
    order = np.lexsort((values.imag, values.real))
    clusters = []
    for idx in order:
        z = values[idx]
        if clusters and abs(z - clusters[-1][-1]) <= ctol:
            clusters[-1].append(z)
        else:
            clusters.append([z])
    return clusters


def spectrum(T, tol: float = DEFAULT_TOL) -> Spectrum:
    """Eigenvalues of T plus a rank-test diagonalizability verdict.

    Eigenvalues within 100*tol*||T|| of each other are clustered; T is
    diagonalizable iff for each cluster (mean value lam, multiplicity m)
    rank(T - lam I) = n - m, ranks taken at the same 100*tol threshold.
    Rank tests degrade gracefully near Jordan blocks, unlike eigenvector
    inversion, which is why they decide the flag.
    """
    T = as_matrix(T)
    _require_square(T, "spectrum")
    n = T.shape[0]
    try:
        w, v = np.linalg.eig(T)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NoConvergence(str(exc)) from exc
    order = np.lexsort((w.imag, w.real))
    w = w[order]
    v = v[:, order]
    scale = max(opnorm(T), 1e-300)
    dtol = 100.0 * tol * scale
    diagonalizable = True
    for cluster in _cluster(w, dtol):
        m = len(cluster)
        if m == 1:
            continue
        lam = sum(cluster) / m
        s = np.linalg.svd(T - lam * np.eye(n), compute_uv=False)
        rank = int(np.count_nonzero(s > dtol))
        if rank != n - m:
            diagonalizable = False
            break
    cond = float(np.linalg.cond(v, 2)) if diagonalizable else float("inf")
    return Spectrum(eigenvalues=w, diagonalizable=diagonalizable, eigvec_condition=cond)


def sylvester_intertwiners(T, S, seed: int = 0, n_combos: int = 64) -> Intertwiners:
    """Basis of {G : G T = S G} and a maximal-rank element of the span.

    The space is the null space of the vectorized map G -> GT - SG.  The
    maximal-rank representative is found over ``n_combos`` seeded random unit
    combinations of the basis (maximal rank is attained on a Zariski-open
    subset, so random combinations find it with overwhelming probability while
    staying reproducible); ties in rank are broken by the smallest retained
    singular value.
    """
    T, S = as_matrix(T), as_matrix(S)
    _require_square(T, "sylvester_intertwiners")
    _require_square(S, "sylvester_intertwiners")
    n, p = T.shape[0], S.shape[0]
    M = np.kron(T.T, np.eye(p)) - np.kron(np.eye(n), S)
    u, s, vh = np.linalg.svd(M)
    cut = RANK_RTOL * (s[0] if s.size else 0.0)
    rank_m = int(np.count_nonzero(s > cut))
    null = vh[rank_m:, :].conj().T
    basis = [null[:, j].reshape((p, n), order="F") for j in range(null.shape[1])]
    if not basis:
        return Intertwiners(basis=[], max_rank_element=np.zeros((p, n), dtype=np.complex128), rank=0)
    rng = np.random.default_rng(seed)
    best = None
    best_key = (-1, -1.0)
    for _ in range(n_combos):
        c = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        c /= np.linalg.norm(c)
        cand = sum(ci * Gi for ci, Gi in zip(c, basis))
        sv = np.linalg.svd(cand, compute_uv=False)
        r = int(np.count_nonzero(sv > RANK_RTOL * (sv[0] if sv.size else 0.0)))
        key = (r, float(sv[r - 1]) if r > 0 else 0.0)
        if key > best_key:
            best_key = key
            best = cand
    return Intertwiners(basis=basis, max_rank_element=best, rank=best_key[0])


def hausdorff_distance(a, b) -> float:
    """Hausdorff distance between two finite sets of complex numbers."""
    a = np.atleast_1d(np.asarray(a, dtype=np.complex128))
    b = np.atleast_1d(np.asarray(b, dtype=np.complex128))
    if a.size == 0 and b.size == 0:
        return 0.0
    if a.size == 0 or b.size == 0:
        return float("inf")
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Subspace:
    """A subspace of C^ambient_dim held as an orthonormal column basis."""

    ambient_dim: int
    basis: np.ndarray
    tol: float = DEFAULT_TOL

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T


def span(
    vectors,
    ambient_dim=None,
    rtol: float = RANK_RTOL,
    atol: float = 0.0,
    tol: float = DEFAULT_TOL,
) -> Subspace:
    """Orthonormalize a spanning set of column vectors into a Subspace.

    ``atol`` is an absolute singular-value floor; pass it when the columns
    come from projections of orthonormal data, where an all-noise input must
    collapse to the zero subspace instead of being renormalized.
    """
    A = as_matrix(vectors) if np.asarray(vectors).size else np.zeros((ambient_dim or 0, 0), dtype=np.complex128)
    if ambient_dim is None:
        ambient_dim = A.shape[0]
    if A.shape[0] != ambient_dim:
        raise ValueError("ambient dimension mismatch")
    if A.shape[1] == 0 or not A.any():
        return Subspace(ambient_dim, np.zeros((ambient_dim, 0), dtype=np.complex128), tol)
    u, s, _ = np.linalg.svd(A, full_matrices=False)
    r = int(np.count_nonzero(s > max(rtol * s[0], atol)))
    return Subspace(ambient_dim, u[:, :r].copy(), tol)


def full_space(n: int, tol: float = DEFAULT_TOL) -> Subspace:
    return Subspace(n, np.eye(n, dtype=np.complex128), tol)


def zero_space(n: int, tol: float = DEFAULT_TOL) -> Subspace:
    return Subspace(n, np.zeros((n, 0), dtype=np.complex128), tol)


def matrix_rank(A, atol: float = 0.0) -> int:
    A = as_matrix(A)
    if A.size == 0 or not A.any():
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.count_nonzero(s > max(RANK_RTOL * s[0], atol)))


def kernel_basis(A, atol: float = 0.0) -> Subspace:
    """Orthonormal basis of ker A at the global rank threshold."""
    A = as_matrix(A)
    n = A.shape[1]
    if A.size == 0 or not A.any():
        return full_space(n)
    _, s, vh = np.linalg.svd(A)
    r = int(np.count_nonzero(s > max(RANK_RTOL * s[0], atol)))
    return Subspace(n, vh[r:, :].conj().T.copy())


def range_basis(A, atol: float = 0.0) -> Subspace:
    """Orthonormal basis of ran A at the global rank threshold."""
    A = as_matrix(A)
    m = A.shape[0]
    if A.size == 0 or not A.any():
        return zero_space(m)
    u, s, _ = np.linalg.svd(A)
    r = int(np.count_nonzero(s > max(RANK_RTOL * s[0], atol)))
    return Subspace(m, u[:, :r].copy())


def subspace_sum(*spaces: Subspace) -> Subspace:
    n = spaces[0].ambient_dim
    cols = [sp.basis for sp in spaces]
    return span(np.hstack(cols) if cols else np.zeros((n, 0)), ambient_dim=n)


def subspace_complement(sp: Subspace) -> Subspace:
    if sp.dim == 0:
        return full_space(sp.ambient_dim)
    u, s, _ = np.linalg.svd(sp.basis, full_matrices=True)
    return Subspace(sp.ambient_dim, u[:, sp.dim:].copy(), sp.tol)


def subspace_intersect(a: Subspace, b: Subspace) -> Subspace:
    """Intersection via one null-space computation on [B_a | -B_b]."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    if a.dim == 0 or b.dim == 0:
        return zero_space(a.ambient_dim)
    M = np.hstack([a.basis, -b.basis])
    _, s, vh = np.linalg.svd(M)
    cut = RANK_RTOL * (s[0] if s.size else 0.0)
    r = int(np.count_nonzero(s > cut))
    null = vh[r:, :].conj().T
    vecs = a.basis @ null[: a.dim, :]
    return span(vecs, ambient_dim=a.ambient_dim)


def subspace_contains(big: Subspace, small: Subspace, tol=None) -> bool:
    """small <= big, decided by the projection residual of small's basis."""
    if small.dim == 0:
        return True
    tol = big.tol if tol is None else tol
    resid = small.basis - big.projector() @ small.basis
    return opnorm(resid) <= tol


def subspace_containment_residual(big: Subspace, small: Subspace) -> float:
    if small.dim == 0:
        return 0.0
    return opnorm(small.basis - big.projector() @ small.basis)


def subspace_distance(a: Subspace, b: Subspace) -> float:
    """Spectral-norm gap ||P_a - P_b|| (sine of the largest principal angle)."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    return opnorm(a.projector() - b.projector())


def subspace_equal(a: Subspace, b: Subspace, tol=None) -> bool:
    tol = a.tol if tol is None else tol
    return a.dim == b.dim and subspace_distance(a, b) <= tol
