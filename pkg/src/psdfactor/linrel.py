"""Finite-dimensional linear relations (multivalued operators).

A relation T from C^n to C^m is stored as an orthonormal basis of its graph,
a subspace of C^(n+m) of stacked pairs (x; y).  All relations are closed
(subspaces of a finite-dimensional space are closed), so closure operations
are identities here; the API still mirrors the closure-heavy statements of
the unbounded theory so the factor engines can follow them verbatim.

The decomposition T = T_s (+) T_mul into the operator part T_s = P_s T and
the purely multivalued part {0} x mul T underlies most operations; the
operator part is carried as an ordinary matrix that vanishes on (dom T)^perp.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from .errors import DimensionMismatch, NotNonnegSelfadjoint, NotSquare
from .numkernel import (
    DEFAULT_TOL,
    Subspace,
    as_matrix,
    herm,
    moore_penrose,
    opnorm,
    psd_power,
    span,
    subspace_contains,
    subspace_distance,
    subspace_intersect,
)

__all__ = [
    "LinRel",
    "RelParts",
    "RelFlags",
    "rel_from_matrix",
    "rel_from_graph",
    "rel_identity",
    "rel_zero",
    "rel_mul_everything",
    "rel_parts",
    "rel_adjoint",
    "rel_inverse",
    "rel_compose",
    "rel_restrict",
    "rel_classify",
    "rel_sqrt",
    "rel_order_leq",
    "rel_moore_penrose",
    "rel_scale",
    "rel_plusdot",
    "rel_equal",
    "rel_contains",
    "rel_distance",
    "resolvent_contraction",
]


# Graph bases are orthonormal, so any block extracted from one carries
# singular values that are either honest cosines or pure floating-point
# dust; this floor separates the two.
GRAPH_ATOL = 1e-12


@dataclass(frozen=True)
class LinRel:
    """A linear relation C^dom_dim -> C^codom_dim as a graph subspace."""

    dom_dim: int
    codom_dim: int
    graph: Subspace
    tol: float = DEFAULT_TOL

    @property
    def graph_dim(self) -> int:
        return self.graph.dim

    def blocks(self):
        """(X, Y) with graph basis columns stacked as (x; y)."""
        B = self.graph.basis
        return B[: self.dom_dim, :], B[self.dom_dim :, :]


@dataclass(frozen=True)
class RelParts:
    dom: Subspace
    ran: Subspace
    ker: Subspace
    mul: Subspace
    operator_part_matrix: np.ndarray


@dataclass(frozen=True)
class RelFlags:
    symmetric: bool
    nonnegative: bool
    selfadjoint: bool


def rel_from_graph(vectors, dom_dim: int, codom_dim: int, tol: float = DEFAULT_TOL) -> LinRel:
    """Relation spanned by stacked (x; y) columns (orthonormalized here)."""
    g = span(vectors, ambient_dim=dom_dim + codom_dim, tol=tol)
    return LinRel(dom_dim, codom_dim, g, tol)


def rel_from_matrix(M, tol: float = DEFAULT_TOL) -> LinRel:
    """Graph {(x, Mx)} of an everywhere-defined matrix."""
    M = as_matrix(M)
    m, n = M.shape
    stacked = np.vstack([np.eye(n, dtype=np.complex128), M])
    return rel_from_graph(stacked, n, m, tol)


def rel_identity(n: int, tol: float = DEFAULT_TOL) -> LinRel:
    return rel_from_matrix(np.eye(n), tol)


def rel_zero(n: int, m: int, tol: float = DEFAULT_TOL) -> LinRel:
    return rel_from_matrix(np.zeros((m, n)), tol)


def rel_mul_everything(n: int, m: int, tol: float = DEFAULT_TOL) -> LinRel:
    """The relation {0} x C^m from C^n to C^m."""
    vecs = np.vstack([np.zeros((n, m)), np.eye(m)])
    return rel_from_graph(vecs, n, m, tol)


def rel_parts(T: LinRel) -> RelParts:
    """dom/ran/ker/mul subspaces and the zero-extended operator-part matrix.

    mul T = T(0) and ker T = {x : (x, 0) in T}; dim dom + dim mul equals the
    graph dimension.  The operator part satisfies T_s x = P_s y for every
    (x, y) in T, where P_s projects onto (mul T)^perp, and vanishes on
    (dom T)^perp.
    """
    X, Y = T.blocks()
    dom = span(X, ambient_dim=T.dom_dim, atol=GRAPH_ATOL, tol=T.tol)
    ran = span(Y, ambient_dim=T.codom_dim, atol=GRAPH_ATOL, tol=T.tol)
    mul = _second_component_at_zero(X, Y, T.codom_dim)
    ker = _second_component_at_zero(Y, X, T.dom_dim)
    P_s = np.eye(T.codom_dim, dtype=np.complex128) - mul.projector()
    ts = P_s @ Y @ moore_penrose(X, atol=GRAPH_ATOL)
    return RelParts(dom=dom, ran=ran, ker=ker, mul=mul, operator_part_matrix=ts)


def _second_component_at_zero(X, Y, amb):
    """span{y : (0, y) in the graph}, i.e. Y restricted to ker X."""
    if X.shape[1] == 0:
        return nk.zero_space(amb)
    kerX = nk.kernel_basis(X, atol=GRAPH_ATOL)
    return span(Y @ kerX.basis, ambient_dim=amb, atol=GRAPH_ATOL)


def operator_part_relation(T: LinRel) -> LinRel:
    """T_s = P_s T as a relation on dom T (single valued, same domain)."""
    parts = rel_parts(T)
    D = parts.dom.basis
    vecs = np.vstack([D, parts.operator_part_matrix @ D])
    return rel_from_graph(vecs, T.dom_dim, T.codom_dim, T.tol)


def rel_adjoint(T: LinRel) -> LinRel:
    """graph(T*) = orthogonal complement of J graph(T), J(x, y) = (y, -x)."""
    X, Y = T.blocks()
    flipped = span(np.vstack([Y, -X]), ambient_dim=T.dom_dim + T.codom_dim, tol=T.tol)
    comp = nk.subspace_complement(flipped)
    return LinRel(T.codom_dim, T.dom_dim, comp, T.tol)


def rel_inverse(T: LinRel) -> LinRel:
    X, Y = T.blocks()
    g = span(np.vstack([Y, X]), ambient_dim=T.dom_dim + T.codom_dim, tol=T.tol)
    return LinRel(T.codom_dim, T.dom_dim, g, T.tol)


def rel_compose(S: LinRel, T: LinRel) -> LinRel:
    """The product S T = {(x, z) : exists y, (x, y) in T, (y, z) in S}.

    Computed as one orthonormal intersection of graph(T) x L with
    H x graph(S) inside H x K x L, projected onto the (x, z) coordinates.
    """
    if T.codom_dim != S.dom_dim:
        raise DimensionMismatch(
            f"rel_compose: codomain {T.codom_dim} of T != domain {S.dom_dim} of S"
        )
    nH, nK, nL = T.dom_dim, T.codom_dim, S.codom_dim
    Xt, Yt = T.blocks()
    Xs, Ys = S.blocks()
    gt = T.graph_dim
    gs = S.graph_dim
    left = np.zeros((nH + nK + nL, gt + nL), dtype=np.complex128)
    left[: nH + nK, :gt] = np.vstack([Xt, Yt])
    left[nH + nK :, gt:] = np.eye(nL)
    right = np.zeros((nH + nK + nL, nH + gs), dtype=np.complex128)
    right[:nH, :nH] = np.eye(nH)
    right[nH:, nH:] = np.vstack([Xs, Ys])
    inter = subspace_intersect(
        span(left, ambient_dim=nH + nK + nL), span(right, ambient_dim=nH + nK + nL)
    )
    B = inter.basis
    proj = np.vstack([B[:nH, :], B[nH + nK :, :]])
    graph = span(proj, ambient_dim=nH + nL, atol=GRAPH_ATOL)
    return LinRel(nH, nL, graph, min(S.tol, T.tol))


def rel_restrict(B: LinRel, D: Subspace) -> LinRel:
    """B restricted to D: graph(B) intersected with D x K."""
    if D.ambient_dim != B.dom_dim:
        raise DimensionMismatch("rel_restrict: subspace lives in the wrong space")
    amb = B.dom_dim + B.codom_dim
    big = np.zeros((amb, D.dim + B.codom_dim), dtype=np.complex128)
    big[: B.dom_dim, : D.dim] = D.basis
    big[B.dom_dim :, D.dim :] = np.eye(B.codom_dim)
    inter = subspace_intersect(B.graph, span(big, ambient_dim=amb))
    return LinRel(B.dom_dim, B.codom_dim, inter, B.tol)


def rel_classify(T: LinRel, tol=None) -> RelFlags:
    """Symmetry/nonnegativity of the graph form <y, x>, and selfadjointness.

    With graph basis pairs (x_i, y_i), the form matrix is F = X* Y; the
    relation is symmetric iff F is Hermitian at tol, nonnegative iff F is
    additionally PSD, selfadjoint iff graph(T) and graph(T*) coincide.
    """
    if T.dom_dim != T.codom_dim:
        raise NotSquare("rel_classify: relation is not square")
    tol = T.tol if tol is None else tol
    X, Y = T.blocks()
    F = X.conj().T @ Y
    sym = nk.frob(F - F.conj().T) <= tol * (1.0 + nk.frob(F))
    nonneg = False
    if sym:
        w = np.linalg.eigvalsh(herm(F)) if F.size else np.zeros(0)
        nonneg = w.size == 0 or float(w[0]) >= -tol * (1.0 + opnorm(F))
    selfadj = subspace_distance(T.graph, rel_adjoint(T).graph) <= tol
    return RelFlags(symmetric=sym, nonnegative=nonneg, selfadjoint=selfadj)


def _require_nonneg_selfadjoint(T, who, tol=None):
    flags = rel_classify(T, tol=tol)
    if not (flags.selfadjoint and flags.nonnegative):
        raise NotNonnegSelfadjoint(f"{who}: relation is not nonnegative selfadjoint")


def rel_sqrt(T: LinRel) -> LinRel:
    """Square root of a nonnegative selfadjoint relation.

    The operator part gets its PSD square root on dom T; the multivalued part
    is preserved, matching (T^(1/2))_s = (T_s)^(1/2).
    """
    _require_nonneg_selfadjoint(T, "rel_sqrt")
    parts = rel_parts(T)
    root = psd_power(herm(parts.operator_part_matrix), 0.5)
    D = parts.dom.basis
    M = parts.mul.basis
    n = T.dom_dim
    vecs = np.hstack(
        [
            np.vstack([D, root @ D]),
            np.vstack([np.zeros((n, M.shape[1])), M]),
        ]
    )
    return rel_from_graph(vecs, n, n, T.tol)


def resolvent_contraction(T: LinRel) -> np.ndarray:
    """The everywhere-defined contraction (I + T)^(-1) of a nonneg selfadjoint T.

    Built straight from the graph: (x + y, x) for (x, y) in T.  The map
    c -> (X + Y)c is invertible because <y, x> >= 0, so no splitting into
    operator and mul parts is needed.
    """
    X, Y = T.blocks()
    if X.shape[1] != T.dom_dim:
        raise NotNonnegSelfadjoint("resolvent_contraction: graph dimension != ambient dimension")
    A = X + Y
    C = np.linalg.solve(A.conj().T, X.conj().T).conj().T
    return herm(C)


def rel_order_leq(Tlo: LinRel, Thi: LinRel, tol=None) -> bool:
    """Form order Tlo <= Thi for nonnegative selfadjoint relations.

    Decided by the resolvent criterion: (I + Thi)^(-1) <= (I + Tlo)^(-1) in
    the Loewner order; the purely multivalued relation dominates everything
    since its resolvent transform is 0.
    """
    tol = Tlo.tol if tol is None else tol
    _require_nonneg_selfadjoint(Tlo, "rel_order_leq", tol=tol)
    _require_nonneg_selfadjoint(Thi, "rel_order_leq", tol=tol)
    Clo = resolvent_contraction(Tlo)
    Chi = resolvent_contraction(Thi)
    flag, _ = nk.loewner_leq(Chi, Clo, tol=tol)
    return flag


def rel_scale(T: LinRel, c: float) -> LinRel:
    """The relation cT = {(x, cy)}."""
    X, Y = T.blocks()
    return rel_from_graph(np.vstack([X, c * Y]), T.dom_dim, T.codom_dim, T.tol)


def rel_plusdot(R: LinRel, extra_pairs) -> LinRel:
    """Componentwise sum of graph(R) with extra stacked (x; y) columns."""
    vecs = np.hstack([R.graph.basis, as_matrix(extra_pairs)]) if np.asarray(extra_pairs).size else R.graph.basis
    return rel_from_graph(vecs, R.dom_dim, R.codom_dim, R.tol)


def rel_moore_penrose(T: LinRel) -> LinRel:
    """Moore-Penrose inverse: the matrix pseudo-inverse of the operator part.

    The defining projection identities survive in relation form as

        T+ T = P_(ker T)^perp restricted to dom T,
        T T+ = graph(P_(ker T*)^perp) (+) ({0} x mul T),

    which for single-valued T collapse to the classical ones.
    """
    parts = rel_parts(T)
    return rel_from_matrix(moore_penrose(parts.operator_part_matrix), T.tol)


def rel_equal(A: LinRel, B: LinRel, tol=None) -> bool:
    tol = A.tol if tol is None else tol
    return (
        A.dom_dim == B.dom_dim
        and A.codom_dim == B.codom_dim
        and subspace_distance(A.graph, B.graph) <= tol
    )


def rel_distance(A: LinRel, B: LinRel) -> float:
    return subspace_distance(A.graph, B.graph)


def rel_contains(big: LinRel, small: LinRel, tol=None) -> bool:
    """graph(small) <= graph(big) by projection residual."""
    tol = big.tol if tol is None else tol
    return subspace_contains(big.graph, small.graph, tol=tol)


def rel_containment_residual(big: LinRel, small: LinRel) -> float:
    return nk.subspace_containment_residual(big.graph, small.graph)
