"""Theorem engines: trivial values, planted instances, and oracle checks."""


import numpy as np
import pytest

from psdfactor import factor
from psdfactor import numkernel as nk
from psdfactor.errors import HypothesisFailed, NotScalarNonneg
from psdfactor.linrel import (
    rel_adjoint,
    rel_classify,
    rel_compose,
    rel_contains,
    rel_distance,
    rel_equal,
    rel_from_graph,
    rel_from_matrix,
    rel_inverse,
    rel_order_leq,
    rel_parts,
    rel_scale,
)
from psdfactor.numkernel import frob, herm, opnorm

from oracles import (
    conditioned_invertible,
    hausdorff,
    index_one_diagonalizable,
    lambda_sweep_feasible,
    random_psd,
    random_unitary,
)


# ---------------------------------------------------------------------- douglas


def test_douglas_t_equals_b():
    rng = np.random.default_rng(0)
    B = random_psd(rng, 3, singular=True)
    sol = factor.douglas_solve(B, B)
    proj = B @ np.linalg.pinv(B)
    assert sol.feasible
    assert frob(sol.Y - proj) <= 1e-10
    assert abs(sol.c - 1.0) <= 1e-10


def test_douglas_kernel_obstruction():
    sol = factor.douglas_solve(np.diag([1.0, 1.0]), np.diag([1.0, 0.0]))
    assert not sol.feasible


def test_douglas_planted():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n = int(rng.integers(2, 6))
        X = random_psd(rng, n)
        B = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        T = X @ B
        sol = factor.douglas_solve(T, B)
        assert sol.feasible
        assert sol.c <= opnorm(X) + 1e-8
        assert frob(sol.Y @ B - T) <= 1e-8 * (1 + frob(T))
        # ran Y <= ran T and ker B* <= ker Y
        assert nk.subspace_contains(nk.range_basis(T), nk.range_basis(sol.Y), tol=1e-8)
        kb = nk.kernel_basis(B.conj().T)
        if kb.dim:
            assert opnorm(sol.Y @ kb.basis) <= 1e-9


# ------------------------------------------------------------------------- seb


def test_seb_trivial_scalar():
    cert = factor.seb_solve(np.eye(2), 2 * np.eye(2))
    assert cert.feasible
    assert abs(cert.lambda_star - 0.5) <= 1e-12
    assert frob(cert.X - 0.5 * np.eye(2)) <= 1e-12


def test_seb_zero_operator():
    cert = factor.seb_solve(np.zeros((3, 3)), random_psd(np.random.default_rng(2), 3))
    assert cert.feasible
    assert cert.lambda_star == 0.0
    assert frob(cert.X) == 0.0


def test_seb_hypothesis_gate():
    with pytest.raises(HypothesisFailed):
        factor.seb_solve(np.array([[0.0, 1.0], [0.0, 0.0]]), np.eye(2))
    with pytest.raises(HypothesisFailed):
        factor.seb_solve(-np.eye(2), np.eye(2))


def test_seb_planted_round_trip():
    rng = np.random.default_rng(3)
    for trial in range(100):
        n = int(rng.integers(2, 9))
        X = random_psd(rng, n, singular=(trial % 4 == 0))
        B = random_psd(rng, n, singular=(trial % 3 == 0))
        T = X @ B
        cert = factor.seb_solve(T, B)
        assert cert.feasible
        assert cert.residual_xb_t <= 1e-8 * (1 + frob(T))
        assert cert.norm_X <= cert.lambda_star + 1e-8
        # ker X = ker T* by rank
        assert nk.matrix_rank(cert.X) == nk.matrix_rank(T.conj().T)
        kt = nk.kernel_basis(T.conj().T)
        if kt.dim:
            assert opnorm(cert.X @ kt.basis) <= 1e-8 * (1 + cert.norm_X)
        # the lambda-sweep of lam*T*B - T*T confirms feasibility at lambda*
        M = herm(T.conj().T @ B)
        gap = herm(cert.lambda_star * M - T.conj().T @ T)
        w = np.linalg.eigvalsh(gap)
        assert w[0] >= -1e-8 * (1 + abs(w[-1]))
        # by-product of the construction: T*B <= ||X|| B*B
        flag, _ = nk.loewner_leq(M, cert.norm_X * (B.conj().T @ B), tol=1e-8)
        assert flag


def test_seb_soundness_against_sweep_oracle():
    rng = np.random.default_rng(4)
    for trial in range(120):
        n = int(rng.integers(2, 9))
        B = random_psd(rng, n, singular=True)
        if trial % 2 == 0:
            T = random_psd(rng, n) @ B
        else:
            P = np.eye(n) - B @ np.linalg.pinv(B)
            D = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            T = random_psd(rng, n) @ B + P @ D
        cert = factor.seb_solve(T, B)
        assert cert.feasible == lambda_sweep_feasible(T, B)


def test_seb_lambda_star_minimal():
    rng = np.random.default_rng(5)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        X = random_psd(rng, n)
        B = random_psd(rng, n)
        T = X @ B
        cert = factor.seb_solve(T, B)
        M = herm(T.conj().T @ B)
        shrunk = herm(0.99 * cert.lambda_star * M - T.conj().T @ T)
        assert np.linalg.eigvalsh(shrunk)[0] < 0  # 0.99 lambda* no longer works


# ---------------------------------------------------------------- seb relation


def test_seb_relation_degenerate_matrix_case():
    rng = np.random.default_rng(6)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        X = random_psd(rng, n)
        B = random_psd(rng, n, singular=bool(rng.integers(0, 2)))
        T = X @ B
        cm = factor.seb_solve(T, B)
        cr = factor.seb_relation_solve(rel_from_matrix(T), rel_from_matrix(B))
        assert cr.feasible == cm.feasible
        assert abs(cr.lambda_star - cm.lambda_star) <= 1e-8 * (1 + cm.lambda_star)
        assert frob(cr.X - cm.X) <= 1e-7 * (1 + frob(cm.X))


def _planted_relation_pair(rng, n, mul_dim, feasible=True):
    """T with mul part W, B selfadjoint with mul B = W <= ker (T_s)*.

    On U = W^perp the pair reduces to a matrix problem T_u (X_u B_u or an
    obstructed variant), rotated by a random unitary so nothing is axis
    aligned.
    """
    Q = random_unitary(rng, n)
    U, W = Q[:, : n - mul_dim], Q[:, n - mul_dim :]
    k = n - mul_dim
    X_u = random_psd(rng, k)
    B_u = random_psd(rng, k, singular=not feasible)
    if feasible:
        T_u = X_u @ B_u
    else:
        kerb = nk.kernel_basis(B_u)
        T_u = X_u @ B_u + (rng.uniform(0.5, 1.5)) * (
            np.eye(k) - B_u @ np.linalg.pinv(B_u)
        ) @ random_psd(rng, k)
        if opnorm(T_u @ kerb.basis) < 0.1:
            T_u = T_u + 0.5 * kerb.basis @ kerb.basis.conj().T
    t_vecs = np.vstack([U, U @ T_u.conj().T.conj()])  # placeholder, replaced below
    # graph of T: (U c, U T_u c + anything in W)
    t_graph = np.hstack(
        [np.vstack([U, U @ T_u]), np.vstack([np.zeros((n, mul_dim)), W])]
    )
    T = rel_from_graph(t_graph, n, n)
    b_graph = np.hstack(
        [np.vstack([U, U @ B_u]), np.vstack([np.zeros((n, mul_dim)), W])]
    )
    B = rel_from_graph(b_graph, n, n)
    return T, B, T_u, B_u, U, W


def test_seb_relation_block_reduction():
    rng = np.random.default_rng(7)
    for trial in range(40):
        n = int(rng.integers(3, 7))
        mul_dim = int(rng.integers(1, n - 1))
        feasible = trial % 3 != 0
        T, B, T_u, B_u, U, W = _planted_relation_pair(rng, n, mul_dim, feasible)
        sub = factor.seb_solve(T_u, B_u)
        cert = factor.seb_relation_solve(T, B)
        assert cert.feasible == sub.feasible
        if cert.feasible:
            assert abs(cert.lambda_star - sub.lambda_star) <= 1e-7 * (1 + sub.lambda_star)
            assert cert.checks["restricted_product_chain"] <= 1e-8
            assert cert.checks["inclusion_in_Ts"] <= 1e-8
            # equivalence back-direction: the certified lambda* witnesses (i)
            M_rel = rel_compose(rel_adjoint(T), B)
            R_rel = rel_compose(rel_adjoint(T), T)
            assert rel_order_leq(R_rel, rel_scale(M_rel, cert.lambda_star * (1 + 1e-9)))


def test_seb_relation_mul_b_forces_x_zero_there():
    rng = np.random.default_rng(8)
    for _ in range(20):
        n = 4
        T, B, *_ = _planted_relation_pair(rng, n, 1, feasible=True)
        cert = factor.seb_relation_solve(T, B)
        mulB = rel_parts(B).mul
        assert opnorm(cert.X @ mulB.basis) <= 1e-9 * (1 + cert.norm_X)


def test_seb_relation_hypothesis_gate():
    # mul B not inside ker (T_s)*: T surjective operator, B with mul part
    rng = np.random.default_rng(9)
    T = rel_from_matrix(np.eye(3))
    b_graph = np.hstack(
        [
            np.vstack([np.eye(3)[:, :2], rng.standard_normal((3, 2))]),
            np.vstack([np.zeros((3, 1)), rng.standard_normal((3, 1))]),
        ]
    )
    B = rel_from_graph(b_graph, 3, 3)
    with pytest.raises(HypothesisFailed):
        factor.seb_relation_solve(T, B)


# --------------------------------------------------------------------- reverse


def test_reverse_identity():
    cert = factor.reverse_solve(rel_from_matrix(np.eye(2)), rel_from_matrix(np.eye(2)))
    assert cert.feasible
    assert abs(cert.eta_star - 1.0) <= 1e-10
    assert rel_equal(cert.Y, rel_from_matrix(np.eye(2)), tol=1e-9)


def test_reverse_diagonal():
    T = np.diag([2.0, 3.0])
    cert = factor.reverse_solve(rel_from_matrix(T), rel_from_matrix(np.eye(2)))
    assert cert.feasible
    assert abs(cert.eta_star - 2.0) <= 1e-10
    assert rel_equal(cert.Y, rel_from_matrix(T), tol=1e-9)


def test_reverse_direct_inversion_oracle():
    rng = np.random.default_rng(10)
    for _ in range(40):
        n = int(rng.integers(2, 7))
        B = random_psd(rng, n) + 0.3 * np.eye(n)
        M = random_psd(rng, n) + 0.3 * np.eye(n)
        T = np.linalg.inv(B.conj().T) @ M  # so B*T = M is PSD
        cert = factor.reverse_solve(rel_from_matrix(T), rel_from_matrix(B))
        assert cert.feasible
        Y_direct = np.linalg.inv(B.conj().T) @ T.conj().T
        assert rel_distance(cert.Y, rel_from_matrix(Y_direct)) <= 1e-8
        assert cert.residuals["restricted_product_chain"] <= 1e-8
        assert cert.residuals["adjoint_operator_factorization"] <= 1e-8


def test_reverse_duality_reciprocal():
    rng = np.random.default_rng(11)
    for _ in range(40):
        n = int(rng.integers(2, 7))
        B = random_psd(rng, n) + 0.2 * np.eye(n)
        M = random_psd(rng, n) + 0.2 * np.eye(n)
        T = np.linalg.inv(B.conj().T) @ M
        rev = factor.reverse_solve(rel_from_matrix(T), rel_from_matrix(B))
        dual = factor.seb_relation_solve(
            rel_inverse(rel_adjoint(rel_from_matrix(T))),
            rel_inverse(rel_adjoint(rel_from_matrix(B))),
        )
        assert dual.feasible and rev.feasible
        assert abs(rev.eta_star * dual.lambda_star - 1.0) <= 1e-8


def test_reverse_hypothesis_gate():
    with pytest.raises(HypothesisFailed):
        factor.reverse_solve(
            rel_from_matrix(np.array([[0.0, 1.0], [0.0, 0.0]])), rel_from_matrix(np.eye(2))
        )
    # ker B* not inside ker T* + mul T
    with pytest.raises(HypothesisFailed):
        factor.reverse_solve(
            rel_from_matrix(np.eye(2)), rel_from_matrix(np.diag([1.0, 0.0]))
        )


# ------------------------------------------------------- similarity and forms


def test_psd_similarity_examples():
    sim = factor.psd_similarity_decide(np.diag([1.0, 2.0]))
    assert sim.accept
    assert frob(sim.S - np.diag([1.0, 2.0])) <= 1e-12
    assert not factor.psd_similarity_decide(np.array([[0.0, 1.0], [0.0, 0.0]])).accept
    sim = factor.psd_similarity_decide(np.array([[2.0, 1.0], [0.0, 1.0]]))
    assert sim.accept
    assert hausdorff(np.diag(sim.S), [1.0, 2.0]) <= 1e-9
    assert not factor.psd_similarity_decide(np.diag([1.0, -2.0])).accept
    assert not factor.psd_similarity_decide(np.array([[0.0, -1.0], [1.0, 0.0]])).accept


def test_psd_similarity_scale_invariance():
    rng = np.random.default_rng(12)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        G = conditioned_invertible(rng, n, 50.0)
        D = np.diag(np.sort(rng.uniform(0.2, 3.0, size=n)))
        while np.min(np.diff(np.diag(D).real)) < 0.05:
            D = np.diag(np.sort(rng.uniform(0.2, 3.0, size=n)))
        T = G @ D @ np.linalg.inv(G)
        c = float(rng.uniform(0.5, 4.0))
        a, b = factor.psd_similarity_decide(T), factor.psd_similarity_decide(c * T)
        assert a.accept and b.accept
        assert frob(b.S - c * a.S) <= 1e-7 * (1 + frob(a.S))
        # same eigenvector columns up to phase
        for j in range(n):
            overlap = abs(np.vdot(a.G[:, j], b.G[:, j]))
            assert overlap >= 1 - 1e-7


def test_psd_similarity_agrees_with_index_oracle():
    rng = np.random.default_rng(13)
    for trial in range(60):
        n = int(rng.integers(2, 6))
        if trial % 3 == 0:
            J = np.eye(n, dtype=complex) * rng.uniform(0.5, 2.0)
            J[0, 1 % n] = 1.0  # Jordan block at the top
            Q = conditioned_invertible(rng, n, 10.0)
            T = Q @ J @ np.linalg.inv(Q)
        else:
            G = conditioned_invertible(rng, n, 100.0)
            vals = rng.uniform(0.1, 3.0, size=n)
            vals = np.sort(vals)
            while n > 1 and np.min(np.diff(vals)) < 0.05:
                vals = np.sort(rng.uniform(0.1, 3.0, size=n))
            T = G @ np.diag(vals) @ np.linalg.inv(G)
        sim = factor.psd_similarity_decide(T)
        assert sim.accept == index_one_diagonalizable(T)


def test_wsimilar_psd_input_collapses():
    rng = np.random.default_rng(14)
    P = random_psd(rng, 3)
    forms = factor.wsimilar_forms(P)
    assert frob(forms.X - np.eye(3)) <= 1e-7
    assert frob(forms.S - P) <= 1e-6
    assert forms.plusdot_ok


def test_wsimilar_six_identities_and_kernel():
    rng = np.random.default_rng(15)
    for trial in range(40):
        n = int(rng.integers(2, 6))
        G = conditioned_invertible(rng, n, 1e3)
        vals = np.sort(rng.uniform(0.3, 3.0, size=n))
        while n > 1 and np.min(np.diff(vals)) < 0.05:
            vals = np.sort(rng.uniform(0.3, 3.0, size=n))
        if trial % 4 == 0:
            vals[0] = 0.0  # nontrivial kernel
        T = G @ np.diag(vals) @ np.linalg.inv(G)
        forms = factor.wsimilar_forms(T)
        ctol = forms.checks["tol"]
        assert forms.checks["intertwine"] <= ctol
        assert forms.checks["factor_T"] <= ctol
        assert forms.checks["factor_Tadj"] <= ctol
        assert forms.checks["TW_herm_dev"] <= ctol
        assert forms.checks["ZT_herm_dev"] <= ctol
        assert forms.checks["TW_psd_margin"] >= -ctol
        assert forms.checks["ZT_psd_margin"] >= -ctol
        assert forms.plusdot_ok


def test_wsimilar_rejects():
    with pytest.raises(NotScalarNonneg):
        factor.wsimilar_forms(np.array([[0.0, 1.0], [0.0, 0.0]]))


# ----------------------------------------------------------- spectra utilities


def test_presimilar_trivials():
    rng = np.random.default_rng(16)
    B = random_psd(rng, 3)
    S, match = factor.presimilar_S(np.eye(3), B)
    assert frob(S - B) <= 1e-10 and match
    A = np.diag([4.0, 1.0])
    S, match = factor.presimilar_S(A, np.eye(2))
    assert frob(S - A) <= 1e-10 and match


def test_presimilar_seeded_spectra():
    rng = np.random.default_rng(17)
    for _ in range(50):
        n = int(rng.integers(2, 9))
        A = random_psd(rng, n, singular=bool(rng.integers(0, 2)))
        B = random_psd(rng, n)
        S, match = factor.presimilar_S(A, B)
        assert match
        Ah = nk.psd_power(A, 0.5)
        assert frob((A @ B) @ Ah - Ah @ S) <= 1e-8 * (1 + frob(A @ B))


def test_spectra_swap_examples():
    A = np.diag([1.0, 0.0])
    B = np.ones((2, 2))
    assert hausdorff(
        np.append(np.linalg.eigvals(A @ B), 0), np.append(np.linalg.eigvals(B @ A), 0)
    ) <= 1e-12
    assert factor.spectra_swap_check(A, B)
    assert factor.spectra_swap_check(np.eye(2), np.eye(2))


def test_spectra_swap_bulk():
    rng = np.random.default_rng(18)
    for _ in range(100):
        n = int(rng.integers(2, 9))
        A = random_psd(rng, n, singular=bool(rng.integers(0, 2)))
        B = random_psd(rng, n)
        assert factor.spectra_swap_check(A, B)


# -------------------------------------------------------------------- packages


def test_inclusionnfs_trivial_and_planted():
    rng = np.random.default_rng(19)
    P = random_psd(rng, 3) + 0.2 * np.eye(3)
    pkg = factor.inclusionnfs_package(P, np.eye(3), P)
    assert frob(pkg.A - np.eye(3)) <= 1e-10
    assert frob(pkg.B_F - P) <= 1e-9
    for _ in range(25):
        n = int(rng.integers(2, 6))
        A = random_psd(rng, n) + 0.2 * np.eye(n)
        B = random_psd(rng, n)
        T = A @ B
        G = nk.psd_power(A, 0.5)  # then G*G = A and G T* = S G with S = A^1/2 B A^1/2
        S = herm(G @ B @ G)
        pkg = factor.inclusionnfs_package(T, G, S)
        assert frob(pkg.B_F - B) <= 1e-7 * (1 + frob(B))
        assert pkg.diagnostics["reconstruction"] <= pkg.diagnostics["tol"]
        assert pkg.diagnostics["seb_feasible"]


def test_inclusionnfs_zero():
    pkg = factor.inclusionnfs_package(np.zeros((2, 2)), np.eye(2), np.zeros((2, 2)))
    assert frob(pkg.B_F) <= 1e-12
    assert pkg.diagnostics["reconstruction"] <= 1e-12


def test_tba_trivial_and_planted():
    rng = np.random.default_rng(20)
    P = random_psd(rng, 3)
    pkg = factor.tba_package(P, np.eye(3), P)
    assert frob(pkg.A - np.eye(3)) <= 1e-10
    assert frob(pkg.A_F - P) <= 1e-10
    for _ in range(25):
        n = int(rng.integers(2, 6))
        G = conditioned_invertible(rng, n, 1e2)
        S = random_psd(rng, n) + 0.1 * np.eye(n)
        T = np.linalg.inv(G) @ S @ G
        pkg = factor.tba_package(T, G, S)
        assert pkg.diagnostics["reconstruction"] <= pkg.diagnostics["tol"]
        assert pkg.diagnostics["xt_equals_tadjx"] <= pkg.diagnostics["tol"]
        assert pkg.diagnostics["xt_psd_margin"] >= -pkg.diagnostics["tol"]
        assert pkg.diagnostics["reversed_inequality_margin"] >= -pkg.diagnostics["tol"]
        assert pkg.diagnostics["reverse_feasible"]
        lam = pkg.diagnostics["lambda"]
        assert pkg.diagnostics["reverse_eta_star"] >= 1.0 / lam - 1e-7


def test_tba_zero():
    pkg = factor.tba_package(np.zeros((2, 2)), np.eye(2), np.zeros((2, 2)))
    assert frob(pkg.A_F) <= 1e-12


# ------------------------------------------------------------ quasi-affinities


def test_quasiaffine_identity_and_nilpotent():
    rng = np.random.default_rng(21)
    P = random_psd(rng, 3)
    qa = factor.quasiaffine_decide(P, P)
    assert qa.affine
    qa = factor.quasiaffine_decide(np.array([[0.0, 1.0], [0.0, 0.0]]), np.zeros((2, 2)))
    assert not qa.affine


def test_quasiaffine_planted():
    rng = np.random.default_rng(22)
    for _ in range(20):
        n = int(rng.integers(2, 5))
        G = conditioned_invertible(rng, n, 50.0)
        vals = np.sort(rng.uniform(0.2, 3.0, size=n))
        while n > 1 and np.min(np.diff(vals)) < 0.05:
            vals = np.sort(rng.uniform(0.2, 3.0, size=n))
        D = np.diag(vals)
        T = G @ D @ np.linalg.inv(G)
        qa = factor.quasiaffine_decide(T, D)
        assert qa.affine
        assert nk.matrix_rank(qa.G) == n
        assert frob(qa.G @ T - D @ qa.G) <= 1e-7 * (1 + opnorm(T))


def test_quasisimilar_decide():
    rng = np.random.default_rng(23)
    P = random_psd(rng, 3)
    qs = factor.quasisimilar_decide(P, P)
    assert qs.similar_pair
    qs = factor.quasisimilar_decide(np.array([[0.0, 1.0], [0.0, 0.0]]), np.zeros((2, 2)))
    assert not qs.similar_pair
    for _ in range(15):
        n = int(rng.integers(2, 5))
        G = conditioned_invertible(rng, n, 30.0)
        vals = np.sort(rng.uniform(0.2, 3.0, size=n))
        while n > 1 and np.min(np.diff(vals)) < 0.05:
            vals = np.sort(rng.uniform(0.2, 3.0, size=n))
        D = np.diag(vals)
        T = G @ D @ np.linalg.inv(G)
        qs = factor.quasisimilar_decide(T, D)
        assert qs.similar_pair
        assert qs.checks["duality_residual"] <= qs.checks["tol"]
        assert qs.adjoint_package.diagnostics["reconstruction"] <= qs.adjoint_package.diagnostics["tol"]
        assert qs.direct_package.diagnostics["reconstruction"] <= qs.direct_package.diagnostics["tol"]
        # spectra line up with the target through the pre-similarity chain
        assert hausdorff(np.linalg.eigvals(T), np.diag(D)) <= 1e-7


# ------------------------------------------------------------ bounded S report


def test_bounded_s_trivial_exact():
    rng = np.random.default_rng(24)
    P = random_psd(rng, 3)
    rep = factor.bounded_S_checks(P, np.eye(3), P)
    assert rep.all_passed
    assert all(item.residual <= 1e-10 for item in rep.items)


def test_bounded_s_seeded():
    rng = np.random.default_rng(25)
    for _ in range(25):
        n = int(rng.integers(2, 6))
        G = conditioned_invertible(rng, n, 1e2)
        S = random_psd(rng, n)
        T = np.linalg.inv(G) @ S @ G
        rep = factor.bounded_S_checks(T, G, S)
        assert rep.all_passed, [it for it in rep.items if not it.passed]


def test_bounded_s_zero_degenerate():
    rep = factor.bounded_S_checks(np.zeros((2, 2)), np.eye(2), np.zeros((2, 2)))
    assert rep.all_passed


# ----------------------------------------------------------------- power chain


def test_power_chain_identity():
    chain = factor.power_chain(np.eye(2), np.eye(2), n_max=4)
    for S in chain.S_seq:
        assert frob(S - np.eye(2)) <= 1e-12
    assert max(chain.residuals) <= 1e-12


def test_power_chain_diagonal_scalar_recursion():
    A = np.diag([1.0, 2.0])
    B = np.diag([3.0, 4.0])
    chain = factor.power_chain(A, B, n_max=3)
    expected = [np.diag([3.0, 4.0])]
    for _ in range(3):
        prev = expected[-1]
        expected.append(prev @ A @ prev)
    for got, want in zip(chain.S_seq, expected):
        assert frob(got - want) <= 1e-9 * (1 + frob(want))


def test_power_chain_seeded():
    rng = np.random.default_rng(26)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        A = random_psd(rng, n)
        B = random_psd(rng, n)
        A /= max(opnorm(A @ B), 1e-12) ** 0.5
        B /= max(opnorm(A @ B), 1e-12) ** 0.5
        chain = factor.power_chain(A, B, n_max=4)
        T = A @ B
        tn = max(opnorm(T), 1e-6)
        for k, resid in enumerate(chain.residuals):
            assert resid <= 1e-6 * max(tn ** (2**k), 1.0)
        for margin, S in zip(chain.psd_margins, chain.S_seq):
            assert margin >= -1e-9 * max(opnorm(S), 1e-12)


# ----------------------------------------------------------------------- ldeux


def test_ldeux_psd_input():
    rng = np.random.default_rng(27)
    P = random_psd(rng, 3)
    cert = factor.ldeux_certify(P)
    assert cert.in_class
    assert frob(cert.A - np.eye(3)) <= 1e-7
    assert frob(cert.B - P) <= 1e-6 * (1 + frob(P))


def test_ldeux_nilpotent_rejected():
    cert = factor.ldeux_certify(np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert not cert.in_class


def test_ldeux_planted_product():
    rng = np.random.default_rng(28)
    for _ in range(20):
        n = int(rng.integers(2, 5))
        q = random_unitary(rng, n)
        A = herm((q * rng.uniform(0.3, 2.0, n)) @ q.conj().T)
        B = random_psd(rng, n) + 0.2 * np.eye(n)
        T = A @ B
        cert = factor.ldeux_certify(T)
        assert cert.in_class
        assert cert.residual <= 1e-6 * (1 + frob(T))
        wa = np.linalg.eigvalsh(herm(cert.A))
        wb = np.linalg.eigvalsh(herm(cert.B))
        assert wa[0] >= -1e-9 * (1 + wa[-1]) and wb[0] >= -1e-9 * (1 + wb[-1])


def test_zero_operator_short_circuits_everywhere():
    rng = np.random.default_rng(99)
    Z = np.zeros((3, 3))
    B = random_psd(rng, 3)
    assert factor.douglas_solve(Z, B).feasible
    cert = factor.seb_relation_solve(rel_from_matrix(Z), rel_from_matrix(B))
    assert cert.feasible and cert.lambda_star == 0.0 and frob(cert.X) == 0.0
    rev = factor.reverse_solve(rel_from_matrix(Z), rel_from_matrix(B))
    assert rev.feasible and rev.eta_star == float("inf")
    forms = factor.wsimilar_forms(Z)
    assert forms.plusdot_ok and frob(forms.S) <= 1e-12
    cert = factor.ldeux_certify(Z)
    assert cert.in_class and frob(cert.B) <= 1e-12


def test_ldeux_with_hint():
    rng = np.random.default_rng(29)
    A = random_psd(rng, 3) + 0.2 * np.eye(3)
    Y = random_psd(rng, 3) + 0.2 * np.eye(3)
    T = A @ Y
    cert = factor.ldeux_certify(T, Y_hint=Y)
    assert cert.in_class
    assert frob(cert.A @ cert.B - T) <= 1e-7 * (1 + frob(T))
    assert frob(cert.B - Y) <= 1e-12
