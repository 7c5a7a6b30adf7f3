"""
Tests for S_hat and the block preconditioners

Covers:
- S_hat construction (full, diagonal, exact)
- hand-checked applications of P_R, P_RD, P_BD, P_SS, P_RSS
- P(P^{-1} r) == r against the dense assembled P on Example 1 at p = 2
- kind dispatch, tallies, argument validation
"""

from dataclasses import replace

import numpy as np
import pytest

from src.errors import DenseGuardError, DimensionMismatchError, DomainError, PreconditionerKindError
from src.linalg.sparse import csr_from_triplets, identity, tridiag
from src.precond import (
    DEFAULT_ALPHA,
    InnerSettings,
    PreconditionerKind,
    ShatMode,
    ShatOperator,
    apply_pbd,
    apply_pr,
    apply_prd,
    apply_preconditioner,
    apply_pss,
    as_operator,
    assemble_preconditioner,
    build_preconditioner,
    build_shat,
    exact_schur_shat,
)
from src.problems.example1 import ProblemBlocks, build_example1
from src.solvers.operators import InnerTally


def scalar_blocks(a: float = 1.0) -> ProblemBlocks:
    """n = m = l = 1 with A = [a], B = C = [1]."""
    one = identity(1)
    A = csr_from_triplets([(0, 0, a)], 1, 1)
    return ProblemBlocks(A=A, B=one, C=one)


def two_one_one_blocks(a: float) -> ProblemBlocks:
    """A = a I_2, B = [1 0], C = [1]."""
    A = csr_from_triplets([(0, 0, a), (1, 1, a)], 2, 2)
    B = csr_from_triplets([(0, 0, 1.0)], 1, 2)
    return ProblemBlocks(A=A, B=B, C=identity(1))


# ============================================================================
# S_hat
# ============================================================================

class TestShat:
    def test_full_scalar(self):
        shat = build_shat(identity(1), 1.0)
        np.testing.assert_allclose(shat.toarray(), [[2.0]])
        np.testing.assert_allclose(shat.solve([4.0]), [2.0])

    def test_diagonal_mode(self):
        F = tridiag(2, 0.0, 1.0, -1.0, 3.0)
        shat = build_shat(F, 1.0, ShatMode.DIAGONAL)
        np.testing.assert_allclose(shat.toarray(), np.diag([10.0, 19.0]))

    def test_full_mode_matches_formula(self):
        C = build_example1(3, 1.0).C
        alpha = 0.5
        shat = build_shat(C, alpha)
        Cd = C.toarray()
        np.testing.assert_allclose(shat.toarray(), alpha * np.eye(9) + Cd.T @ Cd / alpha)
        v = np.arange(1.0, 10.0)
        np.testing.assert_allclose(shat.apply(shat.solve(v)), v, rtol=1e-10)

    @pytest.mark.parametrize("alpha", [0.0, -1.0])
    def test_alpha_must_be_positive(self, alpha):
        with pytest.raises(DomainError):
            build_shat(identity(2), alpha)

    def test_exact_mode_needs_other_blocks(self):
        with pytest.raises(DomainError):
            build_shat(identity(2), 1.0, ShatMode.EXACT)

    def test_exact_schur(self):
        blocks = build_example1(2, 1.0)
        shat = exact_schur_shat(blocks.A, blocks.B, 1.0)
        A, B = blocks.A.toarray(), blocks.B.toarray()
        np.testing.assert_allclose(shat.toarray(), B @ np.linalg.solve(A, B.T), rtol=1e-10, atol=1e-14)

    def test_exact_schur_guard(self):
        blocks = build_example1(9, 1.0)
        with pytest.raises(DenseGuardError):
            exact_schur_shat(blocks.A, blocks.B, 1.0)

    def test_solve_wrong_length(self):
        shat = build_shat(identity(2), 1.0)
        with pytest.raises(DimensionMismatchError):
            shat.solve(np.ones(3))


# ============================================================================
# Hand-checked applications
# ============================================================================

class TestScalarApplications:
    def test_pr(self):
        state = build_preconditioner(two_one_one_blocks(1.0), PreconditionerKind.R, alpha=1.0)
        w = apply_pr(state, [1.0, 0.0, 1.0, 1.0])
        np.testing.assert_allclose(w, [1 / 3, 0.0, 2 / 3, 1 / 3], atol=1e-8)

    def test_prd(self):
        state = build_preconditioner(two_one_one_blocks(2.0), PreconditionerKind.RD, alpha=1.0)
        w = apply_prd(state, [2.0, 0.0, 2.0, 3.0])
        np.testing.assert_allclose(w, [2 / 3, 0.0, 2 / 3, 3.0], atol=1e-8)

    def test_pbd_identity_blocks(self):
        blocks = ProblemBlocks(A=identity(2), B=identity(2), C=identity(2))
        state = build_preconditioner(blocks, PreconditionerKind.BD, alpha=1.0)
        state = replace(state, shat=ShatOperator.from_matrix(identity(2), 1.0))
        r = np.array([1.0, -2.0, 3.0, 0.5, -1.5, 4.0])
        np.testing.assert_allclose(apply_pbd(state, r), r, atol=1e-8)

    def test_pss(self):
        state = build_preconditioner(scalar_blocks(), PreconditionerKind.SS, alpha=1.0)
        w = apply_pss(state, [2.0, 2.0, 2.0])
        np.testing.assert_allclose(w, [0.0, 4.0, 0.0], atol=1e-8)

    def test_prss(self):
        state = build_preconditioner(scalar_blocks(), PreconditionerKind.RSS, alpha=1.0)
        w = apply_pss(state, [2.0, 2.0, 2.0])
        np.testing.assert_allclose(w, [0.0, 4.0, 0.0], atol=1e-8)

    @pytest.mark.parametrize("kind", ["R", "RD", "BD", "SS", "RSS", "none"])
    def test_zero_residual(self, kind):
        state = build_preconditioner(build_example1(2, 1.0), kind)
        np.testing.assert_array_equal(apply_preconditioner(state, np.zeros(16)), 0.0)


# ============================================================================
# Against the assembled preconditioner
# ============================================================================

class TestAgainstAssembled:
    @pytest.mark.parametrize("kind", ["R", "RD", "BD", "SS", "RSS"])
    def test_inverse_application(self, kind):
        blocks = build_example1(2, 1.0)
        state = build_preconditioner(blocks, kind, inner=InnerSettings(tol=1e-8))
        P = assemble_preconditioner(state)
        rng = np.random.default_rng(17)
        for _ in range(20):
            r = rng.standard_normal(16)
            w = apply_preconditioner(state, r)
            assert np.linalg.norm(P @ w - r) / np.linalg.norm(r) < 1e-4

    def test_exact_schur_mode(self):
        blocks = build_example1(2, 0.1)
        state = build_preconditioner(blocks, "R", shat_mode=ShatMode.EXACT, inner=InnerSettings(tol=1e-10))
        assert state.shat.mode is ShatMode.EXACT
        assert state.exact_S is not None
        P = assemble_preconditioner(state)
        r = np.random.default_rng(3).standard_normal(16)
        w = apply_preconditioner(state, r)
        assert np.linalg.norm(P @ w - r) / np.linalg.norm(r) < 1e-6

    def test_none_kind_is_identity(self):
        state = build_preconditioner(build_example1(2, 1.0), PreconditionerKind.NONE)
        np.testing.assert_array_equal(assemble_preconditioner(state), np.eye(16))
        r = np.arange(16.0)
        w = apply_preconditioner(state, r)
        np.testing.assert_array_equal(w, r)
        assert w is not r

    def test_assembly_guard(self):
        state = build_preconditioner(build_example1(2, 1.0), "R")
        with pytest.raises(DenseGuardError):
            assemble_preconditioner(state, max_dim=8)


# ============================================================================
# Dispatch, tallies and validation
# ============================================================================

class TestDispatchAndSettings:
    def test_wrong_kind(self):
        state = build_preconditioner(build_example1(2, 1.0), PreconditionerKind.RD)
        with pytest.raises(PreconditionerKindError):
            apply_pr(state, np.ones(16))

    def test_wrong_length(self):
        state = build_preconditioner(build_example1(2, 1.0), "R")
        with pytest.raises(DimensionMismatchError):
            apply_preconditioner(state, np.ones(15))

    def test_default_alpha(self):
        blocks = build_example1(2, 1.0)
        for kind, alpha in DEFAULT_ALPHA.items():
            assert build_preconditioner(blocks, kind).alpha == alpha

    def test_ss_factors_shifted_leading_block(self):
        blocks = build_example1(2, 1.0)
        state = build_preconditioner(blocks, "SS", alpha=0.5)
        np.testing.assert_allclose(
            state.leading.toarray(), blocks.A.toarray() + 0.5 * np.eye(blocks.n)
        )
        relaxed = build_preconditioner(blocks, "RSS", alpha=0.5)
        np.testing.assert_array_equal(relaxed.leading.toarray(), blocks.A.toarray())

    def test_operator_tallies_inner_iterations(self):
        state = build_preconditioner(build_example1(2, 1.0), "R")
        tally = InnerTally()
        op = as_operator(state, tally)
        op.matvec(np.ones(16))
        op.matvec(np.arange(16.0))
        assert tally.applications == 2
        assert tally.pcg_solves == 2
        assert tally.pcg_iterations >= 2

    def test_with_inner(self):
        state = build_preconditioner(build_example1(2, 1.0), "R")
        tighter = state.with_inner(tol=1e-10)
        assert tighter.inner.tol == 1e-10
        assert tighter.ict_of_A is state.ict_of_A

    @pytest.mark.parametrize("changes", [{"tol": 0.0}, {"tol": 1.0}, {"maxit": 0}, {"droptol": 0.0}])
    def test_invalid_inner_settings(self, changes):
        with pytest.raises(DomainError):
            InnerSettings(**changes)

    def test_invalid_alpha(self):
        with pytest.raises(DomainError):
            build_preconditioner(build_example1(2, 1.0), "R", alpha=-1.0)
