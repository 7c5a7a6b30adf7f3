"""
Tests for the Krylov solvers (PCG, GMRES, FGMRES, MINRES)

Covers:
- small exact-answer systems
- preconditioner handling and breakdown errors
- GMRES against a dense oracle on random nonsingular systems
- report accounting (iterations, error, inner tally)
"""

import numpy as np
import pytest

from src.errors import (
    DimensionMismatchError,
    IndefiniteOperatorError,
    IndefinitePreconditionerError,
    NonFiniteError,
)
from src.linalg.sparse import diag, identity
from src.solvers.krylov import SolveReport, fgmres, gmres, minres, pcg
from src.solvers.operators import InnerTally, make_operator


# ============================================================================
# PCG
# ============================================================================

class TestPcg:
    def test_identity_one_iteration(self):
        x, report = pcg(identity(3), np.array([1.0, 2.0, 3.0]), tol=1e-12)
        assert report.converged
        assert report.outer_iters == 1
        np.testing.assert_allclose(x, [1.0, 2.0, 3.0])

    def test_two_distinct_eigenvalues(self):
        x, report = pcg(diag([1.0, 2.0]), np.array([1.0, 2.0]), tol=1e-12)
        assert report.converged
        assert report.outer_iters <= 2
        np.testing.assert_allclose(x, [1.0, 1.0])

    def test_zero_rhs(self):
        x, report = pcg(identity(2), np.zeros(2))
        assert report.converged
        assert report.outer_iters == 0
        np.testing.assert_array_equal(x, 0.0)

    def test_indefinite_operator(self):
        with pytest.raises(IndefiniteOperatorError):
            pcg(diag([1.0, -1.0]), np.array([0.0, 1.0]))

    def test_indefinite_preconditioner(self):
        with pytest.raises(IndefinitePreconditionerError):
            pcg(identity(2), np.array([1.0, 1.0]), precond=lambda r: -r)

    def test_exact_inverse_preconditioner(self):
        A = diag([2.0, 5.0, 10.0])
        b = np.array([2.0, 5.0, 10.0])
        _, report = pcg(A, b, precond=lambda r: r / np.array([2.0, 5.0, 10.0]), tol=1e-12)
        assert report.outer_iters == 1

    def test_maxit_reached(self):
        A = diag(np.arange(1.0, 21.0))
        _, report = pcg(A, np.ones(20), tol=1e-14, maxit=3)
        assert not report.converged
        assert report.outer_iters == 3

    def test_error_against_exact(self):
        _, report = pcg(diag([1.0, 2.0]), np.array([1.0, 2.0]), tol=1e-12, x_exact=[1.0, 1.0])
        assert report.err < 1e-12


# ============================================================================
# GMRES / FGMRES
# ============================================================================

class TestGmres:
    def test_identity_one_iteration(self):
        x, report = gmres(identity(4), np.arange(1.0, 5.0), tol=1e-12)
        assert report.converged
        assert report.outer_iters == 1
        np.testing.assert_allclose(x, np.arange(1.0, 5.0))

    def test_nonsymmetric_two_by_two(self):
        A = np.array([[1.0, 1.0], [0.0, 1.0]])
        x, report = gmres(A, np.array([2.0, 1.0]), tol=1e-12)
        assert report.converged
        assert report.outer_iters <= 2
        np.testing.assert_allclose(x, [1.0, 1.0])

    def test_left_preconditioner_exact_inverse(self):
        A = np.array([[4.0, 1.0], [2.0, 3.0]])
        inverse = np.linalg.inv(A)
        _, report = gmres(A, np.array([1.0, 1.0]), inverse, tol=1e-12)
        assert report.outer_iters == 1

    def test_random_systems_match_dense_solve(self):
        rng = np.random.default_rng(2024)
        for _ in range(20):
            A = rng.standard_normal((20, 20)) + 8.0 * np.eye(20)
            b = rng.standard_normal(20)
            x, report = gmres(A, b, tol=1e-10)
            assert report.converged
            assert report.outer_iters <= 20
            expected = np.linalg.solve(A, b)
            assert np.linalg.norm(x - expected) / np.linalg.norm(expected) < 1e-8

    def test_history_is_non_increasing(self):
        rng = np.random.default_rng(5)
        A = rng.standard_normal((15, 15)) + 6.0 * np.eye(15)
        _, report = gmres(A, rng.standard_normal(15), tol=1e-12)
        assert all(b <= a * (1 + 1e-12) for a, b in zip(report.history, report.history[1:]))

    def test_true_residual_reported(self):
        rng = np.random.default_rng(6)
        A = rng.standard_normal((10, 10)) + 5.0 * np.eye(10)
        b = rng.standard_normal(10)
        x, report = gmres(A, b, tol=1e-10)
        assert report.res == pytest.approx(np.linalg.norm(b - A @ x) / np.linalg.norm(b), rel=1e-12)
        assert report.res <= 1e-10

    def test_stops_on_true_residual(self):
        # the preconditioner inflates a component the true residual barely sees
        A = np.eye(3)
        b = np.array([1.0, 1.0, 1e-16])
        _, report = gmres(A, b, np.diag([1.0, 1.0, 1e3]), tol=1e-12)
        assert report.converged
        assert report.outer_iters == 1
        assert report.history[-1] > 1e-12
        assert report.res <= 1e-12

    def test_singular_krylov_space_keeps_last_iterate(self):
        # e1 -> e2 -> 0: the second Arnoldi step breaks down
        A = np.array([[0.0, 0.0], [1.0, 0.0]])
        b = np.array([1.0, 0.0])
        x, report = gmres(A, b, tol=1e-12)
        assert not report.converged
        assert report.outer_iters == 2
        assert np.all(np.isfinite(x))
        assert report.res == pytest.approx(np.linalg.norm(b - A @ x) / np.linalg.norm(b))

    def test_non_finite_rhs(self):
        with pytest.raises(NonFiniteError):
            gmres(identity(2), np.array([1.0, np.nan]))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            gmres(identity(2), np.ones(3))


class TestFgmres:
    def test_exact_inverse_one_iteration(self):
        A = np.array([[4.0, 1.0], [2.0, 3.0]])
        inverse = np.linalg.inv(A)
        x, report = fgmres(A, np.array([5.0, 5.0]), lambda r: inverse @ r, tol=1e-12)
        assert report.outer_iters == 1
        np.testing.assert_allclose(x, [1.0, 1.0])

    def test_identity_preconditioner_matches_gmres(self):
        rng = np.random.default_rng(11)
        A = rng.standard_normal((10, 10)) + 5.0 * np.eye(10)
        b = rng.standard_normal(10)
        x_g, report_g = gmres(A, b, tol=1e-10)
        x_f, report_f = fgmres(A, b, None, tol=1e-10)
        assert report_f.outer_iters == report_g.outer_iters
        np.testing.assert_allclose(x_f, x_g, atol=1e-12)

    def test_varying_preconditioner(self):
        rng = np.random.default_rng(12)
        A = rng.standard_normal((12, 12)) + 6.0 * np.eye(12)
        b = rng.standard_normal(12)
        calls = []

        def noisy_diagonal(r):
            calls.append(1)
            return r / (np.diag(A) * (1.0 + 0.01 * len(calls)))

        x, report = fgmres(A, b, noisy_diagonal, tol=1e-10)
        assert report.converged
        assert np.linalg.norm(b - A @ x) / np.linalg.norm(b) <= 1e-10


# ============================================================================
# MINRES
# ============================================================================

class TestMinres:
    def test_identity_one_iteration(self):
        x, report = minres(identity(3), np.ones(3), tol=1e-12)
        assert report.converged
        assert report.outer_iters == 1
        np.testing.assert_allclose(x, np.ones(3))

    def test_symmetric_indefinite(self):
        x, report = minres(diag([1.0, -1.0]), np.array([1.0, 1.0]), tol=1e-12)
        assert report.converged
        assert report.outer_iters <= 2
        np.testing.assert_allclose(x, [1.0, -1.0], atol=1e-12)

    def test_history_is_non_increasing(self):
        rng = np.random.default_rng(8)
        G = rng.standard_normal((30, 30))
        A = G + G.T
        _, report = minres(A, rng.standard_normal(30), tol=1e-10, maxit=200)
        assert all(b <= a * (1 + 1e-10) for a, b in zip(report.history, report.history[1:]))

    def test_spd_preconditioner(self):
        d = np.arange(1.0, 11.0)
        A = np.diag(d * np.where(np.arange(10) % 2, -1.0, 1.0))
        b = np.ones(10)
        x, report = minres(A, b, lambda r: r / d, tol=1e-12)
        assert report.converged
        assert report.outer_iters <= 2
        np.testing.assert_allclose(A @ x, b, atol=1e-10)

    def test_indefinite_preconditioner(self):
        with pytest.raises(IndefinitePreconditionerError):
            minres(identity(2), np.ones(2), lambda r: -r)

    def test_certification_uses_true_residual(self):
        rng = np.random.default_rng(9)
        G = rng.standard_normal((20, 20))
        A = G + G.T + 0.5 * np.eye(20)
        b = rng.standard_normal(20)
        x, report = minres(A, b, tol=1e-8, maxit=200, certify_tol=1e-7)
        assert report.converged
        assert np.linalg.norm(b - A @ x) / np.linalg.norm(b) <= 1e-7


# ============================================================================
# Reports and tallies
# ============================================================================

class TestSolveReport:
    def test_iter_pcg_rounds_half_up(self):
        report = SolveReport(solver="gmres", outer_iters=2, converged=True, res=1e-13,
                             inner_pcg_solves=2, inner_pcg_iterations=13)
        assert report.iter_pcg == 7

    def test_iter_pcg_without_inner_solves(self):
        report = SolveReport(solver="gmres", outer_iters=2, converged=True, res=1e-13)
        assert report.iter_pcg == 0
        assert report.inner_iters_per_outer == 0.0

    def test_with_tally(self):
        tally = InnerTally()
        tally.record_application()
        tally.record_pcg(4)
        tally.record_pcg(6)
        tally.record_aux(3)
        report = SolveReport(solver="fgmres", outer_iters=1, converged=True, res=1e-8).with_tally(tally)
        assert report.inner_applications == 1
        assert report.inner_pcg_solves == 2
        assert report.iter_pcg == 5
        assert report.inner_iters_total == 13
        assert report.to_dict()["inner_iters_per_outer"] == 13.0

    def test_make_operator_wraps_callable(self):
        op = make_operator(3, lambda v: 2.0 * v)
        x, report = gmres(op, np.ones(3), tol=1e-12)
        np.testing.assert_allclose(x, 0.5 * np.ones(3))
        assert report.outer_iters == 1
