"""
Tests for the Example 1 builder and the saddle-point assembly
"""

import numpy as np
import pytest

from src.errors import DimensionMismatchError, DomainError
from src.linalg.dense import matrix_rank
from src.linalg.sparse import csr_from_triplets, identity, is_symmetric
from src.problems.example1 import (
    ProblemBlocks,
    Variant,
    assemble_saddle,
    build_example1,
    manufactured_rhs,
    random_solution,
)


# ============================================================================
# Builder
# ============================================================================

class TestBuildExample1:
    def test_p2_building_blocks(self):
        blocks = build_example1(2, 1.0)
        np.testing.assert_allclose(blocks.T.toarray(), [[18.0, -9.0], [-9.0, 18.0]])
        np.testing.assert_allclose(blocks.F.toarray(), [[3.0, -3.0], [0.0, 3.0]])
        np.testing.assert_allclose(blocks.E.toarray(), np.diag([1.0, 3.0]))

    def test_p2_dimensions(self):
        blocks = build_example1(2, 1.0)
        assert (blocks.n, blocks.m, blocks.l, blocks.N) == (8, 4, 4, 16)

    def test_viscosity_scales_t_only(self):
        blocks = build_example1(2, 0.01)
        np.testing.assert_allclose(blocks.T.toarray(), [[0.18, -0.09], [-0.09, 0.18]])
        np.testing.assert_allclose(blocks.F.toarray(), [[3.0, -3.0], [0.0, 3.0]])

    def test_a_is_spd_block_diagonal(self):
        blocks = build_example1(3, 1.0)
        A = blocks.A.toarray()
        assert is_symmetric(blocks.A)
        np.testing.assert_array_equal(A[:9, 9:], 0.0)
        np.testing.assert_array_equal(A[:9, :9], A[9:, 9:])
        assert np.all(np.linalg.eigvalsh(A) > 0)

    def test_c_is_kron_of_e_and_f(self):
        blocks = build_example1(3, 1.0)
        expected = np.kron(blocks.E.toarray(), blocks.F.toarray())
        np.testing.assert_allclose(blocks.C.toarray(), expected)

    def test_b_full_row_rank(self):
        blocks = build_example1(4, 1.0)
        assert matrix_rank(blocks.B.toarray()) == 16

    @pytest.mark.parametrize("p", [1, 0, 2.5])
    def test_invalid_grid(self, p):
        with pytest.raises(DomainError):
            build_example1(p, 1.0)

    @pytest.mark.parametrize("nu", [0.0, -1.0])
    def test_invalid_viscosity(self, nu):
        with pytest.raises(DomainError):
            build_example1(2, nu)


class TestProblemBlocks:
    def test_inconsistent_shapes(self):
        with pytest.raises(DimensionMismatchError):
            ProblemBlocks(A=identity(2), B=identity(3), C=identity(3))

    def test_custom_blocks(self):
        B = csr_from_triplets([(0, 0, 1.0)], 1, 2)
        blocks = ProblemBlocks(A=identity(2), B=B, C=identity(1))
        assert (blocks.n, blocks.m, blocks.l) == (2, 1, 1)
        assert blocks.label() == "blocks(n=2, m=1, l=1)"


# ============================================================================
# Assembly
# ============================================================================

class TestAssembleSaddle:
    def test_minus_variant_blocks(self):
        blocks = build_example1(2, 1.0)
        M = assemble_saddle(blocks, Variant.MINUS).matrix.toarray()
        n, m = blocks.n, blocks.m
        np.testing.assert_allclose(M[n:n + m, :n], -blocks.B.toarray())
        np.testing.assert_allclose(M[:n, n:n + m], blocks.B.toarray().T)
        np.testing.assert_allclose(M[n:n + m, n + m:], -blocks.C.toarray().T)
        np.testing.assert_allclose(M[n + m:, n:n + m], blocks.C.toarray())
        np.testing.assert_array_equal(M[n + m:, n + m:], 0.0)
        np.testing.assert_array_equal(M[n:n + m, n:n + m], 0.0)

    def test_plus_variant_symmetric(self):
        system = assemble_saddle(build_example1(3, 0.1), Variant.PLUS)
        assert is_symmetric(system.matrix)

    def test_minus_variant_not_symmetric(self):
        system = assemble_saddle(build_example1(2, 1.0), Variant.MINUS)
        assert not is_symmetric(system.matrix)

    def test_split_and_join(self):
        system = assemble_saddle(build_example1(2, 1.0))
        w = np.arange(16.0)
        x, y, z = system.split(w)
        assert (len(x), len(y), len(z)) == (8, 4, 4)
        np.testing.assert_array_equal(system.join(x, y, z), w)

    def test_split_wrong_length(self):
        system = assemble_saddle(build_example1(2, 1.0))
        with pytest.raises(DimensionMismatchError):
            system.split(np.zeros(15))


class TestManufacturedRhs:
    def test_zero_solution(self):
        system = assemble_saddle(build_example1(2, 1.0))
        b, w = manufactured_rhs(system, np.zeros(16))
        np.testing.assert_array_equal(b, 0.0)
        np.testing.assert_array_equal(w, 0.0)

    def test_unit_vector_gives_first_column(self):
        system = assemble_saddle(build_example1(2, 1.0))
        e1 = np.zeros(16)
        e1[0] = 1.0
        b, _ = manufactured_rhs(system, e1)
        np.testing.assert_allclose(b, system.matrix.toarray()[:, 0])

    def test_default_is_all_ones(self):
        system = assemble_saddle(build_example1(2, 1.0))
        b, w = manufactured_rhs(system)
        np.testing.assert_array_equal(w, np.ones(16))
        np.testing.assert_allclose(b, system.matrix.toarray().sum(axis=1))

    def test_wrong_length(self):
        system = assemble_saddle(build_example1(2, 1.0))
        with pytest.raises(DimensionMismatchError):
            manufactured_rhs(system, np.ones(3))

    def test_random_solution_is_seeded(self):
        a = random_solution(50, seed=7)
        np.testing.assert_array_equal(a, random_solution(50, seed=7))
        assert np.all(np.abs(a) <= 1.0)
        assert not np.array_equal(a, random_solution(50, seed=8))
