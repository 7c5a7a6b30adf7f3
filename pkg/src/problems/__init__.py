"""Test problem generation"""

from .example1 import (
    Variant,
    ProblemBlocks,
    SaddleSystem,
    build_example1,
    assemble_saddle,
    manufactured_rhs,
    random_solution,
)

__all__ = [
    'Variant',
    'ProblemBlocks',
    'SaddleSystem',
    'build_example1',
    'assemble_saddle',
    'manufactured_rhs',
    'random_solution',
]
