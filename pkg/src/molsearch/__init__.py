"""Search for sets of mutually orthogonal latin squares with CP and IP models."""

from molsearch.core import (
    LatinSquare,
    MolsSet,
    Square,
    are_orthogonal,
    is_latin,
    read_squares,
    verify_mols,
    write_squares,
)

__all__ = [
    "LatinSquare",
    "MolsSet",
    "Square",
    "are_orthogonal",
    "is_latin",
    "read_squares",
    "verify_mols",
    "write_squares",
]
