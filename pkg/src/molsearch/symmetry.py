"""Symmetry breaking for orthogonal-pair search.

With first rows of both squares and the first column of X fixed in sorted
order, the only remaining first-column freedom is the permutation
rho(i) = Y[i][0], which fixes 0 and deranges 1..n-1.  This module provides
the two reductions of that freedom used by the search: the dominance
constraints on Y's first column, and the coarser partition of first columns
into cycle-type classes with one canonical representative each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from molsearch.core import LatinSquare, Square, are_orthogonal
from molsearch.permalg import (
    OrderedCycles,
    Permutation,
    conjugate,
    inverse,
    ordered_cycles,
)


@dataclass(frozen=True)
class DominanceConstraints:
    """Per-row allowed values for column 0 of Y, rows 1..n-1.

    Row 1 is pinned to 2; row i may take any value <= i+1 other than i.
    """

    order: int
    allowed: tuple[frozenset[int], ...]

    @classmethod
    def for_order(cls, n: int) -> "DominanceConstraints":
        if n < 3:
            raise ValueError(f"dominance constraints need order >= 3, got {n}")
        rows = [frozenset({2})]
        for i in range(2, n):
            rows.append(frozenset(v for v in range(min(i + 2, n)) if v != i))
        return cls(n, tuple(rows))

    def allowed_for_row(self, i: int) -> frozenset[int]:
        if not 1 <= i < self.order:
            raise ValueError(f"row {i} out of range 1..{self.order - 1}")
        return self.allowed[i - 1]

    def admits(self, p: Permutation) -> bool:
        """True iff p fixes 0 and p's values on rows 1..n-1 are all allowed."""
        if p.size != self.order or p(0) != 0:
            return False
        return all(p(i) in self.allowed[i - 1] for i in range(1, self.order))


def dominance_first_columns(n: int) -> list[Permutation]:
    """All first-column permutations satisfying the dominance constraints.

    Enumerated by backtracking over positions (not from any closed form):
    rho(0)=0, rho(1)=2, and rho(i) != i, rho(i) <= i+1 for 1 <= i < n.
    Returned in lexicographic order.
    """
    if n < 3:
        raise ValueError(f"need order >= 3, got {n}")
    out: list[Permutation] = []
    image = [0, 2] + [0] * (n - 2)
    used = [False] * n
    used[0] = used[2] = True

    def extend(i: int) -> None:
        if i == n:
            out.append(Permutation(tuple(image)))
            return
        for v in range(1, min(i + 2, n)):
            if v != i and not used[v]:
                image[i] = v
                used[v] = True
                extend(i + 1)
                used[v] = False

    extend(2)
    return out


def enumerate_cycle_types(n: int) -> list[tuple[int, ...]]:
    """All first-column cycle-type classes for order n.

    Each class is a partition of n-1 into parts >= 2, written with the
    leading 1 for the fixed symbol 0 and the remaining parts non-decreasing.
    Ordered lexicographically.
    """
    if n < 3:
        raise ValueError(f"need order >= 3, got {n}")
    types: list[tuple[int, ...]] = []

    def parts(remaining: int, minimum: int, acc: list[int]) -> None:
        if remaining == 0:
            types.append((1, *acc))
            return
        for p in range(minimum, remaining + 1):
            if remaining - p != 1:
                acc.append(p)
                parts(remaining - p, p, acc)
                acc.pop()

    parts(n - 1, 2, [])
    return types


def count_first_column_classes(n: int) -> int:
    """Number of cycle-type classes (partitions of n-1 into parts >= 2)."""
    return len(enumerate_cycle_types(n))


@dataclass(frozen=True)
class FirstColumnClass:
    """A cycle-type class together with its canonical representative column."""

    cycle_type: tuple[int, ...]
    canonical_rho: Permutation


def canonical_first_column(t: tuple[int, ...]) -> Permutation:
    """Canonical representative of a cycle-type class: consecutive-integer cycles.

    For type (1, l1, l2, ...) the result fixes 0 and consists of the cycles
    (1 .. l1), (l1+1 .. l1+l2), ... so it always sends 1 to 2 and has no
    fixed point beyond 0.
    """
    t = tuple(t)
    if len(t) < 2 or t[0] != 1:
        raise ValueError(f"cycle type must start with the fixed part 1: {t}")
    rest = t[1:]
    if any(p < 2 for p in rest):
        raise ValueError(f"parts after the leading 1 must be >= 2: {t}")
    if list(rest) != sorted(rest):
        raise ValueError(f"parts after the leading 1 must be non-decreasing: {t}")
    n = sum(t)
    image = [0] * n
    start = 1
    for length in rest:
        for x in range(start, start + length - 1):
            image[x] = x + 1
        image[start + length - 1] = start
        start += length
    return Permutation(tuple(image))


def first_column_classes(n: int) -> list[FirstColumnClass]:
    return [
        FirstColumnClass(t, canonical_first_column(t))
        for t in enumerate_cycle_types(n)
    ]


def symmetry_group_order(k: int, n: int) -> int:
    """Order of the symmetry group acting on MOLS(k, n): 2 k! (n!)^(k+2)."""
    if k < 1 or n < 1:
        raise ValueError("k and n must be >= 1")
    return 2 * math.factorial(k) * math.factorial(n) ** (k + 2)


# ---------------------------------------------------------------------------
# Canonicalization of orthogonal pairs
# ---------------------------------------------------------------------------


def _permute_rows(cells, pi):
    """Row i of the result is row pi[i] of the input."""
    return tuple(cells[pi[i]] for i in range(len(cells)))


def _permute_cols(cells, pi):
    """Column j of the result is column pi[j] of the input."""
    return tuple(tuple(row[pi[j]] for j in range(len(row))) for row in cells)


def _relabel(cells, sigma):
    """Replace every symbol v by sigma[v]."""
    return tuple(tuple(sigma[v] for v in row) for row in cells)


def _sorted_borders(squares: list[tuple[tuple[int, ...], ...]]):
    """Permute rows and columns of all squares so the first square's first
    row and first column are 0..n-1."""
    first = squares[0]
    n = len(first)
    col_of = [0] * n
    for j, v in enumerate(first[0]):
        col_of[v] = j
    squares = [_permute_cols(c, col_of) for c in squares]
    row_of = [0] * n
    for i, row in enumerate(squares[0]):
        row_of[row[0]] = i
    return [_permute_rows(c, row_of) for c in squares]


def canonicalize_set(squares) -> tuple[LatinSquare, ...]:
    """Canonical form of a set of mutually orthogonal latin squares.

    The output set is isomorphic to the input (row, column and per-square
    symbol permutations only), has every first row and the first square's
    first column in sorted order, and the first-column permutation
    rho(i) = out[1][i][0] in consecutive-cycle form with non-decreasing
    ordered cycle type.

    The reduction is stated for pairs; applying the same relabeling to every
    square extends it to k > 2, but that extension is experimental.
    """
    squares = list(squares)
    if len(squares) < 2:
        raise ValueError("need at least two squares")
    n = squares[0].order
    for idx, s in enumerate(squares[1:], start=1):
        if not are_orthogonal(squares[0], s):
            raise ValueError(f"squares 0 and {idx} are not orthogonal")

    grids = _sorted_borders([s.cells for s in squares])
    # sort each square's first row by relabeling its own symbols
    relabeled = [grids[0]]
    for g in grids[1:]:
        sigma = [0] * n
        for j, v in enumerate(g[0]):
            sigma[v] = j
        relabeled.append(_relabel(g, sigma))
    grids = relabeled

    rho = Permutation(tuple(row[0] for row in grids[1]))
    cycles = sorted(ordered_cycles(rho).cycles, key=len)
    seq = [x for cyc in cycles for x in cyc]
    # relabeling that renames each cycle element to its position in the
    # length-sorted concatenation; conjugating rho by it yields
    # consecutive-integer cycles
    r_image = [0] * n
    for position, element in enumerate(seq):
        r_image[element] = position
    r = Permutation(tuple(r_image))
    r_inv = inverse(r).image

    out = []
    for g in grids:
        g = _relabel(g, r.image)
        g = _permute_cols(g, r_inv)
        g = _permute_rows(g, r_inv)
        out.append(LatinSquare(n, g))
    return tuple(out)


def canonicalize_pair(x: LatinSquare, y: LatinSquare) -> tuple[LatinSquare, LatinSquare]:
    """Canonical form of an orthogonal pair; see canonicalize_set."""
    a, b = canonicalize_set([x, y])
    return a, b


def first_column_permutation(y: Square) -> Permutation:
    """rho(i) = y[i][0] for a pair in border-sorted form."""
    return Permutation(tuple(row[0] for row in y.cells))
