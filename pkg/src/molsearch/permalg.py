"""Permutation algebra: composition, inverses, ordered cycles, row-wise products.

Composition is left-to-right throughout: ``compose(f, g)`` is x -> g(f(x)).
No right-to-left API is exposed; one convention eliminates a classic bug
source when rows of latin squares are treated as permutations.
"""

from __future__ import annotations

from dataclasses import dataclass

from molsearch.core import LatinSquare, Square


@dataclass(frozen=True)
class Permutation:
    """A bijection on {0..n-1}, stored as its image array."""

    image: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "image", tuple(self.image))
        n = len(self.image)
        if sorted(self.image) != list(range(n)):
            raise ValueError(f"not a bijection on 0..{n - 1}: {self.image}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    def __call__(self, x: int) -> int:
        return self.image[x]

    @property
    def size(self) -> int:
        return len(self.image)

    def __len__(self) -> int:
        return len(self.image)


def compose(f: Permutation, g: Permutation) -> Permutation:
    """Left-to-right composition: x -> g(f(x))."""
    if f.size != g.size:
        raise ValueError(f"size mismatch: {f.size} vs {g.size}")
    gi = g.image
    return Permutation(tuple(gi[v] for v in f.image))


def inverse(p: Permutation) -> Permutation:
    inv = [0] * p.size
    for x, y in enumerate(p.image):
        inv[y] = x
    return Permutation(tuple(inv))


def conjugate(p: Permutation, r: Permutation) -> Permutation:
    """x -> r(p(r^{-1}(x))): renames every element x in p's cycles to r(x)."""
    if p.size != r.size:
        raise ValueError(f"size mismatch: {p.size} vs {r.size}")
    ri = r.image
    out = [0] * p.size
    for x, y in enumerate(p.image):
        out[ri[x]] = ri[y]
    return Permutation(tuple(out))


@dataclass(frozen=True)
class OrderedCycles:
    """Disjoint-cycle form: each cycle rotated to start at its least element,
    cycles sorted lexicographically, fixed points kept as length-1 cycles."""

    cycles: tuple[tuple[int, ...], ...]

    @property
    def cycle_type(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cycles)

    def to_permutation(self) -> Permutation:
        n = sum(len(c) for c in self.cycles)
        image = [0] * n
        for cyc in self.cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                image[a] = b
        return Permutation(tuple(image))


def ordered_cycles(p: Permutation) -> OrderedCycles:
    """Cycle decomposition in ordered form (least element first, cycles sorted)."""
    seen = [False] * p.size
    cycles = []
    for start in range(p.size):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = p.image[x]
        cycles.append(tuple(cyc))
    # tracing from the least unvisited element already yields least-first
    # cycles in lexicographic order
    return OrderedCycles(tuple(cycles))


def cycle_type(p: Permutation) -> tuple[int, ...]:
    return ordered_cycles(p).cycle_type


def rows_as_permutations(square: Square) -> list[Permutation]:
    return [Permutation(row) for row in square.cells]


def row_product(a: Square, b: Square) -> Square:
    """Square whose row i is the left-to-right composition of rows a_i then b_i.

    Entry (i,j) is b_i(a_i(j)).  The result need not be latin; for latin a, b
    it is latin exactly when a and b are orthogonal.
    """
    if a.order != b.order:
        raise ValueError(f"order mismatch: {a.order} vs {b.order}")
    cells = tuple(
        tuple(rb[v] for v in ra) for ra, rb in zip(a.cells, b.cells)
    )
    return Square(a.order, cells)


def row_inverse(a: LatinSquare) -> LatinSquare:
    """Square whose row i is the inverse of a's row i (latin whenever a is)."""
    n = a.order
    cells = []
    for row in a.cells:
        inv = [0] * n
        for j, v in enumerate(row):
            inv[v] = j
        cells.append(tuple(inv))
    return LatinSquare(n, tuple(cells))
