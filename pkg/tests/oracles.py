"""Independent brute-force oracles for small orders.

Everything here is deliberately naive and shares no code with the package's
solver or model builders: latin squares are enumerated row by row with
itertools.permutations, orthogonality is checked by counting value pairs,
and pair models are "solved" by exhaustive enumeration over square pairs.
"""

from __future__ import annotations

import itertools
from functools import lru_cache


def latin_squares(n: int, fix_first_row: bool = False):
    """Yield every latin square of order n as a tuple of row tuples."""
    first_rows = (
        [tuple(range(n))] if fix_first_row else itertools.permutations(range(n))
    )
    for first in first_rows:
        yield from _extend([first], n)


def _extend(rows: list[tuple[int, ...]], n: int):
    if len(rows) == n:
        yield tuple(rows)
        return
    cols = [set() for _ in range(n)]
    for row in rows:
        for j, v in enumerate(row):
            cols[j].add(v)
    for perm in itertools.permutations(range(n)):
        if all(perm[j] not in cols[j] for j in range(n)):
            rows.append(perm)
            yield from _extend(rows, n)
            rows.pop()


@lru_cache(maxsize=None)
def all_latin_squares(n: int, fix_first_row: bool = False) -> tuple:
    return tuple(latin_squares(n, fix_first_row))


def is_latin_grid(cells) -> bool:
    n = len(cells)
    want = set(range(n))
    if any(set(row) != want for row in cells):
        return False
    return all({row[j] for row in cells} == want for j in range(n))


def distinct_pair_count(a, b) -> int:
    """Number of distinct ordered value pairs when superimposing a and b."""
    return len({(ra[j], rb[j]) for ra, rb in zip(a, b) for j in range(len(a))})


def orthogonal_grids(a, b) -> bool:
    n = len(a)
    return distinct_pair_count(a, b) == n * n


@lru_cache(maxsize=None)
def all_orthogonal_pairs(n: int, fix_first_rows: bool = False) -> tuple:
    """All ordered orthogonal pairs of latin squares of order n."""
    squares = all_latin_squares(n, fix_first_rows)
    return tuple(
        (a, b) for a in squares for b in squares if orthogonal_grids(a, b)
    )


def derangement_count(m: int) -> int:
    """Permutations of m elements with no fixed point, by direct recurrence."""
    if m == 0:
        return 1
    if m == 1:
        return 0
    d = [1, 0]
    for k in range(2, m + 1):
        d.append((k - 1) * (d[k - 1] + d[k - 2]))
    return d[m]


def fibonacci(k: int) -> int:
    """F(1) = F(2) = 1."""
    if k < 1:
        raise ValueError("defined for k >= 1")
    a, b = 1, 1
    for _ in range(k - 1):
        a, b = b, a + b
    return a


# ---------------------------------------------------------------------------
# Orbit closure under the symmetries that preserve orthogonal pairs:
# simultaneous row permutations, simultaneous column permutations,
# independent symbol relabelings, swapping the two squares, transposing both.
# ---------------------------------------------------------------------------


def _swap_rows(g, i, j):
    g = list(g)
    g[i], g[j] = g[j], g[i]
    return tuple(g)


def _swap_cols(g, i, j):
    return tuple(
        tuple(row[j] if c == i else row[i] if c == j else row[c] for c in range(len(row)))
        for row in g
    )


def _swap_symbols(g, i, j):
    return tuple(
        tuple(j if v == i else i if v == j else v for v in row) for row in g
    )


def _transpose(g):
    return tuple(zip(*g))


def pair_orbit(pair) -> frozenset:
    """Closure of one ordered pair under all pair-preserving symmetries."""
    n = len(pair[0])
    gens = []
    for i in range(n - 1):
        gens.append(lambda p, i=i: (_swap_rows(p[0], i, i + 1), _swap_rows(p[1], i, i + 1)))
        gens.append(lambda p, i=i: (_swap_cols(p[0], i, i + 1), _swap_cols(p[1], i, i + 1)))
        gens.append(lambda p, i=i: (_swap_symbols(p[0], i, i + 1), p[1]))
        gens.append(lambda p, i=i: (p[0], _swap_symbols(p[1], i, i + 1)))
    gens.append(lambda p: (p[1], p[0]))
    gens.append(lambda p: (_transpose(p[0]), _transpose(p[1])))

    seen = {pair}
    frontier = [pair]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = g(p)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return frozenset(seen)
