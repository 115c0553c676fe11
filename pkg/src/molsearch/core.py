"""Value types for latin squares and MOLS sets, plus the square file format.

A square of order n holds symbols 0..n-1.  ``Square`` is unvalidated (solver
internals may hold partial structure); ``LatinSquare`` additionally enforces
the row/column latin invariants at construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

MAX_ORDER = 64


class SquareFormatError(ValueError):
    """Malformed square file; carries the 1-based offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _normalize_cells(order: int, cells: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    rows = tuple(tuple(row) for row in cells)
    if len(rows) != order:
        raise ValueError(f"expected {order} rows, got {len(rows)}")
    for i, row in enumerate(rows):
        if len(row) != order:
            raise ValueError(f"row {i}: expected {order} symbols, got {len(row)}")
        for j, v in enumerate(row):
            if not 0 <= v < order:
                raise ValueError(f"cell ({i},{j}): symbol {v} out of range 0..{order - 1}")
    return rows


@dataclass(frozen=True)
class Square:
    """An order-n grid of symbols in 0..n-1, with no latin requirement."""

    order: int
    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "cells", _normalize_cells(self.order, self.cells))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "Square":
        return cls(len(rows), tuple(tuple(r) for r in rows))

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.cells)


@dataclass(frozen=True)
class LatinSquare(Square):
    """A square where every row and every column is a permutation of 0..n-1."""

    def __post_init__(self):
        super().__post_init__()
        defect = _latin_defect(self.order, self.cells)
        if defect is not None:
            kind, index = defect
            raise ValueError(f"not latin: {kind} {index} has a repeated symbol")


def _latin_defect(n: int, cells: tuple[tuple[int, ...], ...]) -> tuple[str, int] | None:
    """First violated latin invariant as (kind, index), or None."""
    full = (1 << n) - 1
    for i, row in enumerate(cells):
        seen = 0
        for v in row:
            seen |= 1 << v
        if seen != full:
            return ("row", i)
    for j in range(n):
        seen = 0
        for row in cells:
            seen |= 1 << row[j]
        if seen != full:
            return ("column", j)
    return None


def is_latin(square: Square) -> bool:
    """True iff every row and column of the square contains each symbol once."""
    return _latin_defect(square.order, square.cells) is None


def are_orthogonal(a: Square, b: Square) -> bool:
    """True iff superimposing a and b yields all n^2 ordered symbol pairs.

    Raises ValueError on an order mismatch (a caller bug, not a verdict).
    """
    n = a.order
    if b.order != n:
        raise ValueError(f"order mismatch: {n} vs {b.order}")
    seen = bytearray(n * n)
    for ra, rb in zip(a.cells, b.cells):
        for va, vb in zip(ra, rb):
            k = va * n + vb
            if seen[k]:
                return False
            seen[k] = 1
    return True


@dataclass(frozen=True)
class MolsReport:
    """Every violated MOLS invariant for a list of candidate squares.

    ``latin_defects`` holds (square index, "row"|"column", position) triples;
    ``pair_defects`` holds (square index, square index, duplicated (a,b) value
    pair) triples, one per repeated ordered pair.
    """

    order: int
    square_count: int
    order_mismatches: tuple[int, ...] = ()
    latin_defects: tuple[tuple[int, str, int], ...] = ()
    pair_defects: tuple[tuple[int, int, tuple[int, int]], ...] = ()

    @property
    def ok(self) -> bool:
        return not (self.order_mismatches or self.latin_defects or self.pair_defects)

    def lines(self) -> list[str]:
        out = []
        for idx in self.order_mismatches:
            out.append(f"square {idx}: order differs from square 0")
        for idx, kind, pos in self.latin_defects:
            out.append(f"square {idx}: {kind} {pos} repeats a symbol")
        for i, j, (va, vb) in self.pair_defects:
            out.append(f"squares {i},{j}: value pair ({va},{vb}) occurs more than once")
        return out

    def __str__(self) -> str:
        if self.ok:
            return f"ok: {self.square_count} mutually orthogonal latin squares of order {self.order}"
        return "\n".join(self.lines())


def verify_mols(squares: Sequence[Square] | "MolsSet") -> MolsReport:
    """Check the full MOLS contract and report every violation found."""
    if isinstance(squares, MolsSet):
        squares = squares.squares
    squares = list(squares)
    if not squares:
        return MolsReport(order=0, square_count=0)
    n = squares[0].order
    mismatches = tuple(i for i, s in enumerate(squares) if s.order != n)
    latin_defects = []
    for idx, s in enumerate(squares):
        if idx in mismatches:
            continue
        latin_defects.extend(_all_latin_defects(idx, s))
    pair_defects = []
    for i in range(len(squares)):
        for j in range(i + 1, len(squares)):
            if i in mismatches or j in mismatches:
                continue
            pair_defects.extend(_pair_duplicates(i, j, squares[i], squares[j]))
    return MolsReport(
        order=n,
        square_count=len(squares),
        order_mismatches=mismatches,
        latin_defects=tuple(latin_defects),
        pair_defects=tuple(pair_defects),
    )


def _all_latin_defects(idx: int, s: Square) -> list[tuple[int, str, int]]:
    n = s.order
    full = (1 << n) - 1
    out = []
    for i, row in enumerate(s.cells):
        seen = 0
        for v in row:
            seen |= 1 << v
        if seen != full:
            out.append((idx, "row", i))
    for j in range(n):
        seen = 0
        for row in s.cells:
            seen |= 1 << row[j]
        if seen != full:
            out.append((idx, "column", j))
    return out


def _pair_duplicates(i: int, j: int, a: Square, b: Square) -> list[tuple[int, int, tuple[int, int]]]:
    n = a.order
    counts: dict[tuple[int, int], int] = {}
    for ra, rb in zip(a.cells, b.cells):
        for va, vb in zip(ra, rb):
            counts[(va, vb)] = counts.get((va, vb), 0) + 1
    return [(i, j, pair) for pair, c in sorted(counts.items()) if c > 1]


@dataclass(frozen=True)
class MolsSet:
    """A validated set of k >= 1 mutually orthogonal latin squares."""

    order: int
    squares: tuple[LatinSquare, ...]

    def __post_init__(self):
        if not self.squares:
            raise ValueError("a MOLS set needs at least one square")
        report = verify_mols(self.squares)
        if self.squares[0].order != self.order:
            raise ValueError(f"declared order {self.order} != square order {self.squares[0].order}")
        if not report.ok:
            raise ValueError("not a MOLS set:\n" + str(report))

    @classmethod
    def from_squares(cls, squares: Sequence[LatinSquare]) -> "MolsSet":
        return cls(squares[0].order, tuple(squares))

    @property
    def k(self) -> int:
        return len(self.squares)


# ---------------------------------------------------------------------------
# Square file format
#
#   order <n>
#   <n rows of n space-separated symbols>      (first square)
#   <blank line>
#   <n rows ...>                               (second square)
#
# '#' starts a comment line; comments may appear anywhere and are ignored.
# The writer is canonical: single spaces, one blank line between squares,
# a single trailing newline, no trailing spaces.
# ---------------------------------------------------------------------------


def read_squares(text: str) -> list[Square]:
    """Parse the square file format; raises SquareFormatError with a line number."""
    lines = text.split("\n")
    # (lineno, content) with comments dropped
    items = [
        (idx + 1, line)
        for idx, line in enumerate(lines)
        if not line.lstrip().startswith("#")
    ]
    pos = 0

    def skip_blank() -> int:
        nonlocal pos
        count = 0
        while pos < len(items) and items[pos][1].strip() == "":
            pos += 1
            count += 1
        return count

    skip_blank()
    if pos == len(items):
        return []
    lineno, header = items[pos]
    parts = header.split()
    if len(parts) != 2 or parts[0] != "order":
        raise SquareFormatError(f"expected 'order <n>', got {header!r}", lineno)
    try:
        order = int(parts[1])
    except ValueError:
        raise SquareFormatError(f"order is not an integer: {parts[1]!r}", lineno) from None
    if order < 1:
        raise SquareFormatError(f"order must be >= 1, got {order}", lineno)
    if order > MAX_ORDER:
        raise SquareFormatError(f"order {order} exceeds maximum supported order {MAX_ORDER}", lineno)
    pos += 1

    squares: list[Square] = []
    while True:
        skip_blank()
        if pos == len(items):
            break
        rows: list[tuple[int, ...]] = []
        first_lineno = items[pos][0]
        for r in range(order):
            if pos == len(items) or items[pos][1].strip() == "":
                raise SquareFormatError(
                    f"square {len(squares)}: expected {order} rows, got {r}",
                    items[pos][0] if pos < len(items) else first_lineno,
                )
            lineno, line = items[pos]
            tokens = line.split()
            if len(tokens) != order:
                raise SquareFormatError(
                    f"expected {order} symbols, got {len(tokens)}", lineno
                )
            row = []
            for c, tok in enumerate(tokens):
                try:
                    v = int(tok)
                except ValueError:
                    raise SquareFormatError(f"symbol {c} is not an integer: {tok!r}", lineno) from None
                if not 0 <= v < order:
                    raise SquareFormatError(
                        f"symbol {c} is {v}, outside 0..{order - 1}", lineno
                    )
                row.append(v)
            rows.append(tuple(row))
            pos += 1
        squares.append(Square(order, tuple(rows)))
    if not squares:
        raise SquareFormatError("order line present but no squares follow", lineno)
    return squares


def write_squares(squares: Sequence[Square]) -> str:
    """Canonical text for a square list; inverse of read_squares."""
    if not squares:
        return ""
    order = squares[0].order
    for idx, s in enumerate(squares):
        if s.order != order:
            raise ValueError(f"square {idx} has order {s.order}, expected {order}")
    blocks = []
    for s in squares:
        blocks.append("\n".join(" ".join(str(v) for v in row) for row in s.cells))
    return f"order {order}\n" + "\n\n".join(blocks) + "\n"
