"""A small finite-domain constraint solver.

Supports AllDifferent, element indexing (row[x] = y with a vector of
variables), and the ternary arithmetic channel z = x + base*y.  Search is
chronological backtracking that always branches on the first unassigned
variable in declaration order, trying values in ascending order; domains are
bitmasks and backtracking restores them from a trail.

Propagation levels:
  "assign"  when a variable becomes assigned, its value is removed from all
            AllDifferent peers (plus full element/channel filtering);
  "hall"    additionally removes Hall intervals found from domain bounds
            (bounds-consistency style).  This is the default.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from molsearch.core import LatinSquare

SAT = "SAT"
UNSAT = "UNSAT"
TIMEOUT = "TIMEOUT"

MODE_FIRST = "first"
MODE_PROVE = "prove"
MODE_ENUMERATE = "enumerate"

PROP_ASSIGN = "assign"
PROP_HALL = "hall"


@dataclass(frozen=True)
class FdVar:
    id: int
    domain: frozenset[int]
    name: str = ""

    @property
    def declaration_position(self) -> int:
        return self.id


class FdModel:
    """A finite-domain model: variables in declaration order plus constraints."""

    def __init__(self):
        self.variables: list[FdVar] = []
        self.alldiff_constraints: list[tuple[int, ...]] = []
        self.element_constraints: list[tuple[tuple[int, ...], int, int]] = []
        self.channel_constraints: list[tuple[int, int, int, int]] = []
        self.fixings: list[tuple[int, int]] = []
        self.restrictions: list[tuple[int, frozenset[int]]] = []

    def new_var(self, domain, name: str = "") -> int:
        dom = frozenset(domain)
        if not dom:
            raise ValueError(f"variable {name!r} has an empty domain")
        if min(dom) < 0:
            raise ValueError(f"variable {name!r} has negative domain values")
        vid = len(self.variables)
        self.variables.append(FdVar(vid, dom, name))
        return vid

    def _check_ids(self, ids) -> tuple[int, ...]:
        ids = tuple(ids)
        for v in ids:
            if not 0 <= v < len(self.variables):
                raise ValueError(f"undeclared variable id {v}")
        return ids

    def add_alldiff(self, ids: Sequence[int]) -> None:
        self.alldiff_constraints.append(self._check_ids(ids))

    def add_element(self, row: Sequence[int], index: int, value: int) -> None:
        row = self._check_ids(row)
        (index, value) = self._check_ids((index, value))
        bound = max(self.variables[index].domain) + 1
        if len(row) != bound:
            raise ValueError(
                f"element row has length {len(row)} but index domain bound is {bound}"
            )
        self.element_constraints.append((row, index, value))

    def add_channel(self, z: int, x: int, y: int, base: int) -> None:
        """Constrain z == x + base*y."""
        (z, x, y) = self._check_ids((z, x, y))
        if base < 1:
            raise ValueError(f"channel base must be >= 1, got {base}")
        self.channel_constraints.append((z, x, y, base))

    def fix(self, var: int, value: int) -> None:
        (var,) = self._check_ids((var,))
        if value not in self.variables[var].domain:
            raise ValueError(f"cannot fix variable {var} to {value}: not in domain")
        self.fixings.append((var, value))

    def restrict(self, var: int, allowed) -> None:
        (var,) = self._check_ids((var,))
        allowed = frozenset(allowed) & self.variables[var].domain
        if not allowed:
            raise ValueError(f"restriction empties the domain of variable {var}")
        self.restrictions.append((var, allowed))


@dataclass
class SearchStats:
    outcome: str
    branches: int = 0
    nodes: int = 0
    time_seconds: float = 0.0
    solution_count: int = 0
    solutions: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def solution(self) -> tuple[int, ...] | None:
        return self.solutions[0] if self.solutions else None


def check_assignment(model: FdModel, values: Sequence[int]) -> list[str]:
    """All constraint violations of a full assignment (empty list == valid)."""
    bad = []
    for vid, var in enumerate(model.variables):
        if values[vid] not in var.domain:
            bad.append(f"variable {vid} value {values[vid]} outside its domain")
    for var, value in model.fixings:
        if values[var] != value:
            bad.append(f"fixing of variable {var} to {value} violated")
    for var, allowed in model.restrictions:
        if values[var] not in allowed:
            bad.append(f"restriction on variable {var} violated")
    for ci, ids in enumerate(model.alldiff_constraints):
        vals = [values[v] for v in ids]
        if len(set(vals)) != len(vals):
            bad.append(f"alldiff {ci} has repeated values")
    for ei, (row, x, y) in enumerate(model.element_constraints):
        if values[row[values[x]]] != values[y]:
            bad.append(f"element {ei} violated")
    for ki, (z, x, y, base) in enumerate(model.channel_constraints):
        if values[z] != values[x] + base * values[y]:
            bad.append(f"channel {ki} violated")
    return bad


class Solver:
    """Single-use search engine over one FdModel.

    Not shareable mid-search; build a fresh instance per solve.  Identical
    models produce identical statistics and identical solution order.
    """

    def __init__(self, model: FdModel, propagation: str = PROP_HALL):
        if propagation not in (PROP_ASSIGN, PROP_HALL):
            raise ValueError(f"unknown propagation level {propagation!r}")
        self.model = model
        self.propagation = propagation
        nv = len(model.variables)

        doms = []
        for v in model.variables:
            m = 0
            for val in v.domain:
                m |= 1 << val
            doms.append(m)
        for var, value in model.fixings:
            doms[var] &= 1 << value
        for var, allowed in model.restrictions:
            m = 0
            for val in allowed:
                m |= 1 << val
            doms[var] &= m
        self.doms = doms

        self.ad_members = [tuple(c) for c in model.alldiff_constraints]
        self.var_ads: list[list[int]] = [[] for _ in range(nv)]
        for ci, members in enumerate(self.ad_members):
            if len(set(members)) != len(members):
                raise ValueError(f"alldiff {ci} lists a variable twice")
            for u in members:
                self.var_ads[u].append(ci)

        self.elements = [
            (tuple(row), x, y) for (row, x, y) in model.element_constraints
        ]
        self.var_els: list[list[int]] = [[] for _ in range(nv)]
        for ei, (row, x, y) in enumerate(self.elements):
            for u in dict.fromkeys(row + (x, y)):
                self.var_els[u].append(ei)

        self.channels = list(model.channel_constraints)
        self.var_chs: list[list[int]] = [[] for _ in range(nv)]
        for ki, (z, x, y, base) in enumerate(self.channels):
            for u in dict.fromkeys((z, x, y)):
                self.var_chs[u].append(ki)

        self.trail: list[tuple[int, int]] = []
        self._el_queued = bytearray(len(self.elements))
        self._ch_queued = bytearray(len(self.channels))
        self._ad_queued = bytearray(len(self.ad_members))
        self.stats = SearchStats(outcome=UNSAT)

    # -- propagation ------------------------------------------------------

    def _propagate(self, assigned_seed: list[int], full: bool = False) -> bool:
        """Run all propagators to fixpoint.  Returns False on conflict.

        assigned_seed lists variables already assigned whose consequences are
        pending; full=True additionally queues every constraint (used once at
        the root).
        """
        doms = self.doms
        trail = self.trail
        var_ads = self.var_ads
        var_els = self.var_els
        var_chs = self.var_chs
        ad_members = self.ad_members
        elements = self.elements
        channels = self.channels
        el_queued = self._el_queued
        ch_queued = self._ch_queued
        ad_queued = self._ad_queued
        hall = self.propagation == PROP_HALL

        q_assigned = list(assigned_seed)
        dirty_el: list[int] = []
        dirty_ch: list[int] = []
        dirty_ad: list[int] = []
        if full:
            for v, m in enumerate(doms):
                if m == 0:
                    return False
                if m & (m - 1) == 0:
                    q_assigned.append(v)
            for e in range(len(elements)):
                el_queued[e] = 1
                dirty_el.append(e)
            for k in range(len(channels)):
                ch_queued[k] = 1
                dirty_ch.append(k)
            if hall:
                for c in range(len(ad_members)):
                    ad_queued[c] = 1
                    dirty_ad.append(c)

        conflict = False

        def shrink(u: int, new: int) -> bool:
            nonlocal conflict
            old = doms[u]
            if new == old:
                return True
            if new == 0:
                conflict = True
                return False
            trail.append((u, old))
            doms[u] = new
            if new & (new - 1) == 0:
                q_assigned.append(u)
            for e in var_els[u]:
                if not el_queued[e]:
                    el_queued[e] = 1
                    dirty_el.append(e)
            for k in var_chs[u]:
                if not ch_queued[k]:
                    ch_queued[k] = 1
                    dirty_ch.append(k)
            if hall and (
                (old & -old) != (new & -new) or old.bit_length() != new.bit_length()
            ):
                for c in var_ads[u]:
                    if not ad_queued[c]:
                        ad_queued[c] = 1
                        dirty_ad.append(c)
            return True

        while True:
            if q_assigned:
                v = q_assigned.pop()
                m = doms[v]
                for c in var_ads[v]:
                    for u in ad_members[c]:
                        if u != v and doms[u] & m:
                            if not shrink(u, doms[u] & ~m):
                                break
                    if conflict:
                        break
                if conflict:
                    break
                continue
            if dirty_ch:
                k = dirty_ch.pop()
                ch_queued[k] = 0
                z, x, y, base = channels[k]
                dz = doms[z]
                chunk_mask = (1 << base) - 1
                acc_x = 0
                acc_y = 0
                shift = 0
                t = dz
                bit = 1
                while t:
                    chunk = t & chunk_mask
                    if chunk:
                        acc_x |= chunk
                        acc_y |= bit
                    t >>= base
                    bit <<= 1
                if not shrink(x, doms[x] & acc_x):
                    break
                if not shrink(y, doms[y] & acc_y):
                    break
                allowed = 0
                dx = doms[x]
                t = doms[y]
                while t:
                    b = t & -t
                    t ^= b
                    allowed |= dx << (base * (b.bit_length() - 1))
                if not shrink(z, dz & allowed):
                    break
                continue
            if dirty_el:
                e = dirty_el.pop()
                el_queued[e] = 0
                row, x, y = elements[e]
                dx = doms[x]
                if dx & (dx - 1) == 0:
                    rv = row[dx.bit_length() - 1]
                    inter = doms[rv] & doms[y]
                    if inter == 0:
                        conflict = True
                        break
                    if not shrink(rv, inter):
                        break
                    if not shrink(y, inter):
                        break
                else:
                    dy = doms[y]
                    rm = 0
                    t = dx
                    while t:
                        b = t & -t
                        t ^= b
                        if not doms[row[b.bit_length() - 1]] & dy:
                            rm |= b
                    if rm and not shrink(x, dx & ~rm):
                        break
                continue
            if dirty_ad:
                c = dirty_ad.pop()
                ad_queued[c] = 0
                if not self._hall_pass(c, shrink):
                    conflict = True
                    break
                continue
            break

        if conflict:
            for e in dirty_el:
                el_queued[e] = 0
            for k in dirty_ch:
                ch_queued[k] = 0
            for c in dirty_ad:
                ad_queued[c] = 0
            return False
        return True

    def _hall_pass(self, c: int, shrink) -> bool:
        """Hall-interval filtering from domain bounds for one AllDifferent.

        Finds intervals [a, b] that some b-a+1 member domains are confined to
        and removes them from every other member; fails when more members than
        values are confined.  Loops until a full scan prunes nothing, so the
        constraint itself reaches a fixpoint; effects on other constraints are
        queued through shrink.
        """
        doms = self.doms
        members = self.ad_members[c]
        while True:
            lbs = []
            ubs = []
            for u in members:
                d = doms[u]
                lbs.append((d & -d).bit_length() - 1)
                ubs.append(d.bit_length() - 1)
            order = sorted(range(len(members)), key=ubs.__getitem__)
            last = len(order) - 1
            pruned = False
            for a in sorted(set(lbs)):
                count = 0
                for pos, i in enumerate(order):
                    if lbs[i] >= a:
                        count += 1
                    b = ubs[i]
                    if b < a:
                        continue
                    if pos < last and ubs[order[pos + 1]] == b:
                        continue
                    width = b - a + 1
                    if count > width:
                        return False
                    if count == width:
                        mask = ((1 << width) - 1) << a
                        for k, u in enumerate(members):
                            if lbs[k] >= a and ubs[k] <= b:
                                continue
                            if doms[u] & mask:
                                if not shrink(u, doms[u] & ~mask):
                                    return False
                                pruned = True
                        if pruned:
                            break
                if pruned:
                    break
            if not pruned:
                return True

    # -- search -----------------------------------------------------------

    def propagate_root(self) -> bool:
        return self._propagate([], full=True)

    def iter_solutions(
        self, timeout: float | None = None, mode: str = MODE_ENUMERATE
    ) -> Iterator[tuple[int, ...]]:
        """DFS over the model; yields each solution as a value-per-variable tuple.

        Statistics accumulate in self.stats and are final once the iterator
        is exhausted (or closed after a FIRST-mode hit).
        """
        doms = self.doms
        trail = self.trail
        stats = self.stats
        start = time.monotonic()
        deadline = start + timeout if timeout is not None else None
        nv = len(doms)

        stats.outcome = UNSAT
        stats.branches = 0
        stats.nodes = 0

        if not self.propagate_root():
            stats.time_seconds = time.monotonic() - start
            return
        stats.nodes = 1

        # frame: [var, remaining_values_mask, trail_mark, hint]
        frames: list[list[int]] = []
        hint = 0
        descend = True
        branches = 0
        nodes = 1

        while True:
            if descend:
                v = hint
                while v < nv:
                    if doms[v] & (doms[v] - 1):
                        break
                    v += 1
                hint = v
                if v == nv:
                    sol = tuple(d.bit_length() - 1 for d in doms)
                    stats.solution_count += 1
                    stats.branches = branches
                    stats.nodes = nodes
                    stats.time_seconds = time.monotonic() - start
                    stats.outcome = SAT
                    yield sol
                    if mode == MODE_FIRST:
                        return
                    descend = False
                    continue
                frames.append([v, doms[v], len(trail), hint])

            progressed = False
            while frames:
                frame = frames[-1]
                rem = frame[1]
                if rem == 0:
                    frames.pop()
                    continue
                bit = rem & -rem
                frame[1] = rem ^ bit
                mark = frame[2]
                while len(trail) > mark:
                    u, old = trail.pop()
                    doms[u] = old
                hint = frame[3]
                branches += 1
                if deadline is not None and time.monotonic() > deadline:
                    stats.branches = branches
                    stats.nodes = nodes
                    stats.outcome = TIMEOUT
                    stats.time_seconds = time.monotonic() - start
                    return
                v = frame[0]
                trail.append((v, doms[v]))
                doms[v] = bit
                if self._propagate([v]):
                    nodes += 1
                    progressed = True
                    break

            if progressed:
                descend = True
                continue
            # tree exhausted
            stats.branches = branches
            stats.nodes = nodes
            if stats.solution_count == 0:
                stats.outcome = UNSAT
            else:
                stats.outcome = SAT
            stats.time_seconds = time.monotonic() - start
            return

    def solve(
        self,
        mode: str = MODE_FIRST,
        timeout: float | None = None,
        max_solutions: int | None = None,
    ) -> SearchStats:
        if mode not in (MODE_FIRST, MODE_PROVE, MODE_ENUMERATE):
            raise ValueError(f"unknown mode {mode!r}")
        it = self.iter_solutions(timeout=timeout, mode=mode)
        for sol in it:
            violations = check_assignment(self.model, sol)
            if violations:
                raise AssertionError(
                    "solver returned an invalid assignment: " + "; ".join(violations)
                )
            if mode != MODE_PROVE:
                self.stats.solutions.append(sol)
            if mode == MODE_FIRST:
                it.close()
                break
            if max_solutions is not None and self.stats.solution_count >= max_solutions:
                it.close()
                break
        return self.stats


def solve(
    model: FdModel,
    mode: str = MODE_FIRST,
    timeout: float | None = None,
    propagation: str = PROP_HALL,
    max_solutions: int | None = None,
) -> SearchStats:
    """Solve a model; returns stats with solutions attached (unless PROVE mode)."""
    return Solver(model, propagation=propagation).solve(
        mode=mode, timeout=timeout, max_solutions=max_solutions
    )


def propagate(model: FdModel, propagation: str = PROP_HALL) -> list[frozenset[int]] | None:
    """Root propagation only: reduced domains, or None on conflict."""
    s = Solver(model, propagation=propagation)
    if not s.propagate_root():
        return None
    out = []
    for m in s.doms:
        vals = []
        t = m
        while t:
            b = t & -t
            t ^= b
            vals.append(b.bit_length() - 1)
        out.append(frozenset(vals))
    return out


def latin_model(n: int, fix_first_row: bool = True) -> FdModel:
    """Model of a single latin square, cell variables row-major."""
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    m = FdModel()
    grid = [[m.new_var(range(n), f"c_{i}_{j}") for j in range(n)] for i in range(n)]
    for i in range(n):
        m.add_alldiff(grid[i])
    for j in range(n):
        m.add_alldiff([grid[i][j] for i in range(n)])
    if fix_first_row:
        for j in range(n):
            m.fix(grid[0][j], j)
    return m


def enumerate_latin(n: int, fix_first_row: bool = True) -> Iterator[LatinSquare]:
    """All latin squares of order n in the solver's deterministic order.

    With fix_first_row the first row is pinned to 0..n-1; the stream is then
    lexicographic in the row-major cell values.
    """
    model = latin_model(n, fix_first_row)
    solver = Solver(model)
    for sol in solver.iter_solutions():
        cells = tuple(tuple(sol[i * n + j] for j in range(n)) for i in range(n))
        yield LatinSquare(n, cells)
