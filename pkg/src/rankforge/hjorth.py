"""The generic level-table engine over abstract action systems.

An :class:`ActionSystem` supplies finitely many points, finitely many basis
sets with a containment order, an optional closure-refined containment
(``fine``), and the base relation ``cc`` comparing the closures of
basis-translate sets.  From that the engine computes the stratified
non-symmetric relation tables

    T_1 = cc
    T_{a+1}(x0,V0,x1,V1)  iff  for all W0 <= V0 there is W1 <= V1
                               with T_a(x1,W1,x0,W0)

note the argument flip, iterated to stabilization.  Levels are naturals from
1; finite decreasing chains make the stabilized table stand in for all limit
levels (the STAB sentinel).  The engine validates rather than trusts cc: a
sweep that grows the table aborts, since the shrinking chain is otherwise
derived from a continuity the supplied cc may lack.

Everything downstream -- the two-sided equivalences, the rank (least level
where the relation at a point steps up for free modulo shrinking/expanding
the basis sets), Vaught transforms at finite-discrete scale, fixed-point
characterizations, rank partitions -- is computed from these tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .common import (STAB, BudgetError, InvalidBaseRelationError, RankforgeError,
                     UnsupportedOperationError)


class ActionSystem:
    """Abstract finite action: points, basis sets, containment and cc.

    Subclasses fill in ``points`` and ``basis`` (label lists), ``contains``
    and ``cc``.  ``fine`` defaults to ``contains``: every shipped basis is
    clopen, so the closure bar collapses.  Systems backed by an actual group
    additionally expose ``group`` (labels), ``act``, ``basis_members`` and,
    when the basis is translation-closed, ``translate``.
    """

    points: Sequence[str]
    basis: Sequence[str]
    group: Sequence[str] | None = None

    def contains(self, w: int, v: int) -> bool:
        raise NotImplementedError

    def fine(self, w: int, v: int) -> bool:
        return self.contains(w, v)

    def cc(self, x0: int, v0: int, x1: int, v1: int) -> bool:
        raise NotImplementedError

    def act(self, g: int, x: int) -> int:
        raise UnsupportedOperationError("system does not expose an action")

    def basis_members(self, v: int) -> frozenset[int]:
        raise UnsupportedOperationError("system does not expose basis membership")

    def translate(self, v: int, g: int) -> int:
        raise UnsupportedOperationError("system does not expose translation")

    @property
    def has_action(self) -> bool:
        return self.group is not None

    # Optional fast path: subclasses may return the full T_1 as a numpy array.
    def cc_table(self):
        return None

    def describe(self) -> str:
        return f"{type(self).__name__}(points={len(self.points)}, basis={len(self.basis)})"


@dataclass(frozen=True)
class Rank:
    """A finite level plus the table's stabilization index.

    value 0 is reserved for degenerate single-point systems and is never
    produced by the engine (the defining condition starts at level 1).
    """

    value: int
    stabilized_at: int

    def __post_init__(self):
        if self.value > self.stabilized_at:
            raise ValueError("rank exceeds stabilization index")


class LevelTable:
    """The stratified tables T_1, T_2, ... for one system, as bit tables.

    Each sweep derives the next table from the immutable previous one, so
    entries within a sweep are order-independent; sweeps are barriers.
    Finished tables are read-only and safe to share.
    """

    def __init__(self, sys: ActionSystem, max_level: int | None = None,
                 table_pairs_budget: int = 6000):
        npoints, nbasis = len(sys.points), len(sys.basis)
        if npoints * nbasis > table_pairs_budget:
            raise BudgetError(
                f"{npoints} points x {nbasis} basis sets = {npoints * nbasis} pairs "
                f"exceed the table budget of {table_pairs_budget}")
        self.sys = sys
        self.npoints = npoints
        self.nbasis = nbasis
        sub = np.zeros((nbasis, nbasis), dtype=bool)
        for w in range(nbasis):
            for v in range(nbasis):
                sub[w, v] = sys.contains(w, v)
        self.sub = sub
        self._subf = sub.astype(np.float32)

        t1 = sys.cc_table()
        if t1 is None:
            t1 = np.zeros((npoints, nbasis, npoints, nbasis), dtype=bool)
            for x0 in range(npoints):
                for v0 in range(nbasis):
                    for x1 in range(npoints):
                        for v1 in range(nbasis):
                            t1[x0, v0, x1, v1] = sys.cc(x0, v0, x1, v1)
        self.levels: list[np.ndarray] = [t1]
        self.stab: int | None = None

        while max_level is None or len(self.levels) < max_level:
            nxt = self._sweep(self.levels[-1])
            grown = nxt & ~self.levels[-1]
            if grown.any():
                x0, v0, x1, v1 = (int(i) for i in np.argwhere(grown)[0])
                raise InvalidBaseRelationError(
                    "invalid base relation: level "
                    f"{len(self.levels) + 1} adds ({sys.points[x0]},{sys.basis[v0]})"
                    f" <= ({sys.points[x1]},{sys.basis[v1]})",
                    witness=(x0, v0, x1, v1))
            if (nxt == self.levels[-1]).all():
                self.stab = len(self.levels)
                break
            self.levels.append(nxt)
        for arr in self.levels:
            arr.setflags(write=False)

    def _sweep(self, prev: np.ndarray) -> np.ndarray:
        npoints, nbasis = self.npoints, self.nbasis
        subf = self._subf
        # exists[x1,x0,W0,V1]: some W1 <= V1 has prev(x1,W1,x0,W0)
        per_w1 = prev.transpose(0, 2, 3, 1).reshape(-1, nbasis).astype(np.float32)
        exists = (per_w1 @ subf).reshape(npoints, npoints, nbasis, nbasis) > 0
        # fail[x1,x0,V1,V0]: some W0 <= V0 with no such W1
        missing = (~exists).transpose(0, 1, 3, 2).reshape(-1, nbasis).astype(np.float32)
        fail = (missing @ subf).reshape(npoints, npoints, nbasis, nbasis) > 0
        return (~fail).transpose(1, 3, 0, 2).copy()

    @property
    def stabilized(self) -> bool:
        return self.stab is not None

    def max_level(self) -> int:
        return len(self.levels)

    def _level_array(self, alpha) -> np.ndarray:
        if alpha == STAB:
            if not self.stabilized:
                raise RankforgeError("table not run to stabilization")
            return self.levels[-1]
        if not isinstance(alpha, int) or alpha < 1:
            raise ValueError("levels start at 1 (or pass STAB)")
        if alpha > len(self.levels):
            if not self.stabilized:
                raise RankforgeError(f"level {alpha} not computed (table truncated)")
            return self.levels[-1]
        return self.levels[alpha - 1]

    def leq(self, x0: int, v0: int, x1: int, v1: int, alpha) -> bool:
        for x in (x0, x1):
            if not 0 <= x < self.npoints:
                raise IndexError(f"unknown point index {x}")
        for v in (v0, v1):
            if not 0 <= v < self.nbasis:
                raise IndexError(f"unknown basis index {v}")
        return bool(self._level_array(alpha)[x0, v0, x1, v1])

    def equiv(self, x: int, y: int, alpha) -> bool:
        t = self._level_array(alpha)
        return bool(np.all(t[y, :, x, :].any(axis=0))
                    and np.all(t[x, :, y, :].any(axis=0)))


def leq_table(sys: ActionSystem, max_level: int | None = None) -> LevelTable:
    """Compute the level tables to stabilization (or a level bound)."""
    return LevelTable(sys, max_level=max_level)


def _table(sys: ActionSystem) -> LevelTable:
    cached = getattr(sys, "_leq_table", None)
    if cached is None:
        cached = LevelTable(sys)
        sys._leq_table = cached
    return cached


def leq(sys: ActionSystem, x0: int, v0: int, x1: int, v1: int, alpha) -> bool:
    """Table lookup; levels past stabilization return the stabilized value."""
    return _table(sys).leq(x0, v0, x1, v1, alpha)


def equiv_alpha(sys: ActionSystem, x: int, y: int, alpha) -> bool:
    """Two-sided coverage: each basis set of one point is matched by some
    basis set of the other, at the given level."""
    return _table(sys).equiv(x, y, alpha)


def _fine_matrix(sys: ActionSystem, nbasis: int) -> np.ndarray:
    fine = np.zeros((nbasis, nbasis), dtype=bool)
    for w in range(nbasis):
        for v in range(nbasis):
            fine[w, v] = sys.fine(w, v)
    return fine


def _rank_condition(table: LevelTable, fine: np.ndarray, x: int, alpha: int) -> bool:
    """Whether relation steps at x go up for free at level alpha:
    T_alpha(x,V0,x,V1) forces T_{alpha+1}(x,W0,x,W1) whenever W0 shrinks V0
    and W1 expands V1 through the closure bar."""
    cur = table._level_array(alpha)[x, :, x, :]
    nxt = table._level_array(alpha + 1)[x, :, x, :]
    finef = fine.astype(np.float32)
    reach = (finef @ cur.astype(np.float32)) > 0          # [W0,V1]: some V0
    reach = (reach.astype(np.float32) @ finef) > 0        # [W0,W1]: some V1
    return not bool((reach & ~nxt).any())


def hjorth_rank(sys: ActionSystem, x: int) -> Rank:
    """Least level >= 1 satisfying the step-up condition at x."""
    table = _table(sys)
    if not table.stabilized:
        raise RankforgeError("rank needs a table run to stabilization")
    fine = _fine_cached(sys)
    for alpha in range(1, table.stab + 1):
        if _rank_condition(table, fine, x, alpha):
            return Rank(alpha, table.stab)
    raise RankforgeError(f"no rank level found for point {sys.points[x]} "
                         "(base relation violates set monotonicity)")


def rank_condition_profile(sys: ActionSystem, x: int) -> set[int]:
    """All levels <= stab at which the rank condition holds at x."""
    table = _table(sys)
    if not table.stabilized:
        raise RankforgeError("profile needs a table run to stabilization")
    fine = _fine_cached(sys)
    return {alpha for alpha in range(1, table.stab + 1)
            if _rank_condition(table, fine, x, alpha)}


def _fine_cached(sys: ActionSystem) -> np.ndarray:
    cached = getattr(sys, "_fine_matrix", None)
    if cached is None:
        cached = _fine_matrix(sys, len(sys.basis))
        sys._fine_matrix = cached
    return cached


def orbit_of(sys: ActionSystem, x: int) -> frozenset[int]:
    """Closure of x under the exposed action."""
    if not sys.has_action:
        raise UnsupportedOperationError("orbit needs an exposed action")
    seen = {x}
    stack = [x]
    while stack:
        y = stack.pop()
        for g in range(len(sys.group)):
            z = sys.act(g, y)
            if z not in seen:
                seen.add(z)
                stack.append(z)
    return frozenset(seen)


def orbit_check_via_rank(sys: ActionSystem, x: int, y: int,
                         cross_check: bool = False) -> bool:
    """Orbit equivalence decided through the rank: equivalence one level past
    the larger of the two ranks."""
    delta = max(hjorth_rank(sys, x).value, hjorth_rank(sys, y).value)
    verdict = equiv_alpha(sys, x, y, delta + 1)
    if cross_check and sys.has_action:
        truth = y in orbit_of(sys, x)
        if truth != verdict:
            raise RankforgeError(
                f"rank-based orbit check disagrees with the orbit oracle on "
                f"({sys.points[x]},{sys.points[y]}): engine={verdict} orbit={truth}")
    return verdict


def minimal_m(sys: ActionSystem, x: int) -> int:
    """Least m >= 0 with the level-(rank+m) class of x equal to its orbit."""
    table = _table(sys)
    delta = hjorth_rank(sys, x).value
    orbit = orbit_of(sys, x)
    for m in range(table.stab - delta + 2):
        cls = frozenset(y for y in range(len(sys.points))
                        if equiv_alpha(sys, x, y, delta + m))
        if cls == orbit:
            return m
    raise RankforgeError(f"no finite m for point {sys.points[x]}: stabilized "
                         "equivalence never reaches the orbit")


def _members(sys: ActionSystem, u: int) -> frozenset[int]:
    if not sys.has_action:
        raise UnsupportedOperationError("Vaught transforms need an exposed action")
    return sys.basis_members(u)


def vaught_star(sys: ActionSystem, points: Iterable[int], u: int) -> frozenset[int]:
    """Category-forall transform; comeager-in-U collapses to all of U at
    finite-discrete scale."""
    a = frozenset(points)
    members = _members(sys, u)
    return frozenset(x for x in range(len(sys.points))
                     if all(sys.act(g, x) in a for g in members))


def vaught_delta(sys: ActionSystem, points: Iterable[int], u: int) -> frozenset[int]:
    """Category-exists transform; non-meager-in-U collapses to some of U."""
    a = frozenset(points)
    members = _members(sys, u)
    return frozenset(x for x in range(len(sys.points))
                     if any(sys.act(g, x) in a for g in members))


def star_orbit_equivalence_check(sys: ActionSystem, y: int, w: int,
                                 x: int, v: int) -> tuple[bool, bool]:
    """Membership of y in the star transform of the V-translate set of x,
    next to the stabilized table value; the two agree on shipped systems."""
    target = frozenset(sys.act(g, x) for g in _members(sys, v))
    direct = all(sys.act(g, y) in target for g in _members(sys, w))
    return direct, leq(sys, y, w, x, v, STAB)


@dataclass(frozen=True)
class FixedPointSets:
    """Direct fixed-point set and its table characterization."""

    direct: frozenset[int]
    via_table: frozenset[int]
    applicable: bool

    @property
    def agree(self) -> bool:
        return self.direct == self.via_table


def fixed_point_set(sys: ActionSystem, u: int) -> FixedPointSets:
    """Points fixed by some element of U, two ways: by direct enumeration and
    as the points carrying a stabilized pair (V, W) with W^-1 V inside U.

    The characterization needs arbitrarily small neighborhoods; with every
    singleton in the basis it always applies, otherwise the result is marked
    not applicable (the direct set is still exact).
    """
    if not sys.has_action:
        raise UnsupportedOperationError("fixed points need an exposed action")
    members = _members(sys, u)
    npoints = len(sys.points)
    direct = frozenset(x for x in range(npoints)
                       if any(sys.act(g, x) == x for g in members))

    ngroup = len(sys.group)
    _, inv, comp = _group_tables(sys)
    nbasis = len(sys.basis)
    basis_sets = [sys.basis_members(v) for v in range(nbasis)]
    singles = {frozenset([g]) for g in range(ngroup)}
    applicable = singles <= set(basis_sets)

    member_of = np.zeros((nbasis, ngroup), dtype=bool)
    for v, vset in enumerate(basis_sets):
        for g in vset:
            member_of[v, g] = True
    # bad[V,W]: some w in W, v in V with w^-1 v outside U
    bad = np.zeros((nbasis, nbasis), dtype=bool)
    for g in range(ngroup):
        for h in range(ngroup):
            if comp[inv[g]][h] not in members:
                bad |= np.outer(member_of[:, h], member_of[:, g])
    good = ~bad
    t = _table(sys)._level_array(STAB)
    via = frozenset(x for x in range(npoints)
                    if bool((t[x, :, x, :] & good).any()))
    return FixedPointSets(direct, via, applicable)


def _group_tables(sys: ActionSystem):
    """Composition and inverse from the faithful permutation representation."""
    perms = getattr(sys, "perms", None)
    if perms is None:
        raise UnsupportedOperationError("system lacks a permutation representation")
    index = {p: i for i, p in enumerate(perms)}
    ngroup = len(perms)
    comp = [[0] * ngroup for _ in range(ngroup)]
    inv = [0] * ngroup
    for a, pa in enumerate(perms):
        for b, pb in enumerate(perms):
            composed = tuple(pa[pb[i]] for i in range(len(pa)))
            comp[a][b] = index[composed]
        inverse = tuple(sorted(range(len(pa)), key=lambda i: pa[i]))
        inv[a] = index[inverse]
    return perms, inv, comp


def partition_by_rank(sys: ActionSystem) -> list[tuple[int, frozenset[int]]]:
    """Points grouped by rank value, ascending."""
    groups: dict[int, set[int]] = {}
    for x in range(len(sys.points)):
        groups.setdefault(hjorth_rank(sys, x).value, set()).add(x)
    return [(value, frozenset(groups[value])) for value in sorted(groups)]


def compare_ranks(sys: ActionSystem, x: int, y: int) -> str:
    """Order comparison of two rank values: '<', '=' or '>'."""
    dx, dy = hjorth_rank(sys, x).value, hjorth_rank(sys, y).value
    return "<" if dx < dy else (">" if dx > dy else "=")


def basis_shift_check(sys: ActionSystem, alt: ActionSystem) -> dict[int, int]:
    """Per-point absolute rank difference across two bases over the same
    points and cc semantics."""
    if list(alt.points) != list(sys.points):
        raise ValueError("alternate basis must present the same points")
    return {x: abs(hjorth_rank(sys, x).value - hjorth_rank(alt, x).value)
            for x in range(len(sys.points))}


# ---------------------------------------------------------------------------
# Record output (stable machine format, one record per line)


def leq_record(level: int, x0: str, v0: str, x1: str, v1: str, val: bool) -> str:
    return f"LEQ level={level} x0={x0} V0={v0} x1={x1} V1={v1} val={int(val)}"


def rank_record(point: str, delta: int, stab: int, m: int | str | None = None) -> str:
    base = f"RANK point={point} delta={delta} stab={stab}"
    return base if m is None else f"{base} m={m}"


def check_record(name: str, passed: bool, witness: str | None = None) -> str:
    verdict = "pass" if passed else "fail"
    return f"CHECK name={name} verdict={verdict} witness={witness or '-'}"
