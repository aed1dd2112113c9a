"""Back-and-forth tuple equivalence and rank on finite structures.

The level-alpha relations are computed by synchronous partition refinement
over the injective tuples of every structure in a family.  Tuples with
repeated entries reduce to their deduplicated core plus a repetition
pattern: equality is atomic, so the pattern is part of the level-0 type and
extensions by repeated elements are matched exactly when the cores are
equivalent.  Refinement therefore runs on injective carriers only, and class
lookups for arbitrary tuples go through the reduction.

Levels are naturals starting at 0; on finite inputs the decreasing chain of
partitions is finite, so the stabilized partition stands in for every limit
level and is addressed by the STAB sentinel.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .common import STAB
from .structures import FinStructure, RangeError, _qf_key


@dataclass(frozen=True)
class ScottRank:
    """Least level at which within-structure equivalence stops refining."""

    value: int
    stabilized_at: int

    def __post_init__(self):
        if self.value > self.stabilized_at:
            raise ValueError("rank exceeds stabilization index")


def _reduce(tup: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split a tuple into (pattern, injective core by first occurrence).

    pattern[i] is the index of tup[i] inside the core.
    """
    core: list[int] = []
    pattern: list[int] = []
    seen: dict[int, int] = {}
    for e in tup:
        if e not in seen:
            seen[e] = len(core)
            core.append(e)
        pattern.append(seen[e])
    return tuple(pattern), tuple(core)


class ScottTable:
    """Stratified partitions of (structure, tuple) pairs for one family."""

    def __init__(self, family: Sequence[FinStructure]):
        family = tuple(family)
        if not family:
            raise ValueError("empty family")
        if not all(isinstance(m, FinStructure) for m in family):
            raise ValueError("back-and-forth tables need finite structures")
        signature = family[0].signature
        if any(m.signature != signature for m in family):
            raise ValueError("family mixes signatures")
        self.family = family
        self._items: list[tuple[int, tuple[int, ...]]] = []
        for i, struct in enumerate(family):
            self._items.extend((i, t) for t in _injective_tuples(struct.size))

        # Level-0 colors are quantifier-free type keys, hash-consed to ints.
        colors: dict[tuple[int, tuple[int, ...]], int] = {}
        table: dict[tuple, int] = {}
        for i, t in self._items:
            key = _qf_key(family[i], t)
            colors[(i, t)] = table.setdefault(key, len(table))
        self._levels = [colors]

        while True:
            prev = self._levels[-1]
            nxt: dict[tuple[int, tuple[int, ...]], int] = {}
            table = {}
            for i, t in self._items:
                used = set(t)
                sig = frozenset(prev[(i, t + (e,))]
                                for e in range(family[i].size) if e not in used)
                key = (prev[(i, t)], sig)
                nxt[(i, t)] = table.setdefault(key, len(table))
            if len(table) == len(set(prev.values())):
                break  # refinement added nothing: previous level is stable
            self._levels.append(nxt)

        self.stab = len(self._levels) - 1

    @property
    def levels(self) -> int:
        """Number of stored levels (0 .. stab)."""
        return len(self._levels)

    def class_of(self, i: int, tup: Sequence[int], alpha) -> tuple:
        """Class token of a tuple at a level; tokens compare across the family."""
        tup = tuple(tup)
        size = self.family[i].size
        for e in tup:
            if not 0 <= e < size:
                raise RangeError(f"element {e} outside universe of size {size}")
        if alpha == STAB:
            alpha = self.stab
        elif alpha < 0:
            raise ValueError("levels start at 0")
        pattern, core = _reduce(tup)
        return (pattern, self._levels[min(alpha, self.stab)][(i, core)])

    def equivalent(self, i: int, t: Sequence[int], j: int, u: Sequence[int],
                   alpha) -> bool:
        t, u = tuple(t), tuple(u)
        if len(t) != len(u):
            raise ValueError(f"tuple length mismatch: {len(t)} vs {len(u)}")
        return self.class_of(i, t, alpha) == self.class_of(j, u, alpha)

    def blocks(self, alpha) -> list[list[tuple[int, tuple[int, ...]]]]:
        """Partition of the injective carrier at a level, canonically ordered."""
        if alpha == STAB:
            alpha = self.stab
        colors = self._levels[min(alpha, self.stab)]
        out: dict[int, list] = {}
        for item in self._items:
            out.setdefault(colors[item], []).append(item)
        return [out[c] for c in sorted(out)]


def _injective_tuples(size: int) -> list[tuple[int, ...]]:
    tuples = [()]
    frontier = [()]
    while frontier:
        nxt = []
        for t in frontier:
            used = set(t)
            for e in range(size):
                if e not in used:
                    nxt.append(t + (e,))
        tuples.extend(nxt)
        frontier = nxt
    return tuples


@lru_cache(maxsize=64)
def _cached_table(family: tuple[FinStructure, ...]) -> ScottTable:
    return ScottTable(family)


def scott_table(family: Sequence[FinStructure]) -> ScottTable:
    """Level-synchronous refinement of a family until stabilization."""
    return _cached_table(tuple(family))


def _pair_table(m_struct, n_struct) -> tuple[ScottTable, int, int]:
    if m_struct == n_struct:
        return _cached_table((m_struct,)), 0, 0
    return _cached_table((m_struct, n_struct)), 0, 1


def scott_equiv(m_struct: FinStructure, abar: Sequence[int],
                n_struct: FinStructure, bbar: Sequence[int], alpha) -> bool:
    """Level-alpha back-and-forth equivalence of two tuples."""
    table, i, j = _pair_table(m_struct, n_struct)
    return table.equivalent(i, tuple(abar), j, tuple(bbar), alpha)


def scott_rank(struct: FinStructure) -> ScottRank:
    """Least level where within-structure equivalence implies the next level.

    For a single structure the refinement is a function of the current
    partition, so this is exactly the table's stabilization index.
    """
    table = _cached_table((struct,))
    return ScottRank(table.stab, table.stab)


def scott_iso_check(m_struct: FinStructure, n_struct: FinStructure) -> bool:
    """Stabilized equivalence of the empty tuples.

    On finite structures this coincides with brute-force isomorphism.
    """
    table, i, j = _pair_table(m_struct, n_struct)
    return table.equivalent(i, (), j, (), STAB)


def distinguishing_level(m_struct: FinStructure, n_struct: FinStructure) -> int | None:
    """Least level separating the empty tuples, or None if none does."""
    table, i, j = _pair_table(m_struct, n_struct)
    for alpha in range(table.stab + 1):
        if not table.equivalent(i, (), j, (), alpha):
            return alpha
    return None
