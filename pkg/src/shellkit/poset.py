"""Finite bounded posets given by their cover relations.

Covers are the source of truth. The order relation is derived once at
construction and stored as bitmasks, one per element, indexed by the
element's position in the input order (the ElementOrder used for every
tie-break in the package).
"""

from __future__ import annotations

import os
import threading
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceeded, ChainNotInPoset, Cycle, NotBounded, NotComparable, NotReduced, PosetError

DEFAULT_ROOT_BUDGET = 10**6

RootPath = tuple  # tuple[str, ...] from bottom to its endpoint
Chain = tuple


def root_budget() -> int:
    """Cap on the number of roots any single enumeration may produce."""
    raw = os.environ.get("SHELLKIT_BUDGET")
    if not raw:
        return DEFAULT_ROOT_BUDGET
    try:
        value = int(float(raw))
    except ValueError:
        raise PosetError(f"SHELLKIT_BUDGET must be an integer, got {raw!r}") from None
    if value <= 0:
        raise PosetError("SHELLKIT_BUDGET must be positive")
    return value


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Poset:
    """Immutable finite bounded poset.

    ``elements`` fixes the ElementOrder; ``covers`` is any iterable of
    (lower, upper) pairs. Raises Cycle, NotReduced or NotBounded when the
    cover data does not describe a bounded poset exactly.
    """

    def __init__(self, elements: Iterable[str], covers: Iterable[tuple[str, str]]):
        elements = tuple(elements)
        if not elements:
            raise NotBounded("a poset needs at least one element")
        index = {}
        for e in elements:
            if not isinstance(e, str) or not e or any(ch.isspace() for ch in e):
                raise PosetError(f"element ids must be non-empty whitespace-free strings, got {e!r}")
            if e in index:
                raise PosetError(f"duplicate element {e!r}")
            index[e] = len(index)
        self._elements = elements
        self._index = index
        n = len(elements)

        cover_set = set()
        up_idx: list[list[int]] = [[] for _ in range(n)]
        down_idx: list[list[int]] = [[] for _ in range(n)]
        for lo, hi in covers:
            if lo not in index or hi not in index:
                raise PosetError(f"cover ({lo}, {hi}) names an unknown element")
            if lo == hi:
                raise Cycle(f"self-loop at {lo}")
            if (lo, hi) in cover_set:
                raise PosetError(f"cover ({lo}, {hi}) listed twice")
            cover_set.add((lo, hi))
            up_idx[index[lo]].append(index[hi])
            down_idx[index[hi]].append(index[lo])
        for lst in up_idx:
            lst.sort()
        for lst in down_idx:
            lst.sort()

        # Kahn's algorithm; leftover vertices sit on a cycle.
        indeg = [len(d) for d in down_idx]
        ready = [i for i in range(n) if indeg[i] == 0]
        topo = []
        while ready:
            i = ready.pop()
            topo.append(i)
            for j in up_idx[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    ready.append(j)
        if len(topo) != n:
            stuck = [elements[i] for i in range(n) if indeg[i] > 0]
            raise Cycle(f"covers contain a cycle through {stuck[:5]}")

        below = [0] * n  # below[i]: bits of all z <= i
        for i in topo:
            m = 1 << i
            for d in down_idx[i]:
                m |= below[d]
            below[i] = m
        above = [0] * n
        for i in reversed(topo):
            m = 1 << i
            for u in up_idx[i]:
                m |= above[u]
            above[i] = m

        for i in range(n):
            for j in up_idx[i]:
                for k in up_idx[i]:
                    if k != j and (above[k] >> j) & 1:
                        raise NotReduced(
                            f"({elements[i]}, {elements[j]}) is not a cover: "
                            f"{elements[i]} < {elements[k]} < {elements[j]}"
                        )

        minimal = [i for i in range(n) if not down_idx[i]]
        maximal = [i for i in range(n) if not up_idx[i]]
        if len(minimal) != 1 or len(maximal) != 1:
            raise NotBounded(
                f"need exactly one minimal and one maximal element, found minimal "
                f"{[elements[i] for i in minimal]} and maximal {[elements[i] for i in maximal]}"
            )

        self._covers = frozenset(cover_set)
        self._up = {elements[i]: tuple(elements[j] for j in up_idx[i]) for i in range(n)}
        self._down = {elements[i]: tuple(elements[j] for j in down_idx[i]) for i in range(n)}
        self._below = below
        self._above = above
        self._bottom = elements[minimal[0]]
        self._top = elements[maximal[0]]
        self._lock = threading.Lock()
        self._chain_cache: dict = {}
        self._root_cache: dict = {}
        self._mobius_cache: dict = {}
        self._depth = None
        self._height = None

    # -- basic accessors -------------------------------------------------

    @property
    def elements(self) -> tuple[str, ...]:
        return self._elements

    @property
    def covers(self) -> frozenset:
        return self._covers

    @property
    def bottom(self) -> str:
        return self._bottom

    @property
    def top(self) -> str:
        return self._top

    def rank(self, x: str) -> int:
        """Position of ``x`` in the ElementOrder."""
        return self._index[x]

    def up(self, x: str) -> tuple[str, ...]:
        """Up-covers of ``x`` in ElementOrder."""
        return self._up[x]

    def down(self, x: str) -> tuple[str, ...]:
        return self._down[x]

    def leq(self, x: str, y: str) -> bool:
        return bool((self._above[self._index[x]] >> self._index[y]) & 1)

    def lt(self, x: str, y: str) -> bool:
        return x != y and self.leq(x, y)

    def is_cover(self, x: str, y: str) -> bool:
        return (x, y) in self._covers

    def below_mask(self, x: str) -> int:
        """Bitmask of all z <= x, bit positions given by ElementOrder."""
        return self._below[self._index[x]]

    def above_mask(self, x: str) -> int:
        return self._above[self._index[x]]

    def mask(self, xs: Iterable[str]) -> int:
        m = 0
        for x in xs:
            m |= 1 << self._index[x]
        return m

    def from_mask(self, mask: int) -> list[str]:
        return [self._elements[i] for i in _bits(mask)]

    def atoms(self, u: str, v: str | None = None) -> tuple[str, ...]:
        """Up-covers of ``u`` lying below ``v`` (all up-covers when v is None)."""
        if v is None:
            return self._up[u]
        vm = self._below[self._index[v]]
        return tuple(a for a in self._up[u] if (vm >> self._index[a]) & 1)

    def __contains__(self, x) -> bool:
        return x in self._index

    def __len__(self) -> int:
        return len(self._elements)

    def __iter__(self):
        return iter(self._elements)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poset):
            return NotImplemented
        return self._elements == other._elements and self._covers == other._covers

    def __hash__(self) -> int:
        return hash((self._elements, self._covers))

    def __repr__(self) -> str:
        return f"Poset({len(self)} elements, {len(self._covers)} covers, bottom={self._bottom}, top={self._top})"

    def cover_pairs(self) -> list[tuple[str, str]]:
        """Covers sorted by (rank of lower, rank of upper)."""
        return sorted(self._covers, key=lambda c: (self._index[c[0]], self._index[c[1]]))

    def chain_key(self, chain: Sequence[str]) -> tuple[int, ...]:
        return tuple(self._index[x] for x in chain)

    def _require_leq(self, u: str, v: str) -> None:
        if u not in self._index or v not in self._index:
            raise ChainNotInPoset(f"unknown element in ({u}, {v})")
        if not self.leq(u, v):
            raise NotComparable(f"{u} is not below {v}")

    # -- derived structure ----------------------------------------------

    def depth(self, x: str) -> int:
        """Length of the longest chain from the bottom to ``x``."""
        if self._depth is None:
            d = {}
            for e in self._topological():
                d[e] = max((d[z] + 1 for z in self._down[e]), default=0)
            self._depth = d
        return self._depth[x]

    def height(self, x: str) -> int:
        """Length of the longest chain from ``x`` to the top."""
        if self._height is None:
            h = {}
            for e in reversed(self._topological()):
                h[e] = max((h[z] + 1 for z in self._up[e]), default=0)
            self._height = h
        return self._height[x]

    @property
    def length(self) -> int:
        return self.height(self._bottom)

    def _topological(self) -> list[str]:
        # popcount of the down-set strictly increases along covers
        return sorted(self._elements, key=lambda e: (bin(self._below[self._index[e]]).count("1"), self._index[e]))

    def linear_extension(self) -> tuple[str, ...]:
        """Elements sorted by (longest chain from bottom, ElementOrder)."""
        return tuple(sorted(self._elements, key=lambda e: (self.depth(e), self._index[e])))

    def interval(self, u: str, v: str) -> "Poset":
        self._require_leq(u, v)
        keep = self._above[self._index[u]] & self._below[self._index[v]]
        elems = [self._elements[i] for i in _bits(keep)]
        inside = set(elems)
        covers = [(x, y) for x in elems for y in self._up[x] if y in inside]
        return Poset(elems, covers)

    def dual(self) -> "Poset":
        return Poset(self._elements, [(hi, lo) for lo, hi in self.cover_pairs()])

    def saturated_chains(self, u: str, v: str) -> tuple[tuple[str, ...], ...]:
        """Maximal chains of [u, v], lexicographic in ElementOrder."""
        self._require_leq(u, v)
        key = (u, v)
        hit = self._chain_cache.get(key)
        if hit is not None:
            return hit
        vm = self._below[self._index[v]]
        idx = self._index
        out: list[tuple[str, ...]] = []
        budget = root_budget()

        def walk(path: list[str]) -> None:
            x = path[-1]
            if x == v:
                out.append(tuple(path))
                if len(out) > budget:
                    raise BudgetExceeded(f"more than {budget} saturated chains in [{u}, {v}]")
                return
            for y in self._up[x]:
                if (vm >> idx[y]) & 1:
                    path.append(y)
                    walk(path)
                    path.pop()

        walk([u])
        result = tuple(out)
        self._chain_cache[key] = result
        return result

    def maximal_chains(self) -> tuple[tuple[str, ...], ...]:
        return self.saturated_chains(self._bottom, self._top)

    def roots(self, u: str) -> tuple[tuple[str, ...], ...]:
        """All saturated chains from the bottom to ``u``.

        Built downward from ``u`` (memoized per element), independently of
        the upward walk in saturated_chains.
        """
        if u not in self._index:
            raise ChainNotInPoset(f"unknown element {u!r}")
        hit = self._root_cache.get(u)
        if hit is not None:
            return hit
        if u == self._bottom:
            result = ((u,),)
        else:
            budget = root_budget()
            acc = []
            for d in self._down[u]:
                for r in self.roots(d):
                    acc.append(r + (u,))
                if len(acc) > budget:
                    raise BudgetExceeded(f"more than {budget} roots end at {u}; raise SHELLKIT_BUDGET")
            acc.sort(key=self.chain_key)
            result = tuple(acc)
        with self._lock:
            self._root_cache[u] = result
        return result

    def all_roots(self, include_top: bool = False) -> Iterator[tuple[str, ...]]:
        """Every root of every element, elements in linear-extension order."""
        budget = root_budget()
        seen = 0
        for u in self.linear_extension():
            if u == self._top and not include_top:
                continue
            rs = self.roots(u)
            seen += len(rs)
            if seen > budget:
                raise BudgetExceeded(f"more than {budget} rooted intervals; raise SHELLKIT_BUDGET")
            yield from rs

    def mobius(self, u: str, v: str) -> int:
        """Möbius function by the defining recursion, one row per ``u``."""
        self._require_leq(u, v)
        row = self._mobius_cache.get(u)
        if row is None:
            row = {}
            up_of_u = self._above[self._index[u]]
            for z in self.linear_extension():
                zi = self._index[z]
                if not (up_of_u >> zi) & 1:
                    continue
                if z == u:
                    row[z] = 1
                    continue
                strictly_between = up_of_u & self._below[zi] & ~(1 << zi)
                row[z] = -sum(row[self._elements[w]] for w in _bits(strictly_between))
            self._mobius_cache[u] = row
        return row[v]

    def is_chain_in(self, chain: Sequence[str]) -> bool:
        return all(self.is_cover(a, b) for a, b in zip(chain, chain[1:])) and all(x in self._index for x in chain)


def build_poset(cover_pairs: Sequence[tuple[str, str]]) -> Poset:
    """Build a poset from cover pairs; ElementOrder is first appearance."""
    cover_pairs = list(cover_pairs)
    if not cover_pairs:
        raise PosetError("cover list is empty")
    order: dict[str, None] = {}
    for lo, hi in cover_pairs:
        order.setdefault(lo, None)
        order.setdefault(hi, None)
    return Poset(order, cover_pairs)


def chain_poset(length: int, prefix: str = "c") -> Poset:
    """Chain with ``length`` covers: c0 < c1 < ... ."""
    if length == 0:
        return Poset([f"{prefix}0"], [])
    return build_poset([(f"{prefix}{i}", f"{prefix}{i + 1}") for i in range(length)])


def transitive_reduction(p: Poset) -> frozenset:
    """Covers recomputed from the order relation alone."""
    out = set()
    for x in p.elements:
        for y in p.elements:
            if p.lt(x, y):
                between = p.above_mask(x) & p.below_mask(y) & ~p.mask([x, y])
                if not between:
                    out.add((x, y))
    return frozenset(out)
