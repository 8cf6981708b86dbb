"""Chain-atom orderings, recursive atom ordering checks, and conversions.

A ChainAtomOrdering assigns to every root r (ending at u, u not the top) an
ordering of the up-covers of u. Roots that were never given an explicit
order fall back to ElementOrder.

Vocabulary used below: for a root r ending at u, "the atoms at r" are the
up-covers of u in order(r). For a child root r + (a,), the "earlier mask"
is the bitmask of atoms strictly before a in order(r); F at the child is
the set of its atoms lying above something in that mask.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    BottomHasNoParent,
    NotGRAO,
    NotFound,
    NotRAO,
    NotSelfConsistentTopologicalCL,
    OrderingError,
    PreconditionViolated,
    TimeBudgetExceeded,
)
from .labelings import (
    DEFAULT_MAX_WITNESSES,
    ChainEdgeLabeling,
    CheckReport,
    LabelAlphabet,
    Witness,
    _collect,
    check_self_consistency,
    check_topological_CL,
    lex_chain_order,
)
from .poset import Poset


class ChainAtomOrdering:
    """Atom order for every rooted interval [u, top]_r."""

    def __init__(self, poset: Poset, orders: Mapping[Sequence[str], Sequence[str]] | None = None):
        self.poset = poset
        self._orders: dict[tuple, tuple] = {}
        for r, seq in (orders or {}).items():
            r, seq = tuple(r), tuple(seq)
            if not r or r[0] != poset.bottom or not poset.is_chain_in(r):
                raise OrderingError(f"{' '.join(r)} is not a root of the poset")
            ups = poset.up(r[-1])
            if sorted(seq, key=poset.rank) != list(ups):
                raise OrderingError(f"order at root {' '.join(r)} must permute the up-covers {' '.join(ups)}, got {' '.join(seq)}")
            self._orders[r] = seq

    def order(self, r: Sequence[str]) -> tuple[str, ...]:
        r = tuple(r)
        hit = self._orders.get(r)
        return hit if hit is not None else self.poset.up(r[-1])

    def position(self, r: Sequence[str], a: str) -> int:
        """1-based position of atom ``a`` in order(r)."""
        return self.order(r).index(a) + 1

    def explicit(self) -> dict[tuple, tuple]:
        """Roots whose order differs from ElementOrder."""
        return {r: o for r, o in self._orders.items() if o != self.poset.up(r[-1])}

    def table(self) -> dict[tuple, tuple]:
        return {r: self.order(r) for r in self.poset.all_roots() if self.poset.up(r[-1])}

    def differences(self, other: "ChainAtomOrdering") -> list[tuple]:
        """Roots where the two orderings disagree (same poset assumed)."""
        return [r for r in self.poset.all_roots() if self.order(r) != other.order(r)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChainAtomOrdering):
            return NotImplemented
        return self.poset == other.poset and not self.differences(other)

    def __hash__(self):
        return id(self)

    def __repr__(self) -> str:
        return f"ChainAtomOrdering({self.poset!r}, {len(self.explicit())} non-default roots)"


@dataclass(frozen=True)
class FGPartition:
    F: tuple[str, ...]
    G: tuple[str, ...]


def _earlier_mask(C: ChainAtomOrdering, parent: tuple, u: str) -> int:
    porder = C.order(parent)
    return C.poset.mask(porder[: porder.index(u)])


def fg_sets(C: ChainAtomOrdering, r: Sequence[str], v: str | None = None) -> FGPartition:
    """Split the atoms of [u,v]_r by whether they lie above an atom of the
    parent interval that precedes u."""
    P = C.poset
    r = tuple(r)
    u = r[-1]
    if len(r) < 2:
        raise BottomHasNoParent("the bottom has no parent interval")
    v = P.top if v is None else v
    P._require_leq(u, v)
    parent = r[:-1]
    porder = C.order(parent)
    earlier = P.mask(x for x in porder[: porder.index(u)] if P.leq(x, v))
    atoms = [a for a in C.order(r) if P.leq(a, v)]
    F = tuple(a for a in atoms if P.below_mask(a) & earlier)
    G = tuple(a for a in atoms if not P.below_mask(a) & earlier)
    return FGPartition(F, G)


# ---------------------------------------------------------------------------
# condition checks


def _distance_two(P: Poset, a: str) -> list[str]:
    seen = {}
    for x in P.up(a):
        for w in P.up(x):
            seen.setdefault(w, None)
    return sorted(seen, key=P.rank)


def _grao_ib_at(C: ChainAtomOrdering, r: tuple, extended: bool = False) -> list[Witness]:
    """(i)(b) for every atom a_j at r, against the child root r + (a_j,)."""
    P = C.poset
    order = C.order(r)
    out = []
    for j, a in enumerate(order):
        earlier = P.mask(order[:j])
        if not earlier:
            continue
        child = r + (a,)
        child_order = C.order(child)
        if extended:
            targets = [w for w in P.from_mask(P.above_mask(a)) if w != a]
        else:
            targets = _distance_two(P, a)
        for w in targets:
            inside = [b for b in child_order if P.leq(b, w)]
            above = [bool(P.below_mask(b) & earlier) for b in inside]
            if any(above) and not above[0]:
                other = inside[above.index(True)]
                out.append(Witness("grao-i-b", r, a, w, [child + (inside[0],), child + (other,)], [],
                                   f"first atom {inside[0]} of [{a},{w}] is not above an atom before {a}, "
                                   f"but {other} is"))
                break
    return out


def _earliest_atom(P: Poset, order: tuple, z: str) -> str | None:
    for a in order:
        if P.leq(a, z):
            return a
    return None


def cond_ii_literal(P: Poset, order: tuple, j: int) -> list[tuple[str, str]]:
    """Failing (a_i, y) pairs for condition (ii) at atom index ``j``."""
    a_j = order[j]
    fails = []
    for i in range(j):
        a_i = order[i]
        for y in P.from_mask(P.above_mask(a_i) & P.above_mask(a_j)):
            ok = any(
                P.leq(z, y) and any(P.lt(order[k], z) and P.leq(z, y) for k in range(j))
                for z in P.up(a_j)
            )
            if not ok:
                fails.append((a_i, y))
    return fails


def cond_ii_rephrased(P: Poset, order: tuple, j: int) -> list[tuple[str, str]]:
    """Same condition phrased as: some z with a_j < z <= y (a cover) has an
    earliest atom other than a_j."""
    a_j = order[j]
    earlier = P.mask(order[:j])
    fails = []
    for y in P.from_mask(P.above_mask(a_j)):
        if not P.below_mask(y) & earlier:
            continue
        if not any(P.leq(z, y) and _earliest_atom(P, order, z) != a_j for z in P.up(a_j)):
            for i in range(j):
                if P.lt(order[i], y):
                    fails.append((order[i], y))
    return fails


def _cond_ii_at(C: ChainAtomOrdering, r: tuple) -> list[Witness]:
    P = C.poset
    order = C.order(r)
    form = cond_ii_rephrased if len(r) == 1 else cond_ii_literal
    out = []
    for j in range(1, len(order)):
        fails = form(P, order, j)
        if fails:
            a_i, y = fails[0]
            out.append(Witness("cond-ii", r, r[-1], y, [], [],
                               f"{a_i} and the later {order[j]} are both below {y}, but no cover z of "
                               f"{order[j]} with z <= {y} lies above an atom before {order[j]}"))
            break
    return out


def _rao_ib_at(C: ChainAtomOrdering, r: tuple) -> list[Witness]:
    P = C.poset
    order = C.order(r)
    out = []
    for j, a in enumerate(order):
        earlier = P.mask(order[:j])
        if not earlier:
            continue
        child = r + (a,)
        child_order = C.order(child)
        first_g = None
        for pos, b in enumerate(child_order, start=1):
            if P.below_mask(b) & earlier:
                if first_g is not None:
                    g, gpos = first_g
                    out.append(Witness("rao-i-b", child, a, P.top, [child + (b,), child + (g,)], [],
                                       f"atom {b} (position {pos}) lies above an atom before {a} but comes "
                                       f"after {g} (position {gpos}), which does not"))
                    break
            elif first_g is None:
                first_g = (b, pos)
    return out


def _non_top_roots(C: ChainAtomOrdering):
    P = C.poset
    return (r for r in P.all_roots() if P.height(r[-1]) > 1)


def check_GRAO(C: ChainAtomOrdering, max_witnesses: int = DEFAULT_MAX_WITNESSES, jobs: int = 1) -> CheckReport:
    """Conditions (i)(b) and (ii) at every rooted interval [u, top]_r."""
    return _collect("GRAO", _non_top_roots(C), lambda r: _grao_ib_at(C, r) + _cond_ii_at(C, r), max_witnesses, jobs)


def check_GRAO_extended(C: ChainAtomOrdering, max_witnesses: int = DEFAULT_MAX_WITNESSES) -> CheckReport:
    """(i)(b) quantified over every w above a_j instead of w two covers up."""
    return _collect("GRAO-i-b-extended", _non_top_roots(C), lambda r: _grao_ib_extended_at(C, r), max_witnesses)


def _grao_ib_extended_at(C, r):
    return _grao_ib_at(C, r, extended=True)


def check_RAO(C: ChainAtomOrdering, max_witnesses: int = DEFAULT_MAX_WITNESSES, jobs: int = 1) -> CheckReport:
    """F before G at every child root, plus condition (ii)."""
    return _collect("RAO", _non_top_roots(C), lambda r: _rao_ib_at(C, r) + _cond_ii_at(C, r), max_witnesses, jobs)


# ---------------------------------------------------------------------------
# reordering and swaps


def reorder(C: ChainAtomOrdering, linear_extension: Sequence[str] | None = None) -> ChainAtomOrdering:
    """Stable-partition each order(r) into F then G, bottom-up."""
    P = C.poset
    ext = tuple(linear_extension) if linear_extension is not None else P.linear_extension()
    pos = {x: i for i, x in enumerate(ext)}
    if sorted(ext, key=P.rank) != sorted(P.elements, key=P.rank) or any(pos[a] >= pos[b] for a, b in P.covers):
        raise OrderingError("not a linear extension of the poset")
    new: dict[tuple, tuple] = {}
    for u in ext:
        if u == P.top:
            continue
        for r in P.roots(u):
            cur = C.order(r)
            if u == P.bottom:
                new[r] = cur
                continue
            porder = new[r[:-1]]
            earlier = P.mask(porder[: porder.index(u)])
            F = [a for a in cur if P.below_mask(a) & earlier]
            G = [a for a in cur if not P.below_mask(a) & earlier]
            new[r] = tuple(F + G)
    return ChainAtomOrdering(P, new)


def swap_atoms(C: ChainAtomOrdering, r: Sequence[str], i: int) -> ChainAtomOrdering:
    """Transpose the atoms at 0-based positions i and i+1 of order(r)."""
    P = C.poset
    r = tuple(r)
    order = list(C.order(r))
    if not 0 <= i < len(order) - 1:
        raise PreconditionViolated(f"index {i} has no successor in order at {' '.join(r)}")
    a, b = order[i], order[i + 1]
    for w in P.from_mask(P.above_mask(a) & P.above_mask(b)):
        first = _earliest_atom(P, tuple(order), w)
        if first in (a, b):
            raise PreconditionViolated(f"{first} is the earliest atom of [{r[-1]},{w}], which contains both {a} and {b}")
    order[i], order[i + 1] = b, a
    orders = C.table()
    orders[r] = tuple(order)
    return ChainAtomOrdering(P, orders)


def legal_swaps(C: ChainAtomOrdering) -> list[tuple[tuple, int]]:
    """All (root, index) pairs accepted by swap_atoms."""
    P = C.poset
    out = []
    for r in P.all_roots():
        order = C.order(r)
        for i in range(len(order) - 1):
            a, b = order[i], order[i + 1]
            both = P.from_mask(P.above_mask(a) & P.above_mask(b))
            if all(_earliest_atom(P, order, w) not in (a, b) for w in both):
                out.append((r, i))
    return out


# ---------------------------------------------------------------------------
# chain orders and conversions


def _position_key(C: ChainAtomOrdering, m: tuple) -> tuple[int, ...]:
    return tuple(C.position(m[: k + 1], m[k + 1]) for k in range(len(m) - 1))


def cao_chain_order(C: ChainAtomOrdering) -> list[tuple[str, ...]]:
    """Maximal chains ordered at their first divergence by order(shared root)."""
    return sorted(C.poset.maximal_chains(), key=lambda m: _position_key(C, m))


def check_compatible(C: ChainAtomOrdering, L: ChainEdgeLabeling) -> bool:
    return cao_chain_order(C) == lex_chain_order(L)


def _index_labeling(C: ChainAtomOrdering) -> ChainEdgeLabeling:
    table = {}
    for r in C.poset.all_roots():
        for i, a in enumerate(C.order(r), start=1):
            table[(r, a)] = i
    return ChainEdgeLabeling(C.poset, table, LabelAlphabet.integers(table.values()))


def grao_to_cc(C: ChainAtomOrdering, check: bool = True) -> ChainEdgeLabeling:
    """Label u < a under root r by the position of a in order(r)."""
    if check:
        rep = check_GRAO(C, max_witnesses=1)
        if not rep:
            raise NotGRAO(rep.witnesses[0].describe())
    return _index_labeling(C)


def rao_to_cc(C: ChainAtomOrdering, check: bool = True) -> ChainEdgeLabeling:
    if check:
        rep = check_RAO(C, max_witnesses=1)
        if not rep:
            raise NotRAO(rep.witnesses[0].describe())
    return _index_labeling(C)


def rao_to_cl(C: ChainAtomOrdering, check: bool = True) -> ChainEdgeLabeling:
    """Integer CL-labeling from an RAO.

    Atoms of the bottom get 1, 2, ... in order. Under a longer root with
    incoming label l and j = |F|, the i-th atom gets i - j + l - 1 when
    i <= j and i - j + l + 1 otherwise, so labels below l mark exactly F.
    """
    P = C.poset
    if check:
        rep = check_RAO(C, max_witnesses=1)
        if not rep:
            raise NotRAO(rep.witnesses[0].describe())
    table: dict = {}
    for u in P.linear_extension():
        if u == P.top:
            continue
        for r in P.roots(u):
            order = C.order(r)
            if u == P.bottom:
                for i, a in enumerate(order, start=1):
                    table[(r, a)] = i
                continue
            ell = table[(r[:-1], u)]
            j = len(fg_sets(C, r).F)
            for i, a in enumerate(order, start=1):
                table[(r, a)] = i - j + ell - 1 if i <= j else i - j + ell + 1
    return ChainEdgeLabeling(P, table, LabelAlphabet.integers(table.values()))


def labeling_to_grao(L: ChainEdgeLabeling, check: bool = True) -> ChainAtomOrdering:
    """Order the atoms at each root by the lex-first chain through each."""
    P = L.poset
    if check:
        for rep in (check_topological_CL(L, max_witnesses=1), check_self_consistency(L, max_witnesses=1)):
            if not rep:
                raise NotSelfConsistentTopologicalCL(f"{rep.check}: {rep.witnesses[0].describe()}")
    orders = {}
    for r in P.all_roots():
        if r[-1] == P.top:
            continue
        seen: dict[str, None] = {}
        for _, c in L.scan(r)[P.top]:
            seen.setdefault(c[1], None)
        orders[r] = tuple(seen)
    return ChainAtomOrdering(P, orders)


def restrict_cao(C: ChainAtomOrdering, r: Sequence[str], v: str) -> ChainAtomOrdering:
    """The ordering induced on [end(r), v] by the roots extending r."""
    P = C.poset
    r = tuple(r)
    Q = P.interval(r[-1], v)
    orders = {}
    for q in Q.all_roots():
        if q[-1] == v:
            continue
        orders[q] = tuple(a for a in C.order(r + q[1:]) if P.leq(a, v))
    return ChainAtomOrdering(Q, orders)


def random_ordering(P: Poset, rng: random.Random) -> ChainAtomOrdering:
    orders = {}
    for r in P.all_roots():
        seq = list(P.up(r[-1]))
        rng.shuffle(seq)
        orders[r] = tuple(seq)
    return ChainAtomOrdering(P, orders)


# ---------------------------------------------------------------------------
# search


class _Search:
    """Backtracking over per-root atom orders.

    Constraints only couple a root with its parent (through the earlier
    mask) so each root is solved as an independent subproblem, memoized on
    (root, earlier mask).
    """

    def __init__(self, P: Poset, kind: str, time_budget: float | None, rng: random.Random | None):
        self.P = P
        self.kind = kind
        self.deadline = None if time_budget is None else time.monotonic() + time_budget
        self.rng = rng
        self.memo: dict = {}
        self.nodes = 0

    def tick(self) -> None:
        self.nodes += 1
        if self.deadline is not None and self.nodes % 256 == 0 and time.monotonic() > self.deadline:
            raise TimeBudgetExceeded(f"search stopped after {self.nodes} nodes")

    def solve(self, r: tuple, earlier: int):
        key = (r, earlier)
        if key in self.memo:
            return self.memo[key]
        P = self.P
        u = r[-1]
        atoms = list(P.up(u))
        if not atoms:
            self.memo[key] = {}
            return {}
        is_f = {a: bool(P.below_mask(a) & earlier) for a in atoms}
        # elements two covers above u that lie above each atom: the w of the GRAO first-atom rule
        w2 = _distance_two(P, u)
        two_up = {a: [w for w in w2 if P.leq(a, w)] for a in atoms}
        placed: list[str] = []
        chosen: dict = {}
        result = None

        def ok_first_atom_rule(a: str, placed_mask: int) -> bool:
            # for each such w not yet reached, a becomes its first atom; a G
            # atom may only be first when no F atom lies below w
            if is_f[a]:
                return True
            for w in two_up[a]:
                inside = P.below_mask(w)
                if inside & placed_mask:
                    continue
                if any(is_f[b] and P.leq(b, w) for b in atoms):
                    return False
            return True

        def extend(placed_mask: int, g_seen: bool):
            nonlocal result
            self.tick()
            if len(placed) == len(atoms):
                result = {r: tuple(placed)}
                for a in placed:
                    result.update(chosen[a])
                return True
            cands = [a for a in atoms if a not in placed]
            if self.rng is not None:
                self.rng.shuffle(cands)
            else:
                cands.sort(key=lambda a: (not any(P.below_mask(z) & placed_mask for z in P.up(a)), P.rank(a)))
            for a in cands:
                if self.kind == "rao" and is_f[a] and g_seen:
                    continue
                if self.kind == "grao" and not ok_first_atom_rule(a, placed_mask):
                    continue
                if not self._cond_ii_ok(a, placed_mask):
                    continue
                sub = self.solve(r + (a,), placed_mask)
                if sub is None:
                    continue
                placed.append(a)
                chosen[a] = sub
                if extend(placed_mask | P.mask([a]), g_seen or not is_f[a]):
                    return True
                placed.pop()
                del chosen[a]
            return False

        extend(0, False)
        self.memo[key] = result
        return result

    def _cond_ii_ok(self, a: str, earlier: int) -> bool:
        P = self.P
        if not earlier:
            return True
        for y in P.from_mask(P.above_mask(a)):
            if y == a or not P.below_mask(y) & earlier:
                continue
            if not any(P.leq(z, y) and P.below_mask(z) & earlier for z in P.up(a)):
                return False
        return True


def _search(P: Poset, kind: str, time_budget: float | None, rng) -> ChainAtomOrdering:
    s = _Search(P, kind, time_budget, rng)
    found = s.solve((P.bottom,), 0)
    if found is None:
        raise NotFound(f"no {kind.upper()} exists (exhaustive, {s.nodes} nodes)")
    return ChainAtomOrdering(P, found)


def search_RAO(P: Poset, time_budget: float | None = 30.0, rng: random.Random | None = None) -> ChainAtomOrdering:
    """Find an RAO by backtracking, or raise NotFound after exhausting the space."""
    return _search(P, "rao", time_budget, rng)


def search_GRAO(P: Poset, time_budget: float | None = 30.0, rng: random.Random | None = None) -> ChainAtomOrdering:
    """Find a GRAO; with ``rng`` the candidate order is shuffled to sample different ones."""
    return _search(P, "grao", time_budget, rng)
