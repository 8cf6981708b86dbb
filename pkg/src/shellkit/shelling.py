"""Order complexes, shelling checks and descending-chain counts."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .errors import CheckerPreconditionFailed, NotPermutation, ShellkitError
from .labelings import (
    DEFAULT_MAX_WITNESSES,
    ChainEdgeLabeling,
    CheckReport,
    Witness,
    _topological_pattern,
    check_CL,
    check_topological_CL,
)
from .poset import Poset


@dataclass(frozen=True)
class FacetList:
    facets: tuple[frozenset, ...]

    def __post_init__(self):
        fs = tuple(frozenset(f) for f in self.facets)
        object.__setattr__(self, "facets", fs)
        if len(set(fs)) != len(fs):
            raise ShellkitError("facet listed twice")
        for a, b in combinations(fs, 2):
            if a <= b or b <= a:
                raise ShellkitError(f"facet {sorted(a)} is contained in {sorted(b)}; facets must be inclusion-maximal")

    def __len__(self) -> int:
        return len(self.facets)

    def __iter__(self):
        return iter(self.facets)

    def __getitem__(self, i):
        return self.facets[i]

    def relabel(self, mapping) -> "FacetList":
        return FacetList(tuple(frozenset(mapping[x] for x in f) for f in self.facets))


def order_complex_facets(P: Poset, mode: str = "full") -> FacetList:
    """Maximal chains of P ("full") or of P without bottom and top ("proper")."""
    if mode == "full":
        return FacetList(tuple(frozenset(m) for m in P.maximal_chains()))
    if mode == "proper":
        inner = {frozenset(m[1:-1]) for m in P.maximal_chains()}
        ordered = []
        for m in P.maximal_chains():
            f = frozenset(m[1:-1])
            if f in inner:
                ordered.append(f)
                inner.discard(f)
        return FacetList(tuple(ordered))
    raise ValueError(f"mode must be 'full' or 'proper', not {mode!r}")


def chain_indices(P: Poset, chains: Sequence[Sequence[str]]) -> list[int]:
    """Positions of ``chains`` among the full order-complex facets."""
    pos = {m: i for i, m in enumerate(P.maximal_chains())}
    return [pos[tuple(c)] for c in chains]


def is_shelling(F: FacetList | Sequence[Iterable], order: Sequence[int] | None = None,
                max_witnesses: int = DEFAULT_MAX_WITNESSES) -> CheckReport:
    """Pairwise shelling test on ``order`` (0-based indices into F).

    For each j and each i < j there must be a k < j with F_i & F_j inside
    F_k & F_j and |F_k & F_j| = |F_j| - 1.
    """
    if not isinstance(F, FacetList):
        F = FacetList(tuple(frozenset(f) for f in F))
    order = list(range(len(F))) if order is None else list(order)
    if sorted(order) != list(range(len(F))):
        raise NotPermutation(f"order must be a permutation of 0..{len(F) - 1}")
    seq = [F[i] for i in order]
    witnesses = []
    for j in range(1, len(seq)):
        fj = seq[j]
        shared = [seq[i] & fj for i in range(j)]
        ridges = [s for s in shared if len(s) == len(fj) - 1]
        for i, s in enumerate(shared):
            if not any(s <= t for t in ridges):
                witnesses.append(Witness(
                    "not-codimension-one", None, None, None,
                    [tuple(sorted(seq[i])), tuple(sorted(fj))], [],
                    f"facets {i + 1} and {j + 1} of the order meet in {sorted(s)}, "
                    f"which lies in no codimension-one face shared with an earlier facet",
                ))
                break
        if len(witnesses) >= max_witnesses:
            break
    rep = CheckReport("shelling", not witnesses, witnesses)
    if witnesses:
        rep.info["first_failure"] = witnesses[0].detail
    return rep


def reduced_euler(F: FacetList | Sequence[Iterable]) -> int:
    """Reduced Euler characteristic, the empty face included.

    A point gives 0 and the complex whose only face is empty gives -1.
    """
    facets = [frozenset(f) for f in F]
    faces: set[frozenset] = set()
    for f in facets:
        items = sorted(f, key=str)
        for k in range(len(items) + 1):
            for sub in combinations(items, k):
                faces.add(frozenset(sub))
    if not faces:
        faces.add(frozenset())
    by_size = Counter(len(f) for f in faces)
    # a face with k vertices has dimension k - 1; the empty face counts -1
    return sum((n if k % 2 else -n) for k, n in by_size.items())


def _is_descending(L: ChainEdgeLabeling, r: tuple, c: tuple, seq: tuple, topological: bool) -> bool:
    if len(c) <= 2:
        return True
    if topological:
        return not any(_topological_pattern(L, r, c))
    return all(a >= b for a, b in zip(seq, seq[1:]))


def descend_census(L: ChainEdgeLabeling, r: Sequence[str], v: str, topological: bool = False) -> dict[int, int]:
    """Descending chains of [end(r), v]_r counted by length."""
    r = tuple(r)
    P = L.poset
    P._require_leq(r[-1], v)
    counts: Counter = Counter()
    for seq, c in L.scan(r)[v]:
        if _is_descending(L, r, c, seq, topological):
            counts[len(c) - 1] += 1
    return dict(sorted(counts.items()))


def _require(L: ChainEdgeLabeling, topological: bool) -> None:
    cache = L.__dict__.setdefault("_precondition_cache", {})
    if topological not in cache:
        rep = check_topological_CL(L, max_witnesses=1) if topological else check_CL(L, max_witnesses=1)
        cache[topological] = rep
    rep = cache[topological]
    if not rep:
        raise CheckerPreconditionFailed(f"labeling fails {rep.check}: {rep.witnesses[0].describe()}")


def lex_first_root(L: ChainEdgeLabeling, u: str) -> tuple[str, ...]:
    P = L.poset
    return L.scan((P.bottom,))[u][0][1]


def mobius_via_descents(L: ChainEdgeLabeling, u: str, v: str, topological: bool = False,
                        check: bool = True, root: Sequence[str] | None = None) -> int:
    """Alternating sum of descending-chain counts over [u, v]."""
    if check:
        _require(L, topological)
    r = tuple(root) if root is not None else lex_first_root(L, u)
    census = descend_census(L, r, v, topological)
    return sum((-1) ** length * n for length, n in census.items())


def sphere_vector(L: ChainEdgeLabeling, topological: bool = False, check: bool = True) -> dict[int, int]:
    """Sphere dimension -> count for the proper part of the whole poset."""
    if check:
        _require(L, topological)
    P = L.poset
    census = descend_census(L, (P.bottom,), P.top, topological)
    return {length - 2: n for length, n in census.items()}
