"""Named example posets with their labelings, orderings and expected verdicts.

The drawn examples are read from text files shipped in ``shellkit/data``.
Boolean lattices, partition lattices and lattices of order ideals are
generated on demand.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from importlib import resources
from itertools import combinations
from pathlib import Path
from typing import Callable, Sequence

from .errors import BudgetExceeded, NotFound, ShellkitError
from .formats import Bundle, format_edge_labeling, format_labeling, format_ordering, format_poset, parse_text
from .labelings import (
    ChainEdgeLabeling,
    CheckReport,
    EdgeLabeling,
    LabelAlphabet,
    check_CC,
    check_CL,
    check_EC,
    check_EL,
    check_self_consistency,
    check_topological_CL,
    check_UE,
)
from .orderings import ChainAtomOrdering, check_GRAO, check_RAO, search_RAO
from .poset import Poset, build_poset


@dataclass
class NamedFixture:
    name: str
    poset: Poset
    labelings: dict[str, ChainEdgeLabeling] = field(default_factory=dict)
    orderings: dict[str, ChainAtomOrdering] = field(default_factory=dict)
    expected: dict[str, bool] = field(default_factory=dict)
    note: str = ""

    @property
    def labeling(self) -> ChainEdgeLabeling | None:
        return next(iter(self.labelings.values()), None)

    @property
    def ordering(self) -> ChainAtomOrdering | None:
        return next(iter(self.orderings.values()), None)

    def files(self) -> dict[str, str]:
        """File name -> text, in the formats read by the command line."""
        out = {f"{self.name}.poset": format_poset(self.poset)}
        if self.labeling is not None:
            out[f"{self.name}.labels"] = format_labeling(self.labeling)
        if self.ordering is not None:
            out[f"{self.name}.atoms"] = format_ordering(self.ordering, full=True)
        return out


def _search_verdict(P: Poset) -> CheckReport:
    try:
        search_RAO(P)
    except NotFound as exc:
        return CheckReport("search_RAO", False, info={"detail": str(exc)})
    return CheckReport("search_RAO", True)


# check name -> (applies to, function)
CHECKS: dict[str, tuple[str, Callable]] = {
    "EL": ("labeling", check_EL),
    "CL": ("labeling", check_CL),
    "EC": ("labeling", check_EC),
    "CC": ("labeling", check_CC),
    "tCL": ("labeling", check_topological_CL),
    "UE": ("labeling", check_UE),
    "SC": ("labeling", check_self_consistency),
    "GRAO": ("ordering", check_GRAO),
    "RAO": ("ordering", check_RAO),
    "search_RAO": ("poset", _search_verdict),
}


def run_check(fx: NamedFixture, name: str) -> CheckReport:
    target, fn = CHECKS[name]
    obj = {"labeling": fx.labeling, "ordering": fx.ordering, "poset": fx.poset}[target]
    if obj is None:
        raise ShellkitError(f"fixture {fx.name} has no {target} for check {name}")
    return fn(obj)


def actual_verdicts(fx: NamedFixture) -> dict[str, bool]:
    return {name: run_check(fx, name).passed for name in fx.expected}


# ---------------------------------------------------------------------------
# drawn examples


def _data_text(filename: str) -> str:
    return resources.files("shellkit").joinpath("data", filename).read_text()


def _from_data(name: str, files: Sequence[str], expected: dict, note: str = "") -> NamedFixture:
    b = Bundle()
    for f in files:
        parse_text(_data_text(f), f"data/{f}", b)
    P = b.poset()
    fx = NamedFixture(name, P, expected=dict(expected), note=note)
    if b.has_labeling():
        fx.labelings["drawn"] = b.labeling(P)
    if b.has_ordering():
        fx.orderings["drawn"] = b.ordering(P)
    return fx


_DRAWN = {
    "graoex-left": (("graoex.poset", "graoex-left.atoms", "graoex-left.labels"), {"GRAO": True, "RAO": False},
                    "GRAO that is not an RAO"),
    "graoex-right": (("graoex.poset", "graoex-right.atoms", "graoex-right.labels"), {"GRAO": True, "RAO": True},
                     "RAO obtained by reordering graoex-left"),
    "graotorao-left": (("graotorao.poset", "graotorao-left.atoms"), {"GRAO": True, "RAO": False},
                       "13-element GRAO that is not an RAO"),
    "graotorao-right": (("graotorao.poset", "graotorao-right.atoms"), {"GRAO": True, "RAO": True},
                        "RAO drawn next to graotorao-left"),
    "nonue-left": (("nonue.poset", "nonue-left.labels"), {"EC": True, "tCL": True, "SC": False, "UE": False},
                   "self-inconsistent EC-labeling"),
    "nonue-middle": (("nonue.poset", "nonue-middle.labels"), {"EC": True, "SC": True, "UE": False},
                     "self-consistent EC-labeling without UE"),
    "nonue-right": (("nonue.poset", "nonue-right.labels"), {"EC": True, "SC": True, "UE": True},
                    "EC-labeling with UE"),
    "rank2-tcl": (("rank2-tcl.poset", "rank2-tcl.labels"), {"tCL": True, "CC": False},
                  "topological CL-labeling with a repeated label sequence"),
    "two-chains": (("two-chains.poset",), {"search_RAO": False},
                   "proper part is two disjoint edges, so no RAO exists"),
}


def drawn_fixtures() -> list[NamedFixture]:
    return [_from_data(name, files, exp, note) for name, (files, exp, note) in _DRAWN.items()]


# ---------------------------------------------------------------------------
# generated families


def _subset_id(s: Sequence[int]) -> str:
    return "".join(map(str, sorted(s))) or "0"


def boolean_lattice(n: int) -> NamedFixture:
    """Subsets of {1..n}; the cover I < I+x is labeled x."""
    if not 1 <= n <= 5:
        raise BudgetExceeded("boolean_lattice supports 1 <= n <= 5")
    ground = range(1, n + 1)
    subsets = [s for k in range(n + 1) for s in combinations(ground, k)]
    covers, labels = [], {}
    for s in subsets:
        for x in ground:
            if x not in s:
                t = tuple(sorted(s + (x,)))
                covers.append((_subset_id(s), _subset_id(t)))
                labels[covers[-1]] = x
    P = Poset([_subset_id(s) for s in subsets], covers)
    L = EdgeLabeling(P, labels)
    return NamedFixture(f"boolean-{n}", P, {"insertion": L}, expected={"EL": True, "UE": True})


def _partition_id(blocks) -> str:
    return "|".join("".join(map(str, b)) for b in blocks)


def _set_partitions(items: list[int]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def partition_lattice(n: int) -> NamedFixture:
    """Set partitions of {1..n} by refinement; merging B1, B2 is labeled max(min B1, min B2)."""
    if not 1 <= n <= 5:
        raise BudgetExceeded("partition_lattice supports 1 <= n <= 5")
    parts = []
    for p in _set_partitions(list(range(1, n + 1))):
        parts.append(tuple(sorted(tuple(sorted(b)) for b in p)))
    parts.sort(key=lambda p: (-len(p), p))
    covers, labels = [], {}
    for p in parts:
        for i, j in combinations(range(len(p)), 2):
            merged = tuple(sorted(p[i] + p[j]))
            q = tuple(sorted([b for k, b in enumerate(p) if k not in (i, j)] + [merged]))
            c = (_partition_id(p), _partition_id(q))
            covers.append(c)
            labels[c] = max(p[i][0], p[j][0])
    P = Poset([_partition_id(p) for p in parts], covers)
    return NamedFixture(f"partition-{n}", P, {"max-min": EdgeLabeling(P, labels)}, expected={"EL": True, "UE": True})


def _closure(n: int, relations) -> list[set[int]]:
    below = [set() for _ in range(n)]
    for lo, hi in relations:
        below[hi].add(lo)
    changed = True
    while changed:
        changed = False
        for x in range(n):
            extra = set().union(*(below[y] for y in below[x])) - below[x] if below[x] else set()
            if extra:
                below[x] |= extra
                changed = True
    for x in range(n):
        if x in below[x]:
            raise ShellkitError("relations contain a cycle")
    return below


def distributive_from_poset(elements: Sequence[str], relations: Sequence[tuple[str, str]] = (), name: str | None = None) -> NamedFixture:
    """Order ideals of Q by inclusion; I < I+x is labeled x.

    ``relations`` are pairs (lo, hi) with lo < hi in Q; any generating set
    works. Labels are ordered by a linear extension of Q.
    """
    elements = list(elements)
    if len(elements) > 6:
        raise BudgetExceeded("distributive_from_poset supports |Q| <= 6")
    idx = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    below = _closure(n, [(idx[a], idx[b]) for a, b in relations])
    depth = {}
    for x in sorted(range(n), key=lambda x: len(below[x])):
        depth[x] = max((depth[y] + 1 for y in below[x]), default=0)
    ext = sorted(range(n), key=lambda x: (depth[x], x))
    ideals = []
    for k in range(n + 1):
        for s in combinations(range(n), k):
            if all(below[x] <= set(s) for x in s):
                ideals.append(frozenset(s))

    def ident(s):
        return "{" + ",".join(elements[x] for x in sorted(s)) + "}"

    covers, labels = [], {}
    ideal_set = set(ideals)
    for s in ideals:
        for x in ext:
            if x not in s and s | {x} in ideal_set:
                c = (ident(s), ident(s | {x}))
                covers.append(c)
                labels[c] = elements[x]
    P = Poset([ident(s) for s in ideals], covers)
    alphabet = LabelAlphabet([elements[x] for x in ext])
    L = EdgeLabeling(P, labels, alphabet)
    return NamedFixture(name or f"ideals-{'-'.join(elements) or 'empty'}", P, {"insertion": L},
                        expected={"EL": True, "UE": True})


def small_posets(size: int) -> list[tuple[list[str], list[tuple[str, str]]]]:
    """Every poset on ``size`` points, each given with a natural labeling.

    Isomorphic copies repeat; relations are listed in full (transitively closed).
    """
    names = [f"q{i + 1}" for i in range(size)]
    pairs = list(combinations(range(size), 2))
    out = []
    for bits in range(1 << len(pairs)):
        rel = {pairs[k] for k in range(len(pairs)) if bits >> k & 1}
        if all((a, c) in rel for a, b in rel for b2, c in rel if b == b2):
            out.append((names, [(names[a], names[b]) for a, b in sorted(rel)]))
    return out


def random_bounded_poset(rng: random.Random, max_elements: int = 12, density: float | None = None) -> Poset:
    """A random poset with a bottom and top added, at most ``max_elements`` in all."""
    k = rng.randint(1, max_elements - 2)
    p = rng.uniform(0.15, 0.6) if density is None else density
    rel = {(i, j) for i in range(k) for j in range(i + 1, k) if rng.random() < p}
    below = _closure(k, rel)
    covers = []
    for j in range(k):
        for i in below[j]:
            if not any(i in below[m] for m in below[j] if m != i):
                covers.append((f"e{i + 1}", f"e{j + 1}"))
    has_up = {a for a, _ in covers}
    has_down = {b for _, b in covers}
    inner = [f"e{i + 1}" for i in range(k)]
    covers += [("0", x) for x in inner if x not in has_down]
    covers += [(x, "1") for x in inner if x not in has_up]
    return Poset(["0"] + inner + ["1"], covers)


def classic_fixtures() -> list[NamedFixture]:
    return [
        boolean_lattice(2),
        boolean_lattice(3),
        partition_lattice(3),
        partition_lattice(4),
        distributive_from_poset(["b", "l", "r"], [("b", "l"), ("b", "r")], name="ideals-V"),
    ]


def all_fixtures() -> list[NamedFixture]:
    return drawn_fixtures() + classic_fixtures()


def get_fixture(name: str) -> NamedFixture:
    for fx in all_fixtures():
        if fx.name == name:
            return fx
    if name.startswith("boolean-") and name[8:].isdigit():
        return boolean_lattice(int(name[8:]))
    if name.startswith("partition-") and name[10:].isdigit():
        return partition_lattice(int(name[10:]))
    raise KeyError(name)


def fixture_names() -> list[str]:
    return [fx.name for fx in all_fixtures()]


def emit(fx: NamedFixture, out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for fname, text in fx.files().items():
        path = out_dir / fname
        path.write_text(text)
        written.append(path)
    return written
