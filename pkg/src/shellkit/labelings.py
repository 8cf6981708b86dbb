"""Chain-edge and edge labelings, chain classification, and the labeling checkers.

Labels are stored as tokens and compared through a LabelAlphabet, which maps
each token to an integer rank. All comparisons of label sequences are done on
rank tuples, where Python's tuple order already gives dictionary order with
a proper prefix sorting first.
"""

from __future__ import annotations

from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .errors import ChainNotInPoset, ExtraChain, LabelError, MissingChain
from .poset import Poset

DEFAULT_MAX_WITNESSES = 10


# ---------------------------------------------------------------------------
# alphabets


class LabelAlphabet:
    """Totally ordered set of label tokens."""

    def __init__(self, tokens: Iterable):
        self.tokens = tuple(tokens)
        self._rank = {}
        for t in self.tokens:
            if t in self._rank:
                raise LabelError(f"token {t!r} listed twice in alphabet")
            self._rank[t] = len(self._rank)

    @classmethod
    def integers(cls, tokens: Iterable[int]) -> "LabelAlphabet":
        return cls(sorted(set(tokens)))

    @classmethod
    def infer(cls, tokens: Iterable) -> "LabelAlphabet":
        """Integer tokens in numeric order; anything else needs an explicit alphabet."""
        tokens = set(tokens)
        bad = [t for t in tokens if not isinstance(t, int)]
        if bad:
            raise LabelError(f"non-integer tokens {sorted(map(str, bad))[:5]} need an alphabet declaration")
        return cls.integers(tokens)

    def rank(self, token) -> int:
        try:
            return self._rank[token]
        except KeyError:
            raise LabelError(f"token {token!r} is not in the alphabet") from None

    def __contains__(self, token) -> bool:
        return token in self._rank

    def __len__(self) -> int:
        return len(self.tokens)

    def __eq__(self, other) -> bool:
        return isinstance(other, LabelAlphabet) and self.tokens == other.tokens

    def __repr__(self) -> str:
        return f"LabelAlphabet({list(self.tokens)!r})"


# ---------------------------------------------------------------------------
# labelings


class ChainEdgeLabeling:
    """Labels keyed by (root path ending at u, upper cover v).

    ``table`` must contain an entry for every root of every non-top element
    and every up-cover of that element.
    """

    is_edge = False

    def __init__(self, poset: Poset, table: Mapping[tuple, object], alphabet: LabelAlphabet | None = None):
        self.poset = poset
        self._table = dict(table)
        self.alphabet = alphabet if alphabet is not None else LabelAlphabet.infer(self._table.values())
        self._keys = {k: self.alphabet.rank(t) for k, t in self._table.items()}
        for r in poset.all_roots():
            for v in poset.up(r[-1]):
                if (r, v) not in self._keys:
                    raise LabelError(f"no label for cover {r[-1]} < {v} under root {' '.join(r)}")
        self._scan_cache: dict = {}
        self._asc_cache: dict = {}

    # lookups
    def token(self, root: tuple, v: str):
        return self._table[(tuple(root), v)]

    def key(self, root: tuple, v: str) -> int:
        return self._keys[(tuple(root), v)]

    def _step_key(self, path: list, v: str) -> int:
        return self._keys[(tuple(path), v)]

    def _scan_id(self, root: tuple):
        return root

    def items(self) -> Iterator[tuple[tuple, str, object]]:
        """(root, v, token) for every labeled rooted cover."""
        for (r, v), t in self._table.items():
            yield r, v, t

    def as_table(self) -> dict:
        return dict(self._table)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChainEdgeLabeling):
            return NotImplemented
        if self.poset != other.poset:
            return False
        for r in self.poset.all_roots():
            for v in self.poset.up(r[-1]):
                if self.token(r, v) != other.token(r, v):
                    return False
        return True

    def __hash__(self):
        return id(self)

    # sequences
    def sequence(self, root: tuple, chain: Sequence[str]) -> tuple[int, ...]:
        """Rank sequence of ``chain`` under ``root`` (chain starts at root's end)."""
        path = list(root)
        out = []
        for v in chain[1:]:
            out.append(self._step_key(path, v))
            path.append(v)
        return tuple(out)

    def tokens_along(self, root: tuple, chain: Sequence[str]) -> tuple:
        path = list(root)
        out = []
        for v in chain[1:]:
            out.append(self.token(tuple(path), v))
            path.append(v)
        return tuple(out)

    def scan(self, root: tuple) -> dict[str, list[tuple[tuple[int, ...], tuple[str, ...]]]]:
        """Every saturated chain leaving end(root), grouped by endpoint.

        Each group is sorted by (rank sequence, ElementOrder of the chain), so
        the first entry is the lex-first chain of that rooted interval.
        """
        sid = self._scan_id(tuple(root))
        hit = self._scan_cache.get(sid)
        if hit is not None:
            return hit
        P = self.poset
        groups: dict[str, list] = defaultdict(list)
        path = list(root)
        base = len(path) - 1

        def walk(seq: tuple) -> None:
            x = path[-1]
            groups[x].append((seq, tuple(path[base:])))
            for y in P.up(x):
                k = self._step_key(path, y)
                path.append(y)
                walk(seq + (k,))
                path.pop()

        walk(())
        for lst in groups.values():
            lst.sort(key=lambda e: (e[0], P.chain_key(e[1])))
        result = dict(groups)
        self._scan_cache[sid] = result
        return result

    def topological_ascent(self, root: tuple, v: str, w: str) -> bool:
        """Whether end(root) < v < w is a topological ascent under ``root``."""
        ck = (self._scan_id(tuple(root)), v, w)
        hit = self._asc_cache.get(ck)
        if hit is not None:
            return hit
        entries = self.scan(root)[w]
        seq0, chain0 = entries[0]
        result = chain0 == (root[-1], v, w) and (len(entries) == 1 or entries[1][0] > seq0)
        self._asc_cache[ck] = result
        return result

    def rooted_intervals(self) -> Iterator[tuple[tuple, str]]:
        """(root, v) for every rooted interval with end(root) < v."""
        P = self.poset
        for r in self._roots_for_scan():
            groups = self.scan(r)
            for v in sorted(groups, key=P.rank):
                if v != r[-1]:
                    yield r, v

    def _roots_for_scan(self) -> Iterator[tuple]:
        return self.poset.all_roots()


class EdgeLabeling(ChainEdgeLabeling):
    """Root-independent labels on covers."""

    is_edge = True

    def __init__(self, poset: Poset, labels: Mapping[tuple[str, str], object], alphabet: LabelAlphabet | None = None):
        self.poset = poset
        self._edges = dict(labels)
        missing = [c for c in poset.cover_pairs() if c not in self._edges]
        if missing:
            raise LabelError(f"no label for covers {missing[:5]}")
        extra = [c for c in self._edges if c not in poset.covers]
        if extra:
            raise LabelError(f"labels given for non-covers {extra[:5]}")
        self.alphabet = alphabet if alphabet is not None else LabelAlphabet.infer(self._edges.values())
        self._edge_keys = {c: self.alphabet.rank(t) for c, t in self._edges.items()}
        self._scan_cache = {}
        self._asc_cache = {}

    def token(self, root: tuple, v: str):
        return self._edges[(root[-1], v)]

    def key(self, root: tuple, v: str) -> int:
        return self._edge_keys[(root[-1], v)]

    def _step_key(self, path: list, v: str) -> int:
        return self._edge_keys[(path[-1], v)]

    def _scan_id(self, root: tuple):
        return root[-1]

    def edge_token(self, u: str, v: str):
        return self._edges[(u, v)]

    def edge_items(self) -> list[tuple[str, str, object]]:
        return [(u, v, self._edges[(u, v)]) for u, v in self.poset.cover_pairs()]

    def items(self):
        for r in self.poset.all_roots():
            for v in self.poset.up(r[-1]):
                yield r, v, self._edges[(r[-1], v)]

    def as_table(self) -> dict:
        return {(r, v): t for r, v, t in self.items()}

    def _roots_for_scan(self):
        # labels ignore the root, so one stand-in root per element suffices
        top = self.poset.top
        return ((u,) for u in self.poset.linear_extension() if u != top)

    def to_chain_edge(self) -> ChainEdgeLabeling:
        return ChainEdgeLabeling(self.poset, self.as_table(), self.alphabet)


# ---------------------------------------------------------------------------
# reports


@dataclass
class Witness:
    reason: str
    root: tuple | None
    u: str | None = None
    v: str | None = None
    chains: list = field(default_factory=list)
    labels: list = field(default_factory=list)
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "reason": self.reason,
            "root": list(self.root) if self.root is not None else None,
            "u": self.u,
            "v": self.v,
            "chains": [list(c) for c in self.chains],
            "labels": [list(map(str, s)) for s in self.labels],
            "detail": self.detail,
        }

    def describe(self) -> str:
        where = f"[{self.u},{self.v}]" if self.u is not None else ""
        if self.root is not None and len(self.root) > 1:
            where += "_(" + " ".join(self.root) + ")"
        parts = [self.reason]
        if where:
            parts.append(where)
        for c, s in zip(self.chains, self.labels):
            parts.append(" ".join(c) + " : " + " ".join(map(str, s)))
        if self.chains and not self.labels:
            parts.extend(" ".join(c) for c in self.chains)
        if self.detail:
            parts.append(self.detail)
        return "; ".join(parts)


@dataclass
class CheckReport:
    check: str
    passed: bool
    witnesses: list[Witness] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "verdict": self.verdict,
            "witnesses": [w.to_dict() for w in self.witnesses],
            "info": self.info,
        }

    def lines(self) -> list[str]:
        out = [f"{self.check}: {self.verdict}"]
        out.extend("  " + w.describe() for w in self.witnesses)
        return out


def _collect(name: str, units: Iterable, fn: Callable[[object], list[Witness]], max_witnesses: int, jobs: int = 1) -> CheckReport:
    """Run ``fn`` over ``units`` in order, keeping the first witnesses found."""
    found: list[Witness] = []
    if jobs <= 1:
        for unit in units:
            found.extend(fn(unit))
            if len(found) >= max_witnesses:
                break
    else:
        units = list(units)
        chunk = max(1, jobs * 4)
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for start in range(0, len(units), chunk):
                for ws in pool.map(fn, units[start:start + chunk]):
                    found.extend(ws)
                if len(found) >= max_witnesses:
                    break
    found = found[:max_witnesses]
    return CheckReport(name, not found, found)


def _root_display(L: ChainEdgeLabeling, r: tuple) -> tuple | None:
    return None if L.is_edge else r


def _groups(L: ChainEdgeLabeling, r: tuple):
    P = L.poset
    g = L.scan(r)
    return [(v, g[v]) for v in sorted(g, key=P.rank) if v != r[-1]]


def _tokens(L, r, chain):
    return L.tokens_along(r, chain)


# ---------------------------------------------------------------------------
# elementary operations


def label_sequence(L: ChainEdgeLabeling, r: Sequence[str], c: Sequence[str]) -> tuple:
    """Label tokens along chain ``c`` under root ``r``."""
    r = tuple(r)
    c = tuple(c)
    P = L.poset
    if not c or c[0] != r[-1]:
        raise ChainNotInPoset("chain must start at the end of the root")
    if not P.is_chain_in(c):
        raise ChainNotInPoset(f"{' '.join(c)} is not a saturated chain")
    return L.tokens_along(r, c)


def lex_compare(s1: Sequence, s2: Sequence) -> int:
    """-1, 0 or 1: dictionary order, a proper prefix sorting first."""
    t1, t2 = tuple(s1), tuple(s2)
    return (t1 > t2) - (t1 < t2)


def is_topological_ascent(L: ChainEdgeLabeling, r: Sequence[str], triple: Sequence[str]) -> bool:
    u, v, w = triple
    r = tuple(r)
    if r[-1] != u:
        raise ChainNotInPoset("root must end at the first element of the triple")
    P = L.poset
    if not (P.is_cover(u, v) and P.is_cover(v, w)):
        raise ChainNotInPoset(f"{u} < {v} < {w} is not a pair of covers")
    return L.topological_ascent(r, v, w)


@dataclass(frozen=True)
class ChainFlags:
    ascending: bool
    descending: bool
    topologically_ascending: bool
    topologically_descending: bool


def _topological_pattern(L: ChainEdgeLabeling, r: tuple, c: tuple) -> list[bool]:
    out = []
    for i in range(1, len(c) - 1):
        out.append(L.topological_ascent(r + c[1:i], c[i], c[i + 1]))
    return out


def classify_chain(L: ChainEdgeLabeling, r: Sequence[str], c: Sequence[str]) -> ChainFlags:
    r, c = tuple(r), tuple(c)
    if len(c) <= 2:
        return ChainFlags(True, True, True, True)
    s = L.sequence(r, c)
    asc = [a < b for a, b in zip(s, s[1:])]
    top = _topological_pattern(L, r, c)
    return ChainFlags(all(asc), not any(asc), all(top), not any(top))


def _ascending(seq: tuple) -> bool:
    return all(a < b for a, b in zip(seq, seq[1:]))


# ---------------------------------------------------------------------------
# checkers


def _lex_first_ascending(L: ChainEdgeLabeling, r: tuple, reason_prefix: str = "") -> list[Witness]:
    out = []
    for v, entries in _groups(L, r):
        asc = [e for e in entries if _ascending(e[0])]
        u = r[-1]
        root = _root_display(L, r)
        if not asc:
            out.append(Witness("no-ascending-chain", root, u, v))
        elif len(asc) > 1:
            out.append(Witness("multiple-ascending-chains", root, u, v,
                               [e[1] for e in asc[:2]], [_tokens(L, r, e[1]) for e in asc[:2]]))
        elif entries[0][1] != asc[0][1] or (len(entries) > 1 and entries[1][0] == entries[0][0]):
            rival = entries[0] if entries[0][1] != asc[0][1] else entries[1]
            out.append(Witness("ascending-not-lex-first", root, u, v,
                               [asc[0][1], rival[1]], [_tokens(L, r, asc[0][1]), _tokens(L, r, rival[1])]))
    return out


def check_EL(EL: EdgeLabeling, max_witnesses: int = DEFAULT_MAX_WITNESSES, jobs: int = 1) -> CheckReport:
    """Every interval has one ascending maximal chain, strictly lex-first."""
    if not EL.is_edge:
        raise LabelError("check_EL needs an edge labeling")
    return _collect("EL", EL._roots_for_scan(), lambda r: _lex_first_ascending(EL, r), max_witnesses, jobs)


def check_CL(L: ChainEdgeLabeling, max_witnesses: int = DEFAULT_MAX_WITNESSES, jobs: int = 1) -> CheckReport:
    """Every rooted interval has one ascending chain, strictly lex-first."""
    return _collect("CL", L._roots_for_scan(), lambda r: _lex_first_ascending(L, r), max_witnesses, jobs)


def _ec_conditions(L: ChainEdgeLabeling, r: tuple) -> list[Witness]:
    out = []
    u = r[-1]
    root = _root_display(L, r)
    for v, entries in _groups(L, r):
        top_asc = [e[1] for e in entries if all(_topological_pattern(L, r, e[1]))]
        if len(top_asc) != 1:
            reason = "no-topologically-ascending-chain" if not top_asc else "multiple-topologically-ascending-chains"
            out.append(Witness(reason, root, u, v, top_asc[:2], [_tokens(L, r, c) for c in top_asc[:2]]))
        for (s1, c1), (s2, c2) in zip(entries, entries[1:]):
            if s2[: len(s1)] == s1:
                reason = "repeated-label-sequence" if s1 == s2 else "prefix-label-sequence"
                out.append(Witness(reason, root, u, v, [c1, c2], [_tokens(L, r, c1), _tokens(L, r, c2)]))
                break
    return out


def check_EC(EL: EdgeLabeling, max_witnesses: int = DEFAULT_MAX_WITNESSES, jobs: int = 1) -> CheckReport:
    """Unique topologically ascending chain and prefix-free distinct sequences per interval."""
    if not EL.is_edge:
        raise LabelError("check_EC needs an edge labeling")
    return _collect("EC", EL._roots_for_scan(), lambda r: _ec_conditions(EL, r), max_witnesses, jobs)


def check_CC(L: ChainEdgeLabeling, max_witnesses: int = DEFAULT_MAX_WITNESSES, jobs: int = 1) -> CheckReport:
    return _collect("CC", L._roots_for_scan(), lambda r: _ec_conditions(L, r), max_witnesses, jobs)


def _unique_lex_first(L: ChainEdgeLabeling, r: tuple) -> list[Witness]:
    out = []
    for v, entries in _groups(L, r):
        if len(entries) > 1 and entries[0][0] == entries[1][0]:
            cs = [entries[0][1], entries[1][1]]
            out.append(Witness("NoUniqueLexFirst", _root_display(L, r), r[-1], v, cs, [_tokens(L, r, c) for c in cs]))
    return out


def _tcl_conditions(L: ChainEdgeLabeling, r: tuple) -> list[Witness]:
    out = _unique_lex_first(L, r)
    if out:
        return out
    for v, entries in _groups(L, r):
        for seq, c in entries[1:]:
            if all(_topological_pattern(L, r, c)):
                out.append(Witness("later-chain-without-topological-descent", _root_display(L, r), r[-1], v,
                                   [c], [_tokens(L, r, c)]))
                break
    return out


def check_topological_CL(L: ChainEdgeLabeling, max_witnesses: int = DEFAULT_MAX_WITNESSES, jobs: int = 1) -> CheckReport:
    return _collect("topological-CL", L._roots_for_scan(), lambda r: _tcl_conditions(L, r), max_witnesses, jobs)


def _ue_conditions(L: ChainEdgeLabeling, r: tuple) -> list[Witness]:
    P = L.poset
    u = r[-1]
    ups = P.up(u)
    keys = {a: L.key(r, a) for a in ups}
    out = []
    for v in sorted(L.scan(r), key=P.rank):
        if v == u:
            continue
        below = [a for a in ups if P.leq(a, v)]
        low = min(keys[a] for a in below)
        hits = [a for a in below if keys[a] == low]
        if len(hits) > 1:
            out.append(Witness("minimum-label-repeated", _root_display(L, r), u, v,
                               [(u, a) for a in hits], [(L.token(r, a),) for a in hits]))
    return out


def check_UE(L: ChainEdgeLabeling, max_witnesses: int = DEFAULT_MAX_WITNESSES, jobs: int = 1) -> CheckReport:
    """Smallest label among up-covers inside each rooted interval occurs once."""
    return _collect("UE", L._roots_for_scan(), lambda r: _ue_conditions(L, r), max_witnesses, jobs)


def _sc_conditions(L: ChainEdgeLabeling, r: tuple) -> list[Witness]:
    P = L.poset
    u = r[-1]
    groups = _groups(L, r)
    # best[v'][b]: lex-first sequence among chains of [u,v']_r through atom b
    best: dict[str, dict[str, tuple]] = {}
    for v, entries in groups:
        per_atom: dict[str, tuple] = {}
        for seq, c in entries:
            per_atom.setdefault(c[1], (seq, c))
        best[v] = per_atom
    out = []
    for v, entries in groups:
        a = entries[0][1][1]
        for b in best[v]:
            if b == a:
                continue
            for w, per_atom in best.items():
                if a in per_atom and b in per_atom and per_atom[b][0] <= per_atom[a][0]:
                    ca, cb = per_atom[a][1], per_atom[b][1]
                    out.append(Witness("self-inconsistent", _root_display(L, r), u, v, [ca, cb],
                                       [_tokens(L, r, ca), _tokens(L, r, cb)],
                                       f"{a} is first in [{u},{v}] but {b} is first in [{u},{w}]"))
                    return out
    return out


def check_self_consistency(L: ChainEdgeLabeling, max_witnesses: int = DEFAULT_MAX_WITNESSES, jobs: int = 1) -> CheckReport:
    """Lex-first atoms agree across nested rooted intervals.

    Fails with NoUniqueLexFirst witnesses when some rooted interval has no
    unique lex-first chain. Otherwise, for the lex-first atom a of [u,v]_r
    and every other atom b, each [u,v']_r containing a and b must have every
    chain through b lex-later than the lex-first chain through a.
    """
    first = _collect("self-consistency", L._roots_for_scan(), lambda r: _unique_lex_first(L, r), max_witnesses, jobs)
    if not first.passed:
        return first
    return _collect("self-consistency", L._roots_for_scan(), lambda r: _sc_conditions(L, r), max_witnesses, jobs)


def lex_chain_order(L: ChainEdgeLabeling) -> list[tuple[str, ...]]:
    """Maximal chains by label sequence, ties broken by ElementOrder."""
    P = L.poset
    entries = L.scan((P.bottom,))[P.top]
    return [c for _, c in entries]


def validate_CE(poset: Poset, per_chain: Mapping[Sequence[str], Sequence], alphabet: LabelAlphabet | None = None):
    """Check per-maximal-chain labels for prefix consistency.

    Returns (report, labeling); the labeling is None when the report fails.
    """
    chains = set(poset.maximal_chains())
    given = {tuple(c): tuple(s) for c, s in per_chain.items()}
    missing = [c for c in poset.maximal_chains() if c not in given]
    if missing:
        raise MissingChain(f"no labels for maximal chain {' '.join(missing[0])}")
    extra = [c for c in given if c not in chains]
    if extra:
        raise ExtraChain(f"{' '.join(extra[0])} is not a maximal chain")
    table: dict = {}
    source: dict = {}
    witnesses = []
    for m in poset.maximal_chains():
        seq = given[m]
        if len(seq) != len(m) - 1:
            raise LabelError(f"chain {' '.join(m)} has {len(m) - 1} edges but {len(seq)} labels")
        for i in range(len(m) - 1):
            k = (m[: i + 1], m[i + 1])
            if k in table and table[k] != seq[i]:
                prior = source[k]
                witnesses.append(Witness("ce-conflict", m[: i + 1], m[i], m[i + 1], [prior, m],
                                         [given[prior], seq], f"edge {i + 1} labeled {table[k]} and {seq[i]}"))
                break
            table.setdefault(k, seq[i])
            source.setdefault(k, m)
    report = CheckReport("CE", not witnesses, witnesses[:DEFAULT_MAX_WITNESSES])
    if witnesses:
        return report, None
    return report, ChainEdgeLabeling(poset, table, alphabet)
