"""Line-oriented text formats.

One record per line, keyword first; ``#`` starts a comment. Records from
several files can be merged into one Bundle, so a poset, its labeling and
its ordering may live in separate files:

    elements <id> ...                  optional; fixes ElementOrder up front
    cover <lower> <upper>
    label <lower> <upper> <token>
    chainlabel <e0> ... <ek> : <t1> ... <tk>
    alphabet <t1> <t2> ...
    default element-order
    atoms <e0> ... <ek> : <a1> ... <at>
    facet <v1> <v2> ...
    order <i1> <i2> ...                1-based facet positions

ElementOrder follows ``elements`` records when present, wherever they sit in
the input; other ids follow in order of first appearance.
Integer-looking tokens are read as integers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import ParseError, ShellkitError
from .labelings import ChainEdgeLabeling, EdgeLabeling, LabelAlphabet, validate_CE
from .orderings import ChainAtomOrdering
from .poset import Poset
from .shelling import FacetList

_INT = re.compile(r"^[+-]?\d+$")


def read_token(text: str):
    return int(text) if _INT.match(text) else text


@dataclass
class Bundle:
    element_order: dict = field(default_factory=dict)
    declared: dict = field(default_factory=dict)
    covers: list = field(default_factory=list)
    labels: dict = field(default_factory=dict)
    chainlabels: dict = field(default_factory=dict)
    alphabet: list | None = None
    atoms: dict = field(default_factory=dict)
    default_header: bool = False
    facets: list = field(default_factory=list)
    facet_order: list | None = None
    sources: list = field(default_factory=list)
    _where: dict = field(default_factory=dict)

    def _see(self, *ids: str) -> None:
        for x in ids:
            self.element_order.setdefault(x, None)

    # builders -----------------------------------------------------------

    def poset(self) -> Poset:
        if not self.covers:
            raise ShellkitError("no cover records found")
        used = {x for c in self.covers for x in c}
        elements = [x for x in self.declared if x in used]
        elements += [x for x in self.element_order if x in used and x not in self.declared]
        try:
            return Poset(elements, self.covers)
        except ShellkitError as exc:
            raise ShellkitError(f"{self._describe_sources()}: {exc}") from None

    def label_alphabet(self) -> LabelAlphabet | None:
        return LabelAlphabet(self.alphabet) if self.alphabet is not None else None

    def has_labeling(self) -> bool:
        return bool(self.labels or self.chainlabels)

    def labeling(self, poset: Poset | None = None) -> ChainEdgeLabeling:
        """Edge labeling from label records, else a validated chain-edge labeling."""
        P = poset or self.poset()
        if self.labels and self.chainlabels:
            raise ShellkitError("both label and chainlabel records given; use one kind")
        if self.labels:
            return EdgeLabeling(P, self.labels, self.label_alphabet())
        if self.chainlabels:
            report, L = validate_CE(P, self.chainlabels, self.label_alphabet())
            if L is None:
                raise ShellkitError("chain labels break the prefix condition: " + report.witnesses[0].describe())
            return L
        raise ShellkitError("no label or chainlabel records found")

    def has_ordering(self) -> bool:
        return bool(self.atoms) or self.default_header

    def ordering(self, poset: Poset | None = None) -> ChainAtomOrdering:
        P = poset or self.poset()
        return ChainAtomOrdering(P, self.atoms)

    def facet_list(self) -> tuple[FacetList, list[int] | None]:
        if not self.facets:
            raise ShellkitError("no facet records found")
        order = None
        if self.facet_order is not None:
            order = [i - 1 for i in self.facet_order]
        return FacetList(tuple(frozenset(f) for f in self.facets)), order

    def _describe_sources(self) -> str:
        return ", ".join(self.sources) or "<input>"


def parse_text(text: str, source: str = "<input>", bundle: Bundle | None = None) -> Bundle:
    b = bundle if bundle is not None else Bundle()
    b.sources.append(source)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kw, args = parts[0], parts[1:]

        def fail(msg: str):
            raise ParseError(msg, source, lineno)

        if kw == "elements":
            if not args:
                fail("elements needs at least one id")
            for x in args:
                b.declared.setdefault(x, None)
        elif kw == "cover":
            if len(args) != 2:
                fail("expected: cover <lower> <upper>")
            b._see(*args)
            b.covers.append((args[0], args[1]))
        elif kw == "label":
            if len(args) != 3:
                fail("expected: label <lower> <upper> <token>")
            key = (args[0], args[1])
            if key in b.labels:
                fail(f"cover {args[0]} {args[1]} labeled twice")
            b._see(args[0], args[1])
            b.labels[key] = read_token(args[2])
        elif kw == "chainlabel":
            chain, toks = _split_colon(args, fail, "chainlabel <e0> ... <ek> : <t1> ... <tk>")
            if len(toks) != len(chain) - 1:
                fail(f"chain has {len(chain) - 1} edges but {len(toks)} labels")
            if chain in b.chainlabels:
                fail("chain listed twice")
            b._see(*chain)
            b.chainlabels[chain] = tuple(read_token(t) for t in toks)
        elif kw == "alphabet":
            if not args:
                fail("alphabet needs tokens")
            toks = [read_token(t) for t in args]
            b.alphabet = (b.alphabet or []) + toks
        elif kw == "default":
            if args != ["element-order"]:
                fail("only 'default element-order' is supported")
            b.default_header = True
        elif kw == "atoms":
            root, order = _split_colon(args, fail, "atoms <e0> ... <ek> : <a1> ... <at>")
            if not root:
                fail("atoms record needs a root")
            if root in b.atoms:
                fail(f"root {' '.join(root)} given twice")
            b._see(*root)
            b.atoms[root] = order
        elif kw == "facet":
            if not args:
                fail("facet needs at least one vertex")
            b.facets.append(tuple(args))
        elif kw == "order":
            try:
                b.facet_order = [int(a) for a in args]
            except ValueError:
                fail("order takes 1-based facet positions")
        else:
            fail(f"unknown record {kw!r}")
    return b


def _split_colon(args, fail, usage):
    if args.count(":") != 1:
        fail(f"expected: {usage}")
    k = args.index(":")
    return tuple(args[:k]), tuple(args[k + 1:])


def load_files(paths: Iterable[str | Path]) -> Bundle:
    b = Bundle()
    for p in paths:
        p = Path(p)
        try:
            text = p.read_text()
        except OSError as exc:
            raise ParseError(f"cannot read: {exc.strerror}", str(p)) from None
        parse_text(text, str(p), b)
    return b


def loads(text: str) -> Bundle:
    return parse_text(text)


# ---------------------------------------------------------------------------
# writers


def format_poset(P: Poset) -> str:
    lines = ["elements " + " ".join(P.elements)]
    lines += [f"cover {lo} {hi}" for lo, hi in P.cover_pairs()]
    return "\n".join(lines) + "\n"


def _alphabet_line(alpha: LabelAlphabet) -> list[str]:
    if all(isinstance(t, int) for t in alpha.tokens):
        return []
    return ["alphabet " + " ".join(map(str, alpha.tokens))]


def format_edge_labeling(L: EdgeLabeling) -> str:
    lines = _alphabet_line(L.alphabet)
    lines += [f"label {u} {v} {t}" for u, v, t in L.edge_items()]
    return "\n".join(lines) + "\n"


def format_chain_labeling(L: ChainEdgeLabeling) -> str:
    lines = _alphabet_line(L.alphabet)
    P = L.poset
    for m in P.maximal_chains():
        toks = L.tokens_along((P.bottom,), m)
        lines.append("chainlabel " + " ".join(m) + " : " + " ".join(map(str, toks)))
    return "\n".join(lines) + "\n"


def format_labeling(L: ChainEdgeLabeling) -> str:
    return format_edge_labeling(L) if L.is_edge else format_chain_labeling(L)


def format_ordering(C: ChainAtomOrdering, full: bool = False) -> str:
    lines = ["default element-order"]
    rows = C.table() if full else C.explicit()
    P = C.poset
    for r in sorted(rows, key=lambda r: (len(r), P.chain_key(r))):
        lines.append("atoms " + " ".join(r) + " : " + " ".join(rows[r]))
    return "\n".join(lines) + "\n"


def format_facets(F: FacetList, order: list[int] | None = None) -> str:
    lines = ["facet " + " ".join(sorted(f, key=str)) for f in F]
    if order is not None:
        lines.append("order " + " ".join(str(i + 1) for i in order))
    return "\n".join(lines) + "\n"
