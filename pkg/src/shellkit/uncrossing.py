"""Uncrossing posets of perfect matchings on 2n boundary points.

A matching is written as a strand word: position p holds the number of the
strand (chord) through boundary point p, strands numbered by first
appearance. P_n is a new bottom plus one element per word, ranked by
crossing number + 1. A cover removes one crossing by reconnecting the four
endpoints of a crossing pair.

Labels live on the dual poset (covers read downward in P_n). A pair label
(i, j) with i < j marks the ijji resolution of strands i, j; the reversed
pair (j, i) marks the iijj resolution; L marks a cover into the bottom.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field
from itertools import combinations

from .errors import BudgetExceeded, InvalidLabel, NotCrossing
from .labelings import CheckReport, EdgeLabeling, LabelAlphabet, check_CL, check_EC, check_self_consistency, check_UE, lex_chain_order
from .orderings import check_GRAO, check_RAO, labeling_to_grao, rao_to_cl, reorder
from .poset import Poset
from .shelling import chain_indices, is_shelling, order_complex_facets

BOTTOM = "0"
DEFAULT_MAX_N = 4
HARD_MAX_N = 5

Word = tuple  # tuple[int, ...]


def canonicalize(seq) -> Word:
    """Renumber strands by first appearance."""
    names: dict = {}
    out = []
    for s in seq:
        if s not in names:
            names[s] = len(names) + 1
        out.append(names[s])
    return tuple(out)


def parse_word(text: str) -> Word:
    return tuple(int(ch) for ch in text)


def word_str(w: Word) -> str:
    return "".join(map(str, w))


def _check_n(n: int, cap: int) -> None:
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > cap:
        raise BudgetExceeded(f"n={n} is over the cap of {cap}")


def enumerate_matchings(n: int, allow_large: bool = False) -> list[Word]:
    """All canonical words of length 2n, sorted."""
    _check_n(n, HARD_MAX_N if allow_large else DEFAULT_MAX_N + 1)
    words = []
    slots = [0] * (2 * n)

    def place(strand: int) -> None:
        try:
            first = slots.index(0)
        except ValueError:
            words.append(tuple(slots))
            return
        slots[first] = strand
        for second in range(first + 1, 2 * n):
            if slots[second] == 0:
                slots[second] = strand
                place(strand + 1)
                slots[second] = 0
        slots[first] = 0

    place(1)
    return sorted(words)


def _positions(w: Word) -> dict[int, tuple[int, int]]:
    pos: dict[int, list[int]] = {}
    for p, s in enumerate(w):
        pos.setdefault(s, []).append(p)
    return {s: (ps[0], ps[1]) for s, ps in pos.items()}


def _interleave(pi, pj) -> bool:
    return pi[0] < pj[0] < pi[1] < pj[1] or pj[0] < pi[0] < pj[1] < pi[1]


def crossing_number(w: Word) -> int:
    pos = _positions(w)
    return sum(1 for i, j in combinations(sorted(pos), 2) if _interleave(pos[i], pos[j]))


def uncross(w: Word, i: int, j: int) -> list[tuple[Word, tuple[int, int]]]:
    """Both reconnections of crossing strands i < j of w.

    Returns [(ijji result, (i, j)), (iijj result, (j, i))], words canonical.
    """
    if i > j:
        i, j = j, i
    pos = _positions(w)
    if i not in pos or j not in pos or i == j or not _interleave(pos[i], pos[j]):
        raise NotCrossing(f"strands {i} and {j} of {word_str(w)} do not cross")
    p1, p2, p3, p4 = sorted(pos[i] + pos[j])
    fresh_a, fresh_b = -1, -2

    def build(pairs):
        out = list(w)
        for tag, (x, y) in zip((fresh_a, fresh_b), pairs):
            out[x] = out[y] = tag
        return canonicalize(out)

    nested = build([(p1, p4), (p2, p3)])  # reads i j j i on the four points
    side = build([(p1, p2), (p3, p4)])    # reads i i j j
    return [(nested, (i, j)), (side, (j, i))]


def label_token(label) -> str:
    if label == "L":
        return "L"
    a, b = label
    return f"a:{a},{b}" if a < b else f"d:{a},{b}"


def parse_label_token(token: str):
    if token == "L":
        return "L"
    try:
        kind, rest = token.split(":")
        a, b = (int(x) for x in rest.split(","))
    except ValueError:
        raise InvalidLabel(f"bad uncrossing label {token!r}") from None
    if (kind == "a" and a < b) or (kind == "d" and a > b):
        return (a, b)
    raise InvalidLabel(f"bad uncrossing label {token!r}")


def uncrossing_labels(n: int) -> list:
    """All labels for strands 1..n in increasing order."""
    asc = [(i, j) for i, j in combinations(range(1, n + 1), 2)]
    desc = sorted(((j, i) for i, j in asc), key=lambda p: (-p[0], -p[1]))
    return asc + ["L"] + desc


def uncrossing_label_rank(label, n: int) -> int:
    labels = uncrossing_labels(n)
    if isinstance(label, str) and label != "L":
        label = parse_label_token(label)
    if isinstance(label, list):
        label = tuple(label)
    try:
        return labels.index(label)
    except ValueError:
        raise InvalidLabel(f"{label!r} is not a label for n={n}") from None


def uncrossing_alphabet(n: int) -> LabelAlphabet:
    return LabelAlphabet([label_token(x) for x in uncrossing_labels(n)])


def build_uncrossing(n: int, allow_large: bool = False) -> tuple[Poset, EdgeLabeling]:
    """P_n and the edge labeling of its dual."""
    _check_n(n, HARD_MAX_N if allow_large else DEFAULT_MAX_N)
    if n == HARD_MAX_N:
        warnings.warn("n=5 builds 946 elements; rooted-interval checks will be slow", RuntimeWarning, stacklevel=2)
    words = enumerate_matchings(n, allow_large=allow_large)
    cross = {w: crossing_number(w) for w in words}
    words.sort(key=lambda w: (cross[w], w))
    covers = []
    dual_labels = {}
    for w in words:
        if cross[w] == 0:
            covers.append((BOTTOM, word_str(w)))
            dual_labels[(word_str(w), BOTTOM)] = "L"
    for v in words:
        pos = _positions(v)
        for i, j in combinations(sorted(pos), 2):
            if not _interleave(pos[i], pos[j]):
                continue
            for u, lab in uncross(v, i, j):
                if cross[u] != cross[v] - 1:
                    continue
                key = (word_str(v), word_str(u))
                if key in dual_labels:
                    raise AssertionError(f"{key} reached by two uncrossings")
                dual_labels[key] = label_token(lab)
                covers.append((word_str(u), word_str(v)))
    elements = [BOTTOM] + [word_str(w) for w in words]
    P = Poset(elements, covers)
    D = P.dual()
    return P, EdgeLabeling(D, dual_labels, uncrossing_alphabet(n))


def rank_of(x: str) -> int:
    return 0 if x == BOTTOM else crossing_number(parse_word(x)) + 1


def to_dot(P: Poset, labeling: EdgeLabeling | None = None, name: str = "P") -> str:
    """DOT text for P drawn bottom-up; labels read from the dual labeling."""
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for x in P.elements:
        lines.append(f'  "{x}";')
    for lo, hi in P.cover_pairs():
        attr = ""
        if labeling is not None:
            attr = f' [label="{labeling.edge_token(hi, lo)}"]'
        lines.append(f'  "{lo}" -> "{hi}"{attr};')
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass
class StageResult:
    name: str
    report: CheckReport
    seconds: float


@dataclass
class PipelineReport:
    n: int
    stages: list[StageResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return len(self.stages) == len(PIPELINE_STAGES) and all(s.report.passed for s in self.stages)

    def lines(self) -> list[str]:
        out = [f"uncrossing pipeline n={self.n}"]
        for k, s in enumerate(self.stages, start=1):
            out.append(f"  {k}. {s.name}: {s.report.verdict} ({s.seconds:.3f}s)")
            out.extend("     " + w.describe() for w in s.report.witnesses)
        out.append("pipeline: " + ("pass" if self.passed else "fail"))
        return out


PIPELINE_STAGES = (
    "EC on the dual",
    "UE on the dual",
    "self-consistency",
    "labeling_to_grao then GRAO",
    "reorder then RAO",
    "rao_to_cl then CL",
    "lex order of the CL labeling is a shelling",
)


def verify_uncrossing_pipeline(n: int, jobs: int = 1, allow_large: bool = False) -> PipelineReport:
    """Run the seven stages on the dual of P_n, stopping at the first failure."""
    _, E = build_uncrossing(n, allow_large=allow_large)
    D = E.poset
    rep = PipelineReport(n)
    state: dict = {}

    def stage1():
        return check_EC(E, jobs=jobs)

    def stage2():
        return check_UE(E, jobs=jobs)

    def stage3():
        return check_self_consistency(E, jobs=jobs)

    def stage4():
        state["grao"] = labeling_to_grao(E)
        return check_GRAO(state["grao"], jobs=jobs)

    def stage5():
        state["rao"] = reorder(state["grao"])
        return check_RAO(state["rao"], jobs=jobs)

    def stage6():
        state["cl"] = rao_to_cl(state["rao"], check=False)
        return check_CL(state["cl"], jobs=jobs)

    def stage7():
        order = chain_indices(D, lex_chain_order(state["cl"]))
        return is_shelling(order_complex_facets(D, "full"), order)

    for name, fn in zip(PIPELINE_STAGES, (stage1, stage2, stage3, stage4, stage5, stage6, stage7)):
        t0 = time.perf_counter()
        result = fn()
        rep.stages.append(StageResult(name, result, time.perf_counter() - t0))
        if not result.passed:
            break
    return rep
