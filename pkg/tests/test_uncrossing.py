import random
from itertools import combinations
from math import comb

import pytest

import oracles
from shellkit.errors import BudgetExceeded, InvalidLabel, NotCrossing
from shellkit.labelings import check_EC, check_UE
from shellkit.uncrossing import (
    PIPELINE_STAGES,
    build_uncrossing,
    canonicalize,
    crossing_number,
    enumerate_matchings,
    parse_label_token,
    parse_word,
    rank_of,
    to_dot,
    uncross,
    uncrossing_label_rank,
    uncrossing_labels,
    verify_uncrossing_pipeline,
    word_str,
)


def _matchings_by_pairs(n):
    """Perfect matchings of 0..2n-1 as pair lists, generated recursively."""
    def go(points):
        if not points:
            yield []
            return
        first, rest = points[0], points[1:]
        for k, partner in enumerate(rest):
            for m in go(rest[:k] + rest[k + 1:]):
                yield [(first, partner)] + m
    return list(go(list(range(2 * n))))


def _word_from_pairs(pairs, n):
    w = [0] * (2 * n)
    for k, (a, b) in enumerate(sorted(pairs), start=1):
        w[a] = w[b] = k
    return tuple(w)


def _crossings_from_pairs(pairs):
    return sum(1 for (a, b), (c, d) in combinations(pairs, 2) if a < c < b < d or c < a < d < b)


def _double_factorial(k):
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def _catalan(n):
    return comb(2 * n, n) // (n + 1)


def test_enumerate_small():
    assert enumerate_matchings(1) == [(1, 1)]
    assert [word_str(w) for w in enumerate_matchings(2)] == ["1122", "1212", "1221"]
    words = enumerate_matchings(3)
    assert len(words) == 15
    assert sum(1 for w in words if crossing_number(w) == 0) == 5


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_enumeration_against_pair_lists(n):
    pairs = _matchings_by_pairs(n)
    expect = {_word_from_pairs(p, n): _crossings_from_pairs(p) for p in pairs}
    words = enumerate_matchings(n)
    assert len(words) == _double_factorial(2 * n - 1)
    assert set(words) == set(expect)
    assert all(crossing_number(w) == expect[w] for w in words)
    assert sum(1 for w in words if expect[w] == 0) == _catalan(n)


@pytest.mark.parametrize("word,k", [("1122", 0), ("1221", 0), ("1212", 1), ("123312", 1), ("123123", 3)])
def test_crossing_number(word, k):
    assert crossing_number(parse_word(word)) == k


def test_uncross_examples():
    got = {(word_str(w), lab) for w, lab in uncross(parse_word("123312"), 1, 2)}
    assert got == {("123321", (1, 2)), ("112233", (2, 1))}
    got = {(word_str(w), lab) for w, lab in uncross(parse_word("1212"), 1, 2)}
    assert got == {("1221", (1, 2)), ("1122", (2, 1))}
    with pytest.raises(NotCrossing):
        uncross(parse_word("1122"), 1, 2)


def test_canonicalize():
    assert canonicalize((3, 1, 3, 1)) == (1, 2, 1, 2)
    rng = random.Random(1)
    for w in enumerate_matchings(4):
        assert canonicalize(w) == w
        perm = list(range(1, 5))
        rng.shuffle(perm)
        assert canonicalize(tuple(perm[s - 1] for s in w)) == w


def test_label_order():
    labels = uncrossing_labels(3)
    asc = [x for x in labels if x != "L" and x[0] < x[1]]
    desc = [x for x in labels if x != "L" and x[0] > x[1]]
    assert asc == [(1, 2), (1, 3), (2, 3)]
    assert desc == [(3, 2), (3, 1), (2, 1)]
    assert uncrossing_label_rank((2, 3), 3) < uncrossing_label_rank("L", 3) < uncrossing_label_rank((3, 2), 3)
    assert uncrossing_label_rank("d:2,1", 3) == len(labels) - 1
    with pytest.raises(InvalidLabel):
        uncrossing_label_rank((1, 4), 3)
    with pytest.raises(InvalidLabel):
        parse_label_token("a:2,1")


def test_p2_shape():
    P, E = build_uncrossing(2)
    assert set(P.elements) == {"0", "1122", "1221", "1212"}
    assert P.covers == {("0", "1122"), ("0", "1221"), ("1122", "1212"), ("1221", "1212")}
    assert check_EC(E).passed


def test_p3_shape_and_eulerian():
    P, E = build_uncrossing(3)
    assert len(P) == 16
    sizes = [0] * 5
    for x in P.elements:
        sizes[rank_of(x)] += 1
    assert sizes == [1, 5, 6, 3, 1]
    assert P.top == "123123"
    mu = oracles.mobius_matrix(list(P.elements), sorted(P.covers))
    for (x, y), val in mu.items():
        assert val == (-1) ** (rank_of(y) - rank_of(x))
        assert P.mobius(x, y) == val
    assert len(P.atoms(P.bottom)) == 5


@pytest.mark.parametrize("n", [2, 3, 4])
def test_structure_invariants(n):
    P, E = build_uncrossing(n)
    assert len(P) == _double_factorial(2 * n - 1) + 1
    assert len(P.atoms(P.bottom)) == _catalan(n)
    for lo, hi in P.covers:
        assert rank_of(hi) == rank_of(lo) + 1
        assert P.depth(hi) == rank_of(hi)
    # labels downward from each element are distinct
    D = E.poset
    for v in D.elements:
        labs = [E.edge_token(v, u) for u in D.up(v)]
        assert len(labs) == len(set(labs))
    assert len(P.roots(P.top)) == len(P.maximal_chains())


def test_p3_roots_two_ways():
    P, _ = build_uncrossing(3)
    brute = oracles.maximal_chains_brute(list(P.elements), sorted(P.covers), P.bottom, P.top)
    assert set(P.roots(P.top)) == brute


def test_uncross_removes_at_least_one_crossing():
    for n in (2, 3):
        for v in enumerate_matchings(n):
            cv = crossing_number(v)
            pos = {}
            for p, s in enumerate(v):
                pos.setdefault(s, []).append(p)
            for i, j in combinations(sorted(pos), 2):
                a, b = pos[i], pos[j]
                if a[0] < b[0] < a[1] < b[1]:
                    for u, _ in uncross(v, i, j):
                        assert crossing_number(u) <= cv - 1


def test_dual_has_ue():
    _, E = build_uncrossing(3)
    assert check_UE(E).passed


@pytest.mark.parametrize("n", [2, 3])
def test_pipeline_passes(n):
    rep = verify_uncrossing_pipeline(n)
    assert rep.passed, "\n".join(rep.lines())
    assert [s.name for s in rep.stages] == list(PIPELINE_STAGES)


def test_budget():
    with pytest.raises(BudgetExceeded):
        build_uncrossing(5)
    with pytest.raises(BudgetExceeded):
        enumerate_matchings(6, allow_large=True)


def test_dot():
    P, E = build_uncrossing(2)
    text = to_dot(P, E)
    assert text.startswith("digraph") and '"1122" -> "1212" [label="d:2,1"]' in text
