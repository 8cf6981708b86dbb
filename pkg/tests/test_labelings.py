import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from shellkit.errors import LabelError, MissingChain
from shellkit.fixtures import all_fixtures, boolean_lattice, get_fixture, partition_lattice, random_bounded_poset
from shellkit.labelings import (
    ChainEdgeLabeling,
    EdgeLabeling,
    LabelAlphabet,
    check_CC,
    check_CL,
    check_EC,
    check_EL,
    check_self_consistency,
    check_topological_CL,
    check_UE,
    classify_chain,
    is_topological_ascent,
    label_sequence,
    lex_chain_order,
    lex_compare,
    validate_CE,
)
from shellkit.poset import build_poset

DIAMOND = [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")]


def diamond_labeling(l0a, la1, l0b, lb1):
    P = build_poset(DIAMOND)
    return EdgeLabeling(P, {("0", "a"): l0a, ("a", "1"): la1, ("0", "b"): l0b, ("b", "1"): lb1})


# -- sequences and comparisons -------------------------------------------

def test_label_sequence_nonue_right():
    L = get_fixture("nonue-right").labeling
    assert label_sequence(L, ("0",), ("0", "a", "x", "1")) == (1, 2, 3)
    assert label_sequence(L, ("0", "a"), ("a",)) == ()


def test_edge_labels_ignore_root():
    L = get_fixture("nonue-right").labeling
    assert label_sequence(L, ("0", "a"), ("a", "x", "1")) == label_sequence(L, ("0", "b", "x")[:1] + ("a",), ("a", "x", "1"))


@pytest.mark.parametrize("s,t,want", [((1, 2), (1, 3), -1), ((1,), (1, 5), -1), ((2, 1), (1, 9, 9), 1), ((4,), (4,), 0)])
def test_lex_compare(s, t, want):
    assert lex_compare(s, t) == want


def test_topological_ascent_examples():
    L = get_fixture("nonue-left").labeling
    assert is_topological_ascent(L, ("0",), ("0", "a", "x"))
    P = build_poset([("0", "x"), ("x", "1")])
    single = EdgeLabeling(P, {("0", "x"): 5, ("x", "1"): 1})
    assert is_topological_ascent(single, ("0",), ("0", "x", "1"))
    D = diamond_labeling(2, 1, 1, 2)
    assert not is_topological_ascent(D, ("0",), ("0", "a", "1"))


def test_classify_chain():
    P = build_poset([("0", "x"), ("x", "y"), ("y", "1")])
    L = EdgeLabeling(P, {("0", "x"): 1, ("x", "y"): 2, ("y", "1"): 3})
    f = classify_chain(L, ("0",), ("0", "x", "y", "1"))
    assert f.ascending and f.topologically_ascending and not f.descending
    mid = get_fixture("nonue-middle").labeling
    assert label_sequence(mid, ("0",), ("0", "b", "x", "1")) == (1, 2, 1)
    assert not classify_chain(mid, ("0",), ("0", "b", "x", "1")).ascending
    one = classify_chain(L, ("0",), ("0", "x"))
    assert one.ascending and one.descending and one.topologically_ascending and one.topologically_descending


# -- validate_CE ---------------------------------------------------------

def test_validate_ce():
    P = build_poset(DIAMOND)
    rep, L = validate_CE(P, {("0", "a", "1"): (1, 2), ("0", "b", "1"): (1, 1)})
    assert rep.passed and L.token(("0", "b"), "1") == 1
    P2 = build_poset([("0", "a"), ("a", "x"), ("a", "y"), ("x", "1"), ("y", "1")])
    rep, L = validate_CE(P2, {("0", "a", "x", "1"): (1, 2, 3), ("0", "a", "y", "1"): (2, 1, 1)})
    assert not rep.passed and L is None and rep.witnesses
    with pytest.raises(MissingChain):
        validate_CE(P, {("0", "a", "1"): (1, 2)})


def test_validate_ce_roundtrip_from_edges():
    L = get_fixture("boolean-3").labeling
    P = L.poset
    per_chain = {m: L.tokens_along((P.bottom,), m) for m in P.maximal_chains()}
    rep, M = validate_CE(P, per_chain)
    assert rep.passed
    assert all(M.token(r, v) == L.token(r, v) for r, v, _ in M.items())


def test_alphabet_rejects_mixed_without_declaration():
    P = build_poset(DIAMOND)
    with pytest.raises(LabelError):
        EdgeLabeling(P, {("0", "a"): "x", ("a", "1"): 1, ("0", "b"): 1, ("b", "1"): 1})
    alpha = LabelAlphabet(["lo", "hi"])
    L = EdgeLabeling(P, {("0", "a"): "lo", ("a", "1"): "hi", ("0", "b"): "hi", ("b", "1"): "lo"}, alpha)
    assert check_EL(L).passed


# -- checker examples ----------------------------------------------------

def test_el_examples():
    assert check_EL(boolean_lattice(3).labeling).passed
    assert check_EL(partition_lattice(3).labeling).passed
    rep = check_EL(diamond_labeling(1, 2, 1, 2))
    assert not rep.passed and rep.witnesses[0].reason == "multiple-ascending-chains"


def test_cl_nonue_left_witness():
    rep = check_CL(get_fixture("nonue-left").labeling)
    assert not rep.passed
    w = rep.witnesses[0]
    assert (w.reason, w.u, w.v) == ("ascending-not-lex-first", "0", "x")
    assert w.labels == [(1, 2), (1, 1)]


def test_ec_examples():
    for name in ("nonue-left", "nonue-middle", "nonue-right"):
        assert check_EC(get_fixture(name).labeling).passed, name
    dup = diamond_labeling(1, 2, 1, 2)
    assert not check_EC(dup).passed
    assert not check_CC(dup).passed


def test_rank2_tcl_but_not_cc():
    L = get_fixture("rank2-tcl").labeling
    assert check_topological_CL(L).passed
    rep = check_CC(L)
    assert not rep.passed


def test_ue_and_sc_drawn_verdicts():
    assert [check_self_consistency(get_fixture(n).labeling).passed for n in ("nonue-left", "nonue-middle", "nonue-right")] == [False, True, True]
    assert [check_UE(get_fixture(n).labeling).passed for n in ("nonue-left", "nonue-middle", "nonue-right")] == [False, False, True]
    w = check_self_consistency(get_fixture("nonue-left").labeling).witnesses[0]
    assert "a is first in [0,x] but b is first in [0,y]" in w.detail
    assert check_UE(partition_lattice(4).labeling).passed


def test_lex_chain_order_nonue_right_golden():
    L = get_fixture("nonue-right").labeling
    # sequences (1,2,3) (1,8,7) (4,5,3) (4,6,7), sorted by hand
    assert lex_chain_order(L) == [("0", "a", "x", "1"), ("0", "a", "y", "1"), ("0", "b", "x", "1"), ("0", "b", "y", "1")]


def test_lex_chain_order_ties_follow_element_order():
    assert lex_chain_order(diamond_labeling(1, 2, 1, 2))[0] == ("0", "a", "1")
    assert lex_chain_order(diamond_labeling(2, 1, 1, 2))[0] == ("0", "b", "1")


def test_jobs_give_identical_reports():
    L = partition_lattice(4).labeling
    for fn in (check_EL, check_UE, check_EC):
        assert fn(L, jobs=1).to_dict() == fn(L, jobs=4).to_dict()
    bad = get_fixture("nonue-left").labeling
    assert check_CL(bad, jobs=1).to_dict() == check_CL(bad, jobs=3).to_dict()


def test_witness_cap():
    rep = check_CL(get_fixture("nonue-left").labeling, max_witnesses=2)
    assert len(rep.witnesses) == 2


# -- implications across all fixture labelings ---------------------------

def _fixture_labelings():
    return [(fx.name, L) for fx in all_fixtures() for L in fx.labelings.values()]


@pytest.mark.parametrize("name,L", _fixture_labelings(), ids=lambda x: x if isinstance(x, str) else "")
def test_implications(name, L):
    cl, ue, cc, tcl = check_CL(L).passed, check_UE(L).passed, check_CC(L).passed, check_topological_CL(L).passed
    if cl:
        assert ue and tcl
    if cc:
        assert tcl
    if ue and check_topological_CL(L).passed:
        # a unique lex-first chain exists everywhere, so UE forces self-consistency
        assert check_self_consistency(L).passed
    if L.is_edge:
        if check_EL(L).passed:
            assert cl
        if check_EC(L).passed:
            assert cc


# -- random labelings against the brute-force oracles --------------------

def _random_case(seed, chain_edge):
    rng = random.Random(seed)
    P = random_bounded_poset(rng, max_elements=7)
    els, covs = list(P.elements), sorted(P.covers)
    if chain_edge:
        table = {}
        for u in els:
            for r in P.roots(u):
                for v in P.up(u):
                    table[(r, v)] = rng.randint(1, 3)
        L = ChainEdgeLabeling(P, table)
        lab = lambda prefix, v: table[(prefix, v)]  # noqa: E731
    else:
        edges = {c: rng.randint(1, 3) for c in covs}
        L = EdgeLabeling(P, edges)
        lab = lambda prefix, v: edges[(prefix[-1], v)]  # noqa: E731
    return P, els, covs, L, lab


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_checkers_match_oracles(seed, chain_edge):
    P, els, covs, L, lab = _random_case(seed, chain_edge)
    b = P.bottom
    assert check_CL(L).passed == oracles.verdict_CL(els, covs, b, lab)
    assert check_CC(L).passed == oracles.verdict_CC(els, covs, b, lab)
    assert check_topological_CL(L).passed == oracles.verdict_tCL(els, covs, b, lab)
    assert check_UE(L).passed == oracles.verdict_UE(els, covs, b, lab)
    assert check_self_consistency(L).passed == oracles.verdict_SC(els, covs, b, lab)
    if not chain_edge:
        assert check_EL(L).passed == check_CL(L).passed
        assert check_EC(L).passed == check_CC(L).passed


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_lex_chain_order_is_sorted_total_order(seed):
    P, els, covs, L, lab = _random_case(seed, True)
    order = lex_chain_order(L)
    assert sorted(order) == sorted(P.maximal_chains())
    seqs = [oracles.seq_of(lab, (P.bottom,), m) for m in order]
    for i in range(len(order) - 1):
        c = lex_compare(seqs[i], seqs[i + 1])
        assert c < 0 or (c == 0 and P.chain_key(order[i]) < P.chain_key(order[i + 1]))
