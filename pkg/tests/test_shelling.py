import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from shellkit.errors import CheckerPreconditionFailed, NotPermutation
from shellkit.fixtures import all_fixtures, boolean_lattice, get_fixture, partition_lattice
from shellkit.labelings import EdgeLabeling, check_CC, check_CL, check_topological_CL, lex_chain_order
from shellkit.orderings import rao_to_cl, search_RAO
from shellkit.poset import build_poset, chain_poset
from shellkit.shelling import (
    FacetList,
    chain_indices,
    descend_census,
    is_shelling,
    mobius_via_descents,
    order_complex_facets,
    reduced_euler,
    sphere_vector,
)

DIAMOND = [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")]


def diamond(l0a, la1, l0b, lb1):
    return EdgeLabeling(build_poset(DIAMOND), {("0", "a"): l0a, ("a", "1"): la1, ("0", "b"): l0b, ("b", "1"): lb1})


def test_order_complex_facets():
    P = build_poset(DIAMOND)
    assert set(order_complex_facets(P, "proper")) == {frozenset("a"), frozenset("b")}
    assert set(order_complex_facets(P, "full")) == {frozenset("0a1"), frozenset("0b1")}
    proper = order_complex_facets(boolean_lattice(3).poset, "proper")
    assert len(proper) == 6 and all(len(f) == 2 for f in proper)


def test_is_shelling_examples():
    rep = is_shelling([{"a", "b"}, {"c", "d"}])
    assert not rep.passed and rep.witnesses[0].reason == "not-codimension-one"
    assert not is_shelling([{"a", "b"}, {"c", "d"}], [1, 0]).passed
    assert is_shelling([{"a", "b"}, {"b", "c"}, {"c", "a"}]).passed
    with pytest.raises(NotPermutation):
        is_shelling([{"a"}, {"b"}], [0, 0])
    L = get_fixture("nonue-right").labeling
    P = L.poset
    assert is_shelling(order_complex_facets(P, "full"), chain_indices(P, lex_chain_order(L))).passed


def test_facet_list_rejects_nested():
    with pytest.raises(Exception):
        FacetList((frozenset("ab"), frozenset("a")))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pairwise_criterion_matches_definition(seed):
    rng = random.Random(seed)
    verts = list("abcdef")
    d = rng.randint(1, 3)
    facets = set()
    for _ in range(rng.randint(1, 6)):
        facets.add(frozenset(rng.sample(verts, d)))
    facets = list(facets)
    rng.shuffle(facets)
    assert is_shelling(facets).passed == oracles.is_shelling_by_definition(facets)
    # renaming vertices changes nothing
    mapping = dict(zip(verts, rng.sample(range(100), len(verts))))
    assert is_shelling(FacetList(tuple(facets)).relabel(mapping)).passed == is_shelling(facets).passed


@pytest.mark.parametrize("faces,chi", [([{"v"}], 0), ([{"v"}, {"w"}], 1), ([], -1), ([{"a", "b"}, {"b", "c"}, {"c", "a"}], -1)])
def test_reduced_euler(faces, chi):
    got = reduced_euler(faces)
    assert got == chi and isinstance(got, int)


def test_descend_census_examples():
    L = diamond(1, 2, 2, 1)
    assert descend_census(L, ("0",), "1") == {2: 1}
    C = chain_poset(3)
    Lc = EdgeLabeling(C, {("c0", "c1"): 1, ("c1", "c2"): 2, ("c2", "c3"): 3})
    assert descend_census(Lc, ("c0",), "c3") == {}
    assert descend_census(Lc, ("c0", "c1", "c2"), "c3") == {1: 1}


def test_mobius_via_descents_examples():
    L = diamond(1, 2, 2, 1)
    assert mobius_via_descents(L, "0", "1") == 1
    assert mobius_via_descents(L, "a", "1") == -1
    assert mobius_via_descents(partition_lattice(4).labeling, "1|2|3|4", "1234") == -6
    with pytest.raises(CheckerPreconditionFailed):
        mobius_via_descents(get_fixture("nonue-left").labeling, "0", "1")


def test_sphere_vector_examples():
    assert sphere_vector(diamond(1, 2, 2, 1)) == {0: 1}
    C = chain_poset(3)
    Lc = EdgeLabeling(C, {("c0", "c1"): 1, ("c1", "c2"): 2, ("c2", "c3"): 3})
    assert sphere_vector(Lc) == {}
    assert sphere_vector(boolean_lattice(3).labeling) == {1: 1}


def _cc_labelings():
    out = []
    for fx in all_fixtures():
        for L in fx.labelings.values():
            if check_CC(L).passed:
                out.append((fx.name, L))
    return out


@pytest.mark.parametrize("name,L", _cc_labelings(), ids=lambda x: x if isinstance(x, str) else "")
def test_topological_census_matches_oracles(name, L):
    P = L.poset
    els, covs = list(P.elements), sorted(P.covers)
    mu = oracles.mobius_matrix(els, covs)
    for u in els:
        for v in els:
            if not P.leq(u, v):
                continue
            expect = mu[(u, v)]
            assert mobius_via_descents(L, u, v, topological=True) == expect
            if u != v:
                assert oracles.reduced_euler_of_chains(els, covs, u, v) == expect
                sub = P.interval(u, v)
                faces = order_complex_facets(sub, "proper") if len(sub) > 2 else []
                assert reduced_euler(faces) == expect
            # every root gives the same integer
            for r in P.roots(u):
                assert mobius_via_descents(L, u, v, topological=True, root=r) == expect


def _tcl_labelings():
    out = []
    for fx in all_fixtures():
        for L in fx.labelings.values():
            if check_topological_CL(L).passed:
                out.append((fx.name, L))
    for P in (boolean_lattice(3).poset, partition_lattice(4).poset, get_fixture("graoex-right").poset):
        out.append(("rao_to_cl", rao_to_cl(search_RAO(P))))
    return out


@pytest.mark.parametrize("name,L", _tcl_labelings(), ids=lambda x: x if isinstance(x, str) else "")
def test_lex_order_is_shelling(name, L):
    P = L.poset
    F = order_complex_facets(P, "full")
    order = chain_indices(P, lex_chain_order(L))
    assert is_shelling(F, order).passed
    assert oracles.is_shelling_by_definition([F[i] for i in order])


@pytest.mark.parametrize("name,L", _tcl_labelings(), ids=lambda x: x if isinstance(x, str) else "")
def test_sphere_vector_sums_to_euler(name, L):
    P = L.poset
    spheres = sphere_vector(L, topological=True)
    total = sum((-1) ** d * n for d, n in spheres.items())
    assert total == reduced_euler(order_complex_facets(P, "proper")) == P.mobius(P.bottom, P.top)
    if check_CL(L).passed:
        assert sphere_vector(L) == spheres


def test_two_chains_not_shellable():
    P = get_fixture("two-chains").poset
    rep = is_shelling(order_complex_facets(P, "full"))
    assert not rep.passed and "first_failure" in rep.info
