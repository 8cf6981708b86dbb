import pytest

from shellkit.errors import ParseError, ShellkitError
from shellkit.formats import (
    format_chain_labeling,
    format_edge_labeling,
    format_facets,
    format_ordering,
    format_poset,
    loads,
    parse_text,
)
from shellkit.fixtures import get_fixture
from shellkit.labelings import validate_CE
from shellkit.uncrossing import build_uncrossing

DIAMOND_TEXT = """\
# the diamond
cover 0 a
cover 0 b
cover a 1
cover b 1
"""


def test_poset_round_trip():
    P = loads(DIAMOND_TEXT).poset()
    assert P.elements == ("0", "a", "b", "1")
    assert loads(format_poset(P)).poset() == P


def test_element_order_is_first_appearance():
    P = loads("cover 0 b\ncover 0 a\ncover a 1\ncover b 1\n").poset()
    assert P.elements == ("0", "b", "a", "1")


def test_elements_record_wins_regardless_of_position():
    b = parse_text("default element-order\natoms 0 : b a\n", "x.atoms")
    parse_text("elements 0 a b 1\n" + DIAMOND_TEXT, "x.poset", b)
    P = b.poset()
    assert P.elements == ("0", "a", "b", "1")
    assert b.ordering(P).order(("0",)) == ("b", "a")


def test_parse_errors_name_file_and_line():
    with pytest.raises(ParseError) as e:
        parse_text("cover 0 a\nbogus 1 2\n", "p.poset")
    assert str(e.value).startswith("p.poset:2:")
    with pytest.raises(ParseError) as e:
        parse_text("label 0 a\n", "l.labels")
    assert "l.labels:1:" in str(e.value)
    with pytest.raises(ParseError):
        parse_text("atoms 0 a b\n")
    with pytest.raises(ParseError):
        parse_text("label 0 a 1\nlabel 0 a 2\n")


def test_labels_and_alphabet():
    b = loads(DIAMOND_TEXT + "alphabet lo hi\nlabel 0 a lo\nlabel a 1 hi\nlabel 0 b hi\nlabel b 1 lo\n")
    L = b.labeling()
    assert L.edge_token("0", "a") == "lo"
    assert loads(DIAMOND_TEXT + format_edge_labeling(L)).labeling() == L


def test_chain_labels_validated():
    text = DIAMOND_TEXT + "chainlabel 0 a 1 : 1 2\nchainlabel 0 b 1 : 2 1\n"
    L = loads(text).labeling()
    assert L.token(("0", "b"), "1") == 1
    assert loads(DIAMOND_TEXT + format_chain_labeling(L)).labeling().as_table() == L.as_table()


def test_chain_labels_breaking_prefix_rule():
    text = "cover 0 a\ncover a x\ncover a y\ncover x 1\ncover y 1\n"
    text += "chainlabel 0 a x 1 : 1 2 3\nchainlabel 0 a y 1 : 2 1 1\n"
    with pytest.raises(ShellkitError):
        loads(text).labeling()


def test_ordering_round_trip():
    fx = get_fixture("graoex-left")
    C = fx.ordering
    for full in (False, True):
        text = format_poset(fx.poset) + format_ordering(C, full=full)
        b = loads(text)
        assert b.ordering(b.poset()) == C


def test_uncrossing_labels_round_trip():
    _, E = build_uncrossing(3)
    text = format_poset(E.poset) + format_edge_labeling(E)
    b = loads(text)
    L = b.labeling(b.poset())
    assert L == E
    assert L.alphabet == E.alphabet


def test_facets():
    b = loads("facet a b\nfacet b c\nfacet c a\norder 2 3 1\n")
    F, order = b.facet_list()
    assert len(F) == 3 and order == [1, 2, 0]
    again = loads(format_facets(F, order)).facet_list()
    assert again[1] == order and set(again[0]) == set(F)
