from __future__ import annotations

import pytest

from limitnerve import InvalidRecursion, ParseError, parse_recursion, pretty_print
from limitnerve.recursion import format_word, free_reduce, invert_word, parse_word

from .conftest import ADDER, FS, TORUS


def test_parse_torus_structure():
    rec = parse_recursion("alphabet = 0 1 ; u = (0 1)[1, u v] ; v = (0 1)[u^-1, v]")
    assert rec.alphabet.letters == ("0", "1")
    assert rec.names == ("u", "v")
    u = rec.rules["u"]
    assert u.perm == (1, 0)
    assert u.sections == ((), (("u", 1), ("v", 1)))
    v = rec.rules["v"]
    assert v.perm == (1, 0)
    assert v.sections == ((("u", -1),), (("v", 1),))


def test_parse_adding_machine():
    rec = parse_recursion("alphabet = 0 1 ; a = (0 1)[1, a]")
    assert rec.rules["a"].perm == (1, 0)
    assert rec.rules["a"].sections == ((), (("a", 1),))


def test_undeclared_symbol_rejected():
    with pytest.raises(InvalidRecursion):
        parse_recursion("alphabet = 0 1 ; a = (0 1)[1, b]")


def test_duplicate_generator_rejected():
    with pytest.raises(InvalidRecursion):
        parse_recursion("alphabet = 0 1 ; a = (0 1)[1, a] ; a = ()[1, 1]")


def test_nonbijective_permutation_rejected():
    with pytest.raises(InvalidRecursion):
        parse_recursion("alphabet = 0 1 2 ; a = (0 1)(1 2)[1, 1, 1]")


def test_name_letter_collision_rejected():
    with pytest.raises(InvalidRecursion):
        parse_recursion("alphabet = a b ; a = (a b)[1, 1]")


def test_wrong_section_count_rejected():
    with pytest.raises(InvalidRecursion):
        parse_recursion("alphabet = 0 1 ; a = (0 1)[1]")


def test_empty_section_slot_rejected():
    with pytest.raises(ParseError):
        parse_recursion("alphabet = 0 1 ; e = ()[,]")


def test_small_alphabet_rejected():
    with pytest.raises(InvalidRecursion):
        parse_recursion("alphabet = 0 ; a = ()[1]")


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as err:
        parse_recursion("alphabet = 0 1\nu = (0 1)[1, u v")
    assert err.value.line == 2


def test_pretty_print_adding_machine():
    rec = parse_recursion(ADDER)
    assert pretty_print(rec) == "alphabet = 0 1\na = (0 1)[1, a]\n"


def test_pretty_print_torus_order():
    rec = parse_recursion(TORUS)
    assert pretty_print(rec) == "alphabet = 0 1\nu = (0 1)[1, u v]\nv = (0 1)[u^-1, v]\n"


@pytest.mark.parametrize("text", [TORUS, ADDER, FS])
def test_round_trip(text):
    rec = parse_recursion(text)
    assert parse_recursion(pretty_print(rec)) == rec


def test_comments_and_whitespace():
    text = "# torus\nalphabet = 0 1   # letters\n\nu = (0 1)[1, u v]\nv=(0 1)[u^-1,v]\n"
    assert parse_recursion(text) == parse_recursion(TORUS)


def test_free_reduce_and_invert():
    w = (("u", 1), ("v", 1), ("v", -1), ("u", 1))
    assert free_reduce(w) == (("u", 1), ("u", 1))
    assert invert_word((("u", 1), ("v", -1))) == (("v", 1), ("u", -1))
    assert format_word(()) == "1"
    assert format_word((("u", 1), ("v", -1))) == "u v^-1"


def test_parse_word_helper():
    rec = parse_recursion(TORUS)
    assert parse_word(rec, "u v^-1") == (("u", 1), ("v", -1))
    assert parse_word(rec, "1") == ()
    assert parse_word(rec, "u u^-1") == ()
    with pytest.raises(InvalidRecursion):
        parse_word(rec, "w")
