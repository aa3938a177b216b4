"""Property suites: section cocycle, product rule, kappa involution,
union-find confluence and parse/print round-trip fuzzing.

Each suite is a plain function returning the number of checks performed,
so the acceptance tests can run them standalone with timing.
"""

from __future__ import annotations

import itertools
import random
import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limitnerve import InvalidRecursion, ParseError, Session, parse_recursion, pretty_print
from limitnerve.complexes import quotient_complex
from limitnerve.models import cutpaste_level, cutpaste_level0, kappa_seed_pairs
from limitnerve.nerve import build_nerve
from limitnerve.nucleus import compute_nucleus
from limitnerve.recursion import Alphabet, GeneratorRule, WreathRecursion, free_reduce

from .conftest import ADDER, TORUS
from .oracles import all_words


def check_section_cocycle(session, radius: int = 2, half: int = 2) -> int:
    """section(g, v1 v2) == section(section(g, v1), v2) under are_equal."""
    checks = 0
    ball = session.enumerate_ball(session.generators(), radius)
    alphabet = session.rec.alphabet
    vs = [w for n in range(half + 1) for w in all_words(alphabet, n)]
    for g in ball:
        for v1 in vs:
            for v2 in vs:
                lhs = session.section(g, v1 + v2)
                rhs = session.section(session.section(g, v1), v2)
                assert session.are_equal(lhs, rhs), (str(g), v1, v2)
                checks += 1
    return checks


def check_product_rule(session) -> int:
    """section(g h, x) == section(g, act(h, x)) * section(h, x)."""
    checks = 0
    gens = session.generators()
    pool = gens + [session.inverse(g) for g in gens]
    for g, h in itertools.product(pool, repeat=2):
        gh = session.multiply(g, h)
        for x in session.rec.alphabet.letters:
            lhs = session.section(gh, (x,))
            rhs = session.multiply(
                session.section(g, session.act(h, (x,))), session.section(h, (x,))
            )
            assert session.are_equal(lhs, rhs), (str(g), str(h), x)
            checks += 1
    return checks


def check_kappa_involution(session) -> int:
    """kappa_{g^-1} o kappa_g is the identity on every domain set."""
    nerve = build_nerve(compute_nucleus(session))
    maps = {nerve.gluings[i].gid: nerve.gluings[i] for i in range(len(nerve.gluings))}
    checks = 0
    for gid, gmap in maps.items():
        inv = maps[gmap.inverse_gid]
        for aset in gmap.domain:
            assert inv.mapping[gmap.mapping[aset]] == aset
            checks += 1
    return checks


def check_confluence(session, shuffles: int = 10) -> int:
    """Quotients do not depend on the identification processing order."""
    nerve = build_nerve(compute_nucleus(session))
    level1 = cutpaste_level(nerve, cutpaste_level0(nerve))
    seeds = kappa_seed_pairs(level1)
    base = quotient_complex(level1.tn, seeds)
    checks = 0
    for seed in range(shuffles):
        shuffled = list(seeds)
        random.Random(seed).shuffle(shuffled)
        other = quotient_complex(level1.tn, shuffled)
        assert other.cell_map == base.cell_map
        assert other.complex.f_vector() == base.complex.f_vector()
        checks += 1
    return checks


def random_recursion(rng: random.Random) -> WreathRecursion:
    d = rng.randint(2, 4)
    letters = tuple(str(i) for i in range(d))
    n_gens = rng.randint(1, 4)
    names = tuple(string.ascii_lowercase[i] for i in range(n_gens))
    rules = {}
    for name in names:
        perm = list(range(d))
        rng.shuffle(perm)
        sections = []
        for _ in range(d):
            raw = [
                (rng.choice(names), rng.choice((1, -1)))
                for _ in range(rng.randint(0, 3))
            ]
            sections.append(free_reduce(raw))
        rules[name] = GeneratorRule(perm=tuple(perm), sections=tuple(sections))
    return WreathRecursion(alphabet=Alphabet(letters), names=names, rules=rules)


def check_roundtrip_fuzz(cases: int = 10_000, seed: int = 20260809) -> int:
    """parse(print(r)) == r for randomly generated recursions."""
    rng = random.Random(seed)
    for _ in range(cases):
        rec = random_recursion(rng)
        assert parse_recursion(pretty_print(rec)) == rec
    return cases


# -- pytest wrappers -----------------------------------------------------------


def test_section_cocycle_torus(torus):
    assert check_section_cocycle(torus) > 0


def test_section_cocycle_adder(adder):
    assert check_section_cocycle(adder) > 0


def test_product_rule(torus, adder):
    assert check_product_rule(torus) == 16 * 2
    assert check_product_rule(adder) > 0


def test_kappa_involution(torus, adder):
    assert check_kappa_involution(torus) > 0
    assert check_kappa_involution(adder) > 0


def test_confluence(torus):
    assert check_confluence(torus) == 10


def test_roundtrip_fuzz_small():
    assert check_roundtrip_fuzz(cases=500) == 500


@settings(max_examples=300, deadline=None)
@given(
    st.text(
        alphabet=st.sampled_from(list("abuv01 =()[],^-1;\n#")),
        max_size=80,
    )
)
def test_parser_total_on_garbage(text):
    try:
        parse_recursion(text)
    except (ParseError, InvalidRecursion):
        pass


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_parser_total_on_mutated_valid_input(data):
    base = data.draw(st.sampled_from([TORUS, ADDER]))
    pos = data.draw(st.integers(min_value=0, max_value=len(base) - 1))
    char = data.draw(st.sampled_from(list("xy01()[],^-1;\n")))
    mutated = base[:pos] + char + base[pos + 1 :]
    try:
        parse_recursion(mutated)
    except (ParseError, InvalidRecursion):
        pass
