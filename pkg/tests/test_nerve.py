from __future__ import annotations

import itertools

import pytest

from limitnerve import Session, parse_recursion
from limitnerve.nerve import (
    adjacency_graph,
    adjacency_sets,
    assemble_J0,
    build_nerve,
    canonical_vertex_label,
    fundamental_domain_T0,
    gluing_maps,
    restrict_ids,
    restrict_set,
    rips_candidates,
    set_label,
    translate_set,
)
from limitnerve.nucleus import compute_nucleus

from .conftest import TRIVIAL
from .oracles import orbit_f_vector

# the 12 restriction equalities of the torus example
TORUS_TABLE = [
    ("1, u, u v", "0", "1, v"),
    ("1, u, u v", "1", "1, u v, v"),
    ("1, v, u v", "0", "1, u^-1, v"),
    ("1, v, u v", "1", "1, v"),
    ("1, u^-1, u^-1 v^-1", "0", "1, v^-1, u^-1 v^-1"),
    ("1, u^-1, u^-1 v^-1", "1", "1, v^-1"),
    ("1, v^-1, u^-1 v^-1", "0", "1, v^-1"),
    ("1, v^-1, u^-1 v^-1", "1", "1, u, v^-1"),
    ("1, u, v^-1", "0", "1, v^-1"),
    ("1, u, v^-1", "1", "1, u, u v"),
    ("1, u^-1, v", "0", "1, u^-1, u^-1 v^-1"),
    ("1, u^-1, v", "1", "1, v"),
]

TORUS_MAXIMAL = [
    "1, u, u v",
    "1, v, u v",
    "1, u^-1, u^-1 v^-1",
    "1, v^-1, u^-1 v^-1",
    "1, u, v^-1",
    "1, u^-1, v",
]


def ids_of(session, texts: str) -> frozenset[int]:
    return frozenset(
        session.classify(session.element_from_string(t)) for t in texts.split(",")
    )


def test_restriction_table(torus):
    for source, letter, target in TORUS_TABLE:
        elements = {torus.element_from_string(t) for t in source.split(",")}
        expected = {torus.element_from_string(t) for t in target.split(",")}
        got = restrict_set(torus, elements, letter)
        assert len(got) == len(expected)
        for e in expected:
            assert any(torus.are_equal(e, g) for g in got), (source, letter, str(e))


def test_restrict_singleton_identity(torus):
    for letter in "01":
        got = restrict_set(torus, {torus.identity}, letter)
        assert got == {torus.identity}


def test_rips_candidates_torus(torus):
    nucleus = compute_nucleus(torus)
    candidates = rips_candidates(nucleus)
    assert len(candidates) == 13  # {1}, 6 pairs, 6 triples
    sizes = sorted(len(c) for c in candidates)
    assert sizes == [1] + [2] * 6 + [3] * 6


def test_adjacency_graph_adder(adder):
    nucleus = compute_nucleus(adder)
    graph = adjacency_graph(nucleus)
    one = ids_of(adder, "1")
    pair_a = ids_of(adder, "1, a")
    pair_ainv = ids_of(adder, "1, a^-1")
    assert set(graph.nodes) == {one, pair_a, pair_ainv}
    assert graph.arrows[pair_a] == (one, pair_a)  # a|_0 = 1, a|_1 = a
    assert graph.arrows[one] == (one, one)


def test_adjacency_sets_adder(adder):
    nucleus = compute_nucleus(adder)
    family = adjacency_sets(nucleus)
    assert set(family.sets) == {
        ids_of(adder, "1"),
        ids_of(adder, "1, a"),
        ids_of(adder, "1, a^-1"),
    }
    assert family.diagnostics == ()


def test_adjacency_sets_torus(torus):
    nucleus = compute_nucleus(torus)
    family = adjacency_sets(nucleus)
    assert len(family.sets) == 13
    assert ids_of(torus, "1") in family.sets
    expected_maximal = {ids_of(torus, text) for text in TORUS_MAXIMAL}
    assert set(family.maximal) == expected_maximal
    assert family.diagnostics == ()


def test_adjacency_sets_closed_under_restriction(torus):
    nucleus = compute_nucleus(torus)
    family = adjacency_sets(nucleus)
    pool = set(family.sets)
    for aset in family.sets:
        for x in range(2):
            assert restrict_ids(nucleus, aset, x) in pool


def test_t0_torus_is_subdivided_hexagon(torus):
    nucleus = compute_nucleus(torus)
    family = adjacency_sets(nucleus)
    t0 = fundamental_domain_T0(torus, family.sets)
    assert t0.f_vector() == (13, 24, 12)
    assert t0.euler() == 1
    assert t0.betti_mod2() == (1, 0, 0)


def test_t0_adder_is_path(adder):
    nucleus = compute_nucleus(adder)
    family = adjacency_sets(nucleus)
    t0 = fundamental_domain_T0(adder, family.sets)
    assert t0.f_vector() == (3, 2)
    assert t0.vertex_labels[0] == "{1}"


def test_t0_single_set():
    session = Session(parse_recursion(TRIVIAL))
    nucleus = compute_nucleus(session)
    family = adjacency_sets(nucleus)
    t0 = fundamental_domain_T0(session, family.sets)
    assert t0.f_vector() == (1,)


def test_gluing_maps_torus(torus):
    nucleus = compute_nucleus(torus)
    family = adjacency_sets(nucleus)
    maps = gluing_maps(nucleus, family.sets)
    assert len(maps) == 6
    by_gid = {m.gid: m for m in maps}
    u = torus.classify(torus.generator("u"))
    ku = by_gid[u]
    assert ku.mapping[ids_of(torus, "1, u")] == ids_of(torus, "1, u^-1")
    assert ku.mapping[ids_of(torus, "1, u, u v")] == ids_of(torus, "1, u^-1, v")


def test_gluing_pairs_and_involution(torus):
    nucleus = compute_nucleus(torus)
    family = adjacency_sets(nucleus)
    maps = {m.gid: m for m in gluing_maps(nucleus, family.sets)}
    for gid, gmap in maps.items():
        inv_map = maps[gmap.inverse_gid]
        for aset in gmap.domain:
            image = gmap.mapping[aset]
            # kappa_g on {1, g} yields {1, g^-1}
            assert nucleus.inverse_map[gid] in image
            assert inv_map.mapping[image] == aset
        # order preserving
        for a, b in itertools.combinations(gmap.domain, 2):
            if a < b:
                assert gmap.mapping[a] < gmap.mapping[b]


def test_translate_invariance(torus):
    nucleus = compute_nucleus(torus)
    family = adjacency_sets(nucleus)
    pool = set(family.sets)
    for aset in family.sets:
        for g in aset:
            assert translate_set(torus, aset, g) in pool


def test_j0_torus_is_torus(torus):
    nucleus = compute_nucleus(torus)
    nerve = build_nerve(nucleus)
    j0 = nerve.j0.complex
    assert j0.f_vector() == (6, 18, 12)
    assert j0.euler() == 0
    assert j0.betti_mod2() == (1, 2, 1)
    assert j0.n_components() == 1
    # orbit-enumeration oracle
    assert list(j0.f_vector()) == orbit_f_vector(torus, nerve.sets)


def test_j0_adder_is_circle(adder):
    nucleus = compute_nucleus(adder)
    nerve = build_nerve(nucleus)
    j0 = nerve.j0.complex
    assert j0.f_vector() == (2, 2)
    assert j0.betti_mod2() == (1, 1)
    assert list(j0.f_vector()) == orbit_f_vector(adder, nerve.sets)


def test_j0_trivial_nucleus_equals_t0():
    session = Session(parse_recursion(TRIVIAL))
    nucleus = compute_nucleus(session)
    nerve = build_nerve(nucleus)
    assert nerve.j0.complex.f_vector() == nerve.t0.f_vector()


def test_canonical_vertex_labels(torus):
    nucleus = compute_nucleus(torus)
    nerve = build_nerve(nucleus)
    labels = nerve.j0.complex.vertex_labels
    assert len(labels) == len(set(labels)) == 6
    assert "{1}" in labels
    # the pair class {1,u} ~ {1,u^-1} is labeled by its least translate
    pair = ids_of(torus, "1, u")
    assert canonical_vertex_label(torus, pair) in labels


def test_euler_two_ways(torus):
    nucleus = compute_nucleus(torus)
    nerve = build_nerve(nucleus)
    for cx in (nerve.t0, nerve.j0.complex):
        f = cx.f_vector()
        two_skeleton = f[0] - f[1] + (f[2] if len(f) > 2 else 0)
        assert cx.euler() == two_skeleton
        betti = cx.betti_mod2()
        assert cx.euler() == sum((-1) ** k * b for k, b in enumerate(betti))
