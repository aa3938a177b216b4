from __future__ import annotations

import itertools

import pytest

from limitnerve import Session, parse_recursion
from limitnerve.models import (
    barycentric_subdivide,
    betti_mod2,
    canonical_orbit_label,
    canonical_tile,
    cross_validate,
    cutpaste_chain,
    cutpaste_level,
    cutpaste_level0,
    direct_Jn,
    euler,
    level_maps,
    tile_atoms,
)
from limitnerve.nerve import build_nerve
from limitnerve.nucleus import compute_nucleus, level_words

from .conftest import TRIVIAL


@pytest.fixture()
def torus_nerve(torus):
    return build_nerve(compute_nucleus(torus))


@pytest.fixture()
def adder_nerve(adder):
    return build_nerve(compute_nucleus(adder))


# -- direct route ------------------------------------------------------------


def test_direct_j0_torus(torus_nerve):
    model = direct_Jn(torus_nerve, 0)
    assert model.complex.f_vector() == (1, 3, 2)
    assert euler(model.complex) == 0
    assert betti_mod2(model.complex) == (1, 2, 1)


def test_direct_j1_torus(torus_nerve):
    model = direct_Jn(torus_nerve, 1)
    assert model.vertex_words == ["0", "1"]
    assert model.complex.f_vector() == (2, 6, 4)
    assert euler(model.complex) == 0
    assert betti_mod2(model.complex) == (1, 2, 1)


def test_direct_torus_levels_are_tori(torus_nerve):
    for n in range(4):
        model = direct_Jn(torus_nerve, n)
        assert euler(model.complex) == 0
        assert betti_mod2(model.complex) == (1, 2, 1)
        assert model.complex.n_components() == 1


def test_direct_adder_is_cycle(adder_nerve):
    for n in range(7):
        model = direct_Jn(adder_nerve, n)
        assert model.complex.f_vector() == (2**n, 2**n)
        assert betti_mod2(model.complex) == (1, 1)
        assert model.complex.n_components() == 1


def test_canonical_tile_contains_pure_atom(torus_nerve):
    identity = torus_nerve.nucleus.identity_id
    for aset in torus_nerve.sets:
        for v in level_words(torus_nerve.session.rec.alphabet, 2):
            canon = canonical_tile(torus_nerve, tile_atoms(torus_nerve, aset, v))
            assert any(g == identity for _, g in canon)


def test_tile_intersection_coherence(torus_nerve):
    # atoms share a cell only when a nucleus element carries one to the other
    nucleus = torus_nerve.nucleus
    session = torus_nerve.session
    for n in range(4):
        model = direct_Jn(torus_nerve, n)
        for dim in range(1, len(model.complex.cells)):
            for cell in model.complex.cells[dim]:
                atoms = cell.key[1]
                for (v1, g1), (v2, g2) in itertools.permutations(atoms, 2):
                    assert any(
                        nucleus.act_word(h, v1) == v2
                        and session.multiply_ids(nucleus.section_id(h, v1), g1) == g2
                        for h in nucleus.ids
                    )


def test_level_maps_direct(torus_nerve, adder_nerve):
    m2 = direct_Jn(torus_nerve, 2)
    m1 = direct_Jn(torus_nerve, 1)
    p, iota = level_maps(m2, m1, torus_nerve)
    assert len(p) == 4
    for target in range(2):
        assert sum(1 for t in p if t == target) == 2  # |X|-to-1
    m1a = direct_Jn(adder_nerve, 1)
    m0a = direct_Jn(adder_nerve, 0)
    p, iota = level_maps(m1a, m0a, adder_nerve)
    assert p == [0, 0] and iota == [0, 0]


def test_level_maps_p_covers_edges(adder_nerve):
    up = direct_Jn(adder_nerve, 4)
    down = direct_Jn(adder_nerve, 3)
    p, _ = level_maps(up, down, adder_nerve)
    down_edges = {tuple(sorted(c.vertices)) for c in down.complex.cells[1]}
    for cell in up.complex.cells[1]:
        image = tuple(sorted(p[v] for v in cell.vertices))
        assert image[0] == image[1] or image in down_edges


# -- cut-and-paste route -------------------------------------------------------


def test_cutpaste_level0_matches_nerve(torus_nerve):
    level0 = cutpaste_level0(torus_nerve)
    assert level0.tn.f_vector() == (13, 24, 12)
    # kappa_g domains are the hexagon sides: 3 vertices + 2 edges each
    for cmap in level0.kappa.values():
        dims = sorted(dim for dim, _ in cmap)
        assert dims == [0, 0, 0, 1, 1]


def test_cutpaste_t1_torus_two_copies_two_edges(torus_nerve):
    level0 = cutpaste_level0(torus_nerve)
    level1 = cutpaste_level(torus_nerve, level0)
    assert level1.tn.f_vector() == (23, 46, 24)
    merged_edges = {frozenset((a, b)) for dim, a, b in level1.glue_trace if dim == 1}
    merged_vertices = {frozenset((a, b)) for dim, a, b in level1.glue_trace if dim == 0}
    assert len(merged_edges) == 2
    assert len(merged_vertices) == 3
    # the gluing identifies cells of copy "0" with cells of copy "1"
    for pair in merged_edges | merged_vertices:
        tags = sorted(key[1] for key in pair)
        assert tags == ["0", "1"]


def test_cutpaste_adder_t1_path_j1_cycle(adder_nerve):
    level0 = cutpaste_level0(adder_nerve)
    level1 = cutpaste_level(adder_nerve, level0)
    assert level1.tn.f_vector() == (5, 4)
    assert level1.tn.betti_mod2() == (1, 0)
    chain = cutpaste_chain(adder_nerve, 1)
    j1 = chain[1].model.complex
    assert j1.f_vector() == (4, 4)
    assert j1.betti_mod2() == (1, 1)


def test_cutpaste_chain_torus_eulers(torus_nerve):
    chain = cutpaste_chain(torus_nerve, 3)
    assert chain[0].model.complex.f_vector() == (6, 18, 12)
    for lvl in chain:
        assert lvl.model.complex.euler() == 0
        assert lvl.model.complex.betti_mod2() == (1, 2, 1)


def test_cutpaste_trivial_nucleus_disjoint_copies():
    session = Session(parse_recursion(TRIVIAL))
    nerve = build_nerve(compute_nucleus(session))
    chain = cutpaste_chain(nerve, 2)
    assert chain[2].model.complex.f_vector() == (4,)
    assert chain[2].model.complex.n_components() == 4


def test_cutpaste_vertex_count_matches_orbit_oracle(torus_nerve):
    # number of distinct canonical orbit labels over sets x X^n
    for n in range(3):
        chain = cutpaste_chain(torus_nerve, n)
        labels = set()
        for aset in torus_nerve.sets:
            for v in level_words(torus_nerve.session.rec.alphabet, n):
                labels.add(canonical_orbit_label(torus_nerve, (aset, v)))
        assert len(labels) == len(chain[n].model.complex.vertex_labels)


def test_cutpaste_p_and_iota(torus_nerve):
    chain = cutpaste_chain(torus_nerve, 2)
    j1, j2 = chain[1].model, chain[2].model
    assert j1.p_map is not None and len(j1.p_map) == len(j1.vertex_words)
    assert max(j1.p_map) < len(chain[0].model.vertex_words)
    assert j2.iota_map is not None
    assert max(j2.iota_map) < len(j1.vertex_words)
    assert chain[0].model.p_map is None


def test_iota_level1_collapses_to_single_vertex(adder_nerve):
    chain = cutpaste_chain(adder_nerve, 1)
    # J_0 of the adding machine is a circle with 2 vertices; iota lands on both
    assert set(chain[1].model.iota_map) <= {0, 1}


# -- subdivision and cross-validation -----------------------------------------


def test_subdivide_reconciles_routes_level0(adder_nerve):
    direct = direct_Jn(adder_nerve, 0)
    assert direct.complex.f_vector() == (1, 1)  # a single loop
    sd = barycentric_subdivide(direct.complex)
    assert sd.f_vector() == (2, 2)
    assert sd.f_vector() == cutpaste_chain(adder_nerve, 0)[0].model.complex.f_vector()


def test_cross_validate_torus(torus_nerve):
    chain = cutpaste_chain(torus_nerve, 3)
    for n in range(4):
        report = cross_validate(torus_nerve, n, cutpaste=chain[n])
        assert report.skeleton_ok
        assert report.euler_direct == report.euler_cutpaste == 0


def test_cross_validate_adder(adder_nerve):
    chain = cutpaste_chain(adder_nerve, 6)
    for n in range(7):
        report = cross_validate(adder_nerve, n, cutpaste=chain[n])
        assert report.betti_direct == (1, 1)
        assert report.f_cutpaste == report.f_subdivided_direct


def test_cross_validate_trivial():
    session = Session(parse_recursion(TRIVIAL))
    nerve = build_nerve(compute_nucleus(session))
    report = cross_validate(nerve, 2)
    assert report.euler_direct == report.euler_cutpaste == 4
