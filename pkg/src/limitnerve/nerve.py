"""Tiling-nerve data: adjacency sets, fundamental domain T_0, gluing maps
and the quotient complex J_0.

Adjacency sets are subsets of the nucleus containing the identity that
pass the cycle-reachability criterion in the subset-restriction graph.
Candidates are pre-filtered by the Rips condition (pairwise differences in
the nucleus); the unfiltered criterion is run as a diagnostic when the
power set is small enough.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .complexes import CellComplex, Quotient, order_complex, quotient_complex
from .engine import Element, Session
from .errors import ConsistencyError, ResourceLimitExceeded
from .graphs import eventual_range
from .nucleus import Nucleus
from .recursion import format_word

AdjacencySet = frozenset  # of canonical element ids; always contains the identity


def restrict_ids(nucleus: Nucleus, aset: AdjacencySet, letter_idx: int) -> AdjacencySet:
    """Elementwise section of a subset of the nucleus at one letter."""
    return frozenset(nucleus.section_graph[(m, letter_idx)] for m in aset)


def restrict_set(session: Session, elements, letter: str) -> set[Element]:
    """Elementwise section of a set of elements, deduplicated by equality."""
    ids = {session.classify(session.section(g, (letter,))) for g in elements}
    return {session.rep(cid) for cid in ids}


def set_sort_key(session: Session, aset: AdjacencySet):
    return (len(aset), tuple(sorted(session.sort_key(m) for m in aset)))


def set_label(session: Session, aset: AdjacencySet) -> str:
    words = [format_word(session.rep(m).word) for m in sorted(aset, key=session.sort_key)]
    return "{" + ",".join(words) + "}"


def translate_set(session: Session, aset: AdjacencySet, gid: int) -> AdjacencySet:
    """Right translate A . g^-1."""
    inv = session.inverse_id(gid)
    return frozenset(session.multiply_ids(m, inv) for m in aset)


@dataclass(frozen=True)
class AdjacencyGraph:
    nodes: tuple[AdjacencySet, ...]
    arrows: dict[AdjacencySet, tuple[AdjacencySet, ...]]  # one target per letter


def rips_candidates(nucleus: Nucleus, max_exponent: int = 22) -> list[AdjacencySet]:
    """Subsets of N containing 1 whose pairwise differences lie in N.

    These are the simplices of the Rips complex containing the identity:
    {1} together with the cliques of the difference graph on N \\ {1}.
    """
    session = nucleus.session
    others = list(nucleus.nontrivial_ids())
    if len(others) > max_exponent:
        raise ResourceLimitExceeded(
            f"nucleus too large for subset enumeration ({len(others)} non-identity elements)"
        )
    in_nucleus = set(nucleus.ids)
    adj: dict[int, set[int]] = {g: set() for g in others}
    for g, h in itertools.combinations(others, 2):
        if session.multiply_ids(g, session.inverse_id(h)) in in_nucleus:
            adj[g].add(h)
            adj[h].add(g)

    cliques: list[frozenset] = []

    def extend(clique: frozenset, candidates: set[int]):
        cliques.append(clique)
        for g in sorted(candidates):
            extend(clique | {g}, {h for h in candidates if h > g and h in adj[g]})

    extend(frozenset(), set(others))
    identity = nucleus.identity_id
    return [clique | {identity} for clique in cliques]


def adjacency_graph(nucleus: Nucleus, nodes=None) -> AdjacencyGraph:
    """Directed graph A -> A|_x on candidate subsets (Rips-filtered by default)."""
    if nodes is None:
        nodes = rips_candidates(nucleus)
    d = len(nucleus.session.rec.alphabet)
    arrows = {}
    node_set = set(nodes)
    for node in nodes:
        targets = tuple(restrict_ids(nucleus, node, x) for x in range(d))
        for t in targets:
            if t not in node_set:
                raise ConsistencyError(
                    "restriction left the candidate family; nucleus data inconsistent"
                )
        arrows[node] = targets
    session = nucleus.session
    ordered = tuple(sorted(nodes, key=lambda s: set_sort_key(session, s)))
    return AdjacencyGraph(nodes=ordered, arrows=arrows)


@dataclass(frozen=True)
class AdjacencyFamily:
    sets: tuple[AdjacencySet, ...]  # sorted by (size, member keys)
    maximal: tuple[AdjacencySet, ...]
    # candidates passing cycle-reachability over the full power set but
    # failing the Rips pre-filter; expected empty
    diagnostics: tuple[AdjacencySet, ...] = ()


def adjacency_sets(nucleus: Nucleus, check_all_subsets: bool | None = None) -> AdjacencyFamily:
    """All adjacency sets containing 1: nodes of the restriction graph on
    or reachable from a directed cycle (self-loops count)."""
    session = nucleus.session
    graph = adjacency_graph(nucleus)
    good = eventual_range(graph.nodes, lambda n: graph.arrows[n])
    sets = tuple(sorted(good, key=lambda s: set_sort_key(session, s)))

    diagnostics: list[AdjacencySet] = []
    if check_all_subsets is None:
        check_all_subsets = len(nucleus) - 1 <= 12
    if check_all_subsets:
        others = list(nucleus.nontrivial_ids())
        identity = nucleus.identity_id
        all_nodes = [
            frozenset(c) | {identity}
            for r in range(len(others) + 1)
            for c in itertools.combinations(others, r)
        ]
        full = adjacency_graph(nucleus, nodes=all_nodes)
        full_good = eventual_range(full.nodes, lambda n: full.arrows[n])
        diagnostics = sorted(
            full_good - set(sets), key=lambda s: set_sort_key(session, s)
        )

    maximal = tuple(
        s for s in sets if not any(s < t for t in sets)
    )
    return AdjacencyFamily(sets=sets, maximal=maximal, diagnostics=tuple(diagnostics))


def fundamental_domain_T0(session: Session, sets) -> CellComplex:
    """Order complex of the inclusion poset of the adjacency sets."""
    labels = [set_label(session, s) for s in sets]
    return order_complex(list(sets), lambda a, b: a < b, labels)


@dataclass(frozen=True)
class GluingMap:
    gid: int
    inverse_gid: int
    domain: tuple[AdjacencySet, ...]  # adjacency sets containing gid
    mapping: dict[AdjacencySet, AdjacencySet] = field(compare=False)


def gluing_maps(nucleus: Nucleus, sets) -> list[GluingMap]:
    """For each non-identity nucleus element g, the translation A -> A.g^-1
    on the sub-poset of adjacency sets containing g."""
    session = nucleus.session
    set_pool = set(sets)
    maps = []
    for gid in nucleus.nontrivial_ids():
        domain = tuple(s for s in sets if gid in s)
        mapping = {}
        for aset in domain:
            image = translate_set(session, aset, gid)
            if image not in set_pool:
                raise ConsistencyError(
                    f"translate of {set_label(session, aset)} by inverse of "
                    f"{format_word(session.rep(gid).word)} is not an adjacency set"
                )
            mapping[aset] = image
        maps.append(
            GluingMap(
                gid=gid,
                inverse_gid=nucleus.inverse_map[gid],
                domain=domain,
                mapping=mapping,
            )
        )
    return maps


def canonical_vertex_label(session: Session, aset: AdjacencySet) -> str:
    """Lexicographically least right translate A.g^-1 over g in A."""
    best = min(
        (translate_set(session, aset, g) for g in aset),
        key=lambda s: set_sort_key(session, s),
    )
    return set_label(session, best)


def assemble_J0(session: Session, sets, t0: CellComplex, gluings) -> Quotient:
    """Quotient of T_0 by all kappa_g identifications (union-find on cells,
    seeded by the simplicial action of each gluing map on chains)."""
    set_index = {s: i for i, s in enumerate(sets)}
    seeds = []
    for gluing in gluings:
        domain_indices = {set_index[s] for s in gluing.domain}
        for dim in range(len(t0.cells)):
            for idx, cell in enumerate(t0.cells[dim]):
                chain = cell.key if dim > 0 else (cell.key[0],)
                if not all(v in domain_indices for v in chain):
                    continue
                image_chain = tuple(
                    set_index[gluing.mapping[sets[v]]] for v in chain
                )
                if dim == 0:
                    target = t0.index_of(0, (image_chain[0],))
                else:
                    target = t0.index_of(dim, image_chain)
                seeds.append((dim, idx, target))
    sets_list = list(sets)

    def label_fn(members):
        return canonical_vertex_label(session, sets_list[min(members)])

    return quotient_complex(t0, seeds, label_fn=label_fn)


@dataclass
class NerveData:
    """Everything the level constructions need from the nerve stage."""

    session: Session
    nucleus: Nucleus
    family: AdjacencyFamily
    sets: tuple[AdjacencySet, ...]
    set_index: dict[AdjacencySet, int]
    t0: CellComplex
    gluings: list[GluingMap]
    j0: Quotient


def build_nerve(nucleus: Nucleus) -> NerveData:
    session = nucleus.session
    family = adjacency_sets(nucleus)
    sets = family.sets
    t0 = fundamental_domain_T0(session, sets)
    gluings = gluing_maps(nucleus, sets)
    j0 = assemble_J0(session, sets, t0, gluings)
    return NerveData(
        session=session,
        nucleus=nucleus,
        family=family,
        sets=sets,
        set_index={s: i for i, s in enumerate(sets)},
        t0=t0,
        gluings=gluings,
        j0=j0,
    )
