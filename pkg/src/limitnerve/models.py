"""Level-n approximations J_n by two independent routes.

Direct route: cells are right-translation orbit classes of the tiles
{(a(v), a|_v) : a in A} over adjacency sets A and words v; vertex classes
are the words of X^n, so the 1-skeleton is the level-n Schreier graph.

Cut-and-paste route: T_n is glued from |X| labeled copies of T_{n-1}
along the gluing maps with trivial section, the kappa maps are propagated
level by level, and J_n is the union-find quotient of T_n by them.

The two routes are reconciled by one barycentric subdivision per level
and cross-validated on Euler characteristic, mod-2 Betti numbers,
f-vectors and the Schreier skeleton.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .complexes import (
    CellComplex,
    barycentric_subdivide as _subdivide_complex,
    disjoint_copies,
    quotient_complex,
)
from .errors import ConsistencyError, ResourceLimitExceeded, ValidationFailure
from .nerve import (
    AdjacencySet,
    NerveData,
    restrict_ids,
    set_label,
    set_sort_key,
    translate_set,
)
from .nucleus import level_words, schreier_graph, word_label


@dataclass
class LeveledModel:
    level: int
    route: str  # "direct" | "cutpaste"
    complex: CellComplex
    vertex_words: list[str]
    p_map: list[int] | None = None
    iota_map: list[int] | None = None

    def to_json_dict(self) -> dict:
        return self.complex.to_json_dict(
            level=self.level,
            route=self.route,
            vertex_words=list(self.vertex_words),
            p_map=self.p_map,
            iota_map=self.iota_map,
        )


# ---------------------------------------------------------------------------
# Direct route: tile orbits


def tile_atoms(nerve: NerveData, aset: AdjacencySet, v: tuple[str, ...]):
    """Deduplicated atoms (a(v), a|_v) of the tile A (x) v."""
    nucleus = nerve.nucleus
    atoms = {(nucleus.act_word(a, v), nucleus.section_id(a, v)) for a in aset}
    return tuple(atoms)


def canonical_tile(nerve: NerveData, atoms):
    """Canonical right translate of an atom set: for each atom, translate so
    that it becomes pure, sort, and keep the least candidate.

    Raises ConsistencyError when the tile has a nontrivial right stabilizer
    (such a cell is not representable in an unsubdivided complex).
    """
    session = nerve.session

    def atom_key(atom):
        return (atom[0], session.sort_key(atom[1]))

    candidates = []
    for gid in sorted({g for _, g in atoms}):
        inv = session.inverse_id(gid)
        translated = tuple(
            sorted(
                ((w, session.multiply_ids(h, inv)) for w, h in atoms),
                key=atom_key,
            )
        )
        candidates.append(translated)
    best = min(candidates, key=lambda c: tuple(atom_key(a) for a in c))
    if candidates.count(best) > 1:
        raise ConsistencyError(
            "tile has a nontrivial stabilizer; direct quotient is not cellular"
        )
    return best


def direct_Jn(nerve: NerveData, n: int, max_vertices: int = 1 << 20) -> LeveledModel:
    """Unsubdivided J_n: vertices are the words of X^n, cells are canonical
    tile forms over all adjacency sets and words."""
    if n < 0:
        raise ValueError("level must be >= 0")
    alphabet = nerve.session.rec.alphabet
    if len(alphabet) ** n > max_vertices:
        raise ResourceLimitExceeded(f"level {n} exceeds {max_vertices} vertices")
    words = level_words(alphabet, n)
    cx = CellComplex()
    for v in words:
        cx.add_vertex(word_label(v), key=("w", v))
    by_dim: dict[int, dict] = {}
    sources: dict = {}
    for aset in nerve.sets:
        for v in words:
            atoms = tile_atoms(nerve, aset, v)
            canon = canonical_tile(nerve, atoms)
            dim = len(canon) - 1
            if dim >= 1:
                by_dim.setdefault(dim, {})
                if canon not in by_dim[dim]:
                    by_dim[dim][canon] = atoms
                    sources[canon] = (aset, v)
    session = nerve.session

    def canon_sort(c):
        return tuple((w, session.sort_key(g)) for w, g in c)

    for dim in sorted(by_dim):
        for canon in sorted(by_dim[dim], key=canon_sort):
            vertices = tuple(cx.index_of(0, ("w", w)) for w, _ in canon)
            faces = []
            for i in range(len(canon)):
                sub = canonical_tile(nerve, canon[:i] + canon[i + 1 :])
                if len(sub) == 1:
                    faces.append(cx.index_of(0, ("w", sub[0][0])))
                else:
                    faces.append(cx.index_of(len(sub) - 1, ("t", sub)))
            cx.add_cell(vertices, tuple(faces), key=("t", canon))
    model = LeveledModel(
        level=n, route="direct", complex=cx, vertex_words=[word_label(v) for v in words]
    )
    model.tile_sources = sources  # type: ignore[attr-defined]
    return model


def level_maps(model_up: LeveledModel, model_down: LeveledModel, nerve: NerveData):
    """Vertex maps p (drop the last letter) and iota (drop the first letter
    through the section map) between consecutive direct models.  Checks that
    both maps send cells to cells (iota possibly degenerating them) and
    attaches the maps to the upper model."""
    if model_up.route != "direct" or model_down.route != "direct":
        raise ValueError("level_maps expects models built by the direct route")
    if model_up.level != model_down.level + 1:
        raise ValueError("levels must be consecutive")
    alphabet = nerve.session.rec.alphabet
    up_words = level_words(alphabet, model_up.level)
    down_index = {w: i for i, w in enumerate(level_words(alphabet, model_down.level))}
    p_map = [down_index[v[:-1]] for v in up_words]
    iota_map = [down_index[v[1:]] for v in up_words]

    for dim in range(1, len(model_up.complex.cells)):
        for cell in model_up.complex.cells[dim]:
            aset, v = model_up.tile_sources[cell.key[1]]  # type: ignore[attr-defined]
            p_tile = canonical_tile(nerve, tile_atoms(nerve, aset, v[:-1]))
            if len(p_tile) > 1 and not model_down.complex.has_cell(
                len(p_tile) - 1, ("t", p_tile)
            ):
                raise ConsistencyError("p image of a cell is not a cell")
            x0 = alphabet.index(v[0])
            iota_set = restrict_ids(nerve.nucleus, aset, x0)
            iota_tile = canonical_tile(nerve, tile_atoms(nerve, iota_set, v[1:]))
            if len(iota_tile) > 1 and not model_down.complex.has_cell(
                len(iota_tile) - 1, ("t", iota_tile)
            ):
                raise ConsistencyError("iota image of a cell is not a cell")
    model_up.p_map = p_map
    model_up.iota_map = iota_map
    return p_map, iota_map


# ---------------------------------------------------------------------------
# Cut-and-paste route

VertexLabel = tuple  # (AdjacencySet, word tuple)


@dataclass
class CutPasteLevel:
    level: int
    tn: CellComplex
    vlabels: list[VertexLabel]  # canonical (A, v) per T_n vertex
    kappa: dict[int, dict[tuple[int, int], tuple[int, int]]]
    glue_trace: tuple = ()  # ((dim, key_src, key_dst), ...) copy gluings


def _label_key(nerve: NerveData, label: VertexLabel):
    aset, word = label
    return (word, set_sort_key(nerve.session, aset))


def cutpaste_level0(nerve: NerveData) -> CutPasteLevel:
    """Level-0 data: T_0 itself, kappa maps acting on chains."""
    t0 = nerve.t0
    kappa: dict[int, dict[tuple[int, int], tuple[int, int]]] = {}
    for gluing in nerve.gluings:
        cmap: dict[tuple[int, int], tuple[int, int]] = {}
        domain_indices = {nerve.set_index[s] for s in gluing.domain}
        for dim in range(len(t0.cells)):
            for idx, cell in enumerate(t0.cells[dim]):
                chain = cell.key if dim > 0 else (idx,)
                if not all(v in domain_indices for v in chain):
                    continue
                image_chain = tuple(
                    nerve.set_index[gluing.mapping[nerve.sets[v]]] for v in chain
                )
                if dim == 0:
                    cmap[(0, idx)] = (0, t0.index_of(0, (image_chain[0],)))
                else:
                    cmap[(dim, idx)] = (dim, t0.index_of(dim, image_chain))
        kappa[gluing.gid] = cmap
    vlabels = [(nerve.sets[i], ()) for i in range(len(nerve.sets))]
    return CutPasteLevel(level=0, tn=t0, vlabels=vlabels, kappa=kappa)


def cutpaste_level(nerve: NerveData, prev: CutPasteLevel) -> CutPasteLevel:
    """One level of the cut-and-paste recursion: glue |X| copies of T_{n-1}
    along the arrows with trivial section, then transport every kappa map."""
    nucleus = nerve.nucleus
    session = nerve.session
    letters = session.rec.alphabet.letters
    identity = nucleus.identity_id
    copies = disjoint_copies(prev.tn, letters)

    def copy_index(dim: int, idx: int, letter: str) -> int:
        return copies.index_of(dim, (prev.tn.cells[dim][idx].key, letter))

    seeds = []
    trace = []
    for gid, cmap in sorted(prev.kappa.items()):
        perm = nucleus.perm(gid)
        for xi, x in enumerate(letters):
            if nucleus.section_graph[(gid, xi)] != identity:
                continue
            gx = letters[perm[xi]]
            for (dim, idx), (_, jdx) in sorted(cmap.items()):
                a = copy_index(dim, idx, x)
                b = copy_index(dim, jdx, gx)
                seeds.append((dim, a, b))
                trace.append(
                    (dim, (prev.tn.cells[dim][idx].key, x), (prev.tn.cells[dim][jdx].key, gx))
                )

    label_best: dict[int, VertexLabel] = {}

    def vertex_label_of_copy(copy_idx: int) -> VertexLabel:
        key = copies.cells[0][copy_idx].key  # (prev vertex key, letter)
        prev_key, letter = key
        prev_idx = prev.tn.index_of(0, prev_key)
        aset, word = prev.vlabels[prev_idx]
        return (aset, word + (letter,))

    def label_fn(members):
        best = min(
            (vertex_label_of_copy(m) for m in members),
            key=lambda lab: _label_key(nerve, lab),
        )
        label_best[min(members)] = best
        return _vertex_label_text(nerve, best)

    q = quotient_complex(copies, seeds, label_fn=label_fn)
    tn = q.complex
    vlabels: list[VertexLabel] = [None] * len(tn.vertex_labels)  # type: ignore[list-item]
    for rep, new_idx in ((rep, q.cell_map[0][rep]) for rep in label_best):
        vlabels[new_idx] = label_best[rep]

    kappa: dict[int, dict[tuple[int, int], tuple[int, int]]] = {}
    for hid, cmap in sorted(prev.kappa.items()):
        perm = nucleus.perm(hid)
        for xi, x in enumerate(letters):
            target_gid = nucleus.section_graph[(hid, xi)]
            if target_gid == identity:
                continue
            hx = letters[perm[xi]]
            out = kappa.setdefault(target_gid, {})
            for (dim, idx), (_, jdx) in cmap.items():
                src = q.image(dim, copy_index(dim, idx, x))
                dst = q.image(dim, copy_index(dim, jdx, hx))
                prev_image = out.get((dim, src))
                if prev_image is not None and prev_image != (dim, dst):
                    raise ConsistencyError(
                        f"kappa_{target_gid} at level {prev.level + 1} is not "
                        f"well defined on cell ({dim}, {src})"
                    )
                out[(dim, src)] = (dim, dst)
    return CutPasteLevel(
        level=prev.level + 1,
        tn=tn,
        vlabels=vlabels,
        kappa=kappa,
        glue_trace=tuple(trace),
    )


def _vertex_label_text(nerve: NerveData, label: VertexLabel) -> str:
    aset, word = label
    text = set_label(nerve.session, aset)
    return text if not word else f"{word_label(word)}|{text}"


def canonical_orbit_label(nerve: NerveData, label: VertexLabel) -> VertexLabel:
    """Least element of the full translate orbit {(A.g^-1, g(v)) : g in A};
    this is the canonical name of a J_n vertex class."""
    aset, word = label
    nucleus = nerve.nucleus
    best = None
    for g in aset:
        cand = (translate_set(nerve.session, aset, g), nucleus.act_word(g, word))
        key = (cand[1], set_sort_key(nerve.session, cand[0]))
        if best is None or key < best[0]:
            best = (key, cand)
    return best[1]


@dataclass
class AssembledLevel:
    model: LeveledModel
    data: CutPasteLevel
    label_to_index: dict = field(default_factory=dict)


def kappa_seed_pairs(data: CutPasteLevel) -> list[tuple[int, int, int]]:
    """All (dim, source, target) cell identifications induced by the kappa
    maps of one level."""
    seeds = []
    for _gid, cmap in sorted(data.kappa.items()):
        for (dim, idx), (_, jdx) in sorted(cmap.items()):
            seeds.append((dim, idx, jdx))
    return seeds


def assemble_Jn(nerve: NerveData, data: CutPasteLevel, prev: AssembledLevel | None) -> AssembledLevel:
    """Union-find quotient of T_n by all kappa identifications, with the
    vertex maps p (drop last letter) and iota (consume the first letter
    through the section map) into the previous assembled level."""
    seeds = kappa_seed_pairs(data)

    canonical: dict[int, VertexLabel] = {}

    def label_fn(members):
        labels = [canonical_orbit_label(nerve, data.vlabels[m]) for m in members]
        if len(set(labels)) != 1:
            raise ConsistencyError("members of a J_n vertex class disagree")
        lab = labels[0]
        canonical[min(members)] = lab
        return _vertex_label_text(nerve, lab)

    q = quotient_complex(data.tn, seeds, label_fn=label_fn)
    label_to_index: dict[VertexLabel, int] = {}
    vertex_canonical: list[VertexLabel] = [None] * len(q.complex.vertex_labels)  # type: ignore[list-item]
    for rep, lab in canonical.items():
        new_idx = q.cell_map[0][rep]
        label_to_index[(lab[0], lab[1])] = new_idx
        vertex_canonical[new_idx] = lab

    p_map = None
    iota_map = None
    if prev is not None:
        p_map = []
        iota_map = []
        nucleus = nerve.nucleus
        for lab in vertex_canonical:
            aset, word = lab
            p_lab = canonical_orbit_label(nerve, (aset, word[:-1]))
            p_map.append(prev.label_to_index[p_lab])
            x0 = nerve.session.rec.alphabet.index(word[0])
            iota_set = restrict_ids(nucleus, aset, x0)
            iota_lab = canonical_orbit_label(nerve, (iota_set, word[1:]))
            iota_map.append(prev.label_to_index[iota_lab])

    model = LeveledModel(
        level=data.level,
        route="cutpaste",
        complex=q.complex,
        vertex_words=list(q.complex.vertex_labels),
        p_map=p_map,
        iota_map=iota_map,
    )
    return AssembledLevel(model=model, data=data, label_to_index=label_to_index)


def cutpaste_chain(nerve: NerveData, n: int) -> list[AssembledLevel]:
    """Assembled levels J_0 .. J_n via the cut-and-paste recursion."""
    levels = [cutpaste_level0(nerve)]
    for _ in range(n):
        levels.append(cutpaste_level(nerve, levels[-1]))
    assembled: list[AssembledLevel] = []
    for data in levels:
        prev = assembled[-1] if assembled else None
        assembled.append(assemble_Jn(nerve, data, prev))
    return assembled


# ---------------------------------------------------------------------------
# Homology wrappers and cross-validation


def euler(cx: CellComplex) -> int:
    return cx.euler()


def betti_mod2(cx: CellComplex) -> tuple[int, ...]:
    return cx.betti_mod2()


def barycentric_subdivide(cx: CellComplex) -> CellComplex:
    return _subdivide_complex(cx)


def _trim(values) -> tuple:
    out = list(values)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass
class CrossValidationReport:
    level: int
    euler_direct: int
    euler_cutpaste: int
    betti_direct: tuple[int, ...]
    betti_cutpaste: tuple[int, ...]
    f_cutpaste: tuple[int, ...]
    f_subdivided_direct: tuple[int, ...]
    skeleton_ok: bool

    def summary(self) -> str:
        return (
            f"level {self.level}: euler {self.euler_direct}=={self.euler_cutpaste}, "
            f"betti {self.betti_direct}=={self.betti_cutpaste}, "
            f"f {self.f_cutpaste}=={self.f_subdivided_direct}, "
            f"skeleton {'ok' if self.skeleton_ok else 'MISMATCH'}"
        )


def cross_validate(
    nerve: NerveData,
    n: int,
    direct: LeveledModel | None = None,
    cutpaste: AssembledLevel | None = None,
) -> CrossValidationReport:
    """Compare the two J_n routes; raises ValidationFailure on any mismatch."""
    direct = direct or direct_Jn(nerve, n)
    if cutpaste is None:
        cutpaste = cutpaste_chain(nerve, n)[-1]
    dcx = direct.complex
    ccx = cutpaste.model.complex

    if dcx.euler() != ccx.euler():
        raise ValidationFailure(
            f"Euler characteristics differ at level {n}: "
            f"direct {dcx.euler()}, cut-and-paste {ccx.euler()}",
            witness=("euler", dcx.euler(), ccx.euler()),
        )
    bd, bc = _trim(dcx.betti_mod2()), _trim(ccx.betti_mod2())
    if bd != bc:
        raise ValidationFailure(
            f"mod-2 Betti numbers differ at level {n}: direct {bd}, cut-and-paste {bc}",
            witness=("betti", bd, bc),
        )
    sd = barycentric_subdivide(dcx)
    if sd.f_vector() != ccx.f_vector():
        raise ValidationFailure(
            f"f-vector of cut-and-paste J_{n} {ccx.f_vector()} differs from "
            f"subdivided direct {sd.f_vector()}",
            witness=("f_vector", ccx.f_vector(), sd.f_vector()),
        )
    graph = schreier_graph(nerve.nucleus, n)
    schreier_edges = frozenset(
        frozenset((word_label(a), word_label(b)))
        for a, b, _ in graph.arrows
        if a != b
    )
    direct_edges = dcx.simple_edges()
    skeleton_ok = schreier_edges == direct_edges
    if not skeleton_ok:
        diff = schreier_edges.symmetric_difference(direct_edges)
        raise ValidationFailure(
            f"level-{n} one-skeleton differs from the Schreier graph",
            witness=("skeleton", sorted(tuple(sorted(e)) for e in diff)[:3]),
        )
    return CrossValidationReport(
        level=n,
        euler_direct=dcx.euler(),
        euler_cutpaste=ccx.euler(),
        betti_direct=bd,
        betti_cutpaste=bc,
        f_cutpaste=ccx.f_vector(),
        f_subdivided_direct=sd.f_vector(),
        skeleton_ok=skeleton_ok,
    )
