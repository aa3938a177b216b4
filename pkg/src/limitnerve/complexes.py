"""Cell complexes with explicit face structure, quotients and homology.

Quotients of simplicial complexes by vertex identifications routinely
produce parallel cells (two edges on the same vertex pair) and cells with
repeated vertices (loops), so complexes are stored with one record per
cell and explicit facet links rather than as families of vertex sets.
Plain simplicial complexes are the special case where cells are keyed by
their vertex sets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import ConsistencyError


class UnionFind:
    def __init__(self):
        self._parent: dict = {}

    def add(self, key) -> None:
        if key not in self._parent:
            self._parent[key] = key

    def find(self, key):
        self.add(key)
        root = key
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[key] != root:
            self._parent[key], key = root, self._parent[key]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self._parent[rb] = ra
        return True

    def classes(self) -> dict:
        out: dict = {}
        for key in self._parent:
            out.setdefault(self.find(key), []).append(key)
        for members in out.values():
            members.sort()
        return out


@dataclass(frozen=True)
class Cell:
    vertices: tuple[int, ...]  # one vertex index per slot, len = dim + 1
    faces: tuple[int, ...]  # faces[i] = index of the facet dropping slot i
    key: object

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1


class CellComplex:
    def __init__(self):
        self.vertex_labels: list[str] = []
        self.cells: list[list[Cell]] = [[]]
        self._index: list[dict] = [{}]
        self.provenance: tuple = ()

    # -- construction --------------------------------------------------------

    def add_vertex(self, label: str, key=None) -> int:
        idx = len(self.vertex_labels)
        if key is None:
            key = ("v", idx)
        self.vertex_labels.append(label)
        cell = Cell(vertices=(idx,), faces=(), key=key)
        self.cells[0].append(cell)
        if key in self._index[0]:
            raise ConsistencyError(f"duplicate vertex key {key!r}")
        self._index[0][key] = idx
        return idx

    def add_cell(self, vertices: tuple[int, ...], faces: tuple[int, ...], key) -> int:
        dim = len(vertices) - 1
        if dim < 1 or len(faces) != dim + 1:
            raise ConsistencyError("cell needs dim >= 1 and dim+1 facets")
        while len(self.cells) <= dim:
            self.cells.append([])
            self._index.append({})
        for i, f in enumerate(faces):
            facet = self.cells[dim - 1][f]
            expected = vertices[:i] + vertices[i + 1 :]
            if facet.vertices != expected:
                raise ConsistencyError(
                    f"facet {i} of cell {key!r} has vertices {facet.vertices}, "
                    f"expected {expected}"
                )
        if key in self._index[dim]:
            raise ConsistencyError(f"duplicate cell key {key!r}")
        idx = len(self.cells[dim])
        self.cells[dim].append(Cell(vertices=vertices, faces=faces, key=key))
        self._index[dim][key] = idx
        return idx

    def index_of(self, dim: int, key) -> int:
        return self._index[dim][key]

    def has_cell(self, dim: int, key) -> bool:
        return dim < len(self._index) and key in self._index[dim]

    # -- basic invariants ----------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.cells) - 1

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(layer) for layer in self.cells)

    def euler(self) -> int:
        return sum((-1) ** d * len(layer) for d, layer in enumerate(self.cells))

    def n_components(self) -> int:
        uf = UnionFind()
        for v in range(len(self.vertex_labels)):
            uf.add(v)
        for cell in self.cells[1] if len(self.cells) > 1 else []:
            uf.union(cell.vertices[0], cell.vertices[1])
        return len(uf.classes()) if self.vertex_labels else 0

    def one_cells(self) -> list[tuple[int, int]]:
        """Vertex index pairs of all 1-cells (sorted inside, loops kept)."""
        if len(self.cells) < 2:
            return []
        return [tuple(sorted(c.vertices)) for c in self.cells[1]]

    def simple_edges(self) -> frozenset:
        """Undirected simple edge set on vertex labels, loops dropped."""
        out = set()
        for a, b in self.one_cells():
            if a != b:
                out.add(frozenset((self.vertex_labels[a], self.vertex_labels[b])))
        return frozenset(out)

    def validate(self) -> None:
        for dim in range(1, len(self.cells)):
            for cell in self.cells[dim]:
                if len(cell.vertices) != dim + 1 or len(cell.faces) != dim + 1:
                    raise ConsistencyError("malformed cell")
                for i, f in enumerate(cell.faces):
                    facet = self.cells[dim - 1][f]
                    if facet.vertices != cell.vertices[:i] + cell.vertices[i + 1 :]:
                        raise ConsistencyError("facet vertices inconsistent")

    # -- homology ------------------------------------------------------------

    def betti_mod2(self) -> tuple[int, ...]:
        """Mod-2 Betti numbers via ranks of the boundary operators."""
        ranks = [0] * (len(self.cells) + 1)
        for k in range(1, len(self.cells)):
            columns = []
            for cell in self.cells[k]:
                mask = 0
                for f in cell.faces:
                    mask ^= 1 << f
                columns.append(mask)
            ranks[k] = _rank_gf2(columns)
        betti = []
        for k, layer in enumerate(self.cells):
            betti.append(len(layer) - ranks[k] - ranks[k + 1])
        return tuple(betti)

    # -- exports ---------------------------------------------------------------

    def to_json_dict(self, **extra) -> dict:
        simplices = sorted(sorted(cell.vertices) for layer in self.cells for cell in layer)
        data = {
            "vertices": list(self.vertex_labels),
            "simplices": simplices,
            "f_vector": list(self.f_vector()),
            "euler": self.euler(),
        }
        data.update(extra)
        return data

    def to_dot(self, name: str = "skeleton") -> str:
        lines = [f"graph {name} {{"]
        for label in sorted(self.vertex_labels):
            lines.append(f'  "{label}";')
        edges = sorted(
            (self.vertex_labels[a], self.vertex_labels[b]) for a, b in self.one_cells()
        )
        for a, b in edges:
            lines.append(f'  "{a}" -- "{b}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _rank_gf2(columns: list[int]) -> int:
    rank = 0
    pivots: list[int] = []
    for col in columns:
        for p in pivots:
            low = p & -p
            if col & low:
                col ^= p
        if col:
            pivots.append(col)
            rank += 1
    return rank


# ---------------------------------------------------------------------------
# Simplicial constructions


def from_simplices(labels: list[str], simplices, keys=None) -> CellComplex:
    """Simplicial complex from vertex-index sets; faces added automatically.

    Cells are keyed by their sorted vertex tuples.
    """
    cx = CellComplex()
    for i, label in enumerate(labels):
        cx.add_vertex(label, key=(i,))
    closed: set[tuple[int, ...]] = set()
    for simplex in simplices:
        top = tuple(sorted(simplex))
        if len(set(top)) != len(top):
            raise ConsistencyError(f"simplex {top} has repeated vertices")
        for r in range(2, len(top) + 1):
            for sub in itertools.combinations(top, r):
                closed.add(sub)
    for sub in sorted(closed, key=lambda s: (len(s), s)):
        faces = tuple(
            cx.index_of(len(sub) - 2, sub[:i] + sub[i + 1 :]) for i in range(len(sub))
        )
        cx.add_cell(vertices=sub, faces=faces, key=sub)
    return cx


def order_complex(elements, less_than, labels) -> CellComplex:
    """Order complex of a finite poset: vertices are the elements (in the
    given order), k-cells are chains of length k+1."""
    n = len(elements)
    cx = CellComplex()
    for i, _el in enumerate(elements):
        cx.add_vertex(labels[i], key=(i,))
    chains: list[tuple[int, ...]] = [(i,) for i in range(n)]
    frontier = chains
    while frontier:
        nxt = []
        for chain in frontier:
            for j in range(n):
                if less_than(elements[chain[-1]], elements[j]):
                    nxt.append(chain + (j,))
        for chain in nxt:
            faces = tuple(
                cx.index_of(len(chain) - 2, chain[:i] + chain[i + 1 :])
                for i in range(len(chain))
            )
            cx.add_cell(vertices=chain, faces=faces, key=chain)
        frontier = nxt
    return cx


def disjoint_copies(cx: CellComplex, tags, label_fn=None) -> CellComplex:
    """Disjoint union of one copy of cx per tag; keys become (key, tag)."""
    out = CellComplex()
    for tag in tags:
        for v, label in enumerate(cx.vertex_labels):
            text = label_fn(label, tag) if label_fn else f"{label}|{tag}"
            out.add_vertex(text, key=(cx.cells[0][v].key, tag))
    for dim in range(1, len(cx.cells)):
        for cell in cx.cells[dim]:
            for tag in tags:
                vertices = tuple(
                    out.index_of(0, (cx.cells[0][v].key, tag)) for v in cell.vertices
                )
                faces = tuple(
                    out.index_of(dim - 1, (cx.cells[dim - 1][f].key, tag))
                    for f in cell.faces
                )
                out.add_cell(vertices, faces, key=(cell.key, tag))
    return out


# ---------------------------------------------------------------------------
# Quotients


@dataclass
class Quotient:
    complex: CellComplex
    cell_map: list[dict[int, int]]  # per dim: source index -> quotient index
    seeds: tuple = ()
    merged_by_dim: tuple[int, ...] = ()

    def image(self, dim: int, idx: int) -> int:
        return self.cell_map[dim][idx]


def quotient_complex(cx: CellComplex, seed_pairs, label_fn=None) -> Quotient:
    """Quotient of cx by the cell identifications generated by seed_pairs.

    seed_pairs is an iterable of (dim, index_a, index_b); identifying two
    cells identifies their facets slotwise, recursively.  Parallel cells
    that are not related by the generated identification stay distinct.
    """
    seeds = tuple(seed_pairs)
    uf = [UnionFind() for _ in cx.cells]
    for dim in range(len(cx.cells)):
        for idx in range(len(cx.cells[dim])):
            uf[dim].add(idx)
    work = list(seeds)
    while work:
        dim, a, b = work.pop()
        if not uf[dim].union(a, b):
            continue
        if dim > 0:
            ca, cb = cx.cells[dim][a], cx.cells[dim][b]
            for fa, fb in zip(ca.faces, cb.faces):
                work.append((dim - 1, fa, fb))

    out = CellComplex()
    cell_map: list[dict[int, int]] = [dict() for _ in cx.cells]
    classes0 = uf[0].classes()
    reps0 = sorted(classes0)
    for rep in reps0:
        members = classes0[rep]
        if label_fn is not None:
            label = label_fn(members)
        else:
            label = cx.vertex_labels[rep]
        new = out.add_vertex(label, key=("q", rep))
        for m in members:
            cell_map[0][m] = new
    merged = [len(cx.cells[0]) - len(reps0)]
    for dim in range(1, len(cx.cells)):
        classes = uf[dim].classes()
        merged.append(len(cx.cells[dim]) - len(classes))
        for rep in sorted(classes):
            members = classes[rep]
            cell = cx.cells[dim][rep]
            vertices = tuple(cell_map[0][v] for v in cell.vertices)
            faces = tuple(cell_map[dim - 1][f] for f in cell.faces)
            for m in members:
                other = cx.cells[dim][m]
                faces_m = tuple(cell_map[dim - 1][f] for f in other.faces)
                if faces_m != faces:
                    raise ConsistencyError(
                        f"inconsistent facet identification at dim {dim}: "
                        f"{cell.key!r} vs {other.key!r}"
                    )
            new = out.add_cell(vertices, faces, key=("q", dim, rep))
            for m in members:
                cell_map[dim][m] = new
    out.provenance = seeds
    return Quotient(
        complex=out, cell_map=cell_map, seeds=seeds, merged_by_dim=tuple(merged)
    )


# ---------------------------------------------------------------------------
# Barycentric subdivision


def _chains_ending_at_full(m: int) -> list[tuple[tuple[int, ...], ...]]:
    """All strictly increasing chains of nonempty subsets of {0..m} whose
    last entry is the full set, as tuples of sorted slot tuples."""
    full = tuple(range(m + 1))
    subsets = []
    for r in range(1, m + 1):
        subsets.extend(itertools.combinations(full, r))
    chains: dict[tuple, list] = {full: [(full,)]}
    ordered = sorted(subsets, key=lambda s: (len(s), s)) + [full]
    ending_at: dict[tuple, list] = {}
    for s in ordered:
        acc = [(s,)]
        for t in ordered:
            if len(t) < len(s) and set(t) < set(s):
                acc.extend(chain + (s,) for chain in ending_at[t])
        ending_at[s] = acc
    return ending_at[full]


def _restrict(cx: CellComplex, dim: int, idx: int, slots: tuple[int, ...]):
    """The face of a cell spanned by a sorted subset of its slots."""
    drop = [s for s in range(dim + 1) if s not in slots]
    for s in reversed(drop):
        idx = cx.cells[dim][idx].faces[s]
        dim -= 1
    return dim, idx


def barycentric_subdivide(cx: CellComplex) -> CellComplex:
    """Barycentric subdivision; works on parallel cells and loops.

    New vertices are the cells of cx; the k-cells are flags (c, F_0 < ...
    < F_k = all slots of c) with the usual face identifications pushed
    into facet cells.
    """
    out = CellComplex()
    bary: dict[tuple[int, int], int] = {}
    for dim in range(len(cx.cells)):
        for idx, cell in enumerate(cx.cells[dim]):
            label = cx.vertex_labels[idx] if dim == 0 else f"b{dim}.{idx}"
            bary[(dim, idx)] = out.add_vertex(label, key=("b", dim, idx))

    chains_cache = {m: _chains_ending_at_full(m) for m in range(1, len(cx.cells))}

    def canonical(dim: int, idx: int, chain):
        """Push a chain not ending at the full slot set into the facet."""
        m = dim
        while chain[-1] != tuple(range(m + 1)):
            top = chain[-1]
            m2, idx2 = _restrict(cx, m, idx, top)
            renumber = {slot: pos for pos, slot in enumerate(top)}
            chain = tuple(tuple(renumber[s] for s in f) for f in chain)
            m, idx = m2, idx2
        return m, idx, chain

    for m in range(1, len(cx.cells)):
        chains = sorted(chains_cache[m], key=len)
        for idx in range(len(cx.cells[m])):
            for chain in chains:
                k = len(chain) - 1
                if k == 0:
                    continue
                vertices = tuple(
                    bary[_restrict(cx, m, idx, f)] for f in chain
                )
                faces = []
                for i in range(k + 1):
                    sub = chain[:i] + chain[i + 1 :]
                    cm, cidx, cchain = canonical(m, idx, sub)
                    if len(cchain) == 1:
                        faces.append(bary[_restrict(cx, cm, cidx, cchain[0])])
                    else:
                        faces.append(
                            out.index_of(len(cchain) - 1, ("s", cm, cidx, cchain))
                        )
                out.add_cell(vertices, tuple(faces), key=("s", m, idx, chain))
    return out
