"""Nucleus computation, dual Moore diagram and Schreier graphs.

The contracting property is semi-decided by pair saturation: starting
from the section-and-inverse closure of the generators, products of pairs
are closed under sections, folded by equality and reduced to their
eventually recurrent part; a round that adds nothing ends the search.
Non-contracting input surfaces as BudgetExceeded or RoundLimitExceeded,
never as nontermination.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .engine import DEFAULT_BUDGET, IDENTITY, EffortBudget, Element, Session
from .errors import BudgetExceeded, ResourceLimitExceeded, RoundLimitExceeded
from .graphs import eventual_range
from .recursion import format_word

DEFAULT_MAX_ROUNDS = 24


@dataclass(frozen=True)
class Nucleus:
    """Finite, section- and inverse-closed element set containing 1.

    Elements are canonical ids of one Session; section_graph[(n, x)] is the
    id of n|_x for the letter with index x.
    """

    session: Session
    ids: tuple[int, ...]  # shortlex order, identity first
    identity_id: int
    section_graph: dict[tuple[int, int], int]
    inverse_map: dict[int, int]

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, cid: int) -> bool:
        return cid in self.ids

    def element(self, cid: int) -> Element:
        return self.session.rep(cid)

    def word_str(self, cid: int) -> str:
        return format_word(self.session.rep(cid).word)

    def perm(self, cid: int) -> tuple[int, ...]:
        return self.session.perm_of(cid)

    def section_id(self, cid: int, letters) -> int:
        cur = cid
        for x in letters:
            cur = self.section_graph[(cur, self.session.rec.alphabet.index(x))]
        return cur

    def act_word(self, cid: int, letters: tuple[str, ...]) -> tuple[str, ...]:
        return self.session.act_id(cid, letters)

    def nontrivial_ids(self) -> tuple[int, ...]:
        return tuple(cid for cid in self.ids if cid != self.identity_id)


def _closure_ids(session: Session, seed_ids: set[int], budget: EffortBudget) -> set[int]:
    """Close a set of ids under single-letter sections and inversion."""
    d = len(session.rec.alphabet)
    out = set()
    queue = list(seed_ids)
    while queue:
        cid = queue.pop()
        if cid in out:
            continue
        out.add(cid)
        if len(out) > budget.max_states:
            raise BudgetExceeded(f"closure exceeds max_states={budget.max_states}")
        sections = session.sections_of(cid)
        for x in range(d):
            if sections[x] not in out:
                queue.append(sections[x])
        inv = session.inverse_id(cid)
        if inv not in out:
            queue.append(inv)
    return out


def _eventual_ids(session: Session, start: Element, budget: EffortBudget) -> set[int]:
    """Ids of the eventually recurrent sections of one element: states of
    its folded section closure that lie on or after a directed cycle."""
    closure = session.section_closure(start, budget)
    ids = {}
    for word in closure.states:
        ids[word] = session.classify(session.element(word), budget)
    d = len(session.rec.alphabet)
    graph: dict[int, set[int]] = {}
    for word in closure.states:
        src = ids[word]
        graph.setdefault(src, set())
        for x in range(d):
            graph[src].add(ids[closure.transitions[(word, x)]])
    return eventual_range(graph.keys(), lambda n: graph[n])


def compute_nucleus(
    session: Session,
    budget: EffortBudget | None = None,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
) -> Nucleus:
    """Saturation algorithm for the nucleus.

    Raises BudgetExceeded or RoundLimitExceeded when the contracting
    property could not be certified within the allowed effort.
    """
    budget = budget or session.budget
    current = {session.classify(IDENTITY, budget)}
    for g in session.generators():
        current |= _eventual_ids(session, g, budget)
        current.add(session.classify(g, budget))
    current = _closure_ids(session, current, budget)

    processed: set[tuple[int, int]] = set()
    for round_no in range(max_rounds + 1):
        added: set[int] = set()
        for a, b in itertools.product(sorted(current), repeat=2):
            if (a, b) in processed:
                continue
            processed.add((a, b))
            if session.registry_size() > budget.max_states:
                raise BudgetExceeded(
                    f"element registry exceeds max_states={budget.max_states}"
                )
            product = session.multiply(session.rep(a), session.rep(b))
            added |= _eventual_ids(session, product, budget) - current
        if not added:
            break
        if round_no == max_rounds:
            raise RoundLimitExceeded(
                f"saturation still growing after {max_rounds} rounds "
                f"({len(current)} elements so far)"
            )
        current = _closure_ids(session, current | added, budget)
        if len(current) > budget.max_states:
            raise BudgetExceeded(
                f"candidate nucleus exceeds max_states={budget.max_states}"
            )

    # prune to the eventually recurrent part and re-verify pair saturation
    d = len(session.rec.alphabet)
    for _ in range(max_rounds + 1):
        succ = {
            cid: {session.sections_of(cid)[x] for x in range(d)} for cid in current
        }
        kept = eventual_range(succ.keys(), lambda n: succ[n])
        kept = _closure_ids(session, kept, budget)
        missing: set[int] = set()
        for a, b in itertools.product(sorted(kept), repeat=2):
            product = session.multiply(session.rep(a), session.rep(b))
            missing |= _eventual_ids(session, product, budget) - kept
        if not missing:
            current = kept
            break
        current = _closure_ids(session, kept | missing, budget)
    else:
        raise RoundLimitExceeded("prune/re-verify loop did not stabilize")

    ids = tuple(sorted(current, key=session.sort_key))
    identity_id = session.classify(IDENTITY, budget)
    section_graph = {
        (cid, x): session.sections_of(cid)[x] for cid in ids for x in range(d)
    }
    nucleus = Nucleus(
        session=session,
        ids=ids,
        identity_id=identity_id,
        section_graph=section_graph,
        inverse_map={cid: session.inverse_id(cid) for cid in ids},
    )
    _check_invariants(nucleus)
    return nucleus


def _check_invariants(nucleus: Nucleus) -> None:
    from .errors import ConsistencyError

    ids = set(nucleus.ids)
    if nucleus.identity_id not in ids:
        raise ConsistencyError("nucleus lost the identity")
    for (_cid, _x), target in nucleus.section_graph.items():
        if target not in ids:
            raise ConsistencyError("nucleus not closed under sections")
    for _cid, inv in nucleus.inverse_map.items():
        if inv not in ids:
            raise ConsistencyError("nucleus not closed under inversion")
    d = len(nucleus.session.rec.alphabet)
    succ = {cid: {nucleus.section_graph[(cid, x)] for x in range(d)} for cid in ids}
    if eventual_range(succ.keys(), lambda n: succ[n]) != ids:
        raise ConsistencyError("nucleus has elements not reachable from a cycle")


@dataclass(frozen=True)
class Contracting:
    nucleus: Nucleus


@dataclass(frozen=True)
class UnknownWithinBudget:
    reason: str


def is_contracting(
    session: Session,
    budget: EffortBudget | None = None,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
):
    """Contracting(nucleus) or UnknownWithinBudget (semi-decision)."""
    try:
        return Contracting(compute_nucleus(session, budget, max_rounds))
    except (BudgetExceeded, RoundLimitExceeded) as err:
        return UnknownWithinBudget(reason=str(err))


# ---------------------------------------------------------------------------
# Dual Moore diagram


@dataclass(frozen=True)
class MooreArrow:
    source: str  # letter
    target: str  # letter, = g(source)
    gid: int
    section_gid: int  # id of g|_source


@dataclass(frozen=True)
class MooreDiagram:
    nucleus: Nucleus
    arrows: tuple[MooreArrow, ...]


def moore_diagram(nucleus: Nucleus) -> MooreDiagram:
    """One arrow per (letter, non-identity nucleus element)."""
    letters = nucleus.session.rec.alphabet.letters
    arrows = []
    for gid in nucleus.nontrivial_ids():
        perm = nucleus.perm(gid)
        for x, letter in enumerate(letters):
            arrows.append(
                MooreArrow(
                    source=letter,
                    target=letters[perm[x]],
                    gid=gid,
                    section_gid=nucleus.section_graph[(gid, x)],
                )
            )
    return MooreDiagram(nucleus=nucleus, arrows=tuple(arrows))


def moore_diagram_to_dot(diagram: MooreDiagram) -> str:
    n = diagram.nucleus
    lines = ["digraph moore {"]
    for letter in n.session.rec.alphabet.letters:
        lines.append(f'  "{letter}";')
    for arrow in diagram.arrows:
        label = f"{n.word_str(arrow.gid)} | {n.word_str(arrow.section_gid)}"
        lines.append(f'  "{arrow.source}" -> "{arrow.target}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Schreier graphs


@dataclass(frozen=True)
class SchreierGraph:
    level: int
    vertices: tuple[tuple[str, ...], ...]  # all words in X^n, lexicographic
    arrows: tuple[tuple[tuple[str, ...], tuple[str, ...], int], ...]  # (v, g(v), gid)
    labels: dict[int, str]

    def simple_edges(self) -> frozenset[frozenset]:
        """Undirected edge set, loops dropped, labels forgotten."""
        return frozenset(
            frozenset((a, b)) for a, b, _ in self.arrows if a != b
        )


def level_words(alphabet, level: int):
    return [tuple(p) for p in itertools.product(alphabet.letters, repeat=level)]


def schreier_graph(
    nucleus: Nucleus,
    level: int,
    elements: tuple[int, ...] | None = None,
    max_vertices: int = 1 << 20,
) -> SchreierGraph:
    """Labeled level-n Schreier graph for the nucleus elements (default)
    or any given tuple of element ids."""
    if level < 0:
        raise ValueError("level must be >= 0")
    alphabet = nucleus.session.rec.alphabet
    if len(alphabet) ** level > max_vertices:
        raise ResourceLimitExceeded(
            f"level {level} has {len(alphabet)**level} vertices (limit {max_vertices})"
        )
    gids = elements if elements is not None else nucleus.nontrivial_ids()
    vertices = level_words(alphabet, level)
    arrows = []
    for gid in gids:
        for v in vertices:
            arrows.append((v, nucleus.act_word(gid, v), gid))
    labels = {gid: nucleus.word_str(gid) for gid in gids}
    return SchreierGraph(
        level=level, vertices=tuple(vertices), arrows=tuple(arrows), labels=labels
    )


def schreier_graph_to_dot(graph: SchreierGraph, nucleus: Nucleus) -> str:
    """Undirected DOT; one edge per unordered pair and generator, keeping
    the canonically smaller of g, g^-1 and keeping self-loops."""
    session = nucleus.session
    keep: set[int] = set()
    for gid in graph.labels:
        inv = nucleus.inverse_map.get(gid, session.inverse_id(gid))
        keep.add(min(gid, inv, key=session.sort_key))
    emitted = set()
    lines = ["graph schreier {"]
    for v in graph.vertices:
        lines.append(f'  "{word_label(v)}";')
    for v, w, gid in graph.arrows:
        if gid not in keep:
            continue
        key = (frozenset((v, w)), gid)
        if key in emitted:
            continue
        emitted.add(key)
        lines.append(
            f'  "{word_label(v)}" -- "{word_label(w)}" [label="{graph.labels[gid]}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def word_label(letters: tuple[str, ...]) -> str:
    if not letters:
        return "_"
    if all(len(x) == 1 for x in letters):
        return "".join(letters)
    return ",".join(letters)
