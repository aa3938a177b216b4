"""Element arithmetic for a self-similar group given by a wreath recursion.

A Session owns the memo tables for one recursion: section closures,
bisimulation classes and their canonical ids.  Elements are immutable
freely reduced words; equality in the faithful quotient is decided by
partition refinement on the finite section closure of the difference
element.  All operations take an optional EffortBudget and raise
BudgetExceeded instead of running away on non-contracting input.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass

from .errors import BudgetExceeded
from .recursion import (
    Factor,
    Word,
    WreathRecursion,
    free_reduce,
    format_word,
    invert_word,
)


@dataclass(frozen=True)
class EffortBudget:
    max_states: int = 10_000
    max_word_length: int = 64

    def __post_init__(self):
        if self.max_states <= 0 or self.max_word_length <= 0:
            raise ValueError("budget bounds must be positive")


DEFAULT_BUDGET = EffortBudget()


@dataclass(frozen=True)
class Element:
    """A group element represented by a freely reduced word."""

    word: Word

    def __str__(self) -> str:
        return format_word(self.word)


IDENTITY = Element(())


@dataclass(frozen=True)
class SectionClosure:
    """Finite Moore machine of all sections of one element.

    states maps each state word to its root permutation; transitions maps
    (state, letter index) to a state.  Contains the identity state () and
    is deterministic and transition-closed.  States are folded: bisimilar
    words are represented by one canonical state.
    """

    initial: Word
    states: dict[Word, tuple[int, ...]]
    transitions: dict[tuple[Word, int], Word]

    def __len__(self) -> int:
        return len(self.states)


class _Undecided:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Undecided"

    def __bool__(self) -> bool:
        return False


UNDECIDED = _Undecided()


def _word_sort_key(word: Word, name_index: dict[str, int]):
    return (len(word), tuple((name_index[n], 0 if e > 0 else 1) for n, e in word))


class Session:
    """Arithmetic session for one recursion.

    Owns mutable memo tables; confine a session to one thread of control.
    Element values handed out are immutable and freely shareable.
    """

    def __init__(self, rec: WreathRecursion, budget: EffortBudget | None = None):
        self.rec = rec
        self.budget = budget or DEFAULT_BUDGET
        self._name_index = {name: i for i, name in enumerate(rec.names)}
        self._inv_perm = {
            name: tuple(rule.perm.index(i) for i in range(len(rec.alphabet)))
            for name, rule in rec.rules.items()
        }
        self._inv_sections = {
            name: tuple(invert_word(w) for w in rule.sections)
            for name, rule in rec.rules.items()
        }
        # canonical-id registry: one entry per bisimulation class
        self._rep: list[Word] = []
        self._perm: list[tuple[int, ...]] = []
        self._sections: list[tuple[int, ...] | None] = []
        self._inverse: dict[int, int] = {}
        self._word_to_id: dict[Word, int] = {}
        self._key_to_id: dict[tuple, int] = {}
        self._trivial_memo: dict[Word, bool] = {}
        self._product_memo: dict[tuple[int, int], int] = {}
        self.deadline: float | None = None  # optional wall-clock guard
        # proven relators: involution generators get their negative exponents
        # normalized away and adjacent equal factors cancelled, which keeps
        # section closures finite for recursions whose raw reduced words grow
        self._involutions: set[str] = set()
        self._learn_involutions()

    # -- word-level primitives ---------------------------------------------

    def _learn_involutions(self) -> None:
        probe = EffortBudget(max_states=512, max_word_length=64)
        for name in self.rec.names:
            try:
                if self._word_is_trivial(((name, 1), (name, 1)), probe):
                    self._involutions.add(name)
            except BudgetExceeded:
                pass

    def _reduce(self, factors) -> Word:
        """Free reduction extended by the proven involution relators."""
        out: list[Factor] = []
        for name, exp in factors:
            if exp < 0 and name in self._involutions:
                exp = 1
            if out and out[-1][0] == name and (
                out[-1][1] == -exp or (name in self._involutions and out[-1][1] == exp)
            ):
                out.pop()
            else:
                out.append((name, exp))
        return tuple(out)

    @property
    def identity(self) -> Element:
        return IDENTITY

    def generator(self, name: str) -> Element:
        if name not in self.rec.rules:
            raise KeyError(name)
        return Element(((name, 1),))

    def generators(self) -> list[Element]:
        return [self.generator(name) for name in self.rec.names]

    def element(self, word) -> Element:
        return Element(self._reduce(free_reduce(word)))

    def element_from_string(self, text: str) -> Element:
        from .recursion import parse_word

        return Element(self._reduce(parse_word(self.rec, text)))

    def _check_deadline(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExceeded("deadline exceeded")

    def _letters(self, w) -> tuple[str, ...]:
        if isinstance(w, str):
            letters = tuple(w)
        else:
            letters = tuple(w)
        index = self.rec.alphabet.letters
        for x in letters:
            if x not in index:
                raise ValueError(f"letter {x!r} not in alphabet")
        return letters

    def _step(self, word: Word, x: int) -> tuple[int, Word]:
        """One-letter action and section of a reduced word: rightmost factor
        acts first, (g1 g2)|_x = g1|_{g2(x)} g2|_x."""
        y = x
        parts: list[Word] = []
        for name, exp in reversed(word):
            if exp > 0:
                rule = self.rec.rules[name]
                parts.append(rule.sections[y])
                y = rule.perm[y]
            else:
                pre = self._inv_perm[name][y]
                parts.append(self._inv_sections[name][pre])
                y = pre
        return y, self._reduce(
            factor for part in reversed(parts) for factor in part
        )

    def act(self, g: Element, w):
        """The image g(w); preserves length and type (str in, str out)."""
        letters = self._letters(w)
        index = self.rec.alphabet.index
        out = []
        cur = g.word
        for x in letters:
            y, cur = self._step(cur, index(x))
            out.append(self.rec.alphabet.letters[y])
        return "".join(out) if isinstance(w, str) else tuple(out)

    def section(self, g: Element, v) -> Element:
        """The section g|_v, computed letter by letter."""
        letters = self._letters(v)
        index = self.rec.alphabet.index
        cur = g.word
        for x in letters:
            _, cur = self._step(cur, index(x))
        return Element(cur)

    def multiply(self, g: Element, h: Element) -> Element:
        return Element(self._reduce(g.word + h.word))

    def inverse(self, g: Element) -> Element:
        return Element(self._reduce(invert_word(g.word)))

    # -- section closures and equality --------------------------------------

    def _fold_word(self, word: Word) -> Word:
        cid = self._word_to_id.get(word)
        if cid is not None:
            return self._rep[cid]
        return word

    def _raw_closure(
        self, start: Word, budget: EffortBudget, stop_on_nontrivial: bool = False
    ):
        """BFS closure of {start} under single-letter sections, with free
        reduction and folding through already classified words.

        Returns (states, perms, trans) or None if stop_on_nontrivial hit a
        state with a nontrivial root permutation.
        """
        d = len(self.rec.alphabet)
        identity_perm = tuple(range(d))
        start = self._fold_word(start)
        perms: dict[Word, tuple[int, ...]] = {}
        trans: dict[tuple[Word, int], Word] = {}
        queue = deque([start])
        seen = {start}
        while queue:
            self._check_deadline()
            word = queue.popleft()
            if len(word) > budget.max_word_length:
                raise BudgetExceeded(
                    f"word length {len(word)} exceeds max_word_length={budget.max_word_length}"
                )
            perm = []
            sections = []
            for x in range(d):
                y, sec = self._step(word, x)
                perm.append(y)
                sections.append(self._fold_word(sec))
            perm_t = tuple(perm)
            if stop_on_nontrivial and perm_t != identity_perm:
                return None
            perms[word] = perm_t
            for x in range(d):
                trans[(word, x)] = sections[x]
                if sections[x] not in seen:
                    seen.add(sections[x])
                    if len(seen) > budget.max_states:
                        raise BudgetExceeded(
                            f"section closure exceeds max_states={budget.max_states}"
                        )
                    queue.append(sections[x])
        return perms, trans

    def _refine(self, perms, trans):
        """Moore partition refinement; returns word -> block index, with
        deterministic block numbering."""
        words = list(perms)
        block: dict[Word, int] = {}
        sig_to_block: dict[tuple, int] = {}
        for w in words:
            sig = perms[w]
            if sig not in sig_to_block:
                sig_to_block[sig] = len(sig_to_block)
            block[w] = sig_to_block[sig]
        d = len(self.rec.alphabet)
        while True:
            sig_to_new: dict[tuple, int] = {}
            new_block: dict[Word, int] = {}
            for w in words:
                sig = (block[w],) + tuple(block[trans[(w, x)]] for x in range(d))
                if sig not in sig_to_new:
                    sig_to_new[sig] = len(sig_to_new)
                new_block[w] = sig_to_new[sig]
            if len(sig_to_new) == len(set(block.values())):
                return new_block
            block = new_block

    def section_closure(self, g: Element, budget: EffortBudget | None = None) -> SectionClosure:
        """Folded section closure of g (plus the identity state)."""
        budget = budget or self.budget
        start = self._reduce(g.word)
        perms, trans = self._raw_closure(start, budget)
        d = len(self.rec.alphabet)
        if () not in perms:
            perms[()] = tuple(range(d))
            for x in range(d):
                trans[((), x)] = ()
        block = self._refine(perms, trans)
        rep: dict[int, Word] = {}
        for w in perms:
            b = block[w]
            if b not in rep or _word_sort_key(w, self._name_index) < _word_sort_key(
                rep[b], self._name_index
            ):
                rep[b] = w
        states = {rep[b]: perms[rep[b]] for b in rep}
        transitions = {
            (rep[b], x): rep[block[trans[(rep[b], x)]]] for b in rep for x in range(d)
        }
        return SectionClosure(
            initial=rep[block[self._fold_word(start)]],
            states=states,
            transitions=transitions,
        )

    def is_trivial(self, g: Element, budget: EffortBudget | None = None) -> bool:
        """Whether g acts trivially on every finite word."""
        return self._word_is_trivial(self._reduce(g.word), budget)

    def _word_is_trivial(self, word: Word, budget: EffortBudget | None = None) -> bool:
        if not word:
            return True
        if word in self._trivial_memo:
            return self._trivial_memo[word]
        cid = self._word_to_id.get(word)
        if cid is not None:
            result = cid == self.classify(IDENTITY)
            self._trivial_memo[word] = result
            return result
        budget = budget or self.budget
        closure = self._raw_closure(word, budget, stop_on_nontrivial=True)
        if closure is None:
            self._trivial_memo[word] = False
            return False
        # every reachable state has the identity root permutation, so the
        # refinement against the identity state puts them all in one block
        perms, trans = closure
        d = len(self.rec.alphabet)
        if () not in perms:
            perms[()] = tuple(range(d))
            for x in range(d):
                trans[((), x)] = ()
        block = self._refine(perms, trans)
        result = block[self._fold_word(word)] == block[()]
        self._trivial_memo[word] = result
        return result

    def are_equal(self, g: Element, h: Element, budget: EffortBudget | None = None) -> bool:
        """Decide g = h in the faithful quotient (exact, or BudgetExceeded)."""
        if g.word == h.word:
            return True
        gid = self._word_to_id.get(g.word)
        hid = self._word_to_id.get(h.word)
        if gid is not None and hid is not None:
            return gid == hid
        diff = self._reduce(g.word + invert_word(h.word))
        return self._word_is_trivial(diff, budget)

    # -- canonical ids -------------------------------------------------------

    def classify(self, g: Element, budget: EffortBudget | None = None) -> int:
        """Canonical id of g's bisimulation class (session-local)."""
        word = self._reduce(g.word)
        cached = self._word_to_id.get(word)
        if cached is not None:
            return cached
        budget = budget or self.budget
        perms, trans = self._raw_closure(word, budget)
        block = self._refine(perms, trans)
        d = len(self.rec.alphabet)
        nblocks = len(set(block.values()))
        # quotient machine
        bperm: dict[int, tuple[int, ...]] = {}
        btrans: dict[int, tuple[int, ...]] = {}
        brep: dict[int, Word] = {}
        for w in perms:
            b = block[w]
            if b not in brep or _word_sort_key(w, self._name_index) < _word_sort_key(
                brep[b], self._name_index
            ):
                brep[b] = w
            bperm[b] = perms[w]
            btrans[b] = tuple(block[trans[(w, x)]] for x in range(d))
        ids: dict[int, int] = {}
        for b in range(nblocks):
            key = self._canonical_key(b, bperm, btrans)
            cid = self._key_to_id.get(key)
            if cid is None:
                cid = len(self._rep)
                self._rep.append(brep[b])
                self._perm.append(bperm[b])
                self._sections.append(None)
                self._key_to_id[key] = cid
            elif _word_sort_key(brep[b], self._name_index) < _word_sort_key(
                self._rep[cid], self._name_index
            ):
                self._rep[cid] = brep[b]
            ids[b] = cid
        for b in range(nblocks):
            self._sections[ids[b]] = tuple(ids[t] for t in btrans[b])
        for w in perms:
            self._word_to_id[w] = ids[block[w]]
        return ids[block[word]]

    def _canonical_key(self, start_block: int, bperm, btrans) -> tuple:
        """Canonical form of the pointed minimal machine: BFS numbering from
        the start block, letters in alphabet order."""
        number = {start_block: 0}
        order = [start_block]
        i = 0
        while i < len(order):
            b = order[i]
            i += 1
            for t in btrans[b]:
                if t not in number:
                    number[t] = len(number)
                    order.append(t)
        return tuple(
            (bperm[b], tuple(number[t] for t in btrans[b])) for b in order
        )

    def rep(self, cid: int) -> Element:
        return Element(self._rep[cid])

    def perm_of(self, cid: int) -> tuple[int, ...]:
        return self._perm[cid]

    def sections_of(self, cid: int) -> tuple[int, ...]:
        sections = self._sections[cid]
        if sections is None:  # pragma: no cover - classify always fills these
            self.classify(self.rep(cid))
            sections = self._sections[cid]
        return sections

    def inverse_id(self, cid: int) -> int:
        iid = self._inverse.get(cid)
        if iid is None:
            iid = self.classify(self.inverse(self.rep(cid)))
            self._inverse[cid] = iid
            self._inverse[iid] = cid
        return iid

    def multiply_ids(self, a: int, b: int) -> int:
        key = (a, b)
        cached = self._product_memo.get(key)
        if cached is None:
            cached = self.classify(self.multiply(self.rep(a), self.rep(b)))
            self._product_memo[key] = cached
        return cached

    def act_id(self, cid: int, letters: tuple[str, ...]) -> tuple[str, ...]:
        """Action of a classified element using the id-level section table."""
        index = self.rec.alphabet.index
        out = []
        cur = cid
        for x in letters:
            xi = index(x)
            out.append(self.rec.alphabet.letters[self._perm[cur][xi]])
            cur = self.sections_of(cur)[xi]
        return tuple(out)

    def section_id(self, cid: int, letters: tuple[str, ...]) -> int:
        index = self.rec.alphabet.index
        cur = cid
        for x in letters:
            cur = self.sections_of(cur)[index(x)]
        return cur

    def sort_key(self, cid: int):
        return _word_sort_key(self._rep[cid], self._name_index)

    def registry_size(self) -> int:
        return len(self._rep)

    # -- balls and self-replication -----------------------------------------

    def enumerate_ball(
        self,
        generators,
        radius: int,
        budget: EffortBudget | None = None,
    ) -> list[Element]:
        """All distinct elements that are products of at most `radius`
        generators or inverse generators, as canonical representatives
        sorted shortlex."""
        if radius < 0:
            raise ValueError("radius must be >= 0")
        budget = budget or self.budget
        steps: list[Element] = []
        for g in generators:
            steps.append(g)
            inv = self.inverse(g)
            if inv.word != g.word:
                steps.append(inv)
        step_ids = [self.classify(s, budget) for s in steps]
        ids = {self.classify(IDENTITY, budget)}
        frontier = sorted(ids)
        for _ in range(radius):
            new: list[int] = []
            for cid in frontier:
                for sid in step_ids:
                    self._check_deadline()
                    pid = self.multiply_ids(cid, sid)
                    if pid not in ids:
                        ids.add(pid)
                        new.append(pid)
                        if len(ids) > budget.max_states:
                            raise BudgetExceeded(
                                f"ball exceeds max_states={budget.max_states}"
                            )
            if not new:
                break
            frontier = sorted(new)
        return [self.rep(cid) for cid in sorted(ids, key=self.sort_key)]

    def is_self_replicating(
        self,
        search_radius: int,
        budget: EffortBudget | None = None,
    ):
        """True if every ordered letter pair (x, y) has a ball element g with
        g(x) = y and trivial section g|_x; UNDECIDED if some pair has no
        witness within the radius."""
        budget = budget or self.budget
        ball = self.enumerate_ball(self.generators(), search_radius, budget)
        letters = self.rec.alphabet.letters
        for x in letters:
            for y in letters:
                found = False
                for g in ball:
                    if self.act(g, (x,)) == (y,) and self.is_trivial(
                        self.section(g, (x,)), budget
                    ):
                        found = True
                        break
                if not found:
                    return UNDECIDED
        return True
