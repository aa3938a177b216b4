"""Group definitions: parsing, validation and printing of wreath recursions.

A group definition file declares an alphabet and one rule per generator,
giving the permutation of letters at the root and one section word per
letter (in alphabet order):

    alphabet = 0 1
    u = (0 1)[1, u v]
    v = (0 1)[u^-1, v]

Declarations are separated by newlines or ';', '#' starts a line comment,
other whitespace is insignificant.  Permutations are written in cycle
notation, "()" being the identity.  A section word is "1" (identity) or a
sequence of generator factors, each optionally followed by "^-1".  Words
multiply right-to-left: in "u v" the factor v acts first.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

# A freely reduced word in the generators: tuple of (name, +1 | -1).
Factor = tuple[str, int]
Word = tuple[Factor, ...]

_RESERVED = ("alphabet", "1")


class ParseError(Exception):
    """Input does not conform to the group-definition grammar."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class InvalidRecursion(Exception):
    """Grammatical input with inconsistent content (bad permutation,
    undeclared symbol, duplicate declaration, ...)."""


def free_reduce(factors) -> Word:
    """Cancel adjacent mutually inverse factors."""
    out: list[Factor] = []
    for name, exp in factors:
        if out and out[-1][0] == name and out[-1][1] == -exp:
            out.pop()
        else:
            out.append((name, exp))
    return tuple(out)


def invert_word(word: Word) -> Word:
    return tuple((name, -exp) for name, exp in reversed(word))


def format_word(word: Word) -> str:
    if not word:
        return "1"
    return " ".join(name + ("^-1" if exp < 0 else "") for name, exp in word)


@dataclass(frozen=True)
class Alphabet:
    letters: tuple[str, ...]

    def __post_init__(self):
        if len(self.letters) < 2:
            raise InvalidRecursion("alphabet needs at least 2 letters")
        if len(set(self.letters)) != len(self.letters):
            raise InvalidRecursion("alphabet letters must be distinct")

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def index(self, letter: str) -> int:
        return self.letters.index(letter)


@dataclass(frozen=True)
class GeneratorRule:
    perm: tuple[int, ...]  # image of letter i, as a letter index
    sections: tuple[Word, ...]  # one freely reduced word per letter


@dataclass(frozen=True)
class WreathRecursion:
    alphabet: Alphabet
    names: tuple[str, ...]  # declaration order
    rules: dict[str, GeneratorRule] = field(compare=True)

    def __post_init__(self):
        validate_recursion(self)

    def rule(self, name: str) -> GeneratorRule:
        return self.rules[name]

    @property
    def degree(self) -> int:
        return len(self.alphabet)


def validate_recursion(rec: WreathRecursion) -> None:
    d = len(rec.alphabet)
    if not rec.names:
        raise InvalidRecursion("need at least one generator")
    if len(set(rec.names)) != len(rec.names):
        raise InvalidRecursion("duplicate generator declaration")
    for name in rec.names:
        if name in _RESERVED:
            raise InvalidRecursion(f"generator name {name!r} is reserved")
        if name in rec.alphabet.letters:
            raise InvalidRecursion(f"generator name {name!r} collides with a letter")
        rule = rec.rules.get(name)
        if rule is None:
            raise InvalidRecursion(f"missing rule for generator {name!r}")
        if sorted(rule.perm) != list(range(d)):
            raise InvalidRecursion(f"root permutation of {name!r} is not a bijection")
        if len(rule.sections) != d:
            raise InvalidRecursion(
                f"generator {name!r} needs {d} section words, got {len(rule.sections)}"
            )
        for word in rule.sections:
            if word != free_reduce(word):
                raise InvalidRecursion(f"section word of {name!r} is not freely reduced")
            for sym, exp in word:
                if sym not in rec.rules:
                    raise InvalidRecursion(f"symbol {sym!r} undeclared")
                if exp not in (1, -1):
                    raise InvalidRecursion("only exponents +-1 are allowed")


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<sep>[;\n])
  | (?P<inv>\^-1)
  | (?P<name>[A-Za-z0-9]+)
  | (?P<punct>[=()\[\],])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # 'name', 'punct', 'inv', 'sep', 'eof'
    value: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        value = m.group()
        col = pos - line_start + 1
        if kind == "sep":
            tokens.append(_Token("sep", value, line, col))
            if value == "\n":
                line += 1
                line_start = m.end()
        elif kind in ("name", "punct", "inv"):
            tokens.append(_Token(kind, value, line, col))
        pos = m.end()
    tokens.append(_Token("eof", "", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def skip_seps(self) -> None:
        while self.peek().kind == "sep":
            self.next()

    def expect(self, kind: str, value: str | None = None) -> _Token:
        tok = self.next()
        if tok.kind != kind or (value is not None and tok.value != value):
            want = value if value is not None else kind
            raise ParseError(f"expected {want!r}, got {tok.value!r}", tok.line, tok.col)
        return tok

    def fail(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    # grammar rules -------------------------------------------------------

    def parse_file(self) -> WreathRecursion:
        self.skip_seps()
        kw = self.expect("name")
        if kw.value != "alphabet":
            raise ParseError("file must start with an alphabet declaration", kw.line, kw.col)
        self.expect("punct", "=")
        letters = []
        while self.peek().kind == "name":
            letters.append(self.next().value)
        if not letters:
            raise self.fail("alphabet declaration needs letters")
        if self.peek().kind not in ("sep", "eof"):
            raise self.fail("alphabet declaration must end with newline or ';'")
        if len(letters) < 2:
            raise InvalidRecursion("alphabet needs at least 2 letters")
        if len(set(letters)) != len(letters):
            raise InvalidRecursion("alphabet letters must be distinct")
        letter_index = {x: i for i, x in enumerate(letters)}

        names: list[str] = []
        raw_rules: dict[str, GeneratorRule] = {}
        self.skip_seps()
        while self.peek().kind != "eof":
            name_tok = self.expect("name")
            name = name_tok.value
            if name in _RESERVED:
                raise InvalidRecursion(f"generator name {name!r} is reserved")
            if name in letter_index:
                raise InvalidRecursion(f"generator name {name!r} collides with a letter")
            if name in raw_rules:
                raise InvalidRecursion(f"duplicate declaration of generator {name!r}")
            self.expect("punct", "=")
            perm = self.parse_perm(letter_index)
            sections = self.parse_sections(len(letters), name)
            names.append(name)
            raw_rules[name] = GeneratorRule(perm=perm, sections=sections)
            if self.peek().kind not in ("sep", "eof"):
                raise self.fail("declaration must end with newline or ';'")
            self.skip_seps()
        if not names:
            raise self.fail("need at least one generator declaration")

        alphabet = Alphabet(tuple(letters))
        return WreathRecursion(alphabet=alphabet, names=tuple(names), rules=raw_rules)

    def parse_perm(self, letter_index: dict[str, int]) -> tuple[int, ...]:
        d = len(letter_index)
        perm = list(range(d))
        seen: set[int] = set()
        self.expect("punct", "(")
        first = True
        while True:
            cycle: list[int] = []
            while self.peek().kind == "name":
                tok = self.next()
                if tok.value not in letter_index:
                    raise InvalidRecursion(f"unknown letter {tok.value!r} in permutation")
                idx = letter_index[tok.value]
                if idx in seen:
                    raise InvalidRecursion(
                        f"letter {tok.value!r} appears twice in a permutation"
                    )
                seen.add(idx)
                cycle.append(idx)
            self.expect("punct", ")")
            if not cycle and not first:
                raise self.fail("empty cycle")
            for i, idx in enumerate(cycle):
                perm[idx] = cycle[(i + 1) % len(cycle)]
            first = False
            if not (self.peek().kind == "punct" and self.peek().value == "("):
                break
            self.next()
        return tuple(perm)

    def parse_sections(self, d: int, gen_name: str) -> tuple[Word, ...]:
        self.expect("punct", "[")
        words = [self.parse_word()]
        while self.peek().kind == "punct" and self.peek().value == ",":
            self.next()
            words.append(self.parse_word())
        self.expect("punct", "]")
        if len(words) != d:
            raise InvalidRecursion(
                f"generator {gen_name!r} needs {d} section words, got {len(words)}"
            )
        return tuple(words)

    def parse_word(self) -> Word:
        factors: list[Factor] = []
        if not self.peek().kind == "name":
            raise self.fail("expected a word")
        while self.peek().kind == "name":
            tok = self.next()
            if tok.value == "1" and not factors and self.peek().kind != "name" \
                    and self.peek().kind != "inv":
                return ()
            exp = 1
            if self.peek().kind == "inv":
                self.next()
                exp = -1
            factors.append((tok.value, exp))
        return free_reduce(factors)


def parse_recursion(text: str) -> WreathRecursion:
    """Parse a group-definition file into a validated WreathRecursion."""
    return _Parser(text).parse_file()


def parse_word(rec: WreathRecursion, text: str) -> Word:
    """Parse a single word ("1", "u v^-1", ...) in the recursion's generators."""
    tokens = _tokenize(text)
    factors: list[Factor] = []
    i = 0
    while tokens[i].kind != "eof":
        tok = tokens[i]
        if tok.kind != "name":
            raise ParseError(f"unexpected {tok.value!r} in word", tok.line, tok.col)
        i += 1
        if tok.value == "1":
            continue
        exp = 1
        if tokens[i].kind == "inv":
            exp = -1
            i += 1
        if tok.value not in rec.rules:
            raise InvalidRecursion(f"symbol {tok.value!r} undeclared")
        factors.append((tok.value, exp))
    return free_reduce(factors)


def _format_perm(rec: WreathRecursion, perm: tuple[int, ...]) -> str:
    letters = rec.alphabet.letters
    cycles: list[list[int]] = []
    seen: set[int] = set()
    for start in range(len(letters)):
        if start in seen or perm[start] == start:
            continue
        cycle = [start]
        seen.add(start)
        nxt = perm[start]
        while nxt != start:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = perm[nxt]
        cycles.append(cycle)
    if not cycles:
        return "()"
    return "".join("(" + " ".join(letters[i] for i in c) + ")" for c in cycles)


def pretty_print(rec: WreathRecursion) -> str:
    """Canonical text form; parse_recursion(pretty_print(r)) == r."""
    lines = ["alphabet = " + " ".join(rec.alphabet.letters)]
    for name in rec.names:
        rule = rec.rules[name]
        sections = ", ".join(format_word(w) for w in rule.sections)
        lines.append(f"{name} = {_format_perm(rec, rule.perm)}[{sections}]")
    return "\n".join(lines) + "\n"
