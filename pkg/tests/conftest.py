from __future__ import annotations

import pytest

from limitnerve import Session, parse_recursion

TORUS = """\
alphabet = 0 1
u = (0 1)[1, u v]
v = (0 1)[u^-1, v]
"""

ADDER = """\
alphabet = 0 1
a = (0 1)[1, a]
"""

NONCONTRACTING = """\
alphabet = 0 1
a = (0 1)[a, b]
b = ()[a, b]
"""

TRIVIAL = """\
alphabet = 0 1
e = ()[1, 1]
"""

INERT = """\
alphabet = 0 1
g = ()[g, g]
"""

# Fornaess-Sibony recursion over 4 letters; al and a act by the double
# transpositions (12)(34) and (13)(24) with trivial sections.
FS = """\
alphabet = 1 2 3 4
al = (1 2)(3 4)[1, 1, 1, 1]
a = (1 3)(2 4)[1, 1, 1, 1]
be = ()[al, ga, al, ga]
b = ()[a al, a al, c, c]
ga = ()[be, 1, 1, be]
c = ()[b be, b be, b, b]
"""


@pytest.fixture(scope="session")
def torus_rec():
    return parse_recursion(TORUS)


@pytest.fixture(scope="session")
def adder_rec():
    return parse_recursion(ADDER)


@pytest.fixture()
def torus(torus_rec):
    return Session(torus_rec)


@pytest.fixture()
def adder(adder_rec):
    return Session(adder_rec)
