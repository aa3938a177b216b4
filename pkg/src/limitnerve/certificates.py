"""Combinatorial contraction certificates.

The multinucleus depth is the least n such that every set (N.A)|_v, for A
an adjacency set and |v| = n, is again an adjacency simplex after
translation.  The barycenter certificate records, for each g in each
adjacency set and each word of that length, the simplex (N.g)|_v and
verifies the containment chain g|_v in (N.g)|_v in (N.A)|_v together with
the common-vertex fact g0|_v in (N.g)|_v for every g0 in A.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CertificateFailure, ConsistencyError
from .nerve import NerveData, set_label, set_sort_key, translate_set
from .nucleus import level_words, word_label
from .recursion import format_word


class NotFoundWithinBound(Exception):
    """No multinucleus depth up to the requested bound (diagnostic only)."""


def _normalize(nerve: NerveData, ids: frozenset) -> frozenset:
    """Translate a subset of G so it contains the identity, canonically."""
    session = nerve.session
    return min(
        (translate_set(session, ids, g) for g in ids),
        key=lambda s: set_sort_key(session, s),
    )


def _is_adjacency_simplex(nerve: NerveData, ids: frozenset) -> bool:
    return _normalize(nerve, ids) in nerve.set_index


def _deep_image(nerve: NerveData, ids, v) -> frozenset:
    session = nerve.session
    return frozenset(session.section_id(m, v) for m in ids)


def _products_with_nucleus(nerve: NerveData, aset) -> frozenset:
    session = nerve.session
    return frozenset(
        session.multiply_ids(m, a) for m in nerve.nucleus.ids for a in aset
    )


def _depth_condition(nerve: NerveData, n: int) -> bool:
    alphabet = nerve.session.rec.alphabet
    words = level_words(alphabet, n)
    for aset in nerve.sets:
        products = _products_with_nucleus(nerve, aset)
        for v in words:
            if not _is_adjacency_simplex(nerve, _deep_image(nerve, products, v)):
                return False
    return True


def multinucleus_depth(nerve: NerveData, max_n: int = 8) -> int:
    """Least n <= max_n with (N.A)|_v an adjacency simplex for all A and
    all |v| = n; monotonicity is spot-checked at n + 1."""
    for n in range(max_n + 1):
        if _depth_condition(nerve, n):
            if n + 1 <= max_n and not _depth_condition(nerve, n + 1):
                raise ConsistencyError(
                    f"multinucleus condition holds at {n} but fails at {n + 1}"
                )
            return n
    raise NotFoundWithinBound(f"no multinucleus depth up to {max_n}")


@dataclass
class ContractionCertificate:
    depth: int
    level: int  # word length the images were computed at (>= depth)
    images: dict  # (gid, v) -> orbit representative of (N.g)|_v (normalized)
    containments: tuple  # verified (A, gid, v) triples
    nerve: NerveData

    def to_json_dict(self) -> dict:
        session = self.nerve.session
        rows = []
        for aset, gid, v in self.containments:
            image = self.images[(gid, v)]
            rows.append(
                {
                    "A": set_label(session, aset),
                    "g": format_word(session.rep(gid).word),
                    "v": word_label(v),
                    "image": [
                        format_word(session.rep(m).word)
                        for m in sorted(image, key=session.sort_key)
                    ],
                }
            )
        return {"depth": self.depth, "level": self.level, "rows": rows}


def barycenter_images(
    nerve: NerveData, n: int | None = None, max_depth: int = 8
) -> ContractionCertificate:
    """Record the simplices (N.g)|_v and verify every containment of the
    contraction certificate at word length n (default: the depth itself)."""
    depth = multinucleus_depth(nerve, max_depth)
    if n is None:
        n = depth
    if n < depth:
        raise ValueError(f"need n >= multinucleus depth {depth}")
    session = nerve.session
    nucleus = nerve.nucleus
    words = level_words(session.rec.alphabet, n)
    images: dict = {}
    containments = []
    for aset in nerve.sets:
        big_products = _products_with_nucleus(nerve, aset)
        for v in words:
            big_image = _deep_image(nerve, big_products, v)
            if not _is_adjacency_simplex(nerve, big_image):
                raise CertificateFailure(
                    "(N.A)|_v is not an adjacency simplex",
                    witness=(set_label(session, aset), None, word_label(v)),
                )
            common = {session.section_id(g0, v) for g0 in aset}
            for g in sorted(aset, key=session.sort_key):
                products = frozenset(
                    session.multiply_ids(m, g) for m in nucleus.ids
                )
                image = _deep_image(nerve, products, v)
                witness = (set_label(session, aset), nucleus.word_str(g) if g in nucleus.ids else g, word_label(v))
                if session.section_id(g, v) not in image:
                    raise CertificateFailure("g|_v not in (N.g)|_v", witness=witness)
                if not image <= big_image:
                    raise CertificateFailure(
                        "(N.g)|_v not contained in (N.A)|_v", witness=witness
                    )
                if not common <= image:
                    raise CertificateFailure(
                        "common vertex g0|_v missing from (N.g)|_v", witness=witness
                    )
                if not _is_adjacency_simplex(nerve, image):
                    raise CertificateFailure(
                        "(N.g)|_v is not an adjacency simplex", witness=witness
                    )
                if not (len(image) <= len(big_image) <= len(nucleus.ids)):
                    raise CertificateFailure("dimension bound violated", witness=witness)
                images[(g, v)] = _normalize(nerve, image)
                containments.append((aset, g, v))
    return ContractionCertificate(
        depth=depth, level=n, images=images, containments=tuple(containments), nerve=nerve
    )
