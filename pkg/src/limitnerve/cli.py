"""Command-line front end.

    limitnerve <nucleus|model|schreier|certificate|selfrep> --input FILE
               [--level N] [--out DIR] [--format json,dot]
               [--max-states K] [--max-word-length L] [--jobs J] [--seed S]

Exit codes: 0 success, 1 input error, 2 undecided within budget,
3 resource limit, 4 cross-validation or certificate failure.
The environment variable LIMITNERVE_BUDGET overrides the default
max_states.  Identical input and configuration produce byte-identical
output files.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

from .certificates import NotFoundWithinBound, barycenter_images
from .engine import UNDECIDED, EffortBudget, Session
from .errors import (
    BudgetExceeded,
    CertificateFailure,
    ConsistencyError,
    ResourceLimitExceeded,
    ValidationFailure,
)
from .models import (
    cross_validate,
    cutpaste_chain,
    direct_Jn,
    kappa_seed_pairs,
)
from .complexes import quotient_complex
from .nerve import build_nerve
from .nucleus import (
    Contracting,
    UnknownWithinBudget,
    is_contracting,
    moore_diagram,
    moore_diagram_to_dot,
    schreier_graph,
    schreier_graph_to_dot,
)
from .recursion import InvalidRecursion, ParseError, parse_recursion

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNDECIDED = 2
EXIT_RESOURCE = 3
EXIT_VALIDATION = 4


def _default_max_states() -> int:
    env = os.environ.get("LIMITNERVE_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            raise InvalidRecursion(f"LIMITNERVE_BUDGET is not an integer: {env!r}")
    return 10_000


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="limitnerve",
        description="Nucleus and simplicial limit-space approximations for "
        "self-similar groups given by wreath recursions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--input", required=True, help="group definition file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument(
            "--format",
            default="json,dot",
            help="comma-separated export formats (json, dot)",
        )
        p.add_argument("--max-states", type=int, default=None)
        p.add_argument("--max-word-length", type=int, default=64)
        p.add_argument("--jobs", type=int, default=1, help="worker cap (advisory)")
        p.add_argument("--seed", type=int, default=None,
                       help="run the seeded shuffle-confluence self-check")

    p = sub.add_parser("nucleus", help="compute the nucleus and Moore diagram")
    common(p)
    p = sub.add_parser("model", help="build J_0..J_n with cross-validation")
    common(p)
    p.add_argument("--level", type=int, default=0)
    p = sub.add_parser("schreier", help="level-n Schreier graph")
    common(p)
    p.add_argument("--level", type=int, default=1)
    p = sub.add_parser("certificate", help="contraction certificate")
    common(p)
    p.add_argument("--max-depth", type=int, default=8)
    p = sub.add_parser("selfrep", help="self-replication check")
    common(p)
    p.add_argument("--radius", type=int, default=2)
    return parser


def _session(args) -> Session:
    try:
        text = Path(args.input).read_text()
    except OSError as err:
        raise InvalidRecursion(f"cannot read {args.input}: {err}")
    rec = parse_recursion(text)
    max_states = args.max_states if args.max_states is not None else _default_max_states()
    budget = EffortBudget(max_states=max_states, max_word_length=args.max_word_length)
    return Session(rec, budget)


def _formats(args) -> set[str]:
    formats = {f.strip() for f in args.format.split(",") if f.strip()}
    unknown = formats - {"json", "dot"}
    if unknown:
        raise InvalidRecursion(f"unknown export formats: {sorted(unknown)}")
    return formats


def _write(args, name: str, text: str) -> None:
    if args.out is None:
        return
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)


def _json_text(data) -> str:
    return json.dumps(data, indent=2) + "\n"


def _require_nucleus(session: Session):
    verdict = is_contracting(session)
    if isinstance(verdict, UnknownWithinBudget):
        print(
            f"contraction unknown within budget "
            f"(max_states={session.budget.max_states})"
        )
        return None
    assert isinstance(verdict, Contracting)
    return verdict.nucleus


def cmd_nucleus(args) -> int:
    session = _session(args)
    nucleus = _require_nucleus(session)
    if nucleus is None:
        return EXIT_UNDECIDED
    words = [nucleus.word_str(cid) for cid in nucleus.ids]
    print(f"nucleus: {len(nucleus)} elements: " + " ".join(words))
    formats = _formats(args)
    if "dot" in formats:
        _write(args, "moore.dot", moore_diagram_to_dot(moore_diagram(nucleus)))
    if "json" in formats:
        _write(args, "nucleus.json", _json_text({"size": len(nucleus), "elements": words}))
    return EXIT_OK


def cmd_model(args) -> int:
    session = _session(args)
    nucleus = _require_nucleus(session)
    if nucleus is None:
        return EXIT_UNDECIDED
    nerve = build_nerve(nucleus)
    chain = cutpaste_chain(nerve, args.level)
    formats = _formats(args)
    report_lines = []
    for level in chain:
        cx = level.model.complex
        betti = cx.betti_mod2()
        report_lines.append(
            f"J_{level.model.level}: f_vector={list(cx.f_vector())} "
            f"euler={cx.euler()} betti_mod2={list(betti)}"
        )
        if "json" in formats:
            _write(args, f"J{level.model.level}.json", _json_text(level.model.to_json_dict()))
        if "dot" in formats:
            _write(args, f"J{level.model.level}.dot", cx.to_dot(f"J{level.model.level}"))
    for n in range(args.level + 1):
        result = cross_validate(nerve, n, cutpaste=chain[n])
        report_lines.append("cross-validate " + result.summary())
    if args.seed is not None:
        data = chain[-1].data
        seeds = kappa_seed_pairs(data)
        base = quotient_complex(data.tn, seeds)
        shuffled = list(seeds)
        random.Random(args.seed).shuffle(shuffled)
        redo = quotient_complex(data.tn, shuffled)
        if redo.cell_map != base.cell_map:
            raise ValidationFailure("shuffled identification order changed the quotient")
        report_lines.append(f"confluence check (seed {args.seed}): ok")
    report = "\n".join(report_lines) + "\n"
    print(report, end="")
    _write(args, "homology.txt", report)
    return EXIT_OK


def cmd_schreier(args) -> int:
    session = _session(args)
    nucleus = _require_nucleus(session)
    if nucleus is None:
        return EXIT_UNDECIDED
    graph = schreier_graph(nucleus, args.level)
    dot = schreier_graph_to_dot(graph, nucleus)
    print(
        f"schreier level {args.level}: {len(graph.vertices)} vertices, "
        f"{len(graph.simple_edges())} simple edges"
    )
    if "dot" in _formats(args):
        _write(args, f"schreier_{args.level}.dot", dot)
    if args.out is None:
        print(dot, end="")
    return EXIT_OK


def cmd_certificate(args) -> int:
    session = _session(args)
    nucleus = _require_nucleus(session)
    if nucleus is None:
        return EXIT_UNDECIDED
    nerve = build_nerve(nucleus)
    try:
        cert = barycenter_images(nerve, max_depth=args.max_depth)
    except NotFoundWithinBound as err:
        print(f"certificate: {err}")
        return EXIT_UNDECIDED
    print(
        f"certificate: depth {cert.depth}, {len(cert.containments)} verified containments"
    )
    if "json" in _formats(args):
        _write(args, "certificate.json", _json_text(cert.to_json_dict()))
    return EXIT_OK


def cmd_selfrep(args) -> int:
    session = _session(args)
    verdict = session.is_self_replicating(args.radius)
    if verdict is UNDECIDED:
        print(f"self-replicating: undecided (witness radius {args.radius})")
        return EXIT_UNDECIDED
    print(f"self-replicating: yes (witness radius {args.radius})")
    return EXIT_OK


_COMMANDS = {
    "nucleus": cmd_nucleus,
    "model": cmd_model,
    "schreier": cmd_schreier,
    "certificate": cmd_certificate,
    "selfrep": cmd_selfrep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ParseError, InvalidRecursion) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except (ResourceLimitExceeded, BudgetExceeded) as err:
        print(f"resource limit: {err}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValidationFailure, CertificateFailure, ConsistencyError) as err:
        print(f"validation failure: {err}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
