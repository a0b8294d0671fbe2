"""Command line interface: ``qpt <command> ...``.

Exit codes: 0 success, 1 invalid input, 2 unsupported computation,
3 search or degree bound exceeded, 4 a consistency check failed.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import errors
from .io import dumps_json, dumps_qp, load_qp
from .qp import QP, VertexSubset, canonical_form, mutate, restrict, validate_qp

EXIT_OK, EXIT_INVALID, EXIT_UNSUPPORTED, EXIT_BOUND, EXIT_CHECK = 0, 1, 2, 3, 4


def _subset(qp: QP, raw: Optional[str]) -> VertexSubset:
    if not raw:
        raise errors.InvalidInput("-I is required")
    return VertexSubset.of(qp, [v.strip() for v in raw.split(",") if v.strip()])


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    qp = load_qp(args.file, validate=False)
    found = validate_qp(qp)
    if not found:
        print(f"valid: {len(qp.vertices)} vertices, {len(qp.arrows)} arrows, {len(qp.potential.terms)} potential terms")
        return EXIT_OK
    for v in found:
        print(v)
    return EXIT_INVALID


def cmd_mutate(args) -> int:
    qp = load_qp(args.file)
    out = qp
    for k in args.k:
        out = mutate(out, k)
    if args.canonical:
        out = canonical_form(out)[0]
    _emit(dumps_qp(out), args.output)
    return EXIT_OK


def cmd_restrict(args) -> int:
    qp = load_qp(args.file)
    _emit(dumps_qp(restrict(qp, _subset(qp, args.I))), args.output)
    return EXIT_OK


def cmd_jacobian(args) -> int:
    from .pathalg import jacobian_dims

    qp = load_qp(args.file)
    gd = jacobian_dims(qp, args.max_degree)
    doc = {"verdict": gd.verdict, "dims": list(gd.dims), "total": gd.total, "note": gd.note}
    _emit(dumps_json(doc), args.output)
    return EXIT_BOUND if gd.verdict == "unknown" and args.strict else EXIT_OK


def cmd_eje(args) -> int:
    from .pathalg import eje_quiver

    qp = load_qp(args.file)
    eq = eje_quiver(qp, _subset(qp, args.I), args.max_degree)
    comments = {aid: "witness " + ".".join(p) for aid, p in eq.witnesses.items()}
    _emit(dumps_qp(eq.as_qp(), comments), args.output)
    return EXIT_OK


def _region(g, path: Optional[str]):
    from .exchange import induced_subgraph

    if not path:
        return g
    keys = json.loads(Path(path).read_text())
    try:
        return induced_subgraph(g, keys)
    except KeyError as e:
        raise errors.InvalidInput(str(e)) from e


def cmd_explore(args) -> int:
    from .exchange import explore, regularity_report

    qp = load_qp(args.file)
    g = _region(explore(qp, args.depth, args.direction), args.region)
    if args.json:
        Path(args.json).write_text(dumps_json(g.to_json()))
    if args.dot:
        Path(args.dot).write_text(g.to_dot())
    opaque = sum(1 for k in g.order if not g.heart(k).representable)
    reg = regularity_report(g)
    n = len(qp.vertices)
    bad = sum(1 for d in reg.values() if d != (n, n))
    print(f"hearts: {len(g.order)} ({opaque} opaque)")
    print(f"edges: {len(g.edges)}")
    print(f"fully expanded: {len(reg)}, not ({n},{n})-regular: {bad}")
    return EXIT_OK


def cmd_quotient(args) -> int:
    from .exchange import explore, quotient_graph, quotient_regularity

    qp = load_qp(args.file)
    sub = _subset(qp, args.I)
    g = _region(explore(qp, args.depth, args.direction), args.region)
    qg = quotient_graph(g, sub)
    if args.json:
        Path(args.json).write_text(dumps_json(qg.to_json()))
    if args.dot:
        Path(args.dot).write_text(qg.to_dot())
    reg = quotient_regularity(qg)
    m = len(sub.complement)
    bad = sum(1 for d in reg.values() if d != (m, m))
    print(f"classes: {len(qg.classes)}")
    print(f"edges: {len(qg.edges)}")
    print(f"fully expanded: {len(reg)}, not ({m},{m})-regular: {bad}")
    return EXIT_OK


def cmd_silting(args) -> int:
    from .silting import initial_silting, seg_explore, silting_mutate

    qp = load_qp(args.file)
    if args.words:
        rng = random.Random(args.seed)
        n = len(qp.vertices)
        for _ in range(args.words):
            s = initial_silting(qp)
            for _ in range(rng.randint(0, args.max_length)):
                s = silting_mutate(s, rng.randrange(n))
        print(f"pairing checked along {args.words} words (seed {args.seed})")
        return EXIT_OK
    sg = seg_explore(qp, args.depth)
    pos = {k: n for n, k in enumerate(sg.order)}
    doc = {
        "states": [
            {"id": pos[k], "g_matrix": [list(c) for c in sg.states[k].g_matrix], "heart": sg.states[k].heart.key}
            for k in sg.order
        ],
        "edges": [{"src": pos[s], "tgt": pos[t], "index": i, "label": lab} for s, t, i, lab in sg.edges],
    }
    if args.json:
        Path(args.json).write_text(dumps_json(doc))
    print(f"silting objects: {len(sg.order)}")
    print(f"edges: {len(sg.edges)}")
    return EXIT_OK


def cmd_lift(args) -> int:
    from .exchange import forward_tilt, lift_tilt_search, standard_heart

    qp = load_qp(args.file)
    sub = _subset(qp, args.I)
    h = standard_heart(qp)
    for i in args.tilt or []:
        h = forward_tilt(h, int(i))
    if args.k not in qp.vertices:
        raise errors.UnknownVertex(args.k)
    r = lift_tilt_search(h, qp.vertices.index(args.k), sub, args.bound)
    print(f"heart: {h.key}")
    print(f"tilts: {len(r.indices)}")
    for i, lab in zip(r.indices, r.labels):
        print(f"  {i} {lab}")
    print(f"lifted heart: {r.heart.key}")
    return EXIT_OK


def cmd_polygon(args) -> int:
    from .polygon import diagonal_d, exconvrep_sequence, load_pair, pair_to_dict, polygon_quiver

    pp, t = load_pair(args.file)
    flips, final = exconvrep_sequence(pp, t)
    fmt = lambda c: "none" if c is None else f"{c[0]}-{c[1]}"
    print(f"polygons: k={pp.k} l={pp.l}, shared edge {fmt(pp.shared)}")
    print(f"d_k: {fmt(diagonal_d(pp, 'k'))}, d_l: {fmt(diagonal_d(pp, 'l'))}")
    print("flips: " + (" ".join(fmt(c) for c in flips) or "none"))
    print("final: " + " ".join(fmt(c) for c in sorted(final)))
    if args.quiver:
        Path(args.quiver).write_text(dumps_qp(polygon_quiver(pp, t)))
    if args.final_quiver:
        Path(args.final_quiver).write_text(dumps_qp(polygon_quiver(pp, final)))
    if args.json:
        doc = {"flips": [list(c) for c in flips], "final": pair_to_dict(pp, final)}
        Path(args.json).write_text(dumps_json(doc))
    return EXIT_OK


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qpt", description="Quivers with potential, hearts and silting objects.")
    sp = p.add_subparsers(dest="command", required=True)

    c = sp.add_parser("validate", help="check a QP file")
    c.add_argument("file")
    c.set_defaults(func=cmd_validate)

    c = sp.add_parser("mutate", help="mutate at one or more vertices")
    c.add_argument("file")
    c.add_argument("-k", action="append", required=True, help="vertex; repeat to compose")
    c.add_argument("--canonical", action="store_true", help="print the canonical form")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_mutate)

    c = sp.add_parser("restrict", help="full subquiver on I with the potential supported there")
    c.add_argument("file")
    c.add_argument("-I", required=True, help="comma separated vertices")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_restrict)

    c = sp.add_parser("jacobian", help="graded dimensions of the Jacobian algebra")
    c.add_argument("file")
    c.add_argument("--max-degree", type=_positive)
    c.add_argument("--strict", action="store_true", help="exit 3 when the bound is reached")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_jacobian)

    c = sp.add_parser("eje", help="quiver of eJe for the complement of I")
    c.add_argument("file")
    c.add_argument("-I", required=True)
    c.add_argument("--max-degree", type=_positive)
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_eje)

    for name, func, help_ in (
        ("explore", cmd_explore, "exchange graph of hearts"),
        ("quotient", cmd_quotient, "quotient exchange graph for I"),
    ):
        c = sp.add_parser(name, help=help_)
        c.add_argument("file")
        if name == "quotient":
            c.add_argument("-I", required=True)
        c.add_argument("--depth", type=_nonneg, default=4)
        c.add_argument("--direction", choices=["forward", "both"], default="both")
        c.add_argument("--region", help="JSON list of heart keys to keep")
        c.add_argument("--dot")
        c.add_argument("--json")
        c.set_defaults(func=func)

    c = sp.add_parser("silting", help="silting exchange graph or random pairing checks")
    c.add_argument("file")
    c.add_argument("--depth", type=_nonneg, default=3)
    c.add_argument("--words", type=_nonneg, default=0, help="run this many random mutation words")
    c.add_argument("--max-length", type=_nonneg, default=12)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--json")
    c.set_defaults(func=cmd_silting)

    c = sp.add_parser("lift", help="tilts inside I clearing arrows into a simple")
    c.add_argument("file")
    c.add_argument("-I", required=True)
    c.add_argument("-k", required=True, help="vertex of the simple to lift")
    c.add_argument("--tilt", action="append", help="forward tilt the standard heart at this index first")
    c.add_argument("--bound", type=_positive, default=8)
    c.set_defaults(func=cmd_lift)

    c = sp.add_parser("polygon", help="flip script making d_k and d_l appear")
    c.add_argument("file")
    c.add_argument("--quiver", help="write the QP of the input triangulation")
    c.add_argument("--final-quiver", help="write the QP of the final triangulation")
    c.add_argument("--json")
    c.set_defaults(func=cmd_polygon)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except errors.InvalidInput as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except errors.Unsupported as e:
        print(f"unsupported: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except errors.BoundExceeded as e:
        print(f"bound exceeded: {e}", file=sys.stderr)
        return EXIT_BOUND
    except errors.QPTError as e:
        print(f"check failed: {e}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
