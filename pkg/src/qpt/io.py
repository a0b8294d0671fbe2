"""JSON formats for QPs and small helpers shared by the CLI.

A QP file looks like::

    {"vertices": ["1", "2", "3"],
     "arrows": [{"id": "a", "src": "1", "tgt": "2"}, ...],
     "potential": [{"coeff": "1/2", "cycle": ["a", "b", "c"]}, ...]}

Coefficients are exact rationals written "p/q" (or plain integers).
Arrows may carry an extra "comment" string; it is ignored when reading.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from .errors import ParseError
from .qp import QP, Arrow, Potential, Quiver, check_qp


def _coeff(x) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise ParseError(f"coefficient must be an integer or a 'p/q' string, got {x!r}")
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"bad coefficient {x!r}") from e


def qp_from_dict(data: Mapping[str, Any], validate: bool = True) -> QP:
    if not isinstance(data, Mapping):
        raise ParseError("QP document must be a JSON object")
    try:
        vertices = tuple(str(v) for v in data["vertices"])
        arrows = tuple(Arrow(str(a["id"]), str(a["src"]), str(a["tgt"])) for a in data.get("arrows", []))
        pot = Potential.of(
            (_coeff(t["coeff"]), tuple(str(x) for x in t["cycle"])) for t in data.get("potential", [])
        )
    except (KeyError, TypeError) as e:
        raise ParseError(f"malformed QP document: {e}") from e
    qp = QP(Quiver(vertices, arrows), pot)
    return check_qp(qp) if validate else qp


def qp_to_dict(qp: QP, comments: Optional[Mapping[str, str]] = None) -> Dict[str, Any]:
    arrows = []
    for a in qp.arrows:
        d = {"id": a.id, "src": a.src, "tgt": a.tgt}
        if comments and a.id in comments:
            d["comment"] = comments[a.id]
        arrows.append(d)
    return {
        "vertices": list(qp.vertices),
        "arrows": arrows,
        "potential": [{"coeff": str(c), "cycle": list(p)} for c, p in qp.potential.terms],
    }


def loads_qp(text: str, validate: bool = True) -> QP:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"not valid JSON: {e}") from e
    return qp_from_dict(data, validate)


def dumps_qp(qp: QP, comments: Optional[Mapping[str, str]] = None) -> str:
    return json.dumps(qp_to_dict(qp, comments), indent=2) + "\n"


def load_qp(path, validate: bool = True) -> QP:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    return loads_qp(text, validate)


def save_qp(qp: QP, path, comments: Optional[Mapping[str, str]] = None) -> None:
    Path(path).write_text(dumps_qp(qp, comments))


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"
