"""Canonical JSON wire format for conditions.

Only the recursive structure is written; ``u``, ``F``, ``ht``, ``h`` and
``g`` are recomputed (and therefore re-validated) on load.

    {"width": T, "node": NODE}
    NODE = {"atomic": i}
         | {"amalgam": {"zeta_star": z, "tau_star": TERM, "heart": [...],
                        "parts": [{"node": NODE, "v": [...]}, ...]}}
    TERM = ["const", 0|1] | ["var", k] | ["not", TERM]
         | ["and", TERM, TERM] | ["or", TERM, TERM]
"""
from __future__ import annotations

import hashlib
import json

from .algebra import And, BoolTerm, Const, Not, Or, Var
from .errors import FormatError
from .poset import Condition, amalgamate, atomic

__all__ = ["encode", "decode", "term_to_json", "term_from_json", "condition_id", "dumps", "loads"]


def term_to_json(term: BoolTerm):
    if isinstance(term, Const):
        return ["const", term.value]
    if isinstance(term, Var):
        return ["var", term.slot]
    if isinstance(term, Not):
        return ["not", term_to_json(term.arg)]
    tag = "and" if isinstance(term, And) else "or"
    return [tag, term_to_json(term.left), term_to_json(term.right)]


def term_from_json(obj) -> BoolTerm:
    if not isinstance(obj, list) or not obj:
        raise FormatError(f"malformed term: {obj!r}")
    tag, args = obj[0], obj[1:]
    if tag == "const" and len(args) == 1 and args[0] in (0, 1) and type(args[0]) is int:
        return Const(args[0])
    if tag == "var" and len(args) == 1 and type(args[0]) is int and args[0] >= 0:
        return Var(args[0])
    if tag == "not" and len(args) == 1:
        return Not(term_from_json(args[0]))
    if tag in ("and", "or") and len(args) == 2:
        cls = And if tag == "and" else Or
        return cls(term_from_json(args[0]), term_from_json(args[1]))
    raise FormatError(f"malformed term: {obj!r}")


def _node(p: Condition):
    if p.is_atomic:
        return {"atomic": p.index}
    return {"amalgam": {
        "zeta_star": p.zeta_star,
        "tau_star": term_to_json(p.tau_star),
        "heart": list(p.heart),
        "parts": [{"node": _node(c), "v": list(v)} for c, v in zip(p.parts, p.vs)],
    }}


def encode(p: Condition, width=None) -> dict:
    width = p.width if p.width is not None else width
    if width is None:
        raise FormatError("an atomic condition needs an explicit width to be serialized")
    return {"width": width, "node": _node(p)}


def dumps(p: Condition, width=None) -> str:
    """Canonical text: compact separators, keys in schema order, trailing newline."""
    return json.dumps(encode(p, width), separators=(",", ":")) + "\n"


def _index_list(obj, what):
    if not isinstance(obj, list) or any(type(i) is not int or i < 0 for i in obj):
        raise FormatError(f"{what} must be a list of natural numbers: {obj!r}")
    if obj != sorted(set(obj)):
        raise FormatError(f"{what} must be sorted ascending without repeats: {obj!r}")
    return obj


def _keys(obj, keys, what):
    if not isinstance(obj, dict) or list(obj) != keys:
        raise FormatError(f"{what} must be an object with keys {keys}: {obj!r}")


def _decode_node(obj, width):
    if isinstance(obj, dict) and list(obj) == ["atomic"]:
        i = obj["atomic"]
        if type(i) is not int or i < 0:
            raise FormatError(f"atomic index must be a natural number: {i!r}")
        return atomic(i, width)
    _keys(obj, ["amalgam"], "node")
    body = obj["amalgam"]
    _keys(body, ["zeta_star", "tau_star", "heart", "parts"], "amalgam")
    if type(body["zeta_star"]) is not int:
        raise FormatError("zeta_star must be an integer")
    tau = term_from_json(body["tau_star"])
    heart = _index_list(body["heart"], "heart")
    if not isinstance(body["parts"], list):
        raise FormatError("parts must be a list")
    if len(body["parts"]) != width:
        raise FormatError(f"amalgam has {len(body['parts'])} parts but the width is {width}")
    parts = []
    for part in body["parts"]:
        _keys(part, ["node", "v"], "part")
        parts.append((_decode_node(part["node"], width), _index_list(part["v"], "v")))
    return amalgamate(body["zeta_star"], tau, heart, parts)


def decode(obj) -> Condition:
    """Rebuild a condition; format problems raise :class:`FormatError`, clause
    violations propagate from the constructor."""
    _keys(obj, ["width", "node"], "document")
    width = obj["width"]
    if type(width) is not int or width < 2:
        raise FormatError(f"width must be an integer >= 2: {width!r}")
    return _decode_node(obj["node"], width)


def loads(text: str) -> Condition:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not JSON: {exc}") from None
    return decode(obj)


def condition_id(p: Condition, width=None) -> str:
    return hashlib.sha256(dumps(p, width).encode()).hexdigest()[:16]
