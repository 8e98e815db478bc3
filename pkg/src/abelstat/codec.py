"""JSON encoding of sets, sequences, functions, intervals and families.

Every object is a tagged dict, e.g. ``{"type": "ap", "a": 1, "d": 3}``.
Decoding errors carry the JSON path of the offending node.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

from abelstat import functions as fn
from abelstat import index_sets as ix
from abelstat import sequences as sq
from abelstat.convergence import IntervalSpec


class SchemaError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _get(node: dict, key: str, path: str, kind=float):
    if not isinstance(node, dict):
        raise SchemaError(path, f"expected an object, got {type(node).__name__}")
    if key not in node:
        raise SchemaError(f"{path}.{key}", "missing field")
    value = node[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaError(f"{path}.{key}", f"expected a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaError(f"{path}.{key}", f"expected an integer, got {value!r}")
        return value
    return value


def _tag(node: Any, path: str) -> str:
    if not isinstance(node, dict) or not isinstance(node.get("type"), str):
        raise SchemaError(path, "expected an object with a string 'type' field")
    return node["type"]


def _wrap(path: str, make):
    try:
        return make()
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from None


def decode_set(node: Any, path: str = "$") -> ix.IndexSet:
    t = _tag(node, path)
    if t == "empty":
        return ix.Empty()
    if t == "full":
        return ix.Full()
    if t == "finite":
        elems = _get(node, "elements", path, kind=list)
        if not isinstance(elems, list) or not all(isinstance(e, int) and not isinstance(e, bool) for e in elems):
            raise SchemaError(f"{path}.elements", "expected a list of integers")
        return _wrap(path, lambda: ix.Finite(tuple(elems)))
    if t == "ap":
        a, d = _get(node, "a", path, int), _get(node, "d", path, int)
        return _wrap(path, lambda: ix.ArithmeticProgression(a, d))
    if t in ("exp_gaps", "exponential_gaps"):
        c, r = _get(node, "c", path), _get(node, "r", path)
        return _wrap(path, lambda: ix.ExponentialGaps(c, r))
    if t == "union":
        return ix.Union(decode_set(_get(node, "left", path, None), f"{path}.left"),
                        decode_set(_get(node, "right", path, None), f"{path}.right"))
    if t == "intersection":
        return ix.Intersection(decode_set(_get(node, "left", path, None), f"{path}.left"),
                               decode_set(_get(node, "right", path, None), f"{path}.right"))
    if t == "complement":
        return ix.Complement(decode_set(_get(node, "inner", path, None), f"{path}.inner"))
    if t == "exceedance":
        seq = decode_sequence(_get(node, "seq", path, None), f"{path}.seq")
        L, eps = _get(node, "L", path), _get(node, "eps", path)
        return _wrap(path, lambda: ix.exceedance_set(seq, L, eps))
    raise SchemaError(f"{path}.type", f"unknown set type {t!r}")


def encode_set(s: ix.IndexSet) -> dict:
    if isinstance(s, ix.Empty):
        return {"type": "empty"}
    if isinstance(s, ix.Full):
        return {"type": "full"}
    if isinstance(s, ix.Finite):
        return {"type": "finite", "elements": list(s.elements)}
    if isinstance(s, ix.ArithmeticProgression):
        return {"type": "ap", "a": s.a, "d": s.d}
    if isinstance(s, ix.ExponentialGaps):
        return {"type": "exp_gaps", "c": s.c, "r": s.r}
    if isinstance(s, (ix.Union, ix.Intersection)):
        tag = "union" if isinstance(s, ix.Union) else "intersection"
        return {"type": tag, "left": encode_set(s.left), "right": encode_set(s.right)}
    if isinstance(s, ix.Complement):
        return {"type": "complement", "inner": encode_set(s.inner)}
    if isinstance(s, ix.Exceedance):
        return {"type": "exceedance", "seq": encode_sequence(s.seq), "L": s.L, "eps": s.eps}
    raise TypeError(f"cannot encode {s!r}")


def decode_sequence(node: Any, path: str = "$") -> sq.SequenceSpec:
    if isinstance(node, str):
        if node not in sq.CATALOG:
            raise SchemaError(path, f"unknown catalog sequence {node!r}; known: {', '.join(sq.CATALOG)}")
        return sq.CATALOG[node]
    t = _tag(node, path)
    if t == "constant":
        return sq.Constant(_get(node, "c", path))
    if t == "harmonic":
        return sq.Harmonic(_get(node, "L", path))
    if t == "alternating":
        return sq.Alternating(_get(node, "L", path), _get(node, "amp", path))
    if t == "alternating_decay":
        return sq.AlternatingDecay(_get(node, "L", path))
    if t == "linear":
        return sq.Linear(_get(node, "a", path), _get(node, "b", path))
    if t == "spiked":
        return sq.Spiked(decode_sequence(_get(node, "base", path, None), f"{path}.base"),
                         decode_set(_get(node, "support", path, None), f"{path}.support"),
                         decode_sequence(_get(node, "spike", path, None), f"{path}.spike"))
    if t == "sum":
        return sq.Sum(decode_sequence(_get(node, "a", path, None), f"{path}.a"),
                      decode_sequence(_get(node, "b", path, None), f"{path}.b"))
    if t == "scaled":
        return sq.Scaled(_get(node, "c", path), decode_sequence(_get(node, "inner", path, None), f"{path}.inner"))
    if t == "mapped":
        return sq.Mapped(decode_function(_get(node, "f", path, None), f"{path}.f"),
                         decode_sequence(_get(node, "inner", path, None), f"{path}.inner"))
    if t == "subsequence":
        return sq.Subsequence(decode_sequence(_get(node, "inner", path, None), f"{path}.inner"),
                              decode_set(_get(node, "selector", path, None), f"{path}.selector"))
    if t == "catalog":
        return decode_sequence(_get(node, "name", path, None), f"{path}.name")
    raise SchemaError(f"{path}.type", f"unknown sequence type {t!r}")


def encode_sequence(s: sq.SequenceSpec) -> dict:
    if isinstance(s, sq.Constant):
        return {"type": "constant", "c": s.c}
    if isinstance(s, sq.Harmonic):
        return {"type": "harmonic", "L": s.L}
    if isinstance(s, sq.Alternating):
        return {"type": "alternating", "L": s.L, "amp": s.amp}
    if isinstance(s, sq.AlternatingDecay):
        return {"type": "alternating_decay", "L": s.L}
    if isinstance(s, sq.Linear):
        return {"type": "linear", "a": s.a, "b": s.b}
    if isinstance(s, sq.Spiked):
        return {"type": "spiked", "base": encode_sequence(s.base), "support": encode_set(s.support),
                "spike": encode_sequence(s.spike)}
    if isinstance(s, sq.Sum):
        return {"type": "sum", "a": encode_sequence(s.a), "b": encode_sequence(s.b)}
    if isinstance(s, sq.Scaled):
        return {"type": "scaled", "c": s.c, "inner": encode_sequence(s.inner)}
    if isinstance(s, sq.Mapped):
        return {"type": "mapped", "f": encode_function(s.f), "inner": encode_sequence(s.inner)}
    if isinstance(s, sq.Subsequence):
        return {"type": "subsequence", "inner": encode_sequence(s.inner), "selector": encode_set(s.selector)}
    raise TypeError(f"cannot encode {s!r}")


def decode_function(node: Any, path: str = "$") -> fn.FunctionSpec:
    if isinstance(node, str):
        if node not in fn.CATALOG:
            raise SchemaError(path, f"unknown catalog function {node!r}; known: {', '.join(fn.CATALOG)}")
        return fn.CATALOG[node]
    t = _tag(node, path)
    if t == "identity":
        return fn.Identity()
    if t == "abs":
        return fn.Abs()
    if t == "polynomial":
        coeffs = _get(node, "coeffs", path, list)
        if not isinstance(coeffs, list) or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in coeffs):
            raise SchemaError(f"{path}.coeffs", "expected a list of numbers")
        return _wrap(path, lambda: fn.Polynomial(tuple(coeffs)))
    if t == "step":
        return fn.Step(_get(node, "threshold", path), _get(node, "lo", path), _get(node, "hi", path))
    if t == "bounded_oscillation":
        return fn.BoundedOscillation(float(node.get("at_zero", 0.0)))
    if t == "scaled":
        return fn.Scale(_get(node, "c", path), decode_function(_get(node, "inner", path, None), f"{path}.inner"))
    if t in ("sum", "product", "compose"):
        f = decode_function(_get(node, "f", path, None), f"{path}.f")
        g = decode_function(_get(node, "g", path, None), f"{path}.g")
        return {"sum": fn.Add, "product": fn.Product, "compose": fn.Compose}[t](f, g)
    if t == "catalog":
        return decode_function(_get(node, "name", path, None), f"{path}.name")
    raise SchemaError(f"{path}.type", f"unknown function type {t!r}")


def encode_function(f: fn.FunctionSpec) -> dict:
    if isinstance(f, fn.Identity):
        return {"type": "identity"}
    if isinstance(f, fn.Abs):
        return {"type": "abs"}
    if isinstance(f, fn.Polynomial):
        return {"type": "polynomial", "coeffs": list(f.coeffs)}
    if isinstance(f, fn.Step):
        return {"type": "step", "threshold": f.threshold, "lo": f.lo, "hi": f.hi}
    if isinstance(f, fn.BoundedOscillation):
        return {"type": "bounded_oscillation", "at_zero": f.at_zero}
    if isinstance(f, fn.Scale):
        return {"type": "scaled", "c": f.c, "inner": encode_function(f.inner)}
    if isinstance(f, (fn.Add, fn.Product, fn.Compose)):
        tag = {fn.Add: "sum", fn.Product: "product", fn.Compose: "compose"}[type(f)]
        return {"type": tag, "f": encode_function(f.f), "g": encode_function(f.g)}
    raise TypeError(f"cannot encode {f!r}")


def _endpoint(value, path) -> float:
    if value is None:
        return math.nan
    if isinstance(value, str) and value.lstrip("+-") in ("inf", "infinity"):
        return -math.inf if value.startswith("-") else math.inf
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    raise SchemaError(path, f"expected a number or '±inf', got {value!r}")


def decode_interval(node: Any, path: str = "$") -> IntervalSpec:
    if isinstance(node, str):
        return _wrap(path, lambda: IntervalSpec.parse(node))
    if not isinstance(node, dict):
        raise SchemaError(path, "expected an interval object or string like '(-1, 1]'")
    lo = _endpoint(node.get("lower", "-inf"), f"{path}.lower")
    hi = _endpoint(node.get("upper", "inf"), f"{path}.upper")
    return _wrap(path, lambda: IntervalSpec(lo, hi, bool(node.get("lower_closed", False)),
                                            bool(node.get("upper_closed", False))))


def encode_interval(E: IntervalSpec) -> dict:
    def end(v):
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")

    return {"lower": end(E.lower), "upper": end(E.upper), "lower_closed": E.lower_closed,
            "upper_closed": E.upper_closed}


def decode_family(node: Any, path: str = "$"):
    """``"standard"`` or ``{"name": ..., "members": [{"name", "seq", "limit"}]}``.

    A member ``limit`` of null (or ``"divergent"``) marks a divergent control.
    Returns ``(name, members)``; validation happens in ``build_family``.
    """
    from abelstat.continuity import FamilyMember

    if node == "standard":
        return "standard", None
    if not isinstance(node, dict):
        raise SchemaError(path, "expected 'standard' or a family object")
    raw = _get(node, "members", path, list)
    if not isinstance(raw, list) or not raw:
        raise SchemaError(f"{path}.members", "expected a non-empty list")
    members = []
    for i, m in enumerate(raw):
        p = f"{path}.members[{i}]"
        limit = m.get("limit") if isinstance(m, dict) else None
        if limit == "divergent":
            limit = None
        if limit is not None:
            limit = _get(m, "limit", p)
        members.append(FamilyMember(str(m.get("name", f"member_{i}")),
                                    decode_sequence(_get(m, "seq", p, None), f"{p}.seq"), limit))
    return str(node.get("name", "custom")), members


def encode_family(family) -> dict:
    return {
        "name": family.name,
        "provenance": family.provenance,
        "members": [{"name": m.name, "seq": encode_sequence(m.seq), "limit": m.limit} for m in family.members],
    }


def load_json_arg(text: str) -> Any:
    """Inline JSON, or a path to a JSON file; bare words are returned as strings."""
    stripped = text.strip()
    if stripped[:1] in "{[\"" or stripped in ("null", "true", "false") or _is_number(stripped):
        return json.loads(stripped)
    path = Path(text)
    if path.exists():
        return json.loads(path.read_text())
    return stripped


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True
