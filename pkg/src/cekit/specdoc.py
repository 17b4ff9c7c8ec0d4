"""Channel spec documents, format "v1".

A document is a JSON object ``{"version": "v1", "channel": NODE}``.  Every
NODE has a ``kind`` and the fields listed in :data:`FIELDS`; unknown fields
are rejected.  Complex numbers are ``[re, im]`` pairs (a bare real number is
also accepted), matrices are row-major nested lists.  Angles may be given
as numbers or as tokens such as ``"pi/4"``, ``"3*pi/8"``, ``"-pi"``.

Kinds::

    kraus                operators: [matrix, ...]
    classical            q: real matrix, q[b][a] = q(b|a)
    classical_to_quantum states: [matrix, ...]
    partial_swap         d, theta, p, phi (optional vector)
    superposed_paths     base: NODE, gammas: [complex, ...], sigma: matrix
    depolarizing         d, lambda
    discard_reprepare    d_in, state: matrix
    compose              channels: [NODE, ...]   (applied first to last)
    tensor               factors: [NODE, ...]
"""

from __future__ import annotations

import json
import math
import re
from typing import Any

import numpy as np

from . import channels as chn

VERSION = "v1"

FIELDS: dict[str, tuple[set[str], set[str]]] = {
    # kind: (required, optional)
    "kraus": ({"operators"}, set()),
    "classical": ({"q"}, set()),
    "classical_to_quantum": ({"states"}, set()),
    "partial_swap": ({"d", "theta", "p"}, {"phi"}),
    "superposed_paths": ({"base", "gammas", "sigma"}, set()),
    "depolarizing": ({"d", "lambda"}, set()),
    "discard_reprepare": ({"d_in", "state"}, set()),
    "compose": ({"channels"}, set()),
    "tensor": ({"factors"}, set()),
}


class SpecError(ValueError):
    """Malformed spec document; ``path`` names the offending field."""

    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path


_ANGLE = re.compile(r"^\s*(-)?\s*(?:(\d+(?:\.\d*)?)\s*\*\s*)?pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


def parse_angle(v, path: str = "theta") -> float:
    """Number, or a token ``[-][n*]pi[/m]``."""
    if isinstance(v, bool):
        raise SpecError(path, "expected a number or a pi token")
    if isinstance(v, (int, float)):
        if not math.isfinite(v):
            raise SpecError(path, "angle must be finite")
        return float(v)
    if isinstance(v, str):
        m = _ANGLE.match(v)
        if m:
            sign = -1.0 if m.group(1) else 1.0
            num = float(m.group(2)) if m.group(2) else 1.0
            den = float(m.group(3)) if m.group(3) else 1.0
            if den == 0:
                raise SpecError(path, "division by zero in angle")
            return sign * num * math.pi / den
        try:
            return float(v)
        except ValueError:
            pass
    raise SpecError(path, f"cannot read angle {v!r}")


def _number(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SpecError(path, f"expected a finite number, got {v!r}")
    return float(v)


def _int(v, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise SpecError(path, f"expected an integer, got {v!r}")
    return v


def _complex(v, path: str) -> complex:
    if isinstance(v, list):
        if len(v) != 2:
            raise SpecError(path, "complex numbers are [re, im] pairs")
        return complex(_number(v[0], path + "[0]"), _number(v[1], path + "[1]"))
    return complex(_number(v, path))


def _vector(v, path: str) -> np.ndarray:
    if not isinstance(v, list) or not v:
        raise SpecError(path, "expected a non-empty list")
    return np.array([_complex(x, f"{path}[{i}]") for i, x in enumerate(v)])


def _matrix(v, path: str, real: bool = False) -> np.ndarray:
    if not isinstance(v, list) or not v or not all(isinstance(r, list) for r in v):
        raise SpecError(path, "expected a row-major nested list")
    n = len(v[0])
    rows = []
    for i, r in enumerate(v):
        if len(r) != n:
            raise SpecError(f"{path}[{i}]", "ragged matrix row")
        if real:
            rows.append([_number(x, f"{path}[{i}][{j}]") for j, x in enumerate(r)])
        else:
            rows.append([_complex(x, f"{path}[{i}][{j}]") for j, x in enumerate(r)])
    return np.array(rows, dtype=float if real else complex)


def _nodes(v, path: str) -> list:
    if not isinstance(v, list) or not v:
        raise SpecError(path, "expected a non-empty list of channel nodes")
    return [build_channel(n, f"{path}[{i}]") for i, n in enumerate(v)]


def _check_fields(node, path: str) -> str:
    if not isinstance(node, dict):
        raise SpecError(path, "channel node must be an object")
    kind = node.get("kind")
    if kind not in FIELDS:
        raise SpecError(path + ".kind", f"unknown kind {kind!r}; expected one of {sorted(FIELDS)}")
    req, opt = FIELDS[kind]
    for k in node:
        if k != "kind" and k not in req | opt:
            raise SpecError(f"{path}.{k}", f"unknown field for kind {kind!r}")
    for k in sorted(req):
        if k not in node:
            raise SpecError(f"{path}.{k}", "missing required field")
    return kind


def build_channel(node: dict, path: str = "channel"):
    """Build a channel from a parsed node.

    Returns a :class:`~cekit.channels.StochasticChannel` for ``classical`` and
    a :class:`~cekit.channels.KrausChannel` otherwise.  Physics violations
    (non-CPTP, bad states) raise :class:`~cekit.channels.ChannelError` or
    other ``ValueError`` subclasses from the channel constructors.
    """
    kind = _check_fields(node, path)
    if kind == "kraus":
        ops = node["operators"]
        if not isinstance(ops, list) or not ops:
            raise SpecError(path + ".operators", "expected a non-empty list of matrices")
        mats = [_matrix(m, f"{path}.operators[{i}]") for i, m in enumerate(ops)]
        if len({m.shape for m in mats}) != 1:
            raise SpecError(path + ".operators", "Kraus operators must share one shape")
        return chn.KrausChannel(np.array(mats))
    if kind == "classical":
        return chn.StochasticChannel(_matrix(node["q"], path + ".q", real=True))
    if kind == "classical_to_quantum":
        sts = node["states"]
        if not isinstance(sts, list) or not sts:
            raise SpecError(path + ".states", "expected a non-empty list of matrices")
        return chn.classical_to_quantum([_matrix(m, f"{path}.states[{i}]") for i, m in enumerate(sts)])
    if kind == "partial_swap":
        d = _int(node["d"], path + ".d")
        theta = parse_angle(node["theta"], path + ".theta")
        p = _number(node["p"], path + ".p")
        phi = _vector(node["phi"], path + ".phi") if "phi" in node else None
        return chn.partial_swap_channel(d, theta, chn.sigma_lambda(d, p, phi))
    if kind == "superposed_paths":
        base = build_channel(node["base"], path + ".base")
        if not isinstance(base, chn.KrausChannel):
            raise SpecError(path + ".base", "base must be a quantum channel")
        spec = chn.PathChannelSpec(base, _vector(node["gammas"], path + ".gammas"),
                                   _matrix(node["sigma"], path + ".sigma"))
        return chn.superposed_paths(spec)
    if kind == "depolarizing":
        return chn.depolarizing(_int(node["d"], path + ".d"), _number(node["lambda"], path + ".lambda"))
    if kind == "discard_reprepare":
        return chn.discard_reprepare(_int(node["d_in"], path + ".d_in"), _matrix(node["state"], path + ".state"))
    if kind == "compose":
        chs = [_quantum(c, f"{path}.channels[{i}]") for i, c in enumerate(_nodes(node["channels"], path + ".channels"))]
        out = chs[0]
        for c in chs[1:]:
            out = chn.compose(c, out)
        return out
    if kind == "tensor":
        fs = [_quantum(c, f"{path}.factors[{i}]") for i, c in enumerate(_nodes(node["factors"], path + ".factors"))]
        out = fs[0]
        for c in fs[1:]:
            out = chn.tensor(out, c)
        return out
    raise AssertionError(kind)


def _quantum(ch, path):
    if isinstance(ch, chn.StochasticChannel):
        return chn.embed_classical(ch)
    return ch


def parse_document(text: str) -> dict:
    """Parse and structurally check a document (no physics validation)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError("$", f"invalid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise SpecError("$", "document must be a JSON object")
    for k in doc:
        if k not in ("version", "channel"):
            raise SpecError(k, "unknown top-level field")
    if doc.get("version") != VERSION:
        raise SpecError("version", f"expected {VERSION!r}, got {doc.get('version')!r}")
    if "channel" not in doc:
        raise SpecError("channel", "missing required field")
    return doc


def load_channel(text: str):
    doc = parse_document(text)
    return build_channel(doc["channel"])


def dump_document(doc: dict) -> str:
    """Canonical serialization: sorted keys, compact separators, newline."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


# --- helpers for writing documents ------------------------------------------------


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def matrix_to_json(m) -> list:
    m = np.asarray(m)
    return [[complex_to_json(x) for x in row] for row in m]


def kraus_document(ch: chn.KrausChannel) -> dict[str, Any]:
    return {"version": VERSION,
            "channel": {"kind": "kraus", "operators": [matrix_to_json(k) for k in ch.kraus]}}
