"""Instance and result documents (JSON) with schema checks."""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

from .errors import ParseError, SchemaError
from .exact import is_clique, is_hitting_set, is_packing, is_proper_colouring
from .geometry import DEFAULT_EPS, Point, Square, SquareFamily, Tolerance, contains_point

SCHEMA = "squarehit/1"
RESULT_SCHEMA = "squarehit-result/1"
EPS_ENV = "SQUAREHIT_EPS"


def default_eps() -> float:
    """Tolerance from SQUAREHIT_EPS, else the library default."""
    raw = os.environ.get(EPS_ENV)
    if raw is None or raw == "":
        return DEFAULT_EPS
    try:
        eps = float(raw)
    except ValueError as exc:
        raise SchemaError(f"{EPS_ENV}={raw!r} is not a number") from exc
    Tolerance(eps)  # range check
    return eps


def _num(x: float) -> float:
    # repr-based JSON floats round-trip exactly (at most 17 significant digits)
    return float(x)


def _dumps(obj: Any) -> str:
    return json.dumps(obj, indent=1, sort_keys=False, allow_nan=False) + "\n"


# ------------------------------------------------------------------ instances


def instance_dict(fam: SquareFamily) -> dict:
    return {
        "version": SCHEMA,
        "tolerance": _num(fam.eps),
        "squares": [
            {"cx": _num(s.centre.x), "cy": _num(s.centre.y), "side": _num(s.side), "rot": _num(s.rot)}
            for s in fam
        ],
    }


def write_instance(fam: SquareFamily) -> bytes:
    return _dumps(instance_dict(fam)).encode()


def _loads(data) -> Any:
    text = data.decode() if isinstance(data, (bytes, bytearray)) else str(data)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _real(obj: dict, key: str, where: str, default: Optional[float] = None) -> float:
    if key not in obj:
        if default is None:
            raise SchemaError(f"{where}.{key}: missing")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{where}.{key}: expected a number, got {v!r}")
    if not math.isfinite(v):
        raise SchemaError(f"{where}.{key}: must be finite")
    return float(v)


def parse_instance(doc: Any) -> SquareFamily:
    if not isinstance(doc, dict):
        raise SchemaError("document: expected an object")
    if doc.get("version") != SCHEMA:
        raise SchemaError(f"version: expected {SCHEMA!r}, got {doc.get('version')!r}")
    squares = doc.get("squares")
    if not isinstance(squares, list):
        raise SchemaError("squares: expected a list")
    eps = default_eps()
    if doc.get("tolerance") is not None:
        eps = _real(doc, "tolerance", "document")
        if not 0 < eps < 1e-3:
            raise SchemaError("document.tolerance: must lie in (0, 1e-3)")
    out = []
    for i, sq in enumerate(squares):
        where = f"squares[{i}]"
        if not isinstance(sq, dict):
            raise SchemaError(f"{where}: expected an object")
        unknown = set(sq) - {"cx", "cy", "side", "rot"}
        if unknown:
            raise SchemaError(f"{where}: unknown field(s) {sorted(unknown)}")
        side = _real(sq, "side", where)
        if side <= 0:
            raise SchemaError(f"{where}.side: must be positive, got {side!r}")
        out.append(Square((_real(sq, "cx", where), _real(sq, "cy", where)), side, _real(sq, "rot", where, 0.0)))
    return SquareFamily(tuple(out), Tolerance(eps))


def read_instance(data) -> SquareFamily:
    return parse_instance(_loads(data))


def instance_hash(fam: SquareFamily) -> str:
    return hashlib.sha256(write_instance(fam)).hexdigest()


# ------------------------------------------------------------------ results


@dataclass
class ResultDocument:
    instance_hash: str
    operation: str  # tau, nu, chi, omega, Delta, hit, colour
    parameters: dict
    value: Any
    witness: Any
    bound: Optional[float] = None
    seed: Optional[int] = None
    runtime: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["version"] = RESULT_SCHEMA
        return d

    def to_bytes(self) -> bytes:
        return _dumps(self.to_dict()).encode()


def witness_to_json(operation: str, witness: Any) -> Any:
    if operation in ("tau", "hit"):
        return [[_num(p[0]), _num(p[1])] for p in witness]
    if operation == "Delta":
        return None if witness is None else [_num(witness[0]), _num(witness[1])]
    return [int(v) for v in witness]


def read_result(data) -> ResultDocument:
    doc = _loads(data)
    if not isinstance(doc, dict) or doc.get("version") != RESULT_SCHEMA:
        raise SchemaError(f"version: expected {RESULT_SCHEMA!r}")
    try:
        return ResultDocument(
            instance_hash=doc["instance_hash"],
            operation=doc["operation"],
            parameters=doc.get("parameters", {}),
            value=doc["value"],
            witness=doc["witness"],
            bound=doc.get("bound"),
            seed=doc.get("seed"),
            runtime=doc.get("runtime"),
            extra=doc.get("extra", {}),
        )
    except KeyError as exc:
        raise SchemaError(f"result.{exc.args[0]}: missing") from exc


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str


def verify_result(doc: ResultDocument, fam: SquareFamily) -> Verdict:
    """Re-check the witness against the instance. Optimality of exact values
    is not re-proved; the witness must realise the claimed value and respect
    the claimed bound."""
    if doc.instance_hash != instance_hash(fam):
        return Verdict(False, "instance hash mismatch")
    op, w, n = doc.operation, doc.witness, len(fam)
    try:
        if op in ("tau", "hit"):
            pts = [Point(float(x), float(y)) for x, y in w]
            if not is_hitting_set(fam, pts):
                return Verdict(False, "some square is not hit")
            if len(pts) != doc.value:
                return Verdict(False, f"{len(pts)} points but value {doc.value}")
        elif op in ("nu", "omega"):
            idx = [int(i) for i in w]
            if len(set(idx)) != len(idx) or any(not 0 <= i < n for i in idx):
                return Verdict(False, "bad square indices")
            ok = is_packing(fam, idx) if op == "nu" else is_clique(fam, idx)
            if not ok:
                return Verdict(False, "witness is not a packing" if op == "nu" else "witness is not a clique")
            if len(idx) != doc.value:
                return Verdict(False, f"{len(idx)} squares but value {doc.value}")
        elif op in ("chi", "colour"):
            cols = [int(c) for c in w]
            if len(cols) != n or not is_proper_colouring(fam, cols):
                return Verdict(False, "colouring is not proper")
            if len(set(cols)) != doc.value:
                return Verdict(False, f"{len(set(cols))} colours but value {doc.value}")
        elif op == "Delta":
            if n == 0:
                return Verdict(doc.value == 0, "empty family")
            p = Point(float(w[0]), float(w[1]))
            depth = sum(contains_point(s, p, fam.tol) for s in fam)
            if depth != doc.value:
                return Verdict(False, f"point has depth {depth}, value {doc.value}")
        else:
            return Verdict(False, f"unknown operation {op!r}")
    except (TypeError, ValueError) as exc:
        return Verdict(False, f"malformed witness: {exc}")
    if doc.bound is not None and doc.value > doc.bound:
        return Verdict(False, f"value {doc.value} exceeds bound {doc.bound}")
    return Verdict(True, "ok")
