"""Certificate files: strict, versioned UTF-8 JSON.

Exact scalars are written as reduced fractions ``"p/q"`` with ``q > 0``;
float scalars as the shortest round-tripping decimal (``repr``).  Unknown
fields are rejected so that fixtures never silently lose data.  A file is
``"exact"`` only when every scalar in it is rational; exact files accept
fractions only.  In ``"float"`` files a placement written wholly in
fractions is read back as an exact motion.

Example::

    {
      "format_version": 1,
      "dim": 2,
      "mode": "translated",
      "arithmetic": "exact",
      "collection": {"kind": "moser_rectangles", "N": 1},
      "target": {"shape": "brick", "dims": ["1/1", "1/1"]},
      "placements": [{"piece_id": 1, "theta": ["1/1", "0/1", "0/1", "1/1"], "xi": ["0/1", "0/1"]}]
    }
"""
from __future__ import annotations

import json
import math
import re
from fractions import Fraction
from pathlib import Path

from .motions import EXACT, FLOAT, RigidMotion
from .shapes import (
    CUSTOM,
    MOSER_RECTANGLES,
    MOSER_SQUARES,
    Ball,
    Brick,
    Funnel,
    Homothet,
    Piece,
    PieceCollection,
    moser_collection,
)
from .verify import MODES, PackingCertificate

FORMAT_VERSION = 1

_FRACTION = re.compile(r"^(-?\d+)/(\d+)$")
_FLOAT = re.compile(r"^-?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?$")


class CertificateParseError(ValueError):
    pass


# scalars ---------------------------------------------------------------------


def format_scalar(v) -> str:
    if isinstance(v, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(v, (int, Fraction)):
        f = Fraction(v)
        return f"{f.numerator}/{f.denominator}"
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError("non-finite scalar")
        return repr(v)
    raise TypeError(f"unsupported scalar {v!r}")


def parse_scalar(text, allow_float: bool = True):
    if not isinstance(text, str):
        raise CertificateParseError(f"scalar must be a string, got {text!r}")
    m = _FRACTION.match(text)
    if m:
        p, q = int(m.group(1)), int(m.group(2))
        if q == 0:
            raise CertificateParseError(f"zero denominator in {text!r}")
        if math.gcd(p, q) != 1:
            raise CertificateParseError(f"fraction {text!r} is not reduced")
        return Fraction(p, q)
    if allow_float and _FLOAT.match(text):
        return float(text)
    raise CertificateParseError(f"bad scalar {text!r}")


# records -----------------------------------------------------------------------


def _strict(obj, name: str, required: set, optional: set = frozenset()) -> dict:
    if not isinstance(obj, dict):
        raise CertificateParseError(f"{name} must be an object")
    keys = set(obj)
    missing = required - keys
    if missing:
        raise CertificateParseError(f"{name} is missing {sorted(missing)}")
    extra = keys - required - set(optional)
    if extra:
        raise CertificateParseError(f"{name} has unknown fields {sorted(extra)}")
    return obj


def _int(v, name: str) -> int:
    if not isinstance(v, int) or isinstance(v, bool):
        raise CertificateParseError(f"{name} must be an integer")
    return v


def _scalars(seq, name: str, allow_float: bool) -> list:
    if not isinstance(seq, list):
        raise CertificateParseError(f"{name} must be a list")
    return [parse_scalar(s, allow_float) for s in seq]


def target_to_dict(target) -> dict:
    if isinstance(target, Brick):
        return {"shape": "brick", "dims": [format_scalar(d) for d in target.dims]}
    if isinstance(target, Ball):
        return {"shape": "ball", "radius": format_scalar(target.radius)}
    if isinstance(target, Homothet):
        return {"shape": "homothet", "lambda": format_scalar(target.lam), "base": target_to_dict(target.base)}
    if isinstance(target, Funnel):
        return {"shape": "funnel"}
    raise TypeError(f"unsupported target {target!r}")


def target_from_dict(obj, dim: int, allow_float: bool = True):
    if not isinstance(obj, dict) or "shape" not in obj:
        raise CertificateParseError("target needs a shape")
    shape = obj["shape"]
    try:
        if shape == "brick":
            _strict(obj, "target", {"shape", "dims"})
            dims = _scalars(obj["dims"], "target.dims", allow_float)
            if len(dims) != dim:
                raise CertificateParseError("target dims disagree with dim")
            return Brick(tuple(dims))
        if shape == "ball":
            _strict(obj, "target", {"shape", "radius"})
            return Ball(parse_scalar(obj["radius"], allow_float), dim)
        if shape == "homothet":
            _strict(obj, "target", {"shape", "lambda", "base"})
            return Homothet(target_from_dict(obj["base"], dim, allow_float), parse_scalar(obj["lambda"], allow_float))
        if shape == "funnel":
            _strict(obj, "target", {"shape"})
            if dim != 2:
                raise CertificateParseError("the funnel lives in the plane")
            return Funnel()
    except ValueError as exc:
        if isinstance(exc, CertificateParseError):
            raise
        raise CertificateParseError(str(exc)) from exc
    raise CertificateParseError(f"unknown target shape {shape!r}")


def collection_to_dict(coll: PieceCollection) -> dict:
    if coll.kind in (MOSER_RECTANGLES, MOSER_SQUARES):
        return {"kind": coll.kind, "N": coll.count}
    return {
        "kind": CUSTOM,
        "pieces": [{"id": p.id, "dims": [format_scalar(d) for d in p.dims]} for p in coll.pieces],
    }


def collection_from_dict(obj, dim: int, allow_float: bool = False) -> PieceCollection:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise CertificateParseError("collection needs a kind")
    kind = obj["kind"]
    try:
        if kind in (MOSER_RECTANGLES, MOSER_SQUARES):
            _strict(obj, "collection", {"kind", "N"})
            if dim != 2:
                raise CertificateParseError("Moser collections are planar")
            return moser_collection(kind, _int(obj["N"], "collection.N"))
        if kind == CUSTOM:
            _strict(obj, "collection", {"kind", "pieces"})
            if not isinstance(obj["pieces"], list) or not obj["pieces"]:
                raise CertificateParseError("collection.pieces must be a nonempty list")
            pieces = []
            for rec in obj["pieces"]:
                _strict(rec, "piece", {"id", "dims"})
                dims = _scalars(rec["dims"], "piece.dims", allow_float)
                if len(dims) != dim:
                    raise CertificateParseError("piece dims disagree with dim")
                pieces.append(Piece(_int(rec["id"], "piece.id"), tuple(dims)))
            return PieceCollection.custom(pieces)
    except ValueError as exc:
        if isinstance(exc, CertificateParseError):
            raise
        raise CertificateParseError(str(exc)) from exc
    raise CertificateParseError(f"unknown collection kind {kind!r}")


def _is_rational(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def _target_scalars(target) -> list:
    if isinstance(target, Brick):
        return list(target.dims)
    if isinstance(target, Ball):
        return [target.radius]
    if isinstance(target, Homothet):
        return [target.lam] + _target_scalars(target.base)
    return []


def file_arithmetic(cert: PackingCertificate) -> str:
    """``exact`` when every scalar in the certificate is rational, else ``float``."""
    scalars = _target_scalars(cert.target) + [d for p in cert.collection.pieces for d in p.dims]
    if cert.arithmetic == EXACT and all(_is_rational(v) for v in scalars):
        return EXACT
    return FLOAT


def certificate_to_dict(cert: PackingCertificate) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "dim": cert.dim,
        "mode": cert.mode,
        "arithmetic": file_arithmetic(cert),
        "collection": collection_to_dict(cert.collection),
        "target": target_to_dict(cert.target),
        "placements": [
            {
                "piece_id": pid,
                "theta": [format_scalar(v) for v in sigma.theta],
                "xi": [format_scalar(v) for v in sigma.xi],
            }
            for pid, sigma in cert.placements
        ],
    }


def certificate_from_dict(obj) -> PackingCertificate:
    _strict(obj, "certificate",
            {"format_version", "dim", "mode", "arithmetic", "collection", "target", "placements"})
    if obj["format_version"] != FORMAT_VERSION:
        raise CertificateParseError(f"unsupported format_version {obj['format_version']!r}")
    dim = _int(obj["dim"], "dim")
    if dim < 1:
        raise CertificateParseError("dim must be positive")
    mode = obj["mode"]
    if mode not in MODES:
        raise CertificateParseError(f"unknown mode {mode!r}")
    arithmetic = obj["arithmetic"]
    if arithmetic not in (EXACT, FLOAT):
        raise CertificateParseError(f"unknown arithmetic {arithmetic!r}")
    allow_float = arithmetic == FLOAT
    coll = collection_from_dict(obj["collection"], dim, allow_float)
    target = target_from_dict(obj["target"], dim, allow_float)
    if not isinstance(obj["placements"], list):
        raise CertificateParseError("placements must be a list")
    placements = []
    for rec in obj["placements"]:
        _strict(rec, "placement", {"piece_id", "theta", "xi"})
        pid = _int(rec["piece_id"], "piece_id")
        theta = _scalars(rec["theta"], "theta", allow_float)
        xi = _scalars(rec["xi"], "xi", allow_float)
        if len(theta) != dim * dim or len(xi) != dim:
            raise CertificateParseError(f"placement {pid}: theta/xi sizes disagree with dim")
        try:
            # in float files a placement written entirely as fractions stays exact
            if all(isinstance(v, Fraction) for v in theta + xi):
                sigma = RigidMotion(dim, tuple(theta), tuple(xi), EXACT)
            else:
                sigma = RigidMotion(dim, tuple(float(v) for v in theta), tuple(float(v) for v in xi), FLOAT)
        except ValueError as exc:
            raise CertificateParseError(f"placement {pid}: {exc}") from exc
        placements.append((pid, sigma))
    try:
        return PackingCertificate(coll, tuple(placements), target, mode)
    except ValueError as exc:
        raise CertificateParseError(str(exc)) from exc


def dumps(cert: PackingCertificate) -> str:
    return json.dumps(certificate_to_dict(cert), indent=1) + "\n"


def loads(text: str) -> PackingCertificate:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CertificateParseError(f"not JSON: {exc}") from exc
    return certificate_from_dict(obj)


def save(cert: PackingCertificate, path) -> None:
    Path(path).write_text(dumps(cert), encoding="utf-8")


def load(path) -> PackingCertificate:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CertificateParseError(f"cannot read {path}: {exc}") from exc
    return loads(text)
