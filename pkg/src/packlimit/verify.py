"""Packing certificates and their verifier.

A certificate places some pieces of a collection by rigid motions.  It is a
valid packing when every placed piece lies in the target and the interiors
of every two placed pieces are disjoint; shared boundary is allowed.

Placements whose rotation part is a signed permutation (including float
motions whose entries are exactly 0 and +-1) are checked in exact rational
arithmetic.  Anything else goes through a float separating-axis test whose
verdicts are three-valued: ``True``, ``False`` or ``None`` (indeterminate,
margin within the slack).
"""
from __future__ import annotations

import math
import statistics
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .motions import ORTHO_TOL, DimensionError, RigidMotion, is_signed_permutation
from .shapes import (
    Brick,
    Piece,
    PieceCollection,
    Target,
    containment_margin,
    membership,
    motion_slack,
    signed_margin,
    target_volume,
)

GENERAL = "general"
ORIENTED = "oriented"
TRANSLATED = "translated"
MODES = (GENERAL, ORIENTED, TRANSLATED)


class UnsupportedPlacement(ValueError):
    """Rotated bricks in dimension > 3 are outside the separating-axis test."""


@dataclass(frozen=True)
class PackingCertificate:
    collection: PieceCollection
    placements: tuple  # of (piece_id, RigidMotion)
    target: Target
    mode: str = GENERAL

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        pieces = self.collection.by_id()
        seen = set()
        for pid, sigma in self.placements:
            if pid not in pieces:
                raise ValueError(f"placement refers to unknown piece {pid}")
            if pid in seen:
                raise ValueError(f"piece {pid} placed twice")
            seen.add(pid)
            if sigma.dim != self.target.dim or pieces[pid].dim != self.target.dim:
                raise DimensionError(f"piece {pid}: dimension disagrees with target")

    @property
    def dim(self) -> int:
        return self.target.dim

    @property
    def arithmetic(self) -> str:
        return "exact" if all(s.is_exact for _, s in self.placements) else "float"

    @property
    def is_partial(self) -> bool:
        return len(self.placements) < len(self.collection.pieces)

    def motions(self) -> dict[int, RigidMotion]:
        return dict(self.placements)

    def with_mode(self, mode: str) -> "PackingCertificate":
        return PackingCertificate(self.collection, self.placements, self.target, mode)

    def with_target(self, target: Target) -> "PackingCertificate":
        return PackingCertificate(self.collection, self.placements, target, self.mode)


@dataclass(frozen=True)
class Violation:
    kind: str  # "mode", "containment" or "overlap"
    ids: tuple
    margin: float

    def line(self) -> str:
        return f"{self.kind} {' '.join(map(str, self.ids))} {self.margin:.6g}"


@dataclass
class VerificationReport:
    valid: Optional[bool]
    violations: list = field(default_factory=list)
    indeterminate: list = field(default_factory=list)
    coverage_ratio: object = None
    slack_used: float = 0.0
    min_margin: float = math.inf
    partial: bool = False

    def summary(self) -> str:
        verdict = {True: "valid", False: "invalid", None: "indeterminate"}[self.valid]
        cov = "n/a" if self.coverage_ratio is None else str(self.coverage_ratio)
        parts = [verdict, f"coverage={cov}"]
        if self.partial:
            parts.append("partial")
        return " ".join(parts)


# exact boxes -----------------------------------------------------------------


def _to_fraction(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float) and not math.isfinite(v):
        raise ValueError("non-finite scalar")
    return Fraction(v)


def exact_box(sigma: RigidMotion, piece: Piece):
    """Exact (lo, hi) corners of ``sigma(piece)`` when theta is a signed permutation, else None."""
    n = sigma.dim
    if not is_signed_permutation(sigma.theta, n):
        return None
    lo, hi = [], []
    for r in range(n):
        c = next(c for c in range(n) if sigma.theta[r * n + c] != 0)
        s = sigma.theta[r * n + c]
        x = _to_fraction(sigma.xi[r])
        d = _to_fraction(piece.dims[c])
        if s > 0:
            lo.append(x)
            hi.append(x + d)
        else:
            lo.append(x - d)
            hi.append(x)
    return tuple(lo), tuple(hi)


def _exact_scalars(target: Target) -> bool:
    from .shapes import Ball, Funnel, Homothet

    if isinstance(target, Brick):
        return all(isinstance(d, (int, Fraction)) for d in target.dims)
    if isinstance(target, Ball):
        return isinstance(target.radius, (int, Fraction))
    if isinstance(target, Homothet):
        return isinstance(target.lam, (int, Fraction)) and _exact_scalars(target.base)
    return isinstance(target, Funnel)


# pairwise test -----------------------------------------------------------------


def _sat_axes(t1: np.ndarray, t2: np.ndarray) -> list[np.ndarray]:
    n = t1.shape[0]
    axes = [t1[:, k] for k in range(n)] + [t2[:, k] for k in range(n)]
    if n == 3:
        for a in range(3):
            for b in range(3):
                c = np.cross(t1[:, a], t2[:, b])
                norm = np.linalg.norm(c)
                if norm > 1e-12:
                    axes.append(c / norm)
    return axes


def _float_separation(s1: RigidMotion, p1: Piece, s2: RigidMotion, p2: Piece) -> float:
    n = s1.dim
    if n > 3:
        raise UnsupportedPlacement("rotated bricks are only supported for n <= 3")
    t1, t2 = s1.theta_array(), s2.theta_array()
    h1 = np.array([float(d) for d in p1.dims]) / 2
    h2 = np.array([float(d) for d in p2.dims]) / 2
    c1 = s1.xi_array() + t1 @ h1
    c2 = s2.xi_array() + t2 @ h2
    best = -math.inf
    for axis in _sat_axes(t1, t2):
        r1 = np.abs(axis @ t1) @ h1
        r2 = np.abs(axis @ t2) @ h2
        best = max(best, abs(float(axis @ (c1 - c2))) - r1 - r2)
    return float(best)


def _box_separation(b1, b2):
    (lo1, hi1), (lo2, hi2) = b1, b2
    return max(max(l2 - h1, l1 - h2) for l1, h1, l2, h2 in zip(lo1, hi1, lo2, hi2))


def _boxes_disjoint(b1, b2) -> bool:
    # comparisons only: far cheaper than exact subtraction for large denominators
    (lo1, hi1), (lo2, hi2) = b1, b2
    return any(h1 <= l2 or h2 <= l1 for l1, h1, l2, h2 in zip(lo1, hi1, lo2, hi2))


def _floats(box):
    return None if box is None else tuple(tuple(float(v) for v in c) for c in box)


def separation(s1: RigidMotion, p1: Piece, s2: RigidMotion, p2: Piece):
    """Largest gap between the two placed bricks over the separating axes.

    Nonnegative iff the interiors are disjoint (zero means touching).  Exact
    ``Fraction`` for axis-aligned placements, float otherwise.
    """
    if s1.dim != s2.dim:
        raise DimensionError("motions of different dimension")
    b1, b2 = exact_box(s1, p1), exact_box(s2, p2)
    if b1 is not None and b2 is not None:
        return _box_separation(b1, b2)
    return _float_separation(s1, p1, s2, p2)


def _pair_verdict(s1, p1, b1, s2, p2, b2, slack, f1=None, f2=None):
    """(verdict, separation); ``f1``/``f2`` are float copies of the exact boxes, used
    for the reported margin when the verdict itself is decided exactly."""
    if b1 is not None and b2 is not None:
        if slack == 0:
            f1 = f1 or _floats(b1)
            f2 = f2 or _floats(b2)
            return _boxes_disjoint(b1, b2), _box_separation(f1, f2)
        sep = _box_separation(b1, b2)
        total = slack
    else:
        sep = _float_separation(s1, p1, s2, p2)
        total = slack + motion_slack(s1, p1) + motion_slack(s2, p2)
    if sep > total:
        return True, sep
    if sep < -total:
        return False, sep
    return None, sep


def interiors_disjoint(s1: RigidMotion, p1: Piece, s2: RigidMotion, p2: Piece, slack: float = 0.0):
    """Do the interiors of the two placed pieces miss each other?

    Exact bool for axis-aligned placements; otherwise ``True``/``False``/``None``.
    """
    if s1.dim != s2.dim:
        raise DimensionError("motions of different dimension")
    ok, _ = _pair_verdict(s1, p1, exact_box(s1, p1), s2, p2, exact_box(s2, p2), slack)
    return ok


# containment -------------------------------------------------------------------


def _corners(box):
    lo, hi = box
    return [tuple(h if bit else l for l, h, bit in zip(lo, hi, bits)) for bits in product((0, 1), repeat=len(lo))]


def _containment(target: Target, sigma: RigidMotion, piece: Piece, slack: float, box, fbox=None):
    """(verdict, margin) for one placement; ``box`` is the exact image box or None."""
    if box is not None and slack == 0:
        margin = min(signed_margin(target, v) for v in _corners(fbox or _floats(box)))
        return all(membership(target, v) for v in _corners(box)), margin
    margin = containment_margin(target, sigma, piece)
    total = slack + (0.0 if box is not None else motion_slack(sigma, piece))
    if margin > total:
        return True, margin
    if margin < -total:
        return False, margin
    return None, margin


def _mode_violation(mode: str, sigma: RigidMotion) -> Optional[float]:
    if mode == TRANSLATED:
        if sigma.is_exact or is_signed_permutation(sigma.theta, sigma.dim):
            return None if sigma.is_identity_rotation() else 1.0
        dev = float(np.abs(sigma.theta_array() - np.eye(sigma.dim)).max())
        return None if dev <= ORTHO_TOL else dev
    if mode == ORIENTED:
        det = sigma.determinant()
        return None if det > 0 else float(det)
    return None


# broad phase ---------------------------------------------------------------------


def _float_box(sigma: RigidMotion, piece: Piece):
    t = sigma.theta_array()
    d = np.array([float(v) for v in piece.dims])
    lo = sigma.xi_array() + np.minimum(t * d, 0).sum(axis=1)
    hi = sigma.xi_array() + np.maximum(t * d, 0).sum(axis=1)
    pad = 1e-9 * (1.0 + np.abs(lo).max() + np.abs(hi).max())
    return lo - pad, hi + pad


def candidate_pairs(boxes: Sequence[tuple]) -> list[tuple[int, int]]:
    """Index pairs whose boxes may intersect, in lexicographic order.

    Uniform grid with cell size equal to the median box extent; boxes larger
    than a cell go to coarser levels (cell doubled per level) so that a few
    large pieces do not flood the fine grid.
    """
    m = len(boxes)
    if m < 2:
        return []
    extents = [float((hi - lo).max()) for lo, hi in boxes]
    cell = statistics.median(extents)
    if not cell > 0:
        cell = max(extents) or 1.0
    levels = []
    for e in extents:
        lv = 0
        while e > cell * 2 ** lv:
            lv += 1
        levels.append(lv)
    grid: dict = defaultdict(list)

    def cells(i, lv):
        size = cell * 2 ** lv
        lo, hi = boxes[i]
        ranges = [range(math.floor(a / size), math.floor(b / size) + 1) for a, b in zip(lo, hi)]
        return product(*ranges)

    for i in range(m):
        for key in cells(i, levels[i]):
            grid[(levels[i],) + key].append(i)
    used_levels = sorted(set(levels))
    pairs = set()
    for i in range(m):
        for lv in used_levels:
            if lv < levels[i]:
                continue
            for key in cells(i, lv):
                for j in grid.get((lv,) + key, ()):
                    if j != i:
                        pairs.add((min(i, j), max(i, j)))
    return sorted(pairs)


# verifier -----------------------------------------------------------------------


def verify_packing(cert: PackingCertificate, slack: float = 0.0) -> VerificationReport:
    """Check mode constraints, containment and pairwise interior disjointness.

    ``slack`` widens the indeterminate band of every margin test; with the
    default of zero, axis-aligned placements are decided exactly.
    """
    pieces = cert.collection.by_id()
    placements = list(cert.placements)
    exact_target = _exact_scalars(cert.target)
    violations, unsure = [], []
    min_margin = math.inf

    for pid, sigma in placements:
        bad = _mode_violation(cert.mode, sigma)
        if bad is not None:
            violations.append(Violation("mode", (pid,), bad))

    exact = [exact_box(sigma, pieces[pid]) for pid, sigma in placements]
    fexact = [_floats(box) for box in exact]
    for (pid, sigma), box, fbox in zip(placements, exact, fexact):
        ok, margin = _containment(cert.target, sigma, pieces[pid], slack, box if exact_target else None, fbox)
        min_margin = min(min_margin, margin)
        if ok is False:
            violations.append(Violation("containment", (pid,), margin))
        elif ok is None:
            unsure.append(Violation("containment", (pid,), margin))

    boxes = [_float_box(sigma, pieces[pid]) for pid, sigma in placements]
    overlaps = []
    for a, b in candidate_pairs(boxes):
        (ia, sa), (ib, sb) = placements[a], placements[b]
        pa, pb = pieces[ia], pieces[ib]
        ok, sep = _pair_verdict(sa, pa, exact[a], sb, pb, exact[b], slack, fexact[a], fexact[b])
        min_margin = min(min_margin, float(sep))
        ids = (min(ia, ib), max(ia, ib))
        if ok is False:
            overlaps.append(Violation("overlap", ids, float(sep)))
        elif ok is None:
            unsure.append(Violation("overlap", ids, float(sep)))
    overlaps.sort(key=lambda v: v.ids)
    violations.extend(overlaps)

    if violations:
        valid = False
    elif unsure:
        valid = None
    else:
        valid = True

    vol = target_volume(cert.target)
    coverage = None
    if vol is not None:
        placed = sum((pieces[pid].volume for pid, _ in placements), Fraction(0))
        coverage = placed / vol
    return VerificationReport(
        valid=valid,
        violations=violations,
        indeterminate=unsure,
        coverage_ratio=coverage,
        slack_used=slack,
        min_margin=min_margin,
        partial=cert.is_partial,
    )


def is_tiling(report: VerificationReport) -> bool:
    """Valid and fully covering; volume equality decides coverage for brick pieces."""
    if report.coverage_ratio is None:
        raise ValueError("tiling needs a finite-volume target")
    return report.valid is True and report.coverage_ratio == 1
