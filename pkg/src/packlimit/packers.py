"""Guillotine first-fit packers for the two Moser families.

Pieces go in decreasing-area order.  Each piece takes the free gap that
leaves the smallest leftover area (ties: lowest gap index), sits in that
gap's lower-left corner, and the remainder of the gap is cut in two along
the axis with the longer leftover.  Everything is exact rational
arithmetic, so the output is a translated-mode certificate that the exact
verifier can check bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .motions import RigidMotion
from .shapes import MOSER_RECTANGLES, MOSER_SQUARES, Brick, Piece, moser_collection
from .verify import TRANSLATED, PackingCertificate, verify_packing


class CapacityError(RuntimeError):
    """No free gap can take the next piece."""

    def __init__(self, index: int):
        super().__init__(f"no gap fits piece {index}")
        self.index = index


@dataclass(frozen=True)
class Gap:
    x: Fraction
    y: Fraction
    w: Fraction
    h: Fraction

    @property
    def area(self) -> Fraction:
        return self.w * self.h


class FreeGapList:
    """Free axis-aligned rectangles of the target, pairwise interior-disjoint."""

    def __init__(self, width, height):
        self.gaps: list[Gap] = [Gap(Fraction(0), Fraction(0), Fraction(width), Fraction(height))]

    def total_area(self) -> Fraction:
        return sum((g.area for g in self.gaps), Fraction(0))

    def best_fit(self, w, h) -> Optional[int]:
        best, best_left = None, None
        for k, g in enumerate(self.gaps):
            if w <= g.w and h <= g.h:
                left = g.area - w * h
                if best_left is None or left < best_left:
                    best, best_left = k, left
        return best

    def place(self, k: int, w, h) -> tuple:
        """Put a w x h piece in the corner of gap ``k``; returns its position."""
        g = self.gaps.pop(k)
        dx, dy = g.w - w, g.h - h
        if dx > dy:
            # vertical cut: full-height strip on the right
            pieces = [Gap(g.x + w, g.y, dx, g.h), Gap(g.x, g.y + h, w, dy)]
        else:
            pieces = [Gap(g.x, g.y + h, g.w, dy), Gap(g.x + w, g.y, dx, h)]
        self.gaps[k:k] = [p for p in pieces if p.w > 0 and p.h > 0]
        return g.x, g.y


def _pack(collection, width, height, order) -> PackingCertificate:
    gaps = FreeGapList(width, height)
    placements = []
    for piece in order:
        w, h = piece.dims
        k = gaps.best_fit(w, h)
        if k is None:
            raise CapacityError(piece.id)
        x, y = gaps.place(k, w, h)
        placements.append((piece.id, RigidMotion.translation((x, y))))
    target = Brick((Fraction(width), Fraction(height)))
    return PackingCertificate(collection, tuple(placements), target, TRANSLATED)


def _by_area(pieces: tuple[Piece, ...]) -> list[Piece]:
    return sorted(pieces, key=lambda p: (-p.volume, p.id))


def pack_moser_rectangles(n: int, side, check: bool = True) -> PackingCertificate:
    """Pack rectangles ``1/i x 1/(i+1)``, ``i = 1..n``, into the square ``[0, side]^2``."""
    if n < 1:
        raise ValueError("N must be at least 1")
    side = Fraction(side)
    if side < 1:
        raise ValueError("side must be at least 1")
    coll = moser_collection(MOSER_RECTANGLES, n)
    cert = _pack(coll, side, side, _by_area(coll.pieces))
    if check:
        _assert_valid(cert)
    return cert


def pack_moser_squares(n: int, width, check: bool = True) -> PackingCertificate:
    """Pack squares of side ``1/2 .. 1/n`` into ``[0, width] x [0, 1]``."""
    if n < 2:
        raise ValueError("N must be at least 2")
    width = Fraction(width)
    if width < Fraction(1, 2):
        raise ValueError("width must be at least 1/2")
    coll = moser_collection(MOSER_SQUARES, n)
    cert = _pack(coll, width, Fraction(1), _by_area(coll.pieces))
    if check:
        _assert_valid(cert)
    return cert


def _assert_valid(cert: PackingCertificate) -> None:
    report = verify_packing(cert)
    if report.valid is not True:
        raise AssertionError(f"packer produced an invalid certificate: {report.violations[:3]}")


PACKERS = {MOSER_RECTANGLES: pack_moser_rectangles, MOSER_SQUARES: pack_moser_squares}


@dataclass
class ShrinkResult:
    param: Fraction
    epsilon: float
    iterations: int
    certificate: PackingCertificate

    def text(self) -> str:
        return (f"param={self.param} ({float(self.param):.12g}) "
                f"epsilon={self.epsilon:.6g} iterations={self.iterations}")


def achieved_epsilon(kind: str, param) -> float:
    """Excess over the tiling size: side - 1 for rectangles, area excess for height-1 rectangles of squares."""
    from math import pi

    if kind == MOSER_RECTANGLES:
        return float(Fraction(param) - 1)
    return float(param) - (pi * pi / 6 - 1)


def _try(kind, n, param):
    try:
        return PACKERS[kind](n, param, check=False)
    except CapacityError:
        return None


def shrink_search(kind: str, n: int, lo, hi, steps: int = 20) -> ShrinkResult:
    """Bisect on the side (rectangles) or width (squares) for the smallest feasible value.

    The packer is not assumed monotone in the parameter: an infeasible
    midpoint only raises ``lo`` and the answer is the smallest value actually
    seen to succeed.
    """
    if kind not in PACKERS:
        raise ValueError(f"unknown kind {kind!r}")
    lo, hi = Fraction(lo), Fraction(hi)
    if not lo < hi:
        raise ValueError("need lo < hi")
    best = _try(kind, n, hi)
    if best is None:
        raise CapacityError(_first_failure(kind, n, hi))
    iterations = 0
    at_lo = _try(kind, n, lo)
    if at_lo is not None:
        hi, best = lo, at_lo
    else:
        for _ in range(steps):
            iterations += 1
            mid = (lo + hi) / 2
            cert = _try(kind, n, mid)
            if cert is None:
                lo = mid
            else:
                hi, best = mid, cert
    _assert_valid(best)
    return ShrinkResult(hi, achieved_epsilon(kind, hi), iterations, best)


def _first_failure(kind, n, param) -> int:
    try:
        PACKERS[kind](n, param, check=False)
    except CapacityError as exc:
        return exc.index
    return -1
