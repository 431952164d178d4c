"""Small certificates and certificate sequences used by the tests and the CLI demos."""
from __future__ import annotations

from fractions import Fraction

from .motions import RigidMotion
from .shapes import Brick, Funnel, Homothet, Piece, PieceCollection
from .verify import GENERAL, TRANSLATED, PackingCertificate

UNIT_SQUARES = PieceCollection.custom([Piece(i, (Fraction(1), Fraction(1))) for i in range(1, 5)])
TWO_BY_TWO = Brick((Fraction(2), Fraction(2)))
CORNERS = ((0, 0), (1, 0), (0, 1), (1, 1))


def four_squares(offset=0, target=TWO_BY_TWO, arithmetic: str = "exact") -> PackingCertificate:
    """Four unit squares at the corners of a 2x2 grid, spread apart by ``offset``."""
    placements = []
    for pid, (a, b) in enumerate(CORNERS, start=1):
        xi = (a * (1 + offset), b * (1 + offset))
        placements.append((pid, RigidMotion.translation(xi, arithmetic)))
    return PackingCertificate(UNIT_SQUARES, tuple(placements), target, TRANSLATED)


def tiling_2x2() -> PackingCertificate:
    return four_squares()


def overlapping_2x2() -> PackingCertificate:
    """The 2x2 tiling with the second square pushed halfway onto the first."""
    cert = tiling_2x2()
    moved = list(cert.placements)
    moved[1] = (2, RigidMotion.translation((Fraction(1, 2), 0)))
    return PackingCertificate(cert.collection, tuple(moved), cert.target, cert.mode)


def homothet_sequence(count: int = 50, arithmetic: str = "float", constant_from: int = 20) -> list:
    """Four unit squares packed into (1 + 1/j) [0, 2]^2 for j = 1..count.

    Float variant: the squares are spread apart by 2^-j, which is at most
    2/j so every entry fits its homothet, and the spread shrinks fast enough
    that a tight cluster exists.  Exact variant: spread 1/j up to
    ``constant_from`` and zero afterwards (an eventually constant sequence).
    """
    out = []
    for j in range(1, count + 1):
        lam = 1 + Fraction(1, j)
        if arithmetic == "float":
            offset = 2.0 ** -j
        else:
            offset = Fraction(1, j) if j < constant_from else Fraction(0)
        out.append(four_squares(offset, Homothet(TWO_BY_TWO, lam), arithmetic))
    return out


def funnel_sequence(count: int = 30) -> list:
    """A 2x2 square (standing in for the unit disk) in the funnel homothets (1 + 1/j) F.

    The square's left edge sits where the homothet is exactly 2 wide, at
    x = (1 + e)^2 / e with e = 1/j, so the placements run off to infinity.
    """
    coll = PieceCollection.custom([Piece(1, (Fraction(2), Fraction(2)))])
    out = []
    for j in range(1, count + 1):
        eps = Fraction(1, j)
        lam = 1 + eps
        sigma = RigidMotion.translation((lam * lam / eps, -1))
        out.append(PackingCertificate(coll, ((1, sigma),), Homothet(Funnel(), lam), TRANSLATED))
    return out


def reflected_square() -> PackingCertificate:
    """A unit square reflected in the y-axis and shifted back into [0, 1]^2 (det theta = -1)."""
    coll = PieceCollection.custom([Piece(1, (Fraction(1), Fraction(1)))])
    sigma = RigidMotion.exact([[-1, 0], [0, 1]], [1, 0])
    return PackingCertificate(coll, ((1, sigma),), Brick((Fraction(1), Fraction(1))), GENERAL)


def rotated_square() -> PackingCertificate:
    """A unit square rotated a quarter turn and shifted back into [0, 1]^2."""
    coll = PieceCollection.custom([Piece(1, (Fraction(1), Fraction(1)))])
    sigma = RigidMotion.exact([[0, -1], [1, 0]], [1, 0])
    return PackingCertificate(coll, ((1, sigma),), Brick((Fraction(1), Fraction(1))), GENERAL)
