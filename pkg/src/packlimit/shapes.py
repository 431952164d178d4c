"""Pieces (axis-aligned bricks with a vertex at the origin) and target sets.

Targets are closed convex sets: bricks ``[0, d1] x ... x [0, dn]``, balls
centred at the origin, homothets ``lam * C`` about the origin, and the
unbounded funnel ``{(x, y): x >= 1, |y| <= 1 - 1/x}``.  Because every
target is convex and every piece is a brick, a placed piece lies in the
target iff all its vertices do.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import product
from math import gcd
from typing import NamedTuple, Sequence, Union

from scipy.optimize import minimize_scalar

from .motions import DimensionError, RigidMotion, apply, lipschitz_constant, orthogonality_defect

MOSER_RECTANGLES = "moser_rectangles"
MOSER_SQUARES = "moser_squares"
CUSTOM = "custom"

_FIRST_INDEX = {MOSER_RECTANGLES: 1, MOSER_SQUARES: 2}


# pieces -------------------------------------------------------------------


@dataclass(frozen=True)
class Piece:
    """The brick ``[0, dims[0]] x ... x [0, dims[-1]]`` in reference pose."""

    id: int
    dims: tuple

    def __post_init__(self):
        if self.id < 1:
            raise ValueError("piece ids are positive integers")
        if not self.dims or any(not d > 0 for d in self.dims):
            raise ValueError(f"piece {self.id}: dims must be positive, got {self.dims}")

    @property
    def dim(self) -> int:
        return len(self.dims)

    @property
    def volume(self):
        return reduce(lambda a, b: a * b, self.dims)

    @property
    def radius(self) -> float:
        """Largest distance from the origin to a point of the piece."""
        return math.sqrt(sum(float(d) ** 2 for d in self.dims))

    diameter = radius

    def vertices(self) -> list[tuple]:
        return [tuple(d if bit else 0 * d for d, bit in zip(self.dims, bits))
                for bits in product((0, 1), repeat=self.dim)]


@dataclass(frozen=True)
class PieceCollection:
    kind: str
    count: int
    pieces: tuple

    def __post_init__(self):
        ids = [p.id for p in self.pieces]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate piece ids in collection")
        dims = {p.dim for p in self.pieces}
        if len(dims) > 1:
            raise DimensionError("pieces of mixed dimension")

    @property
    def dim(self) -> int:
        return self.pieces[0].dim

    def by_id(self) -> dict[int, Piece]:
        return {p.id: p for p in self.pieces}

    @classmethod
    def custom(cls, pieces: Sequence[Piece]) -> "PieceCollection":
        return cls(CUSTOM, len(pieces), tuple(pieces))


def moser_piece(kind: str, i: int) -> Piece:
    """Piece ``i`` of a Moser family, with exact rational dims."""
    if kind not in _FIRST_INDEX:
        raise ValueError(f"unknown Moser family {kind!r}")
    if i < _FIRST_INDEX[kind]:
        raise ValueError(f"index {i} out of range for {kind}")
    if kind == MOSER_RECTANGLES:
        return Piece(i, (Fraction(1, i), Fraction(1, i + 1)))
    return Piece(i, (Fraction(1, i), Fraction(1, i)))


def moser_collection(kind: str, n: int) -> PieceCollection:
    """Truncation of a Moser family to indices ``first..n``."""
    first = _FIRST_INDEX.get(kind)
    if first is None:
        raise ValueError(f"unknown Moser family {kind!r}")
    if n < first:
        raise ValueError(f"{kind} needs N >= {first}")
    return PieceCollection(kind, n, tuple(moser_piece(kind, i) for i in range(first, n + 1)))


def collection_area(kind: str, n: int) -> Fraction:
    """Exact partial sum of piece areas for indices up to ``n``."""
    first = _FIRST_INDEX.get(kind)
    if first is None:
        raise ValueError(f"unknown Moser family {kind!r}")
    if n < first:
        raise ValueError(f"{kind} needs N >= {first}")
    if kind == MOSER_SQUARES:
        # the square partial sums do not telescope; one common denominator lcm(first..n)^2
        # and a single final reduction beat reducing after every term
        root = math.lcm(*range(first, n + 1))
        q = root * root
        p = sum((root // i) ** 2 for i in range(first, n + 1))
    else:
        # running p/q kept reduced; the sums telescope so it stays small
        p, q = 0, 1
        for i in range(first, n + 1):
            d = i * (i + 1)
            p, q = p * d + q, q * d
            g = gcd(p, q)
            p //= g
            q //= g
    return Fraction(p, q)


# targets ------------------------------------------------------------------


@dataclass(frozen=True)
class Brick:
    """``[0, dims[0]] x ... x [0, dims[n-1]]``."""

    dims: tuple

    def __post_init__(self):
        if not self.dims or any(not d > 0 for d in self.dims):
            raise ValueError(f"brick dims must be positive, got {self.dims}")

    @property
    def dim(self) -> int:
        return len(self.dims)

    bounded = True


@dataclass(frozen=True)
class Ball:
    """Closed ball of the given radius centred at the origin."""

    radius: object
    dim: int = 2

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")

    bounded = True


@dataclass(frozen=True)
class Homothet:
    """``lam * base`` (dilation about the origin)."""

    base: "Target"
    lam: object

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("homothet factor must be positive")

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def bounded(self) -> bool:
        return self.base.bounded


@dataclass(frozen=True)
class Funnel:
    """``{(x, y): 1 <= x, |y| <= 1 - 1/x}``: closed and convex but unbounded."""

    dim = 2
    bounded = False


Target = Union[Brick, Ball, Homothet, Funnel]


def _check_point(target: Target, x: Sequence) -> None:
    if len(x) != target.dim:
        raise DimensionError(f"point of dimension {len(x)} for a {target.dim}-dimensional target")


def _div(a, b):
    if isinstance(a, float) or isinstance(b, float):
        return float(a) / float(b)
    return Fraction(a) / Fraction(b)


def membership(target: Target, x: Sequence) -> bool:
    """Closed membership test; exact whenever the scalars are rational."""
    _check_point(target, x)
    if isinstance(target, Brick):
        return all(0 <= v <= d for v, d in zip(x, target.dims))
    if isinstance(target, Ball):
        return sum(v * v for v in x) <= target.radius * target.radius
    if isinstance(target, Homothet):
        return membership(target.base, [_div(v, target.lam) for v in x])
    if isinstance(target, Funnel):
        px, py = x
        # |y| <= 1 - 1/x  <=>  |y| x <= x - 1 once x >= 1 > 0
        return px >= 1 and abs(py) * px <= px - 1
    raise TypeError(f"unsupported target {target!r}")


class Clearance(NamedTuple):
    value: float
    inside: bool


def _funnel_distance(px: float, py: float) -> float:
    # h(t) = (t - px)^2 + max(0, |py| - f(t))^2 is convex on t >= 1 since f is concave
    ay = abs(py)

    def h(t):
        gap = max(0.0, ay - (1.0 - 1.0 / t))
        return (t - px) ** 2 + gap * gap

    t0 = max(1.0, px)
    hi = t0 + math.sqrt(h(t0)) + 1.0
    res = minimize_scalar(h, bounds=(1.0, hi), method="bounded", options={"xatol": 1e-12})
    best = min(res.fun, h(1.0), h(t0))
    return math.sqrt(max(best, 0.0))


def clearance(target: Target, x: Sequence) -> Clearance:
    """Distance from ``x`` to the target, i.e. the largest radius of an open ball about ``x``
    missing it.  Points inside get ``Clearance(0.0, inside=True)``."""
    _check_point(target, x)
    if membership(target, x):
        return Clearance(0.0, True)
    if isinstance(target, Brick):
        s = 0.0
        for v, d in zip(x, target.dims):
            v, d = float(v), float(d)
            e = -v if v < 0 else (v - d if v > d else 0.0)
            s += e * e
        return Clearance(math.sqrt(s), False)
    if isinstance(target, Ball):
        return Clearance(math.sqrt(sum(float(v) ** 2 for v in x)) - float(target.radius), False)
    if isinstance(target, Homothet):
        lam = float(target.lam)
        inner = clearance(target.base, [float(v) / lam for v in x])
        return Clearance(lam * inner.value, False)
    if isinstance(target, Funnel):
        return Clearance(_funnel_distance(float(x[0]), float(x[1])), False)
    raise TypeError(f"unsupported target {target!r}")


def signed_margin(target: Target, x: Sequence) -> float:
    """A float ``g`` with: ``g >= s > 0`` implies the closed s-ball about x lies in the target,
    and ``g < -s`` implies x is at distance > s from it.

    Exact for balls; coordinatewise for bricks; conservative for the funnel.
    """
    if isinstance(target, Brick):
        return min(min(float(v), float(d) - float(v)) for v, d in zip(x, target.dims))
    if isinstance(target, Ball):
        return float(target.radius) - math.sqrt(sum(float(v) ** 2 for v in x))
    if isinstance(target, Homothet):
        lam = float(target.lam)
        return lam * signed_margin(target.base, [float(v) / lam for v in x])
    if isinstance(target, Funnel):
        px, py = float(x[0]), float(x[1])
        if px < 1:
            return px - 1.0
        # 1 - 1/x is 1-Lipschitz on [1, inf)
        return (1.0 - 1.0 / px - abs(py)) / math.sqrt(2.0)
    raise TypeError(f"unsupported target {target!r}")


def target_volume(target: Target):
    """Exact volume when available; ``None`` for unbounded targets."""
    if isinstance(target, Brick):
        return reduce(lambda a, b: a * b, target.dims)
    if isinstance(target, Ball):
        n = target.dim
        return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * float(target.radius) ** n
    if isinstance(target, Homothet):
        base = target_volume(target.base)
        if base is None:
            return None
        return base * target.lam ** target.dim
    if isinstance(target, Funnel):
        return None
    raise TypeError(f"unsupported target {target!r}")


def bounding_box(target: Target):
    """(lower, upper) corner tuples of the axis-aligned bounding box; ``None`` if unbounded."""
    if isinstance(target, Brick):
        return tuple(0 * d for d in target.dims), tuple(target.dims)
    if isinstance(target, Ball):
        r = target.radius
        return tuple(-r for _ in range(target.dim)), tuple(r for _ in range(target.dim))
    if isinstance(target, Homothet):
        box = bounding_box(target.base)
        if box is None:
            return None
        lo, hi = box
        return tuple(v * target.lam for v in lo), tuple(v * target.lam for v in hi)
    if isinstance(target, Funnel):
        return None
    raise TypeError(f"unsupported target {target!r}")


def placed_vertices(sigma: RigidMotion, piece: Piece) -> list[tuple]:
    return [apply(sigma, v) for v in piece.vertices()]


def containment_margin(target: Target, sigma: RigidMotion, piece: Piece) -> float:
    """Smallest signed vertex margin of ``sigma(piece)``; positive means strictly inside."""
    return min(signed_margin(target, v) for v in placed_vertices(sigma, piece))


def motion_slack(sigma: RigidMotion, piece: Piece) -> float:
    """Error allowance for a float placement: orthogonality drift pushed through the
    Lipschitz bound, plus a rounding term.  Zero for exact motions."""
    if sigma.is_exact:
        return 0.0
    scale = 1.0 + max(abs(v) for v in sigma.xi) + piece.radius
    return lipschitz_constant(piece.radius, sigma.dim) * orthogonality_defect(sigma) + 1e-12 * scale


def contains_piece(target: Target, sigma: RigidMotion, piece: Piece, slack: float = 0.0):
    """Is ``sigma(piece)`` inside the target?

    Exact motions give a plain bool.  Float motions give ``True``, ``False``
    or ``None`` (indeterminate) depending on whether the containment margin
    clears ``slack`` plus the motion's own error allowance.
    """
    if sigma.dim != target.dim or piece.dim != target.dim:
        raise DimensionError("piece, motion and target dimensions differ")
    if sigma.is_exact:
        return all(membership(target, v) for v in placed_vertices(sigma, piece))
    if slack == 0 and sigma.is_axis_aligned():
        # float values convert to Fraction without loss, so this case can be decided exactly
        lifted = RigidMotion.exact([Fraction(v) for v in sigma.theta], [Fraction(v) for v in sigma.xi])
        dims = tuple(Fraction(d) for d in piece.dims)
        return all(membership(target, v) for v in placed_vertices(lifted, Piece(piece.id, dims)))
    margin = containment_margin(target, sigma, piece)
    s = slack + motion_slack(sigma, piece)
    if margin > s:
        return True
    if margin < -s:
        return False
    return None


def homothet_exclusion_index(target: Target, x: Sequence) -> int:
    """Smallest ``k`` of the form ``floor(2|x|/eps) + 1`` with ``eps`` the clearance of ``x``.

    For every ``j >= k`` the open ball of radius ``eps/2`` about ``x`` misses
    ``(1 + 1/j) * target``.
    """
    if not target.bounded:
        raise ValueError("exclusion index needs a bounded target")
    eps, inside = clearance(target, x)
    if inside:
        raise ValueError("point lies in the target")
    norm = math.sqrt(sum(float(v) ** 2 for v in x))
    return math.floor(2 * norm / eps) + 1

