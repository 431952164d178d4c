"""Limits of sequences of packings, at finite truncation.

Given packings T_1, T_2, ... of the same pieces into targets C_1, C_2, ...,
:func:`extract_convergent_subsequence` picks out a subsequence whose
motions cluster, forms the limit packing from the cluster centroid and
verifies it against the limit target.  When no cluster of the requested
size survives, the placements are escaping to infinity (or are otherwise
not converging) and :class:`DivergenceError` is raised.

Also here: the limit target of shrinking homothets, the limsup brick for
sequences of bricks, and the two normalisations used when the bricks'
dimensions need to be bounded uniformly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .motions import RigidMotion, distance, lipschitz_constant, project_to_orthogonal, signed_permutations
from .shapes import Brick, Homothet, Piece, Target, bounding_box, membership
from .verify import PackingCertificate, VerificationReport, verify_packing


class DivergenceError(RuntimeError):
    """No cluster of at least ``min_keep`` packings survives at the final tolerance."""


@dataclass
class PackingSequence:
    entries: list
    bound: Optional[Brick] = None
    bound_offset: tuple = ()

    def __post_init__(self):
        if not self.entries:
            raise ValueError("empty packing sequence")
        first = self.entries[0]
        ids = _ids(first)
        for cert in self.entries[1:]:
            if cert.collection != first.collection:
                raise ValueError("entries use different piece collections")
            if cert.mode != first.mode:
                raise ValueError("entries use different modes")
            if cert.dim != first.dim:
                raise ValueError("entries have different dimensions")
            if _ids(cert) != ids:
                raise ValueError("entries place different pieces")

    @classmethod
    def from_certificates(cls, certs: Sequence[PackingCertificate]) -> "PackingSequence":
        """Use the bounding box of all targets as the bound, when every target is bounded."""
        boxes = [bounding_box(c.target) for c in certs]
        if any(b is None for b in boxes):
            return cls(list(certs))
        n = certs[0].dim
        lo = tuple(min(b[0][m] for b in boxes) for m in range(n))
        hi = tuple(max(b[1][m] for b in boxes) for m in range(n))
        return cls(list(certs), Brick(tuple(h - l for l, h in zip(lo, hi))), lo)

    @property
    def targets(self) -> list:
        return [c.target for c in self.entries]

    def bound_contains(self, x) -> bool:
        if self.bound is None:
            return True
        return membership(self.bound, [v - o for v, o in zip(x, self.bound_offset)])


def _ids(cert: PackingCertificate) -> tuple:
    return tuple(sorted(pid for pid, _ in cert.placements))


@dataclass
class LimitReport:
    kept_indices: list
    limit: PackingCertificate
    cluster_diameter: float
    certified_slack: float
    verdict: VerificationReport
    snapped: bool = False
    stages: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kept_indices": list(self.kept_indices),
            "cluster_diameter": repr(float(self.cluster_diameter)),
            "certified_slack": repr(float(self.certified_slack)),
            "snapped": self.snapped,
            "verdict": self.verdict.summary(),
            "violations": [v.line() for v in self.verdict.violations],
            "stages": [[repr(r), size] for r, size in self.stages],
        }


# clustering ---------------------------------------------------------------


def _motion_matrix(cert: PackingCertificate) -> np.ndarray:
    """Rows are placements in piece-id order: flattened theta followed by xi."""
    rows = []
    for _, sigma in sorted(cert.placements, key=lambda p: p[0]):
        rows.append([float(v) for v in sigma.theta] + [float(v) for v in sigma.xi])
    return np.array(rows)


def _product_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sqrt(((a - b) ** 2).sum(axis=1)).max())


def _leader_clusters(members: list[int], coords: dict, radius: float) -> list[list[int]]:
    clusters: list[list[int]] = []
    for idx in members:
        for cl in clusters:
            if _product_distance(coords[cl[0]], coords[idx]) <= radius:
                cl.append(idx)
                break
        else:
            clusters.append([idx])
    return clusters


def _start_radius(seq: PackingSequence, coords: dict) -> float:
    n = seq.entries[0].dim
    if seq.bound is not None:
        diag = math.sqrt(sum(float(d) ** 2 for d in seq.bound.dims))
        # theta entries of two orthogonal matrices differ by at most 2 sqrt(n) in Frobenius norm
        return math.hypot(2 * math.sqrt(n), diag)
    keys = list(coords)
    far = 0.0
    for i in keys:
        far = max(far, _product_distance(coords[keys[0]], coords[i]))
    return 2 * far


def _centroid(certs: list[PackingCertificate]) -> PackingCertificate:
    first = certs[0]
    n = first.dim
    placements = []
    for pid, _ in sorted(first.placements, key=lambda p: p[0]):
        motions = [c.motions()[pid] for c in certs]
        if all(m.is_exact for m in motions) and len({m.theta for m in motions}) == 1:
            xi = [sum((m.xi[r] for m in motions), Fraction(0)) / len(motions) for r in range(n)]
            placements.append((pid, RigidMotion.exact(motions[0].theta, xi)))
            continue
        theta = np.mean([m.theta_array() for m in motions], axis=0)
        xi = np.mean([m.xi_array() for m in motions], axis=0)
        placements.append((pid, RigidMotion.from_float(project_to_orthogonal(theta), xi)))
    return PackingCertificate(first.collection, tuple(placements), first.target, first.mode)


# exact reconstruction --------------------------------------------------------


def simplest_rational(lo: Fraction, hi: Fraction) -> Fraction:
    """The rational with the smallest denominator (then numerator) in ``[lo, hi]``."""
    if lo > hi:
        raise ValueError("empty interval")
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        return -simplest_rational(-hi, -lo)
    fl = math.floor(lo)
    if fl == lo:
        return Fraction(fl)
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    # lo and hi share the integer part; recurse on reciprocals of the fractional parts
    rest = simplest_rational(1 / (hi - fl), 1 / (lo - fl))
    return fl + 1 / rest


def _snap(cert: PackingCertificate, tol: float) -> Optional[PackingCertificate]:
    """Nearest exact certificate: theta to a signed permutation, xi to the simplest rationals within tol."""
    n = cert.dim
    perms = signed_permutations(n)
    placements = []
    for pid, sigma in cert.placements:
        if sigma.is_exact:
            placements.append((pid, sigma))
            continue
        t = sigma.theta_array().ravel()
        best = min(perms, key=lambda p: float(((np.array(p) - t) ** 2).sum()))
        if math.sqrt(float(((np.array(best) - t) ** 2).sum())) > tol:
            return None
        t_tol = Fraction(tol)
        xi = [simplest_rational(Fraction(v) - t_tol, Fraction(v) + t_tol) for v in sigma.xi]
        placements.append((pid, RigidMotion.exact(best, xi)))
    return PackingCertificate(cert.collection, tuple(placements), cert.target, cert.mode)


# limit target ---------------------------------------------------------------


def limit_target_homothet(base: Target) -> Target:
    """Limit target of the homothets (1 + 1/j) * base: the base itself.

    Every point outside the base is eventually excluded, with the index
    given by :func:`packlimit.shapes.homothet_exclusion_index`.
    """
    if not base.bounded:
        raise ValueError("homothet limits need a bounded base")
    return base


def identify_limit_target(targets: Sequence[Target], window: Optional[int] = None) -> Target:
    """Limit target of a target sequence: the common base of homothets, the common
    target of a constant sequence, or the limsup brick of a brick sequence."""
    if all(t == targets[0] for t in targets):
        return targets[0]
    if all(isinstance(t, Homothet) for t in targets) and len({t.base for t in targets}) == 1:
        return limit_target_homothet(targets[0].base)
    if all(isinstance(t, Brick) for t in targets):
        lim = brick_limit([t.dims for t in targets], window or len(targets))
        return Brick(lim.dims)
    raise ValueError("cannot identify the limit of this target sequence")


# extraction -------------------------------------------------------------------


def extract_convergent_subsequence(
    seq: PackingSequence,
    tol: float = 1e-6,
    min_keep: int = 3,
    limit_target: Optional[Target] = None,
    check_entries: bool = True,
) -> LimitReport:
    """Refine to the largest cluster of packings at radii halving down to ``tol``.

    Clusters are formed leader-first in entry order under the max-over-pieces
    motion distance; the largest cluster is kept, ties going to the lowest
    leader index.  The limit packing is the coordinatewise centroid (rotation
    parts re-projected onto O(n)).  If an exact certificate within ``tol`` of
    the centroid verifies, it replaces the centroid.
    """
    if len(seq.entries) < min_keep:
        raise ValueError(f"need at least {min_keep} entries")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if check_entries:
        for j, cert in enumerate(seq.entries):
            if verify_packing(cert).valid is not True:
                raise ValueError(f"entry {j} is not a valid packing of its own target")
    coords = {j: _motion_matrix(c) for j, c in enumerate(seq.entries)}
    radius = _start_radius(seq, coords)
    steps = max(0, math.ceil(math.log2(radius / tol))) if radius > tol else 0
    members = list(range(len(seq.entries)))
    stages = []
    for t in range(steps, -1, -1):
        r = tol * 2.0 ** t
        clusters = _leader_clusters(members, coords, r)
        members = max(clusters, key=lambda cl: (len(cl), -cl[0]))
        members.sort()
        stages.append((r, len(members)))
    if len(members) < min_keep:
        raise DivergenceError(
            f"divergence: largest cluster at radius {tol:g} has {len(members)} of "
            f"{len(seq.entries)} packings (need {min_keep})"
        )

    kept = [seq.entries[j] for j in members]
    if limit_target is None:
        limit_target = identify_limit_target([c.target for c in kept])
    centroid = _centroid(kept).with_target(limit_target)
    spread = max(_cluster_diameter(kept, centroid), tol)

    limit, snapped = centroid, False
    if centroid.arithmetic == "float":
        candidate = _snap(centroid, spread)
        if candidate is not None and all(seq.bound_contains(s.xi) for _, s in candidate.placements):
            if verify_packing(candidate).valid is True:
                limit, snapped = candidate, True

    diameter = _cluster_diameter(kept, limit)
    pieces = limit.collection.by_id()
    slack = max(lipschitz_constant(pieces[pid].radius, limit.dim) * diameter for pid, _ in limit.placements)
    verdict = verify_packing(limit) if limit.arithmetic == "exact" else verify_packing(limit, slack)
    return LimitReport(members, limit, diameter, slack, verdict, snapped, stages)


def _cluster_diameter(kept: list[PackingCertificate], limit: PackingCertificate) -> float:
    lim = limit.motions()
    return max(distance(c.motions()[pid], lim[pid]) for c in kept for pid, _ in c.placements)


# bricks ---------------------------------------------------------------------


@dataclass
class BrickLimit:
    volume: object
    dims: tuple
    window: int
    tail_shrink: tuple = ()
    kept: int = 0

    @property
    def product_exceeds_volume(self) -> bool:
        p = 1
        for d in self.dims:
            p *= d
        return p > self.volume

    def text(self) -> str:
        dims = ", ".join(str(d) for d in self.dims)
        out = f"V={self.volume} b=({dims}) window={self.window}"
        if self.tail_shrink:
            out += " tail_shrink=(" + ", ".join(f"{float(s):.6g}" for s in self.tail_shrink) + ")"
        if self.product_exceeds_volume:
            out += " note=product(b)>V"
        return out


def _volume(dims):
    p = 1
    for d in dims:
        p *= d
    return p


def monotone_volume_subsequence(dims_seq: Sequence[Sequence]) -> list[int]:
    """Indices of entries whose volume is at most every earlier volume."""
    out, best = [], None
    for j, dims in enumerate(dims_seq):
        v = _volume(dims)
        if best is None or v <= best:
            out.append(j)
            best = v
    return out


def tail_sup(dims_seq: Sequence[Sequence], start: int) -> tuple:
    """Coordinatewise max of the entries from ``start`` on."""
    tail = dims_seq[start:]
    if not tail:
        raise ValueError("empty tail")
    return tuple(max(d[m] for d in tail) for m in range(len(tail[0])))


def brick_limit(dims_seq: Sequence[Sequence], window: int) -> BrickLimit:
    """Estimate the infimum volume and the limsup dimensions of a brick sequence.

    The limsup of each coordinate is approximated by its max over the last
    ``window`` entries of the monotone-volume subsequence.  ``tail_shrink``
    compares that with the max over the last half window, as a hint of how
    far the tail sup still has to fall.
    """
    if not dims_seq:
        raise ValueError("empty brick sequence")
    if window < 1:
        raise ValueError("window must be positive")
    volume = min(_volume(d) for d in dims_seq)
    mono = [tuple(dims_seq[j]) for j in monotone_volume_subsequence(dims_seq)]
    w = min(window, len(mono))
    dims = tail_sup(mono, len(mono) - w)
    half = tail_sup(mono, len(mono) - max(1, w // 2))
    shrink = tuple(a - b for a, b in zip(dims, half))
    return BrickLimit(volume, dims, w, shrink, len(mono))


def case1_dim_bound(eta, vol_b1, n: int):
    """Uniform bound vol(B_1) / eta^(n-1) on brick dimensions when some piece holds an open eta-ball."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    return vol_b1 / eta ** (n - 1)


def orthant_shift(sigma: RigidMotion, piece: Piece) -> RigidMotion:
    """Keep theta and translate theta(piece) just into the nonnegative orthant."""
    n = sigma.dim
    xi = []
    for m in range(n):
        low = sum(min(0 * d, sigma.entry(m, k) * d) for k, d in enumerate(piece.dims))
        xi.append(0 - low)
    if not sigma.is_exact:
        xi = [float(v) for v in xi]
    return sigma.with_xi(xi)


def clip_brick(dims: Sequence, diam_b1) -> tuple:
    if not diam_b1 > 0 or any(not d > 0 for d in dims):
        raise ValueError("dims and diameter must be positive")
    return tuple(min(d, diam_b1) for d in dims)
