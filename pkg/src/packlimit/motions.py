"""Rigid motions of R^n as pairs (theta, xi) acting by x -> xi + theta @ x.

Two arithmetic modes are supported.  Exact motions carry ``Fraction``
scalars and restrict ``theta`` to signed permutation matrices, so that
orthogonality holds bit-for-bit.  Float motions carry binary doubles and
are accepted when ``theta`` is orthogonal to within ``ORTHO_TOL``.

Matrices are stored row-major as flat tuples; that ordering is shared with
the certificate file format.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

ORTHO_TOL = 1e-9

EXACT = "exact"
FLOAT = "float"


class DimensionError(ValueError):
    pass


def _as_exact(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, Rational)):
        return Fraction(v)
    raise TypeError(f"exact scalar expected, got {v!r}")


@dataclass(frozen=True)
class RigidMotion:
    """An element of O(n) x R^n.

    Build instances through :meth:`exact`, :meth:`from_float` or
    :meth:`identity`; the raw constructor validates but does not coerce.
    """

    dim: int
    theta: tuple
    xi: tuple
    arithmetic: str = EXACT

    def __post_init__(self):
        n = self.dim
        if n < 1:
            raise DimensionError("dimension must be positive")
        if len(self.theta) != n * n or len(self.xi) != n:
            raise DimensionError(
                f"theta has {len(self.theta)} entries and xi {len(self.xi)}; expected {n * n} and {n}"
            )
        if self.arithmetic == EXACT:
            if not is_signed_permutation(self.theta, n):
                raise ValueError("exact motions require a signed permutation matrix")
        elif self.arithmetic == FLOAT:
            m = np.asarray(self.theta, dtype=float).reshape(n, n)
            defect = np.abs(m.T @ m - np.eye(n)).max()
            if not defect <= ORTHO_TOL:
                raise ValueError(f"theta is not orthogonal (defect {defect:.3g})")
        else:
            raise ValueError(f"unknown arithmetic mode {self.arithmetic!r}")

    # construction -------------------------------------------------------

    @classmethod
    def exact(cls, theta: Sequence, xi: Sequence) -> "RigidMotion":
        flat = _flatten(theta)
        n = len(xi)
        return cls(n, tuple(_as_exact(v) for v in flat), tuple(_as_exact(v) for v in xi), EXACT)

    @classmethod
    def from_float(cls, theta, xi) -> "RigidMotion":
        flat = [float(v) for v in np.asarray(theta, dtype=float).ravel()]
        vec = [float(v) for v in np.asarray(xi, dtype=float).ravel()]
        return cls(len(vec), tuple(flat), tuple(vec), FLOAT)

    @classmethod
    def identity(cls, n: int, arithmetic: str = EXACT) -> "RigidMotion":
        eye = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
        if arithmetic == EXACT:
            return cls.exact(eye, [0] * n)
        return cls.from_float(eye, [0.0] * n)

    @classmethod
    def translation(cls, xi: Sequence, arithmetic: str = EXACT) -> "RigidMotion":
        n = len(xi)
        return cls.identity(n, arithmetic).with_xi(xi)

    def with_xi(self, xi: Sequence) -> "RigidMotion":
        if len(xi) != self.dim:
            raise DimensionError("translation has wrong length")
        if self.arithmetic == EXACT:
            return RigidMotion(self.dim, self.theta, tuple(_as_exact(v) for v in xi), EXACT)
        return RigidMotion(self.dim, self.theta, tuple(float(v) for v in xi), FLOAT)

    # views ----------------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.arithmetic == EXACT

    def entry(self, r: int, c: int):
        return self.theta[r * self.dim + c]

    def rows(self) -> list[tuple]:
        n = self.dim
        return [self.theta[r * n:(r + 1) * n] for r in range(n)]

    def theta_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.theta]).reshape(self.dim, self.dim)

    def xi_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.xi])

    def to_float(self) -> "RigidMotion":
        if not self.is_exact:
            return self
        return RigidMotion(self.dim, tuple(float(v) for v in self.theta),
                           tuple(float(v) for v in self.xi), FLOAT)

    def determinant(self):
        if self.is_exact:
            # signed permutation: sign of the permutation times product of signs
            perm = [next(c for c in range(self.dim) if self.entry(r, c) != 0) for r in range(self.dim)]
            sign = 1
            for r in range(self.dim):
                sign *= int(self.entry(r, perm[r]))
            return sign * _perm_parity(perm)
        return float(np.linalg.det(self.theta_array()))

    def is_axis_aligned(self) -> bool:
        """True when theta maps coordinate axes onto coordinate axes exactly."""
        return is_signed_permutation(self.theta, self.dim)

    def is_identity_rotation(self) -> bool:
        n = self.dim
        return all(self.theta[r * n + c] == (1 if r == c else 0) for r in range(n) for c in range(n))


def _flatten(theta) -> list:
    if isinstance(theta, np.ndarray):
        return list(theta.ravel())
    out = []
    for row in theta:
        if isinstance(row, (list, tuple, np.ndarray)):
            out.extend(row)
        else:
            out.append(row)
    return out


def _perm_parity(perm: list[int]) -> int:
    seen = [False] * len(perm)
    parity = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            parity = -parity
    return parity


def is_signed_permutation(flat: Sequence, n: int) -> bool:
    if len(flat) != n * n:
        return False
    cols_used = set()
    for r in range(n):
        nz = [c for c in range(n) if flat[r * n + c] != 0]
        if len(nz) != 1 or flat[r * n + nz[0]] not in (1, -1):
            return False
        cols_used.add(nz[0])
    return len(cols_used) == n


def _check_same_dim(a: RigidMotion, b: RigidMotion) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")


def _both_exact(a: RigidMotion, b: RigidMotion) -> bool:
    return a.is_exact and b.is_exact


def apply(sigma: RigidMotion, x: Sequence) -> tuple:
    """Return xi + theta @ x."""
    n = sigma.dim
    if len(x) != n:
        raise DimensionError(f"point has dimension {len(x)}, motion {n}")
    if sigma.is_exact and all(isinstance(v, (int, Fraction)) for v in x):
        return tuple(
            sigma.xi[r] + sum(sigma.theta[r * n + c] * x[c] for c in range(n) if sigma.theta[r * n + c])
            for r in range(n)
        )
    out = sigma.xi_array() + sigma.theta_array() @ np.asarray(x, dtype=float)
    return tuple(float(v) for v in out)


def invert(sigma: RigidMotion) -> RigidMotion:
    """Inverse motion (theta^-1, -theta^-1 xi); theta^-1 is the transpose."""
    n = sigma.dim
    if sigma.is_exact:
        t = [sigma.theta[c * n + r] for r in range(n) for c in range(n)]
        xi = [-sum(t[r * n + c] * sigma.xi[c] for c in range(n)) for r in range(n)]
        return RigidMotion(n, tuple(t), tuple(xi), EXACT)
    t = sigma.theta_array().T
    return RigidMotion.from_float(t, -(t @ sigma.xi_array()))


def compose(sigma: RigidMotion, tau: RigidMotion) -> RigidMotion:
    """The motion x -> sigma(tau(x))."""
    _check_same_dim(sigma, tau)
    n = sigma.dim
    if _both_exact(sigma, tau):
        a, b = sigma.theta, tau.theta
        t = [sum(a[r * n + k] * b[k * n + c] for k in range(n)) for r in range(n) for c in range(n)]
        xi = [sigma.xi[r] + sum(a[r * n + k] * tau.xi[k] for k in range(n)) for r in range(n)]
        return RigidMotion(n, tuple(t), tuple(xi), EXACT)
    a, b = sigma.theta_array(), tau.theta_array()
    t = a @ b
    if np.abs(t.T @ t - np.eye(n)).max() > ORTHO_TOL:
        t = project_to_orthogonal(t)
    return RigidMotion.from_float(t, sigma.xi_array() + a @ tau.xi_array())


def distance_squared(sigma: RigidMotion, sigma2: RigidMotion):
    """Squared product metric; exact when both motions are exact."""
    _check_same_dim(sigma, sigma2)
    if _both_exact(sigma, sigma2):
        return sum((a - b) ** 2 for a, b in zip(sigma.theta, sigma2.theta)) + sum(
            (a - b) ** 2 for a, b in zip(sigma.xi, sigma2.xi)
        )
    dt = sigma.theta_array() - sigma2.theta_array()
    dx = sigma.xi_array() - sigma2.xi_array()
    return float((dt * dt).sum() + (dx * dx).sum())


def distance(sigma: RigidMotion, sigma2: RigidMotion) -> float:
    """Frobenius distance of the rotation parts combined with Euclidean distance of translations.

    Returns exactly ``0.0`` iff the motions are identical (exact comparison in
    exact mode).
    """
    sq = distance_squared(sigma, sigma2)
    if sq == 0:
        return 0.0
    return math.sqrt(sq)


def lipschitz_constant(y_norm: float, n: int) -> float:
    """Bound on |tau(y) - tau'(y)| / d(tau, tau') for a fixed point of norm ``y_norm``."""
    if y_norm < 0:
        raise ValueError("y_norm must be nonnegative")
    if n < 1:
        raise ValueError("n must be positive")
    return n ** 1.5 * float(y_norm) + 1.0


def delta_for_point(epsilon: float, y_norm: float, n: int) -> float:
    """Radius in motion space that keeps the image of a point of norm ``y_norm`` within ``epsilon``."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    return float(epsilon) / lipschitz_constant(y_norm, n)


def project_to_orthogonal(m) -> np.ndarray:
    """Nearest orthogonal matrix in Frobenius norm (orthogonal polar factor)."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError("square matrix expected")
    u, s, vt = np.linalg.svd(a)
    if s[-1] <= s[0] * 1e-12 or s[0] == 0:
        raise np.linalg.LinAlgError("singular matrix has no unique orthogonal polar factor")
    return u @ vt


def orthogonality_defect(sigma: RigidMotion) -> float:
    """Frobenius distance from theta to its polar factor; 0 for exact motions."""
    if sigma.is_exact:
        return 0.0
    t = sigma.theta_array()
    return float(np.linalg.norm(t - project_to_orthogonal(t)))


def random_rotation(n: int, rng: np.random.Generator, proper: bool = False) -> np.ndarray:
    """Haar-distributed element of O(n) via QR of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if proper and np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def signed_permutations(n: int) -> list[tuple]:
    """All 2^n n! signed permutation matrices as flat row-major integer tuples."""
    from itertools import permutations, product

    out = []
    for perm in permutations(range(n)):
        for signs in product((1, -1), repeat=n):
            flat = [0] * (n * n)
            for r, c in enumerate(perm):
                flat[r * n + c] = signs[r]
            out.append(tuple(flat))
    return out
