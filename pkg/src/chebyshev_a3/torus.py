"""Torus parametrizations, alcove coordinates, reflections and the filled set K.

Angle coordinates (alpha, beta, gamma) describe t = (e^{i alpha}, e^{i beta}, e^{i gamma});
alcove coordinates s are a linear image of them in which the folding group acts by
the reflections J0..J3.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import mpmath
import numpy as np

from . import _kernels
from .errors import DomainError, InternalError, NumericalError

SQRT2 = math.sqrt(2.0)
TWO_PI = 2.0 * math.pi
EPS_CIRCLE = 1e-8

# s = T @ (alpha, beta, gamma)
T_MATRIX = np.array(
    [
        [-0.5, 0.5, 0.0],
        [-1 / SQRT2, -1 / SQRT2, 0.0],
        [0.5, 0.5, 1.0],
    ]
)
T_INV = np.array(
    [
        [-1.0, -1 / SQRT2, 0.0],
        [1.0, -1 / SQRT2, 0.0],
        [0.0, 1 / SQRT2, 1.0],
    ]
)

SIMPLE_ROOTS = _kernels.ROOTS
ALCOVE_VERTICES = np.array(
    [
        [0.0, 0.0, 0.0],
        [0.0, -math.pi / SQRT2, math.pi],
        [math.pi, 0.0, math.pi],
        [0.0, math.pi / SQRT2, math.pi],
    ]
)
ALCOVE_BARYCENTER = ALCOVE_VERTICES.mean(axis=0)


@dataclass(frozen=True)
class TorusPoint:
    t1: complex
    t2: complex
    t3: complex

    def __post_init__(self):
        for name in ("t1", "t2", "t3"):
            v = complex(getattr(self, name))
            if v == 0 or not np.isfinite(v):
                raise DomainError(f"{name} must be finite and nonzero")
            object.__setattr__(self, name, v)

    @property
    def t4(self) -> complex:
        return 1.0 / (self.t1 * self.t2 * self.t3)

    def as_array(self) -> np.ndarray:
        return np.array([self.t1, self.t2, self.t3], dtype=complex)

    def all4(self) -> np.ndarray:
        return np.array([self.t1, self.t2, self.t3, self.t4], dtype=complex)

    def power(self, d: int) -> "TorusPoint":
        return TorusPoint(self.t1 ** d, self.t2 ** d, self.t3 ** d)

    @classmethod
    def from_angles(cls, a: "AngleTriple | Sequence[float]") -> "TorusPoint":
        al, be, ga = a
        return cls(np.exp(1j * al), np.exp(1j * be), np.exp(1j * ga))


class AngleTriple(NamedTuple):
    alpha: float
    beta: float
    gamma: float

    def reduced(self) -> "AngleTriple":
        return AngleTriple(*(float(np.mod(x, TWO_PI)) for x in self))

    def in_natural_domain(self, tol: float = 1e-12) -> bool:
        return in_natural_domain(np.array(self), tol)


class SCoord(NamedTuple):
    s1: float
    s2: float
    s3: float

    def in_alcove(self, tol: float = 1e-12) -> bool:
        return bool(in_alcove(np.array(self), tol))


# --- parametrizations -------------------------------------------------------

def _as_t_array(t) -> np.ndarray:
    if isinstance(t, TorusPoint):
        return t.as_array()
    arr = np.asarray(t, dtype=complex)
    if arr.shape[-1] != 3:
        raise DomainError("torus points have three coordinates")
    if np.any(arr == 0):
        raise DomainError("torus coordinates must be nonzero")
    return arr


def phi1(t) -> np.ndarray:
    """Elementary symmetric functions of (t1, t2, t3, 1/(t1 t2 t3)).

    Accepts a TorusPoint or an array of shape (..., 3).
    """
    arr = _as_t_array(t)
    t1, t2, t3 = arr[..., 0], arr[..., 1], arr[..., 2]
    t4 = 1.0 / (t1 * t2 * t3)
    z1 = t1 + t2 + t3 + t4
    z2 = t1 * t2 + t1 * t3 + t1 * t4 + t2 * t3 + t2 * t4 + t3 * t4
    z3 = t1 * t2 * t3 + t1 * t2 * t4 + t1 * t3 * t4 + t2 * t3 * t4
    return np.stack([z1, z2, z3], axis=-1)


def phi1_angles(a) -> np.ndarray:
    """phi1 at (e^{i alpha}, e^{i beta}, e^{i gamma}) for angles of shape (..., 3)."""
    return phi1(np.exp(1j * np.asarray(a, dtype=float)))


def phi2(x, y, z) -> np.ndarray:
    x, y, z = (np.asarray(v, dtype=complex) for v in (x, y, z))
    if np.any(y == 0) or np.any(z == 0):
        raise DomainError("phi2 needs y and z nonzero")
    return np.stack([x * x, x * (y + 1.0 / y) / z, 1.0 / (z * z)], axis=-1)


# --- coordinate changes -----------------------------------------------------

def angles_to_s(a) -> np.ndarray:
    return np.asarray(a, dtype=float) @ T_MATRIX.T


def s_to_angles(s) -> np.ndarray:
    return np.asarray(s, dtype=float) @ T_INV.T


def in_alcove(s, tol: float = 1e-12):
    s = np.asarray(s, dtype=float)
    ok = s[..., 2] <= math.pi + tol
    for k in range(3):
        ok &= s @ SIMPLE_ROOTS[k] >= -tol
    return ok


def in_natural_domain(a, tol: float = 1e-12):
    a = np.asarray(a, dtype=float)
    al, be, ga = a[..., 0], a[..., 1], a[..., 2]
    de = -al - be - ga
    return (de <= al + tol) & (al <= be + tol) & (be <= ga + tol) & (ga <= TWO_PI + de + tol)


# --- reflections and folding ------------------------------------------------

def reflect(k: int, s) -> np.ndarray:
    """Apply J_k (k = 0..3) to s of shape (..., 3)."""
    if k not in (0, 1, 2, 3):
        raise DomainError(f"reflection index must be 0..3, got {k!r}")
    s = np.array(s, dtype=float, copy=True)
    if k == 0:
        s[..., 2] = TWO_PI - s[..., 2]
        return s
    a = SIMPLE_ROOTS[k - 1]
    return s - (s @ a)[..., None] * a  # |a|^2 = 2


def reflect_angles(k: int, a) -> np.ndarray:
    return s_to_angles(reflect(k, angles_to_s(a)))


@dataclass(frozen=True)
class FoldWord:
    """Reflections applied in order during folding."""

    letters: tuple[int, ...] = ()

    def __len__(self):
        return len(self.letters)

    def forward(self, s) -> np.ndarray:
        for k in self.letters:
            s = reflect(k, s)
        return np.asarray(s, dtype=float)

    def apply(self, s) -> np.ndarray:
        """Undo the fold: maps the folded point back to the original."""
        for k in reversed(self.letters):
            s = reflect(k, s)
        return np.asarray(s, dtype=float)


FOLD_BUDGET = 1000


def fold(s, budget: int = FOLD_BUDGET) -> tuple[SCoord, FoldWord]:
    """Fold a single point into the closed alcove, recording the reflections."""
    x = np.array(s, dtype=float).reshape(3)
    if not np.all(np.isfinite(x)):
        raise DomainError("non-finite point")
    letters: list[int] = []
    for _ in range(budget):
        viol = [x[2] - math.pi] + [-(x @ SIMPLE_ROOTS[k]) / SQRT2 for k in range(3)]
        k = int(np.argmax(viol))
        if viol[k] <= 1e-13:
            return SCoord(*(float(v) for v in x)), FoldWord(tuple(letters))
        x = reflect(k, x)
        letters.append(k)
    raise InternalError("fold exceeded its reflection budget")


def fold_batch(s, budget: int = FOLD_BUDGET) -> np.ndarray:
    """Folded images of an (N, 3) array; word bookkeeping is skipped."""
    arr = np.ascontiguousarray(np.asarray(s, dtype=float).reshape(-1, 3))
    if not np.all(np.isfinite(arr)):
        raise DomainError("non-finite point")
    out, cnt = _kernels.fold_batch(arr, budget)
    if np.any(cnt < 0):
        raise InternalError("fold exceeded its reflection budget")
    return out.reshape(np.shape(s))


def sample_alcove(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform samples in the alcove."""
    w = rng.dirichlet(np.ones(4), size=n)
    return w @ ALCOVE_VERTICES


# --- K membership and inversion ---------------------------------------------

def _companion(z1, z2, z3) -> np.ndarray:
    z1, z2, z3 = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (z1, z2, z3)))
    n = z1.size
    c = np.zeros((n, 4, 4), dtype=complex)
    c[:, 1, 0] = c[:, 2, 1] = c[:, 3, 2] = 1.0
    # T^4 = z1 T^3 - z2 T^2 + z3 T - 1
    c[:, 0, 0] = z1.ravel()
    c[:, 0, 1] = -z2.ravel()
    c[:, 0, 2] = z3.ravel()
    c[:, 0, 3] = -1.0
    return c


def quartic_roots(z1, z2, z3) -> np.ndarray:
    """Roots of T^4 - z1 T^3 + z2 T^2 - z3 T + 1, shape (N, 4)."""
    c = _companion(z1, z2, z3)
    if not np.all(np.isfinite(c)):
        raise DomainError("non-finite coefficients")
    try:
        return np.linalg.eigvals(c)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(str(exc)) from exc


def quartic_roots_mp(z1, z2, z3, dps: int = 50) -> np.ndarray:
    """High-precision roots for nearly repeated cases."""
    with mpmath.workdps(dps):
        m = mpmath.matrix(4, 4)
        m[0, 0], m[0, 1], m[0, 2], m[0, 3] = (
            mpmath.mpc(complex(z1)),
            -mpmath.mpc(complex(z2)),
            mpmath.mpc(complex(z3)),
            -1,
        )
        m[1, 0] = m[2, 1] = m[3, 2] = 1
        try:
            ev = mpmath.eig(m, left=False, right=False)
        except Exception as exc:  # mpmath raises assorted types on failure
            raise NumericalError(f"eigenvalue solver failed: {exc}") from exc
        return np.array([complex(v) for v in ev])


_REFINE_BAND = 1e-2


def _deviation(roots: np.ndarray) -> np.ndarray:
    return np.max(np.abs(np.abs(roots) - 1.0), axis=-1)


def circle_deviation(z1, z2, z3=None) -> np.ndarray:
    """max_j ||t_j| - 1| over the quartic roots, refined in high precision when close."""
    z1 = np.atleast_1d(np.asarray(z1, dtype=complex))
    z2 = np.atleast_1d(np.asarray(z2, dtype=complex))
    z3 = np.conj(z1) if z3 is None else np.atleast_1d(np.asarray(z3, dtype=complex))
    z1, z2, z3 = np.broadcast_arrays(z1, z2, z3)
    dev = _deviation(quartic_roots(z1, z2, z3))
    for i in np.nonzero((dev > 1e-12) & (dev < _REFINE_BAND))[0]:
        dev[i] = _deviation(quartic_roots_mp(z1.flat[i], z2.flat[i], z3.flat[i]))
    return dev


def k_status_batch(z1, z2, z3=None, eps: float = EPS_CIRCLE) -> np.ndarray:
    """Per point: 'member', 'boundary' (within 10 eps) or 'outside'."""
    dev = circle_deviation(z1, z2, z3)
    out = np.full(dev.shape, "outside", dtype=object)
    out[dev <= 10 * eps] = "boundary"
    out[dev <= eps] = "member"
    return out


def k_status(z1, z2, z3=None, eps: float = EPS_CIRCLE) -> str:
    return str(k_status_batch(z1, z2, z3, eps)[0])


def k_membership(z1, z2, eps: float = EPS_CIRCLE) -> bool:
    """True iff the R3 point (z1, z2, conj z1) has all quartic roots on the unit circle."""
    if not np.isfinite(z1) or not np.isfinite(z2):
        raise DomainError("non-finite input")
    if abs(np.imag(z2)) > 1e-12:
        raise DomainError("z2 must be real for an R3 point")
    return bool(circle_deviation(z1, float(np.real(z2)))[0] <= eps)


def k_membership_batch(z1, z2, z3=None, eps: float = EPS_CIRCLE) -> np.ndarray:
    return circle_deviation(z1, z2, z3) <= eps


def inverse_phi1(z, eps: float = EPS_CIRCLE) -> AngleTriple:
    """Angles in the natural domain whose image under phi1 is z (z in K)."""
    z = np.asarray(z, dtype=complex).reshape(3)
    roots = quartic_roots(*z)[0]
    if 1e-12 < _deviation(roots) < _REFINE_BAND:
        roots = quartic_roots_mp(*z)
    if _deviation(roots) > _REFINE_BAND:
        raise DomainError("point is not in K")
    ang = np.sort(np.mod(np.angle(roots), TWO_PI))
    m = int(round(ang.sum() / TWO_PI))
    if m:
        ang[4 - m:] -= TWO_PI
    ang = np.sort(ang)
    out = AngleTriple(float(ang[1]), float(ang[2]), float(ang[3]))
    # Judge membership by the image of the projected angles, not by root moduli:
    # rounding splits a k-fold root off the circle by ~eps_machine**(1/k), but the
    # image error stays at rounding level.  Outside K it is of order dist(z, K).
    back = phi1_angles(np.array([out.alpha, out.beta, out.gamma]))
    if np.abs(back - z).max() > 10 * eps * max(1.0, np.abs(z).max()):
        raise DomainError("point is not in K")
    return out


def circle_critical_points(z1):
    """Critical points of h(psi) = 2 Re(z1 e^{i psi}) - 2 cos 2 psi.

    On the unit circle, q = h(psi) is where T^4 - z1 T^3 + q T^2 - conj(z1) T + 1 has
    the root e^{i psi}; the critical points solve 2w^4 - z1 w^3 + conj(z1) w - 2 = 0.
    Returns (on_circle mask, values, second derivatives), each (N, 4).
    """
    z1 = np.asarray(z1, dtype=complex).ravel()
    n = z1.size
    c = np.zeros((n, 4, 4), dtype=complex)
    c[:, 1, 0] = c[:, 2, 1] = c[:, 3, 2] = 1.0
    c[:, 0, 0] = z1 / 2
    c[:, 0, 2] = -np.conj(z1) / 2
    c[:, 0, 3] = 1.0
    w = np.linalg.eigvals(c)
    on = np.abs(np.abs(w) - 1.0) < 1e-4
    psi = np.angle(w)
    zc = z1[:, None]
    for _ in range(3):
        e = np.exp(1j * psi)
        d1 = -2 * (zc * e).imag + 4 * np.sin(2 * psi)
        d2 = -2 * (zc * e).real + 8 * np.cos(2 * psi)
        psi = psi - d1 / np.where(np.abs(d2) > 1e-12, d2, 1e-12)
    e = np.exp(1j * psi)
    val = 2 * (zc * e).real - 2 * np.cos(2 * psi)
    curv = -2 * (zc * e).real + 8 * np.cos(2 * psi)
    return on, val, curv


# --- sampling and CSV -------------------------------------------------------

def to_pq(z) -> np.ndarray:
    """Real coordinates (p1, p2, q) = (Re z1, Im z1, Re z2)."""
    z = np.asarray(z, dtype=complex)
    return np.stack([z[..., 0].real, z[..., 0].imag, z[..., 1].real], axis=-1)


def from_pq(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    z1 = p[..., 0] + 1j * p[..., 1]
    return np.stack([z1, p[..., 2] + 0j, np.conj(z1)], axis=-1)


def sample_k(rng: np.random.Generator, n: int) -> np.ndarray:
    """Points of K distributed as the image of uniform alcove samples."""
    return phi1_angles(s_to_angles(sample_alcove(rng, n)))


def k_samples_csv(points: Iterable[Sequence[complex]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p1", "p2", "q"])
    for row in to_pq(np.asarray(list(points), dtype=complex)):
        w.writerow(["%.17g" % v for v in row])
    return buf.getvalue()
