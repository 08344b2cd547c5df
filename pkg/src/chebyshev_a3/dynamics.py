"""Orbits, Green function, orbit classification, periodic points and the
maximal-entropy measure of the A3 Chebyshev maps."""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.spatial import cKDTree

from . import torus
from .errors import DomainError, InternalError, NumericalError
from .poly import (
    ChebyshevMapA3,
    evaluate,
    evaluate_homogeneous,
    h2_polynomial,
    jacobian_eval,
)

ESCAPE_RADIUS = 1e8
N_MAX = 200
EPS_CONVERGE = 1e-6
CONFIRM_STEPS = 3


# --- projective points ------------------------------------------------------

class ProjectivePoint:
    """Point (z1 : z2 : z3 : z0) of P^3, stored normalized.

    The largest coordinate has modulus 1 and the first such coordinate is real positive.
    """

    __slots__ = ("coords",)

    def __init__(self, coords):
        c = np.asarray(coords, dtype=complex).reshape(4)
        if not np.all(np.isfinite(c)):
            raise DomainError("non-finite homogeneous coordinates")
        mods = np.abs(c)
        top = mods.max()
        if top == 0:
            raise DomainError("all homogeneous coordinates are zero")
        c = c / top
        lead = int(np.argmax(np.abs(c) >= 1.0 - 1e-12))
        c = c * (np.conj(c[lead]) / abs(c[lead]))
        c[lead] = abs(c[lead])
        c.setflags(write=False)
        self.coords = c

    @classmethod
    def from_affine(cls, z) -> "ProjectivePoint":
        z = np.asarray(z, dtype=complex).reshape(3)
        return cls(np.append(z, 1.0))

    def normalized(self) -> "ProjectivePoint":
        return ProjectivePoint(self.coords)

    def affine(self) -> np.ndarray:
        if self.coords[3] == 0:
            raise DomainError("point at infinity")
        return self.coords[:3] / self.coords[3]

    def distance(self, other: "ProjectivePoint") -> float:
        """Fubini-Study distance."""
        a, b = self.coords, other.coords
        cos = abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))
        return float(math.acos(min(1.0, cos)))

    def __eq__(self, other):
        return isinstance(other, ProjectivePoint) and np.allclose(self.coords, other.coords, atol=1e-12)

    def __repr__(self):
        return "ProjectivePoint(" + " : ".join(f"{c:.6g}" for c in self.coords) + ")"


P1 = ProjectivePoint([1, 0, 0, 0])
P2 = ProjectivePoint([0, 1, 0, 0])
P3 = ProjectivePoint([0, 0, 1, 0])


# --- orbit classes ----------------------------------------------------------

class OrbitKind(enum.Enum):
    BOUNDED_K = "BoundedK"
    STABLE_MOBIUS = "StableMobius"
    STABLE_CIRCLES = "StableCircles"
    FATOU_FIXED = "FatouFixed"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class OrbitClass:
    kind: OrbitKind
    target: str | None = None  # S1/S2 or P1/P2/P3

    def __post_init__(self):
        allowed = {
            OrbitKind.STABLE_CIRCLES: ("S1", "S2"),
            OrbitKind.FATOU_FIXED: ("P1", "P2", "P3"),
        }.get(self.kind, (None,))
        if self.target not in allowed:
            raise DomainError(f"{self.kind.value} cannot carry target {self.target!r}")

    def __str__(self):
        return self.kind.value + (f"({self.target})" if self.target else "")

    @classmethod
    def parse(cls, text: str) -> "OrbitClass":
        text = text.strip()
        if "(" in text:
            name, target = text[:-1].split("(")
            return cls(OrbitKind(name), target)
        return cls(OrbitKind(text))


BOUNDED = OrbitClass(OrbitKind.BOUNDED_K)
MOBIUS = OrbitClass(OrbitKind.STABLE_MOBIUS)
UNRESOLVED = OrbitClass(OrbitKind.UNRESOLVED)


def classify_moduli(moduli, eps: float = torus.EPS_CIRCLE) -> OrbitClass:
    """Case analysis on the four root moduli (any order, product 1)."""
    m = np.sort(np.asarray(moduli, dtype=float))[::-1]
    if m.shape != (4,):
        raise DomainError("need four moduli")
    one = np.abs(m - 1.0) <= eps
    a, b, c, d = m
    if one.all():
        return BOUNDED
    if a > 1 and one[1] and one[2] and d < 1:
        return MOBIUS
    if a > 1 and one[1] and not one[2] and c < 1:
        return OrbitClass(OrbitKind.STABLE_CIRCLES, "S1")
    if b > 1 and one[2] and d < 1 and not one[1]:
        return OrbitClass(OrbitKind.STABLE_CIRCLES, "S2")
    if not one.any():
        if a > 1 > b:
            return OrbitClass(OrbitKind.FATOU_FIXED, "P1")
        if b > 1 > c:
            return OrbitClass(OrbitKind.FATOU_FIXED, "P2")
        if c > 1 > d:
            return OrbitClass(OrbitKind.FATOU_FIXED, "P3")
    raise InternalError(f"moduli {m} match no case")


def classify_exact(t: torus.TorusPoint, eps: float = torus.EPS_CIRCLE) -> OrbitClass:
    if not isinstance(t, torus.TorusPoint):
        t = torus.TorusPoint(*t)
    return classify_moduli(np.abs(t.all4()), eps)


# --- distances to the invariant sets ----------------------------------------

def _coords(p) -> np.ndarray:
    if isinstance(p, ProjectivePoint):
        return p.coords
    return ProjectivePoint(p).coords


def mobius_distance(p) -> float:
    """Distance to the strip {(e^{i theta} : x e^{i theta/2} : 1 : 0), |x| <= 2}.

    Measured in the chart (z1/z3, z2/z3), plus |z0/z3|.  The strip is symmetric
    under z1 <-> z3, so when z3 = 0 the swapped chart is used.
    """
    c = _coords(p)
    z1, z2, z3, z0 = c
    if abs(z3) < abs(z1) * 1e-300 or z3 == 0:
        if z1 == 0:
            return math.inf
        z1, z3 = z3, z1
    xi, eta, w = z1 / z3, z2 / z3, z0 / z3
    theta = np.angle(xi)
    half = np.exp(0.5j * theta)
    x = float(np.clip((eta * np.conj(half)).real, -2.0, 2.0))
    return float(math.hypot(abs(abs(xi) - 1.0), abs(eta - x * half)) + abs(w))


def circle_distance(p, which: str) -> float:
    """Distance to S1 = (1 : e^{i theta} : 0 : 0) or S2 = (0 : e^{i theta} : 1 : 0)."""
    c = _coords(p)
    k = 0 if which == "S1" else 2
    if c[k] == 0:
        return math.inf
    w = c / c[k]
    others = [i for i in (0, 2, 3) if i != k]
    return float(abs(abs(w[1]) - 1.0) + sum(abs(w[i]) for i in others))


def fixed_point_distance(p, which: str) -> float:
    c = _coords(p)
    k = {"P1": 0, "P2": 1, "P3": 2}[which]
    if c[k] == 0:
        return math.inf
    w = c / c[k]
    return float(sum(abs(w[i]) for i in range(4) if i != k))


# --- iteration --------------------------------------------------------------

@dataclass
class OrbitTrace:
    """Homogeneous coordinates (z1, z2, z3, z0) of each orbit point.

    Rows stay affine (z0 = 1) until the norm passes the overflow guard, after which
    they are kept projectively normalized.
    """

    degree: int
    points: np.ndarray

    def affine(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.points[:, :3] / self.points[:, 3:4]

    def to_json(self) -> str:
        rows = [[[float(c.real), float(c.imag)] for c in row] for row in self.points]
        return json.dumps({"degree": self.degree, "points": rows})


OVERFLOW_GUARD = 1e100


def iterate(m: ChebyshevMapA3, z, n: int) -> OrbitTrace:
    if n < 0:
        raise DomainError("n must be >= 0")
    z = np.asarray(z, dtype=complex).reshape(3)
    if not np.all(np.isfinite(z)):
        raise DomainError("non-finite input")
    out = np.empty((n + 1, 4), dtype=complex)
    cur = np.append(z, 1.0)
    out[0] = cur
    projective = False
    for k in range(1, n + 1):
        if not projective:
            nxt = evaluate(m, cur[:3])
            if np.all(np.isfinite(nxt)) and np.abs(nxt).max() <= OVERFLOW_GUARD:
                cur = np.append(nxt, 1.0)
                out[k] = cur
                continue
            projective = True
            cur = ProjectivePoint(cur).coords.copy()
        cur = ProjectivePoint(evaluate_homogeneous(m, cur)[0]).coords.copy()
        out[k] = cur
    return OrbitTrace(m.degree, out)


# --- Green function ---------------------------------------------------------

@dataclass(frozen=True)
class GreenEstimate:
    value: float
    n_used: int
    error_bound: float


def green(
    m: ChebyshevMapA3,
    z,
    tol: float = 1e-12,
    n_max: int = N_MAX,
    escape_radius: float = ESCAPE_RADIUS,
) -> GreenEstimate:
    """d^{-n} log+ |f^n z| (sup norm), iterated until converged after escape."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    d = m.degree
    if d < 2:
        raise DomainError("the Green function needs degree >= 2")
    W = np.append(np.asarray(z, dtype=complex).reshape(3), 1.0)
    if not np.all(np.isfinite(W)):
        raise DomainError("non-finite input")
    # G vanishes on K; iterating there in floating point drifts off K and escapes
    if torus.k_status(W[0], W[1], W[2]) == "member":
        return GreenEstimate(0.0, 0, 0.0)
    # true lift = exp(L) * W with max|W| = 1
    s = np.abs(W).max()
    W = W / s
    L = math.log(s)
    scale = 1.0  # d^{-n}
    prev = None
    escaped = False
    for n in range(0, n_max + 1):
        log_norm = L + math.log(np.abs(W[:3]).max()) if np.abs(W[:3]).max() > 0 else -math.inf
        g = scale * max(0.0, log_norm)
        if log_norm > math.log(escape_radius):
            escaped = True
        if escaped and prev is not None:
            inc = abs(g - prev)
            if inc < tol:
                return GreenEstimate(g, n, inc * d / (d - 1))
        prev = g
        if n == n_max:
            break
        W = evaluate_homogeneous(m, W)[0]
        s = np.abs(W).max()
        if s == 0 or not np.isfinite(s):
            raise NumericalError("lift collapsed")
        W = W / s
        L = d * L + math.log(s)
        scale /= d
        # keep L bounded: track the rescaled quantity directly
        if abs(L) > 1e250:
            raise NumericalError("log scale overflow")
    if not escaped:
        return GreenEstimate(0.0, n_max, 0.0)
    return GreenEstimate(prev, n_max, abs(prev - g) * d / (d - 1) if prev is not None else math.inf)


# --- skew product at infinity -----------------------------------------------

def skew_product(d: int, z, w):
    """The map on the plane at infinity in the chart z3 = 1: (z^d, h2(z, w, 1))."""
    if d < 1:
        raise DomainError("degree must be >= 1")
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    h2 = h2_polynomial(d)
    pts = np.stack(np.broadcast_arrays(z, w, np.ones_like(z)), axis=-1)
    return z ** d, h2.evaluate(pts)


def mobius_point(theta, x) -> ProjectivePoint:
    if abs(x) > 2:
        raise DomainError("|x| must be <= 2 on the strip")
    return ProjectivePoint([np.exp(1j * theta), x * np.exp(0.5j * theta), 1.0, 0.0])


# --- numeric classification -------------------------------------------------

_TARGETS = (
    (MOBIUS, mobius_distance),
    (OrbitClass(OrbitKind.STABLE_CIRCLES, "S1"), lambda p: circle_distance(p, "S1")),
    (OrbitClass(OrbitKind.STABLE_CIRCLES, "S2"), lambda p: circle_distance(p, "S2")),
    (OrbitClass(OrbitKind.FATOU_FIXED, "P1"), lambda p: fixed_point_distance(p, "P1")),
    (OrbitClass(OrbitKind.FATOU_FIXED, "P2"), lambda p: fixed_point_distance(p, "P2")),
    (OrbitClass(OrbitKind.FATOU_FIXED, "P3"), lambda p: fixed_point_distance(p, "P3")),
)


def classify_numeric(
    m: ChebyshevMapA3,
    z,
    budget: int = N_MAX,
    eps_converge: float = EPS_CONVERGE,
    eps_circle: float = torus.EPS_CIRCLE,
) -> OrbitClass:
    """Classify by iterating and watching which invariant set the orbit settles on."""
    if budget < 1:
        raise DomainError("budget must be >= 1")
    z = np.asarray(z, dtype=complex).reshape(3)
    status = torus.k_status(z[0], z[1], z[2], eps_circle)
    if status == "member":
        return BOUNDED
    if status == "boundary":
        return UNRESOLVED
    cur = ProjectivePoint(np.append(z, 1.0)).coords
    streak_tag, streak = None, 0
    for _ in range(budget):
        cur = ProjectivePoint(evaluate_homogeneous(m, cur)[0]).coords
        hits = [tag for tag, dist in _TARGETS if dist(cur) < eps_converge]
        tag = hits[0] if len(hits) == 1 else None
        if tag is not None and tag == streak_tag:
            streak += 1
        else:
            streak_tag, streak = tag, (1 if tag is not None else 0)
        if streak >= CONFIRM_STEPS:
            return streak_tag
    return UNRESOLVED


# --- periodic points --------------------------------------------------------

@dataclass
class PeriodicPointSet:
    degree: int
    period: int
    points: np.ndarray           # (K, 3) alcove coordinates
    residuals: np.ndarray        # |fold(d^n s) - s|
    cell_count: int              # number of sub-alcoves searched
    duplicates_removed: int = 0

    def __len__(self):
        return len(self.points)

    def to_csv(self) -> str:
        lines = ["s1,s2,s3,residual"]
        for p, r in zip(self.points, self.residuals):
            lines.append(",".join("%.17g" % v for v in (*p, r)))
        return "\n".join(lines) + "\n"


_E_INV = np.linalg.inv((torus.ALCOVE_VERTICES[1:] - torus.ALCOVE_VERTICES[0]).T)
# barycenters of alcoves sit on this lattice
_LATTICE = np.array([math.pi / 4, math.pi / (4 * torus.SQRT2), math.pi / 4])


def _bary_keys(verts: np.ndarray) -> np.ndarray:
    k = np.rint(verts.mean(axis=1) / _LATTICE).astype(np.int64) + (1 << 20)
    return k[:, 0] | (k[:, 1] << 21) | (k[:, 2] << 42)


def alcoves_in_scaled_alcove(N: int) -> np.ndarray:
    """Vertex arrays (K, 4, 3) of the N^3 alcoves tiling N*R.

    Vertex i of each alcove is the image of vertex i of R under the isometry
    that carries R onto it.
    """
    start = torus.ALCOVE_VERTICES[None].copy()
    seen = _bary_keys(start)
    frontier = start
    found = [start]
    while frontier.size:
        cands = []
        for i in range(4):
            rest = [j for j in range(4) if j != i]
            p0 = frontier[:, rest[0]]
            nrm = np.cross(frontier[:, rest[1]] - p0, frontier[:, rest[2]] - p0)
            nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
            v = frontier[:, i]
            refl = v - 2 * np.einsum("ij,ij->i", v - p0, nrm)[:, None] * nrm
            nb = frontier.copy()
            nb[:, i] = refl
            cands.append(nb)
        cands = np.concatenate(cands)
        inside = torus.in_alcove(cands.mean(axis=1) / N, 1e-9)
        cands = cands[inside]
        keys = _bary_keys(cands)
        keys, first = np.unique(keys, return_index=True)
        cands = cands[first]
        new = ~np.isin(keys, seen)
        frontier = cands[new]
        seen = np.concatenate([seen, keys[new]])
        if frontier.size:
            found.append(frontier)
    cells = np.concatenate(found)
    if len(cells) != N ** 3:
        raise InternalError(f"found {len(cells)} alcoves in the scaled alcove, expected {N ** 3}")
    return cells


def _affine_maps(cells: np.ndarray):
    """w(s) = v0 + M s carrying R onto each cell."""
    v0 = cells[:, 0]
    E = np.transpose(cells[:, 1:] - v0[:, None], (0, 2, 1))
    return v0, E @ _E_INV


def periodic_points(d: int, n: int, tol: float = 1e-12, max_steps: int = 200) -> PeriodicPointSet:
    """All s in the alcove with fold(d^n s) = s, one per sub-alcove of d^n R."""
    if d < 2 or n < 1:
        raise DomainError("need d >= 2 and n >= 1")
    N = d ** n
    if N ** 3 > 10 ** 6:
        raise DomainError("d^(3n) must be at most 10^6")
    cells = alcoves_in_scaled_alcove(N)
    v0, M = _affine_maps(cells)
    s = np.broadcast_to(torus.ALCOVE_BARYCENTER, v0.shape).copy()
    for _ in range(max_steps):
        nxt = (v0 + np.einsum("kij,kj->ki", M, s)) / N
        step = np.abs(nxt - s).max()
        s = nxt
        if step < tol:
            break
    else:
        raise NumericalError("inverse-branch iteration did not converge")
    pairs = cKDTree(s).query_pairs(1e-9, output_type="ndarray")
    drop = np.zeros(len(s), dtype=bool)
    for i, j in pairs:
        if not drop[i]:
            drop[j] = True
    s = s[~drop]
    res = np.abs(torus.fold_batch(N * s) - s).max(axis=1)
    return PeriodicPointSet(d, n, s, res, len(cells), int(drop.sum()))


def periodic_orbit_residual(m: ChebyshevMapA3, pts: PeriodicPointSet) -> np.ndarray:
    """|f^n(z) - z| for z = phi1 at each periodic point."""
    z0 = torus.phi1_angles(torus.s_to_angles(pts.points))
    z = z0.copy()
    for _ in range(pts.period):
        z = evaluate(m, z)
    return np.abs(z - z0).max(axis=1)


def periodic_spectral_radius(m: ChebyshevMapA3, pts: PeriodicPointSet) -> np.ndarray:
    """Smallest modulus eigenvalue of D(f^n) at each periodic point."""
    z = torus.phi1_angles(torus.s_to_angles(pts.points))
    J = np.broadcast_to(np.eye(3, dtype=complex), (len(z), 3, 3)).copy()
    for _ in range(pts.period):
        J = jacobian_eval(m, z) @ J
        z = evaluate(m, z)
    return np.abs(np.linalg.eigvals(J)).min(axis=1)


def locate_cells(s: np.ndarray, level_cells: np.ndarray, M: int) -> np.ndarray:
    """Index of the level cell (alcove of M*R scaled down) containing each point."""
    v0, A = _affine_maps(level_cells / M)
    Ainv = np.linalg.inv(A)
    best = np.full(len(s), -1)
    score = np.full(len(s), -np.inf)
    for start in range(0, len(level_cells), 256):
        sl = slice(start, start + 256)
        local = np.einsum("kij,pkj->pki", Ainv[sl], s[:, None, :] - v0[None, sl])
        # barycentric coordinates with respect to R's vertices
        bary_rest = local @ _E_INV.T
        bary = np.concatenate([1 - bary_rest.sum(axis=2, keepdims=True), bary_rest], axis=2)
        mn = bary.min(axis=2)
        k = mn.argmax(axis=1)
        val = mn[np.arange(len(s)), k]
        upd = val > score
        best[upd] = k[upd] + start
        score[upd] = val[upd]
    return best


@dataclass
class EquidistributionStats:
    level: int
    counts: np.ndarray
    expected: float
    chi_square: float
    dof: int
    quantile_99: float

    @property
    def passes(self) -> bool:
        return self.chi_square < self.quantile_99

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "counts": self.counts.tolist(),
            "expected": self.expected,
            "chi_square": self.chi_square,
            "dof": self.dof,
            "quantile_99": self.quantile_99,
            "passes": self.passes,
        }


def equidistribution_stats(pts: PeriodicPointSet, m: int) -> EquidistributionStats:
    if m < 1:
        raise DomainError("level must be >= 1")
    Mn = pts.degree ** m
    cells = alcoves_in_scaled_alcove(Mn)
    idx = locate_cells(pts.points, cells, Mn)
    counts = np.bincount(idx, minlength=len(cells))
    expected = len(pts) / len(cells)
    chi = float(((counts - expected) ** 2).sum() / expected)
    dof = len(cells) - 1
    return EquidistributionStats(m, counts, expected, chi, dof, float(stats.chi2.ppf(0.99, dof)))


# --- invariant measure ------------------------------------------------------

def d3(z1, z2):
    """The density polynomial in z1 = p1 + i p2 and real z2 = q."""
    z1 = np.asarray(z1, dtype=complex)
    q = np.real(np.asarray(z2, dtype=complex))
    n = (z1 * np.conj(z1)).real  # |z1|^2
    r2 = 2 * (z1 * z1).real      # z1^2 + conj(z1)^2
    r4 = 2 * (z1 ** 4).real
    return (
        256
        - 27 * r4
        + r2 * (144 * q - 4 * q ** 3 + 18 * n * q)
        - 80 * n * q ** 2
        + n ** 2 * q ** 2
        - 192 * n
        - 4 * n ** 3
        - 6 * n ** 2
        - 128 * q ** 2
        + 16 * q ** 4
    )


def pq_of_angles(a) -> np.ndarray:
    """(p1, p2, q) at angle triples (..., 3)."""
    a = np.asarray(a, dtype=float)
    al, be, ga = a[..., 0], a[..., 1], a[..., 2]
    p1 = np.cos(al) + np.cos(be) + np.cos(ga) + np.cos(al + be + ga)
    p2 = np.sin(al) + np.sin(be) + np.sin(ga) - np.sin(al + be + ga)
    q = 2 * (np.cos(al + be) + np.cos(al + ga) + np.cos(be + ga))
    return np.stack([p1, p2, q], axis=-1)


def _pq_jacobian_fd(a, h: float = 1e-3) -> np.ndarray:
    """d(p1, p2, q)/d(alpha, beta, gamma) by a five-point stencil, shape (..., 3, 3)."""
    a = np.asarray(a, dtype=float)
    cols = []
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        cols.append(
            (-pq_of_angles(a + 2 * e) + 8 * pq_of_angles(a + e) - 8 * pq_of_angles(a - e) + pq_of_angles(a - 2 * e))
            / (12 * h)
        )
    return np.stack(cols, axis=-1)


def jacobian_det_fd(a, h: float = 1e-3) -> np.ndarray:
    """det d(p1, p2, q)/d(alpha, beta, gamma) in the literal coordinates."""
    return np.linalg.det(_pq_jacobian_fd(a, h))


# R3 = {(z1, q, conj z1)} sits in C^3 = R^6 with p1, p2 along vectors of length sqrt 2,
# so its Euclidean volume element is 2 dp1 dp2 dq.
_FRAME = np.diag([math.sqrt(2.0), math.sqrt(2.0), 1.0])
VOLUME_FACTOR = 2.0


def gram_det_fd(a, h: float = 1e-3) -> np.ndarray:
    """Squared volume factor of the angle parametrization of K inside C^3 = R^6."""
    Jm = _FRAME @ _pq_jacobian_fd(a, h)
    return np.linalg.det(Jm) ** 2


MU_CONST = 3.0 / math.pi ** 3
D3_TOL = 1e-8


def mu_density(z1, z2, tol: float = D3_TOL) -> float:
    """Density of the maximal-entropy measure in (p1, p2, q); inf on the boundary."""
    if not (np.isfinite(z1) and np.isfinite(z2)):
        raise DomainError("non-finite input")
    if not torus.k_membership(z1, z2, eps=1e-6):
        return 0.0
    v = float(d3(z1, z2))
    if abs(v) <= tol:
        return math.inf
    if v < 0:
        raise NumericalError(f"d3 = {v} is negative inside K")
    return MU_CONST / math.sqrt(v)


def mu_density_batch(z1, z2, tol: float = D3_TOL) -> np.ndarray:
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.real(np.asarray(z2, dtype=complex))
    inside = torus.circle_deviation(z1, z2) <= 1e-6
    v = d3(z1, z2)
    out = np.zeros(v.shape)
    good = inside & (v > tol)
    out[good] = MU_CONST / np.sqrt(v[good])
    out[inside & (np.abs(v) <= tol)] = np.inf
    return out


Q_RANGE = (-6.0, 6.0)  # q = z2 ranges over [-6, 6] on K


@dataclass(frozen=True)
class MeasureEstimate:
    value: float
    stderr: float
    n_samples: int
    inside_fraction: float
    method: str


def k_slice(z1):
    """The q-interval of K above z1, and the other two roots of d3 in q.

    Returns (ok, lo, a, b, hi): K meets the line over z1 in [a, b] when ok, and
    d3(z1, q) = 16 (q - lo)(q - a)(b - q)(hi - q).
    """
    on, val, curv = torus.circle_critical_points(z1)
    full = on.all(axis=1)
    is_min = on & (curv > 0)
    is_max = on & (curv < 0)
    a = np.where(is_min, val, -np.inf).max(axis=1)
    lo = np.where(is_min, val, np.inf).min(axis=1)
    b = np.where(is_max, val, np.inf).min(axis=1)
    hi = np.where(is_max, val, -np.inf).max(axis=1)
    ok = full & (a < b) & (is_min.sum(axis=1) == 2)
    return ok, lo, a, b, hi


def _box_integral(rng, n_samples, batch):
    lo = np.array([-4.0, -4.0, Q_RANGE[0]])
    hi = np.array([4.0, 4.0, Q_RANGE[1]])
    vol = VOLUME_FACTOR * float(np.prod(hi - lo))
    vals = []
    done = 0
    while done < n_samples:
        k = min(batch, n_samples - done)
        p = lo + (hi - lo) * rng.random((k, 3))
        f = mu_density_batch(p[:, 0] + 1j * p[:, 1], p[:, 2])
        f[~np.isfinite(f)] = 0.0
        vals.append(f)
        done += k
    f = np.concatenate(vals)
    return vol * f, (f > 0).mean()


_GC_NODES = 32


def _slice_integral(rng, n_samples, batch):
    # z1 uniform in the disk |z1| <= 4, q integrated by Gauss-Chebyshev, whose
    # weight absorbs the inverse square-root behaviour of the density at both ends.
    k = np.arange(1, _GC_NODES + 1)
    x = np.cos((2 * k - 1) * math.pi / (2 * _GC_NODES))
    area = 16.0 * math.pi
    vals = []
    done = 0
    while done < n_samples:
        m = min(batch, n_samples - done)
        r = 4.0 * np.sqrt(rng.random(m))
        th = 2 * math.pi * rng.random(m)
        z1 = r * np.exp(1j * th)
        ok, lo, a, b, hi = k_slice(z1)
        H = np.zeros(m)
        if ok.any():
            a, b, lo, hi = a[ok, None], b[ok, None], lo[ok, None], hi[ok, None]
            q = (a + b) / 2 + (b - a) / 2 * x
            # sqrt((q - a)(b - q) / d3) with d3 in factored form
            w = 1.0 / (4.0 * np.sqrt((q - lo) * (hi - q)))
            H[ok] = MU_CONST * math.pi / _GC_NODES * w.sum(axis=1)
        vals.append(VOLUME_FACTOR * area * H)
        done += m
    f = np.concatenate(vals)
    return f, (f > 0).mean()


def measure_integral(
    n_samples: int, seed: int = 0, method: str = "slice", batch: int = 50_000
) -> MeasureEstimate:
    """Monte Carlo estimate of the total mass of the density over K.

    Volume is the Euclidean volume of R3 inside C^3.  method="box" samples a box
    around K directly; its estimator has a log-divergent second moment (the density
    blows up like dist^{-1/2} at the boundary), so the default "slice" samples z1 and
    integrates each q-slice by quadrature.
    """
    if n_samples < 2:
        raise DomainError("need at least two samples")
    rng = np.random.default_rng(seed)
    if method == "box":
        f, frac = _box_integral(rng, n_samples, batch)
    elif method == "slice":
        f, frac = _slice_integral(rng, n_samples, batch)
    else:
        raise DomainError(f"unknown method {method!r}")
    return MeasureEstimate(
        float(f.mean()), float(f.std(ddof=1) / math.sqrt(len(f))), len(f), float(frac), method
    )


# --- Lyapunov exponents -----------------------------------------------------

def _qr_exponents(jacobians) -> np.ndarray:
    """Benettin QR accumulation over a sequence of (S, k, k) Jacobian batches."""
    it = iter(jacobians)
    first = next(it)
    S, k, _ = first.shape
    Q = np.broadcast_to(np.eye(k, dtype=complex), (S, k, k)).copy()
    acc = np.zeros((S, k))
    steps = 0
    for J in [first, *it]:
        Q, R = np.linalg.qr(J @ Q)
        acc += np.log(np.abs(np.diagonal(R, axis1=1, axis2=2)))
        steps += 1
    return acc / steps


def lyapunov_estimate(
    m: ChebyshevMapA3,
    n: int,
    n_samples: int,
    seed: int = 0,
    samples: np.ndarray | None = None,
) -> np.ndarray:
    """The three exponents, averaged over samples of the invariant measure.

    Orbits are followed exactly through the alcove (s -> fold(d s)) so they stay on K;
    Jacobians of f are accumulated along them with QR re-orthonormalization.
    """
    if n < 1 or n_samples < 1:
        raise DomainError("need n >= 1 and at least one sample")
    rng = np.random.default_rng(seed)
    s = torus.sample_alcove(rng, n_samples) if samples is None else np.asarray(samples, float)
    d = m.degree

    def jacs():
        cur = s
        for _ in range(n):
            z = torus.phi1_angles(torus.s_to_angles(cur))
            yield jacobian_eval(m, z)
            cur = torus.fold_batch(d * cur)

    per_sample = _qr_exponents(jacs())
    return np.sort(per_sample.mean(axis=0))[::-1]


def fiber_lyapunov_estimate(d: int, n: int, n_samples: int, seed: int = 0) -> np.ndarray:
    """Exponents of the skew product at infinity along orbits on the strip.

    A strip point is (u1 u2, u1 + u2) with |u1| = |u2| = 1 in the chart (xi, eta);
    the skew product acts by u -> u^d.  Uniform angles give theta uniform and
    x = 2 cos(phi) with phi uniform.
    """
    if n < 1 or n_samples < 1:
        raise DomainError("need n >= 1 and at least one sample")
    rng = np.random.default_rng(seed)
    ang = rng.uniform(0, 2 * math.pi, (n_samples, 2))
    h2 = h2_polynomial(d)
    dh_dz1, dh_dz2 = h2.diff(0), h2.diff(1)

    def jacs():
        a = ang
        for _ in range(n):
            u = np.exp(1j * a)
            xi, eta = u[:, 0] * u[:, 1], u[:, 0] + u[:, 1]
            pts = np.stack([xi, eta, np.ones_like(xi)], axis=-1)
            J = np.zeros((len(xi), 2, 2), dtype=complex)
            J[:, 0, 0] = d * xi ** (d - 1)
            J[:, 1, 0] = dh_dz1.evaluate(pts)
            J[:, 1, 1] = dh_dz2.evaluate(pts)
            yield J
            a = np.mod(d * a, 2 * math.pi)

    return np.sort(_qr_exponents(jacs()).mean(axis=0))[::-1]


def random_periodic_points(d: int, n: int, n_samples: int, seed: int = 0) -> np.ndarray:
    """Period-n points of s -> fold(d s) in randomly chosen cells (alcove coordinates)."""
    rng = np.random.default_rng(seed)
    N = d ** n
    out = np.empty((n_samples, 3))
    for i, s0 in enumerate(torus.sample_alcove(rng, n_samples)):
        _, word = torus.fold(N * s0, budget=20 * N + torus.FOLD_BUDGET)
        s = torus.ALCOVE_BARYCENTER.copy()
        for _ in range(200):
            nxt = word.apply(s) / N
            if np.abs(nxt - s).max() < 1e-13:
                s = nxt
                break
            s = nxt
        out[i] = s
    return out


def lyapunov_periodic(m: ChebyshevMapA3, n: int, n_samples: int, seed: int = 0) -> np.ndarray:
    """Exponents (1/n) log|eigenvalues of D f^n| on random period-n orbits.

    Orbits meeting the boundary of K are skipped: there f folds and the normal
    eigenvalue is d^2 rather than d.
    """
    d = m.degree
    s = random_periodic_points(d, n, n_samples, seed)
    J = np.broadcast_to(np.eye(3, dtype=complex), (n_samples, 3, 3)).copy()
    interior = np.ones(n_samples, dtype=bool)
    cur = s
    for _ in range(n):
        z = torus.phi1_angles(torus.s_to_angles(cur))
        interior &= d3(z[:, 0], z[:, 1]) > D3_TOL
        J = jacobian_eval(m, z) @ J
        cur = torus.fold_batch(d * cur)
    if not interior.any():
        raise NumericalError("every sampled orbit meets the boundary of K")
    lam = np.sort(np.log(np.abs(np.linalg.eigvals(J[interior]))) / n, axis=1)[:, ::-1]
    return lam.mean(axis=0)


def homogeneous_green(m: ChebyshevMapA3, u, n: int = 60) -> float:
    """lim d^{-k} log|H^k u| for the leading homogeneous part H (sup norm)."""
    from .poly import homogeneous_leading

    H = homogeneous_leading(m)
    d = m.degree
    w = np.asarray(u, dtype=complex).reshape(3)
    top = np.abs(w).max()
    if top == 0:
        raise DomainError("zero direction")
    w = w / top
    acc = math.log(top)
    scale = 1.0
    for _ in range(n):
        w = np.array([h.evaluate(w) for h in H])
        top = np.abs(w).max()
        if top == 0:
            raise NumericalError("leading part collapsed")
        w = w / top
        scale /= d
        acc += scale * math.log(top)
    return acc


__all__ = [
    "ESCAPE_RADIUS",
    "EquidistributionStats",
    "GreenEstimate",
    "MeasureEstimate",
    "OrbitClass",
    "OrbitKind",
    "OrbitTrace",
    "P1",
    "P2",
    "P3",
    "PeriodicPointSet",
    "ProjectivePoint",
    "alcoves_in_scaled_alcove",
    "circle_distance",
    "classify_exact",
    "classify_moduli",
    "classify_numeric",
    "d3",
    "equidistribution_stats",
    "fiber_lyapunov_estimate",
    "gram_det_fd",
    "homogeneous_green",
    "k_slice",
    "lyapunov_periodic",
    "random_periodic_points",
    "fixed_point_distance",
    "green",
    "iterate",
    "jacobian_det_fd",
    "lyapunov_estimate",
    "measure_integral",
    "mobius_distance",
    "mobius_point",
    "mu_density",
    "mu_density_batch",
    "periodic_orbit_residual",
    "periodic_points",
    "periodic_spectral_radius",
    "pq_of_angles",
    "skew_product",
]
