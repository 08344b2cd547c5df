"""Real surfaces in R3 = {z3 = conj z1} and the rays that sweep them.

Real geometry uses (p1, p2, q) = (Re z1, Im z1, z2).  The base curve is the space
astroid a(u) = (4cos^3 u, 4sin^3 u, 6cos 2u); every surface of the critical-value
picture is a union of pieces of its tangent developable
chi(u, v) = a(u) + v (cos u, -sin u, 2).
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import torus
from .dynamics import ProjectivePoint
from .errors import DomainError

TWO_PI = 2.0 * math.pi
V_TOL = 1e-12


# --- base curve and developable ---------------------------------------------

def astroid(u):
    u = np.asarray(u, dtype=float)
    return np.stack([4 * np.cos(u) ** 3, 4 * np.sin(u) ** 3, 6 * np.cos(2 * u)], axis=-1)


def astroid_derivative(u):
    u = np.asarray(u, dtype=float)
    c, s = np.cos(u), np.sin(u)
    return np.stack([-12 * c * c * s, 12 * s * s * c, -12 * np.sin(2 * u)], axis=-1)


def ruling_direction(u):
    u = np.asarray(u, dtype=float)
    return np.stack([np.cos(u), -np.sin(u), 2 * np.ones_like(u)], axis=-1)


def v_bounds(u):
    """Ruling parameter range of the astroidalhedron over u."""
    c2 = np.cos(2 * np.asarray(u, dtype=float))
    return -2 - 2 * c2, 2 - 2 * c2


def tangent_developable(u, v):
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    return astroid(u) + v[..., None] * ruling_direction(u)


def astroidalhedron(u, v):
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    lo, hi = v_bounds(u)
    if np.any(v < lo - V_TOL) or np.any(v > hi + V_TOL):
        raise DomainError("v outside the astroidalhedron range [-2-2cos2u, 2-2cos2u]")
    return tangent_developable(u, v)


def developable_scaled(u, w):
    """chi(u, 2w - 2cos 2u); w in [-1, 1] sweeps the astroidalhedron exactly."""
    u = np.asarray(u, dtype=float)
    return tangent_developable(u, 2 * np.asarray(w, dtype=float) - 2 * np.cos(2 * u))


def tangency_residual(u):
    """|a'(u) x ruling direction|; zero because a'(u) = -6 sin 2u (cos u, -sin u, 2)."""
    return np.linalg.norm(np.cross(astroid_derivative(u), ruling_direction(u)), axis=-1)


def mobius(theta, x) -> ProjectivePoint:
    if abs(x) > 2:
        raise DomainError("|x| must be <= 2 on the Mobius strip")
    return ProjectivePoint([np.exp(1j * theta), x * np.exp(0.5j * theta), 1.0, 0.0])


# --- rays -------------------------------------------------------------------

class RayKind(enum.Enum):
    EXTERNAL = "External"
    INTERNAL = "Internal"


def external_ray_point(alpha, beta, gamma, r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 1):
        raise DomainError("external rays need r >= 1")
    a, b, g = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (alpha, beta, gamma)))
    t = np.stack(np.broadcast_arrays(r * np.exp(1j * a), np.exp(1j * b), np.exp(1j * g) / r), axis=-1)
    return torus.phi1(t)


def external_ray_limit(alpha, beta, gamma) -> ProjectivePoint:
    h = 0.5 * (alpha + gamma)
    return ProjectivePoint(
        [np.exp(2j * h), 2 * math.cos(h + beta) * np.exp(1j * h), 1.0, 0.0]
    )


def r3_ray_point(alpha, beta, r):
    """R(alpha, beta, alpha; r): affine in r + 1/r, hence a half-line in R3."""
    alpha, beta, r = (np.asarray(x, dtype=float) for x in (alpha, beta, r))
    s = r + 1 / r
    z1 = s * np.exp(1j * alpha) + np.exp(1j * beta) + np.exp(-1j * (2 * alpha + beta))
    z2 = 2 * s * np.cos(alpha + beta) + 2 * np.cos(2 * alpha)
    return np.stack(np.broadcast_arrays(z1, z2 + 0j, np.conj(z1)), axis=-1)


def internal_ray_point(alpha, beta, theta):
    """Replace r by e^{i theta} in R(alpha, beta, alpha; r).

    theta = 0 is the landing point of R(alpha, beta, alpha) and theta = pi the
    landing point of R(alpha + pi, beta, alpha + pi).
    """
    alpha, beta, theta = (np.asarray(x, dtype=float) for x in (alpha, beta, theta))
    z1 = (
        2 * np.cos(theta) * np.exp(1j * alpha)
        + np.exp(1j * beta)
        + np.exp(-1j * (2 * alpha + beta))
    )
    z2 = 4 * np.cos(theta) * np.cos(alpha + beta) + 2 * np.cos(2 * alpha)
    return np.stack(np.broadcast_arrays(z1, z2 + 0j, np.conj(z1)), axis=-1)


@dataclass(frozen=True)
class Ray:
    kind: RayKind
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if self.kind is RayKind.INTERNAL and not math.isclose(self.alpha, self.gamma):
            raise DomainError("internal rays are defined for gamma = alpha")

    def canonical(self) -> "Ray":
        """Representative under beta <-> -alpha-beta-gamma (swapping t2 and t4)."""
        b2 = -self.alpha - self.beta - self.gamma
        b1 = self.beta % TWO_PI
        b2 = b2 % TWO_PI
        return Ray(self.kind, self.alpha, min(b1, b2), self.gamma)

    def points(self, params) -> np.ndarray:
        params = np.asarray(params, dtype=float)
        if self.kind is RayKind.EXTERNAL:
            return external_ray_point(self.alpha, self.beta, self.gamma, params)
        return internal_ray_point(self.alpha, self.beta, params)

    def to_json_obj(self, params) -> dict:
        pts = self.points(params)
        return {
            "kind": self.kind.value,
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "samples": [
                {"param": float(p), "z": [[c.real, c.imag] for c in row]}
                for p, row in zip(np.atleast_1d(params), np.atleast_2d(pts))
            ],
        }


def ruling_E(alpha: float, beta: float):
    """Endpoints of R(alpha, beta, alpha): the strip point at infinity and the landing
    point on the astroidalhedron (as (p1, p2, q))."""
    if abs(math.sin(alpha + beta)) < 1e-12:
        raise DomainError("alpha + beta in {0, pi} gives no ruling of the open strip")
    src = ProjectivePoint(
        [np.exp(2j * alpha), 2 * math.cos(alpha + beta) * np.exp(1j * alpha), 1.0, 0.0]
    )
    z1 = 2 * np.exp(1j * alpha) + np.exp(1j * beta) + np.exp(-1j * (2 * alpha + beta))
    z2 = 4 * math.cos(alpha + beta) + 2 * math.cos(2 * alpha)
    return src, np.array([z1.real, z1.imag, z2])


def inscribed_face(c: float):
    """Plane n . (p1, p2, q) = offset containing phi1({alpha = c} within the natural domain)."""
    return (math.cos(c), -math.sin(c), -0.5, math.cos(2 * c))


def plane_residual(plane, pts):
    n1, n2, n3, off = plane
    pts = np.asarray(pts, dtype=float)
    return n1 * pts[..., 0] + n2 * pts[..., 1] + n3 * pts[..., 2] - off


def natural_face_samples(rng: np.random.Generator, c: float, n: int) -> np.ndarray:
    """Angle triples (c, beta, gamma) inside the natural domain, uniform on the face."""
    # c <= beta <= gamma <= 2pi - 2c - beta - gamma and -2c-beta-gamma <= c
    out = np.empty((0, 3))
    while out.shape[0] < n:
        b = rng.uniform(-4 * math.pi, 4 * math.pi, size=4 * n)
        g = rng.uniform(-4 * math.pi, 4 * math.pi, size=4 * n)
        a = np.stack([np.full_like(b, c), b, g], axis=-1)
        out = np.concatenate([out, a[torus.in_natural_domain(a)]])
    return out[:n]


# --- bowls and whiskers -----------------------------------------------------

def _s(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 1):
        raise DomainError("bowl and whisker parameters need r >= 1")
    return r * r + 1 / (r * r)


def bowl_point(which: str, theta, r):
    s = _s(r)
    theta = np.asarray(theta, dtype=float)
    if which == "top":
        z1 = s * np.exp(-1j * theta) + 2 * np.exp(1j * theta)
        z2 = 2 * s + 2 * np.cos(2 * theta)
    elif which == "lower":
        z1 = s * np.exp(-1j * theta) - 2 * np.exp(1j * theta)
        z2 = -2 * s + 2 * np.cos(2 * theta)
    else:
        raise DomainError(f"unknown bowl {which!r}")
    return np.stack(np.broadcast_arrays(z1, z2 + 0j, np.conj(z1)), axis=-1)


def bowl_projective(which: str, theta: float, r: float) -> ProjectivePoint:
    """Bowl point in homogeneous coordinates, scaled by 1/s so r -> inf stays finite."""
    z = bowl_point(which, theta, r)
    s = float(_s(r))
    return ProjectivePoint(np.append(z / s, 1.0 / s))


def bowl_on_developable(which: str, theta, r):
    """Developable parameters (u, w) of a bowl point, w as in developable_scaled."""
    s = _s(r)
    theta = np.asarray(theta, dtype=float)
    if which == "top":
        return theta, s / 2
    return theta + math.pi, -s / 2


def whisker_point(which: str, r):
    s = _s(r)
    q4 = np.asarray(r, dtype=float) ** 4
    if which == "top":
        z1 = -2 * s + 0j
        z2 = q4 + 1 / q4 + 4
    elif which == "lower":
        z1 = 2j * s
        z2 = -q4 - 1 / q4 - 4
    else:
        raise DomainError(f"unknown whisker {which!r}")
    return np.stack(np.broadcast_arrays(z1, z2 + 0j, np.conj(z1)), axis=-1)


def whisker_point_quartic_chart(which: str, r):
    """Whiskers in the binary-quartic chart: beta = -z1, gamma = z2 / 2."""
    z = whisker_point(which, r)
    return -z[..., 0], z[..., 1].real / 2


# --- surface distance -------------------------------------------------------

_GOLD = (math.sqrt(5) - 1) / 2


def _dist_at(P, u, clip: bool):
    a = astroid(u)
    dvec = ruling_direction(u)
    v = np.einsum("...i,...i->...", P - a, dvec) / 5.0
    if clip:
        lo, hi = v_bounds(u)
        v = np.clip(v, lo, hi)
    diff = P - a - v[..., None] * dvec
    return np.linalg.norm(diff, axis=-1), v


def _ruling_candidates(P):
    """Angles u where the ruling through a(u) can contain P.

    Eliminating v between the coordinates gives p1 sin u + p2 cos u = 2 sin 2u,
    a quartic 2w^4 - z1 w^3 + conj(z1) w - 2 = 0 in w = e^{iu}.
    """
    z1 = P[:, 0] + 1j * P[:, 1]
    n = len(P)
    c = np.zeros((n, 4, 4), dtype=complex)
    c[:, 1, 0] = c[:, 2, 1] = c[:, 3, 2] = 1.0
    c[:, 0, 0] = z1 / 2
    c[:, 0, 2] = -np.conj(z1) / 2
    c[:, 0, 3] = 1.0
    return np.angle(np.linalg.eigvals(c))


def surface_distance(
    points, surface: str = "developable", n_seed: int = 64, n_refine: int = 4, iters: int = 60
):
    """Euclidean distance from points (N, 3) in (p1, p2, q) to a surface.

    For fixed u the nearest point on a ruling is a projection (clipped to the
    segment on the astroidalhedron), so only u is searched.  Seeds are the best
    local minima of an n_seed grid plus the four algebraic ruling candidates;
    each is refined by golden section.  Returns (distance, u, v).
    """
    if surface not in ("developable", "astroidalhedron"):
        raise DomainError(f"unknown surface {surface!r}")
    clip = surface == "astroidalhedron"
    P = np.atleast_2d(np.asarray(points, dtype=float))
    grid = np.linspace(0, TWO_PI, n_seed, endpoint=False)
    prof, _ = _dist_at(P[:, None, :], grid[None, :], clip)
    is_min = (prof <= np.roll(prof, 1, axis=1)) & (prof <= np.roll(prof, -1, axis=1))
    ranked = np.where(is_min, prof, np.inf)
    k = np.argsort(ranked, axis=1)[:, :n_refine]
    h = TWO_PI / n_seed
    seeds = np.concatenate([grid[k], _ruling_candidates(P)], axis=1)
    half = np.concatenate(
        [np.full(k.shape, h), np.full((len(P), 4), 1e-3)], axis=1
    )
    Q = P[:, None, :]
    lo = seeds - half
    hi = seeds + half
    x1 = hi - _GOLD * (hi - lo)
    x2 = lo + _GOLD * (hi - lo)
    f1, _ = _dist_at(Q, x1, clip)
    f2, _ = _dist_at(Q, x2, clip)
    for _ in range(iters):
        left = f1 < f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        x1, x2 = (
            np.where(left, hi - _GOLD * (hi - lo), x2),
            np.where(left, x1, lo + _GOLD * (hi - lo)),
        )
        f1, _ = _dist_at(Q, x1, clip)
        f2, _ = _dist_at(Q, x2, clip)
    u = np.concatenate([0.5 * (lo + hi), seeds], axis=1)
    d, v = _dist_at(Q, u, clip)
    best = np.argmin(d, axis=1)
    rows = np.arange(len(P))
    return d[rows, best], np.mod(u[rows, best], TWO_PI), v[rows, best]


# --- patches and meshes -----------------------------------------------------

class SurfaceKind(enum.Enum):
    ASTROIDALHEDRON = "Astroidalhedron"
    TANGENT_DEVELOPABLE = "TangentDevelopable"
    MOBIUS = "Mobius"
    TOP_BOWL = "TopBowl"
    LOWER_BOWL = "LowerBowl"
    TOP_WHISKERS = "TopWhiskers"
    LOWER_WHISKERS = "LowerWhiskers"


_LEGAL = {
    SurfaceKind.ASTROIDALHEDRON: ((0.0, TWO_PI), (-1.0, 1.0)),
    SurfaceKind.TANGENT_DEVELOPABLE: ((0.0, TWO_PI), (-math.inf, math.inf)),
    SurfaceKind.MOBIUS: ((0.0, TWO_PI), (-2.0, 2.0)),
    SurfaceKind.TOP_BOWL: ((0.0, TWO_PI), (1.0, math.inf)),
    SurfaceKind.LOWER_BOWL: ((0.0, TWO_PI), (1.0, math.inf)),
    SurfaceKind.TOP_WHISKERS: ((0.0, 0.0), (1.0, math.inf)),
    SurfaceKind.LOWER_WHISKERS: ((0.0, 0.0), (1.0, math.inf)),
}


@dataclass(frozen=True)
class SurfacePatch:
    """A surface kind with its parameter rectangle.

    First parameter: u or theta.  Second: v for the developable, w in [-1, 1] for
    the astroidalhedron (see developable_scaled), x for the strip, r for bowls and
    whiskers.  Whiskers are curves; their first range is ignored.
    """

    kind: SurfaceKind
    u_range: tuple = None
    v_range: tuple = None

    def __post_init__(self):
        (ul, uh), (vl, vh) = _LEGAL[self.kind]
        defaults = {
            SurfaceKind.TANGENT_DEVELOPABLE: (-8.0, 8.0),
            SurfaceKind.TOP_BOWL: (1.0, 3.0),
            SurfaceKind.LOWER_BOWL: (1.0, 3.0),
            SurfaceKind.TOP_WHISKERS: (1.0, 3.0),
            SurfaceKind.LOWER_WHISKERS: (1.0, 3.0),
        }
        if self.u_range is None:
            object.__setattr__(self, "u_range", (ul, uh))
        if self.v_range is None:
            object.__setattr__(self, "v_range", defaults.get(self.kind, (vl, vh)))
        a, b = self.u_range
        c, d = self.v_range
        if not (ul - 1e-12 <= a <= b <= uh + 1e-12) and self.kind not in (
            SurfaceKind.TOP_WHISKERS,
            SurfaceKind.LOWER_WHISKERS,
        ):
            raise DomainError(f"u range {self.u_range} outside {(ul, uh)}")
        if not (vl - 1e-12 <= c <= d <= vh + 1e-12) or not (math.isfinite(c) and math.isfinite(d)):
            raise DomainError(f"v range {self.v_range} outside {(vl, vh)} or unbounded")

    @property
    def periodic(self) -> bool:
        return self.kind not in (SurfaceKind.TOP_WHISKERS, SurfaceKind.LOWER_WHISKERS) and (
            math.isclose(self.u_range[1] - self.u_range[0], TWO_PI)
        )

    def evaluate(self, u, v) -> np.ndarray:
        """Points in (p1, p2, q); the strip uses the embedding of mobius_embedding."""
        k = self.kind
        if k is SurfaceKind.ASTROIDALHEDRON:
            return developable_scaled(u, v)
        if k is SurfaceKind.TANGENT_DEVELOPABLE:
            return tangent_developable(u, v)
        if k is SurfaceKind.MOBIUS:
            return mobius_embedding(u, v)
        if k in (SurfaceKind.TOP_BOWL, SurfaceKind.LOWER_BOWL):
            which = "top" if k is SurfaceKind.TOP_BOWL else "lower"
            return torus.to_pq(bowl_point(which, u, v))
        which = "top" if k is SurfaceKind.TOP_WHISKERS else "lower"
        return torus.to_pq(whisker_point(which, v))


def mobius_embedding(theta, x):
    """A half-twisted band in R^3 standing in for the strip at infinity.

    The strip lives in the plane at infinity, so for export it is drawn as a
    standard band of core radius 3 whose fibre x turns by pi over one loop.
    """
    theta, x = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(x, dtype=float))
    rad = 3 + x * np.cos(theta / 2)
    return np.stack([rad * np.cos(theta), rad * np.sin(theta), x * np.sin(theta / 2)], axis=-1)


@dataclass
class Mesh:
    vertices: np.ndarray
    faces: np.ndarray
    lines: list = field(default_factory=list)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        self.faces = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        if self.faces.size and (self.faces.min() < 0 or self.faces.max() >= len(self.vertices)):
            raise DomainError("face index out of range")

    def triangle_areas(self) -> np.ndarray:
        v = self.vertices[self.faces]
        return 0.5 * np.linalg.norm(np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]), axis=1)

    def edge_counts(self) -> dict:
        counts: dict = {}
        for f in self.faces:
            for i in range(3):
                a, b = int(f[i]), int(f[(i + 1) % 3])
                e = (a, b) if a < b else (b, a)
                counts[e] = counts.get(e, 0) + 1
        return counts

    def boundary_edges(self) -> list:
        return [e for e, c in self.edge_counts().items() if c == 1]

    def nonmanifold_edges(self) -> list:
        return [e for e, c in self.edge_counts().items() if c > 2]


MIN_AREA = 1e-12


class _Welder:
    def __init__(self):
        self.index: dict = {}
        self.verts: list = []

    def add(self, key, p) -> int:
        i = self.index.get(key)
        if i is None:
            i = len(self.verts)
            self.index[key] = i
            self.verts.append(p)
        return i


def _grid_mesh(points, keyf, nu, nv, close_u):
    """Triangulate a (nu+1, nv) point grid, welding vertices that share a key."""
    w = _Welder()
    ids = np.empty((nu + 1, nv), dtype=np.int64)
    for i in range(nu + 1):
        for j in range(nv):
            ids[i, j] = w.add(keyf(i, j), points[i, j])
    faces = []
    for i in range(nu):
        for j in range(nv - 1):
            a, b, c, d = ids[i, j], ids[i + 1, j], ids[i + 1, j + 1], ids[i, j + 1]
            faces.append((a, b, c))
            faces.append((a, c, d))
    return w, faces


def _finish(w: _Welder, faces, lines=()) -> Mesh:
    verts = np.array(w.verts, dtype=float).reshape(-1, 3)
    faces = np.array(faces, dtype=np.int64).reshape(-1, 3)
    keep = (faces[:, 0] != faces[:, 1]) & (faces[:, 1] != faces[:, 2]) & (faces[:, 0] != faces[:, 2])
    faces = faces[keep]
    m = Mesh(verts, faces, list(lines))
    if len(faces):
        m.faces = faces[m.triangle_areas() > MIN_AREA]
    return m


def _astroidalhedron_mesh(nu: int, nv: int) -> Mesh:
    """Two sheets over the astroid, glued along the top and bottom seams.

    Sheet + runs from the astroid (v = 0) to v = vmax(u); sheet - to v = vmin(u).
    The top seam identifies u with -u, the bottom seam u with pi - u, and each
    sheet collapses to a point where its v-range vanishes.  The astroid rows are
    left unwelded between sheets: they are the cuspidal edges.
    """
    if nu % 4:
        raise DomainError("astroidalhedron meshes need nu divisible by 4")
    u = np.linspace(0, TWO_PI, nu + 1)
    t = np.linspace(0, 1, nv)
    lo, hi = v_bounds(u)
    w = _Welder()
    faces = []
    half = nu // 2
    for sign, ext in ((1, hi), (-1, lo)):
        ids = np.empty((nu + 1, nv), dtype=np.int64)
        for i in range(nu + 1):
            k = i % nu
            for j in range(nv):
                p = tangent_developable(u[i], t[j] * ext[i])
                if j == nv - 1:
                    if sign > 0:
                        key = ("top", min(k, (nu - k) % nu))
                    else:
                        m = (half - k) % nu
                        key = ("bot", min(k, m))
                elif j == 0:
                    key = ("edge", sign, k)
                else:
                    key = ("in", sign, k, j)
                if abs(ext[i]) < 1e-12:
                    key = ("pinch", sign, k)
                ids[i, j] = w.add(key, p)
        for i in range(nu):
            for j in range(nv - 1):
                a, b, c, d = ids[i, j], ids[i + 1, j], ids[i + 1, j + 1], ids[i, j + 1]
                faces.append((a, b, c))
                faces.append((a, c, d))
    return _finish(w, faces)


def mesh(patch: SurfacePatch, nu: int, nv: int) -> Mesh:
    if nu < 2 or nv < 2:
        raise DomainError("mesh resolution must be at least 2 x 2")
    k = patch.kind
    if k is SurfaceKind.ASTROIDALHEDRON and patch.periodic and patch.v_range == (-1.0, 1.0):
        return _astroidalhedron_mesh(nu, nv)
    if k in (SurfaceKind.TOP_WHISKERS, SurfaceKind.LOWER_WHISKERS):
        r = np.linspace(*patch.v_range, nu + 1)
        w = _Welder()
        sheet = patch.evaluate(0.0, r)
        ids = [w.add(("w", 0, i), sheet[i]) for i in range(nu + 1)]
        # the branch is symmetric: r and 1/r give the same point, draw one arc
        m = _finish(w, [], [ids])
        return m
    u = np.linspace(*patch.u_range, nu + 1)
    v = np.linspace(*patch.v_range, nv)
    U, V = np.meshgrid(u, v, indexing="ij")
    pts = patch.evaluate(U, V)
    periodic = patch.periodic
    if k is SurfaceKind.MOBIUS and periodic:
        def key(i, j):
            return (0, nv - 1 - j) if i == nu else (i, j)
    elif periodic:
        def key(i, j):
            return (i % nu, j)
    else:
        def key(i, j):
            return (i, j)
    w, faces = _grid_mesh(pts, key, nu, nv, periodic)
    return _finish(w, faces)


def export_obj(m: Mesh, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(mesh_to_obj(m))


def mesh_to_obj(m: Mesh) -> str:
    out = [f"v {x:.17g} {y:.17g} {z:.17g}" for x, y, z in m.vertices]
    out += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in m.faces]
    out += ["l " + " ".join(str(i + 1) for i in line) for line in m.lines]
    return "\n".join(out) + "\n"


def parse_obj(text: str) -> Mesh:
    verts, faces, lines = [], [], []
    for row in text.splitlines():
        parts = row.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            faces.append([int(x.split("/")[0]) - 1 for x in parts[1:4]])
        elif parts[0] == "l":
            lines.append([int(x) - 1 for x in parts[1:]])
    return Mesh(np.array(verts), np.array(faces, dtype=np.int64), lines)


def export_ply(m: Mesh, path) -> None:
    head = [
        "ply",
        "format ascii 1.0",
        f"element vertex {len(m.vertices)}",
        "property double x",
        "property double y",
        "property double z",
        f"element face {len(m.faces)}",
        "property list uchar int vertex_indices",
        "end_header",
    ]
    body = [f"{x:.17g} {y:.17g} {z:.17g}" for x, y, z in m.vertices]
    body += [f"3 {a} {b} {c}" for a, b, c in m.faces]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(head + body) + "\n")


def rays_json(rays, params) -> str:
    return json.dumps([r.to_json_obj(params) for r in rays], indent=1)


__all__ = [
    "astroid",
    "astroid_derivative",
    "ruling_direction",
    "v_bounds",
    "tangent_developable",
    "astroidalhedron",
    "developable_scaled",
    "tangency_residual",
    "mobius",
    "RayKind",
    "Ray",
    "external_ray_point",
    "external_ray_limit",
    "r3_ray_point",
    "internal_ray_point",
    "ruling_E",
    "inscribed_face",
    "plane_residual",
    "natural_face_samples",
    "bowl_point",
    "bowl_projective",
    "bowl_on_developable",
    "whisker_point",
    "whisker_point_quartic_chart",
    "surface_distance",
    "SurfaceKind",
    "SurfacePatch",
    "mobius_embedding",
    "Mesh",
    "mesh",
    "export_obj",
    "export_ply",
    "mesh_to_obj",
    "parse_obj",
    "rays_json",
]
