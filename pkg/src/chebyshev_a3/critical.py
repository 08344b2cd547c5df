"""Critical set of the A3 Chebyshev maps, its real critical values, and the
dictionary with degenerate binary quartics."""
from __future__ import annotations

import enum
import itertools
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import surfaces, torus
from .dynamics import OrbitClass, classify_numeric
from .errors import DomainError, NumericalError
from .poly import ChebyshevMapA3, build_map, evaluate

ROOT_TOL = 1e-10
BRANCH_TOL = 1e-9


# --- Jacobian determinants --------------------------------------------------

def _t4(t):
    arr = torus._as_t_array(t)
    return arr, 1.0 / (arr[..., 0] * arr[..., 1] * arr[..., 2])


def _pair_product(cols):
    out = 1.0 + 0j
    for i, j in itertools.combinations(range(4), 2):
        out = out * (cols[i] - cols[j])
    return out


def det_dphi1(t):
    """det of the Jacobian of phi1 in (t1, t2, t3): t4 prod_{i<j} (t_i - t_j)."""
    arr, t4 = _t4(t)
    cols = [arr[..., 0], arr[..., 1], arr[..., 2], t4]
    return t4 * _pair_product(cols)


def det_d_composite(t, d: int):
    """det of the Jacobian of P^d o phi1: d^3 t4 prod_{i<j} (t_i^d - t_j^d)."""
    arr, t4 = _t4(t)
    cols = [arr[..., 0] ** d, arr[..., 1] ** d, arr[..., 2] ** d, t4 ** d]
    return d ** 3 * t4 * _pair_product(cols)


def fd_jacobian(f, x, h: float = 1e-6):
    """Central-difference Jacobian of a holomorphic f: C^3 -> C^3 at points (N, 3)."""
    x = np.atleast_2d(np.asarray(x, dtype=complex))
    cols = []
    for k in range(3):
        step = h * np.maximum(1.0, np.abs(x[:, k]))
        e = np.zeros_like(x)
        e[:, k] = step
        cols.append((f(x + e) - f(x - e)) / (2 * step[:, None]))
    return np.stack(cols, axis=-1)


def fd_det_dphi1(t, h: float = 1e-6):
    return np.linalg.det(fd_jacobian(torus.phi1, t, h))


def fd_det_dp(m: ChebyshevMapA3, z, h: float = 1e-6):
    return np.linalg.det(fd_jacobian(lambda w: evaluate(m, w), z, h))


def normalized_det(J):
    """|det J| / sigma_max^3: a scale-free singularity measure, 0 iff J is singular."""
    J = np.asarray(J)
    return np.abs(np.linalg.det(J)) / np.linalg.norm(J, ord=2, axis=(-2, -1)) ** 3


def is_critical(t, d: int) -> bool:
    """True iff some ratio t_i / t_j is a nontrivial d-th root of unity."""
    if d < 2:
        raise DomainError("is_critical needs d >= 2")
    arr, t4 = _t4(t)
    ts = [complex(arr[0]), complex(arr[1]), complex(arr[2]), complex(t4)]
    for i, j in itertools.combinations(range(4), 2):
        ratio = ts[i] / ts[j]
        k = round(d * math.atan2(ratio.imag, ratio.real) / (2 * math.pi)) % d
        if k == 0:
            continue
        eps = complex(math.cos(2 * math.pi * k / d), math.sin(2 * math.pi * k / d))
        if abs(ratio - eps) <= ROOT_TOL:
            return True
    return False


# --- real critical values, degree 2 -----------------------------------------

def d2_preimage(t2, t3):
    """Torus point with t1 = -t4 over the given (t2, t3)."""
    t2, t3 = np.broadcast_arrays(np.asarray(t2, dtype=complex), np.asarray(t3, dtype=complex))
    t1 = 1j / np.sqrt(t2 * t3)
    return np.stack([t1, t2, t3], axis=-1)


def d2_critical_value(t2, t3):
    """P^2(phi1(t)) with t1 = -t4: the squares (t1^2, t2^2, t3^2) pushed through phi1."""
    t = d2_preimage(t2, t3)
    return torus.phi1(t ** 2)


def r3_residuals(r, R, angle_a, angle_b):
    """Left minus right of the three conditions for a degree-2 critical value to be real.

    Inputs: t2 = r e^{i alpha}, t3 = R e^{i beta}, angle_a = 2 alpha + 2 beta,
    angle_b = alpha - beta.
    """
    r, R, a, b = (np.asarray(x, dtype=float) for x in (r, R, angle_a, angle_b))
    if np.any(r <= 0) or np.any(R <= 0):
        raise DomainError("moduli must be positive")
    A = r * r * R ** 4 - r * r
    B = r ** 3 * R ** 3 - r * R
    f1 = A * np.cos(2 * b) + 2 * B * np.cos(a + b) - (R * R - r ** 4 * R * R)
    f2 = A * np.sin(2 * b) + 2 * B * np.sin(a + b)
    f3 = (r ** 4 * R ** 4 - 1) * np.sin(a) - 2 * (r ** 3 * R - r * R ** 3) * np.sin(b)
    return np.stack([f1, f2, f3], axis=-1)


def _residual_jacobian(x, y, a, b):
    """Partials of r3_residuals in (log r, log R, angle_a, angle_b)."""
    r, R = np.exp(x), np.exp(y)
    A = r * r * R ** 4 - r * r
    B = r ** 3 * R ** 3 - r * R
    Ax = 2 * A
    Ay = 4 * r * r * R ** 4
    Bx = 3 * r ** 3 * R ** 3 - r * R
    By = Bx
    c2b, s2b = np.cos(2 * b), np.sin(2 * b)
    cab, sab = np.cos(a + b), np.sin(a + b)
    C = r ** 4 * R ** 4 - 1
    D = r ** 3 * R - r * R ** 3
    J = np.empty(x.shape + (3, 4))
    J[..., 0, 0] = Ax * c2b + 2 * Bx * cab + 4 * r ** 4 * R * R
    J[..., 0, 1] = Ay * c2b + 2 * By * cab - 2 * R * R + 2 * r ** 4 * R * R
    J[..., 0, 2] = -2 * B * sab
    J[..., 0, 3] = -2 * A * s2b - 2 * B * sab
    J[..., 1, 0] = Ax * s2b + 2 * Bx * sab
    J[..., 1, 1] = Ay * s2b + 2 * By * sab
    J[..., 1, 2] = 2 * B * cab
    J[..., 1, 3] = 2 * A * c2b + 2 * B * cab
    J[..., 2, 0] = 4 * (C + 1) * np.sin(a) - 2 * (3 * r ** 3 * R - r * R ** 3) * np.sin(b)
    J[..., 2, 1] = 4 * (C + 1) * np.sin(a) - 2 * (r ** 3 * R - 3 * r * R ** 3) * np.sin(b)
    J[..., 2, 2] = C * np.cos(a)
    J[..., 2, 3] = -2 * D * np.cos(b)
    return J


class CriticalBranch(enum.Enum):
    ASTROIDALHEDRON = "Astroidalhedron"
    TOP_BOWL = "TopBowl"
    LOWER_BOWL = "LowerBowl"
    TOP_WHISKERS = "TopWhiskers"
    LOWER_WHISKERS = "LowerWhiskers"
    NONE = "None"


def _angle_is(x: float, target: float, tol: float) -> bool:
    return abs(math.remainder(x - target, 2 * math.pi)) <= tol


def classify_branch(t2: complex, t3: complex, tol: float = BRANCH_TOL) -> CriticalBranch:
    """Which piece of the real critical-value set the degree-2 point with t1 = -t4 hits."""
    t2, t3 = complex(t2), complex(t3)
    r, R = abs(t2), abs(t3)
    if r == 0 or R == 0:
        raise DomainError("torus coordinates must be nonzero")
    al, be = math.atan2(t2.imag, t2.real), math.atan2(t3.imag, t3.real)
    a, b = 2 * al + 2 * be, al - be
    unit_r, unit_R = abs(r - 1) <= tol, abs(R - 1) <= tol
    if unit_r and unit_R:
        return CriticalBranch.ASTROIDALHEDRON
    if abs(r * R - 1) <= tol:
        if _angle_is(b, math.pi, tol):
            return CriticalBranch.TOP_BOWL
        if _angle_is(b, 0.0, tol):
            return CriticalBranch.LOWER_BOWL
        return CriticalBranch.NONE
    if abs(r - R) <= tol * max(r, R):
        if _angle_is(a, 0.0, tol) and _angle_is(b, math.pi, tol):
            return CriticalBranch.TOP_WHISKERS
        if _angle_is(a, math.pi, tol) and _angle_is(b, 0.0, tol):
            return CriticalBranch.LOWER_WHISKERS
    return CriticalBranch.NONE


def branch_preimage(branch: CriticalBranch, p1, p2=None):
    """(t2, t3) on a branch: angles (alpha, beta) for A, (alpha, r) for the bowls,
    r for the whiskers."""
    p1 = np.asarray(p1, dtype=float)
    if branch is CriticalBranch.ASTROIDALHEDRON:
        return np.exp(1j * p1), np.exp(1j * np.asarray(p2, dtype=float))
    if branch in (CriticalBranch.TOP_BOWL, CriticalBranch.LOWER_BOWL):
        r = np.asarray(p2, dtype=float)
        sign = -1.0 if branch is CriticalBranch.TOP_BOWL else 1.0
        return r * np.exp(1j * p1), sign * np.exp(1j * p1) / r
    if branch is CriticalBranch.TOP_WHISKERS:
        return 1j * p1, -1j * p1
    if branch is CriticalBranch.LOWER_WHISKERS:
        w = p1 * np.exp(0.25j * math.pi)
        return w, w
    raise DomainError("no preimage for the empty branch")


def sample_branch(rng: np.random.Generator, branch: CriticalBranch, n: int, r_max: float = 3.0):
    """Parameters, preimages (N, 3) and real critical values (N, 3) in (p1, p2, q)."""
    if branch is CriticalBranch.ASTROIDALHEDRON:
        params = rng.uniform(0, 2 * math.pi, size=(n, 2))
        t2, t3 = branch_preimage(branch, params[:, 0], params[:, 1])
    elif branch in (CriticalBranch.TOP_BOWL, CriticalBranch.LOWER_BOWL):
        params = np.stack([rng.uniform(0, 2 * math.pi, n), rng.uniform(1.05, r_max, n)], axis=-1)
        t2, t3 = branch_preimage(branch, params[:, 0], params[:, 1])
    else:
        params = np.stack([rng.uniform(1.05, r_max, n), np.zeros(n)], axis=-1)
        t2, t3 = branch_preimage(branch, params[:, 0])
    pre = d2_preimage(t2, t3)
    val = torus.phi1(pre ** 2)
    return params, pre, val


def branch_csv(rows) -> str:
    """rows: iterable of (branch, params, pq)."""
    out = ["branch,param1,param2,p1,p2,q"]
    for branch, params, pq in rows:
        for p, v in zip(params, pq):
            out.append(
                ",".join([branch.value] + [f"{x:.17g}" for x in (p[0], p[1], v[0], v[1], v[2])])
            )
    return "\n".join(out) + "\n"


# --- search for stray real critical values ----------------------------------

@dataclass
class SearchReport:
    trials: int
    seed: int
    margin: float
    log_box: float
    best_max_residual: float
    best_point: dict
    below_threshold: int
    threshold: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1)


def _project(x, y, margin, box):
    x = np.clip(x, -box, box)
    y = np.clip(y, -box, box)
    u, v = x + y, x - y
    u = np.where(np.abs(u) < margin, np.where(u < 0, -margin, margin), u)
    v = np.where(np.abs(v) < margin, np.where(v < 0, -margin, margin), v)
    return 0.5 * (u + v), 0.5 * (u - v)


def stray_solution_search(
    trials: int = 100_000,
    seed: int = 0,
    margin: float = 0.05,
    log_box: float = 2.3,
    steps: int = 60,
    threshold: float = 1e-8,
) -> SearchReport:
    """Minimize the three residuals away from rR = 1 and r = R.

    Unknowns are (log r, log R, angle_a, angle_b), kept at least `margin` away
    from the excluded lines in log coordinates.  Damped Gauss-Newton with
    minimum-norm steps, from uniform random starts.
    """
    rng = np.random.default_rng(seed)
    x = rng.uniform(-log_box, log_box, trials)
    y = rng.uniform(-log_box, log_box, trials)
    x, y = _project(x, y, margin, log_box)
    a = rng.uniform(0, 2 * math.pi, trials)
    b = rng.uniform(0, 2 * math.pi, trials)
    lam = np.full(trials, 1e-3)

    def cost(x, y, a, b):
        F = r3_residuals(np.exp(x), np.exp(y), a, b)
        return F, np.einsum("ni,ni->n", F, F)

    F, c = cost(x, y, a, b)
    eye = np.eye(3)
    for _ in range(steps):
        J = _residual_jacobian(x, y, a, b)
        JJt = J @ np.swapaxes(J, 1, 2) + lam[:, None, None] * eye
        sol = np.linalg.solve(JJt, F[:, :, None])[:, :, 0]
        step = -np.einsum("nij,ni->nj", J, sol)
        nx, ny = _project(x + step[:, 0], y + step[:, 1], margin, log_box)
        na, nb = a + step[:, 2], b + step[:, 3]
        nF, nc = cost(nx, ny, na, nb)
        ok = nc < c
        x = np.where(ok, nx, x)
        y = np.where(ok, ny, y)
        a = np.where(ok, na, a)
        b = np.where(ok, nb, b)
        F = np.where(ok[:, None], nF, F)
        c = np.where(ok, nc, c)
        lam = np.where(ok, lam * 0.3, lam * 10.0)
        lam = np.clip(lam, 1e-12, 1e12)
    worst = np.abs(F).max(axis=1)
    k = int(np.argmin(worst))
    return SearchReport(
        trials=trials,
        seed=seed,
        margin=margin,
        log_box=log_box,
        best_max_residual=float(worst[k]),
        best_point={
            "r": float(np.exp(x[k])),
            "R": float(np.exp(y[k])),
            "angle_a": float(np.mod(a[k], 2 * math.pi)),
            "angle_b": float(np.mod(b[k], 2 * math.pi)),
        },
        below_threshold=int(np.sum(worst < threshold)),
        threshold=threshold,
    )


def whisker_absorption(which: str, r_values, budget: int = 200) -> list[OrbitClass]:
    """Numeric orbit class of whisker points under the degree-2 map."""
    m = build_map(2)
    pts = surfaces.whisker_point(which, np.asarray(r_values, dtype=float))
    return [classify_numeric(m, z, budget=budget) for z in np.atleast_2d(pts)]


# --- binary quartics --------------------------------------------------------

@dataclass(frozen=True)
class QuarticForm:
    """a x^4 + 4b x^3 y + 6c x^2 y^2 + 4d x y^3 + e y^4."""

    a: float
    b: float
    c: float
    d: float
    e: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.coefficients()):
            raise DomainError("quartic coefficients must be finite")

    def coefficients(self):
        return (self.a, self.b, self.c, self.d, self.e)

    def __call__(self, x, y):
        a, b, c, d, e = self.coefficients()
        return a * x ** 4 + 4 * b * x ** 3 * y + 6 * c * x * x * y * y + 4 * d * x * y ** 3 + e * y ** 4

    def invariants(self):
        a, b, c, d, e = self.coefficients()
        I = a * e - 4 * b * d + 3 * c * c
        J = a * c * e + 2 * b * c * d - c ** 3 - a * d * d - e * b * b
        return I, J


@dataclass(frozen=True)
class ComplexQuarticParams:
    """Re(alpha z^4 + beta z^3 conj(z) + gamma z^2 conj(z)^2) with z = x + iy."""

    alpha: complex
    beta: complex
    gamma: float

    def __post_init__(self):
        if not all(np.isfinite(v) for v in (self.alpha, self.beta, self.gamma)):
            raise DomainError("quartic parameters must be finite")

    def to_form(self) -> QuarticForm:
        ar, ai = self.alpha.real, self.alpha.imag
        br, bi = self.beta.real, self.beta.imag
        g = float(self.gamma)
        return QuarticForm(
            a=ar + br + g,
            b=-ai - bi / 2,
            c=-ar + g / 3,
            d=ai - bi / 2,
            e=ar - br + g,
        )

    def __call__(self, x, y):
        z = x + 1j * y
        zb = np.conj(z)
        return (self.alpha * z ** 4 + self.beta * z ** 3 * zb + self.gamma * z * z * zb * zb).real


def quartic_discriminant(q: QuarticForm) -> float:
    """Resultant of the two partials f_x / 4 and f_y / 4 (binary cubics).

    This equals I^3 - 27 J^2 and vanishes iff f has a repeated projective root.
    """
    a, b, c, d, e = q.coefficients()
    if a == b == c == d == e == 0:
        raise DomainError("the zero form has no discriminant")
    g = (a, 3 * b, 3 * c, d)
    h = (b, 3 * c, 3 * d, e)
    S = np.zeros((6, 6))
    for i in range(3):
        S[i, i:i + 4] = g
        S[3 + i, i:i + 4] = h
    return float(np.linalg.det(S))


def has_repeated_root(q: QuarticForm, tol: float = 1e-8) -> bool:
    """Companion-matrix test: two roots of f(x, 1) closer than tol (scaled), or a
    double root at infinity."""
    a, b, c, d, e = q.coefficients()
    coeffs = np.array([a, 4 * b, 6 * c, 4 * d, e], dtype=float)
    scale = np.abs(coeffs).max()
    if scale == 0:
        raise DomainError("zero form")
    coeffs = coeffs / scale
    lead = 0
    while lead < 5 and abs(coeffs[lead]) <= tol:
        lead += 1
    if lead >= 2:
        return True
    roots = np.roots(coeffs[lead:])
    if len(roots) < 2:
        return False
    # near-coincident roots separate like sqrt(perturbation)
    gap = min(
        abs(roots[i] - roots[j]) / max(1.0, abs(roots[i]))
        for i, j in itertools.combinations(range(len(roots)), 2)
    )
    return gap <= math.sqrt(tol)


def relative_discriminant(q: QuarticForm) -> float:
    """Discriminant of the form scaled to unit max coefficient."""
    s = max(abs(v) for v in q.coefficients())
    if s == 0:
        raise DomainError("zero form")
    return quartic_discriminant(QuarticForm(*(v / s for v in q.coefficients())))


# --- bridge to the dynamical coordinates ------------------------------------

def q0_beta(phi, gamma):
    phi = np.asarray(phi, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    return 0.5 * (-3 * np.exp(1j * phi) + np.exp(-3j * phi) - 2 * gamma * np.exp(-1j * phi))


def ps_to_dynamics(beta, gamma):
    beta = np.asarray(beta, dtype=complex)
    gamma = np.asarray(gamma, dtype=float)
    return np.stack(np.broadcast_arrays(-beta, 2 * gamma + 0j, np.conj(-beta)), axis=-1)


def dynamics_to_ps(z):
    z = np.asarray(z, dtype=complex)
    return -z[..., 0], z[..., 1].real / 2


def q0_developable_params(phi, gamma):
    """Developable parameters (u, v) of the Q0 point: u = phi, v = gamma - 3 cos 2phi."""
    phi = np.asarray(phi, dtype=float)
    return phi, np.asarray(gamma, dtype=float) - 3 * np.cos(2 * phi)


def double_root_on_circle(z1, z2, tol: float = 1e-8) -> bool:
    """Does T^4 - z1 T^3 + z2 T^2 - conj(z1) T + 1 have a repeated unit-modulus root?

    A unit root e^{i psi} means z2 = h(psi) = 2 Re(z1 e^{i psi}) - 2 cos 2psi, and it
    is repeated iff psi is also critical for h.
    """
    z1 = complex(z1)
    z2 = float(np.real(z2))
    if not (math.isfinite(z1.real) and math.isfinite(z1.imag) and math.isfinite(z2)):
        raise DomainError("non-finite input")
    try:
        on, val, _ = torus.circle_critical_points(np.array([z1]))
    except np.linalg.LinAlgError as exc:
        raise NumericalError("root finder failed") from exc
    scale = max(1.0, abs(z2))
    return bool(np.any(on[0] & (np.abs(val[0] - z2) <= tol * scale)))


__all__ = [
    "det_dphi1",
    "det_d_composite",
    "fd_jacobian",
    "fd_det_dphi1",
    "fd_det_dp",
    "normalized_det",
    "is_critical",
    "d2_preimage",
    "d2_critical_value",
    "r3_residuals",
    "CriticalBranch",
    "classify_branch",
    "branch_preimage",
    "sample_branch",
    "branch_csv",
    "SearchReport",
    "stray_solution_search",
    "whisker_absorption",
    "QuarticForm",
    "ComplexQuarticParams",
    "quartic_discriminant",
    "has_repeated_root",
    "relative_discriminant",
    "q0_beta",
    "ps_to_dynamics",
    "dynamics_to_ps",
    "q0_developable_params",
    "double_root_on_circle",
]
