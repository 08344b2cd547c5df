"""Exact construction of the A3 Chebyshev maps P^d on C^3.

Polynomials are sparse, keyed by exponent triples, with Python integer
coefficients, so equality is exact and the recurrences never round.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from .errors import DomainError

Exponent = tuple[int, int, int]


def _grlex_key(e: Exponent):
    return (-sum(e), -e[0], -e[1], -e[2])


class MultiPoly:
    """Immutable polynomial in z1, z2, z3 with integer coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Exponent, int] | Iterable[tuple[Exponent, int]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exponent, int] = {}
        for e, c in items:
            e = tuple(int(x) for x in e)
            if len(e) != 3 or min(e) < 0:
                raise DomainError(f"bad exponent {e!r}")
            if not isinstance(c, (int, np.integer)):
                raise TypeError("coefficients must be integers")
            acc[e] = acc.get(e, 0) + int(c)
        self._terms = {e: acc[e] for e in sorted(acc, key=_grlex_key) if acc[e] != 0}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[Exponent, int]) -> "MultiPoly":
        p = cls.__new__(cls)
        p._terms = {e: terms[e] for e in sorted(terms, key=_grlex_key) if terms[e] != 0}
        p._hash = None
        return p

    @classmethod
    def constant(cls, c: int) -> "MultiPoly":
        return cls._raw({(0, 0, 0): int(c)})

    @classmethod
    def var(cls, i: int) -> "MultiPoly":
        e = [0, 0, 0]
        e[i] = 1
        return cls._raw({tuple(e): 1})

    @property
    def terms(self) -> Mapping[Exponent, int]:
        return MappingProxyType(self._terms)

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, e: Exponent) -> int:
        return self._terms.get(tuple(e), 0)

    def __eq__(self, other):
        if isinstance(other, int):
            other = MultiPoly.constant(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in self._terms.items():
            mono = "*".join(
                f"z{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k
            )
            if not mono:
                parts.append(f"{c:+d}")
            elif c == 1:
                parts.append(f"+{mono}")
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c:+d}*{mono}")
        s = " ".join(parts)
        return s[1:] if s.startswith("+") else s

    # arithmetic

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, (int, np.integer)):
            return MultiPoly.constant(int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return MultiPoly._raw({e: c * int(other) for e, c in self._terms.items()})
        if not isinstance(other, MultiPoly):
            return NotImplemented
        out: dict[Exponent, int] = {}
        for (a1, a2, a3), c in self._terms.items():
            for (b1, b2, b3), k in other._terms.items():
                e = (a1 + b1, a2 + b2, a3 + b3)
                out[e] = out.get(e, 0) + c * k
        return MultiPoly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise DomainError("negative power")
        result = MultiPoly.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # structural operations

    def homogeneous_part(self, k: int) -> "MultiPoly":
        return MultiPoly._raw({e: c for e, c in self._terms.items() if sum(e) == k})

    def permute(self, order: tuple[int, int, int]) -> "MultiPoly":
        """Return p(z[order[0]], z[order[1]], z[order[2]])."""
        out: dict[Exponent, int] = {}
        for e, c in self._terms.items():
            new = [0, 0, 0]
            for slot, var in enumerate(order):
                new[var] += e[slot]
            out[tuple(new)] = c
        return MultiPoly._raw(out)

    def swap13(self) -> "MultiPoly":
        return self.permute((2, 1, 0))

    def substitute(self, p1: "MultiPoly", p2: "MultiPoly", p3: "MultiPoly") -> "MultiPoly":
        """Formal composition self(p1, p2, p3)."""
        subs = (p1, p2, p3)
        powers: list[list[MultiPoly]] = [[MultiPoly.constant(1)] for _ in range(3)]

        def pw(i, k):
            cache = powers[i]
            while len(cache) <= k:
                cache.append(cache[-1] * subs[i])
            return cache[k]

        out: dict[Exponent, int] = {}
        for (e1, e2, e3), c in self._terms.items():
            mono = pw(0, e1) * pw(1, e2) * pw(2, e3)
            for e, k in mono._terms.items():
                out[e] = out.get(e, 0) + c * k
        return MultiPoly._raw(out)

    def diff(self, i: int) -> "MultiPoly":
        out: dict[Exponent, int] = {}
        for e, c in self._terms.items():
            if e[i]:
                new = list(e)
                new[i] -= 1
                out[tuple(new)] = c * e[i]
        return MultiPoly._raw(out)

    def evaluate(self, z) -> np.ndarray:
        """Evaluate at points z of shape (..., 3)."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape[:-1], dtype=complex)
        for (e1, e2, e3), c in self._terms.items():
            out = out + c * z[..., 0] ** e1 * z[..., 1] ** e2 * z[..., 2] ** e3
        return out

    # serialization

    def to_json_obj(self) -> list[dict]:
        return [{"e": list(e), "c": str(c)} for e, c in self._terms.items()]

    @classmethod
    def from_json_obj(cls, obj: list[dict]) -> "MultiPoly":
        return cls((tuple(item["e"]), int(item["c"])) for item in obj)


Z1, Z2, Z3 = MultiPoly.var(0), MultiPoly.var(1), MultiPoly.var(2)
ONE = MultiPoly.constant(1)


def _coefficient_cube(p: MultiPoly, d: int) -> np.ndarray:
    cube = np.zeros((d + 1, d + 1, d + 1))
    for (e1, e2, e3), c in p:
        cube[e1, e2, e3] = float(c)
    return cube


@dataclass(frozen=True, eq=False)
class ChebyshevMapA3:
    """The polynomial triple (g1, g2, g3) of degree `degree`."""

    degree: int
    g1: MultiPoly
    g2: MultiPoly
    g3: MultiPoly

    def __post_init__(self):
        if self.degree < 1:
            raise DomainError("degree must be >= 1")
        cube = np.stack([_coefficient_cube(g, self.degree) for g in self.components])
        cube.setflags(write=False)
        object.__setattr__(self, "_cube", cube)

    @property
    def components(self) -> tuple[MultiPoly, MultiPoly, MultiPoly]:
        return (self.g1, self.g2, self.g3)

    def __eq__(self, other):
        if not isinstance(other, ChebyshevMapA3):
            return NotImplemented
        return self.degree == other.degree and self.components == other.components

    def __hash__(self):
        return hash((self.degree, self.components))

    def __call__(self, z) -> np.ndarray:
        return evaluate(self, z)

    def to_json(self) -> str:
        return json.dumps(
            {"degree": self.degree, "components": [g.to_json_obj() for g in self.components]}
        )

    @classmethod
    def from_json(cls, text: str) -> "ChebyshevMapA3":
        obj = json.loads(text)
        g1, g2, g3 = (MultiPoly.from_json_obj(c) for c in obj["components"])
        return cls(int(obj["degree"]), g1, g2, g3)

    def jacobian(self) -> list[list[MultiPoly]]:
        return [[g.diff(i) for i in range(3)] for g in self.components]

    def _jacobian_cube(self) -> np.ndarray:
        cube = self.__dict__.get("_jcube")
        if cube is None:
            cube = np.stack(
                [_coefficient_cube(p, self.degree) for row in self.jacobian() for p in row]
            )
            cube.setflags(write=False)
            object.__setattr__(self, "_jcube", cube)
        return cube


# Recurrence state. g1 is indexed from 0; g2 from -2 (stored at offset 2).
_lock = threading.RLock()
_g1: list[MultiPoly] = [
    MultiPoly.constant(4),
    Z1,
    Z1 * Z1 - 2 * Z2,
    Z1 ** 3 - 3 * Z1 * Z2 + 3 * Z3,
]
_G2_2 = Z2 * Z2 - 2 * Z1 * Z3 + 2
_g2: list[MultiPoly] = [
    _G2_2,                      # k = -2
    Z2,                         # k = -1
    MultiPoly.constant(6),      # k = 0
    Z2,                         # k = 1
    _G2_2,                      # k = 2
    Z2 ** 3 - 3 * Z1 * Z2 * Z3 + 3 * Z3 * Z3 + 3 * Z1 * Z1 - 3 * Z2,  # k = 3
]
_h2: list[MultiPoly] = [MultiPoly.constant(2), Z2, Z2 * Z2 - 2 * Z1 * Z3]
_maps: dict[int, ChebyshevMapA3] = {}

_C_13 = Z1 * Z3 - 1
_C_MID = Z1 * Z1 - 2 * Z2 + Z3 * Z3


def _extend(d: int):
    while len(_g1) <= d:
        k = len(_g1)
        _g1.append(Z1 * _g1[k - 1] - Z2 * _g1[k - 2] + Z3 * _g1[k - 3] - _g1[k - 4])
    while len(_g2) <= d + 2:
        # g2[k+6] with the list offset: entry i holds g2^(i-2)
        i = len(_g2)
        _g2.append(
            Z2 * _g2[i - 1]
            - _C_13 * _g2[i - 2]
            + _C_MID * _g2[i - 3]
            - _C_13 * _g2[i - 4]
            + Z2 * _g2[i - 5]
            - _g2[i - 6]
        )
    while len(_h2) <= d:
        k = len(_h2)
        _h2.append(Z2 * _h2[k - 1] - Z1 * Z3 * _h2[k - 2])


def build_map(d: int) -> ChebyshevMapA3:
    """Return P^d, built from the recurrences and memoized per process."""
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)):
        raise DomainError("degree must be an integer")
    d = int(d)
    if d <= 0:
        raise DomainError(f"degree must be >= 1, got {d}")
    with _lock:
        m = _maps.get(d)
        if m is None:
            _extend(d)
            g1 = _g1[d]
            m = ChebyshevMapA3(d, g1, _g2[d + 2], g1.swap13())
            _maps[d] = m
    return m


def h2_polynomial(d: int) -> MultiPoly:
    """Second component of the degree-d homogeneous part, via its own recurrence."""
    if d < 0:
        raise DomainError("degree must be >= 0")
    with _lock:
        _extend(d)
        return _h2[d]


def homogeneous_leading(m: ChebyshevMapA3) -> tuple[MultiPoly, MultiPoly, MultiPoly]:
    d = m.degree
    extracted = tuple(g.homogeneous_part(d) for g in m.components)
    rebuilt = (Z1 ** d, h2_polynomial(d), Z3 ** d)
    if extracted != rebuilt:
        raise AssertionError(f"leading part of degree {d} disagrees with the h2 recurrence")
    return extracted


def compose(a: ChebyshevMapA3, b: ChebyshevMapA3) -> ChebyshevMapA3:
    """Formal composition a o b."""
    comps = [g.substitute(*b.components) for g in a.components]
    return ChebyshevMapA3(a.degree * b.degree, *comps)


def evaluate(m: ChebyshevMapA3, z) -> np.ndarray:
    """Evaluate the map at z of shape (3,) or (N, 3) from power tables over the nonzero coefficients."""
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise DomainError("non-finite input")
    if z.shape[-1] != 3:
        raise DomainError("points must have 3 coordinates")
    flat = np.ascontiguousarray(z.reshape(-1, 3))
    out = _kernels.poly_eval(m._cube, flat)
    return out.reshape(z.shape)


def jacobian_eval(m: ChebyshevMapA3, z) -> np.ndarray:
    """Exact complex Jacobian matrices at z of shape (3,) or (N, 3)."""
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise DomainError("non-finite input")
    flat = np.ascontiguousarray(z.reshape(-1, 3))
    out = _kernels.poly_eval(m._jacobian_cube(), flat)
    return out.reshape(z.shape[:-1] + (3, 3))


def evaluate_homogeneous(m: ChebyshevMapA3, Z) -> np.ndarray:
    """The lift F(z, z0) = (z0^d g(z/z0), z0^d) on C^4, for Z of shape (N, 4)."""
    Z = np.ascontiguousarray(np.asarray(Z, dtype=complex).reshape(-1, 4))
    return _kernels.homogeneous_eval(m._cube, Z)
