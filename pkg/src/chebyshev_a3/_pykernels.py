"""Pure numpy versions of the compiled kernels, same signatures and results."""
from __future__ import annotations

import math

import numpy as np

_R2 = math.sqrt(2.0)
ROOTS = np.array(
    [[-1 / _R2, -1.0, 1 / _R2], [_R2, 0.0, 0.0], [-1 / _R2, 1.0, 1 / _R2]]
)


def _powers(x: np.ndarray, d: int) -> np.ndarray:
    pw = np.empty((d + 1,) + x.shape, dtype=complex)
    pw[0] = 1.0
    for i in range(1, d + 1):
        pw[i] = pw[i - 1] * x
    return pw


def poly_eval(cube: np.ndarray, z: np.ndarray) -> np.ndarray:
    d = cube.shape[1] - 1
    p1, p2, p3 = (_powers(z[:, m], d) for m in range(3))
    out = np.zeros((z.shape[0], cube.shape[0]), dtype=complex)
    for c in range(cube.shape[0]):
        for i, j, k in zip(*np.nonzero(cube[c])):
            out[:, c] += cube[c, i, j, k] * (p1[i] * p2[j] * p3[k])
    return out


def homogeneous_eval(cube: np.ndarray, Z: np.ndarray) -> np.ndarray:
    d = cube.shape[1] - 1
    pw = [_powers(Z[:, m], d) for m in range(4)]
    out = np.zeros((Z.shape[0], 4), dtype=complex)
    for c in range(3):
        for i, j, k in zip(*np.nonzero(cube[c])):
            out[:, c] += cube[c, i, j, k] * (pw[0][i] * pw[1][j] * pw[2][k] * pw[3][d - i - j - k])
    out[:, 3] = pw[3][d]
    return out


def fold_batch(s: np.ndarray, budget: int = 1000):
    out = np.array(s, dtype=float, copy=True)
    cnt = np.zeros(out.shape[0], dtype=np.int64)
    active = np.arange(out.shape[0])
    for _ in range(budget):
        if active.size == 0:
            break
        x = out[active]
        viol = np.empty((active.size, 4))
        viol[:, 0] = x[:, 2] - math.pi
        dots = x @ ROOTS.T
        viol[:, 1:] = -dots / _R2
        best = np.argmax(viol, axis=1)
        worst = viol[np.arange(active.size), best]
        moving = worst > 1e-13
        active, x, best, dots = active[moving], x[moving], best[moving], dots[moving]
        if active.size == 0:
            break
        j0 = best == 0
        x[j0, 2] = 2 * math.pi - x[j0, 2]
        rest = ~j0
        if rest.any():
            k = best[rest] - 1
            dk = dots[rest, k]
            x[rest] -= dk[:, None] * ROOTS[k]
        out[active] = x
        cnt[active] += 1
    if active.size:
        # still outside after the budget was spent
        x = out[active]
        viol = np.maximum(x[:, 2] - math.pi, (-(x @ ROOTS.T) / _R2).max(axis=1))
        cnt[active[viol > 1e-13]] = -1
    return out, cnt
