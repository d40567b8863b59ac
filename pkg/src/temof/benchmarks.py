"""DTLZ and ZDT benchmark problems with true-front samplers.

All problems are minimization over box-constrained decision spaces.  Front
samplers return a requested number of points from the analytic Pareto
front, deterministically (lattices and grids, no randomness).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .core import ConfigurationError, ProblemSpec, UnsupportedError, UsageError
from .dominance import pareto_mask
from .nsga3 import das_dennis


# ---------------------------------------------------------------------------
# evaluators
# ---------------------------------------------------------------------------

def _dtlz_g1(tail: np.ndarray) -> np.ndarray:
    z = tail - 0.5
    return 100.0 * (tail.shape[1] + (z * z - np.cos(20.0 * np.pi * z)).sum(axis=1))


def _dtlz_g2(tail: np.ndarray) -> np.ndarray:
    z = tail - 0.5
    return (z * z).sum(axis=1)


def _linear_shape(position: np.ndarray, g: np.ndarray) -> np.ndarray:
    """DTLZ1 objectives from position variables and the g landscape."""
    m = position.shape[1] + 1
    f = np.empty((position.shape[0], m))
    base = 0.5 * (1.0 + g)
    for i in range(m):
        val = base.copy()
        if m - 1 - i > 0:
            val *= np.prod(position[:, :m - 1 - i], axis=1)
        if i > 0:
            val *= 1.0 - position[:, m - 1 - i]
        f[:, i] = val
    return f


def _concave_shape(theta: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Unit-sphere objectives from angles in [0, pi/2] and the g landscape."""
    m = theta.shape[1] + 1
    cos = np.cos(theta)
    sin = np.sin(theta)
    f = np.empty((theta.shape[0], m))
    for i in range(m):
        val = 1.0 + g
        if m - 1 - i > 0:
            val = val * np.prod(cos[:, :m - 1 - i], axis=1)
        if i > 0:
            val = val * sin[:, m - 1 - i]
        f[:, i] = val
    return f


def _dtlz1(x: np.ndarray, m: int) -> np.ndarray:
    return _linear_shape(x[:, :m - 1], _dtlz_g1(x[:, m - 1:]))


def _dtlz2(x: np.ndarray, m: int) -> np.ndarray:
    return _concave_shape(x[:, :m - 1] * (np.pi / 2.0), _dtlz_g2(x[:, m - 1:]))


def _dtlz3(x: np.ndarray, m: int) -> np.ndarray:
    return _concave_shape(x[:, :m - 1] * (np.pi / 2.0), _dtlz_g1(x[:, m - 1:]))


def _dtlz4(x: np.ndarray, m: int, alpha: float = 100.0) -> np.ndarray:
    return _concave_shape(x[:, :m - 1] ** alpha * (np.pi / 2.0), _dtlz_g2(x[:, m - 1:]))


def _dtlz56_theta(x: np.ndarray, m: int, g: np.ndarray) -> np.ndarray:
    theta = np.empty((x.shape[0], m - 1))
    theta[:, 0] = x[:, 0] * (np.pi / 2.0)
    if m > 2:
        scale = np.pi / (4.0 * (1.0 + g))
        theta[:, 1:] = scale[:, None] * (1.0 + 2.0 * g[:, None] * x[:, 1:m - 1])
    return theta


def _dtlz5(x: np.ndarray, m: int) -> np.ndarray:
    g = _dtlz_g2(x[:, m - 1:])
    return _concave_shape(_dtlz56_theta(x, m, g), g)


def _dtlz6(x: np.ndarray, m: int) -> np.ndarray:
    g = (x[:, m - 1:] ** 0.1).sum(axis=1)
    return _concave_shape(_dtlz56_theta(x, m, g), g)


def _dtlz7(x: np.ndarray, m: int) -> np.ndarray:
    g = 1.0 + 9.0 * x[:, m - 1:].mean(axis=1)
    f = np.empty((x.shape[0], m))
    f[:, :m - 1] = x[:, :m - 1]
    ratio = f[:, :m - 1] / (1.0 + g[:, None])
    h = m - (ratio * (1.0 + np.sin(3.0 * np.pi * f[:, :m - 1]))).sum(axis=1)
    f[:, m - 1] = (1.0 + g) * h
    return f


def _zdt_g(x: np.ndarray) -> np.ndarray:
    return 1.0 + 9.0 * x[:, 1:].sum(axis=1) / (x.shape[1] - 1)


def _zdt1(x: np.ndarray) -> np.ndarray:
    g = _zdt_g(x)
    f1 = x[:, 0]
    return np.column_stack([f1, g * (1.0 - np.sqrt(f1 / g))])


def _zdt2(x: np.ndarray) -> np.ndarray:
    g = _zdt_g(x)
    f1 = x[:, 0]
    return np.column_stack([f1, g * (1.0 - (f1 / g) ** 2)])


def _zdt3(x: np.ndarray) -> np.ndarray:
    g = _zdt_g(x)
    f1 = x[:, 0]
    f2 = g * (1.0 - np.sqrt(f1 / g) - f1 / g * np.sin(10.0 * np.pi * f1))
    return np.column_stack([f1, f2])


def _zdt4(x: np.ndarray) -> np.ndarray:
    tail = x[:, 1:]
    g = 1.0 + 10.0 * tail.shape[1] + (tail * tail - 10.0 * np.cos(4.0 * np.pi * tail)).sum(axis=1)
    f1 = x[:, 0]
    return np.column_stack([f1, g * (1.0 - np.sqrt(f1 / g))])


def _zdt6(x: np.ndarray) -> np.ndarray:
    f1 = 1.0 - np.exp(-4.0 * x[:, 0]) * np.sin(6.0 * np.pi * x[:, 0]) ** 6
    g = 1.0 + 9.0 * (x[:, 1:].sum(axis=1) / (x.shape[1] - 1)) ** 0.25
    return np.column_stack([f1, g * (1.0 - (f1 / g) ** 2)])


# ---------------------------------------------------------------------------
# front samplers
# ---------------------------------------------------------------------------

def _subsample(points: np.ndarray, count: int) -> np.ndarray:
    """Exactly count evenly spaced rows; requires len(points) >= count."""
    if points.shape[0] < count:
        raise UnsupportedError(
            f"front sampler produced only {points.shape[0]} candidates for {count} requested")
    if points.shape[0] == count:
        return points
    idx = np.linspace(0, points.shape[0] - 1, count).astype(int)
    return points[idx]


def _simplex_lattice(m: int, count: int) -> np.ndarray:
    h = 1
    while math.comb(h + m - 1, m - 1) < count:
        h += 1
    return das_dennis(m, h).points


@lru_cache(maxsize=64)
def _front_points(family: str, m: int, count: int) -> np.ndarray:
    if family == "DTLZ1":
        front = 0.5 * _subsample(_simplex_lattice(m, count), count)
    elif family in ("DTLZ2", "DTLZ3", "DTLZ4"):
        w = _subsample(_simplex_lattice(m, count), count)
        front = w / np.linalg.norm(w, axis=1, keepdims=True)
    elif family in ("DTLZ5", "DTLZ6"):
        if m > 3:
            raise UnsupportedError(
                f"{family}: true-front sampling is only supported for n_obj <= 3, got {m}")
        theta = np.linspace(0.0, np.pi / 2.0, count)
        if m == 2:
            front = np.column_stack([np.cos(theta), np.sin(theta)])
        else:
            c = np.cos(np.pi / 4.0)
            front = np.column_stack([np.cos(theta) * c, np.cos(theta) * c, np.sin(theta)])
    elif family == "DTLZ7":
        if m > 3:
            raise UnsupportedError(
                f"{family}: true-front sampling is only supported for n_obj <= 3, got {m}")
        for factor in (12, 48, 192):
            if m == 2:
                grid = np.linspace(0.0, 1.0, factor * count)[:, None]
            else:
                side = math.ceil(math.sqrt(factor * count))
                g1, g2 = np.meshgrid(np.linspace(0.0, 1.0, side),
                                     np.linspace(0.0, 1.0, side))
                grid = np.column_stack([g1.ravel(), g2.ravel()])
            h = m - (grid * (1.0 + np.sin(3.0 * np.pi * grid))).sum(axis=1)
            objs = np.column_stack([grid, h])
            objs = objs[pareto_mask(objs)]
            if objs.shape[0] >= count:
                break
        front = _subsample(objs, count)
    elif family in ("ZDT1", "ZDT4"):
        f1 = np.linspace(0.0, 1.0, count)
        front = np.column_stack([f1, 1.0 - np.sqrt(f1)])
    elif family == "ZDT2":
        f1 = np.linspace(0.0, 1.0, count)
        front = np.column_stack([f1, 1.0 - f1 ** 2])
    elif family == "ZDT3":
        f1 = np.linspace(0.0, 1.0, 16 * count)
        f2 = 1.0 - np.sqrt(f1) - f1 * np.sin(10.0 * np.pi * f1)
        objs = np.column_stack([f1, f2])
        keep = np.empty(objs.shape[0], dtype=bool)
        best = np.inf
        for i in range(objs.shape[0]):  # sorted by f1, keep strict f2 improvements
            keep[i] = objs[i, 1] < best
            if keep[i]:
                best = objs[i, 1]
        front = _subsample(objs[keep], count)
    elif family == "ZDT6":
        res = minimize_scalar(
            lambda t: 1.0 - np.exp(-4.0 * t) * np.sin(6.0 * np.pi * t) ** 6,
            bounds=(0.0, 1.0 / 6.0), method="bounded",
            options={"xatol": 1e-12})
        f1 = np.linspace(res.fun, 1.0, count)
        front = np.column_stack([f1, 1.0 - f1 ** 2])
    else:
        raise UnsupportedError(f"no front sampler for {family}")
    front = np.asarray(front, dtype=float)
    front.flags.writeable = False
    return front


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

_DTLZ_EVALS = {
    "DTLZ1": _dtlz1, "DTLZ2": _dtlz2, "DTLZ3": _dtlz3, "DTLZ4": _dtlz4,
    "DTLZ5": _dtlz5, "DTLZ6": _dtlz6, "DTLZ7": _dtlz7,
}
_DTLZ_EXTRA_VARS = {  # default n_var = n_obj - 1 + k with the usual tail size k
    "DTLZ1": 5, "DTLZ2": 10, "DTLZ3": 10, "DTLZ4": 10,
    "DTLZ5": 10, "DTLZ6": 10, "DTLZ7": 20,
}
_ZDT_EVALS = {
    "ZDT1": _zdt1, "ZDT2": _zdt2, "ZDT3": _zdt3, "ZDT4": _zdt4, "ZDT6": _zdt6,
}
_ZDT_DEFAULT_VARS = {"ZDT1": 30, "ZDT2": 30, "ZDT3": 30, "ZDT4": 10, "ZDT6": 10}


def problem_names() -> list[str]:
    return sorted(_DTLZ_EVALS) + sorted(_ZDT_EVALS)


def default_dimensions(name: str) -> tuple[int, int]:
    """Default (n_var, n_obj) for a benchmark name."""
    key = name.upper()
    if key in _DTLZ_EVALS:
        return 2 + _DTLZ_EXTRA_VARS[key], 3
    if key in _ZDT_EVALS:
        return _ZDT_DEFAULT_VARS[key], 2
    raise ConfigurationError(f"unknown problem {name!r}; known: {', '.join(problem_names())}")


def make_problem(name: str, n_var: int | None = None, n_obj: int | None = None) -> ProblemSpec:
    """Instantiate a benchmark by name with optional dimension overrides."""
    key = name.upper()
    if key in _DTLZ_EVALS:
        m = 3 if n_obj is None else int(n_obj)
        if m < 2:
            raise ConfigurationError(f"{key}: n_obj must be >= 2, got {m}")
        d = (m - 1 + _DTLZ_EXTRA_VARS[key]) if n_var is None else int(n_var)
        if d < m:
            raise ConfigurationError(
                f"{key}: n_var must be at least n_obj (got n_var={d}, n_obj={m})")
        evaluator = _DTLZ_EVALS[key]
        return ProblemSpec(
            name=key, n_var=d, n_obj=m,
            lower=np.zeros(d), upper=np.ones(d),
            evaluator=lambda x, _e=evaluator, _m=m: _e(x, _m),
            front_sampler=lambda count, _k=key, _m=m: _front_points(_k, _m, count))
    if key in _ZDT_EVALS:
        if n_obj is not None and int(n_obj) != 2:
            raise ConfigurationError(f"{key}: n_obj is fixed at 2, got {n_obj}")
        d = _ZDT_DEFAULT_VARS[key] if n_var is None else int(n_var)
        if d < 2:
            raise ConfigurationError(f"{key}: n_var must be >= 2, got {d}")
        lower = np.zeros(d)
        upper = np.ones(d)
        if key == "ZDT4":
            lower[1:] = -5.0
            upper[1:] = 5.0
        return ProblemSpec(
            name=key, n_var=d, n_obj=2, lower=lower, upper=upper,
            evaluator=_ZDT_EVALS[key],
            front_sampler=lambda count, _k=key: _front_points(_k, 2, count))
    raise ConfigurationError(f"unknown problem {name!r}; known: {', '.join(problem_names())}")


def sample_true_front(problem: ProblemSpec, count: int) -> np.ndarray:
    """count points from the problem's analytic front."""
    if count < 1:
        raise UsageError(f"front sample count must be >= 1, got {count}")
    return problem.true_front(count)
