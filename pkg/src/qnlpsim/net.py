"""Finite trace-norm nets on pure states.

Nets are grown as maximal epsilon-separated sets: a point joins only if it is
farther than ``epsilon`` from every point already present, so a maximal set
covers the sphere at radius ``epsilon``. Growth stops after a streak of
rejected Haar-random proposals. For qubits (``d = 2``) the trace distance is
the chord distance between Bloch vectors, which lets us find and fill every
remaining hole exactly.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import BudgetExceeded, DimensionMismatch, EmptyNet, ResourceCap
from .limits import DEFAULT_LIMITS
from .qstate import NORM_ATOL, _vec, random_pure_states, trace_distances

FORMAT_VERSION = 1
_PUSHES = (0.5, 0.2, 0.05, 0.01, 1e-3, 1e-5)


def cardinality_bound(d: int, epsilon: float, variant: str = "trace", p: float = 1.0) -> float:
    """``(5/eps)^(2d)``, or ``(10 d^((p-1)/p) / eps)^(2d)`` for ``variant="schatten"``."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if variant == "trace":
        return (5.0 / epsilon) ** (2 * d)
    if variant == "schatten":
        expo = 1.0 if math.isinf(p) else (p - 1) / p
        return (10.0 * d**expo / epsilon) ** (2 * d)
    raise ValueError(f"unknown variant {variant!r}")


@dataclass(frozen=True, eq=False)
class EpsilonNet:
    epsilon: float
    d: int
    points: np.ndarray  # (n, d) complex, one pure state per row
    strategy: str = "greedy"
    seed: Optional[int] = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.complex128).reshape(-1, self.d)
        if pts.size and np.max(np.abs(np.linalg.norm(pts, axis=1) - 1)) > NORM_ATOL:
            raise ValueError("net points must be normalized")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]

    @property
    def budget(self) -> float:
        return cardinality_bound(self.d, self.epsilon)

    def subset(self, keep) -> "EpsilonNet":
        return EpsilonNet(self.epsilon, self.d, self.points[keep], self.strategy + "+subset", self.seed)


def _greedy(d, epsilon, rng, streak, batch):
    pts = random_pure_states(d, rng, 1)
    rejected = 0
    limit = streak(1)
    while rejected < limit:
        props = random_pure_states(d, rng, batch)
        overlaps = np.abs(props.conj() @ pts.T) ** 2
        covered = (2 * np.sqrt(np.clip(1 - overlaps, 0, None)) <= epsilon).any(axis=1)
        added = []
        for i in range(batch):
            if not covered[i] and (
                not added or trace_distances(props[added], props[i]).min() > epsilon
            ):
                added.append(i)
                rejected = 0
                limit = streak(pts.shape[0] + len(added))
            else:
                rejected += 1
                if rejected >= limit:
                    break
        if added:
            pts = np.vstack([pts, props[added]])
    return pts


def _bloch(points: np.ndarray) -> np.ndarray:
    a, b = points[:, 0], points[:, 1]
    ab = a.conj() * b
    return np.stack([2 * ab.real, 2 * ab.imag, np.abs(a) ** 2 - np.abs(b) ** 2], axis=1)


def _from_bloch(r: np.ndarray) -> np.ndarray:
    r = r / np.linalg.norm(r, axis=1, keepdims=True)
    theta = np.arccos(np.clip(r[:, 2], -1, 1))
    phi = np.arctan2(r[:, 1], r[:, 0])
    return np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=1)


def _unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _hole_candidates(R: np.ndarray, epsilon: float) -> np.ndarray:
    """Points just outside cap boundaries at every circle crossing and around every circle."""
    h = 1 - epsilon**2 / 2  # cap i is {u : u . r_i >= h}
    cands = []
    n = R.shape[0]
    if n >= 2:
        i, j = np.array(list(itertools.combinations(range(n), 2))).T
        ri, rj = R[i], R[j]
        g = np.einsum("ij,ij->i", ri, rj)
        cross = np.cross(ri, rj)
        cn = np.linalg.norm(cross, axis=1)
        beta2 = 1 - 2 * h**2 / np.maximum(1 + g, 1e-300)
        ok = (cn > 1e-12) & (beta2 >= 0)
        ri, rj, g, cross, cn, beta2 = ri[ok], rj[ok], g[ok], cross[ok], cn[ok], beta2[ok]
        s = ri + rj
        base = (h / (1 + g))[:, None] * s
        nrm = cross / cn[:, None]
        beta = np.sqrt(beta2)[:, None]
        for v in (base + beta * nrm, base - beta * nrm):
            away = -s + np.einsum("ij,ij->i", s, v)[:, None] * v
            an = np.linalg.norm(away, axis=1, keepdims=True)
            good = an[:, 0] > 1e-14
            away = away[good] / an[good]
            for tau in _PUSHES:
                cands.append(_unit(v[good] + tau * away))
    # around each circle, for caps that meet no other circle
    radius = math.sqrt(max(0.0, 1 - h**2))
    helper = np.where(np.abs(R[:, :1]) < 0.9, [[1.0, 0, 0]], [[0, 1.0, 0]])
    e1 = _unit(np.cross(R, helper))
    e2 = np.cross(R, e1)
    for ang in np.linspace(0, 2 * np.pi, 12, endpoint=False):
        u = h * R + radius * (np.cos(ang) * e1 + np.sin(ang) * e2)
        for tau in _PUSHES:
            cands.append(_unit(u - tau * R))
    return np.vstack(cands)


def _bloch_repair(points: np.ndarray, epsilon: float, max_rounds: int = 10_000) -> np.ndarray:
    R = _bloch(points)
    for _ in range(max_rounds):
        cands = _hole_candidates(R, epsilon)
        chord = np.sqrt(np.clip(2 - 2 * cands @ R.T, 0, None))
        dmin = chord.min(axis=1)
        free = np.flatnonzero(dmin > epsilon)
        if free.size == 0:
            break
        new = []
        for k in free[np.argsort(-dmin[free])]:
            c = cands[k]
            if not new or np.sqrt(np.clip(2 - 2 * np.array(new) @ c, 0, None)).min() > epsilon:
                new.append(c)
        R = np.vstack([R, new])
    new_pts = _from_bloch(R[points.shape[0]:])
    return np.vstack([points, new_pts]) if new_pts.size else points


def default_streak(size: int) -> int:
    return 10 * size + 100


def build_net(
    d: int,
    epsilon: float,
    rng: np.random.Generator,
    streak=default_streak,
    batch: int = 512,
    repair: bool = True,
    seed: Optional[int] = None,
    limits=DEFAULT_LIMITS,
) -> EpsilonNet:
    """Maximal epsilon-separated set of pure states in C^d (trace norm).

    ``streak(size)`` is the number of consecutive rejected proposals that ends
    growth. For ``d = 2`` with ``repair`` the result is exactly maximal.
    Raises ``BudgetExceeded`` if the net outgrows ``(5/eps)^(2d)``.
    """
    if not 0 < epsilon <= 2:
        raise ValueError("epsilon must lie in (0, 2]")
    if d < 1:
        raise ValueError("d must be >= 1")
    if d > limits.max_full_net_dim:
        raise ResourceCap(f"full nets limited to d <= {limits.max_full_net_dim}")
    if d == 1:
        pts, strategy = np.ones((1, 1), dtype=np.complex128), "trivial"
    else:
        pts = _greedy(d, epsilon, rng, streak, batch)
        strategy = "greedy"
        if d == 2 and repair and epsilon < 2:
            pts = _bloch_repair(pts, epsilon)
            strategy = "greedy+bloch-repair"
    net = EpsilonNet(epsilon, d, pts, strategy, seed)
    if len(net) > net.budget:
        raise BudgetExceeded(f"{len(net)} points exceed budget {net.budget:.6g}")
    return net


def nearest(net: EpsilonNet, psi) -> tuple[int, float]:
    if len(net) == 0:
        raise EmptyNet("net has no points")
    v = _vec(psi)
    if v.size != net.d:
        raise DimensionMismatch(f"state dimension {v.size}, net dimension {net.d}")
    dist = trace_distances(net.points, v)
    k = int(np.argmin(dist))
    return k, float(dist[k])


def nearest_many(net: EpsilonNet, states: np.ndarray, chunk: int = 4096):
    """Vectorized ``nearest`` over the rows of ``states``."""
    if len(net) == 0:
        raise EmptyNet("net has no points")
    states = np.atleast_2d(states)
    if states.shape[1] != net.d:
        raise DimensionMismatch(f"state dimension {states.shape[1]}, net dimension {net.d}")
    idx = np.empty(states.shape[0], dtype=np.int64)
    dist = np.empty(states.shape[0])
    for s in range(0, states.shape[0], chunk):
        ov = np.abs(states[s : s + chunk].conj() @ net.points.T) ** 2
        k = ov.argmax(axis=1)
        idx[s : s + chunk] = k
        dist[s : s + chunk] = 2 * np.sqrt(np.clip(1 - ov[np.arange(k.size), k], 0, None))
    return idx, dist


def min_separation(net: EpsilonNet) -> float:
    if len(net) < 2:
        return math.inf
    ov = np.abs(net.points.conj() @ net.points.T) ** 2
    np.fill_diagonal(ov, 0.0)
    return float(2 * np.sqrt(max(0.0, 1 - ov.max())))


@dataclass
class CoverageReport:
    trials: int
    misses: int
    max_distance: float
    epsilon: float

    @property
    def miss_fraction(self) -> float:
        return self.misses / self.trials

    @property
    def passed(self) -> bool:
        return self.misses == 0


def coverage_check(net: EpsilonNet, trials: int, rng: np.random.Generator) -> CoverageReport:
    """Fraction of Haar-random states farther than epsilon from every net point."""
    if trials < 1000:
        raise ValueError("coverage_check needs at least 1000 trials")
    _, dist = nearest_many(net, random_pure_states(net.d, rng, trials))
    misses = int(np.sum(dist > net.epsilon))
    return CoverageReport(trials, misses, float(dist.max()), net.epsilon)


class LazyNet:
    """Epsilon-separated point set grown on demand as states are queried."""

    def __init__(self, d: int, epsilon: float):
        self.d, self.epsilon = d, epsilon
        self._points = np.zeros((0, d), dtype=np.complex128)

    def __len__(self):
        return self._points.shape[0]

    def query(self, psi) -> tuple[int, float]:
        """Nearest stored point within epsilon, inserting ``psi`` if there is none."""
        v = _vec(psi)
        if v.size != self.d:
            raise DimensionMismatch(f"state dimension {v.size}, net dimension {self.d}")
        if len(self):
            dist = trace_distances(self._points, v)
            k = int(np.argmin(dist))
            if dist[k] <= self.epsilon:
                return k, float(dist[k])
        self._points = np.vstack([self._points, v / np.linalg.norm(v)])
        return len(self) - 1, 0.0

    def freeze(self) -> EpsilonNet:
        return EpsilonNet(self.epsilon, self.d, self._points.copy(), "lazy")


def save_net(net: EpsilonNet, path) -> None:
    """Header line with parameters, then one CSV row ``re0,im0,re1,im1,...`` per point."""
    lines = [
        f"# epsnet v{FORMAT_VERSION} d={net.d} epsilon={net.epsilon!r} "
        f"strategy={net.strategy} seed={net.seed}"
    ]
    for row in net.points:
        parts = []
        for z in row:
            parts += [repr(float(z.real)), repr(float(z.imag))]
        lines.append(",".join(parts))
    Path(path).write_text("\n".join(lines) + "\n")


def load_net(path) -> EpsilonNet:
    text = Path(path).read_text().splitlines()
    header = text[0].split()
    if header[:2] != ["#", "epsnet"] or header[2] != f"v{FORMAT_VERSION}":
        raise ValueError(f"unsupported net file header: {text[0]!r}")
    meta = dict(tok.split("=", 1) for tok in header[3:])
    d = int(meta["d"])
    rows = [list(map(float, line.split(","))) for line in text[1:] if line.strip()]
    arr = np.asarray(rows, dtype=float).reshape(-1, 2 * d)
    pts = arr[:, 0::2] + 1j * arr[:, 1::2]
    seed = None if meta.get("seed") in (None, "None") else int(meta["seed"])
    return EpsilonNet(float(meta["epsilon"]), d, pts, meta["strategy"], seed)
