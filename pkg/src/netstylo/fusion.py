"""Fusion of traditional and network membership matrices.

Class indices follow the membership column order; every argmax resolves
ties toward the lowest class index.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

DEFAULT_STEP = 0.01


def _check_pair(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"membership shapes differ: {a.shape} vs {b.shape}")


def hybrid_combine(m_net: np.ndarray, m_trad: np.ndarray, weight: float) -> np.ndarray:
    """Convex combination ``weight * m_net + (1 - weight) * m_trad``."""
    m_net, m_trad = np.asarray(m_net, float), np.asarray(m_trad, float)
    _check_pair(m_net, m_trad)
    if not 0.0 <= weight <= 1.0:
        raise ValueError(f"weight must lie in [0, 1], got {weight}")
    if weight == 0.0:
        return m_trad.copy()
    if weight == 1.0:
        return m_net.copy()
    return weight * m_net + (1.0 - weight) * m_trad


def hybrid_decide(m_hybrid: np.ndarray) -> np.ndarray:
    m_hybrid = np.asarray(m_hybrid)
    if m_hybrid.ndim != 2 or m_hybrid.shape[1] == 0:
        raise ValueError("memberships must be a non-empty 2-D array")
    return np.argmax(m_hybrid, axis=1)


def top_two(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Indices of the best and runner-up class per row (stable on ties)."""
    order = np.argsort(-m, axis=1, kind="stable")
    return order[:, 0], order[:, 1]


def tiebreaker_decide(m_trad: np.ndarray, m_net: np.ndarray, threshold: float) -> np.ndarray:
    """Traditional decision unless its top-two margin is below ``threshold``.

    Below the threshold the network memberships choose between the two
    traditional front-runners only.
    """
    m_trad, m_net = np.asarray(m_trad, float), np.asarray(m_net, float)
    _check_pair(m_trad, m_net)
    if m_trad.shape[1] < 2:
        raise ValueError("tiebreaker needs at least 2 classes")
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
    rows = np.arange(len(m_trad))
    j, k = top_two(m_trad)
    margin = m_trad[rows, j] - m_trad[rows, k]
    rj, rk = m_net[rows, j], m_net[rows, k]
    net_pick = np.where(rj > rk, j, np.where(rk > rj, k, np.minimum(j, k)))
    return np.where(margin >= threshold, j, net_pick)


@dataclass(frozen=True)
class FusionConfig:
    lambda_step: float = DEFAULT_STEP
    theta_step: float = DEFAULT_STEP

    def __post_init__(self):
        for name in ("lambda_step", "theta_step"):
            step = getattr(self, name)
            n = round(1.0 / step) if step > 0 else 0
            if n < 1 or abs(n * step - 1.0) > 1e-9:
                raise ValueError(f"{name} must divide 1 into whole steps, got {step}")

    @staticmethod
    def _grid(step: float) -> np.ndarray:
        n = round(1.0 / step)
        return np.round(np.arange(n + 1) / n, 12)

    @property
    def lambda_grid(self) -> np.ndarray:
        return self._grid(self.lambda_step)

    @property
    def theta_grid(self) -> np.ndarray:
        return self._grid(self.theta_step)


@dataclass(frozen=True)
class FoldRun:
    """Aligned traditional/network memberships and true class codes for one fold."""

    m_trad: np.ndarray
    m_net: np.ndarray
    truth: np.ndarray


@dataclass
class GainReport:
    mode: str
    grid: np.ndarray
    gamma_trad: float
    gamma_net: float
    gamma_fused: np.ndarray
    ratio: np.ndarray = field(repr=False)
    diff: np.ndarray = field(repr=False)
    best_ratio: float | None
    best_x: float | None

    def best_is_interior(self) -> bool:
        return self.best_x is not None and 0.0 < self.best_x < 1.0

    def to_dict(self) -> dict:
        def clean(a):
            return [None if not np.isfinite(v) else float(v) for v in a]

        return {
            "mode": self.mode,
            "gamma_T": self.gamma_trad,
            "gamma_R": self.gamma_net,
            "delta_gamma_max": self.best_ratio,
            "delta_gamma_max_diff": None if self.best_ratio is None else self.best_ratio - 1.0,
            "argmax": self.best_x,
            "grid": [float(x) for x in self.grid],
            "gamma_hybrid": [float(g) for g in self.gamma_fused],
            "delta_gamma_ratio": clean(self.ratio),
            "delta_gamma_diff": clean(self.diff),
        }

    def write_csv(self, path: str | Path, config_hash: str | None = None) -> None:
        """Plot-ready gain curve; ``config_hash`` adds a provenance column."""
        header = ["x", "gamma_hybrid", "gamma_T", "gamma_R", "delta_gamma_ratio", "delta_gamma_diff"]
        tail = [] if config_hash is None else [config_hash]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header + (["config_hash"] if tail else []))
            for x, g, r, d in zip(self.grid, self.gamma_fused, self.ratio, self.diff):
                w.writerow([_fmt(x), _fmt(g), _fmt(self.gamma_trad), _fmt(self.gamma_net), _fmt(r), _fmt(d), *tail])


def _fmt(v: float) -> str:
    return "" if v is None or not np.isfinite(v) else repr(float(v))


def _pool(runs: Sequence[FoldRun]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if not runs:
        raise ValueError("no runs to sweep")
    mt = np.concatenate([r.m_trad for r in runs])
    mr = np.concatenate([r.m_net for r in runs])
    y = np.concatenate([r.truth for r in runs])
    _check_pair(mt, mr)
    return mt, mr, y


def sweep(mode: str, runs: Sequence[FoldRun], config: FusionConfig = FusionConfig()) -> GainReport:
    """Accuracy of the fused classifier over a parameter grid.

    Each fold is fused on its own memberships and accuracy is pooled over
    all folds.  The relative gain is reported as ``gamma_fused / gamma_T``
    (``ratio``) and as ``(gamma_fused - gamma_T) / gamma_T`` (``diff``).
    The best parameter is the smallest grid value attaining the maximum.
    """
    if mode not in ("hybrid", "tiebreaker"):
        raise ValueError(f"unknown fusion mode {mode!r}")
    mt, mr, y = _pool(runs)
    grid = config.lambda_grid if mode == "hybrid" else config.theta_grid
    acc = []
    for x in grid:
        hits = total = 0
        for r in runs:
            if mode == "hybrid":
                pred = hybrid_decide(hybrid_combine(r.m_net, r.m_trad, float(x)))
            else:
                pred = tiebreaker_decide(r.m_trad, r.m_net, float(x))
            hits += int(np.sum(pred == r.truth))
            total += len(r.truth)
        acc.append(hits / total)
    acc = np.asarray(acc)
    g_t = float(np.mean(np.argmax(mt, axis=1) == y))
    g_r = float(np.mean(np.argmax(mr, axis=1) == y))
    if g_t == 0:
        nan = np.full(len(grid), np.nan)
        return GainReport(mode, grid, g_t, g_r, acc, nan, nan.copy(), None, None)
    ratio = acc / g_t
    best = int(np.argmax(ratio))  # first maximum = smallest parameter
    return GainReport(mode, grid, g_t, g_r, acc, ratio, ratio - 1.0, float(ratio[best]), float(grid[best]))
