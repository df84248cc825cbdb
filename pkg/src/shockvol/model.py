"""Exact simulation of the shock-driven volatility model.

The log price is a Brownian motion run on a random clock: shocks arrive as a
Poisson stream, each carrying an i.i.d. volatility mark, and between shocks
the clock advances like elapsed**(2d). Conditional on the clock, grid
increments of the log price are independent centered Gaussians, so paths are
exact in law on any grid. All times are in days.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import SingularPointError
from .params import ModelParams

__all__ = [
    "ShockTrain",
    "LogPricePath",
    "BmReconstruction",
    "sample_shock_train",
    "time_change_at",
    "time_change_grid",
    "simulate_path",
    "simulate_paths",
    "instantaneous_volatility",
    "reconstruct_driving_bm",
    "sample_time_change_values",
]


@dataclass(frozen=True)
class ShockTrain:
    """Realized shock epochs and volatility marks over a horizon.

    ``tau0 < 0 < epochs[0]``; epochs are strictly increasing and exactly one
    (the last) exceeds the horizon, so the active shock is defined everywhere
    on ``[0, horizon]``. ``marks[k]`` applies on ``[tau_k, tau_{k+1})`` with
    ``marks[0]`` paired to ``tau0``.
    """

    tau0: float
    epochs: np.ndarray
    marks: np.ndarray
    horizon: float

    def __post_init__(self):
        if not self.tau0 < 0:
            raise ValueError(f"tau0 must be negative, got {self.tau0}")
        if len(self.epochs) == 0 or self.epochs[0] <= 0:
            raise ValueError("first epoch must be positive")
        if np.any(np.diff(self.epochs) <= 0):
            raise ValueError("epochs must be strictly increasing")
        if np.sum(self.epochs > self.horizon) != 1:
            raise ValueError("exactly one epoch must exceed the horizon")
        if len(self.marks) != len(self.epochs) + 1:
            raise ValueError("need one mark per epoch plus one for tau0")
        if np.any(self.marks < 0):
            raise ValueError("marks must be nonnegative")

    def index_at(self, t: float | np.ndarray) -> int | np.ndarray:
        """Number of positive epochs at or before ``t`` (the active index)."""
        return np.searchsorted(self.epochs, t, side="right")

    def all_epochs(self) -> np.ndarray:
        """Epochs including ``tau0``, aligned with ``marks``."""
        return np.concatenate(([self.tau0], self.epochs))


@dataclass(frozen=True)
class LogPricePath:
    """Simulated log price on a uniform grid with its clock values."""

    grid: np.ndarray
    i_vals: np.ndarray
    x_vals: np.ndarray
    seed: int | None = None
    train: ShockTrain | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.i_vals[0] != 0.0 or self.x_vals[0] != 0.0:
            raise ValueError("paths start at (I, X) = (0, 0)")
        if np.any(np.diff(self.i_vals) < 0):
            raise ValueError("clock values must be nondecreasing")

    @property
    def dt(self) -> float:
        return float(self.grid[1] - self.grid[0])


def sample_shock_train(params: ModelParams, horizon: float,
                       rng: np.random.Generator) -> ShockTrain:
    """Draw the Poisson shock epochs and their volatility marks.

    ``-tau0``, the first epoch and all gaps are i.i.d. exponential with rate
    ``params.lam``. One overshoot epoch beyond the horizon is kept.
    """
    if not horizon > 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    scale = 1.0 / params.lam
    tau0 = -rng.exponential(scale)
    epochs = []
    t = rng.exponential(scale)
    while t <= horizon:
        epochs.append(t)
        t += rng.exponential(scale)
    epochs.append(t)
    epochs = np.asarray(epochs)
    marks = params.sigma_law.sample(rng, len(epochs) + 1)
    return ShockTrain(tau0, epochs, marks, horizon)


def _clock_pieces(train: ShockTrain, params: ModelParams):
    """Per-train constants for clock evaluation: epoch array, mark array,
    cumulative completed-block sums and the tau0 offset."""
    two_d = 2.0 * params.d
    taus = train.all_epochs()
    blocks = train.marks[:-1] ** 2 * np.diff(taus) ** two_d
    cum = np.concatenate(([0.0], np.cumsum(blocks)))
    offset = train.marks[0] ** 2 * (-train.tau0) ** two_d
    return taus, cum, offset, two_d


def time_change_grid(train: ShockTrain, params: ModelParams,
                     grid: np.ndarray) -> np.ndarray:
    """Clock values at many times at once (times must lie in [0, horizon])."""
    grid = np.asarray(grid, dtype=float)
    if grid.size and (grid.min() < 0 or grid.max() > train.horizon):
        raise ValueError("times outside [0, horizon]")
    taus, cum, offset, two_d = _clock_pieces(train, params)
    idx = train.index_at(grid)
    return train.marks[idx] ** 2 * (grid - taus[idx]) ** two_d + cum[idx] - offset


def time_change_at(train: ShockTrain, params: ModelParams, t: float) -> float:
    """Clock value I(t): trading time accumulated on [0, t]."""
    if not 0.0 <= t <= train.horizon:
        raise ValueError(f"t={t} outside [0, {train.horizon}]")
    return float(time_change_grid(train, params, np.array([t]))[0])


def simulate_path(params: ModelParams, n_steps: int, dt: float,
                  rng: np.random.Generator, seed: int | None = None,
                  keep_train: bool = True) -> LogPricePath:
    """Simulate the log price on the grid ``0, dt, ..., n_steps*dt``.

    Samples a shock train over the horizon, evaluates the clock on the grid
    and draws the log-price increments as independent N(0, clock increment)
    variables. Exact in law at the grid points; reproducible given the
    generator state.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    horizon = n_steps * dt
    train = sample_shock_train(params, horizon, rng)
    grid = np.arange(n_steps + 1) * dt
    i_vals = time_change_grid(train, params, grid)
    i_vals[0] = 0.0  # exact by definition; guards rounding in the offset
    steps = rng.standard_normal(n_steps) * np.sqrt(np.diff(i_vals))
    x_vals = np.concatenate(([0.0], np.cumsum(steps)))
    return LogPricePath(grid, i_vals, x_vals, seed=seed,
                        train=train if keep_train else None)


def _simulate_indexed(args) -> LogPricePath:
    params, n_steps, dt, seed, index, keep_train = args
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    return simulate_path(params, n_steps, dt, rng, seed=seed,
                         keep_train=keep_train)


def simulate_paths(params: ModelParams, n_steps: int, dt: float, seed: int,
                   n_paths: int, workers: int | None = None,
                   keep_train: bool = False) -> list[LogPricePath]:
    """Independent paths with per-path streams keyed by (seed, path index).

    Results are identical for any worker count; paths are returned in index
    order.
    """
    jobs = [(params, n_steps, dt, seed, k, keep_train) for k in range(n_paths)]
    if workers is not None and workers > 1 and n_paths > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_simulate_indexed, jobs, chunksize=16))
    return [_simulate_indexed(job) for job in jobs]


def instantaneous_volatility(train: ShockTrain, params: ModelParams,
                             t: float) -> float:
    """Spot volatility sqrt(2d) * sigma * (t - last epoch)**(d - 1/2).

    Its square is the derivative of the clock. Diverges at shock epochs when
    d < 1/2, so evaluation exactly there raises ``SingularPointError``.
    """
    if not 0.0 <= t <= train.horizon:
        raise ValueError(f"t={t} outside [0, {train.horizon}]")
    idx = int(train.index_at(t))
    tau = train.all_epochs()[idx]
    elapsed = t - tau
    if elapsed == 0.0 and params.d < 0.5:
        raise SingularPointError(f"volatility is singular at the epoch t={t}")
    return math.sqrt(2.0 * params.d) * float(train.marks[idx]) \
        * elapsed ** (params.d - 0.5)


@dataclass(frozen=True)
class BmReconstruction:
    """Driving-noise increments recovered from a path.

    ``increments[j]`` is defined on steps where ``kept[j]`` is true; steps
    whose interior contains a shock epoch are excluded.
    """

    increments: np.ndarray
    kept: np.ndarray

    @property
    def n_excluded(self) -> int:
        return int(np.sum(~self.kept))


def reconstruct_driving_bm(path: LogPricePath, train: ShockTrain,
                           params: ModelParams) -> BmReconstruction:
    """Recover the Brownian increments as dx / spot volatility at midstep.

    On shock-free steps the outputs are approximately i.i.d. N(0, dt); steps
    containing an epoch are flagged and skipped.
    """
    dt = path.dt
    n_steps = len(path.grid) - 1
    dx = np.diff(path.x_vals)
    mids = path.grid[:-1] + 0.5 * dt
    idx_lo = train.index_at(path.grid[:-1])
    idx_hi = train.index_at(path.grid[1:])
    kept = idx_lo == idx_hi
    taus = train.all_epochs()
    i_mid = train.index_at(mids)
    v_mid = np.sqrt(2.0 * params.d) * train.marks[i_mid] \
        * (mids - taus[i_mid]) ** (params.d - 0.5)
    increments = np.full(n_steps, np.nan)
    increments[kept] = dx[kept] / v_mid[kept]
    return BmReconstruction(increments, kept)


def sample_time_change_values(params: ModelParams, h: float,
                              rng: np.random.Generator, n: int) -> np.ndarray:
    """I.i.d. draws of the clock value at lag ``h``.

    Used as the simulation oracle for moment constants and the small-lag
    law. Vectorizes the common no-shock case and falls back on the exact
    block recursion for draws with at least one epoch in (0, h].
    """
    if not h > 0:
        raise ValueError(f"h must be positive, got {h}")
    two_d = 2.0 * params.d
    scale = 1.0 / params.lam
    neg_tau0 = rng.exponential(scale, n)
    tau1 = rng.exponential(scale, n)
    sig0 = params.sigma_law.sample(rng, n)
    out = sig0**2 * ((h + neg_tau0) ** two_d - neg_tau0**two_d)
    for i in np.flatnonzero(tau1 <= h):
        taus = [-neg_tau0[i], tau1[i]]
        t = tau1[i]
        while t <= h:
            t += rng.exponential(scale)
            taus.append(t)
        taus = np.asarray(taus)
        marks = np.concatenate(([sig0[i]],
                                params.sigma_law.sample(rng, len(taus) - 1)))
        blocks = marks[:-1] ** 2 * np.diff(taus) ** two_d
        k = np.searchsorted(taus[1:], h, side="right")
        out[i] = (marks[k] ** 2 * (h - taus[k]) ** two_d
                  + np.sum(blocks[:k]) - marks[0] ** 2 * neg_tau0[i] ** two_d)
    return out
