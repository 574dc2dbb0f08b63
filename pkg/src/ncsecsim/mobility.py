"""Cell grid, UE motion, uplink reference-signal measurements, HO trigger.

The deployment is a regular lattice of base stations on a torus (wrap
enabled by default, so every cell sees the same geometry).  UEs move in a
straight line at constant speed with a heading fixed per run.  At every
reference-signal instant each base station measures the UE's uplink
received power through a log-distance path-loss model; only the ordering
of those powers matters for handover decisions, so any monotone model
gives the same protocol behaviour.

A handover to candidate cell c triggers when its measured power exceeds
the serving cell's by the configured offset and no sample inside the
trailing time-to-trigger window contradicts that.  With the default
160 ms periodicity and 32 ms TTT a single satisfying measurement decides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import InvalidParameter, ScheduleError

DEFAULT_RS_PERIOD_MS = 160
DEFAULT_UL_OFFSET_DB = 1.0
DEFAULT_UL_TTT_MS = 32

# Log-distance path loss: PL(d) = PL0 + 10 * exponent * log10(d / 1 m),
# with d clamped below at 1 m.  Received power = P_tx - PL(d).
DEFAULT_PTX_DBM = 23.0
DEFAULT_PL0_DB = 38.5
DEFAULT_PL_EXPONENT = 3.5
MIN_DISTANCE_M = 1.0


@dataclass(frozen=True)
class CellGrid:
    rows: int = 4
    cols: int = 4
    isd_m: float = 100.0
    wrap: bool = True
    ptx_dbm: float = DEFAULT_PTX_DBM
    pl0_db: float = DEFAULT_PL0_DB
    pl_exponent: float = DEFAULT_PL_EXPONENT

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1 or self.isd_m <= 0:
            raise InvalidParameter("grid needs positive rows, cols, and ISD")

    @property
    def num_cells(self) -> int:
        return self.rows * self.cols

    @property
    def extent(self) -> tuple[float, float]:
        return (self.cols * self.isd_m, self.rows * self.isd_m)

    @property
    def bs_positions(self) -> np.ndarray:
        """(num_cells, 2) lattice coordinates, cell ids row-major."""
        xs = (np.arange(self.cols) + 0.5) * self.isd_m
        ys = (np.arange(self.rows) + 0.5) * self.isd_m
        gx, gy = np.meshgrid(xs, ys)
        return np.column_stack([gx.ravel(), gy.ravel()])

    def torus_delta(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        d = np.abs(a - b)
        if self.wrap:
            ext = np.array(self.extent)
            d = np.minimum(d, ext - d)
        return d

    def distances(self, pos: np.ndarray) -> np.ndarray:
        """Distances from positions (..., 2) to every BS, shape (..., cells)."""
        pos = np.asarray(pos, dtype=float)
        d = self.torus_delta(pos[..., None, :], self.bs_positions)
        return np.hypot(d[..., 0], d[..., 1])

    def rsrp(self, pos: np.ndarray) -> np.ndarray:
        """Uplink received power per cell (dBm) for the given positions."""
        d = np.maximum(self.distances(pos), MIN_DISTANCE_M)
        return self.ptx_dbm - (self.pl0_db + 10.0 * self.pl_exponent * np.log10(d))

    def nearest_cell(self, pos) -> int:
        return int(np.argmin(self.distances(np.asarray(pos, dtype=float))))

    def wrap_position(self, pos: np.ndarray) -> np.ndarray:
        if not self.wrap:
            return pos
        ext = np.array(self.extent)
        return np.mod(pos, ext)


@dataclass(frozen=True)
class UeState:
    ue_id: int
    pos: tuple[float, float]
    speed_mps: float
    heading_rad: float
    serving_cell: int


@dataclass(frozen=True)
class Measurement:
    t: int
    ue_id: int
    rsrp_dbm: np.ndarray  # one entry per cell


def step(ue: UeState, dt_ms: float, grid: CellGrid) -> UeState:
    """Advance the UE along its fixed heading, wrapping on the torus."""
    if dt_ms <= 0:
        raise InvalidParameter("dt must be positive")
    dist = ue.speed_mps * dt_ms / 1000.0
    new = np.array(ue.pos) + dist * np.array(
        [math.cos(ue.heading_rad), math.sin(ue.heading_rad)]
    )
    new = grid.wrap_position(new)
    return replace(ue, pos=(float(new[0]), float(new[1])))


def measure(
    ue: UeState, grid: CellGrid, t: int, rs_period_ms: int = DEFAULT_RS_PERIOD_MS
) -> Measurement:
    if rs_period_ms <= 0:
        raise InvalidParameter("RS periodicity must be positive")
    if t % rs_period_ms != 0:
        raise ScheduleError(f"t={t} ms is not on the {rs_period_ms} ms RS grid")
    return Measurement(t, ue.ue_id, grid.rsrp(np.array(ue.pos)))


def trigger_condition(rsrp: np.ndarray, serving: int, ul_offset_db: float) -> np.ndarray:
    """Boolean per-cell mask of candidates beating serving by the offset."""
    mask = rsrp > rsrp[serving] + ul_offset_db
    mask[serving] = False
    return mask


def ho_trigger(
    history: Sequence[Measurement],
    serving: int,
    ul_offset_db: float = DEFAULT_UL_OFFSET_DB,
    ul_ttt_ms: int = DEFAULT_UL_TTT_MS,
) -> int | None:
    """Target cell id if the trigger condition held through the TTT window.

    ``history`` is time-ordered, newest last.  The condition for cell c
    must hold at the newest measurement and at every earlier measurement
    inside [t_newest - TTT, t_newest].  When several cells qualify the
    strongest wins; equal powers break toward the lowest cell id.
    """
    if not history:
        return None
    newest = history[-1]
    mask = trigger_condition(newest.rsrp_dbm, serving, ul_offset_db)
    if not mask.any():
        return None
    window_start = newest.t - ul_ttt_ms
    for meas in reversed(history[:-1]):
        if meas.t < window_start:
            break
        mask &= trigger_condition(meas.rsrp_dbm, serving, ul_offset_db)
        if not mask.any():
            return None
    candidates = np.nonzero(mask)[0]
    best = candidates[np.argmax(newest.rsrp_dbm[candidates])]
    ties = candidates[newest.rsrp_dbm[candidates] == newest.rsrp_dbm[best]]
    return int(ties.min())


def place_ues(
    grid: CellGrid,
    count: int,
    speed_mps: float,
    rng: np.random.Generator,
) -> list[UeState]:
    """Uniform positions, uniform headings in [0, 2*pi), serving = nearest."""
    ext = grid.extent
    ues = []
    for ue_id in range(count):
        pos = (float(rng.uniform(0, ext[0])), float(rng.uniform(0, ext[1])))
        heading = float(rng.uniform(0.0, 2.0 * math.pi))
        ues.append(
            UeState(
                ue_id=ue_id,
                pos=pos,
                speed_mps=speed_mps,
                heading_rad=heading,
                serving_cell=grid.nearest_cell(pos),
            )
        )
    return ues
