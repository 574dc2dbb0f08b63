"""Deterministic event loop: motion, measurements, triggers, handovers,
ledger ticks, and the CSV artifacts derived from one run.

Each reference-signal tick advances UE positions, measures uplink powers
at every base station, optionally forecasts imminent handovers for key
prestaging, starts triggered handovers, and then lets the ledger verify
any collection-period boundary that has passed.  Handovers blocked on key
sharing complete at the first tick after their block verifies.

All randomness flows from one master seed through named substreams
(placement, key material, prediction, fading), so identical seed and
configuration give byte-identical artifacts.

For scheme comparisons the run keeps its trigger stream and replays it
under the other key-sharing policies; the resulting curves differ only in
key signaling, never in mobility.
"""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .config import RunConfig, write_config_echo
from .errors import IoError
from .gf import FieldSpec
from .handover import (
    HoEvent,
    HoProcedure,
    begin_handover,
    cumulative_key_exchanges,
    predict_and_prestage,
    replay_key_signaling,
    try_complete,
)
from .integrity import MacKey, generate_domain_keys
from .keydist import Scheme
from .ledger import (
    EntryKind,
    LedgerBlock,
    SignalRecord,
    SimulatedLedger,
    per_second_signaling,
)
from .mobility import CellGrid, Measurement, UeState, ho_trigger, place_ues, step

_ALL_SCHEMES = (Scheme.BLOCKCHAIN, Scheme.DOUBLE_RANDOM, Scheme.C_COVER_FREE)


@dataclass
class SimulationResult:
    config: RunConfig
    grid: CellGrid
    trace: list[SignalRecord]
    procedures: list[HoProcedure]
    events: list[HoEvent]
    blocks: list[LedgerBlock]
    upload_log: list[tuple[int, str, str]]
    cell_keys: dict[int, tuple[MacKey, ...]]
    scheme_traces: dict[str, list[SignalRecord]]
    measurements: list[Measurement]

    @property
    def completed(self) -> list[HoProcedure]:
        return [p for p in self.procedures if p.complete]


def run_simulation(config: RunConfig) -> SimulationResult:
    sc = config.scenario
    grid = CellGrid(
        rows=sc.rows,
        cols=sc.cols,
        isd_m=sc.isd_m,
        wrap=sc.wrap,
        ptx_dbm=sc.ptx_dbm,
        pl0_db=sc.pl0_db,
        pl_exponent=sc.pl_exponent,
    )
    seq = np.random.SeedSequence(config.seed)
    rng_place, rng_keys, rng_predict, rng_fading = (
        np.random.default_rng(s) for s in seq.spawn(4)
    )
    spec = FieldSpec(config.security.q.bit_length() - 1)
    cell_keys = {
        cell: generate_domain_keys(
            config.security.n, config.security.l, spec, rng_keys, domain_id=str(cell)
        )
        for cell in range(grid.num_cells)
    }

    trace: list[SignalRecord] = []
    ledger = SimulatedLedger(
        {f"bsh{c}" for c in range(grid.num_cells)},
        config.ledger.collection_period_ms,
        trace,
    )
    ues = place_ues(grid, sc.num_ues, sc.ue_speed_mps, rng_place)
    hist_len = max(2, sc.ul_ttt_ms // sc.rs_period_ms + 2)
    histories: dict[int, deque[Measurement]] = {
        ue.ue_id: deque(maxlen=hist_len) for ue in ues
    }
    inflight: dict[int, HoProcedure] = {}
    procedures: list[HoProcedure] = []
    events: list[HoEvent] = []
    measurements: list[Measurement] = []
    decided_forecasts: set[tuple[int, int, int]] = set()
    predict = config.prediction.enabled and config.scheme is Scheme.BLOCKCHAIN
    lead_ticks = max(1, -(-config.prediction.lead_ms // sc.rs_period_ms))

    if config.horizon_ms > 0:
        for t in range(0, config.horizon_ms + 1, sc.rs_period_ms):
            if t > 0:
                ues = [step(ue, sc.rs_period_ms, grid) for ue in ues]

            positions = np.array([ue.pos for ue in ues])
            rsrp = grid.rsrp(positions) if len(ues) else np.zeros((0, grid.num_cells))
            if sc.shadow_sigma_db > 0 and len(ues):
                rsrp = rsrp + rng_fading.normal(0.0, sc.shadow_sigma_db, rsrp.shape)
            for i, ue in enumerate(ues):
                meas = Measurement(t, ue.ue_id, rsrp[i])
                histories[ue.ue_id].append(meas)
                if sc.dump_measurements:
                    measurements.append(meas)

            if predict:
                _forecast_and_prestage(
                    config, grid, ledger, ues, inflight, decided_forecasts,
                    cell_keys, rng_predict, t, lead_ticks,
                )

            for i, ue in enumerate(ues):
                if ue.ue_id in inflight:
                    continue
                target = ho_trigger(
                    list(histories[ue.ue_id]),
                    ue.serving_cell,
                    sc.ul_offset_db,
                    sc.ul_ttt_ms,
                )
                if target is None:
                    continue
                proc = begin_handover(
                    ue.ue_id, ue.serving_cell, target, config.scheme, ledger, t,
                    trace, t_cell_keys=cell_keys[target],
                    timeout_ms=config.ledger.ho_timeout_ms,
                )
                procedures.append(proc)
                events.append(HoEvent(ue.ue_id, ue.serving_cell, target, t))
                if proc.complete:
                    ues[i] = _switch_serving(ue, target)
                else:
                    inflight[ue.ue_id] = proc

            ledger.tick(t)

            if inflight:
                by_id = {ue.ue_id: i for i, ue in enumerate(ues)}
                for ue_id in sorted(inflight):
                    proc = inflight[ue_id]
                    if try_complete(proc, ledger, t):
                        idx = by_id[ue_id]
                        ues[idx] = _switch_serving(ues[idx], proc.t_cell)
                        del inflight[ue_id]

    scheme_traces: dict[str, list[SignalRecord]] = {}
    for scheme in _ALL_SCHEMES:
        if scheme is config.scheme:
            scheme_traces[scheme.label] = sorted(trace, key=lambda r: r.t)
        else:
            replay = replay_key_signaling(
                events, scheme, cell_keys, config.horizon_ms,
                rs_period_ms=sc.rs_period_ms,
                collection_period_ms=config.ledger.collection_period_ms,
            )
            scheme_traces[scheme.label] = sorted(replay, key=lambda r: r.t)

    return SimulationResult(
        config=config,
        grid=grid,
        trace=sorted(trace, key=lambda r: r.t),
        procedures=procedures,
        events=events,
        blocks=list(ledger.blocks),
        upload_log=list(ledger.upload_log),
        cell_keys=cell_keys,
        scheme_traces=scheme_traces,
        measurements=measurements,
    )


def _switch_serving(ue: UeState, target: int) -> UeState:
    return replace(ue, serving_cell=target)


def _forecast_and_prestage(
    config: RunConfig,
    grid: CellGrid,
    ledger: SimulatedLedger,
    ues: list[UeState],
    inflight: dict[int, HoProcedure],
    decided: set[tuple[int, int, int]],
    cell_keys: dict[int, tuple[MacKey, ...]],
    rng: np.random.Generator,
    now: int,
    lead_ticks: int,
) -> None:
    """Prestage key uploads for each UE's earliest forecast trigger.

    Motion and the deterministic radio model make the forecast exact at
    the default settings; the accuracy knob then decides per upcoming
    trigger whether the prestage actually happens.  Each (ue, cell,
    trigger time) is decided at most once.
    """
    sc = config.scenario
    for ue in ues:
        if ue.ue_id in inflight:
            continue
        for j in range(1, lead_ticks + 1):
            t_future = now + j * sc.rs_period_ms
            dist = ue.speed_mps * (j * sc.rs_period_ms) / 1000.0
            pos = grid.wrap_position(
                np.array(ue.pos)
                + dist * np.array([np.cos(ue.heading_rad), np.sin(ue.heading_rad)])
            )
            rsrp = grid.rsrp(pos)
            target = ho_trigger(
                [Measurement(t_future, ue.ue_id, rsrp)],
                ue.serving_cell,
                sc.ul_offset_db,
                sc.ul_ttt_ms,
            )
            if target is None:
                continue
            domain = str(target)
            if ledger.is_ledgered(domain, EntryKind.CELL_KEY_SET) or ledger.is_pending(
                domain, EntryKind.CELL_KEY_SET
            ):
                break  # nothing left to hide for the nearest trigger
            key = (ue.ue_id, target, t_future)
            if key not in decided:
                decided.add(key)
                predict_and_prestage(
                    ue.ue_id, target, config.prediction, ledger, rng, now,
                    t_cell_keys=cell_keys[target],
                )
            break  # only the earliest upcoming trigger is a valid forecast


# ----------------------------------------------------------------------
# artifacts
# ----------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def write_run_artifacts(result: SimulationResult, out_dir: str | Path) -> dict[str, Path]:
    """Write the signal trace, per-HO summary, per-second and cumulative
    signaling CSVs, plus the canonical config echo."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create output directory {out}: {exc}") from None

    paths: dict[str, Path] = {}
    horizon = result.config.horizon_ms

    paths["config"] = out / "config.txt"
    write_config_echo(result.config, paths["config"])

    paths["signals"] = out / "signals.csv"
    with open(paths["signals"], "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t_ms", "kind", "src", "dst", "key_exchange_flag"])
        for rec in result.trace:
            w.writerow([rec.t, rec.kind.value, rec.src, rec.dst, int(rec.counts_as_key_exchange)])

    paths["ho_summary"] = out / "ho_summary.csv"
    with open(paths["ho_summary"], "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["ue_id", "s_cell", "t_cell", "t_trigger_ms", "t_complete_ms",
             "key_signals", "prep_wait_ms"]
        )
        for proc in result.completed:
            w.writerow(
                [proc.ue_id, proc.s_cell, proc.t_cell, proc.t_trigger,
                 proc.t_complete, proc.key_signal_count, proc.prep_wait_ms]
            )

    labels = list(result.scheme_traces)
    paths["per_second"] = out / "per_second_signaling.csv"
    with open(paths["per_second"], "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["window_start_ms", "scheme", "key_exchanges"])
        if horizon > 0:
            for start in range(0, horizon + 1, 1000):
                for label in labels:
                    w.writerow(
                        [start, label, per_second_signaling(result.scheme_traces[label], start)]
                    )

    paths["cumulative"] = out / "cumulative_key_exchanges.csv"
    with open(paths["cumulative"], "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t_ms", "scheme", "cumulative_key_exchanges"])
        if horizon > 0:
            series = {
                label: cumulative_key_exchanges(tr, horizon)
                for label, tr in result.scheme_traces.items()
            }
            for i, (t, _) in enumerate(series[labels[0]]):
                for label in labels:
                    w.writerow([t, label, series[label][i][1]])

    if result.config.scenario.dump_measurements:
        paths["measurements"] = out / "measurements.csv"
        with open(paths["measurements"], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t_ms", "ue_id", "cell", "rsrp_dbm"])
            for meas in result.measurements:
                for cell, value in enumerate(meas.rsrp_dbm):
                    w.writerow([meas.t, meas.ue_id, cell, _fmt(float(value))])

    return paths
