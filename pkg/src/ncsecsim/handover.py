"""Uplink-triggered handover procedure with pluggable key sharing.

The control sequence follows the usual prepare/execute/complete shape:
request, acknowledgement, command to the UE, confirm, key delivery, path
switch, completion.  What differs between schemes is how the target
cell's MAC keys reach the serving side:

* ledger scheme, first visit to a cell: the target controller uploads the
  cell key set as a ledger candidate and preparation blocks until the
  block verifies (three key-exchange signals end to end: upload,
  broadcast, key delivery to the UE);
* ledger scheme, cell already ledgered: the serving controller reads its
  local replica and only the key delivery to the UE remains (one signal);
* baseline schemes: the target sends a key subset to the serving BS and
  the serving BS forwards keys to the UE, on every single handover (two
  signals).

Handovers between cells of the same security domain skip key sharing
entirely.  A shared block broadcast is attributed to the handover that
caused the upload, which keeps per-handover costs at exactly {1, 3} for
the ledger scheme and 2 for the baselines while the raw trace still
records each broadcast once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import HoPreparationTimeout, InvalidParameter, NoOpHandover
from .keydist import Scheme
from .ledger import (
    CandidateEntry,
    EntryKind,
    SignalKind,
    SignalRecord,
    SimulatedLedger,
)


class HoPhase(Enum):
    TRIGGERED = "triggered"
    PREPARED = "prepared"
    EXECUTING = "executing"
    COMPLETE = "complete"


class KeyPath(Enum):
    LEDGER_FIRST_HO = "ledger_first_ho"
    LEDGER_STEADY_STATE = "ledger_steady_state"
    BASELINE_PER_HO = "baseline_per_ho"
    INTRA_DOMAIN = "intra_domain"


@dataclass(frozen=True)
class PredictionConfig:
    enabled: bool = False
    accuracy: float = 0.8
    lead_ms: int = 160

    def __post_init__(self):
        if not 0.0 <= self.accuracy <= 1.0:
            raise InvalidParameter("prediction accuracy must be in [0, 1]")
        if self.lead_ms < 0:
            raise InvalidParameter("prediction lead must be >= 0")


@dataclass
class HoProcedure:
    ue_id: int
    s_cell: int
    t_cell: int
    scheme: Scheme
    t_trigger: int
    timeout_ms: int
    phase: HoPhase = HoPhase.TRIGGERED
    t_complete: int | None = None
    prep_wait_ms: int | None = None
    key_path: KeyPath | None = None
    signals: list[SignalRecord] = field(default_factory=list)
    did_upload: bool = False
    t_domain: str = ""

    @property
    def key_signal_count(self) -> int:
        return sum(1 for s in self.signals if s.counts_as_key_exchange)

    @property
    def complete(self) -> bool:
        return self.phase is HoPhase.COMPLETE


def _bsh(cell: int) -> str:
    return f"bsh{cell}"


def _ue(ue_id: int) -> str:
    return f"ue{ue_id}"


def _emit(
    trace: list[SignalRecord],
    proc: HoProcedure,
    kind: SignalKind,
    src: str,
    dst: str,
    t: int,
) -> None:
    rec = SignalRecord(kind, src, dst, t)
    trace.append(rec)
    proc.signals.append(rec)


def _finish(proc: HoProcedure, trace: list[SignalRecord], now: int, deliver_keys: bool) -> None:
    s, t, u = _bsh(proc.s_cell), _bsh(proc.t_cell), _ue(proc.ue_id)
    _emit(trace, proc, SignalKind.HO_ACK, t, s, now)
    proc.phase = HoPhase.EXECUTING
    _emit(trace, proc, SignalKind.HO_COMMAND, s, u, now)
    _emit(trace, proc, SignalKind.HO_CONFIRM, u, t, now)
    if deliver_keys:
        _emit(trace, proc, SignalKind.KEY_TO_UE, s, u, now)
    _emit(trace, proc, SignalKind.PATH_SWITCH, "core", t, now)
    _emit(trace, proc, SignalKind.HO_COMPLETE, t, s, now)
    proc.phase = HoPhase.COMPLETE
    proc.t_complete = now
    proc.prep_wait_ms = now - proc.t_trigger


def begin_handover(
    ue_id: int,
    s_cell: int,
    t_cell: int,
    scheme: Scheme,
    ledger: SimulatedLedger | None,
    now: int,
    trace: list[SignalRecord],
    t_cell_keys: Sequence | None = None,
    s_domain: str | None = None,
    t_domain: str | None = None,
    timeout_ms: int | None = None,
) -> HoProcedure:
    """Start a handover; completes immediately unless keys must be ledgered.

    By default every cell is its own security domain, so every handover
    crosses domains and needs key sharing.
    """
    if t_cell == s_cell:
        raise NoOpHandover(f"ue{ue_id}: target equals serving cell {s_cell}")
    s_domain = str(s_cell) if s_domain is None else s_domain
    t_domain = str(t_cell) if t_domain is None else t_domain
    if timeout_ms is None:
        timeout_ms = 2 * (ledger.period if ledger is not None else 1000)
    proc = HoProcedure(
        ue_id=ue_id,
        s_cell=s_cell,
        t_cell=t_cell,
        scheme=scheme,
        t_trigger=now,
        timeout_ms=timeout_ms,
        t_domain=t_domain,
    )
    _emit(trace, proc, SignalKind.HO_REQUEST, _bsh(s_cell), _bsh(t_cell), now)

    if s_domain == t_domain:
        proc.key_path = KeyPath.INTRA_DOMAIN
        _finish(proc, trace, now, deliver_keys=False)
        return proc

    if scheme is not Scheme.BLOCKCHAIN:
        proc.key_path = KeyPath.BASELINE_PER_HO
        _emit(trace, proc, SignalKind.KEY_TO_SBS, _bsh(t_cell), _bsh(s_cell), now)
        _finish(proc, trace, now, deliver_keys=True)
        return proc

    if ledger is None:
        raise InvalidParameter("ledger scheme needs a ledger instance")
    if ledger.query_keys(_bsh(s_cell), t_domain) is not None:
        proc.key_path = KeyPath.LEDGER_STEADY_STATE
        _finish(proc, trace, now, deliver_keys=True)
        return proc

    # First visit (or upload still pending): share keys via the ledger.
    proc.key_path = KeyPath.LEDGER_FIRST_HO
    if not ledger.is_pending(t_domain, EntryKind.CELL_KEY_SET):
        if t_cell_keys is None:
            raise InvalidParameter(f"no key set supplied for cell {t_cell}")
        receipt = ledger.submit_candidate(
            CandidateEntry(
                entry_kind=EntryKind.CELL_KEY_SET,
                origin=_bsh(t_cell),
                payload=tuple(t_cell_keys),
                submitted_at=now,
                domain=t_domain,
            )
        )
        if receipt.accepted:
            proc.did_upload = True
            proc.signals.append(ledger.trace[-1])  # the upload record
    proc.phase = HoPhase.PREPARED
    return proc


def try_complete(proc: HoProcedure, ledger: SimulatedLedger, now: int) -> bool:
    """Finish a preparation-blocked handover once its keys are ledgered."""
    if proc.complete:
        return True
    if proc.phase is not HoPhase.PREPARED:
        return False
    if ledger.query_keys(_bsh(proc.s_cell), proc.t_domain) is None:
        if now - proc.t_trigger > proc.timeout_ms:
            raise HoPreparationTimeout(
                f"ue{proc.ue_id}: keys for domain {proc.t_domain} not ledgered "
                f"within {proc.timeout_ms} ms"
            )
        return False
    if proc.did_upload:
        broadcast = ledger.broadcast_for(proc.t_domain, EntryKind.CELL_KEY_SET)
        if broadcast is not None:
            proc.signals.append(broadcast)
    _finish(proc, trace=ledger.trace, now=now, deliver_keys=True)
    return True


def run_handover(
    ue_id: int,
    s_cell: int,
    t_cell: int,
    scheme: Scheme,
    ledger: SimulatedLedger | None,
    now: int,
    trace: list[SignalRecord] | None = None,
    t_cell_keys: Sequence | None = None,
    s_domain: str | None = None,
    t_domain: str | None = None,
    timeout_ms: int | None = None,
) -> HoProcedure:
    """Run one handover to completion, advancing the ledger clock as needed.

    Inside the full simulation the event loop drives begin/try_complete
    itself so that concurrent handovers share ledger blocks; this wrapper
    serves direct library use and tests.
    """
    if trace is None:
        trace = ledger.trace if ledger is not None else []
    proc = begin_handover(
        ue_id, s_cell, t_cell, scheme, ledger, now, trace,
        t_cell_keys=t_cell_keys, s_domain=s_domain, t_domain=t_domain,
        timeout_ms=timeout_ms,
    )
    t = now if ledger is None else max(now, ledger.now)
    while not proc.complete:
        t = ledger.next_boundary(t)
        ledger.tick(t)
        if not try_complete(proc, ledger, t):
            t += 1
    return proc


# ----------------------------------------------------------------------
# prediction
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PrestageAction:
    cell: int
    domain: str
    t: int
    uploaded: bool


def predict_and_prestage(
    ue_id: int,
    target_cell: int,
    prediction: PredictionConfig,
    ledger: SimulatedLedger,
    rng: np.random.Generator,
    now: int,
    t_cell_keys: Sequence,
    t_domain: str | None = None,
) -> PrestageAction | None:
    """Upload a forecast target cell's keys ahead of the projected trigger.

    Succeeds with probability ``accuracy``; a failed draw means the
    handover later runs the unpredicted path.  Prestaging never uploads a
    cell that is already pending or ledgered (submission is idempotent),
    so prediction cannot inflate per-cell upload counts.
    """
    if not prediction.enabled:
        return None
    domain = str(target_cell) if t_domain is None else t_domain
    if float(rng.random()) >= prediction.accuracy:
        return None
    receipt = ledger.submit_candidate(
        CandidateEntry(
            entry_kind=EntryKind.CELL_KEY_SET,
            origin=_bsh(target_cell),
            payload=tuple(t_cell_keys),
            submitted_at=now,
            domain=domain,
        )
    )
    return PrestageAction(target_cell, domain, now, uploaded=receipt.accepted)


# ----------------------------------------------------------------------
# trace analytics and scheme replay
# ----------------------------------------------------------------------

def cumulative_key_exchanges(
    trace: Sequence[SignalRecord], horizon_ms: int, step_ms: int = 1000
) -> list[tuple[int, int]]:
    """Running key-exchange count sampled every ``step_ms`` up to horizon."""
    times = sorted(r.t for r in trace if r.counts_as_key_exchange)
    series = []
    idx = 0
    for t in range(0, horizon_ms + 1, step_ms):
        while idx < len(times) and times[idx] <= t:
            idx += 1
        series.append((t, idx))
    return series


@dataclass(frozen=True)
class HoEvent:
    """One handover trigger, the scheme-independent unit of comparison."""

    ue_id: int
    s_cell: int
    t_cell: int
    t_trigger: int


def replay_key_signaling(
    events: Sequence[HoEvent],
    scheme: Scheme,
    cell_keys: Mapping[int, Sequence],
    horizon_ms: int,
    rs_period_ms: int = 160,
    collection_period_ms: int = 1000,
    domain_of: Callable[[int], str] | None = None,
) -> list[SignalRecord]:
    """Replay an HO event stream under one key-sharing policy.

    All three schemes' signaling curves for a run come from the same
    trigger stream, so the curves differ only in key-sharing policy.  The
    replay mirrors the event loop's tick semantics (same grid, same
    boundary rule) and applies no per-UE concurrency limits: every
    triggered handover is costed.
    """
    domain = domain_of if domain_of is not None else str
    trace: list[SignalRecord] = []
    controllers = {_bsh(c) for c in cell_keys}
    led = SimulatedLedger(controllers, collection_period_ms, trace)
    pending: list[HoProcedure] = []
    by_tick: dict[int, list[HoEvent]] = {}
    for ev in events:
        by_tick.setdefault(ev.t_trigger, []).append(ev)
    if not events:
        return trace
    for t in range(0, horizon_ms + 1, rs_period_ms):
        for ev in by_tick.get(t, ()):
            proc = begin_handover(
                ev.ue_id, ev.s_cell, ev.t_cell, scheme, led, t, trace,
                t_cell_keys=cell_keys[ev.t_cell],
                s_domain=domain(ev.s_cell), t_domain=domain(ev.t_cell),
                timeout_ms=10 * collection_period_ms,
            )
            if not proc.complete:
                pending.append(proc)
        led.tick(t)
        still = []
        for proc in pending:
            if not try_complete(proc, led, t):
                still.append(proc)
        pending = still
    return trace
