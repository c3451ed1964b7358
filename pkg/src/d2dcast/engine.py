"""Discrete-event core: one session of update broadcast in a LoRaWAN cell.

A run is a deterministic function of (config, seed). Randomness is split
into named substreams (placement, shadowing, fading, interferer arrivals,
interferer fading, protocol choices, decode draws) derived from the run
seed, so disabling one source never shifts the draws of another. Per-event
reception outcomes are resolved by the kernel backend in `_kernels`.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kernels
from .coding import CodingParams, FragmentLedger, decode_attempt
from .frames import Frame
from .interference import InterfererField, InterfererTraffic, sample_disk, spawn_interferers
from .metrics import EnergyParams, energy_joules
from .phy import SF_MIN, PhyParams, airtime
from .protocol import (
    SCHEMES,
    EdState,
    GatewayState,
    d2d_listen_start_frame,
    gateway_step,
    num_d2d_frames,
    on_d2d_frame_received,
    schedule_d2d,
    scheme_fixed_sf,
    scheme_uses_d2d,
    success_ratio,
)
from .scheduler import SlotPlanParams, build_slot_plan

GATEWAY = "gateway"

RAW_CSV_COLUMNS = (
    "run",
    "ed",
    "distance_m",
    "completion_s",
    "tx_s",
    "rx_s",
    "energy_J",
    "decoded",
)


@dataclass(frozen=True)
class SimConfig:
    """Every tunable of one scenario."""

    phy: PhyParams = field(default_factory=PhyParams)
    slots: SlotPlanParams = field(default_factory=SlotPlanParams)
    coding: CodingParams = field(default_factory=CodingParams)
    interferers: InterfererField = field(default_factory=InterfererField)
    energy: EnergyParams = field(default_factory=EnergyParams)
    n_ed: int = 400
    cell_radius_m: float = 1000.0
    scheme: str = "d2d"
    n_runs: int = 100
    master_seed: int = 1
    processing_delay: int | tuple[int, int] = 1  # lambda, constant or uniform range
    fuota_channel: int = 0
    bin_width_m: float = 100.0

    def __post_init__(self):
        if self.n_ed < 1:
            raise ValueError("n_ed must be >= 1")
        if self.cell_radius_m <= 0:
            raise ValueError("cell_radius_m must be positive")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.n_runs < 1:
            raise ValueError("n_runs must be >= 1")
        if self.bin_width_m <= 0:
            raise ValueError("bin_width_m must be positive")
        if not 0 <= self.fuota_channel < self.interferers.n_channels:
            raise ValueError("fuota_channel must be a valid channel index")
        lam = self.processing_delay
        if isinstance(lam, int):
            if lam < 1:
                raise ValueError("processing_delay must be >= 1")
        else:
            lam = tuple(int(x) for x in lam)
            object.__setattr__(self, "processing_delay", lam)
            if len(lam) != 2 or not 1 <= lam[0] <= lam[1]:
                raise ValueError("processing_delay range must be (lo, hi), 1 <= lo <= hi")
        if scheme_uses_d2d(self.scheme):
            from .coding import max_supported_eds

            cap = max_supported_eds(self.coding)
            if self.coding.d2d_frames_max > 0 and self.n_ed > cap:
                raise ValueError(
                    f"n_ed={self.n_ed} exceeds the sequence plan capacity {cap}"
                )

    def effective_slots(self) -> SlotPlanParams:
        """Slot parameters with the scheme's SF progression applied."""
        fixed = scheme_fixed_sf(self.scheme)
        if fixed is None:
            return self.slots
        return dataclasses.replace(self.slots, start_sf=fixed, frames_per_sf=None)


def place_recipients(
    n_ed: int, radius_m: float, rng: np.random.Generator
) -> np.ndarray:
    """Recipient coordinates, uniform over the cell disk; gateway at origin."""
    return sample_disk(radius_m, n_ed, rng)


class _Streams:
    """Named independent RNG substreams for one run."""

    NAMES = (
        "placement",
        "shadowing",
        "fading",
        "interferer_arrivals",
        "interferer_fading",
        "protocol",
        "decode",
    )

    def __init__(self, seed):
        ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        self.entropy = ss.entropy
        for name, child in zip(self.NAMES, ss.spawn(len(self.NAMES))):
            setattr(self, name, np.random.default_rng(child))


@dataclass
class TraceFrame:
    frame_index: int
    superslot: int | None
    frame: Frame
    outcomes: tuple[tuple[int, int], ...] | None  # (receiver id, outcome code)


@dataclass
class DecodeEvent:
    ed_id: int
    batch: int
    time_s: float
    frame_index: int
    beta_senders: tuple[int, ...]
    eta: float | None
    n_d2d: int | None


@dataclass
class ListenEvent:
    frame_index: int
    superslot: int | None  # None: downlink superslot; -1: empty-slot scan run
    ed_ids: tuple[int, ...]
    seconds_each: float


class RunTrace:
    """Optional event record of one run, for audits and debugging."""

    def __init__(self, full: bool):
        self.full = full
        self.frames: list[TraceFrame] = []
        self.decodes: list[DecodeEvent] = []
        self.listens: list[ListenEvent] = []

    def dump_csv(self, fileobj) -> None:
        fileobj.write("time_s,kind,origin,origin_id,frame_index,superslot,seq,batch,sf,outcomes\n")
        for tf in self.frames:
            f = tf.frame
            outcomes = (
                ";".join(f"{rx}:{code}" for rx, code in tf.outcomes)
                if tf.outcomes is not None
                else ""
            )
            slot = "" if tf.superslot is None else str(tf.superslot)
            fileobj.write(
                f"{f.start_s!r},{f.kind},{f.origin},{f.origin_id},{tf.frame_index},"
                f"{slot},{f.seq},{f.batch},{f.sf},{outcomes}\n"
            )


@dataclass
class RunResult:
    """Per-ED metrics and session summary of one run."""

    scheme: str
    seed: object
    distances: np.ndarray
    completion_s: np.ndarray  # nan marks an ED that never finished
    decoded: np.ndarray
    tx_seconds: np.ndarray
    rx_seconds: np.ndarray
    energy_j: np.ndarray
    frames_sent: int
    d2d_frames_sent: int
    session_end_s: float
    run_index: int = 0
    trace: RunTrace | None = None
    config: SimConfig | None = None


def run_once(config: SimConfig, seed, trace: bool | str = False) -> RunResult:
    """Simulate one session to completion, budget exhaustion, or all-confirmed.

    `trace` may be False, "frames" (frame/decode records) or "full" (adds
    per-receiver outcomes and listening records).
    """
    streams = _Streams(seed)
    phy = config.phy
    slots = config.effective_slots()
    coding = config.coding
    energy = config.energy
    nu = coding.n_batches
    k_batch = coding.batch_fragments
    n_ed = config.n_ed
    gw_id = n_ed
    t_p = slots.ping_slot_s
    uses_d2d = scheme_uses_d2d(config.scheme)
    psi = config.scheme == "d2d-psi"
    channel = config.fuota_channel
    decode_model = coding.decode_model
    recorder = RunTrace(full=(trace == "full")) if trace else None

    # --- geometry and static link state -------------------------------------
    positions = place_recipients(n_ed, config.cell_radius_m, streams.placement)
    all_pos = np.vstack([positions, [[0.0, 0.0]]])
    diff = all_pos[:, None, :] - all_pos[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    np.fill_diagonal(dist, np.inf)
    with np.errstate(divide="ignore"):
        pl_nodes = 10.0 * phy.pathloss_exponent * np.log10(dist)
    distances = dist[gw_id, :n_ed].copy()

    shadow_nodes = None
    if phy.shadow_sigma_db > 0:
        shadow_nodes = streams.shadowing.normal(
            0.0, phy.shadow_sigma_db, (n_ed + 1, n_ed + 1)
        )

    int_positions = spawn_interferers(config.interferers, streams.interferer_arrivals)
    traffic = InterfererTraffic(
        config.interferers,
        phy,
        int_positions,
        streams.interferer_arrivals,
        streams.interferer_fading,
        fading_enabled=phy.rayleigh_fading,
    )
    if len(int_positions):
        idiff = int_positions[:, None, :] - all_pos[None, :, :]
        idist = np.sqrt((idiff**2).sum(axis=2))
        with np.errstate(divide="ignore"):
            pl_int = 10.0 * phy.pathloss_exponent * np.log10(idist)
        shadow_int = None
        if phy.shadow_sigma_db > 0:
            shadow_int = streams.shadowing.normal(
                0.0, phy.shadow_sigma_db, idist.shape
            )
    else:
        pl_int = shadow_int = None

    plan = build_slot_plan(coding.max_gateway_frames, slots, phy)
    e_p = plan.e_p
    dur_d2d = airtime(slots.sf_d2d, slots.fragment_bytes, phy)
    sens = np.array(phy.sensitivity_dbm)
    xi = np.array(phy.capture_threshold_db)
    base_gw = phy.tx_power_gateway_dbm + phy.gamma0_db
    base_ed = phy.tx_power_ed_dbm + phy.gamma0_db
    base_int = phy.tx_power_interferer_dbm + phy.gamma0_db

    # --- protocol state ------------------------------------------------------
    lam = config.processing_delay
    if isinstance(lam, tuple):
        lam_per_ed = streams.protocol.integers(lam[0], lam[1] + 1, size=n_ed)
    else:
        lam_per_ed = np.full(n_ed, lam, dtype=np.int64)
    eds = [
        EdState(
            ed_id=i,
            x=float(positions[i, 0]),
            y=float(positions[i, 1]),
            distance_m=float(distances[i]),
            ledger=FragmentLedger(k_batch),
            processing_delay=int(lam_per_ed[i]),
        )
        for i in range(n_ed)
    ]
    gw = GatewayState(scheme=config.scheme, max_frames=coding.max_gateway_frames)
    decoded = np.zeros((n_ed, nu), dtype=bool)
    fully = np.zeros(n_ed, dtype=bool)
    n_fully = 0
    confirmed = np.zeros((n_ed, nu), dtype=bool)
    n_confirmed_cells = 0
    rx_time = np.zeros(n_ed)
    tx_time = np.zeros(n_ed)
    completion = np.full(n_ed, np.nan)
    listen_start = np.array(
        [d2d_listen_start_frame(b, coding) for b in range(nu)], dtype=np.int64
    )
    pending: dict[int, dict[int, list[tuple[int, int]]]] = {}
    d2d_frames_sent = 0

    def fade_db(shape) -> np.ndarray:
        if not phy.rayleigh_fading:
            return np.zeros(shape)
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(streams.fading.standard_exponential(shape))

    def external_field(t0: float, t1: float, sf_target: int, rx_ids: np.ndarray):
        idx = traffic.frames_overlapping(t0, t1, channel)
        if not idx.size:
            return None, None
        ifade = traffic.fades_db(idx, rx_ids)
        ipl = pl_int[np.ix_(traffic.node[idx], rx_ids)]
        ish = (
            shadow_int[np.ix_(traffic.node[idx], rx_ids)]
            if shadow_int is not None
            else None
        )
        powers = kernels.assemble_powers(base_int, ifade, ipl, ish)
        ext_xi = xi[sf_target - SF_MIN][traffic.sf[idx] - SF_MIN].astype(np.float64)
        return powers, ext_xi

    def on_batch_decoded(ed_id: int, batch: int, frame_index: int, t_end: float):
        nonlocal n_fully
        state = eds[ed_id]
        decoded[ed_id, batch] = True
        eta = n_frames = None
        if uses_d2d:
            n_max, n_min = coding.per_batch_limits
            eta = success_ratio(state.ledger.beta(batch), coding.success_scale, n_ed)
            n_frames = num_d2d_frames(eta, n_max, n_min)
            entries, state.next_seq_index = schedule_d2d(
                ed_id,
                frame_index,
                state.processing_delay,
                n_frames,
                plan,
                streams.protocol,
                coding,
                batch,
                state.next_seq_index,
            )
            state.pending_tx.extend(entries)
            for entry in entries:
                pending.setdefault(entry.frame_index, {}).setdefault(
                    entry.superslot, []
                ).append((ed_id, entry.seq))
        if state.ledger.fully_decoded:
            fully[ed_id] = True
            n_fully += 1
            completion[ed_id] = t_end
        if recorder is not None:
            recorder.decodes.append(
                DecodeEvent(
                    ed_id=ed_id,
                    batch=batch,
                    time_s=t_end,
                    frame_index=frame_index,
                    beta_senders=tuple(sorted(state.ledger.senders[batch])),
                    eta=eta,
                    n_d2d=n_frames,
                )
            )

    def deliver_downlink(ed_id: int, seq: int, batch: int, frame_index: int, t_end: float):
        ledger = eds[ed_id].ledger
        if not ledger.add_fragment(seq, batch):
            return
        if ledger.decoded[batch]:
            return
        l = ledger.counts[batch]
        if l >= k_batch[batch] and decode_attempt(
            l, k_batch[batch], streams.decode, decode_model
        ):
            ledger.mark_decoded(batch)
            on_batch_decoded(ed_id, batch, frame_index, t_end)

    # --- event loop ------------------------------------------------------
    session_end_s = 0.0
    for n in range(plan.n_frames):
        if uses_d2d:
            all_done = n_confirmed_cells == n_ed * nu
        else:
            all_done = n_fully == n_ed
        if gateway_step(gw, all_done) == "stop":
            break
        sf = int(plan.sf[n])
        t0 = plan.start_slot[n] * t_p
        dur = float(plan.airtime_s[n])
        batch_n = n % nu
        gw.frames_sent += 1
        session_end_s = t0 + plan.w_p[n] * t_p

        listeners = np.flatnonzero(~fully)
        outcomes_rec = None
        if listeners.size:
            rx_time[listeners] += plan.g_p[n] * t_p
            fade = fade_db((1, listeners.size))
            pl_sub = np.ascontiguousarray(pl_nodes[gw_id, listeners][None, :])
            sh_sub = (
                np.ascontiguousarray(shadow_nodes[gw_id, listeners][None, :])
                if shadow_nodes is not None
                else None
            )
            powers = kernels.assemble_powers(base_gw, fade, pl_sub, sh_sub)
            ext_p, ext_xi = external_field(t0, t0 + dur, sf, listeners)
            codes = kernels.resolve_event(
                powers, float(sens[sf - SF_MIN]), float(xi[sf - SF_MIN][sf - SF_MIN]),
                ext_p, ext_xi,
            )
            for col, rx in enumerate(listeners):
                if codes[0, col] == 0:
                    deliver_downlink(int(rx), n, batch_n, n, t0 + dur)
            if recorder is not None and recorder.full:
                outcomes_rec = tuple(
                    (int(rx), int(codes[0, col])) for col, rx in enumerate(listeners)
                )
                recorder.listens.append(
                    ListenEvent(n, None, tuple(int(r) for r in listeners),
                                plan.g_p[n] * t_p)
                )
        if recorder is not None:
            recorder.frames.append(
                TraceFrame(
                    frame_index=n,
                    superslot=None,
                    frame=Frame(
                        origin=GATEWAY,
                        origin_id=gw_id,
                        kind="downlink",
                        sf=sf,
                        channel=channel,
                        start_s=t0,
                        duration_s=dur,
                        tx_power_dbm=phy.tx_power_gateway_dbm,
                        seq=n,
                        batch=batch_n,
                    ),
                    outcomes=outcomes_rec,
                )
            )

        # --- the D2D window that follows downlink frame n --------------------
        if not uses_d2d:
            continue
        s_window = int(plan.s_d2d[n])
        tx_map = pending.pop(n, None)
        if s_window == 0:
            continue
        eligible = (~fully) & (~decoded[:, batch_n]) & (n >= listen_start[batch_n])
        win_slot0 = plan.window_start_slot(n)

        def scan(slot_from: int, slot_to: int):
            if psi or slot_to <= slot_from:
                return
            ids = np.flatnonzero(eligible)
            if not ids.size:
                return
            seconds = (slot_to - slot_from) * e_p * t_p
            rx_time[ids] += seconds
            if recorder is not None and recorder.full:
                recorder.listens.append(
                    ListenEvent(n, -1, tuple(int(r) for r in ids), seconds)
                )

        if tx_map is None:
            scan(0, s_window)
            continue
        prev = 0
        for s in sorted(tx_map):
            scan(prev, s)
            prev = s + 1
            txs = sorted(tx_map[s])
            senders = np.array([ed for ed, _ in txs], dtype=np.int64)
            t0s = (win_slot0 + s * e_p) * t_p
            for ed_id, _seq in txs:
                tx_time[ed_id] += dur_d2d
            d2d_frames_sent += len(txs)
            listeners = np.flatnonzero(eligible)
            rx_ids = np.concatenate([listeners, [gw_id]]).astype(np.int64)
            rx_time[listeners] += e_p * t_p
            fade = fade_db((len(txs), rx_ids.size))
            pl_sub = pl_nodes[np.ix_(senders, rx_ids)]
            sh_sub = (
                shadow_nodes[np.ix_(senders, rx_ids)]
                if shadow_nodes is not None
                else None
            )
            powers = kernels.assemble_powers(base_ed, fade, pl_sub, sh_sub)
            ext_p, ext_xi = external_field(t0s, t0s + dur_d2d, slots.sf_d2d, rx_ids)
            codes = kernels.resolve_event(
                powers,
                float(sens[slots.sf_d2d - SF_MIN]),
                float(xi[slots.sf_d2d - SF_MIN][slots.sf_d2d - SF_MIN]),
                ext_p,
                ext_xi,
            )
            t_end = t0s + dur_d2d
            for col, rx in enumerate(listeners):
                hits = np.flatnonzero(codes[:, col] == 0)
                for f in hits:
                    state = eds[int(rx)]
                    if state.ledger.decoded[batch_n]:
                        break
                    ed_id, seq = txs[int(f)]
                    if on_d2d_frame_received(
                        state, ed_id, seq, batch_n, streams.decode, decode_model
                    ):
                        on_batch_decoded(int(rx), batch_n, n, t_end)
            for f in np.flatnonzero(codes[:, -1] == 0):
                sender = int(senders[int(f)])
                if not confirmed[sender, batch_n]:
                    confirmed[sender, batch_n] = True
                    n_confirmed_cells += 1
                    if confirmed[sender].all():
                        gw.confirmed_updated.add(sender)
            eligible &= ~decoded[:, batch_n]
            eligible &= ~fully
            if recorder is not None:
                full = recorder.full
                for f, (ed_id, seq) in enumerate(txs):
                    recorder.frames.append(
                        TraceFrame(
                            frame_index=n,
                            superslot=s,
                            frame=Frame(
                                origin="ed",
                                origin_id=ed_id,
                                kind="d2d",
                                sf=slots.sf_d2d,
                                channel=channel,
                                start_s=t0s,
                                duration_s=dur_d2d,
                                tx_power_dbm=phy.tx_power_ed_dbm,
                                seq=seq,
                                batch=batch_n,
                            ),
                            outcomes=tuple(
                                (int(rx), int(codes[f, col]))
                                for col, rx in enumerate(rx_ids)
                            )
                            if full
                            else None,
                        )
                    )
                if full and listeners.size:
                    recorder.listens.append(
                        ListenEvent(n, s, tuple(int(r) for r in listeners), e_p * t_p)
                    )
        scan(prev, s_window)

    # --- finalize ----------------------------------------------------------
    for i, state in enumerate(eds):
        state.tx_seconds = float(tx_time[i])
        state.rx_seconds = float(rx_time[i])
        state.completion_s = None if np.isnan(completion[i]) else float(completion[i])
    return RunResult(
        scheme=config.scheme,
        seed=streams.entropy,
        distances=distances,
        completion_s=completion,
        decoded=fully.copy(),
        tx_seconds=tx_time,
        rx_seconds=rx_time,
        energy_j=np.asarray(energy_joules(tx_time, rx_time, energy)),
        frames_sent=gw.frames_sent,
        d2d_frames_sent=d2d_frames_sent,
        session_end_s=session_end_s,
        trace=recorder,
        config=config,
    )


def run_replications(
    config: SimConfig, master_seed: int | None = None, trace: bool | str = False
) -> list[RunResult]:
    """Independent replications with per-run seed streams from the master seed."""
    seed = config.master_seed if master_seed is None else master_seed
    children = np.random.SeedSequence(seed).spawn(config.n_runs)
    results = []
    for i, child in enumerate(children):
        result = run_once(config, child, trace=trace)
        result.run_index = i
        results.append(result)
    return results


def write_raw_csv(results: list[RunResult], fileobj) -> None:
    """Per-(run, ED) rows for the whole replication set."""
    fileobj.write(",".join(RAW_CSV_COLUMNS) + "\n")
    for res in results:
        for i in range(len(res.distances)):
            completion = "" if np.isnan(res.completion_s[i]) else repr(
                float(res.completion_s[i])
            )
            fileobj.write(
                f"{res.run_index},{i},{res.distances[i]!r},{completion},"
                f"{res.tx_seconds[i]!r},{res.rx_seconds[i]!r},"
                f"{res.energy_j[i]!r},{int(res.decoded[i])}\n"
            )
