"""Acceptance suite: headline claims checked at their stated tolerances.

Every stochastic criterion uses 20 replications with a fixed master seed.
Run with ``pytest tests/test_acceptance.py -v -s`` to get one PASS/FAIL line
per criterion alongside the measured values.
"""

import numpy as np

from d2dcast.coding import (
    CodingParams,
    d2d_sequence,
    decode_attempt,
    max_supported_eds,
)
from d2dcast.engine import SimConfig, run_once, run_replications
from d2dcast.metrics import EnergyParams, aggregate, cell_edge, energy_joules
from d2dcast.phy import PhyParams, airtime
from d2dcast.protocol import num_d2d_frames, success_ratio
from d2dcast.scenarios import PRESETS, apply_overrides, preset_scenario
from d2dcast.scheduler import (
    SlotPlanParams,
    build_slot_plan,
    d2d_superslot_len,
    d2d_window_size,
    downlink_sf_at,
    downlink_superslot_len,
    silent_slots,
)

ACCEPT_SEED = 20260811
ACCEPT_RUNS = 20

_CACHE: dict = {}


def replications(**overrides):
    """Replication set for the default scenario plus overrides, cached."""
    key = tuple(sorted(overrides.items()))
    if key not in _CACHE:
        cfg_kwargs = {}
        if "s_star" in overrides:
            cfg_kwargs["slots"] = SlotPlanParams(
                max_window_superslots=overrides["s_star"]
            )
        if "sf_d2d" in overrides:
            cfg_kwargs["slots"] = SlotPlanParams(sf_d2d=overrides["sf_d2d"])
        if overrides.get("batched"):
            cfg_kwargs["coding"] = CodingParams(
                n_batches=5, batch_frames_max=5, batch_frames_min=2
            )
            cfg_kwargs["phy"] = PhyParams(shadow_sigma_db=8.0)
        cfg = SimConfig(
            scheme=overrides.get("scheme", "d2d"),
            n_ed=overrides.get("n_ed", 400),
            n_runs=ACCEPT_RUNS,
            master_seed=ACCEPT_SEED,
            **cfg_kwargs,
        )
        _CACHE[key] = (cfg, run_replications(cfg))
    return _CACHE[key]


def edge_stat(**overrides):
    cfg, results = replications(**overrides)
    stats = aggregate(results, cfg.bin_width_m, cfg.energy, cfg.cell_radius_m)
    return cfg, results, cell_edge(stats), stats


def report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_headline_speedup():
    _, _, edge_d2d, _ = edge_stat(scheme="d2d")
    _, _, edge_fsf, _ = edge_stat(scheme="fsf-12")
    d2d_h = edge_d2d.mean_completion_s / 3600.0
    fsf_h = edge_fsf.mean_completion_s / 3600.0
    ratio = fsf_h / d2d_h
    report(
        "headline speedup",
        d2d_h <= 2.0 and fsf_h >= 20.0 and ratio >= 10.0,
        f"edge completion d2d={d2d_h:.2f} h (<=2), fsf-12={fsf_h:.1f} h (>=20), "
        f"ratio={ratio:.1f}x (>=10)",
    )


def test_psi_equivalence():
    cfg_d, runs_d = replications(scheme="d2d")
    cfg_p, runs_p = replications(scheme="d2d-psi")
    equal = all(
        np.array_equal(a.completion_s, b.completion_s, equal_nan=True)
        for a, b in zip(runs_d, runs_p)
    )
    stats_d = aggregate(runs_d, cfg_d.bin_width_m, cfg_d.energy, cfg_d.cell_radius_m)
    stats_p = aggregate(runs_p, cfg_p.bin_width_m, cfg_p.energy, cfg_p.cell_radius_m)
    dominated = all(
        p.mean_activity_s <= d.mean_activity_s + 1e-9
        for d, p in zip(stats_d, stats_p)
        if d.n
    )
    report(
        "PSI equivalence",
        equal and dominated,
        f"completions identical across {ACCEPT_RUNS} seeded runs: {equal}; "
        f"activity dominated in every distance bin: {dominated}",
    )


def test_edge_activity_reduction():
    _, _, edge_d2d, _ = edge_stat(scheme="d2d")
    _, _, edge_fsf, _ = edge_stat(scheme="fsf-12")
    _, _, edge_gl, _ = edge_stat(scheme="gl-msf")
    vs_fsf = edge_d2d.mean_activity_s / edge_fsf.mean_activity_s
    vs_gl = edge_d2d.mean_activity_s / edge_gl.mean_activity_s
    report(
        "edge activity reduction",
        vs_fsf <= 0.5 and vs_gl <= 0.5,
        f"edge activity d2d={edge_d2d.mean_activity_s:.0f} s = "
        f"{vs_fsf:.0%} of fsf-12, {vs_gl:.0%} of gl-msf (bar: <=50%)",
    )


def test_sstar_and_ned_trends():
    sstar_values = (1, 2, 5, 10, 20)
    sstar_edge = []
    for s in sstar_values:
        kwargs = {"s_star": s} if s != 20 else {}
        _, _, edge, _ = edge_stat(scheme="d2d", **kwargs)
        sstar_edge.append(edge.mean_completion_s)
    sstar_ok = all(
        nxt <= prev * 1.05 for prev, nxt in zip(sstar_edge, sstar_edge[1:])
    )
    ned_values = (200, 400, 600)
    ned_edge = []
    for n in ned_values:
        kwargs = {"n_ed": n} if n != 400 else {}
        _, _, edge, _ = edge_stat(scheme="d2d", **kwargs)
        ned_edge.append(edge.mean_completion_s)
    ned_ok = all(nxt <= prev * 1.05 for prev, nxt in zip(ned_edge, ned_edge[1:]))
    fmt = lambda xs: ", ".join(f"{x / 60:.1f}" for x in xs)
    report(
        "S*/N_ED trends",
        sstar_ok and ned_ok,
        f"edge completion over S*={sstar_values}: [{fmt(sstar_edge)}] min "
        f"(non-increasing: {sstar_ok}); over N_ED={ned_values}: "
        f"[{fmt(ned_edge)}] min (non-increasing: {ned_ok})",
    )


def test_sf_d2d_trend():
    edges = {}
    for sf in (7, 9, 12):
        kwargs = {"sf_d2d": sf} if sf != 10 else {}
        _, _, edge, _ = edge_stat(scheme="d2d", **kwargs)
        edges[sf] = edge.mean_completion_s
    gain_ok = edges[9] <= 0.6 * edges[7]
    drift = abs(edges[12] - edges[9]) / edges[9]
    report(
        "SF_D2D trend",
        gain_ok and drift <= 0.2,
        f"edge completion SF7={edges[7] / 60:.0f} min, SF9={edges[9] / 60:.0f} min "
        f"(<=60% of SF7: {gain_ok}), SF12 drift from SF9 = {drift:.0%} (<=20%)",
    )


def test_batched_energy_ordering():
    edges = {}
    for scheme in ("d2d", "fsf-12", "gl-msf"):
        _, _, edge, _ = edge_stat(scheme=scheme, batched=True)
        edges[scheme] = edge
    e_d2d = edges["d2d"].mean_energy_j
    e_fsf = edges["fsf-12"].mean_energy_j
    e_gl = edges["gl-msf"].mean_energy_j
    ordering = e_d2d < e_gl < e_fsf
    ratio = e_gl / e_d2d
    tx_ok = (
        edges["d2d"].mean_tx_energy_j > 0
        and edges["fsf-12"].mean_tx_energy_j == 0
        and edges["gl-msf"].mean_tx_energy_j == 0
    )
    report(
        "batched energy ordering",
        ordering and ratio >= 2.0 and tx_ok,
        f"cell-edge energy d2d={e_d2d:.1f} J < gl-msf={e_gl:.1f} J < "
        f"fsf-12={e_fsf:.1f} J: {ordering}; gl-msf/d2d={ratio:.1f}x (>=2); "
        f"benchmark tx energy exactly 0: {tx_ok}",
    )


def _check_trace_invariants(cfg: SimConfig, result) -> None:
    plan = build_slot_plan(
        cfg.coding.max_gateway_frames, cfg.effective_slots(), cfg.phy
    )
    assert (plan.g_p + plan.s_d2d * plan.e_p <= plan.w_p).all(), "window encroaches"
    duty = plan.airtime_s / (plan.w_p * cfg.slots.ping_slot_s)
    assert (duty <= cfg.slots.duty_cycle_pct / 100.0 + 1e-12).all(), "duty cycle"
    trace = result.trace
    seqs = [tf.frame.seq for tf in trace.frames]
    assert len(seqs) == len(set(seqs)), "sequence collision"
    per_window = set()
    for tf in trace.frames:
        if tf.frame.kind == "d2d":
            key = (tf.frame.origin_id, tf.frame_index)
            assert key not in per_window, "two D2D frames in one window"
            per_window.add(key)
    decode_time = {(e.ed_id, e.batch): e.time_s for e in trace.decodes}
    n_max, n_min = cfg.coding.per_batch_limits
    for e in trace.decodes:
        if e.n_d2d is not None:  # benchmark schemes schedule no D2D frames
            assert n_min <= e.n_d2d <= n_max, "N_D2D out of range"
        for sender in e.beta_senders:
            assert decode_time[(sender, e.batch)] < e.time_s, "beta not earlier"


def test_schedule_invariants_on_every_preset():
    checked = set()
    n_runs = 0
    for preset in PRESETS:
        scenario = preset_scenario(preset)
        for point in scenario.sweep:
            base = apply_overrides(scenario.config, point.overrides)
            for scheme in scenario.schemes:
                cfg = apply_overrides(base, {"scheme": scheme})
                key = (scheme, repr(cfg))
                if key in checked:
                    continue
                checked.add(key)
                seed = np.random.SeedSequence(ACCEPT_SEED).spawn(1)[0]
                result = run_once(cfg, seed, trace="frames")
                _check_trace_invariants(cfg, result)
                n_runs += 1
    report(
        "deterministic schedule invariants",
        True,
        f"non-encroachment, duty cycle, sequence uniqueness, one-frame-per-"
        f"window, beta ordering, N_D2D bounds hold over {n_runs} traced runs "
        f"covering all {len(PRESETS)} presets",
    )


def test_unit_oracles():
    phy = PhyParams()
    plan = SlotPlanParams()
    coding = CodingParams()
    checks = {
        "airtime sf12/50B in [2.2, 3.0]": 2.2 <= airtime(12, 50, phy) <= 3.0,
        "airtime sf10/50B": abs(airtime(10, 50, phy) - 0.575488) < 1e-9,
        "airtime sf12/0B": abs(airtime(12, 0, phy) - 0.663552) < 1e-9,
        "G_p sf12": downlink_superslot_len(12, plan, phy) == 77,
        "W_p sf12": silent_slots(12, plan, phy) == 7674,
        "W_p sf10": silent_slots(10, plan, phy) == 1919,
        "E_p sf10": d2d_superslot_len(plan, phy) == 20,
        "S_D2D star binds": d2d_window_size(7674, 77, 20, 20) == 20,
        "S_D2D budget binds": d2d_window_size(100, 60, 20, 20) == 2,
        "S_D2D empty": d2d_window_size(100, 100, 20, 20) == 0,
        "SF progression": (
            downlink_sf_at(0, 7, 300),
            downlink_sf_at(299, 7, 300),
            downlink_sf_at(300, 7, 300),
            downlink_sf_at(10_000, 7, 300),
        )
        == (7, 7, 8, 12),
        "success ratio": success_ratio(50, 0.25, 400) == 0.5,
        "frame count ceil": num_d2d_frames(0.5, 25, 10) == 13,
        "frame count clamp": (num_d2d_frames(0.0, 25, 10), num_d2d_frames(1.5, 25, 10))
        == (25, 10),
        "d2d sequence": d2d_sequence(2, 3, coding) == 10053,
        "max EDs": max_supported_eds(coding) == 2221,
        "energy": abs(energy_joules(10.0, 100.0, EnergyParams()) - 17.131) < 1e-9,
    }
    failed = [name for name, ok in checks.items() if not ok]
    report(
        "unit oracles",
        not failed,
        f"{len(checks)} closed-form checks exact" if not failed else f"failed: {failed}",
    )


def test_decode_model_statistics():
    n = 1_000_000
    rng = np.random.default_rng(ACCEPT_SEED)
    below = sum(decode_attempt(199, 200, rng) for _ in range(n))
    at_k = sum(decode_attempt(200, 200, rng) for _ in range(n))
    beyond = sum(decode_attempt(205, 200, rng) for _ in range(n))
    fail_below = 1.0 - below / n
    fail_at = 1.0 - at_k / n
    fail_beyond = 1.0 - beyond / n
    ok = (
        fail_below == 1.0
        and abs(fail_at - 0.85) < 0.005
        and abs(fail_beyond - 0.567) < 0.005
    )
    report(
        "decode-model statistics",
        ok,
        f"empirical failure rates over 1e6 trials: l<k -> {fail_below:.4f} (=1), "
        f"l=k -> {fail_at:.4f} (0.85 +/- 0.005), l>k -> {fail_beyond:.4f} "
        f"(0.567 +/- 0.005)",
    )
