"""Scenario configuration: nested config files, presets, sweeps, outputs.

A scenario names a base `SimConfig`, the schemes to run, and an optional
sweep (a list of labelled config overrides). Presets mirror the headline
experiments: distance-resolved scheme comparison, the S*/N_ED grid, the
D2D-SF sweep, and the batched-delivery scenario with its cell-edge energy
decomposition table.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .coding import CodingParams
from .engine import SimConfig, run_once, run_replications, write_raw_csv
from .interference import InterfererField
from .metrics import EnergyParams, aggregate, cell_edge, write_aggregate_csv
from .phy import PhyParams
from .scheduler import SlotPlanParams, build_slot_plan

PRESETS = ("default", "fig3", "fig4", "fig5", "fig6", "table2")


class ConfigError(ValueError):
    """Invalid scenario or simulation configuration; names the field."""


_SECTIONS = {
    "phy": PhyParams,
    "slots": SlotPlanParams,
    "coding": CodingParams,
    "interferers": InterfererField,
    "energy": EnergyParams,
}


def _build_section(cls, data: dict, path: str):
    known = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        if key not in known:
            raise ConfigError(f"unknown field {path}.{key}")
        if isinstance(value, list):
            value = tuple(
                tuple(v) if isinstance(v, list) else v for v in value
            )
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {path}: {exc}") from exc


def config_from_dict(data: dict) -> SimConfig:
    """Build a SimConfig from a nested mapping, rejecting unknown fields."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    known = {f.name for f in dataclasses.fields(SimConfig)}
    kwargs = {}
    for key, value in data.items():
        if key not in known:
            raise ConfigError(f"unknown field config.{key}")
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"config.{key} must be a mapping")
            kwargs[key] = _build_section(_SECTIONS[key], value, f"config.{key}")
        elif key == "processing_delay" and isinstance(value, list):
            kwargs[key] = tuple(value)
        else:
            kwargs[key] = value
    try:
        return SimConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def _plainify(value):
    if isinstance(value, tuple):
        return [_plainify(v) for v in value]
    if isinstance(value, dict):
        return {k: _plainify(v) for k, v in value.items()}
    return value


def config_to_dict(config: SimConfig) -> dict:
    """Nested plain mapping (lists, not tuples) round-trippable via YAML."""
    return _plainify(dataclasses.asdict(config))


def _merge(base: dict, overrides: dict) -> dict:
    out = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def apply_overrides(config: SimConfig, overrides: dict) -> SimConfig:
    if not overrides:
        return config
    return config_from_dict(_merge(config_to_dict(config), overrides))


def _nested_from_path(path: str, value) -> dict:
    parts = path.split(".")
    out: dict = {parts[-1]: value}
    for part in reversed(parts[:-1]):
        out = {part: out}
    return out


@dataclass(frozen=True)
class SweepPoint:
    label: str
    overrides: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    """One named experiment: base config x schemes x sweep points."""

    name: str
    config: SimConfig
    schemes: tuple[str, ...]
    sweep: tuple[SweepPoint, ...] = (SweepPoint(""),)
    energy_table: bool = False

    def __post_init__(self):
        if not self.schemes:
            raise ConfigError("scenario needs at least one scheme")
        if not self.sweep:
            raise ConfigError("scenario sweep must not be empty")


def _batched_config() -> SimConfig:
    return SimConfig(
        phy=PhyParams(shadow_sigma_db=8.0),
        coding=CodingParams(n_batches=5, batch_frames_max=5, batch_frames_min=2),
    )


def preset_scenario(name: str) -> Scenario:
    if name == "default":
        return Scenario("default", SimConfig(), ("d2d",))
    if name == "fig3":
        return Scenario(
            "fig3", SimConfig(), ("d2d", "d2d-psi", "fsf-12", "fsf-9", "gl-msf")
        )
    if name == "fig4":
        points = tuple(
            SweepPoint(
                f"s_star={s}_n_ed={n}",
                {"n_ed": n, "slots": {"max_window_superslots": s}},
            )
            for s in (1, 2, 5, 10, 20)
            for n in (200, 400, 600)
        )
        return Scenario("fig4", SimConfig(), ("d2d",), points)
    if name == "fig5":
        points = tuple(
            SweepPoint(f"sf_d2d={sf}", {"slots": {"sf_d2d": sf}})
            for sf in range(7, 13)
        )
        return Scenario("fig5", SimConfig(), ("d2d",), points)
    if name == "fig6":
        return Scenario("fig6", _batched_config(), ("d2d", "fsf-12", "gl-msf"))
    if name == "table2":
        return Scenario(
            "table2",
            _batched_config(),
            ("d2d", "fsf-12", "gl-msf"),
            energy_table=True,
        )
    raise ConfigError(f"unknown preset {name!r}; expected one of {PRESETS}")


def load_scenario(path: str | Path) -> Scenario:
    """Scenario from a YAML file; see README for the schema."""
    data = yaml.safe_load(Path(path).read_text())
    if not isinstance(data, dict):
        raise ConfigError("scenario file must contain a mapping")
    known = {"name", "schemes", "runs", "sweep", "config", "energy_table"}
    for key in data:
        if key not in known:
            raise ConfigError(f"unknown field {key}")
    config = config_from_dict(data.get("config", {}))
    if "runs" in data:
        config = apply_overrides(config, {"n_runs": int(data["runs"])})
    sweep: tuple[SweepPoint, ...] = (SweepPoint(""),)
    spec = data.get("sweep")
    if spec:
        if "axis" in spec:
            axis = spec["axis"]
            values = spec.get("values")
            if not values:
                raise ConfigError("sweep.values must be a non-empty list")
            short = axis.split(".")[-1]
            sweep = tuple(
                SweepPoint(f"{short}={v}", _nested_from_path(axis, v)) for v in values
            )
        elif "points" in spec:
            sweep = tuple(
                SweepPoint(p["label"], p.get("overrides", {})) for p in spec["points"]
            )
        else:
            raise ConfigError("sweep needs either axis/values or points")
    schemes = tuple(data.get("schemes", ("d2d",)))
    return Scenario(
        name=str(data.get("name", Path(path).stem)),
        config=config,
        schemes=schemes,
        sweep=sweep,
        energy_table=bool(data.get("energy_table", False)),
    )


def _stem(scenario: Scenario, scheme: str, point: SweepPoint) -> str:
    parts = [scenario.name, scheme]
    if point.label:
        parts.append(point.label)
    return "_".join(parts)


def run_scenario(
    scenario: Scenario,
    master_seed: int | None,
    out_dir: str | Path,
    runs: int | None = None,
    dump_trace: bool = False,
    dump_slot_plan: bool = False,
) -> list[Path]:
    """Execute every (scheme, sweep point) and write raw/aggregate CSVs.

    Deterministic filenames: <scenario>_<scheme>[_<axis>=<value>]_{raw,agg}.csv
    plus a config echo sidecar. Partial outputs are removed on failure.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        edge_rows: list[tuple[str, str, float, float, float]] = []
        for point in scenario.sweep:
            base = apply_overrides(scenario.config, point.overrides)
            if runs is not None:
                base = apply_overrides(base, {"n_runs": runs})
            for scheme in scenario.schemes:
                cfg = apply_overrides(base, {"scheme": scheme})
                results = run_replications(cfg, master_seed)
                stem = _stem(scenario, scheme, point)
                raw_path = out / f"{stem}_raw.csv"
                with raw_path.open("w") as f:
                    write_raw_csv(results, f)
                written.append(raw_path)
                stats = aggregate(
                    results, cfg.bin_width_m, cfg.energy, cfg.cell_radius_m
                )
                agg_path = out / f"{stem}_agg.csv"
                with agg_path.open("w") as f:
                    write_aggregate_csv(stats, f)
                written.append(agg_path)
                if scenario.energy_table:
                    edge = cell_edge(stats)
                    edge_rows.append(
                        (
                            scheme,
                            point.label,
                            edge.mean_tx_energy_j,
                            edge.mean_rx_energy_j,
                            edge.mean_energy_j,
                        )
                    )
                if dump_slot_plan:
                    plan = build_slot_plan(
                        cfg.coding.max_gateway_frames, cfg.effective_slots(), cfg.phy
                    )
                    plan_path = out / f"{stem}_slotplan.csv"
                    with plan_path.open("w") as f:
                        plan.write_csv(f)
                    written.append(plan_path)
                if dump_trace:
                    seed = cfg.master_seed if master_seed is None else master_seed
                    child = np.random.SeedSequence(seed).spawn(1)[0]
                    traced = run_once(cfg, child, trace="full")
                    trace_path = out / f"{stem}_trace.csv"
                    with trace_path.open("w") as f:
                        traced.trace.dump_csv(f)
                    written.append(trace_path)
        if scenario.energy_table:
            table_path = out / f"{scenario.name}_energy.csv"
            with table_path.open("w") as f:
                f.write("scheme,label,tx_energy_J,rx_energy_J,total_energy_J\n")
                for scheme, label, tx_j, rx_j, tot_j in edge_rows:
                    f.write(f"{scheme},{label},{tx_j!r},{rx_j!r},{tot_j!r}\n")
            written.append(table_path)
        echo_path = out / f"{scenario.name}_config.yaml"
        echo = {
            "scenario": scenario.name,
            "master_seed": (
                scenario.config.master_seed if master_seed is None else master_seed
            ),
            "schemes": list(scenario.schemes),
            "sweep": [p.label for p in scenario.sweep if p.label],
            "config": config_to_dict(
                scenario.config if runs is None
                else apply_overrides(scenario.config, {"n_runs": runs})
            ),
        }
        echo_path.write_text(yaml.safe_dump(echo, sort_keys=False))
        written.append(echo_path)
    except Exception:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    return written
