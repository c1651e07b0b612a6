"""Named experiment scenarios and sweeps that emit fixed-schema CSV rows."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .errors import ConfigError
from .profiles import ModelProfile
from .simulator import ClientKind, Job, Mode, SimConfig, SimMetrics, run

CSV_HEADER = (
    "scenario", "mode", "model", "batch", "bandwidth_bps", "tenants", "split_index",
    "epoch_time_s", "bytes_per_iter", "peak_cos_mem", "peak_client_mem",
    "makespan_s", "avg_jct_s", "oom_events",
)

TABLE4_GBPS = (0.05, 0.1, 0.5, 1, 2, 3, 5, 10, 12)
FIG8_GBPS = TABLE4_GBPS
FIG9_BATCHES = (1000, 2000, 3000, 4000, 5000, 6000, 7000, 8000)
FIG10_TENANTS = tuple(range(1, 11))
FIG11_BATCHES = FIG9_BATCHES


def gbps(x: float) -> float:
    """Gigabits per second to bytes per second."""
    return x * 1e9 / 8


@dataclass
class ScenarioSpec:
    name: str
    axis: str                            # bandwidth | batch | tenants
    values: tuple
    modes: tuple = (Mode.SPLIT,)
    model: str = "alexnet"
    batch: int = 8000
    tenants: int = 1
    dataset_samples: int = 16000
    client_kind: ClientKind = ClientKind.GPU
    config: SimConfig = field(default_factory=SimConfig)
    variants: tuple = ((None, {}),)      # (label suffix, SimConfig overrides)


def _registry() -> dict[str, ScenarioSpec]:
    return {
        "table4-split-index": ScenarioSpec(
            name="table4-split-index", axis="bandwidth", values=tuple(gbps(g) for g in TABLE4_GBPS),
            batch=8000, dataset_samples=8000,
        ),
        "fig8-bandwidth-sweep": ScenarioSpec(
            name="fig8-bandwidth-sweep", axis="bandwidth", values=tuple(gbps(g) for g in FIG8_GBPS),
            modes=(Mode.SPLIT, Mode.BASELINE), batch=8000, dataset_samples=32000,
            client_kind=ClientKind.CPU,
        ),
        "fig9-batch-sweep": ScenarioSpec(
            name="fig9-batch-sweep", axis="batch", values=FIG9_BATCHES,
            modes=(Mode.SPLIT, Mode.BASELINE), dataset_samples=40000, client_kind=ClientKind.CPU,
        ),
        # one AlexNet-like model for every tenant, no client-side compute, two
        # iterations in flight per client
        "fig10-scalability": ScenarioSpec(
            name="fig10-scalability", axis="tenants", values=FIG10_TENANTS,
            modes=(Mode.SPLIT, Mode.ALL_IN_COS), batch=1000, dataset_samples=10000,
            config=SimConfig(client_compute=False, prefetch_depth=2),
        ),
        "fig11-batch-adaptation": ScenarioSpec(
            name="fig11-batch-adaptation", axis="batch", values=FIG11_BATCHES,
            dataset_samples=16000,
            variants=(("ba-on", {"batch_adaptation": True}), ("ba-off", {"batch_adaptation": False})),
        ),
    }


SCENARIOS = _registry()


def get_scenario(name: str) -> ScenarioSpec:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise ConfigError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}") from None


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(round(value, 6))
    return str(value)


def metrics_row(scenario: str, mode: str, model: str, batch: int, bandwidth_bytes_per_sec: float,
                tenants: int, m: SimMetrics) -> dict:
    jobs = m.jobs
    splits = sorted({j.split_index for j in jobs if j.split_index is not None})
    epoch = [j.epoch_time_s for j in jobs if j.epoch_time_s is not None]
    return {
        "scenario": scenario,
        "mode": mode,
        "model": model,
        "batch": batch,
        "bandwidth_bps": round(bandwidth_bytes_per_sec * 8),
        "tenants": tenants,
        "split_index": splits[0] if len(splits) == 1 else (";".join(map(str, splits)) or None),
        "epoch_time_s": (sum(epoch) / len(epoch)) if epoch else None,
        "bytes_per_iter": m.avg_bytes_per_iteration if m.completed else None,
        "peak_cos_mem": m.peak_cos_mem_bytes,
        "peak_client_mem": m.peak_client_mem_bytes,
        "makespan_s": m.makespan_s if m.completed else None,
        "avg_jct_s": m.avg_jct_s if m.completed else None,
        "oom_events": m.oom_events,
    }


@dataclass
class SweepResult:
    rows: list
    metrics: list                        # SimMetrics aligned with rows


def sweep(
    spec: ScenarioSpec,
    values: Optional[Sequence] = None,
    overrides: Optional[Mapping] = None,
    profiles: Optional[Mapping[str, ModelProfile]] = None,
) -> SweepResult:
    """Run one simulation per (variant, mode, axis value) and collect CSV rows."""
    values = spec.values if values is None else tuple(values)
    base = replace(spec.config, **dict(overrides or {}))
    rows, metrics = [], []
    for suffix, extra in spec.variants:
        for mode in spec.modes:
            for v in values:
                batch, tenants, bw = spec.batch, spec.tenants, base.bandwidth_bytes_per_sec
                if spec.axis == "bandwidth":
                    bw = float(v)
                elif spec.axis == "batch":
                    batch = int(v)
                elif spec.axis == "tenants":
                    tenants = int(v)
                else:
                    raise ConfigError(f"unknown sweep axis {spec.axis!r}")
                cfg = replace(base, mode=mode, bandwidth_bytes_per_sec=bw, **extra)
                dataset = max(spec.dataset_samples, batch)
                jobs = [Job(tenant=i, profile=spec.model, training_batch=batch, dataset_samples=dataset,
                            client_kind=spec.client_kind) for i in range(tenants)]
                m = run(cfg, jobs, profiles)
                label = mode.value if suffix is None else f"{mode.value}:{suffix}"
                rows.append(metrics_row(spec.name, label, spec.model, batch, bw, tenants, m))
                metrics.append(m)
    return SweepResult(rows=rows, metrics=metrics)


def write_csv(rows: Iterable[Mapping], out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([_fmt(r.get(k)) for k in CSV_HEADER])


def rows_to_csv(rows: Iterable[Mapping]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()
