"""Command-line entry point: ``ndsplit <subcommand> ...``.

Exit status is 0 on success, 2 for invalid input (bad flags, malformed JSON,
unknown scenario or profile) and 1 for failures while running.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from dataclasses import asdict, replace
from typing import Optional, Sequence

from .batch_adapt import AdaptCoordinator, AdaptRequest, adapt_batches
from .cost_model import (CostParams, PlanPoint, SearchBounds, brute_force_optimum, client_time, cos_time,
                         epoch_time, feasible, transfer_time)
from .errors import ConfigError, FramingError, InvalidArgumentError, InvalidProfileError, NdsplitError
from .profiles import BUILTIN_MODELS, load_builtin, load_profile_dir, resolve_profile
from .simulator import ClientKind, Job, Mode, SimConfig, SimMetrics, run
from .splitter import choose_split_index

log = logging.getLogger("ndsplit")

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2

_SI = {"": 1, "k": 1e3, "m": 1e6, "g": 1e9, "t": 1e12}
_BIN = {"ki": 2**10, "mi": 2**20, "gi": 2**30, "ti": 2**40}


class UsageError(Exception):
    pass


def parse_bandwidth(text: str) -> float:
    """Bits per second with optional SI prefix (``1Gbps``, ``500M``, ``1e9``) -> bytes per second."""
    m = re.fullmatch(r"\s*([0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\s*([kKmMgGtT]?)(?:bps|b/s|bit/s)?\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"invalid bandwidth {text!r}")
    bits = float(m.group(1)) * _SI[m.group(2).lower()]
    if not bits > 0:
        raise argparse.ArgumentTypeError("bandwidth must be positive")
    return bits / 8


def parse_bytes(text: str) -> int:
    """Byte count with optional SI (``16GB``) or binary (``16GiB``) suffix."""
    m = re.fullmatch(r"\s*([0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\s*([kKmMgGtT]i?)?[bB]?\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"invalid byte size {text!r}")
    unit = (m.group(2) or "").lower()
    scale = _BIN[unit] if unit.endswith("i") else _SI[unit]
    return int(round(float(m.group(1)) * scale))


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text) if text.lstrip("-").isdigit() else None
    if v is None or v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return v


def _dump(obj, out=None) -> None:
    out = out or sys.stdout
    out.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON: {exc}") from None
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None


def _profile(args):
    return resolve_profile(args.profile, getattr(args, "profiles_dir", None))


# -- split -------------------------------------------------------------------------

def cmd_split(args) -> int:
    profile = _profile(args)
    d = choose_split_index(profile, args.batch, args.bandwidth, args.threshold)
    if args.json:
        _dump({"split_index": d.split_index, "bytes_per_iteration": d.bytes_per_iteration,
               "candidates": list(d.candidates), "used_fallback": d.used_fallback})
    else:
        print(d.split_index)
    return EXIT_OK


# -- adapt -------------------------------------------------------------------------

def cmd_adapt(args) -> int:
    doc = _read_json(args.requests)
    available = args.available
    if isinstance(doc, dict):
        if available is None:
            available = doc.get("available_bytes")
        doc = doc.get("requests")
    if not isinstance(doc, list):
        raise UsageError("expected a list of requests (or an object with a 'requests' list)")
    if not isinstance(available, int) or isinstance(available, bool) or available < 0:
        raise UsageError("available bytes missing or invalid (pass --available or 'available_bytes')")
    try:
        reqs = [AdaptRequest(**r) for r in doc]
    except TypeError as exc:
        raise UsageError(f"bad request entry: {exc}") from None
    res = adapt_batches(reqs, available, args.step)
    _dump({"assigned": {str(k): v for k, v in res.assigned.items()},
           "deferred": res.deferred, "memory_used_bytes": res.memory_used_bytes,
           "available_bytes": available})
    return EXIT_OK


# -- cost --------------------------------------------------------------------------

def cmd_cost(args) -> int:
    doc = _read_json(args.params)
    if not isinstance(doc, dict):
        raise UsageError("cost params must be a JSON object")
    known = set(CostParams.__dataclass_fields__)
    extra = set(doc) - known - {"plan", "bounds"}
    if extra:
        raise UsageError(f"unknown cost params {sorted(extra)}")
    try:
        params = CostParams(**{k: v for k, v in doc.items() if k in known})
    except TypeError as exc:
        raise UsageError(f"bad cost params: {exc}") from None
    profile = _profile(args)
    out = {"profile": profile.name}
    plan_doc = doc.get("plan")
    if args.plan:
        l, b, bc = (int(x) for x in args.plan.split(","))
        plan_doc = {"l_cos": l, "b_cos": b, "b_client": bc}
    if plan_doc is not None:
        plan = PlanPoint(**plan_doc)
        out["plan"] = asdict(plan)
        out["cos_time"] = cos_time(params, profile, plan)
        out["transfer_time"] = transfer_time(params, profile, plan)
        out["client_time"] = client_time(params, profile, plan)
        out["epoch_time"] = epoch_time(params, profile, plan)
        out["feasible"] = feasible(params, profile, plan)
    if args.optimize or plan_doc is None:
        bounds = SearchBounds(**doc.get("bounds", {}))
        res = brute_force_optimum(params, profile, bounds)
        out["optimum"] = {"feasible": res.feasible,
                          "plan": asdict(res.plan) if res.plan else None,
                          "time": res.time if res.feasible else None}
    _dump(out)
    return EXIT_OK


# -- simulate / sweep ----------------------------------------------------------------

def _config_overrides(args) -> dict:
    o = {}
    for flag, key in (("gpus", "gpu_count"), ("gpu_mem", "gpu_mem_bytes_per_gpu"),
                      ("reserved_mem", "reserved_mem_bytes"), ("seed", "seed"),
                      ("bandwidth", "bandwidth_bytes_per_sec")):
        v = getattr(args, flag, None)
        if v is not None:
            o[key] = v
    if getattr(args, "no_adaptation", False):
        o["batch_adaptation"] = False
    return o


def metrics_to_dict(m: SimMetrics) -> dict:
    return {
        "jobs": [
            {"tenant": j.tenant, "profile": j.profile, "mode": j.mode.value, "split_index": j.split_index,
             "iterations": j.iterations, "epoch_time_s": j.epoch_time_s,
             "bytes_per_iteration": j.bytes_per_iteration if not j.failed else None,
             "client_mem_bytes": j.client_mem_bytes, "failed": j.failed, "failure": j.failure}
            for j in m.jobs
        ],
        "avg_bytes_per_iteration": m.avg_bytes_per_iteration,
        "peak_cos_mem_bytes": m.peak_cos_mem_bytes,
        "peak_client_mem_bytes": m.peak_client_mem_bytes,
        "makespan_s": m.makespan_s,
        "avg_jct_s": m.avg_jct_s,
        "oom_events": m.oom_events,
        "requests_total": m.requests_total,
        "requests_reduced": m.requests_reduced,
        "avg_batch_reduction": m.avg_batch_reduction,
        "max_coresident": m.max_coresident,
    }


def cmd_simulate(args) -> int:
    from .scenarios import get_scenario

    profiles = load_profile_dir(args.profiles_dir) if args.profiles_dir else None
    if args.scenario:
        spec = get_scenario(args.scenario)
        base = replace(spec.config, **_config_overrides(args))
        model, batch, tenants = spec.model, spec.batch, spec.tenants
        dataset, kind = spec.dataset_samples, spec.client_kind
        mode = Mode(args.mode) if args.mode else spec.modes[0]
    else:
        base = replace(SimConfig(), **_config_overrides(args))
        model, batch, tenants, dataset = "alexnet", 1000, 1, 10000
        kind = ClientKind.GPU
        mode = Mode(args.mode or Mode.SPLIT)
    if args.profile:
        model = args.profile
    if args.batch is not None:
        batch = args.batch
    if args.tenants is not None:
        tenants = args.tenants
    if args.dataset_samples is not None:
        dataset = args.dataset_samples
    if args.client_kind:
        kind = ClientKind(args.client_kind)
    cfg = replace(base, mode=mode)
    if profiles is None and model.lower() not in BUILTIN_MODELS:
        profile = resolve_profile(model)
        profiles = {profile.name: profile}
        model = profile.name
    jobs = [Job(tenant=i, profile=model, training_batch=batch, dataset_samples=max(dataset, batch),
                client_kind=kind) for i in range(tenants)]
    m = run(cfg, jobs, profiles)
    doc = metrics_to_dict(m)
    doc.update({"scenario": args.scenario, "mode": mode.value, "model": model, "batch": batch,
                "tenants": tenants})
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            _dump(doc, f)
    else:
        _dump(doc)
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .scenarios import get_scenario, sweep, write_csv

    spec = get_scenario(args.scenario)
    profiles = load_profile_dir(args.profiles_dir) if args.profiles_dir else None
    values = None
    if args.values:
        items = args.values.split(",")
        try:
            values = [parse_bandwidth(v) if spec.axis == "bandwidth" else int(v) for v in items]
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"bad --values: {exc}") from None
    changes = {}
    if args.profile:
        changes["model"] = args.profile
    if args.batch is not None and spec.axis != "batch":
        changes["batch"] = args.batch
    if args.tenants is not None and spec.axis != "tenants":
        changes["tenants"] = args.tenants
    if changes:
        spec = replace(spec, **changes)
    overrides = _config_overrides(args)
    if spec.axis == "bandwidth":
        overrides.pop("bandwidth_bytes_per_sec", None)
    result = sweep(spec, values, overrides, profiles)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            write_csv(result.rows, f)
    else:
        write_csv(result.rows, sys.stdout)
    return EXIT_OK


# -- serve / client ------------------------------------------------------------------

def _profiles_for_server(args) -> dict:
    directory = args.profiles_dir
    if directory:
        profiles = load_profile_dir(directory)
        if not profiles:
            raise UsageError(f"no *.json profiles found in {directory}")
        return profiles
    return {name: load_builtin(name) for name in BUILTIN_MODELS}


def cmd_serve(args) -> int:
    from .protocol import SplitServer, ObjectStore, parse_endpoint

    try:
        host, port = parse_endpoint(args.bind)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    profiles = _profiles_for_server(args)
    gpu_mem = args.gpu_mem if args.gpu_mem is not None else 16 * 2**30
    reserved = args.reserved_mem if args.reserved_mem is not None else 2 * 2**30
    coord = AdaptCoordinator(gpu_count=args.gpus or 2, capacity_bytes=gpu_mem - reserved,
                             wait_window_s=args.wait_window_ms / 1000, concurrency_cap=args.cap)
    store = ObjectStore.with_dataset(args.dataset_samples, args.object_size)
    srv = SplitServer(profiles, store, coord)
    log.info("serving %d profiles, %d objects on %s:%d", len(profiles), len(store), host, port)
    srv.start(host, port)
    h, p = srv.address
    print(f"listening on {h}:{p}", flush=True)
    try:
        _wait_forever()
    except KeyboardInterrupt:
        pass
    finally:
        srv.stop()
    return EXIT_OK


def _wait_forever() -> None:
    import time
    while True:
        time.sleep(3600)


def cmd_client(args) -> int:
    import csv
    from .protocol import client_run_iteration

    profile = _profile(args)
    decision = choose_split_index(profile, args.batch, args.bandwidth)
    iterations = args.iterations or max(1, args.dataset_samples // args.batch)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["iteration", "requests", "split_index", "bytes_received", "expected_bytes",
                     "cos_batches", "elapsed_s"])
    for k in range(iterations):
        r = client_run_iteration(profile, decision, args.endpoint, args.batch, iteration=k,
                                 object_size_samples=args.object_size)
        writer.writerow([k, r.requests, decision.split_index, r.bytes_received, decision.bytes_per_iteration,
                         ";".join(map(str, r.cos_batches)), f"{r.elapsed_s:.6f}"])
    return EXIT_OK


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ndsplit", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def profile_flags(sp, required=True):
        sp.add_argument("--profile", required=required, help="profile JSON path or bundled name")
        sp.add_argument("--profiles-dir", default=None, help="directory of profile JSONs (default $NDS_PROFILE_DIR)")

    def sim_flags(sp):
        sp.add_argument("--scenario", default=None)
        sp.add_argument("--batch", type=_positive_int, default=None)
        sp.add_argument("--bandwidth", type=parse_bandwidth, default=None, help="bits/s, e.g. 1Gbps")
        sp.add_argument("--gpus", type=_positive_int, default=None)
        sp.add_argument("--gpu-mem", type=parse_bytes, default=None, help="per-GPU memory, e.g. 16GiB")
        sp.add_argument("--reserved-mem", type=parse_bytes, default=None, help="per-GPU reserved memory")
        sp.add_argument("--mode", choices=[m.value for m in Mode], default=None)
        sp.add_argument("--tenants", type=_nonneg_int, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--no-adaptation", action="store_true")

    sp = sub.add_parser("split", help="choose the split index for a job")
    profile_flags(sp)
    sp.add_argument("--batch", type=_positive_int, required=True)
    sp.add_argument("--bandwidth", type=parse_bandwidth, required=True, help="bits/s, e.g. 1e9 or 1Gbps")
    sp.add_argument("--threshold", type=float, default=1.0, help="transfer budget in seconds")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_split)

    sp = sub.add_parser("adapt", help="assign storage batch sizes to a request list")
    sp.add_argument("--requests", required=True, help="JSON file ('-' for stdin)")
    sp.add_argument("--available", type=parse_bytes, default=None)
    sp.add_argument("--step", type=_positive_int, default=25)
    sp.set_defaults(func=cmd_adapt)

    sp = sub.add_parser("cost", help="evaluate or optimize the analytical epoch-time model")
    profile_flags(sp)
    sp.add_argument("--params", required=True, help="JSON file of cost constants")
    sp.add_argument("--plan", default=None, help="L_COS,B_COS,B_CLIENT")
    sp.add_argument("--optimize", action="store_true")
    sp.set_defaults(func=cmd_cost)

    sp = sub.add_parser("simulate", help="run one simulation and print metrics as JSON")
    profile_flags(sp, required=False)
    sim_flags(sp)
    sp.add_argument("--dataset-samples", type=_nonneg_int, default=None)
    sp.add_argument("--client-kind", choices=[k.value for k in ClientKind], default=None)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="run a named scenario sweep and write CSV")
    profile_flags(sp, required=False)
    sim_flags(sp)
    sp.add_argument("--values", default=None, help="comma-separated axis values")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("serve", help="run the reference storage-side server")
    sp.add_argument("--bind", default="127.0.0.1:7070")
    sp.add_argument("--profiles", dest="profiles_dir", default=None, help="directory of profile JSONs")
    sp.add_argument("--profiles-dir", dest="profiles_dir", help=argparse.SUPPRESS)
    sp.add_argument("--dataset-samples", type=_nonneg_int, default=100_000)
    sp.add_argument("--object-size", type=_positive_int, default=1000)
    sp.add_argument("--gpus", type=_positive_int, default=None)
    sp.add_argument("--gpu-mem", type=parse_bytes, default=None)
    sp.add_argument("--reserved-mem", type=parse_bytes, default=None)
    sp.add_argument("--wait-window-ms", type=float, default=5.0)
    sp.add_argument("--cap", type=_positive_int, default=8, help="concurrent requests per server")
    sp.set_defaults(func=cmd_serve)

    sp = sub.add_parser("client", help="drive iterations against a running server")
    sp.add_argument("--endpoint", required=True)
    sp.add_argument("--model", dest="profile", required=True)
    sp.add_argument("--profiles-dir", default=None)
    sp.add_argument("--batch", type=_positive_int, required=True)
    sp.add_argument("--bandwidth", type=parse_bandwidth, required=True)
    sp.add_argument("--dataset-samples", type=_positive_int, required=True)
    sp.add_argument("--iterations", type=_positive_int, default=None)
    sp.add_argument("--object-size", type=_positive_int, default=1000)
    sp.set_defaults(func=cmd_client)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError, InvalidArgumentError, InvalidProfileError, FramingError) as exc:
        print(f"ndsplit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NdsplitError, OSError) as exc:
        print(f"ndsplit: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
