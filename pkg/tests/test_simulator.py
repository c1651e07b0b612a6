import math
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_profile
from ndsplit.errors import ConfigError, IncompleteIterationError
from ndsplit.profiles import build_memory_estimate, load_builtin
from ndsplit.simulator import ClientKind, Job, Mode, SimConfig, Simulator, reorder_results, run, sweep

GIB = 2**30


def toy(work_ns=1_000_000, out=10, inp=100, mem=0, weights=0):
    # two layers: the first does the work, the second is trainable
    return make_profile([out, 5], input_bytes=inp, freeze=1, gpu=[work_ns, 0], cpu=[work_ns, 0],
                        mems=[mem, 0], weights=[weights, 0], name="toy")


def one_job(profile, batch=1000, dataset=1000, kind=ClientKind.GPU, tenant=0):
    return Job(tenant=tenant, profile=profile.name, training_batch=batch, dataset_samples=dataset,
               client_kind=kind)


def test_infinite_bandwidth_single_request_is_pure_compute():
    p = toy(work_ns=2_000_000)
    cfg = SimConfig(bandwidth_bytes_per_sec=math.inf, wait_window_us=0, client_compute=False)
    m = run(cfg, [one_job(p)], {"toy": p})
    # 1000 samples x 2 ms on the storage GPU
    assert m.jobs[0].epoch_time_s == pytest.approx(2.0)
    assert m.requests_total == 1


def test_two_coresident_requests_take_twice_as_long():
    p = toy()
    cfg = SimConfig(gpu_count=1, bandwidth_bytes_per_sec=math.inf, wait_window_us=0, client_compute=False)
    solo = run(cfg, [one_job(p)], {"toy": p}).jobs[0].epoch_time_s
    pair = run(cfg, [one_job(p, tenant=0), one_job(p, tenant=1)], {"toy": p})
    assert pair.max_coresident == 2
    for j in pair.jobs:
        assert j.epoch_time_s == pytest.approx(2 * solo)


def test_baseline_client_oom_fails_job():
    p = toy(mem=10**6)
    cfg = SimConfig(mode=Mode.BASELINE, client_gpu_mem_bytes=10**8)
    m = run(cfg, [one_job(p)], {"toy": p})
    assert m.oom_events == 1
    assert m.jobs[0].failed and m.jobs[0].epoch_time_s is None


def test_unknown_profile_is_config_error():
    with pytest.raises(ConfigError):
        run(SimConfig(), [Job(0, "nope", 1000, 1000)])


def test_split_batch_must_be_post_multiple():
    with pytest.raises(ConfigError):
        run(SimConfig(), [Job(0, "alexnet", 1500, 3000)])
    # other modes have no such restriction
    run(SimConfig(mode=Mode.BASELINE), [Job(0, "alexnet", 1500, 3000)])


def test_config_validation():
    with pytest.raises(ConfigError):
        SimConfig(gpu_count=0).validate()
    with pytest.raises(ConfigError):
        SimConfig(object_size_samples=0).validate()
    with pytest.raises(ConfigError):
        SimConfig(reserved_mem_bytes=16 * GIB).validate()


def test_requests_per_iteration(alexnet):
    m = run(SimConfig(), [Job(0, "alexnet", 3000, 9000)])
    assert m.requests_total == 9
    assert m.jobs[0].iterations == 3


def test_response_bytes_match_split(alexnet):
    m = run(SimConfig(), [Job(0, "alexnet", 3000, 9000)])
    j = m.jobs[0]
    assert j.split_index == 13
    assert j.bytes_per_iteration == 105_600_000


def test_empty_job_list():
    m = run(SimConfig(), [])
    assert m.jobs == [] and m.makespan_s == 0 and m.avg_jct_s == 0


def test_order_preserved_between_split_and_baseline():
    jobs = [Job(0, "alexnet", 4000, 12000)]
    split = run(SimConfig(record_samples=True, storage_read_jitter_us=50_000, seed=3), jobs)
    base = run(SimConfig(mode=Mode.BASELINE, record_samples=True), jobs)
    # regroup Baseline's one range per iteration into object-size pieces
    pieces = [(lo, min(lo + 1000, hi)) for lo, hi in base.jobs[0].sample_stream for lo in range(lo, hi, 1000)]
    assert split.jobs[0].sample_stream == pieces
    assert pieces[0] == (0, 1000) and pieces[-1] == (11000, 12000)


def _checked_run(cfg, jobs, profiles=None):
    """Run while asserting per-event invariants through a subclass hook."""
    violations = []

    class Checked(Simulator):
        def _start_task(self, g, task, b):
            super()._start_task(g, task, b)
            if self.mode == Mode.SPLIT and self.config.batch_adaptation and g.used > g.capacity:
                violations.append(("memory", self.now, g.index, g.used))
            if self.server_running > self.config.concurrency_cap:
                violations.append(("cap", self.now, self.server_running))

        def _on_window(self, g, token):
            super()._on_window(g, token)
            # work conservation: after a round, an idle GPU has nothing it could run
            if token == g.window_token or g.window_start is None:
                if not g.running and g.queue and self._room_for(g) > 0:
                    head = g.queue[0]
                    if head.charge_model + head.b_min * head.charge_per_sample <= g.capacity - g.used:
                        if not any(e[2] == "read_done" and e[3][0] is g for e in self._events):
                            violations.append(("idle", self.now, g.index))

        def _room_for(self, g):
            return min(self.config.concurrency_cap - self.server_running,
                       self._per_gpu_cap - self._resident(g))

    m = Checked(cfg, profiles).run(jobs)
    return m, violations


@pytest.mark.parametrize("tenants", [1, 3, 7, 10])
def test_memory_cap_and_work_conservation(tenants):
    jobs = [Job(i, "alexnet", 2000, 6000) for i in range(tenants)]
    m, violations = _checked_run(SimConfig(), jobs)
    assert violations == []
    assert m.oom_events == 0
    cap = SimConfig().gpu_capacity_bytes
    assert all(peak <= cap for peak in m.peak_gpu_mem_bytes)
    assert m.max_coresident <= SimConfig().concurrency_cap


def test_adaptation_contrast():
    jobs = [Job(0, "alexnet", 8000, 16000)]
    on = run(SimConfig(batch_adaptation=True), jobs)
    off = run(SimConfig(batch_adaptation=False), jobs)
    assert on.oom_events == 0 and not on.jobs[0].failed
    assert off.oom_events >= 1 and off.jobs[0].failed
    assert on.reduced_fraction >= 0.2


def test_all_in_cos_single_task_oom():
    p = toy(mem=10**9)
    cfg = SimConfig(mode=Mode.ALL_IN_COS, gpu_mem_bytes_per_gpu=4 * GIB, reserved_mem_bytes=0)
    m = run(cfg, [one_job(p)], {"toy": p})
    assert m.oom_events == 1 and m.jobs[0].failed


def test_all_in_cos_queues_instead_of_oom():
    p = toy(mem=10**6)
    # each 1000-sample task needs ~1 GB; only two fit per 2.5 GB GPU
    cfg = SimConfig(mode=Mode.ALL_IN_COS, gpu_count=1, gpu_mem_bytes_per_gpu=int(2.5e9), reserved_mem_bytes=0)
    m = run(cfg, [one_job(p, tenant=i) for i in range(4)], {"toy": p})
    assert m.oom_events == 0
    assert m.max_coresident == 2
    assert len({j.epoch_time_s for j in m.jobs}) == 2


def test_metric_invariants():
    jobs = [Job(i, "alexnet", 1000, 5000) for i in range(5)]
    m = run(SimConfig(), jobs)
    assert m.makespan_s >= max(j.epoch_time_s for j in m.jobs) - 1e-9
    assert m.avg_jct_s <= m.makespan_s


def test_staggered_submissions_measured_from_submit():
    jobs = [Job(0, "alexnet", 1000, 3000, submit_time_s=0.0), Job(1, "alexnet", 1000, 3000, submit_time_s=100.0)]
    m = run(SimConfig(), jobs)
    # no overlap, so both see the same service
    assert m.jobs[0].epoch_time_s == pytest.approx(m.jobs[1].epoch_time_s)
    assert m.makespan_s == pytest.approx(100.0 + m.jobs[1].epoch_time_s)


def test_cpu_client_slower_than_gpu_client():
    gpu = run(SimConfig(mode=Mode.BASELINE), [Job(0, "alexnet", 1000, 3000, ClientKind.GPU)])
    cpu = run(SimConfig(mode=Mode.BASELINE), [Job(0, "alexnet", 1000, 3000, ClientKind.CPU)])
    assert cpu.jobs[0].epoch_time_s > gpu.jobs[0].epoch_time_s


def test_baseline_pipelines_transfer_and_compute():
    # per iteration: transfer 0.8 s, client compute 0.5 s -> steady state is transfer-bound
    p = make_profile([10, 5], input_bytes=100_000, freeze=1, gpu=[250_000, 250_000], cpu=[250_000, 250_000])
    cfg = SimConfig(mode=Mode.BASELINE, bandwidth_bytes_per_sec=125e6, backward_cost_factor=0.0)
    m = run(cfg, [one_job(p, batch=1000, dataset=10_000)], {"toy": p})
    assert m.jobs[0].epoch_time_s == pytest.approx(10 * 0.8 + 0.5, rel=1e-6)


@settings(max_examples=10)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_determinism(seed, tenants):
    cfg = SimConfig(seed=seed, storage_read_jitter_us=2_000)
    jobs = [Job(i, "alexnet", 2000, 4000) for i in range(tenants)]
    assert run(cfg, jobs) == run(cfg, jobs)


def test_reorder_results_reexport():
    assert reorder_results([(2, "c"), (0, "a"), (1, "b")]) == ["a", "b", "c"]
    with pytest.raises(IncompleteIterationError):
        reorder_results([(0, "a"), (0, "b")])


def test_sweep_table4_column():
    res = sweep("table4-split-index")
    splits = [r["split_index"] for r in res.rows]
    assert len(res.rows) == 9
    assert splits == sorted(splits, reverse=True)
    assert splits[0] == 17 and splits[-1] == 5


def test_sweep_batch_axis_bounded_by_budget():
    res = sweep("fig9-batch-sweep")
    for r in res.rows:
        if r["mode"] == "Split":
            assert r["bytes_per_iter"] < 125e6 or r["split_index"] == 17


def test_simulator_single_use():
    sim = Simulator(SimConfig())
    sim.run([])
    with pytest.raises(RuntimeError):
        sim.run([])
