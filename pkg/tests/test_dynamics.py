"""Event engine: determinism, tie ordering, clamps, wires, budgets."""

import math

import numpy as np
import pytest

from pbitsim.core import CLAMPED_HIGH, CLAMPED_LOW, PBitConfig, Wired, sigmoid
from pbitsim.errors import ConfigurationError
from pbitsim.networks import (
    MachineSpec,
    NetworkSpec,
    build_and_machine,
    load_gate,
    verify_ground_states,
)
from pbitsim.dynamics import (
    Simulator,
    run,
    serialization_metric,
    serialization_profile,
)


def and_net(i0=0.8, **kwargs):
    return build_and_machine(i0, **kwargs)


def two_machine_net(src_mode, wire_delay_us=0):
    """Two 2-unit machines; the second machine's first unit is wired to the
    first machine's first unit, whose mode is ``src_mode``."""
    gate = verify_ground_states(load_gate("copy"))
    mach = lambda name: MachineSpec(name, gate.coupling(0.0), tau_sample_us=100,
                                    labels=dict(gate.visible))
    pbits = [PBitConfig(id=k, retention_us=1000) for k in range(4)]
    pbits[0] = PBitConfig(id=0, retention_us=1000, mode=src_mode)
    pbits[2] = PBitConfig(id=2, retention_us=1000,
                          mode=Wired(source=0, delay_us=wire_delay_us))
    net = NetworkSpec([mach("src"), mach("dst")], pbits,
                      {"SRC": 0, "DST": 2})
    net.validate()
    return net


class TestDeterminism:
    def test_identical_runs(self):
        a = run(and_net(), seed=7, max_samples=500)
        b = run(and_net(), seed=7, max_samples=500)
        assert np.array_equal(a.times, b.times)
        assert np.array_equal(a.states, b.states)
        assert np.array_equal(a.update_counts, b.update_counts)

    def test_seed_changes_trajectory(self):
        a = run(and_net(), seed=7, max_samples=500)
        b = run(and_net(), seed=8, max_samples=500)
        assert not np.array_equal(a.states, b.states)

    def test_budget_extension_is_a_prefix(self):
        short = run(and_net(), seed=7, max_samples=200)
        long = run(and_net(), seed=7, max_samples=500)
        assert np.array_equal(short.states, long.states[:200])


class TestEventOrdering:
    def test_refresh_precedes_update_at_same_instant(self):
        # a strongly biased single unit: if the t=0 refresh runs first the
        # very first update already sees V=5 instead of the neutral 2.5
        gate = verify_ground_states(load_gate("copy"))
        mach = MachineSpec("m", gate.coupling(5.0), tau_sample_us=10,
                           labels=dict(gate.visible))
        pbits = [PBitConfig(id=0, retention_us=10, mode=CLAMPED_HIGH),
                 PBitConfig(id=1, retention_us=10)]
        net = NetworkSpec([mach], pbits, dict(gate.visible))
        sim = Simulator(net, seed=0)
        sim.step()  # machine refresh at t=0
        assert sim.held_inputs[1] == 5.0

    def test_sample_times_strictly_increase(self):
        trace = run(and_net(), seed=3, max_samples=300)
        assert np.all(np.diff(trace.times) > 0)

    def test_updates_wait_for_phase(self):
        net = and_net()
        net.set_phases([0, 500, 900])
        trace = run(net, seed=1, duration_us=1000, record_updates=True)
        first = {}
        for t, gid in trace.update_events:
            first.setdefault(gid, t)
        assert first == {0: 0, 1: 500, 2: 900}


class TestTerminalModes:
    def test_clamped_units_hug_the_rails(self):
        net = and_net().with_clamps({"A": 1, "B": 0})
        trace = run(net, seed=5, max_updates=30_000)
        a, b = net.visible_labels["A"], net.visible_labels["B"]
        frac = trace.one_counts / trace.update_counts
        assert frac[a] > 0.999
        assert frac[b] < 0.001

    def test_wired_unit_follows_high_source(self):
        trace = run(two_machine_net(CLAMPED_HIGH), seed=9, max_updates=40_000)
        frac = trace.one_counts[2] / trace.update_counts[2]
        assert frac == pytest.approx(sigmoid(5.0), abs=0.005)

    def test_wired_unit_follows_low_source(self):
        trace = run(two_machine_net(CLAMPED_LOW), seed=9, max_updates=40_000)
        frac = trace.one_counts[2] / trace.update_counts[2]
        assert frac == pytest.approx(sigmoid(-5.0), abs=0.005)

    def test_delayed_wire_runs(self):
        trace = run(two_machine_net(CLAMPED_HIGH, wire_delay_us=500),
                    seed=9, max_updates=5_000)
        assert trace.update_counts.sum() == 5_000


class TestBudgets:
    def test_duration_window_is_half_open(self):
        net = and_net(tau_sample_us=10)
        trace = run(net, seed=2, duration_us=100)
        assert len(trace) == 10
        assert trace.times[0] == 0
        assert trace.times[-1] == 90

    def test_zero_budget_empty_trace(self):
        trace = run(and_net(), seed=2, max_samples=0)
        assert len(trace) == 0

    def test_max_updates_counts_events(self):
        trace = run(and_net(), seed=2, max_updates=1234)
        assert trace.update_counts.sum() == 1234

    def test_budget_required(self):
        with pytest.raises(ConfigurationError):
            run(and_net(), seed=2)


class TestJitter:
    def _gaps(self, jitter):
        net = and_net()
        net.set_retention(1000)
        net.set_jitter(jitter)
        trace = run(net, seed=6, max_updates=3000, record_updates=True)
        per_unit = {}
        for t, gid in trace.update_events:
            per_unit.setdefault(gid, []).append(t)
        return [b - a for ts in per_unit.values() for a, b in zip(ts, ts[1:])]

    def test_zero_jitter_is_periodic(self):
        assert set(self._gaps(0.0)) == {1000}

    def test_jitter_interval_bounds(self):
        gaps = self._gaps(0.01)
        assert all(989 <= g <= 1011 for g in gaps)
        assert len(set(gaps)) > 1


class TestTrace:
    def test_state_bits_round_trip(self):
        trace = run(and_net(), seed=4, max_samples=50)
        for row in range(len(trace)):
            bits = trace.state_bits(row)
            mask = sum(b << (trace.n - 1 - k) for k, b in enumerate(bits))
            assert mask == int(trace.states[row])

    def test_to_csv(self, tmp_path):
        trace = run(and_net(), seed=4, max_samples=5)
        path = tmp_path / "trace.csv"
        trace.to_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "time_us,pbit_0,pbit_1,pbit_2"
        assert len(lines) == 6


class TestSerializationMetric:
    def _trace(self, phases, jitter=0.0):
        net = and_net()
        net.set_retention(1000)
        net.set_jitter(jitter)
        net.set_phases(phases)
        return net, run(net, seed=11, max_updates=3000, record_updates=True)

    def test_synchronized_updates_score_one(self):
        net, trace = self._trace([0, 0, 0])
        assert serialization_metric(trace, net, window_us=10) == 1.0

    def test_staggered_updates_score_zero(self):
        net, trace = self._trace([0, 333, 666])
        assert serialization_metric(trace, net, window_us=100) == 0.0

    def test_profile_chunks(self):
        net, trace = self._trace([0, 0, 0])
        prof = serialization_profile(trace, net, window_us=10, chunk=100)
        assert all(p == 1.0 for p in prof)

    def test_requires_recorded_updates(self):
        net = and_net()
        trace = run(net, seed=1, max_samples=10)
        with pytest.raises(ConfigurationError):
            serialization_metric(trace, net, window_us=10)

    def test_window_must_be_positive(self):
        net, trace = self._trace([0, 0, 0])
        with pytest.raises(ConfigurationError):
            serialization_metric(trace, net, window_us=0)

    def test_empty_range_rejected(self):
        net, trace = self._trace([0, 0, 0])
        with pytest.raises(ConfigurationError):
            serialization_metric(trace, net, window_us=10, start=10**9)
