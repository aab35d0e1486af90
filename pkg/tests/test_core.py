import random

import pytest

from edgeguard.core import (
    AlertEvent,
    AlertState,
    DeviceConfig,
    IllegalTransition,
    VirtualClock,
    transition,
    validate_config,
)
from edgeguard.core.alerts import TERMINAL_STATES, allowed_transitions
from edgeguard.core.types import Frame, WeaponClass


class TestValidateConfig:
    def test_defaults_ok(self):
        assert validate_config(DeviceConfig()) == []

    def test_k_boundary_excluded(self):
        errors = validate_config(DeviceConfig(k=1.0))
        assert "k out of (0,1)" in errors
        assert "k out of (0,1)" in validate_config(DeviceConfig(k=0.0))

    def test_degenerate_window_legal(self):
        assert validate_config(DeviceConfig(n=0, k=0.5)) == []

    def test_reports_all_violations(self):
        cfg = DeviceConfig(alpha=0.0, k=2.0, cooldown_ms=-1, motion_ratio_min=1.5)
        errors = validate_config(cfg)
        assert len(errors) == 4

    def test_missing_threshold(self):
        cfg = DeviceConfig(thresholds={WeaponClass.GUN: 1.05})
        assert any("knife" in e for e in validate_config(cfg))

    def test_json_round_trip(self):
        cfg = DeviceConfig(alpha=1.5, beta=-10, k=0.25, n=3, cooldown_ms=500)
        assert DeviceConfig.from_json(cfg.to_json()) == cfg


class TestFrame:
    def test_pixel_count_enforced(self):
        with pytest.raises(ValueError):
            Frame(width=4, height=4, pixels=b"\x00" * 15, timestamp=0, seq=0)


def _alert(now=0):
    return AlertEvent.new("a-1", "dev-1", "clips/a-1.gif", "gun", 42, now)


class TestAlertTransitions:
    def test_happy_path(self):
        a = _alert()
        a = transition(a, AlertState.VERIFYING, "cloud", 10)
        a = transition(a, AlertState.CONFIRMED, "verifier", 20, score=0.9)
        a = transition(a, AlertState.NOTIFIED, "notifier", 30)
        assert a.state is AlertState.NOTIFIED
        assert a.verifier_score == 0.9
        assert [h[0] for h in a.history] == ["pending", "verifying", "confirmed", "notified"]

    def test_rejected_is_terminal(self):
        a = transition(_alert(), AlertState.VERIFYING, "cloud", 1)
        a = transition(a, AlertState.REJECTED, "verifier", 2, score=0.3)
        with pytest.raises(IllegalTransition):
            transition(a, AlertState.NOTIFIED, "notifier", 3)

    def test_dismiss_from_any_non_terminal(self):
        for state_path in ([], [AlertState.VERIFYING], [AlertState.VERIFYING, AlertState.CONFIRMED]):
            a = _alert()
            for s in state_path:
                a = transition(a, s, "cloud", 1)
            a = transition(a, AlertState.DISMISSED, "console", 2)
            assert a.state is AlertState.DISMISSED

    def test_skipping_verifying_is_illegal(self):
        with pytest.raises(IllegalTransition):
            transition(_alert(), AlertState.CONFIRMED, "cloud", 1)

    def test_random_walks_stay_on_legal_graph(self):
        # fuzz: any accepted sequence of transitions is a walk in the graph
        rng = random.Random(7)
        states = list(AlertState)
        for _ in range(500):
            a = _alert()
            for _ in range(8):
                target = rng.choice(states)
                legal = allowed_transitions(a.state)
                try:
                    a = transition(a, target, "fuzz", 1)
                    assert target in legal
                except IllegalTransition:
                    assert target not in legal
            if a.state in TERMINAL_STATES:
                assert allowed_transitions(a.state) == frozenset()

    def test_history_append_only(self):
        a = _alert()
        b = transition(a, AlertState.VERIFYING, "cloud", 1)
        assert b.history[: len(a.history)] == a.history


class TestVirtualClock:
    def test_same_time_runs_in_insertion_order(self):
        clock = VirtualClock()
        seen = []
        clock.schedule(5, lambda: seen.append("a"))
        clock.schedule(5, lambda: seen.append("b"))
        clock.schedule(1, lambda: seen.append("c"))
        clock.run()
        assert seen == ["c", "a", "b"]
        assert clock.now == 5

    def test_nested_scheduling(self):
        clock = VirtualClock()
        seen = []
        def outer():
            seen.append(("outer", clock.now))
            clock.schedule(3, lambda: seen.append(("inner", clock.now)))
        clock.schedule(2, outer)
        clock.run()
        assert seen == [("outer", 2), ("inner", 5)]

    def test_cancel(self):
        clock = VirtualClock()
        seen = []
        handle = clock.schedule(1, lambda: seen.append("x"))
        clock.cancel(handle)
        clock.run()
        assert seen == []

    def test_cannot_schedule_in_past(self):
        clock = VirtualClock()
        clock.schedule(10, lambda: None)
        clock.run()
        with pytest.raises(ValueError):
            clock.schedule_at(5, lambda: None)

    def test_run_until_stops_on_boundary(self):
        clock = VirtualClock()
        seen = []
        clock.schedule(5, lambda: seen.append(5))
        clock.schedule(10, lambda: seen.append(10))
        clock.run_until(7)
        assert seen == [5] and clock.now == 7
        clock.run()
        assert seen == [5, 10]

    def test_replay_determinism(self):
        def run_once():
            clock = VirtualClock()
            log = []
            def tick(i):
                log.append((clock.now, i))
                if i < 20:
                    clock.schedule((i * 7) % 5, lambda: tick(i + 1))
            clock.schedule(0, lambda: tick(0))
            clock.run()
            return log
        assert run_once() == run_once()
