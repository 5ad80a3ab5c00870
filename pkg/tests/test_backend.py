"""Cross-checks between the compiled kernel and the reference trial loop."""

import math

import numpy as np
import pytest

from akqubits.backend import (
    ENV_BACKEND,
    TrialBatch,
    available_backends,
    default_backend,
    run_teleport_trials,
)

needs_compiled = pytest.mark.skipif(
    "compiled" not in available_backends(), reason="extension not built"
)


class TestSelection:
    def test_python_always_available(self):
        assert "python" in available_backends()

    def test_default_prefers_compiled(self, monkeypatch):
        monkeypatch.delenv(ENV_BACKEND, raising=False)
        assert default_backend() == available_backends()[0]

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv(ENV_BACKEND, "python")
        assert default_backend() == "python"

    def test_env_rejects_garbage(self, monkeypatch):
        monkeypatch.setenv(ENV_BACKEND, "fortran")
        with pytest.raises(ValueError):
            default_backend()

    def test_unknown_backend_argument(self):
        with pytest.raises(ValueError):
            run_teleport_trials(10, +1, 0, backend="fortran")

    def test_trials_validation(self):
        with pytest.raises(ValueError):
            run_teleport_trials(0, +1, 0)


@needs_compiled
class TestBackendEquivalence:
    def test_same_trajectories_both_signs(self):
        for sign in (+1, -1):
            a = run_teleport_trials(2000, sign, seed=7, backend="compiled")
            b = run_teleport_trials(2000, sign, seed=7, backend="python")
            assert np.array_equal(a.rounds, b.rounds)
            assert np.array_equal(a.path_codes, b.path_codes)
            assert np.array_equal(a.path_offsets, b.path_offsets)
            assert np.array_equal(a.z_readings, b.z_readings)
            assert np.array_equal(a.truncated, b.truncated)
            assert np.allclose(a.fidelities, b.fidelities, atol=1e-12, equal_nan=True)

    def test_same_trajectories_general_angle(self):
        a = run_teleport_trials(500, +1, seed=3, backend="compiled", theta=0.8)
        b = run_teleport_trials(500, +1, seed=3, backend="python", theta=0.8)
        assert np.array_equal(a.rounds, b.rounds)
        assert np.array_equal(a.path_codes, b.path_codes)
        assert np.allclose(a.fidelities, b.fidelities, atol=1e-12, equal_nan=True)


class TestTrialBatch:
    def test_repeat_run_is_bit_identical(self):
        a = run_teleport_trials(400, +1, seed=11)
        b = run_teleport_trials(400, +1, seed=11)
        assert a.backend == b.backend
        assert np.array_equal(a.fidelities[~a.truncated], b.fidelities[~b.truncated])
        assert np.array_equal(a.rounds, b.rounds)
        assert np.array_equal(a.path_codes, b.path_codes)

    def test_path_structure(self):
        batch = run_teleport_trials(300, -1, seed=13)
        assert isinstance(batch, TrialBatch)
        for t in range(batch.trials):
            path = batch.path(t)
            assert len(path) == batch.rounds[t]
            if not batch.truncated[t]:
                assert path[-1] == 1
                assert all(c in (2, 3) for c in path[:-1])

    def test_success_statistics(self):
        batch = run_teleport_trials(20000, +1, seed=42)
        n = batch.trials
        p1 = float((batch.rounds == 1).mean())
        assert abs(p1 - 0.5) < 3 * math.sqrt(0.25 / n)
        mean = float(batch.rounds[~batch.truncated].mean())
        assert abs(mean - 2.0) < 3 * math.sqrt(2.0 / n)
        assert np.nanmin(batch.fidelities) >= 1.0 - 1e-10
        assert np.all(batch.z_readings[~batch.truncated] != 0)

    def test_input_states_shared_across_backends(self):
        # the Haar batch is drawn before any trial consumes draws
        if "compiled" not in available_backends():
            pytest.skip("extension not built")
        a = run_teleport_trials(50, +1, seed=19, backend="compiled")
        b = run_teleport_trials(50, +1, seed=19, backend="python")
        assert np.array_equal(a.z_readings, b.z_readings)
