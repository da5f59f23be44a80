from __future__ import annotations

import math

import numpy as np
import pytest

from dynloc.geometry import (
    LocalizationSample,
    NoiseModel,
    Position,
    absolute_error,
    distance,
    localize,
    threshold_accuracy,
)


def test_distance_cases():
    assert distance(Position(0, 0), Position(3, 4)) == pytest.approx(5.0)
    assert distance(Position(3, 4), Position(0, 0)) == pytest.approx(5.0)
    assert distance(Position(1.5, -2.0), Position(1.5, -2.0)) == 0.0


def test_position_rejects_non_finite():
    with pytest.raises(ValueError):
        Position(float("nan"), 0.0)
    with pytest.raises(ValueError):
        Position(0.0, float("inf"))


def test_sample_rejects_negative_time():
    with pytest.raises(ValueError):
        LocalizationSample(-0.1, Position(0, 0))


def test_noise_model_rejects_negative_magnitude():
    with pytest.raises(ValueError):
        NoiseModel(-0.5)


def test_localize_zero_noise_is_exact():
    rng = np.random.default_rng(42)
    true_pos = Position(12.25, -3.5)
    sample = localize(true_pos, NoiseModel(0.0), rng, t=1.5)
    assert sample.measured == true_pos
    assert sample.t == 1.5


def test_localize_never_exceeds_max_magnitude():
    rng = np.random.default_rng(7)
    noise = NoiseModel(0.5)
    true_pos = Position(100.0, 100.0)
    for _ in range(100_000):
        sample = localize(true_pos, noise, rng)
        assert distance(sample.measured, true_pos) <= noise.max_magnitude


def test_localize_mean_displacement_matches_uniform_magnitude():
    # The magnitude is uniform on [0, max), so the mean displacement is max/2.
    rng = np.random.default_rng(123)
    noise = NoiseModel(0.5)
    true_pos = Position(0.0, 0.0)
    total = 0.0
    n = 1_000_000
    for _ in range(n):
        total += distance(localize(true_pos, noise, rng).measured, true_pos)
    assert total / n == pytest.approx(0.25, abs=0.01)


def test_localize_is_seed_deterministic():
    noise = NoiseModel(0.5)
    true_pos = Position(5.0, 5.0)
    rng_a = np.random.default_rng(9)
    rng_b = np.random.default_rng(9)
    first = [localize(true_pos, noise, rng_a).measured for _ in range(50)]
    second = [localize(true_pos, noise, rng_b).measured for _ in range(50)]
    assert first == second


def test_distance_triangle_inequality():
    rng = np.random.default_rng(2024)
    for _ in range(500):
        pts = [Position(rng.uniform(-50, 50), rng.uniform(-50, 50)) for _ in range(3)]
        a, b, c = pts
        assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-12


def test_absolute_error_is_distance():
    assert absolute_error(Position(1, 1), Position(4, 5)) == pytest.approx(5.0)


def test_threshold_accuracy_half_within():
    assert threshold_accuracy([1.0, 2.0, 10.0, 20.0], 5.0) == pytest.approx(0.5)


def test_threshold_accuracy_boundary_counts_as_accurate():
    assert threshold_accuracy([5.0, 5.0, 6.0], 5.0) == pytest.approx(2 / 3)


def test_threshold_accuracy_rejects_empty():
    with pytest.raises(ValueError):
        threshold_accuracy([], 5.0)


def test_threshold_accuracy_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        threshold_accuracy([1.0], -1.0)
