import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qedfields.errors import DomainError
from qedfields.modes import (FreeFieldMode, ModeComponent, boost_events, boost_mode_set,
                             check_time_varying, femf_maxwell_residuals, femf_mode_fields,
                             phase_velocity, read_modes_csv, sample_field, sample_static_field,
                             write_modes_csv)

COS_Z = ModeComponent(0.0, (0, 0, 1), -0.5j)


def test_cos_z_example():
    z = np.linspace(-3, 3, 13)
    x = np.column_stack([np.zeros_like(z), np.zeros_like(z), z])
    assert np.allclose(sample_static_field([COS_Z], x), np.cos(z))


def test_boost_example():
    (m,) = boost_mode_set([COS_Z], 0.6)
    assert m.omega == pytest.approx(0.75)
    assert m.k == pytest.approx((0, 0, 1.25))
    assert phase_velocity(m) == pytest.approx(0.6)
    assert check_time_varying([m]) and not check_time_varying([COS_Z])


def test_static_sampler_rejects_moving_modes():
    with pytest.raises(DomainError):
        sample_static_field(boost_mode_set([COS_Z], 0.5), [0, 0, 0])


def test_round_trip_boost(rng):
    modes = [ModeComponent(0, rng.normal(size=3), complex(*rng.normal(size=2))) for _ in range(6)]
    back = boost_mode_set(boost_mode_set(modes, 0.7), -0.7)
    for a, b in zip(modes, back):
        assert abs(b.omega) < 1e-12
        assert np.allclose(a.k, b.k, atol=1e-12)


def test_fourier_invariance(rng):
    modes = [ModeComponent(0, rng.normal(size=3), complex(*rng.normal(size=2))) for _ in range(5)]
    boosted = boost_mode_set(modes, -0.45)
    t, x = rng.uniform(-5, 5, 100), rng.uniform(-5, 5, (100, 3))
    t2, x2 = boost_events(-0.45, t, x)
    assert np.abs(sample_field(modes, x, t) - sample_field(boosted, x2, t2)).max() < 1e-10


@settings(max_examples=200, deadline=None)
@given(v=st.floats(-0.99, 0.99), kx=st.floats(-5, 5), ky=st.floats(-5, 5),
       kz=st.floats(-5, 5).filter(lambda k: abs(k) > 1e-3))
def test_phase_velocity_bounded_by_boost_speed(v, kx, ky, kz):
    (m,) = boost_mode_set([ModeComponent(0, (kx, ky, kz), 1.0)], v)
    u = phase_velocity(m)
    assert u <= abs(v) + 1e-12
    if math.hypot(kx, ky) > 1e-3 and abs(v) > 1e-3:
        assert u < abs(v)


def test_mode_csv_round_trip(tmp_path, rng):
    modes = [ModeComponent(rng.normal(), rng.normal(size=3), complex(*rng.normal(size=2)))
             for _ in range(4)]
    write_modes_csv(tmp_path / "m.csv", modes)
    back = read_modes_csv(tmp_path / "m.csv")
    for a, b in zip(modes, back):
        assert b.omega == pytest.approx(a.omega, rel=1e-12)
        assert np.allclose(b.k, a.k, rtol=1e-12)
        assert b.amplitude == pytest.approx(a.amplitude, rel=1e-12)
    write_modes_csv(tmp_path / "empty.csv", [])
    assert read_modes_csv(tmp_path / "empty.csv") == []


@pytest.mark.parametrize("lam", [1, 2])
def test_free_mode_transversality(rng, lam):
    for _ in range(10):
        mode = FreeFieldMode(rng.normal(size=3), lam, complex(*rng.normal(size=2)))
        E, B = femf_mode_fields(mode, rng.normal(size=(20, 3)), rng.normal())
        k = np.asarray(mode.k)
        assert np.abs(E @ k).max() < 1e-12
        assert np.abs(B @ k).max() < 1e-12
        assert np.abs(np.einsum("nc,nc->n", E, B)).max() < 1e-12
        assert np.allclose(np.linalg.norm(E, axis=1), np.linalg.norm(B, axis=1))


def test_free_mode_maxwell_residual_second_order(rng):
    mode = FreeFieldMode((0.7, -1.1, 0.4), 2, 0.3 - 0.2j)
    pts = rng.normal(size=(50, 3))
    r1 = femf_maxwell_residuals(mode, pts, 0.3, 0.02)
    r2 = femf_maxwell_residuals(mode, pts, 0.3, 0.01)
    for a, b in zip(r1, r2):
        assert a / b == pytest.approx(4.0, rel=0.02)


def test_free_mode_validation():
    with pytest.raises(DomainError):
        FreeFieldMode((0, 0, 0), 1, 1.0)
    with pytest.raises(DomainError):
        FreeFieldMode((0, 0, 1), 3, 1.0)
