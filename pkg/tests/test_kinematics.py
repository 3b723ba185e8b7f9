import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qedfields.errors import DomainError
from qedfields.kinematics import (BoostParameters, FourVector, boost, boost_arrays, boost_z,
                                  minkowski_dot, on_shell, rotate, rotation_matrix)

finite = st.floats(-50, 50, allow_nan=False)
speeds = st.floats(-0.999, 0.999)


def test_on_shell_energy():
    p = on_shell(1.0, (0.6, 0.0, 0.8))
    assert p.t == pytest.approx(math.sqrt(2.0))
    assert p.norm2() == pytest.approx(1.0)


def test_boost_example_from_rest():
    p = boost_z(0.6, on_shell(1.0, (0, 0, 0)))
    assert p.t == pytest.approx(1.25)
    assert p.spatial == pytest.approx([0, 0, 0.75])


@pytest.mark.parametrize("v", [1.0, -1.0, 1.5, float("nan")])
def test_superluminal_boost_rejected(v):
    with pytest.raises(DomainError):
        BoostParameters(v)


def test_bad_axis_rejected():
    with pytest.raises(DomainError):
        BoostParameters(0.3, axis=3)


def test_gamma_near_light_speed_is_accurate():
    v = 1 - 1e-12
    assert BoostParameters(v).gamma == pytest.approx(1 / math.sqrt((1 - v) * (1 + v)), rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(v=speeds, t=finite, x=finite, y=finite, z=finite, axis=st.sampled_from([0, 1, 2]))
def test_boost_preserves_norm_and_inverts(v, t, x, y, z, axis):
    a = FourVector(t, (x, y, z))
    params = BoostParameters(v, axis)
    b = boost(params, a)
    scale = max(1.0, t * t + x * x + y * y + z * z) * params.gamma ** 2
    assert abs(b.norm2() - a.norm2()) <= 1e-10 * scale
    back = boost(params.inverse(), b)
    assert np.allclose(back.as_array(), a.as_array(), atol=1e-9 * math.sqrt(scale))


def test_matrix_agrees_with_vector_boost(rng):
    params = BoostParameters(-0.7, "x")
    a = FourVector(1.3, rng.normal(size=3))
    assert np.allclose(params.matrix() @ a.as_array(), boost(params, a).as_array())


def test_boost_arrays_matches_single(rng):
    params = BoostParameters(0.4)
    t, x = rng.normal(size=5), rng.normal(size=(5, 3))
    t2, x2 = boost_arrays(params, t, x)
    for i in range(5):
        b = boost(params, FourVector(t[i], x[i]))
        assert b.t == pytest.approx(t2[i])
        assert b.spatial == pytest.approx(x2[i])


def test_rotation_preserves_dot(rng):
    R = rotation_matrix((1, 2, 3), 0.7)
    a, b = FourVector(2.0, rng.normal(size=3)), FourVector(-1.0, rng.normal(size=3))
    assert minkowski_dot(rotate(R, a), rotate(R, b)) == pytest.approx(minkowski_dot(a, b))
