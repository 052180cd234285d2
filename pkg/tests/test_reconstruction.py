import numpy as np
import pytest
from hypothesis import given, strategies as st

from nonlocal_claw.reconstruction import get_limiter, minmod, reconstruct

finite = st.floats(-1e6, 1e6, allow_nan=False)


@pytest.mark.parametrize("a, b, expected", [(2, 1, 1), (-1, 2, 0), (0.5, 0.5, 0.5),
                                            (-3, -2, -2), (0, 4, 0)])
def test_minmod_cases(a, b, expected):
    assert minmod(a, b) == expected


@given(finite, finite)
def test_minmod_properties(a, b):
    m = float(minmod(a, b))
    assert m == float(minmod(b, a))
    if a * b <= 0:
        assert m == 0
    else:
        assert m in (a, b) and abs(m) == min(abs(a), abs(b))


def test_constant_field():
    faces = reconstruct(np.full(10, 0.3))
    assert np.all(faces.slopes == 0)
    assert np.all(faces.plus == 0.3) and np.all(faces.minus == 0.3)


def test_linear_field():
    s = 0.25
    faces = reconstruct(s * np.arange(12.0))
    np.testing.assert_allclose(faces.slopes, s)
    np.testing.assert_allclose(faces.plus - faces.minus, s)


def test_extremum_has_zero_slope():
    faces = reconstruct(np.array([0.0, 0.0, 1.0, 0.0, 0.0]))
    assert faces.slopes[1] == 0


def test_edge_value_identities(rng):
    u = rng.normal(size=40)
    faces = reconstruct(u)
    inner = u[1:-1]
    assert np.array_equal(faces.plus, inner + 0.5 * faces.slopes)
    assert np.array_equal(faces.minus, inner - 0.5 * faces.slopes)


def test_ghost_width_contract():
    with pytest.raises(ValueError, match="ghost"):
        reconstruct(np.arange(5.0), ghost=0)
    with pytest.raises(ValueError):
        reconstruct(np.arange(2.0), ghost=1)


def test_wider_ghost_region():
    u = np.arange(10.0) ** 2
    assert reconstruct(u, ghost=2).slopes.size == 6


def test_unknown_limiter():
    assert get_limiter("minmod") is minmod
    with pytest.raises(ValueError, match="unknown limiter"):
        get_limiter("superbee")


def test_edge_values_within_local_range(rng):
    for _ in range(200):
        u = rng.uniform(-1, 1, 64)
        faces = reconstruct(u)
        stack = np.stack([u[:-2], u[1:-1], u[2:]])
        lo, hi = stack.min(axis=0), stack.max(axis=0)
        for edge in (faces.plus, faces.minus):
            assert np.all(edge >= lo) and np.all(edge <= hi)


def test_tvd_slope_ratio(rng):
    """(sigma_{j+1} - sigma_j) / (u_{j+1} - u_j) stays in [-2, 2]."""
    for _ in range(10 ** 4):
        u = rng.uniform(-1, 1, 128)
        if rng.random() < 0.3:
            u = np.round(u, 1)  # introduce plateaus
        sigma = reconstruct(u).slopes
        du = np.diff(u[1:-1])
        mask = du != 0
        ratio = np.diff(sigma)[mask] / du[mask]
        assert np.all(ratio >= -2 - 1e-12) and np.all(ratio <= 2 + 1e-12)


def test_monotone_data_gives_monotone_edges(rng):
    for _ in range(200):
        u = np.sort(rng.uniform(-1, 1, 50))
        faces = reconstruct(u)
        edges = np.empty(2 * faces.plus.size)
        edges[0::2], edges[1::2] = faces.minus, faces.plus
        assert np.all(np.diff(edges) >= -1e-15)
