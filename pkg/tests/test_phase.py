import cmath
import math

import numpy as np
import pytest
from mpmath import mp

from hypsaddle.phase import (
    CoalescenceError,
    Params,
    branch_offsets,
    double_points,
    double_saddle,
    psi,
    psi2_closed,
    psi_derivs,
    psi_derivs_z,
    saddle_points,
    saddles,
)


def random_points(n, seed, rmin=0.08, rmax=1.6):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        r = rng.uniform(rmin, rmax)
        th = rng.uniform(-math.pi, math.pi)
        z = r * cmath.exp(1j * th)
        if abs(z.imag) < 1e-3 and z.real > 1:
            continue
        out.append(z)
    return out


def test_params_validation():
    with pytest.raises(ValueError):
        Params(0.0, 10, 0.5)
    with pytest.raises(ValueError):
        Params(1.0, -1, 0.5)
    with pytest.raises(ValueError):
        Params(1.0, 10, 0)
    with pytest.raises(ValueError):
        Params(1.0, 10, 1.5)  # on the cut
    p = Params(1.0, 10, 0.5j)
    assert abs(p.theta - math.pi / 2) < 1e-15
    assert abs(p.phi - math.pi / 4) < 1e-15


def test_psi_direct_substitution():
    with mp.workdps(30):
        p = Params(1.0, 1.0, 0.5)
        expect = mp.log(1.5) + 1j * mp.pi - (1 - 1j) * (mp.log(2) + 1j * mp.pi)
        assert abs(psi(-1, p) - expect) < 1e-28


def test_psi_offsets_shift():
    with mp.workdps(30):
        p = Params(1.0, 1.0, 0.5)
        d = psi(-1, p, (1, 0)) - psi(-1, p)
        assert abs(d - 2j * mp.pi) < 1e-28


def test_saddle_locations_alpha1_half():
    s1, s2 = saddles(0.5, 1.0)
    assert abs(complex(s1.t) - (0.29289 - 0.70711j)) < 1e-5
    assert abs(complex(s2.t) - (1.70711 + 0.70711j)) < 1e-5


def test_psi2_matches_closed_form():
    with mp.workdps(30):
        p = Params(1.0, 1.0, 0.5)
        for s in saddles(0.5, 1.0):
            d = psi_derivs(s.t, p, 2)
            assert abs(d[0]) < 1e-25
            assert abs(d[1] - psi2_closed(s.t, 1.0)) < 1e-12 * abs(d[1])


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_saddle_residual_and_product(alpha):
    with mp.workdps(30):
        for z in random_points(34, seed=int(alpha * 10)):
            zm, zp = (complex(x) for x in double_points(alpha))
            if min(abs(z - zm), abs(z - zp)) < 0.02:
                continue
            s1, s2 = saddles(z, alpha)
            for s in (s1, s2):
                r = psi_derivs_z(s.t, z, alpha, 1)[0]
                assert abs(r) < 1e-12 * (1 + abs(s.t))
            prod = s1.t * s2.t * (1 + 1j * alpha) * z
            assert abs(prod - 1) < 1e-12


def test_conjugate_saddles_match_negated_alpha():
    """The saddles for (-alpha, conj z) are the conjugates of those for (alpha, z)."""
    with mp.workdps(30):
        for z in random_points(10, seed=3):
            a = sorted((complex(mp.conj(t)) for t in saddle_points(z, 1.0)), key=lambda c: (c.real, c.imag))
            b = sorted((complex(t) for t in saddle_points(z.conjugate(), -1.0)), key=lambda c: (c.real, c.imag))
            assert all(abs(x - y) < 1e-12 for x, y in zip(a, b))


def test_double_points():
    with mp.workdps(40):
        zm, zp = double_points(1)
        assert abs(zm - (1 - mp.sqrt(2)) / 2) < 1e-38
        assert abs(zp - (1 + mp.sqrt(2)) / 2) < 1e-38
        assert abs(float(zp) - 1.20711) < 1e-5
        zm, zp = double_points(1e-9)
        assert abs(zm) < 1e-15 and abs(zp - 1) < 1e-15


def test_double_saddle_alpha1():
    with mp.workdps(40):
        ds = double_saddle(1)
        assert abs(complex(ds.t) - (-0.70711 - 1.70711j)) < 1e-5
        zm, _ = double_points(1)
        d1, d2, d3 = psi_derivs_z(ds.t, zm, 1, 3)
        assert abs(d1) < 1e-30 and abs(d2) < 1e-10
        T = ds.t - 1
        s = mp.sqrt(2)
        assert abs(T - 1j * s / ((1 + 1j) * (1 - s))) < 1e-35


@pytest.mark.parametrize("alpha", [0.1, 0.3, 1.0, 3.0, 10.0])
def test_double_saddle_is_cubic(alpha):
    with mp.workdps(30):
        ds = double_saddle(alpha)
        zm, _ = double_points(alpha)
        assert abs(psi_derivs_z(ds.t, zm, alpha, 3)[2]) > 1e-6


def test_near_double_point_splitting():
    with mp.workdps(30):
        zm, _ = double_points(1)
        td = double_saddle(1).t
        s1, s2 = saddles(complex(zm) + 1e-3, 1.0)
        for s in (s1, s2):
            assert abs(s.t - td) < 10 * math.sqrt(1e-3)
        with pytest.raises(CoalescenceError):
            saddles(complex(zm), 1.0)


def test_branch_offsets_anchor_and_lower_half_plane():
    assert branch_offsets(0.5, 1.0) == (0, 0)
    assert branch_offsets(0.9, 1.0) == (0, 0)
    n1, n2 = branch_offsets(0.5 * cmath.exp(-0.99j * math.pi), 1.0)
    assert n2 != 0
    # the upper half-plane never leaves the principal sheets
    for z in random_points(10, seed=5):
        if z.imag > 0:
            assert branch_offsets(z, 1.0) == (0, 0)
