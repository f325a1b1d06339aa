import cmath

import pytest
from mpmath import mp

from hypsaddle.coeffs import (
    LocalExpansion,
    amplitude_value,
    bell_table,
    explicit_c12,
    local_expansions,
    wojdylo_all,
    wojdylo_c,
)
from hypsaddle.phase import Params, psi_derivs_z, saddles


def test_local_expansion_basics():
    with mp.workdps(30):
        p = Params(1.0, 1.0, 0.5)
        s1, _ = saddles(0.5, 1.0)
        le = local_expansions(s1, p, 4)
        assert abs(le.alpha_hat[0] - psi_derivs_z(s1.t, 0.5, 1.0, 2)[1] / 2) < 1e-25
        for r, b in enumerate(le.beta_hat):
            assert abs(b - (-1) ** r / (s1.t - 1) ** (r + 1)) < 1e-25


def test_general_amplitude_value():
    with mp.workdps(30):
        p = Params(1.0, 1.0, 0.5, a=1, b=2, c=1)
        s1, _ = saddles(0.5, 1.0)
        t = s1.t
        expect = t / (t - 1) ** 2 / (1 - 0.5 * t)
        assert abs(amplitude_value(t, p, s1.offsets) - expect) < 1e-25


def test_bell_table_entries():
    a = [mp.mpf(0), mp.mpf(2), mp.mpf(3), mp.mpf(5), mp.mpf(7)]
    B = bell_table(a, 4)
    a1, a2, a3, a4 = a[1:]
    assert B[0][0] == 1 and all(B[k][0] == 0 for k in range(1, 5))
    assert B[4][1] == a4
    assert B[4][2] == a2**2 + 2 * a1 * a3
    assert B[4][3] == 3 * a1**2 * a2
    assert B[4][4] == a1**4


def test_bell_table_power_patterns():
    x = mp.mpf(0.7)
    # alpha_hat_r = x^r for all r: (x tau / (1 - x tau))^j gives C(k-1, j-1) x^k
    B = bell_table([0] + [x**r for r in range(1, 6)], 4)
    for k in range(1, 5):
        for j in range(1, k + 1):
            assert abs(B[k][j] - mp.binomial(k - 1, j - 1) * x**k) < 1e-14
    # only alpha_hat_1, alpha_hat_2 nonzero: (x tau (1 + x tau))^j gives C(j, k-j) x^k
    B = bell_table([0, x, x**2, 0, 0, 0], 4)
    for k in range(1, 5):
        for j in range(1, k + 1):
            assert abs(B[k][j] - mp.binomial(j, k - j) * x**k) < 1e-14


def test_c0_and_gaussian_case():
    le = LocalExpansion(tuple([mp.mpf(1)] + [mp.mpf(0)] * 8), tuple([mp.mpf(1)] + [mp.mpf(0)] * 8))
    cs = wojdylo_all(le, 4)
    assert cs[0] == 1
    assert all(abs(c) < 1e-30 for c in cs[1:])


def test_scaling_covariance():
    with mp.workdps(30):
        p = Params(1.0, 1.0, 0.3 + 0.2j)
        s1, _ = saddles(p.z, 1.0)
        le = local_expansions(s1, p, 6)
        k = mp.mpc(2.5, -1)
        le2 = LocalExpansion(le.alpha_hat, tuple(k * b for b in le.beta_hat))
        for s in range(4):
            assert abs(wojdylo_c(le, s) - wojdylo_c(le2, s)) < 1e-24 * max(1, abs(wojdylo_c(le, s)))


def grid20():
    pts = []
    for alpha in (0.5, 1.0, 2.0, 3.0):
        for r, th in ((0.3, 0.4), (0.6, -0.7), (0.9, 2.2), (1.3, -2.5), (0.5, 3.0)):
            pts.append((alpha, r * cmath.exp(1j * th)))
    return pts


@pytest.mark.parametrize("alpha,z", grid20())
def test_wojdylo_matches_explicit(alpha, z):
    with mp.workdps(32):
        p = Params(alpha, 1.0, z)
        for s in saddles(z, alpha):
            le = local_expansions(s, p, 4)
            c1, c2 = explicit_c12(s, p)
            assert abs(wojdylo_c(le, 1) - c1) < 1e-12 * abs(c1)
            assert abs(wojdylo_c(le, 2) - c2) < 1e-12 * abs(c2)


def test_wojdylo_matches_explicit_general_amplitude():
    with mp.workdps(32):
        p = Params(1.0, 1.0, 0.4 - 0.3j, a=1, b=2, c=1)
        for s in saddles(p.z, 1.0):
            le = local_expansions(s, p, 4)
            c1, c2 = explicit_c12(s, p)
            assert abs(wojdylo_c(le, 1) - c1) < 1e-12 * abs(c1)
            assert abs(wojdylo_c(le, 2) - c2) < 1e-12 * abs(c2)


def test_double_saddle_rejected():
    from hypsaddle.phase import double_saddle, double_points

    with mp.workdps(30):
        zm, _ = double_points(1)
        ds = double_saddle(1)
        with pytest.raises(ValueError):
            local_expansions(ds, Params(1.0, 1.0, complex(zm)), 4)
