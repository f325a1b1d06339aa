"""Steepest-descent coefficients c_s at a simple saddle.

Two independent routes are provided: Wojdylo's formula, driven by the
partial ordinary Bell polynomials of the local Taylor data, and the
hand-expanded expressions for c_1 and c_2 in terms of
Psi_m = psi^(m)/psi'' and F_m = f^(m)/f.  They must agree.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp

from .numerics import exp_compose
from .phase import Params, SaddleData, logs, psi_derivs_z


@dataclass(frozen=True)
class LocalExpansion:
    """Taylor data at a saddle.

    psi(t) - psi(t_s) = sum_r alpha_hat[r] (t - t_s)^(r+2)
    f(t)              = sum_r beta_hat[r] (t - t_s)^r
    """

    alpha_hat: tuple
    beta_hat: tuple
    saddle: SaddleData | None = None


def amplitude_log_derivs(t, p: Params, m: int) -> list:
    """Derivatives 1..m of log f with f = t^(b-1) (t-1)^(c-b-1) (1-zt)^(-a)."""
    t = mp.mpc(t)
    z = mp.mpc(p.z)
    a, b, c = mp.mpc(p.a), mp.mpc(p.b), mp.mpc(p.c)
    e1, e2 = b - 1, c - b - 1
    out = []
    fact = mp.mpf(1)
    for k in range(1, m + 1):
        if k > 1:
            fact *= k - 1
        sgn = 1 if k % 2 else -1
        out.append(fact * (sgn * (e1 / t**k + e2 / (t - 1) ** k) + a * (z / (1 - z * t)) ** k))
    return out


def amplitude_value(t, p: Params, offsets=(0, 0, 0)):
    """f(t) on the sheets given by ``offsets``; equals 1/(t-1) for a=0, b=c=1."""
    if p.is_standard:
        return 1 / (mp.mpc(t) - 1)
    l1, l2, l3 = logs(t, p.z, offsets)
    a, b, c = mp.mpc(p.a), mp.mpc(p.b), mp.mpc(p.c)
    return mp.exp((b - 1) * l1 + (c - b - 1) * l2 - a * l3)


def amplitude_taylor(t, p: Params, R: int, f0=None) -> list:
    """beta_hat_0..beta_hat_R, the Taylor coefficients of f at t."""
    if f0 is None:
        f0 = amplitude_value(t, p)
    if p.is_standard:
        d = 1 / (mp.mpc(t) - 1)
        return [(-1) ** r * d ** (r + 1) for r in range(R + 1)]
    ld = amplitude_log_derivs(t, p, R)
    fact = mp.mpf(1)
    a = []
    for k, v in enumerate(ld, start=1):
        fact *= k
        a.append(v / fact)
    return [f0 * bk for bk in exp_compose(a)]


def local_expansions(s: SaddleData, p: Params, R: int) -> LocalExpansion:
    """alpha_hat_0..alpha_hat_R and beta_hat_0..beta_hat_R at the saddle ``s``."""
    d = psi_derivs_z(s.t, p.z, p.alpha, R + 2)
    if abs(d[1]) < mp.mpf(10) ** (-10):
        raise ValueError("psi'' vanishes: this is a double saddle")
    fact = mp.mpf(1)
    ah = []
    for k in range(2, R + 3):
        fact *= k
        ah.append(d[k - 1] / fact)
    f0 = amplitude_value(s.t, p, s.offsets)
    bh = amplitude_taylor(s.t, p, R, f0)
    return LocalExpansion(tuple(ah), tuple(bh), s)


def bell_table(alpha_hat, K: int) -> list:
    """Partial ordinary Bell polynomials B[k][j] in alpha_hat_1, alpha_hat_2, ...

    ``alpha_hat`` is the full list starting at alpha_hat_0; the zeroth entry
    is not used by the recursion.
    """
    B = [[mp.mpc(0)] * (K + 1) for _ in range(K + 1)]
    B[0][0] = mp.mpc(1)
    for k in range(1, K + 1):
        for j in range(1, k + 1):
            acc = mp.mpc(0)
            for r in range(1, k - j + 2):
                acc += alpha_hat[r] * B[k - r][j - 1]
            B[k][j] = acc
    return B


def wojdylo_c(le: LocalExpansion, s: int, bell=None):
    """c_s from Wojdylo's formula (rising factorial (s + 1/2)_j)."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    if s == 0:
        return mp.mpc(1)
    if len(le.alpha_hat) < 2 * s + 1 or len(le.beta_hat) < 2 * s + 1:
        raise ValueError(f"local expansion too short for c_{s}")
    a0 = le.alpha_hat[0]
    if a0 == 0:
        raise ZeroDivisionError("alpha_hat_0 = 0 (double saddle)")
    extra = 10 if s <= 3 else 10 + 4 * s
    with mp.extradps(extra):
        B = bell if bell is not None else bell_table(le.alpha_hat, 2 * s)
        b0 = le.beta_hat[0]
        half = mp.mpf(s) + mp.mpf(1) / 2
        # weights (-1)^j (s+1/2)_j / (j! a0^j)
        w = [mp.mpc(1)]
        for j in range(1, 2 * s + 1):
            w.append(w[-1] * (-(half + j - 1)) / (j * a0))
        total = mp.mpc(0)
        for k in range(2 * s + 1):
            inner = mp.fsum(w[j] * B[k][j] for j in range(k + 1))
            total += le.beta_hat[2 * s - k] / b0 * inner
        out = (-1) ** s / a0**s * total
    return +out


def wojdylo_all(le: LocalExpansion, s_max: int) -> list:
    """[c_0, ..., c_s_max] sharing one Bell table."""
    with mp.extradps(10 + 4 * max(0, s_max - 3)):
        B = bell_table(le.alpha_hat, 2 * s_max)
    return [wojdylo_c(le, s, B) for s in range(s_max + 1)]


def explicit_c12(s: SaddleData, p: Params) -> tuple:
    """c_1 and c_2 from the closed expressions in Psi_m and F_m.

    With F_m = 0 this gives c_1 = -(5 Psi_3^2/6 - Psi_4/2)/(2 psi'').
    """
    d = psi_derivs_z(s.t, p.z, p.alpha, 6)
    p2 = d[1]
    if abs(p2) < mp.mpf(10) ** (-10):
        raise ValueError("psi'' vanishes: this is a double saddle")
    P3, P4, P5, P6 = (d[m - 1] / p2 for m in (3, 4, 5, 6))
    bh = amplitude_taylor(s.t, p, 4, amplitude_value(s.t, p, s.offsets))
    fact = [1, 1, 2, 6, 24]
    F1, F2, F3, F4 = (fact[m] * bh[m] / bh[0] for m in (1, 2, 3, 4))
    # the integrand here is exp(+lam psi); the familiar form of c_1 is written
    # for exp(-lam psi), which flips the sign of the odd power of 1/psi''
    c1 = -(2 * F2 - 2 * P3 * F1 + mp.mpf(5) / 6 * P3**2 - P4 / 2) / (2 * p2)
    c2 = (
        mp.mpf(2) / 3 * F4
        - mp.mpf(20) / 9 * P3 * F3
        + mp.mpf(5) / 3 * (mp.mpf(7) / 3 * P3**2 - P4) * F2
        - mp.mpf(35) / 9 * (P3**3 - P3 * P4 + mp.mpf(6) / 35 * P5) * F1
        + mp.mpf(35)
        / 9
        * (mp.mpf(11) / 24 * P3**4 - mp.mpf(3) / 4 * (P3**2 - P4 / 6) * P4 + P3 * P5 / 5 - P6 / 35)
    ) / (2 * p2) ** 2
    return c1, c2
