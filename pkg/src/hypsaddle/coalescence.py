"""Expansion of F at the coalescence point z = z_d^-.

At z_d^- the saddles t_s1 and t_s2 merge into a double saddle t_d, and

    -u = psi(t) - psi(t_d) = A tau^3 + B tau^4 + C tau^5 + D tau^6 + ...

with tau = t - t_d.  Inverting this for tau as a series in w^(1/3) and
multiplying dtau/dw by the amplitude gives the ladder

    f(t) dtau/dw = sum_m B_m w^((m-2)/3),

and the two halves of the loop (w = u e^{+-i pi}) combine into

    F ~ -(G/pi) e^{lam psi(t_d)} sum_m B_m Gamma((m+1)/3) lam^{-(m+1)/3} sin(pi (m+1)/3).

Everything here runs at 64 digits or more; the coefficient ladders pass
through a reversion and a composition, which eat several digits.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from mpmath import mp

from .coeffs import amplitude_taylor, amplitude_value
from .expansion import G_exact, G_general
from .numerics import Series, series_compose, series_derivative, series_mul, series_revert_root
from .phase import Params, double_points, double_saddle, psi_derivs_z

__all__ = [
    "CubicData",
    "ROOT_SELECTOR",
    "cubic_coeffs",
    "calB_coeffs",
    "calB_closed",
    "calB_general",
    "calB_general_closed",
    "gamma_coeffs",
    "coalescence_terms",
    "F_at_coalescence",
    "F_general_at_coalescence",
    "two_branch_sum",
    "select_root",
]

COALESCENCE_DPS = 64

# branch of A^(1/3): principal.  select_root() re-derives it from an oracle probe.
ROOT_SELECTOR = 0


class CubicMismatchError(ArithmeticError):
    """The closed-form cubic coefficients disagree with the Taylor data."""


@dataclass(frozen=True)
class CubicData:
    alpha: object
    A: object
    B: object
    C: object
    D: object
    T: object
    kappa: object
    td: object
    zd: object
    psi_d: object
    taylor: tuple  # a_3, a_4, ... with psi(t_d + tau) - psi(t_d) = sum a_k tau^k
    root_selector: int = ROOT_SELECTOR

    @property
    def cbrt_A(self):
        """The selected value of A^(1/3)."""
        return mp.cbrt(self.A) * mp.exp(2j * mp.pi * self.root_selector / 3)


def _closed_ABCD(alpha):
    a = mp.mpf(alpha)
    s = mp.sqrt(1 + a**2)
    ia = 1j * a
    A = -((1 + ia) ** 3) / (6 * a**2 * s) * (a**2 * (-3 + s) + 4 * (-1 + s))
    B = (1 + ia) ** 3 * (a + 2j) / (8 * a**3 * (1 - ia)) * (a**4 - 4 * a**2 * (-2 + s) - 8 * (-1 + s))
    C = (
        (1 + ia) ** 4
        * (6 - 5 * ia - a**2)
        / (20 * a**4 * (1 - ia) * s)
        * (a**4 * (-5 + s) + 4 * a**2 * (-5 + 3 * s) + 16 * (-1 + s))
    )
    D = (
        -1j
        * (1 + ia) ** 4
        / (24 * a**5 * (1 - ia) ** 2)
        * (8 - 9 * ia - 3 * a**2)
        * (a**6 - 6 * a**4 * (-3 + s) - 16 * a**2 * (-3 + 2 * s) - 32 * (-1 + s))
    )
    return A, B, C, D


def _taylor_at_td(alpha, order: int, td, zd) -> list:
    """a_3..a_order of psi(t_d + tau) - psi(t_d); a_1 = a_2 = 0 at a double saddle."""
    d = psi_derivs_z(td, zd, alpha, order)
    out = []
    fact = mp.mpf(1)
    for k in range(1, order + 1):
        fact *= k
        if k >= 3:
            out.append(d[k - 1] / fact)
    return out


@functools.lru_cache(maxsize=64)
def _cubic_cached(alpha, order: int, root: int, dps: int) -> CubicData:
    with mp.workdps(dps):
        zd, _ = double_points(alpha)
        ds = double_saddle(alpha)
        td = ds.t
        d12 = psi_derivs_z(td, zd, alpha, 2)
        scale = max(abs(x) for x in psi_derivs_z(td, zd, alpha, 4))
        if max(abs(d12[0]), abs(d12[1])) > mp.mpf(10) ** (-(dps - 10)) * scale:
            raise CubicMismatchError("psi' and psi'' do not both vanish at t_d")
        closed = _closed_ABCD(alpha)
        taylor = _taylor_at_td(alpha, max(order, 6), td, zd)
        tol = mp.mpf(10) ** (-min(30, dps - 20))
        for name, c, t in zip("ABCD", closed, taylor):
            if abs(c - t) > tol * abs(t):
                raise CubicMismatchError(f"closed form for {name} disagrees with the Taylor coefficient: {c} vs {t}")
        A, B, C, D = closed
        T = td - 1
        kappa = zd * td / (1 - zd * td)
        return CubicData(mp.mpf(alpha), A, B, C, D, T, kappa, td, zd, ds.psi, tuple(taylor), root)


def cubic_coeffs(alpha, order: int = 6, root: int = ROOT_SELECTOR) -> CubicData:
    """A, B, C, D at t_d, checked against direct Taylor coefficients of psi.

    ``order`` is the highest Taylor coefficient kept in ``taylor`` (the
    reversion needs order M + 3 for B_0..B_M).
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if root not in (0, 1, 2):
        raise ValueError("root selector must be 0, 1 or 2")
    return _cubic_cached(mp.mpf(alpha), int(order), int(root), max(mp.dps, COALESCENCE_DPS))


def _tau_of_w(cd: CubicData, M: int) -> Series:
    """tau as a series in w^(1/3), known through w^((M+1)/3)."""
    u = Series((0, 0, 0) + cd.taylor[: M + 2], 1, 0)
    return series_revert_root(u, 3, cd.root_selector)


def _ladder(cd: CubicData, amp_taylor: list, M: int) -> list:
    tau = _tau_of_w(cd, M)
    f_of_w = series_compose(Series(tuple(amp_taylor[: M + 1]), 1, 0), tau)
    prod = series_mul(f_of_w, series_derivative(tau))
    if prod.lead != -2 or len(prod) < M + 1:
        raise ArithmeticError("coefficient ladder came out too short")
    return list(prod.coeffs[: M + 1])


def calB_coeffs(alpha, M: int, scaled: bool = False, root: int = ROOT_SELECTOR) -> list:
    """B_0(alpha)..B_M(alpha) for f = 1/(t - 1).

    With ``scaled=True`` the values T B_m are returned; that is the
    normalization of reference table 3 (see the README).
    """
    if M < 0:
        raise ValueError("M must be nonnegative")
    with mp.workdps(max(mp.dps, COALESCENCE_DPS) + 2 * M):
        cd = cubic_coeffs(alpha, M + 3, root)
        T = cd.T
        amp = [(-1) ** r / T ** (r + 1) for r in range(M + 1)]
        out = _ladder(cd, amp, M)
        if scaled:
            out = [T * b for b in out]
    return [+b for b in out]


def calB_closed(alpha, root: int = ROOT_SELECTOR) -> list:
    """The closed forms for B_0..B_3 (used to check the series pipeline)."""
    with mp.workdps(max(mp.dps, COALESCENCE_DPS)):
        cd = cubic_coeffs(alpha, 6, root)
        A, B, C, D, T = cd.A, cd.B, cd.C, cd.D, cd.T
        a13 = cd.cbrt_A
        b0 = 1 / (3 * a13 * T)
        b1 = -(3 + 2 * B * T / A) / (9 * a13**2 * T**2)
        b2 = (1 + B * T / A * (1 + B * T / A) - C * T**2 / A) / (3 * A * T**3)
        b3 = -(
            81 + 140 * B**3 * T**3 / A**3 + 126 * B * T**2 / A**2 * (B - 2 * C * T) + 108 * T / A * (B - C * T + D * T**2)
        ) / (243 * a13**4 * T**4)
    return [b0, b1, b2, b3]


def _general_params(alpha, a, b, c) -> Params:
    zd, _ = double_points(alpha)
    return Params(float(alpha), 1.0, complex(zd), complex(a), complex(b), complex(c))


def T_hat(alpha, a=0, b=1, c=1):
    """T-hat with 1/T-hat = f(t_d) on principal branches."""
    with mp.workdps(max(mp.dps, COALESCENCE_DPS)):
        cd = cubic_coeffs(alpha)
        p = _ExactZ(_general_params(alpha, a, b, c), cd.zd)
        return 1 / amplitude_value(cd.td, p)


def calB_general(alpha, a, b, c, M: int, root: int = ROOT_SELECTOR) -> list:
    """B-hat_0..B-hat_M for the amplitude t^(b-1) (t-1)^(c-b-1) (1 - z t)^(-a)."""
    if M < 0:
        raise ValueError("M must be nonnegative")
    with mp.workdps(max(mp.dps, COALESCENCE_DPS) + 2 * M):
        cd = cubic_coeffs(alpha, M + 3, root)
        p = _general_params(alpha, a, b, c)
        # Params stores z in double precision; rebuild the expansion at the exact z_d
        p_exact = _ExactZ(p, cd.zd)
        amp = amplitude_taylor(cd.td, p_exact, M, amplitude_value(cd.td, p_exact))
        out = _ladder(cd, amp, M)
    return [+x for x in out]


class _ExactZ:
    """Params look-alike carrying z at full precision (z_d is irrational)."""

    def __init__(self, p: Params, z):
        self.alpha, self.lam, self.a, self.b, self.c = p.alpha, p.lam, p.a, p.b, p.c
        self.z = z
        # always take the general log/exp route, so that a = 0, b = c = 1
        # is an independent check on the calB_coeffs ladder
        self.is_standard = False


def gamma_coeffs(alpha, a, b, c, root: int = ROOT_SELECTOR) -> list:
    """gamma_1..gamma_3 with log f = -log T-hat + sum gamma_n (w/A)^(n/3)."""
    cd = cubic_coeffs(alpha, 6, root)
    a, b, c = mp.mpc(a), mp.mpc(b), mp.mpc(c)
    A, B, C, T, td, k = cd.A, cd.B, cd.C, cd.T, cd.td, cd.kappa
    e1, e2 = b - 1, c - b - 1
    g1 = e2 / T + (e1 + k * a) / td
    g2 = -(e1 - k**2 * a) / (2 * td**2) - e2 / (2 * T**2) - g1 * B / (3 * A)
    g3 = (B**2 - 3 * A * C) * g1 / (9 * A**2) - 2 * B * g2 / (3 * A) + (e1 + k**3 * a) / (3 * td**3) + e2 / (3 * T**3)
    return [g1, g2, g3]


def calB_general_closed(alpha, a, b, c, root: int = ROOT_SELECTOR) -> dict:
    """Closed forms for B-hat_0, B-hat_1 and B-hat_3, keyed by m."""
    with mp.workdps(max(mp.dps, COALESCENCE_DPS)):
        cd = cubic_coeffs(alpha, 6, root)
        A, B, C, D = cd.A, cd.B, cd.C, cd.D
        a13 = cd.cbrt_A
        Th = T_hat(alpha, a, b, c)
        g1, g2, g3 = gamma_coeffs(alpha, a, b, c, root)
        D1 = g1
        D2 = g1**2 / 2 + g2
        D3 = g1**3 / 6 + g1 * g2 + g3
        h0 = 1 / (3 * a13 * Th)
        h1 = (3 * g1 - 2 * B / A) / (9 * a13**2 * Th)
        h3 = -(
            4 / A**3 * (35 * B**3 - 63 * A * B * C + 27 * A**2 * D)
            - 81 / A**2 * (B**2 - A * C) * D1
            + 54 * B * D2 / A
            - 81 * D3
        ) / (243 * a13**4 * Th)
    return {0: h0, 1: h1, 3: h3}


def coalescence_terms(lam, coeffs) -> list:
    """B_m Gamma((m+1)/3) lam^{-(m+1)/3} sin(pi (m+1)/3) for each supplied B_m."""
    lam = mp.mpf(lam)
    out = []
    for m, Bm in enumerate(coeffs):
        if m % 3 == 2:
            out.append(mp.mpc(0))  # sin(pi (m+1)/3) = 0 exactly
            continue
        e = mp.mpf(m + 1) / 3
        out.append(Bm * mp.gamma(e) * lam ** (-e) * mp.sinpi(e))
    return out


def F_at_coalescence(lam, alpha, M: int = 10, root: int = ROOT_SELECTOR, prefactor=None):
    """-(G/pi) e^{lam psi(t_d)} times the partial sum m = 0..M."""
    with mp.workdps(max(mp.dps, COALESCENCE_DPS)):
        Bm = calB_coeffs(alpha, M, root=root)
        G = G_exact(lam, alpha) if prefactor is None else prefactor
        S = mp.fsum(coalescence_terms(lam, Bm))
        out = -G / mp.pi * mp.exp(mp.mpf(lam) * cubic_coeffs(alpha).psi_d) * S
    return +out


def S_sum(lam, alpha, M: int = 10, root: int = ROOT_SELECTOR):
    """S(lam; alpha), the partial sum through m = M."""
    with mp.workdps(max(mp.dps, COALESCENCE_DPS)):
        return +mp.fsum(coalescence_terms(lam, calB_coeffs(alpha, M, root=root)))


def F_general_at_coalescence(lam, alpha, a=0, b=1, c=1, M: int = 10, root: int = ROOT_SELECTOR):
    """General a, b, c at z_d^-.

    Carries the same overall sign as F_at_coalescence, so that a = 0,
    b = c = 1 reproduces it.
    """
    with mp.workdps(max(mp.dps, COALESCENCE_DPS)):
        Bh = calB_general(alpha, a, b, c, M, root)
        G = G_general(lam, alpha, a, b, c)
        S = mp.fsum(coalescence_terms(lam, Bh))
        out = -G / mp.pi * mp.exp(mp.mpf(lam) * cubic_coeffs(alpha).psi_d) * S
    return +out


def two_branch_sum(lam, alpha, M: int = 4, root: int = ROOT_SELECTOR):
    """Assemble the coalescence value from the two path halves explicitly.

    On the half where w = u e^{-i pi} and the one where w = u e^{+i pi},
    dt/du = e^{-+i pi} dtau/dw, and the Laplace integrals are done term by
    term; no sine factor is used.
    """
    with mp.workdps(max(mp.dps, COALESCENCE_DPS)):
        lam = mp.mpf(lam)
        Bm = calB_coeffs(alpha, M, root=root)
        total = mp.mpc(0)
        for m, b in enumerate(Bm):
            e = mp.mpf(m - 2) / 3
            lower = mp.expj(-mp.pi * e) * mp.expj(-mp.pi)
            upper = mp.expj(mp.pi * e) * mp.expj(mp.pi)
            total += b * (lower - upper) * mp.gamma(e + 1) / lam ** (e + 1)
        G = G_exact(lam, alpha)
        out = G * mp.exp(lam * cubic_coeffs(alpha).psi_d) / (2j * mp.pi) * total
    return +out


def select_root(alpha=1, lam: int = 10) -> int:
    """Pick the cube-root branch whose M = 0 value matches the oracle in argument."""
    from .oracle import oracle

    with mp.workdps(COALESCENCE_DPS):
        zd, _ = double_points(alpha)
        ref = oracle(lam, alpha, zd, 64)
        best, best_gap = None, None
        for r in (0, 1, 2):
            v = F_at_coalescence(lam, alpha, 0, root=r)
            gap = abs(mp.arg(v / ref))
            if best_gap is None or gap < best_gap:
                best, best_gap = r, gap
        if best_gap > mp.pi / 3:
            raise ArithmeticError("no cube-root branch matches the oracle in argument")
    return best
