"""Legendre functions of degree lam and order +-i alpha lam.

With z = 1/2 - x/2 and X = ((x-1)/(x+1))^(i alpha lam / 2),

    P^{-i alpha lam}(x) = X F_alpha(lam; z) / Gamma(1 + i alpha lam),

and e^{-pi alpha lam} Q^{-i alpha lam}(x) combines F_alpha and
F_{-alpha}(lam; z) = conj F_alpha(lam; conj z).  Q is always carried in
that scaled form: e^{pi alpha lam} alone overflows double range at
lam = 80, alpha = 1.

At x = sqrt(1 + alpha^2) the argument z is the coalescence point z_d^-
and the values come from the double-saddle expansion instead.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

from mpmath import mp

from . import coalescence
from .expansion import evaluate
from .numerics import log_gamma
from .oracle import oracle
from .phase import Params

__all__ = [
    "LegendreArgs",
    "legendre_P",
    "legendre_Q",
    "legendre_P_coalescence",
    "legendre_Q_coalescence",
    "unscale_Q",
]

COALESCENCE_TOL = 1e-12


@dataclass(frozen=True)
class LegendreArgs:
    lam: float
    alpha: float
    x: complex
    order_sign: int = -1  # -1 for P^{-i alpha lam}, +1 for P^{+i alpha lam}

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.order_sign not in (-1, 1):
            raise ValueError("order_sign must be -1 or +1")
        x = complex(self.x)
        if x.imag == 0 and x.real <= 1:
            raise ValueError("x lies on the cut (-inf, 1]")
        object.__setattr__(self, "x", x)

    @property
    def z(self) -> complex:
        return 0.5 - 0.5 * self.x

    @property
    def at_coalescence(self) -> bool:
        """True when x = sqrt(1 + alpha^2), i.e. z = z_d^-."""
        return abs(self.x - (1 + self.alpha**2) ** 0.5) < COALESCENCE_TOL


def _power(x, lam, alpha, sign=1):
    """((x-1)/(x+1))^(sign i alpha lam / 2) on the principal branch."""
    x = mp.mpc(x)
    return mp.exp(sign * 0.5j * mp.mpf(alpha) * mp.mpf(lam) * mp.log((x - 1) / (x + 1)))


def _F(lam, alpha, z, s_max, method):
    """F_alpha(lam; z) from the steepest-descent expansion or the oracle."""
    if method == "oracle":
        if int(lam) != lam:
            raise ValueError("the oracle route needs an integer lam")
        return oracle(int(lam), alpha, z)
    if method != "asymptotic":
        raise ValueError(f"unknown method {method!r}")
    return evaluate(Params(float(alpha), float(lam), complex(z)), s_max=s_max).value


def _F_minus(lam, alpha, z, s_max, method):
    """F_{-alpha}(lam; z) = conj F_alpha(lam; conj z)."""
    return mp.conj(_F(lam, alpha, mp.conj(mp.mpc(z)), s_max, method))


def _P_minus(lam, alpha, x, s_max, method):
    z = (1 - mp.mpc(x)) / 2
    with mp.extradps(10):
        lg = log_gamma(1 + 1j * mp.mpf(alpha) * mp.mpf(lam))
        out = _power(x, lam, alpha) * _F(lam, alpha, z, s_max, method) * mp.exp(-lg)
    return +out


def legendre_P(args: LegendreArgs, s_max: int = 2, method: str = "asymptotic"):
    """P_lam^{-+i alpha lam}(x).

    ``method="oracle"`` substitutes the exact series for F (integer lam);
    at x = sqrt(1 + alpha^2) the asymptotic route switches to the
    coalescence expansion with M = 3 s_max + 4 terms.
    """
    if args.at_coalescence and method == "asymptotic":
        return legendre_P_coalescence(args.lam, args.alpha, 3 * s_max + 4, args.order_sign)
    if args.order_sign == -1:
        return _P_minus(args.lam, args.alpha, args.x, s_max, method)
    # P^{+i alpha lam}(x) = conj P^{-i alpha lam}(conj x) for real lam
    return mp.conj(_P_minus(args.lam, args.alpha, mp.conj(args.x), s_max, method))


def _Q_minus_scaled(lam, alpha, x, s_max, method):
    lam, alpha = mp.mpf(lam), mp.mpf(alpha)
    z = (1 - mp.mpc(x)) / 2
    ial = 1j * alpha * lam
    beta = 1 - 1j * alpha
    with mp.extradps(10):
        Fp = _F(lam, alpha, z, s_max, method)
        Fm = _F_minus(lam, alpha, z, s_max, method)
        t1 = mp.gamma(-ial) / 2 * _power(x, lam, alpha) * Fp
        ratio = mp.exp(log_gamma(1 + lam * beta) - log_gamma(1 + lam * mp.conj(beta)))
        t2 = mp.gamma(ial) * ratio / 2 * _power(x, lam, alpha, -1) * Fm
        out = t1 + t2
    return +out


def _Q_flip(lam, alpha):
    """Factor taking e^{-pi alpha lam} Q^{-i alpha lam} to e^{-pi alpha lam} Q^{+i alpha lam}."""
    lam, alpha = mp.mpf(lam), mp.mpf(alpha)
    beta = 1 - 1j * alpha
    return mp.exp(log_gamma(1 + lam * mp.conj(beta)) - log_gamma(1 + lam * beta) - 2 * mp.pi * alpha * lam)


def legendre_Q(args: LegendreArgs, s_max: int = 2, method: str = "asymptotic"):
    """e^{-pi alpha lam} Q_lam^{-+i alpha lam}(x) (always the scaled value)."""
    if args.at_coalescence and method == "asymptotic":
        return legendre_Q_coalescence(args.lam, args.alpha, 3 * s_max + 4, args.order_sign)
    out = _Q_minus_scaled(args.lam, args.alpha, args.x, s_max, method)
    if args.order_sign == 1:
        out = out * _Q_flip(args.lam, args.alpha)
    return out


def unscale_Q(scaled, lam, alpha):
    """Q from e^{-pi alpha lam} Q; refuses values outside double range."""
    out = scaled * mp.exp(mp.pi * mp.mpf(alpha) * mp.mpf(lam))
    if abs(out) > sys.float_info.max:
        raise OverflowError("Q exceeds double range; keep the scaled value")
    return out


def _coalescence_pieces(lam, alpha, M):
    lam, alpha = mp.mpf(lam), mp.mpf(alpha)
    beta = 1 - 1j * alpha
    s = mp.sqrt(1 + alpha**2)
    R = mp.exp(log_gamma(1 + lam * beta) - log_gamma(1 + lam))
    X = _power(s, lam, alpha)
    E = mp.exp(lam * coalescence.cubic_coeffs(alpha).psi_d) * coalescence.S_sum(lam, alpha, M)
    return R, X, E


def legendre_P_coalescence(lam, alpha, M: int = 10, order_sign: int = -1):
    """P_lam^{-+i alpha lam}(sqrt(1 + alpha^2)) from the double-saddle expansion."""
    with mp.workdps(max(mp.dps, coalescence.COALESCENCE_DPS)):
        R, X, E = _coalescence_pieces(lam, alpha, M)
        out = -R * X * E / mp.pi
        if order_sign == 1:
            out = mp.conj(out)
    return +out


def legendre_Q_coalescence(lam, alpha, M: int = 10, order_sign: int = -1):
    """e^{-pi alpha lam} Q_lam^{-+i alpha lam}(sqrt(1 + alpha^2)) from the double-saddle expansion."""
    with mp.workdps(max(mp.dps, coalescence.COALESCENCE_DPS)):
        R, X, E = _coalescence_pieces(lam, alpha, M)
        out = R * mp.im(X * E) / mp.sinh(mp.pi * mp.mpf(alpha) * mp.mpf(lam))
        if order_sign == 1:
            out = out * _Q_flip(lam, alpha)
    return +out
