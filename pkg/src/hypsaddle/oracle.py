"""Reference values: the terminating series, the closed form at z = 1/2,
and the conjugation map between F_alpha and F_{-alpha}.

For a positive integer lam the series for F(-lam, 1 + lam; 1 + i alpha lam; z)
is a polynomial of degree lam, so it can be summed exactly.  Its terms
grow far larger than the sum for |z| of order one, so the working
precision is raised until the digits lost to cancellation are covered.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import mpmath
from mpmath import mp

from .numerics import GammaPoleError, log_gamma

log = logging.getLogger(__name__)

GUARD_DIGITS = 10


@dataclass(frozen=True)
class OracleConfig:
    lam: int
    alpha: float
    z: complex
    precision_digits: int = 64
    # general parameters; a - lam must be a nonpositive integer
    a: complex = 0
    b: complex = 1
    c: complex = 1

    def __post_init__(self):
        if int(self.lam) != self.lam or self.lam < 1:
            raise ValueError("the oracle needs a positive integer lam")
        if self.precision_digits < 16:
            raise ValueError("precision_digits must be at least 16")
        if self.lam >= 40 and self.precision_digits < 32:
            raise ValueError("precision_digits must be at least 32 when lam >= 40")
        n_terms = self.a - self.lam
        if complex(n_terms).imag != 0 or complex(n_terms).real != int(complex(n_terms).real) or complex(n_terms).real > 0:
            raise ValueError("a - lam must be a nonpositive integer for the series to terminate")


def _sum_terms(cfg: OracleConfig, dps: int):
    with mp.workdps(dps):
        lam = mp.mpf(int(cfg.lam))
        alpha = mp.mpf(cfg.alpha)
        z = mp.mpc(cfg.z)
        ap = mp.mpc(cfg.a) - lam
        bp = mp.mpc(cfg.b) + lam
        cp = mp.mpc(cfg.c) + 1j * alpha * lam
        n_max = int(-complex(cfg.a - cfg.lam).real)
        term = mp.mpc(1)
        total = mp.mpc(1)
        biggest = mp.mpf(1)
        for n in range(n_max):
            den = (cp + n) * (n + 1)
            if den == 0:
                raise ZeroDivisionError("c + i alpha lam is a nonpositive integer")
            term = term * (ap + n) * (bp + n) * z / den
            total += term
            biggest = max(biggest, abs(term))
        return total, biggest


def oracle_F(cfg: OracleConfig):
    """Sum the terminating series, raising precision to cover cancellation.

    The returned value carries ``cfg.precision_digits`` correct digits
    (up to a few units of rounding); it is an ``mpc`` at the caller's
    working precision.
    """
    dps = cfg.precision_digits + GUARD_DIGITS
    for _ in range(8):
        total, biggest = _sum_terms(cfg, dps)
        if total == 0:
            lost = dps
        else:
            lost = max(0, int(mpmath.ceil(mpmath.log10(biggest / abs(total)))))
        if dps - lost >= cfg.precision_digits + 2:
            return +total
        dps = cfg.precision_digits + lost + GUARD_DIGITS
        log.debug("oracle: %d digits lost to cancellation, retrying at %d", lost, dps)
    raise ArithmeticError("oracle cancellation could not be controlled")


def oracle(lam: int, alpha, z, precision_digits: int = 64, a=0, b=1, c=1):
    """Convenience wrapper around :func:`oracle_F`."""
    return oracle_F(OracleConfig(int(lam), alpha, z, precision_digits, a, b, c))


def exact_half(lam, alpha):
    """F at z = 1/2 in closed form.

    2^{-i alpha lam} sqrt(pi) Gamma(1 + i alpha lam)
        / (Gamma(1/2 + lam(i alpha - 1)/2) Gamma(1 + lam(i alpha + 1)/2))

    A pole of a denominator Gamma makes F vanish; zero is returned then.
    """
    lam = mp.mpf(lam)
    alpha = mp.mpf(alpha)
    with mp.extradps(10):
        num = -1j * alpha * lam * mp.log(2) + mp.log(mp.pi) / 2 + log_gamma(1 + 1j * alpha * lam)
        try:
            den = log_gamma(mp.mpf(1) / 2 + lam * (1j * alpha - 1) / 2) + log_gamma(1 + lam * (1j * alpha + 1) / 2)
        except GammaPoleError:
            return mp.mpc(0)
        out = mp.exp(num - den)
    return +out


def conjugate_flip(alpha, z, value):
    """Map F_alpha(lam; conj z) to F_{-alpha}(lam; z) by conjugation.

    ``value`` must be F_alpha evaluated at ``conj(z)``; ``alpha`` and ``z``
    are accepted for symmetry with the other entry points and checked.
    """
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    del z
    return mp.conj(value)
