"""Extended-precision substrate: truncated power series, log-gamma, Bernoulli numbers.

Complex numbers at working precision are :class:`mpmath.mpc` values; the
working precision is taken from ``mpmath.mp`` at call time, and public
entry points that care accept an explicit ``dps`` which is applied with
``mpmath.workdps``.

Series are stored on an exponent grid ``k * step`` with ``step`` either 1
or 1/3.  A series knows its coefficients from ``lead * step`` up to and
including ``order``; nothing beyond ``order`` is claimed.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

import mpmath
from mpmath import mp

BigComplex = mpmath.mpc

DEFAULT_DPS = 64

_ALLOWED_STEPS = (Fraction(1), Fraction(1, 3))


class SeriesError(ValueError):
    """Raised for ill-posed series operations (zero leading term, bad grid)."""


def _c(x) -> mpmath.mpc:
    return mp.mpc(x)


@dataclass(frozen=True)
class Series:
    """Truncated series ``sum_k coeffs[k] * x**((lead + k) * step)``."""

    coeffs: tuple
    step: Fraction = Fraction(1)
    lead: int = 0

    def __post_init__(self):
        step = Fraction(self.step)
        if step not in _ALLOWED_STEPS:
            raise SeriesError(f"unsupported exponent step {step}")
        object.__setattr__(self, "step", step)
        object.__setattr__(self, "coeffs", tuple(_c(c) for c in self.coeffs))
        if not self.coeffs:
            raise SeriesError("a series needs at least one known coefficient")

    @classmethod
    def from_list(cls, coeffs: Sequence, step=1, lead: int = 0) -> "Series":
        return cls(tuple(coeffs), Fraction(step), lead)

    @property
    def order(self) -> Fraction:
        """Highest exponent whose coefficient is known."""
        return (self.lead + len(self.coeffs) - 1) * self.step

    @property
    def low(self) -> Fraction:
        return self.lead * self.step

    def __len__(self):
        return len(self.coeffs)

    def coeff(self, exponent) -> mpmath.mpc:
        """Coefficient of ``x**exponent`` (zero below ``lead``)."""
        k = Fraction(exponent) / self.step
        if k.denominator != 1:
            return _c(0)
        k = int(k) - self.lead
        if k < 0:
            return _c(0)
        if k >= len(self.coeffs):
            raise SeriesError(f"coefficient of x^{exponent} lies beyond the truncation order {self.order}")
        return self.coeffs[k]

    def on_grid(self, step) -> "Series":
        """Re-express on a finer grid (1 -> 1/3 only)."""
        step = Fraction(step)
        if step == self.step:
            return self
        if self.step == 1 and step == Fraction(1, 3):
            out = []
            for i, c in enumerate(self.coeffs):
                out.append(c)
                if i != len(self.coeffs) - 1:
                    out.extend((_c(0), _c(0)))
            return Series(tuple(out), step, 3 * self.lead)
        raise SeriesError(f"cannot coerce step {self.step} to {step}")

    def truncate(self, order) -> "Series":
        n = int((Fraction(order) / self.step)) - self.lead + 1
        if n <= 0:
            raise SeriesError("truncation removes every coefficient")
        return Series(self.coeffs[:n], self.step, self.lead)

    def normalized(self) -> "Series":
        """Drop exactly-zero leading coefficients (moves ``lead`` up)."""
        k = 0
        while k < len(self.coeffs) - 1 and self.coeffs[k] == 0:
            k += 1
        return Series(self.coeffs[k:], self.step, self.lead + k)

    def __add__(self, other):
        if not isinstance(other, Series):
            other = Series((other,))
        return series_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return Series(tuple(-c for c in self.coeffs), self.step, self.lead)

    def __sub__(self, other):
        if not isinstance(other, Series):
            other = Series((other,))
        return series_add(self, -other)

    def __mul__(self, other):
        if isinstance(other, Series):
            return series_mul(self, other)
        other = _c(other)
        return Series(tuple(c * other for c in self.coeffs), self.step, self.lead)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __call__(self, x):
        """Evaluate the truncated sum (principal powers for fractional steps)."""
        x = _c(x)
        total = _c(0)
        for k, c in enumerate(self.coeffs):
            e = (self.lead + k) * self.step
            if c != 0:
                total += c * mpmath.power(x, mp.mpf(e.numerator) / e.denominator)
        return total


def _common_step(a: Series, b: Series) -> Fraction:
    return min(a.step, b.step)


def series_add(a: Series, b: Series) -> Series:
    step = _common_step(a, b)
    a, b = a.on_grid(step), b.on_grid(step)
    lead = min(a.lead, b.lead)
    top = min(a.lead + len(a) - 1, b.lead + len(b) - 1)
    out = []
    for k in range(lead, top + 1):
        v = _c(0)
        if a.lead <= k:
            v += a.coeffs[k - a.lead]
        if b.lead <= k:
            v += b.coeffs[k - b.lead]
        out.append(v)
    return Series(tuple(out), step, lead)


def series_mul(a: Series, b: Series) -> Series:
    """Cauchy product, truncated where either factor stops being known."""
    step = _common_step(a, b)
    a, b = a.on_grid(step), b.on_grid(step)
    n = min(len(a), len(b))
    ca, cb = a.coeffs, b.coeffs
    out = []
    for k in range(n):
        v = _c(0)
        for i in range(k + 1):
            v += ca[i] * cb[k - i]
        out.append(v)
    return Series(tuple(out), step, a.lead + b.lead)


def series_derivative(a: Series) -> Series:
    """d/dx term by term; the lowest grid point shifts down by one unit of x."""
    shift = int(1 / a.step)
    out = []
    for k, c in enumerate(a.coeffs):
        e = (a.lead + k) * a.step
        out.append(c * mp.mpf(e.numerator) / e.denominator)
    lead = a.lead - shift
    if a.lead == 0 and len(out) > 1:
        # the constant's slot would sit at x^-1 with a zero coefficient
        out, lead = out[1:], lead + 1
    return Series(tuple(out), a.step, lead)


def exp_compose(a: Sequence) -> list:
    """Coefficients ``b_0..b_N`` of ``exp(sum_{n>=1} a_n x^n)``; ``a[0]`` is ``a_1``.

    Uses ``b_0 = 1``, ``b_n = (1/n) sum_{k=1}^n k a_k b_{n-k}``.
    """
    a = list(a)
    b = [mp.mpf(1)]
    for n in range(1, len(a) + 1):
        s = 0
        for k in range(1, n + 1):
            s += k * a[k - 1] * b[n - k]
        b.append(s / n)
    return b


def series_exp(a: Series) -> Series:
    if a.step != 1 or a.lead < 0:
        raise SeriesError("exp needs an integer-step series without negative powers")
    a = a.on_grid(1)
    coeffs = [_c(0)] * a.lead + list(a.coeffs)
    c0, rest = coeffs[0], coeffs[1:]
    b = exp_compose(rest)
    e0 = mp.exp(c0)
    return Series(tuple(e0 * x for x in b), 1, 0)


def series_log(a: Series, branch: int = 0) -> Series:
    """Logarithm of a series with nonzero constant term.

    The constant term is ``log a0 + 2*pi*i*branch`` (principal for branch 0).
    """
    if a.step != 1:
        raise SeriesError("log needs an integer-step series")
    if a.lead > 0 or a.coeffs[0] == 0:
        raise SeriesError("log needs a nonzero constant term")
    if a.lead < 0:
        raise SeriesError("log of a series with negative powers")
    c = a.coeffs
    L = [mp.log(c[0]) + 2j * mp.pi * branch]
    for n in range(1, len(c)):
        s = c[n]
        for k in range(1, n):
            s -= mp.mpf(k) / n * L[k] * c[n - k]
        L.append(s / c[0])
    return Series(tuple(L), 1, 0)


def series_pow(a: Series, p, branch: int = 0) -> Series:
    """``a**p`` via exp(p log a); the constant uses the principal log unless ``branch``."""
    return series_exp(series_log(a, branch) * p)


def series_compose(outer: Series, inner: Series) -> Series:
    """``outer(inner(x))`` for integer-step ``outer`` and ``inner`` with no constant term."""
    if outer.step != 1 or outer.lead < 0:
        raise SeriesError("outer series must be an ordinary power series")
    inner = inner.normalized()
    if inner.low <= 0:
        raise SeriesError("inner series must vanish at the origin")
    # every power inner**k is known to inner.order + (k-1)*inner.low; the
    # composite is known up to min over those and outer truncation
    n_outer = outer.lead + len(outer) - 1
    known = inner.order
    known = min(known, (n_outer + 1) * inner.low - inner.step)
    step = inner.step
    ncoef = int(known / step) + 1
    acc = [_c(0)] * ncoef
    pw = Series(tuple([_c(1)] + [_c(0)] * (ncoef - 1)), step, 0)
    for k in range(0, n_outer + 1):
        if k > 0:
            pw = series_mul(pw, inner)
        ck = outer.coeffs[k - outer.lead] if k >= outer.lead else _c(0)
        if ck == 0:
            continue
        for i, c in enumerate(pw.coeffs):
            idx = pw.lead + i
            if 0 <= idx < ncoef:
                acc[idx] += ck * c
    return Series(tuple(acc), step, 0)


def series_revert(u: Series) -> Series:
    """Compositional inverse of ``u = u1 x + u2 x^2 + ...`` (``u1 != 0``)."""
    if u.step != 1:
        raise SeriesError("ordinary reversion needs an integer-step series")
    coeffs = [_c(0)] * u.lead + list(u.coeffs) if u.lead >= 0 else None
    if coeffs is None or coeffs[0] != 0:
        raise SeriesError("series to revert must vanish at the origin")
    if len(coeffs) < 2 or coeffs[1] == 0:
        raise SeriesError("vanishing linear coefficient; reversion is not ordinary")
    n = len(coeffs) - 1  # known through x^n
    u1 = coeffs[1]
    inv = [_c(0), 1 / u1]
    for m in range(2, n + 1):
        # coefficient of y^m in u(inv(y)) must vanish for m >= 2
        x = Series(tuple(inv + [_c(0)] * (m + 1 - len(inv))), 1, 0)
        power = x
        total = _c(0)
        for k in range(2, m + 1):
            power = series_mul(power, x)
            total += coeffs[k] * power.coeffs[m]
        inv.append(-total / u1)
    return Series(tuple(inv), 1, 0)


def series_revert_root(u: Series, p: int = 3, root: int = 0) -> Series:
    """Invert ``w = A t^p + B t^(p+1) + ...`` for ``t`` as a series in ``w**(1/p)``.

    ``root`` picks the branch of ``A**(1/p)``: the principal root times
    ``exp(2*pi*i*root/p)``.
    """
    if p != 3:
        raise SeriesError("only cube-root reversion is supported")
    if u.step != 1:
        raise SeriesError("series to revert must have integer step")
    coeffs = [_c(0)] * max(u.lead, 0) + list(u.coeffs)
    if any(c != 0 for c in coeffs[:p]):
        raise SeriesError(f"series must vanish to order {p}")
    if len(coeffs) <= p or coeffs[p] == 0:
        raise SeriesError("vanishing leading coefficient: wrong saddle order")
    A = coeffs[p]
    ratio = Series(tuple(c / A for c in coeffs[p:]), 1, 0)  # 1 + (B/A) t + ...
    root_A = mp.cbrt(A) * mp.exp(2j * mp.pi * root / p)
    # s = A^(1/3) t (u/(A t^3))^(1/3) is an ordinary series in t
    scaled = series_pow(ratio, mp.mpf(1) / p) * root_A
    s_of_t = Series(tuple([_c(0)] + list(scaled.coeffs)), 1, 0)
    t_of_s = series_revert(s_of_t)
    return Series(t_of_s.coeffs, Fraction(1, p), 0)


@functools.lru_cache(maxsize=None)
def _bernoulli_all(n: int) -> tuple:
    B = [Fraction(1)]
    for m in range(1, n + 1):
        s = sum(comb(m + 1, k) * B[k] for k in range(m))
        B.append(-s / (m + 1))
    return tuple(B)


def bernoulli_numbers(K: int) -> list:
    """Exact ``[B_2, B_4, ..., B_2K]``."""
    if K < 1:
        raise ValueError("K must be at least 1")
    B = _bernoulli_all(2 * K)
    return [B[2 * k] for k in range(1, K + 1)]


class GammaPoleError(ValueError):
    pass


def log_gamma(z, dps: int | None = None) -> mpmath.mpc:
    """Principal branch of log Gamma(z) by upward shifting and the Stirling series."""
    with mpmath.workdps(dps or mp.dps):
        z = _c(z)
        if z.imag == 0 and z.real <= 0 and z.real == mp.floor(z.real):
            raise GammaPoleError(f"Gamma has a pole at {z}")
        digits = mp.dps
        with mpmath.extradps(10):
            R = max(10, int(0.45 * digits) + 5)
            shift = _c(0)
            n = 0
            while abs(z + n) < R or (z + n).real < R / 2:
                shift += mp.log(z + n)
                n += 1
            x = z + n
            total = (x - mp.mpf(0.5)) * mp.log(x) - x + mp.log(2 * mp.pi) / 2
            tol = mp.mpf(10) ** (-digits - 5)
            xp = x
            x2 = x * x
            K = 1
            while True:
                b = _bernoulli_all(2 * K)[2 * K]
                term = mp.mpf(b.numerator) / b.denominator / (2 * K * (2 * K - 1)) / xp
                total += term
                if abs(term) < tol * max(1, abs(total)) or K > 4 * digits:
                    break
                xp *= x2
                K += 1
            res = total - shift
        return +res
