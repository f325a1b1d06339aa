"""Poincare-type expansions of F(a - lam, b + lam; c + i alpha lam; z).

Each simple saddle t_j contributes

    e^{lam psi(t_j)} f(t_j) / sqrt(2 pi psi''(t_j)) * sum_s c_s (1/2)_s lam^{-s-1/2}

and the sum over contributing saddles is multiplied by the Gamma-function
prefactor G.  For a = 0, b = c = 1 that prefactor is
G_alpha(lam) = Gamma(1 + i alpha lam) Gamma(1 + lam beta) / Gamma(1 + lam).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from mpmath import mp

from .coeffs import local_expansions, wojdylo_all
from .numerics import GammaPoleError, bernoulli_numbers, exp_compose, log_gamma
from .phase import CoalescenceError, Params, saddles
from .regions import RegionTag, classify

log = logging.getLogger(__name__)

__all__ = [
    "ExpansionResult",
    "GammaPrefactor",
    "G_exact",
    "G_general",
    "G_asymptotic",
    "A_coeffs",
    "E_coeffs",
    "exp_compose",
    "evaluate",
]

# evaluation needs more than double precision: truncation errors of interest reach 1e-15
EVAL_DPS = 32


def G_exact(lam, alpha):
    """G_alpha(lam) through the log-gamma function."""
    lam, alpha = mp.mpf(lam), mp.mpf(alpha)
    beta = 1 - 1j * alpha
    with mp.extradps(10):
        v = log_gamma(1 + 1j * alpha * lam) + log_gamma(1 + lam * beta) - log_gamma(1 + lam)
        out = mp.exp(v)
    return +out


def G_general(lam, alpha, a=0, b=1, c=1):
    """Gamma(c + i alpha lam) Gamma(1 + b - c + lam beta) / Gamma(b + lam)."""
    lam, alpha = mp.mpf(lam), mp.mpf(alpha)
    a, b, c = mp.mpc(a), mp.mpc(b), mp.mpc(c)
    beta = 1 - 1j * alpha
    with mp.extradps(10):
        try:
            num = log_gamma(c + 1j * alpha * lam) + log_gamma(1 + b - c + lam * beta)
        except GammaPoleError as exc:
            raise ValueError("the prefactor has a pole at these parameters") from exc
        try:
            den = log_gamma(b + lam)
        except GammaPoleError:
            return mp.mpc(0)
        out = mp.exp(num - den)
    return +out


def A_coeffs(alpha, K: int) -> list:
    """A_1..A_K of the log-gamma expansion of G_alpha."""
    alpha = mp.mpf(alpha)
    ia = 1j * alpha
    out = []
    for k, B in enumerate(bernoulli_numbers(K), start=1):
        n = 2 * k - 1
        coef = mp.mpf(B.numerator) / B.denominator / (2 * k * n)
        out.append(coef * (1 / ia**n + 1 / (1 - ia) ** n - 1))
    return out


def E_coeffs(alpha, K: int) -> list:
    """E_1..E_K with exp(sum_k A_k x^(2k-1)) = 1 + sum_k E_k x^k."""
    if K <= 0:
        return []
    A = A_coeffs(alpha, (K + 1) // 2)
    a = [mp.mpc(0)] * K
    for k, Ak in enumerate(A, start=1):
        if 2 * k - 1 <= K:
            a[2 * k - 2] = Ak
    return exp_compose(a)[1:]


@dataclass(frozen=True)
class GammaPrefactor:
    exact: object
    A: tuple
    E: tuple
    Phi: object

    @classmethod
    def build(cls, lam, alpha, K: int = 6) -> "GammaPrefactor":
        return cls(G_exact(lam, alpha), tuple(A_coeffs(alpha, (K + 1) // 2)), tuple(E_coeffs(alpha, K)), _Phi(lam, alpha))


def _Phi(lam, alpha):
    lam, alpha = mp.mpf(lam), mp.mpf(alpha)
    phi = mp.atan(alpha)
    return lam * alpha * mp.log(alpha / mp.sqrt(1 + alpha**2)) - (lam + mp.mpf(1) / 2) * phi + mp.pi / 4


def G_asymptotic(lam, alpha, K: int):
    """Large-lam form of G_alpha(lam) keeping E_1..E_K."""
    lam, alpha = mp.mpf(lam), mp.mpf(alpha)
    if lam * alpha <= 1:
        log.warning("G_asymptotic used with lam*alpha = %s <= 1", lam * alpha)
    phi = mp.atan(alpha)
    lead = (
        mp.sqrt(2 * mp.pi * lam * alpha)
        * (1 + alpha**2) ** (lam / 2 + mp.mpf(1) / 4)
        * mp.exp(-lam * alpha * (mp.pi / 2 + phi) + 1j * _Phi(lam, alpha))
    )
    tail = mp.mpc(1)
    for k, Ek in enumerate(E_coeffs(alpha, K), start=1):
        tail += Ek / lam**k
    return lead * tail


@dataclass
class ExpansionResult:
    value: object
    region: RegionTag
    per_saddle_terms: list
    s_max: int
    est_error: float
    prefactor_mode: str = "exact"
    prefactor: object = None
    labels: tuple = ()
    next_terms: list = field(default_factory=list)
    dps: int = EVAL_DPS

    def partial(self, s: int):
        """The value truncated after the term of order s (s <= s_max)."""
        if not 0 <= s <= self.s_max:
            raise ValueError("s outside the computed range")
        with mp.workdps(self.dps):
            return +(self.prefactor * mp.fsum(t for terms in self.per_saddle_terms for t in terms[: s + 1]))

    def as_complex(self) -> complex:
        return complex(self.value)


def _prefactor(p: Params, mode: str):
    if not p.is_standard:
        if mode != "exact":
            raise ValueError("the asymptotic prefactor is only available for a = 0, b = c = 1")
        return G_general(p.lam, p.alpha, p.a, p.b, p.c)
    if mode == "exact":
        return G_exact(p.lam, p.alpha)
    if mode.startswith("asymptotic"):
        K = int(mode.partition(":")[2] or 3)
        return G_asymptotic(p.lam, p.alpha, K)
    raise ValueError(f"unknown prefactor mode {mode!r}")


def saddle_series(s, p: Params, s_max: int) -> list:
    """Unscaled terms e^{lam psi} f c_k (1/2)_k / (sqrt(2 pi psi'') lam^{k+1/2}), k = 0..s_max+1."""
    lam = mp.mpf(p.lam)
    le = local_expansions(s, p, 2 * (s_max + 1))
    cs = wojdylo_all(le, s_max + 1)
    lead = mp.exp(lam * s.psi) * le.beta_hat[0] / (mp.sqrt(2 * mp.pi * lam) * s.root)
    out = []
    poch = mp.mpf(1)
    for k, ck in enumerate(cs):
        if k > 0:
            poch *= mp.mpf(k) - mp.mpf(1) / 2
        out.append(lead * ck * poch / lam**k)
    return out


def evaluate(p: Params, s_max: int = 2, mode: str = "auto", prefactor: str = "exact", dps: int = EVAL_DPS) -> ExpansionResult:
    """Steepest-descent approximation to F at ``p``.

    mode="auto" uses both saddles in the two-saddle region, only t_s1
    inside D, and refuses points within the coalescence radius of a double
    point.  "two_saddle" and "one_saddle" force the choice (the region tag
    is still reported).
    """
    if s_max < 0:
        raise ValueError("s_max must be nonnegative")
    if mode not in ("auto", "two_saddle", "one_saddle"):
        raise ValueError(f"unknown mode {mode!r}")
    dps = max(dps, mp.dps)
    with mp.workdps(dps):
        region = classify(p.z, p.alpha)
        if mode == "auto":
            if region.kind == "NearCoalescence":
                raise CoalescenceError(
                    f"z = {p.z} is within the coalescence radius of z_d^{region.which}; "
                    "use the coalescence expansion or mode='two_saddle'"
                )
            labels = (1,) if region.kind == "InsideD" else (1, 2)
        elif mode == "one_saddle":
            labels = (1,)
        else:
            labels = (1, 2)
        sd = saddles(p.z, p.alpha)
        G = _prefactor(p, prefactor)
        per, nxt = [], []
        for lab in labels:
            terms = saddle_series(sd[lab - 1], p, s_max)
            per.append(terms[: s_max + 1])
            nxt.append(terms[s_max + 1])
        value = G * mp.fsum(t for terms in per for t in terms)
        est = float(abs(G * mp.fsum(nxt)))
        return ExpansionResult(
            value=+value,
            region=region,
            per_saddle_terms=per,
            s_max=s_max,
            est_error=est,
            prefactor_mode=prefactor,
            prefactor=G,
            labels=labels,
            next_terms=nxt,
            dps=dps,
        )
