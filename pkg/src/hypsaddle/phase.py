"""Phase function, saddle points and branch bookkeeping.

The integrand of the loop integral is ``f(t) exp(lam * psi(t))`` with

    psi(t) = log t + log(1 - z t) - beta log(t - 1),    beta = 1 - i alpha.

Each logarithm carries an integer sheet offset.  Offsets and the
orientation of the square root of psi'' at a saddle are fixed at the
anchor ``theta = 0`` (real z) and then continued along the arc of
constant ``|z|``; :class:`BranchTracker` does the continuation in double
precision, and :func:`saddles` lifts the result to working precision.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import mpmath
from mpmath import mp

TWO_PI = 2 * math.pi

# Orientation of sqrt(psi'') at the theta = 0 anchor, relative to the
# principal root: saddle 1 is traversed against it, saddle 2 with it.
# Fixed by comparing the s = 0 term with the oracle at z = 1/2, alpha = 1.
ANCHOR_ORIENTATION = (-1, 1)


class BranchContinuationError(RuntimeError):
    """Saddle tracking could not proceed (coalescence or singular path)."""


class CoalescenceError(ValueError):
    """z sits at (or too near) a double point for a simple-saddle treatment."""


def _on_cut(z: complex) -> bool:
    return z.imag == 0 and z.real >= 1


@dataclass(frozen=True)
class Params:
    """Parameters of F(a - lam, b + lam; c + i alpha lam; z)."""

    alpha: float
    lam: float
    z: complex
    a: complex = 0
    b: complex = 1
    c: complex = 1

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive; use the conjugation map for alpha < 0")
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        z = complex(self.z)
        if z == 0:
            raise ValueError("z must be nonzero")
        if _on_cut(z):
            raise ValueError("z lies on the cut arg(1 - z) = +-pi")

    @property
    def beta(self):
        return 1 - 1j * mp.mpf(self.alpha)

    @property
    def theta(self) -> float:
        return cmath.phase(complex(self.z))

    @property
    def phi(self) -> float:
        return math.atan(float(self.alpha))

    @property
    def is_standard(self) -> bool:
        return self.a == 0 and self.b == 1 and self.c == 1


@dataclass(frozen=True)
class SaddleData:
    """A saddle with its branch data at working precision.

    ``offsets`` are the 2*pi*i multiples added to the principal values of
    log t, log(t - 1) and log(1 - z t).  ``root`` is the oriented square
    root of psi''(t) used in the steepest-descent term.
    """

    label: int | str
    t: mpmath.mpc
    psi: mpmath.mpc
    psi2: mpmath.mpc
    offsets: tuple = (0, 0, 0)
    root: mpmath.mpc | None = None

    @property
    def branch_offsets(self) -> tuple:
        return self.offsets[:2]


def _mpc(x):
    return mp.mpc(x)


def logs(t, z, offsets=(0, 0, 0)):
    """The three branch-adjusted logarithms (log t, log(t-1), log(1-zt))."""
    t, z = _mpc(t), _mpc(z)
    n1, n2, n3 = (tuple(offsets) + (0, 0, 0))[:3]
    tpi = 2j * mp.pi
    return (mp.log(t) + tpi * n1, mp.log(t - 1) + tpi * n2, mp.log(1 - z * t) + tpi * n3)


def psi(t, p: Params, offsets=(0, 0, 0)):
    """psi(t) = log t + log(1 - z t) - beta log(t - 1) on the given sheets."""
    t = _mpc(t)
    if t == 0 or t == 1 or 1 - _mpc(p.z) * t == 0:
        raise ValueError(f"psi is singular at t = {t}")
    l1, l2, l3 = logs(t, p.z, offsets)
    return l1 + l3 - p.beta * l2


def psi_derivs(t, p: Params, m: int) -> list:
    """Closed-form ``[psi'(t), psi''(t), ..., psi^(m)(t)]``."""
    return psi_derivs_z(t, p.z, p.alpha, m)


def psi_derivs_z(t, z, alpha, m: int) -> list:
    t, z = _mpc(t), _mpc(z)
    beta = 1 - 1j * mp.mpf(alpha)
    if t == 0 or t == 1 or 1 - z * t == 0:
        raise ValueError(f"psi is singular at t = {t}")
    it, it1, iz = 1 / t, 1 / (t - 1), z / (1 - z * t)
    out = []
    fact = mp.mpf(1)
    for k in range(1, m + 1):
        if k > 1:
            fact *= k - 1
        sgn = 1 if k % 2 else -1
        out.append(fact * (sgn * it**k - iz**k - beta * sgn * it1**k))
    return out


def psi2_closed(t, alpha):
    """psi'' at a saddle in the form -2/(t-1)^2 {(1 - 1/t)(1 - 1/t - beta) - beta(1 - beta)/2}."""
    t = _mpc(t)
    beta = 1 - 1j * mp.mpf(alpha)
    u = 1 - 1 / t
    return -2 / (t - 1) ** 2 * (u * (u - beta) - beta * (1 - beta) / 2)


def double_points(alpha):
    """(z_d^-, z_d^+) = 1/2 -+ sqrt(1 + alpha^2)/2."""
    s = mp.sqrt(1 + mp.mpf(alpha) ** 2)
    return ((1 - s) / 2, (1 + s) / 2)


def saddle_points(z, alpha) -> tuple:
    """The closed-form roots of psi'(t) = 0 with the principal square root."""
    z = _mpc(z)
    alpha = mp.mpf(alpha)
    disc = z - z * z + alpha * alpha / 4
    d = mp.sqrt(disc)
    den = (1 + 1j * alpha) * z
    return ((z + 0.5j * alpha - 1j * d) / den, (z + 0.5j * alpha + 1j * d) / den)


def newton_saddle(t, z, alpha, iters: int = 60):
    """Refine a simple saddle by Newton's method on psi'."""
    t = _mpc(t)
    tol = mp.mpf(10) ** (-mp.dps + 3)
    for _ in range(iters):
        d1, d2 = psi_derivs_z(t, z, alpha, 2)
        dt = d1 / d2
        t -= dt
        if abs(dt) <= tol * (1 + abs(t)):
            break
    return t


# --- double-precision continuation -------------------------------------------------


def _fp_saddles(z: complex, alpha: float):
    d = cmath.sqrt(z - z * z + alpha * alpha / 4)
    den = (1 + 1j * alpha) * z
    return ((z + 0.5j * alpha - 1j * d) / den, (z + 0.5j * alpha + 1j * d) / den)


def _fp_psi2(t: complex, z: complex, alpha: float) -> complex:
    beta = 1 - 1j * alpha
    return -1 / t**2 - z * z / (1 - z * t) ** 2 + beta / (t - 1) ** 2


def _fp_psi1(t: complex, z: complex, alpha: float) -> complex:
    beta = 1 - 1j * alpha
    return 1 / t - z / (1 - z * t) - beta / (t - 1)


def _fp_logs(t: complex, z: complex):
    return (cmath.log(t), cmath.log(t - 1), cmath.log(1 - z * t))


def _follow(prev: complex, new_principal: complex) -> tuple[complex, int]:
    n = round((prev.imag - new_principal.imag) / TWO_PI)
    return new_principal + 1j * TWO_PI * n, n


@dataclass
class _TrackedSaddle:
    t: complex
    logs: tuple
    offsets: tuple
    root: complex


@dataclass
class BranchTracker:
    """Continue both saddles, their logarithms and sqrt(psi'') as z moves.

    Start with :meth:`at_anchor` and feed nearby points with
    :meth:`move_to`; large moves are subdivided until each saddle moves
    less than ``max_disp`` and well under the saddle separation.
    """

    alpha: float
    z: complex
    saddles: list = field(default_factory=list)
    max_disp: float = 0.1
    min_seg: float = 1e-13

    @classmethod
    def at_anchor(cls, z0: complex, alpha: float, orientation=ANCHOR_ORIENTATION, **kw) -> "BranchTracker":
        alpha = float(alpha)
        z0 = complex(z0)
        tr = cls(alpha=alpha, z=z0, **kw)
        for t, sgn in zip(_fp_saddles(z0, alpha), orientation):
            lg = _fp_logs(t, z0)
            root = sgn * cmath.sqrt(_fp_psi2(t, z0, alpha))
            tr.saddles.append(_TrackedSaddle(t, lg, (0, 0, 0), root))
        return tr

    def copy(self) -> "BranchTracker":
        return BranchTracker(
            self.alpha,
            self.z,
            [_TrackedSaddle(s.t, s.logs, s.offsets, s.root) for s in self.saddles],
            self.max_disp,
            self.min_seg,
        )

    def _try_step(self, z_new: complex):
        cand = _fp_saddles(z_new, self.alpha)
        old = [s.t for s in self.saddles]
        direct = abs(cand[0] - old[0]) + abs(cand[1] - old[1])
        swap = abs(cand[1] - old[0]) + abs(cand[0] - old[1])
        if swap < direct:
            cand = (cand[1], cand[0])
        sep = abs(cand[0] - cand[1])
        for s, u in zip(self.saddles, cand):
            disp = abs(u - s.t)
            near = min(abs(u), abs(u - 1), abs(1 - z_new * u) / abs(z_new))
            if disp > self.max_disp or disp > 0.25 * sep or disp > 0.25 * near:
                return None
        out = []
        for s, u in zip(self.saddles, cand):
            lg_p = _fp_logs(u, z_new)
            new_logs, new_off = [], []
            for prev, lp, n0 in zip(s.logs, lg_p, s.offsets):
                val, _ = _follow(prev, lp)
                new_logs.append(val)
                new_off.append(round((val.imag - lp.imag) / TWO_PI))
            r = cmath.sqrt(_fp_psi2(u, z_new, self.alpha))
            if abs(r - s.root) > abs(r + s.root):
                r = -r
            out.append(_TrackedSaddle(u, tuple(new_logs), tuple(new_off), r))
        return out

    def move_to(self, z_new: complex) -> "BranchTracker":
        z_new = complex(z_new)
        stack = [z_new]
        while stack:
            target = stack[-1]
            if abs(target - self.z) < self.min_seg and target != self.z:
                raise BranchContinuationError(f"step size underflow near z = {target}")
            res = self._try_step(target)
            if res is None:
                stack.append((self.z + target) / 2)
                continue
            self.saddles = res
            self.z = target
            stack.pop()
        return self


BASE_POINT = 0.5
INNER_RADIUS = 0.9


def continue_along_arc(z: complex, alpha: float, n_min: int = 256) -> BranchTracker:
    """Track both saddles from the anchor z = 1/2 to z.

    The orientation of sqrt(psi'') is fixed at z = 1/2.  The saddles are
    carried along the real axis to min(|z|, 0.9), round that arc to arg z,
    and then radially out to |z|.  For |z| < 0.9 this is the arc of
    constant |z| from theta = 0.  Larger |z| are reached radially so the
    path never runs past z = 1, where t_s2 meets the endpoint t = 1 and
    the steepest-descent topology changes.
    """
    z = complex(z)
    r, theta = abs(z), cmath.phase(z)
    if r == 0:
        raise ValueError("z must be nonzero")
    tr = BranchTracker.at_anchor(BASE_POINT, alpha)
    r_arc = min(r, INNER_RADIUS)
    tr.move_to(complex(r_arc))
    n = max(1, int(math.ceil(n_min * abs(theta) / math.pi)))
    for k in range(1, n + 1):
        tr.move_to(r_arc * cmath.exp(1j * theta * k / n) if (k < n or r > r_arc) else z)
    if r > r_arc:
        n = max(1, int(math.ceil(64 * (r - r_arc))))
        for k in range(1, n + 1):
            rk = r_arc + (r - r_arc) * k / n
            tr.move_to(rk * cmath.exp(1j * theta) if k < n else z)
    return tr



def branch_offsets(z, alpha, label: int = 2) -> tuple:
    """(n1, n2) for log t_s and log(t_s - 1) of the given saddle, continued from theta = 0."""
    tr = continue_along_arc(complex(z), float(alpha))
    return tr.saddles[label - 1].offsets[:2]


def lift(tr: BranchTracker, p_or_z, alpha=None) -> tuple:
    """Promote tracked saddles to :class:`SaddleData` at working precision."""
    if isinstance(p_or_z, Params):
        z, alpha = p_or_z.z, p_or_z.alpha
    else:
        z = p_or_z
    zz = _mpc(z)
    beta = 1 - 1j * mp.mpf(alpha)
    out = []
    for label, s in enumerate(tr.saddles, start=1):
        t = newton_saddle(mp.mpc(s.t), zz, alpha)
        if abs(complex(t) - s.t) > 1e-8 * (1 + abs(s.t)):
            raise BranchContinuationError("Newton refinement moved to a different root")
        l1, l2, l3 = logs(t, zz, s.offsets)
        # offsets were fixed from double-precision values; confirm they agree
        for lv, dv in zip((l1, l2, l3), s.logs):
            if abs(complex(lv) - dv) > 1e-6:
                raise BranchContinuationError("branch offsets changed on refinement")
        ps = l1 + l3 - beta * l2
        p2 = psi_derivs_z(t, zz, alpha, 2)[1]
        r = mp.sqrt(p2)
        if abs(complex(r) - s.root) > abs(complex(r) + s.root):
            r = -r
        out.append(SaddleData(label, t, ps, p2, tuple(s.offsets), r))
    return tuple(out)


def saddles(z, alpha) -> tuple:
    """Both saddles at working precision with labels and branches continued from theta = 0."""
    z = complex(z) if not isinstance(z, mpmath.mpc) else z
    zc = complex(z)
    zm, zp = (complex(x) for x in double_points(alpha))
    scale = 1 + abs(zc)
    if min(abs(zc - zm), abs(zc - zp)) < 1e-9 * scale:
        raise CoalescenceError("z is a double point; use the coalescence expansion")
    tr = continue_along_arc(zc, float(alpha))
    return lift(tr, z, alpha)


def double_saddle(alpha) -> SaddleData:
    """The double saddle t_d at z = z_d^- (principal logs)."""
    alpha = mp.mpf(alpha)
    s = mp.sqrt(1 + alpha**2)
    zd = (1 - s) / 2
    td = (1 - s + 1j * alpha) / ((1 + 1j * alpha) * (1 - s))
    l1, l2, l3 = logs(td, zd)
    beta = 1 - 1j * alpha
    ps = l1 + l3 - beta * l2
    p2 = psi_derivs_z(td, zd, alpha, 2)[1]
    return SaddleData("D", td, ps, p2, (0, 0, 0), None)
