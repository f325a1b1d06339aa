"""Region classification in the z-plane and curve tracing.

Delta(z) = psi(t_s1) - psi(t_s2), with both saddles and their logarithms
continued from the anchor (see :mod:`hypsaddle.phase`).  The Stokes loop
bounding the domain D is Im Delta = 0 and the anti-Stokes curve is
Re Delta = 0.  Both are traced by a predictor-corrector on the implicit
equation, carrying a :class:`~hypsaddle.phase.BranchTracker` along the
curve so that the logarithms stay continuous.

Everything here runs in double precision.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .phase import (
    BranchContinuationError,
    BranchTracker,
    _fp_psi1,
    _fp_saddles,
    _follow,
    continue_along_arc,
    double_points,
)

log = logging.getLogger(__name__)

# NearCoalescence radius is COALESCENCE_FACTOR * (1 + |z_d|)
COALESCENCE_FACTOR = 0.04


@dataclass(frozen=True)
class RegionTag:
    kind: str  # "InsideD" | "TwoSaddle" | "NearCoalescence"
    dominant: int | None = None
    which: str | None = None
    d_stokes: float = math.inf
    d_anti_stokes: float = math.inf
    d_double: float = math.inf

    def __str__(self):
        if self.kind == "TwoSaddle":
            return f"TwoSaddle({self.dominant})"
        if self.kind == "NearCoalescence":
            return f"NearCoalescence({self.which})"
        return self.kind


@dataclass
class Polyline:
    points: np.ndarray
    kind: str
    alpha: float
    tol: float
    step: float = 0.0
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    def residual(self) -> float:
        """Largest defining-equation residual along the curve (NaN if not applicable)."""
        return float(self.meta.get("residual", math.nan))

    def crossings_with_circle(self, r: float) -> list:
        """Points where the polyline crosses |z| = r, interpolated in polar form."""
        p = self.points
        m = np.abs(p) - r
        out = []
        for i in range(len(p) - 1):
            if m[i] == 0:
                out.append(complex(p[i]))
            elif m[i] * m[i + 1] < 0:
                s = m[i] / (m[i] - m[i + 1])
                th0 = cmath.phase(p[i])
                dth = cmath.phase(p[i + 1] / p[i])
                out.append(r * cmath.exp(1j * (th0 + s * dth)))
        return out

    def distance(self, z: complex) -> float:
        p = self.points
        if len(p) == 0:
            return math.inf
        if len(p) == 1:
            return float(abs(p[0] - z))
        a, b = p[:-1], p[1:]
        ab = b - a
        den = np.where(np.abs(ab) == 0, 1, np.abs(ab) ** 2)
        s = np.clip(((z - a) * np.conj(ab)).real / den, 0, 1)
        return float(np.min(np.abs(a + s * ab - z)))

    def contains(self, z: complex) -> bool:
        """Even-odd point-in-polygon test, treating the polyline as closed."""
        p = self.points
        x, y = z.real, z.imag
        inside = False
        n = len(p)
        for i in range(n):
            a, b = p[i], p[(i + 1) % n]
            if (a.imag > y) != (b.imag > y):
                xc = a.real + (y - a.imag) * (b.real - a.real) / (b.imag - a.imag)
                if x < xc:
                    inside = not inside
        return inside


# --- Delta and its derivative from a tracker --------------------------------------


def _delta(tr: BranchTracker) -> complex:
    beta = 1 - 1j * tr.alpha
    v = [s.logs[0] + s.logs[2] - beta * s.logs[1] for s in tr.saddles]
    return v[0] - v[1]


def _delta_prime(tr: BranchTracker) -> complex:
    # d/dz psi(t_s(z); z) = d psi/dz at fixed t, since psi'(t_s) = 0
    z = tr.z
    t1, t2 = (s.t for s in tr.saddles)
    return -t1 / (1 - z * t1) + t2 / (1 - z * t2)


def _part(v: complex, which: str) -> float:
    return v.imag if which == "im" else v.real


def _grad(dp: complex, which: str) -> complex:
    # gradient of Im f is i conj(f'), of Re f is conj(f')
    return 1j * dp.conjugate() if which == "im" else dp.conjugate()


def coalescence_radius(zd: float) -> float:
    return COALESCENCE_FACTOR * (1 + abs(zd))


def _trace_level(
    tr0: BranchTracker,
    which: str,
    direction: complex,
    targets: list,
    h_max: float,
    tol: float,
    end_tol: float = 1e-7,
    max_steps: int = 20000,
    max_len: float = 20.0,
):
    """Follow {Re|Im} Delta = 0 from the point held by ``tr0``.

    Stops on arrival within ``end_tol`` of one of ``targets`` and returns
    (points, trackers_end, reached_target_index or None, max residual).
    """
    tr = tr0.copy()
    z = tr.z
    pts = [z]
    prev_tan = direction / abs(direction)
    length = 0.0
    res_max = abs(_part(_delta(tr), which))
    h = h_max
    for _ in range(max_steps):
        dist_t = [abs(z - t) for t in targets]
        k = int(np.argmin(dist_t))
        if dist_t[k] < end_tol:
            return pts, tr, k, res_max
        g = _grad(_delta_prime(tr), which)
        tan = 1j * g / abs(g)
        if (tan * prev_tan.conjugate()).real < 0:
            tan = -tan
        step = min(h, h_max, 0.3 * min(dist_t))
        # head straight for a target once the remaining distance is the step
        if dist_t[k] < 4 * step and ((targets[k] - z) * tan.conjugate()).real > 0.5 * dist_t[k]:
            step = min(step, 0.5 * dist_t[k])
        ok = False
        for _attempt in range(30):
            zp = z + step * tan
            trial = tr.copy()
            try:
                trial.move_to(zp)
                for _it in range(12):
                    val = _part(_delta(trial), which)
                    if abs(val) < tol:
                        break
                    gg = _grad(_delta_prime(trial), which)
                    zp = zp - val * gg / abs(gg) ** 2
                    trial.move_to(zp)
                val = _part(_delta(trial), which)
            except BranchContinuationError:
                val = math.inf
            if abs(val) < tol and abs(zp - z) < 2.5 * step:
                ok = True
                break
            step /= 2
        if not ok:
            raise BranchContinuationError(f"curve tracing stalled near z = {z}")
        res_max = max(res_max, abs(val))
        prev_tan = (zp - z) / abs(zp - z)
        length += abs(zp - z)
        z = zp
        tr = trial
        pts.append(z)
        h = min(h_max, step * 1.5)
        if length > max_len:
            break
    return pts, tr, None, res_max


def _bisect_ring(alpha: float, r: float, which: str, th_lo: float, th_hi: float, iters: int = 60) -> complex:
    def f(th):
        return _part(_delta(continue_along_arc(r * cmath.exp(1j * th), alpha)), which)

    flo = f(th_lo)
    for _ in range(iters):
        mid = (th_lo + th_hi) / 2
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            th_lo, flo = mid, fm
        else:
            th_hi = mid
    return r * cmath.exp(1j * (th_lo + th_hi) / 2)


def _find_sign_change(alpha: float, r: float, which: str, th_a: float, th_b: float, n: int = 64):
    ths = np.linspace(th_a, th_b, n + 1)
    vals = [_part(_delta(continue_along_arc(r * cmath.exp(1j * th), alpha)), which) for th in ths]
    for i in range(n):
        if vals[i] == 0:
            return ths[i], ths[i]
        if vals[i] * vals[i + 1] < 0:
            return ths[i], ths[i + 1]
    return None


def _ring_radius_stokes(alpha: float) -> float:
    zm, _ = (float(x) for x in double_points(alpha))
    return 0.5 * abs(zm)


@lru_cache(maxsize=32)
def trace_stokes_loop(alpha: float, tol: float = 1e-10, h_max: float = 0.004) -> Polyline:
    """The closed curve Im Delta = 0 round z = 0, through z_d^-.

    The polyline runs from z_d^- through the upper half-plane, crosses the
    positive real axis and returns to z_d^- through the lower half-plane.
    """
    alpha = float(alpha)
    zm, _ = (float(x) for x in double_points(alpha))
    r = _ring_radius_stokes(alpha)
    bracket = _find_sign_change(alpha, r, "im", 0.02, math.pi - 0.02)
    if bracket is None:
        raise BranchContinuationError("no Stokes-loop crossing found on the seed ring")
    z0 = _bisect_ring(alpha, r, "im", *bracket)
    tr0 = continue_along_arc(z0, alpha)
    g = _grad(_delta_prime(tr0), "im")
    tan = 1j * g / abs(g)
    # orient so that the first leg heads towards larger arg z (towards z_d^-)
    if (tan * (1j * z0).conjugate()).real < 0:
        tan = -tan
    up, _, hit_a, ra = _trace_level(tr0, "im", tan, [complex(zm)], h_max, tol)
    down, _, hit_b, rb = _trace_level(tr0, "im", -tan, [complex(zm)], h_max, tol)
    if hit_a is None or hit_b is None:
        raise BranchContinuationError("Stokes loop did not close on z_d^-")
    pts = np.array(list(reversed(up)) + down[1:], dtype=complex)
    return Polyline(pts, "stokes", alpha, tol, h_max, {"residual": max(ra, rb), "seed": z0})


@lru_cache(maxsize=32)
def trace_anti_stokes(alpha: float, tol: float = 1e-10, h_max: float = 0.01) -> Polyline:
    """Re Delta = 0 in the upper half-plane, from z_d^- (A) to z_d^+ (B)."""
    alpha = float(alpha)
    zm, zp = (float(x) for x in double_points(alpha))
    r = 0.5 * (abs(zm) + zp)
    bracket = _find_sign_change(alpha, r, "re", 0.02, math.pi - 0.02)
    if bracket is None:
        raise BranchContinuationError("no anti-Stokes crossing found on the seed ring")
    z0 = _bisect_ring(alpha, r, "re", *bracket)
    tr0 = continue_along_arc(z0, alpha)
    g = _grad(_delta_prime(tr0), "re")
    tan = 1j * g / abs(g)
    if (tan * (1j * z0).conjugate()).real < 0:
        tan = -tan
    targets = [complex(zm), complex(zp)]
    left, _, hit_a, ra = _trace_level(tr0, "re", tan, targets, h_max, tol)
    right, _, hit_b, rb = _trace_level(tr0, "re", -tan, targets, h_max, tol)
    if hit_a is None or hit_b is None or hit_a == hit_b:
        raise BranchContinuationError("anti-Stokes curve did not join z_d^- to z_d^+")
    seq = list(reversed(left)) + right[1:]
    if abs(seq[0] - zm) > abs(seq[-1] - zm):
        seq.reverse()
    pts = np.array(seq, dtype=complex)
    return Polyline(pts, "anti_stokes", alpha, tol, h_max, {"residual": max(ra, rb), "seed": z0})


def _sheet_curve_z(t: np.ndarray, alpha: float) -> np.ndarray:
    # z for which the saddle equation has the root t
    return (1j * alpha * t - 1) / (t * ((1 + 1j * alpha) * t - 2))


def trace_sheet_curves(alpha: float, n: int = 400) -> tuple:
    """Curves where t_s2 (from z = 0) and t_s2 - 1 (from z = 1) cross onto another sheet.

    t_s2 crosses the cut of log t when it is real and negative, and t_s2 - 1
    crosses the cut of log(t - 1) when t_s2 is real in (0, 1).  Solving the
    saddle equation for z gives each locus parametrically; a point is kept
    when the continued label of the root at t is 2.
    """
    alpha = float(alpha)
    s = np.linspace(6.0, -4.0, n)
    t0 = -np.exp(s)
    x = np.linspace(0, 1, n + 2)[1:-1]
    t1 = x
    out = []
    for ts, kind in ((t0, "sheet_t"), (t1, "sheet_t_minus_1")):
        zs = _sheet_curve_z(ts.astype(complex), alpha)
        keep = []
        tr = None
        for t, z in zip(ts, zs):
            z = complex(z)
            if not np.isfinite(z) or abs(z) < 1e-6 or abs(z) > 50 or (z.imag == 0 and z.real >= 1):
                tr = None
                continue
            try:
                tr = continue_along_arc(z, alpha) if tr is None else tr.move_to(z)
            except BranchContinuationError:
                tr = None
                continue
            if abs(tr.saddles[1].t - t) < 1e-6 * (1 + abs(t)):
                keep.append(z)
        out.append(Polyline(np.array(keep, dtype=complex), kind, alpha, 1e-6))
    return tuple(out)


def stokes_crossing(alpha: float, r: float, upper: bool = True) -> complex:
    """Where the traced Stokes loop meets |z| = r, polished by bisection on the ring."""
    loop = trace_stokes_loop(float(alpha))
    cands = [c for c in loop.crossings_with_circle(r) if (c.imag > 0) == upper]
    if not cands:
        raise ValueError(f"the Stokes loop does not cross |z| = {r}")
    th = cmath.phase(cands[0])
    dth = 4 * loop.step / r
    lo, hi = th - dth, th + dth
    f = lambda x: _part(_delta(continue_along_arc(r * cmath.exp(1j * x), float(alpha))), "im")  # noqa: E731
    if f(lo) * f(hi) > 0:
        return cands[0]
    return _bisect_ring(float(alpha), r, "im", lo, hi, iters=50)


def classify(z, alpha, with_distances: bool = True) -> RegionTag:
    """Which expansion applies at z."""
    z = complex(z)
    alpha = float(alpha)
    if z == 0 or (z.imag == 0 and z.real >= 1):
        raise ValueError("z must be nonzero and off the cut [1, inf)")
    zm, zp = (float(x) for x in double_points(alpha))
    dm, dp_ = abs(z - zm), abs(z - zp)
    d_double = min(dm, dp_)
    d_st = d_as = math.inf
    loop = None
    if with_distances:
        loop = trace_stokes_loop(alpha)
        d_st = loop.distance(z)
        d_as = trace_anti_stokes(alpha).distance(z)
    if dm < coalescence_radius(zm):
        return RegionTag("NearCoalescence", None, "-", d_st, d_as, d_double)
    if dp_ < coalescence_radius(zp):
        return RegionTag("NearCoalescence", None, "+", d_st, d_as, d_double)
    if loop is None:
        loop = trace_stokes_loop(alpha)
    if abs(z) < abs(zm) + 0.1 and loop.contains(z):
        return RegionTag("InsideD", 1, None, d_st, d_as, d_double)
    tr = continue_along_arc(z, alpha)
    re = _delta(tr).real
    dominant = 1 if re >= 0 else 2
    return RegionTag("TwoSaddle", dominant, None, d_st, d_as, d_double)


# --- steepest paths ---------------------------------------------------------------


@dataclass
class _PathState:
    t: complex
    logs: list


def _psi_from_logs(lg, alpha):
    return lg[0] + lg[2] - (1 - 1j * alpha) * lg[1]


def _advance_logs(lg, t, z):
    new = []
    for prev, val in zip(lg, (cmath.log(t), cmath.log(t - 1), cmath.log(1 - z * t))):
        v, _ = _follow(prev, val)
        new.append(v)
    return new


def _trace_path(t_start, lg_start, z, alpha, sign, im_target, h0=0.02, max_steps=4000, re_drop=40.0):
    """Integrate dt/ds = sign * conj(psi')/|psi'| (sign -1: descent)."""
    sing = [0j, 1 + 0j, 1 / z]
    t = t_start
    lg = list(lg_start)
    re0 = _psi_from_logs(lg, alpha).real
    pts = [t]
    status = "cap"

    def field_(u):
        d = _fp_psi1(u, z, alpha)
        return sign * d.conjugate() / abs(d)

    for _ in range(max_steps):
        dsing = min(abs(t - s) for s in sing)
        h = min(h0 * max(1.0, abs(t)), 0.05 * dsing) if dsing > 0 else 0
        if h < 1e-12:
            status = "underflow"
            break
        k1 = field_(t)
        k2 = field_(t + h / 2 * k1)
        k3 = field_(t + h / 2 * k2)
        k4 = field_(t + h * k3)
        tn = t + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        lg_n = _advance_logs(lg, tn, z)
        # pull back onto Im psi = const
        for _it in range(3):
            d = _fp_psi1(tn, z, alpha)
            kap = im_target - _psi_from_logs(lg_n, alpha).imag
            if abs(kap) < 1e-13:
                break
            tn = tn + 1j * kap * d.conjugate() / abs(d) ** 2
            lg_n = _advance_logs(lg, tn, z)
        t, lg = tn, lg_n
        pts.append(t)
        re = _psi_from_logs(lg, alpha).real
        if sign < 0:
            if abs(t) < 1e-6:
                status = "t=0"
                break
            if abs(t - 1 / z) < 1e-6 * max(1, abs(1 / z)):
                status = "t=1/z"
                break
            if re < re0 - re_drop:
                near = min(((abs(t), "t=0"), (abs(t - 1 / z), "t=1/z")))
                status = near[1] if near[0] < 0.05 * max(1.0, abs(1 / z)) else "other sheet"
                break
        else:
            if abs(t - 1) < 1e-6:
                status = "t=1"
                break
            if abs(t) > 1e4:
                status = "infinity"
                break
            if re > re0 + re_drop:
                if abs(t - 1) < 0.05:
                    status = "t=1"
                elif abs(t) > 1e2:
                    status = "infinity"
                else:
                    status = "other sheet"
                break
    return pts, lg, status


def trace_steepest_paths(z, alpha, plane: str = "t", rho: float = 1e-3) -> list:
    """Steepest descent and ascent paths leaving each saddle.

    At z = z_d^- the three descent and three ascent directions of the
    double saddle are traced instead.  ``plane='w'`` maps the paths by the
    continued logarithm w = log t.
    """
    if plane not in ("t", "w"):
        raise ValueError("plane must be 't' or 'w'")
    z = complex(z)
    alpha = float(alpha)
    zm, _ = (float(x) for x in double_points(alpha))
    starts = []  # (label, t_s, logs, psi2-ish local coefficient, order)
    if abs(z - zm) < 1e-12:
        from .phase import double_saddle

        ds = double_saddle(alpha)
        td = complex(ds.t)
        lg = [cmath.log(td), cmath.log(td - 1), cmath.log(1 - z * td)]
        # psi - psi_d ~ A tau^3 with A = psi'''/6
        tt = td
        beta = 1 - 1j * alpha
        p3 = 2 / tt**3 - 2 * z**3 / (1 - z * tt) ** 3 - 2 * beta / (tt - 1) ** 3
        starts.append(("D", td, lg, p3 / 6, 3))
    else:
        tr = continue_along_arc(z, alpha)
        for label, s in enumerate(tr.saddles, start=1):
            beta = 1 - 1j * alpha
            p2 = -1 / s.t**2 - z * z / (1 - z * s.t) ** 2 + beta / (s.t - 1) ** 2
            starts.append((label, s.t, list(s.logs), p2 / 2, 2))
    out = []
    for label, ts, lg, coef, order in starts:
        im0 = _psi_from_logs(lg, alpha).imag
        for kind, sign, target in (("descent", -1, math.pi), ("ascent", 1, 0.0)):
            for k in range(order):
                phi = (target - cmath.phase(coef) + 2 * math.pi * k) / order
                t0 = ts + rho * max(1.0, abs(ts)) * cmath.exp(1j * phi)
                lg0 = _advance_logs(lg, t0, z)
                # start exactly on the level set
                d = _fp_psi1(t0, z, alpha)
                t0 = t0 + 1j * (im0 - _psi_from_logs(lg0, alpha).imag) * d.conjugate() / abs(d) ** 2
                lg0 = _advance_logs(lg, t0, z)
                pts, lg_end, status = _trace_path(t0, lg0, z, alpha, sign, im0)
                pts = [ts] + pts
                if plane == "w":
                    w = [lg[0]]
                    cur = lg[0]
                    for p in pts[1:]:
                        cur, _ = _follow(cur, cmath.log(p))
                        w.append(cur)
                    pts = w
                out.append(
                    Polyline(
                        np.array(pts, dtype=complex),
                        f"{kind}",
                        alpha,
                        1e-8,
                        meta={"saddle": label, "direction": phi, "end": status, "im_psi": im0, "plane": plane},
                    )
                )
    return out


def saddle_separation(z, alpha) -> float:
    t1, t2 = _fp_saddles(complex(z), float(alpha))
    return abs(t1 - t2)
