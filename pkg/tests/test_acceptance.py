"""Acceptance criteria 1-11.

Each test prints one ``CRITERION n: PASS|FAIL`` line (run with ``-s`` to see
them inline); the same lines are repeated in the terminal summary.
"""

import cmath
import math
import time

import numpy as np
import pytest
from mpmath import mp

from conftest import ACCEPTANCE_LINES
from hypsaddle import coalescence as co
from hypsaddle.cli import emit_table, load_reference
from hypsaddle.coeffs import explicit_c12, local_expansions, wojdylo_c
from hypsaddle.expansion import G_asymptotic, G_exact, evaluate
from hypsaddle.legendre import LegendreArgs, legendre_P, legendre_P_coalescence
from hypsaddle.numerics import Series, series_compose, series_exp, series_log, series_revert_root
from hypsaddle.oracle import exact_half, oracle
from hypsaddle.phase import Params, double_points, psi_derivs_z, saddles
from hypsaddle.regions import stokes_crossing, trace_anti_stokes

TABLE2_TYPO_CELL = ("-0.75", "1")


def report(n, ok, detail):
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} ({detail})"
    print("\n" + line)
    ACCEPTANCE_LINES.append(line)
    return ok


def _rel(a, b):
    return float(abs(a - b) / abs(b))


def test_criterion_1_table1():
    t0 = time.perf_counter()
    cells, _ = emit_table(1)
    elapsed = time.perf_counter() - t0
    corner = next(c for c in cells if (c.row, c.col) == ("0", "0"))
    rest = [c for c in cells if c is not corner]
    bad = [(c.row, c.col, round(c.deviation(), 4)) for c in rest if c.deviation() > 0.05]
    ok = len(cells) == 30 and not bad and corner.status in ("PASS", "FLAG") and elapsed < 10
    detail = f"29 cells within 5%: {not bad}, corner {corner.status} (dev {corner.deviation():.3g}), {elapsed:.2f} s"
    assert report(1, ok, detail), bad


def _table2_cells():
    cells, _ = emit_table(2)
    return [c for c in cells if c.reference is not None]


def _table2_check(cells, skip=()):
    bad = []
    for c in cells:
        if (c.row, c.col) in skip:
            continue
        if (c.row, c.col) == ("1", "0.25"):
            if not (c.region.startswith("NearCoalescence") and abs(c.computed.real / 7.8e-3 - 1) <= 0.5):
                bad.append((c.row, c.col, c.computed.real, c.region))
        elif c.deviation() > 0.05:
            bad.append((c.row, c.col, round(c.deviation(), 4)))
    return bad


@pytest.mark.xfail(strict=True, reason="reference cell (-0.75 pi, 1.0) reads 4.681e-08; computed 3.681e-08 (see decisions ledger)")
def test_criterion_2_table2():
    cells = _table2_cells()
    bad = _table2_check(cells)
    assert report(2, len(cells) == 46 and not bad, f"{len(cells)} cells, out of tolerance: {bad}"), bad


def test_table2_other_cells():
    """Every reference table 2 cell except the suspect one, including the blow-up cell."""
    cells = _table2_cells()
    assert len(cells) == 46
    assert _table2_check(cells, skip=(TABLE2_TYPO_CELL,)) == []


def test_criterion_3_table3():
    ref = {int(r): v for (t, r, _), v in load_reference().items() if t == 3}
    got = co.calB_coeffs(1, 10, scaled=True)
    worst = max(max(abs(complex(got[m]).real - v.real), abs(complex(got[m]).imag - v.imag)) for m, v in ref.items())
    ok = sorted(ref) == [0, 1, 3, 4, 6, 7, 9, 10] and worst < 5e-10
    assert report(3, ok, f"(t_d - 1) B_m, max abs deviation {worst:.2e}")


def test_criterion_4_table4():
    ref = {(int(r), c): v for (t, r, c), v in load_reference().items() if t == 4}
    zd = double_points(1)[0]
    worst = {"asymptotic": 0.0, "exact": 0.0}
    for lam in (10, 20, 40, 60, 80, 100):
        got = {"asymptotic": complex(co.F_at_coalescence(lam, 1, 10)), "exact": complex(oracle(lam, 1, zd))}
        for key, v in got.items():
            r = ref[(lam, key)]
            worst[key] = max(worst[key], abs(v.real - r.real), abs(v.imag - r.imag))
    ok = worst["asymptotic"] < 1e-9 and worst["exact"] < 1e-11
    assert report(4, ok, f"max abs deviation asymptotic {worst['asymptotic']:.2e}, exact {worst['exact']:.2e}")


def test_criterion_5_closed_form_half():
    worst = 0.0
    with mp.workdps(40):
        for alpha in (0.5, 1, 2):
            for lam in range(10, 101, 10):
                worst = max(worst, _rel(oracle(lam, alpha, 0.5), exact_half(lam, alpha)))
    assert report(5, worst < 1e-20, f"30 cases, max relative difference {worst:.2e}")


def test_criterion_6_wojdylo_vs_explicit():
    worst, n = 0.0, 0
    with mp.workdps(32):
        for alpha in (0.5, 1.0, 2.0, 3.0):
            for r, th in ((0.3, 0.4), (0.6, -0.7), (0.9, 2.2), (1.3, -2.5), (0.5, 3.0)):
                z = r * cmath.exp(1j * th)
                n += 1
                p = Params(alpha, 1.0, z)
                for s in saddles(z, alpha):
                    le = local_expansions(s, p, 4)
                    c1, c2 = explicit_c12(s, p)
                    worst = max(worst, _rel(wojdylo_c(le, 1), c1), _rel(wojdylo_c(le, 2), c2))
    assert report(6, n == 20 and worst < 1e-12, f"{n} points, both saddles, max relative difference {worst:.2e}")


def test_criterion_7_stokes_landmark():
    theta = cmath.phase(stokes_crossing(1.0, 0.1)) / math.pi
    assert report(7, abs(theta - 0.46292) <= 5e-4, f"theta/pi = {theta:.6f}")


def test_criterion_8_double_points():
    zm, zp = (float(x) for x in double_points(1))
    exact = (1 - math.sqrt(2)) / 2
    ok_zd = abs(zm - exact) <= 2 * math.ulp(exact)
    curve = trace_anti_stokes(1.0)
    ends = sorted([curve.points[0], curve.points[-1]], key=lambda c: c.real)
    d = max(abs(ends[0] - zm), abs(ends[1] - zp))
    assert report(8, ok_zd and d < 1e-6, f"z_d^- = {zm!r}, anti-Stokes endpoint distance {d:.2e}")


def test_criterion_9_prefactor():
    exact = G_exact(80, 1)
    errs = [_rel(G_asymptotic(80, 1, K), exact) for K in range(4)]
    ok = all(b < a for a, b in zip(errs, errs[1:])) and errs[3] < 1e-6
    assert report(9, ok, "errors K=0..3: " + ", ".join(f"{e:.2e}" for e in errs))


def _property_checks():
    out = {}
    rng = np.random.default_rng(2024)
    with mp.workdps(40):
        worst = 0.0
        for _ in range(50):
            z = complex(rng.uniform(0.05, 1.5) * cmath.exp(1j * rng.uniform(-3.1, 3.1)))
            alpha, lam = float(rng.uniform(0.2, 3)), int(rng.integers(5, 60))
            lhs = oracle(lam, -alpha, z, 40)
            rhs = mp.conj(oracle(lam, alpha, z.conjugate(), 40))
            worst = max(worst, _rel(lhs, rhs))
        out["conjugation"] = (worst < 1e-35, worst)
    res, prod = 0.0, 0.0
    with mp.workdps(30):
        for _ in range(50):
            z = complex(rng.uniform(0.08, 1.6) * cmath.exp(1j * rng.uniform(-3.1, 3.1)))
            alpha = float(rng.uniform(0.3, 3))
            zm, zp = (complex(x) for x in double_points(alpha))
            if min(abs(z - zm), abs(z - zp)) < 0.02:
                continue
            s1, s2 = saddles(z, alpha)
            res = max(res, *(float(abs(psi_derivs_z(s.t, z, alpha, 1)[0])) for s in (s1, s2)))
            prod = max(prod, float(abs(s1.t * s2.t * (1 + 1j * alpha) * z - 1)))
    out["saddle residual"] = (res < 1e-12, res)
    out["product identity"] = (prod < 1e-12, prod)
    with mp.workdps(40):
        a = Series((1.5, mp.mpc(0.3, -1), 2, mp.mpc(0, 0.7), -0.4, 0.1))
        back = series_exp(series_log(a))
        d = max(float(abs(x - y)) for x, y in zip(back.coeffs, a.coeffs))
        out["exp(log)"] = (d < 1e-35, d)
        u = Series((0, 0, 0, mp.mpc(2, 1), mp.mpc(0.5, -0.3), 0.1, mp.mpc(0, 0.2), 0.05))
        comp = series_compose(u, series_revert_root(u))
        d = max(float(abs(c - (1 if k == 3 else 0))) for k, c in enumerate(comp.coeffs))
        out["reversion"] = (d < 1e-35, d)
    e = []
    for lam in (40, 80):
        r = evaluate(Params(1.0, lam, 0.5), s_max=2)
        e.append(_rel(r.value, oracle(lam, 1, 0.5)))
    ratio, expect = e[1] / e[0], 0.5**3.5
    out["order scaling"] = (expect / 3 < ratio < expect * 3, ratio / expect)
    with mp.workdps(64):
        std, gen = co.calB_coeffs(1, 10), co.calB_general(1, 0, 1, 1, 10)
        d = max(_rel(g, s) for m, (g, s) in enumerate(zip(gen, std)) if m % 3 != 2)
    out["reduction"] = (d < 1e-12, d)
    return out


def test_criterion_10_properties():
    checks = _property_checks()
    ok = all(v[0] for v in checks.values())
    detail = ", ".join(f"{k} {'ok' if v[0] else 'BAD'} {v[1]:.2e}" for k, v in checks.items())
    assert report(10, ok, detail)


def test_criterion_11_legendre():
    a = LegendreArgs(80, 1, 3)
    e1 = _rel(legendre_P(a, s_max=2), legendre_P(a, method="oracle"))
    b = LegendreArgs(80, 1, math.sqrt(2))
    e2 = _rel(legendre_P_coalescence(80, 1), legendre_P(b, method="oracle"))
    assert report(11, e1 < 1e-6 and e2 < 1e-5, f"x=3: {e1:.2e}, x=sqrt(2): {e2:.2e}")
