"""Acceptance criteria at pinned tolerances.

Each ``test_criterion_N`` maps to one criterion; ``conftest.py`` prints a
``criterion N: PASS/FAIL`` line per criterion at the end of the run.
"""

import subprocess
import sys
from pathlib import Path

import numpy as np

from hybridsat.cv_teleport import fidelity_cv_closed, fidelity_cv_exact, numeric_fidelity
from hybridsat.direct import ChannelPair, direct_metrics, direct_state_analytic, direct_state_oracle
from hybridsat.dv_teleport import (
    FockTruncation,
    TeleportParams,
    choose_kmax,
    dv_metrics,
    sigma_of,
    teleport_dv_state,
    trace_defect,
    tuned_gain,
)
from hybridsat.fock import TruncationPolicy, trace_distance
from hybridsat.hybrid import HybridSpec, hybrid_exact
from hybridsat.sweep import Crossover, find_crossover

P40 = TruncationPolicy(dim=40)
LOSS_GRID = np.arange(0.0, 30.01, 2.0)


def _report(n, ok, detail):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, detail


def test_criterion_1_lossless_identity():
    lossless = TeleportParams.symmetric(1.0, 8.0)
    fids = {
        "direct": direct_metrics(1.0, ChannelPair(1.0, 1.0), P40)[0],
        "dv": dv_metrics(1.0, lossless)[0],
        "cv-large": fidelity_cv_closed("large", 1.5, lossless),
        "cv-small": fidelity_cv_closed("small", 0.3, lossless),
        "cv-exact": fidelity_cv_exact(1.0, lossless),
    }
    worst = max(abs(f - 1.0) for f in fids.values())
    _report(1, worst < 1e-6, f"max |F-1| = {worst:.2e}")


def test_criterion_2_direct_analytic_vs_oracle():
    grid = (0.1, 0.3, 0.5, 0.7, 1.0)
    worst = 0.0
    for alpha0 in (0.5, 1.0, 1.5, 2.0):
        psi = hybrid_exact(HybridSpec(alpha0), P40)
        for ta in grid:
            for tb in grid:
                ch = ChannelPair(ta, tb)
                d = trace_distance(direct_state_analytic(alpha0, ch, P40),
                                   direct_state_oracle(psi, ch, P40))
                worst = max(worst, d)
    _report(2, worst < 1e-10, f"max trace distance = {worst:.2e}")


def test_criterion_3_chi_self_fidelity():
    cases = (("large", 1.5), ("large", 2.0), ("small", 0.3), ("small", 0.5),
             ("exact", 0.5), ("exact", 1.0), ("exact", 2.0))
    worst = max(abs(numeric_fidelity(v, a, 0.0) - 1.0) for v, a in cases)
    _report(3, worst < 1e-8, f"max |F-1| = {worst:.2e}")


def test_criterion_4_closed_forms_vs_oracle():
    worst = 0.0
    for sigma in (0.05, 0.1, 0.3, 0.5, 1.0, 2.0):
        for a in (0.1, 0.2, 0.3, 0.4, 0.5):
            worst = max(worst, abs(fidelity_cv_closed("small", a, sigma)
                                   - numeric_fidelity("small", a, sigma)))
        for a in (1.0, 1.5, 2.0):
            worst = max(worst, abs(fidelity_cv_closed("large", a, sigma)
                                   - numeric_fidelity("large", a, sigma)))
        for a in (0.3, 0.7, 1.0, 1.5, 2.0):
            worst = max(worst, abs(fidelity_cv_exact(a, sigma) - numeric_fidelity("exact", a, sigma)))
    _report(4, worst < 1e-6, f"max |closed - oracle| = {worst:.2e}")


def test_criterion_5_crossover():
    # pinned targets: alpha0 -> (centre dB, half-width dB). The alpha0=1.2 target
    # is out of reach: at r=2.5 and 0 dB the DV teleporter gives F=0.987 < 1, so
    # direct distribution wins at zero loss and the crossover lands near 1.6 dB.
    # Only alpha0 >= 1.3 brings it under 0.5 dB. Kept failing on purpose.
    targets = {1.2: (0.0, 1.0), 1.0: (5.0, 1.0), 0.3: (7.0, 1.0)}
    found, ok = {}, True
    for alpha0, (centre, width) in targets.items():
        res = find_crossover(alpha0, 2.5)
        value = res.loss_db if isinstance(res, Crossover) else None
        found[alpha0] = value
        ok &= value is not None and abs(value - centre) <= width
    detail = ", ".join(f"alpha0={a}: {v if v is None else round(v, 2)} dB" for a, v in found.items())
    _report(5, ok, detail)


def test_criterion_6_dv_dominates_cv():
    margin = np.inf
    for alpha0 in (1.0, 1.5, 2.0):
        for r in (0.5, 2.5):
            for loss in LOSS_GRID:
                p = TeleportParams(1.0, r, ChannelPair.from_total_loss_db(loss))
                f_dv = dv_metrics(alpha0, p)[0]
                f_cv = max(fidelity_cv_closed("large", alpha0, p), fidelity_cv_exact(alpha0, p))
                margin = min(margin, f_dv - f_cv)
    gap = 0.0
    for alpha0 in (0.1, 0.3, 0.5):
        for r in (0.5, 2.5):
            for loss in LOSS_GRID:
                p = TeleportParams(1.0, r, ChannelPair.from_total_loss_db(loss))
                f_dv = dv_metrics(alpha0, p)[0]
                gap = max(gap, abs(f_dv - fidelity_cv_closed("small", alpha0, p)))
    _report(6, margin >= 0 and gap < 0.02, f"min DV-CV = {margin:.4f}, small-cat gap = {gap:.4f}")


def test_criterion_7_alpha_invariance():
    spread = 0.0
    for r, T, g in ((0.5, 0.9, 1.0), (2.5, 0.5, 1.0), (1.5, 0.3, 1.2)):
        p = TeleportParams.symmetric(T, r, g)
        fids = [dv_metrics(a, p)[0] for a in (1.0, 1.5, 2.0)]
        spread = max(spread, max(fids) - min(fids))
    _report(7, spread < 1e-10, f"max spread = {spread:.2e}")


def test_criterion_8_squeezing_saturation():
    worst = -np.inf
    for loss in LOSS_GRID:
        ch = ChannelPair.from_total_loss_db(loss)
        f3 = dv_metrics(1.0, TeleportParams(1.0, 3.0, ch))[0]
        f25 = dv_metrics(1.0, TeleportParams(1.0, 2.5, ch))[0]
        worst = max(worst, f3 - f25)
    _report(8, worst < 0.01, f"max F(r=3)-F(r=2.5) = {worst:.4f}")


def test_criterion_9_gain_tuning():
    ok, parts = True, []
    for ta, tb in ((0.9, 0.3), (0.3, 0.9), (0.8, 0.5)):
        ch = ChannelPair(ta, tb)
        f1, e1 = dv_metrics(1.5, TeleportParams(1.0, 2.5, ch))
        ft, et = dv_metrics(1.5, TeleportParams(tuned_gain(ch), 2.5, ch))
        ok &= ft >= f1 and et >= e1
        parts.append(f"({ta},{tb}) F {f1:.3f}->{ft:.3f} E {e1:.3f}->{et:.3f}")
    _report(9, ok, "; ".join(parts))


def test_criterion_10_truncation_control():
    ok, parts = True, []
    for T in (0.4, 0.5, 0.6):
        p = TeleportParams.symmetric(T, 2.5)
        k = choose_kmax(p, 1e-14)
        rho = teleport_dv_state(p, FockTruncation(k, 1e-14))
        defect = abs(1.0 - rho.trace)
        ok &= 25 <= k <= 35 and defect < 1e-14 and trace_defect(p, k) < 1e-14
        parts.append(f"T={T}: k_max={k}, defect={defect:.1e}, sigma={sigma_of(p):.3f}")
    _report(10, ok, "; ".join(parts))


def test_criterion_11_property_suite():
    tests = Path(__file__).parent
    files = [str(tests / f) for f in ("test_fock.py", "test_hybrid.py", "test_direct.py",
                                      "test_dv_teleport.py", "test_cv_teleport.py")]
    keyword = "prop or log_negativity_examples or partial_transpose_bell"
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider",
                           "-k", keyword, *files], capture_output=True, text=True)
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr
    _report(11, proc.returncode == 0, tail)
