"""Acceptance suite: one test per criterion, each at its stated tolerance.

Every test prints a single ``[PASS]``/``[FAIL]`` line (also collected into
the terminal summary by ``conftest.py``). Run on its own with

    pytest tests/test_acceptance.py -v

or as a script: ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import math
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from lsnsum.cli import main as cli_main
from lsnsum.distributions import (
    XI,
    SkewNormalParams,
    lognormal_cdf,
    lsn_cdf,
    lsn_moments,
    sn_add_independent_normal,
    sn_cdf,
    sn_negate,
    sn_sample,
)
from lsnsum.lsn_fit import MAX_BISECTIONS, _solve, fit_fenton_wilkinson, fit_lsn, initial_guess
from lsnsum.montecarlo import SampleSpec, horizontal_deviation_db, ks_distance, sample_sln
from lsnsum.outage import MobilePlacement, NetworkConfig, outage_horizontal_gap_db, sinr_db_samples
from lsnsum.sln_model import SumModel, precision_analysis, sum_moments
from lsnsum.special_fn import owen_t, std_normal_cdf, std_normal_quantile

SCEN = Path(__file__).resolve().parents[1] / "scenarios"
RESULTS: dict[int, str] = {}

GRID_N = (1, 2, 4, 8, 12, 20)
GRID_SIGMA_DB = (1.0, 3.0, 6.0, 9.0, 12.0)
GRID_RHO = (0.0, 0.3, 0.7, 0.9)
CCDF_LEVELS = (0.9, 0.99, 0.999, 0.9999)


class Outcome:
    def __init__(self):
        self.ok = True
        self.detail = ""


@contextmanager
def criterion(num: int, title: str, limit_s: float):
    out = Outcome()
    t0 = time.perf_counter()
    yield out
    dt = time.perf_counter() - t0
    if dt >= limit_s:
        out.ok = False
        out.detail += f"; runtime {dt:.1f}s over {limit_s:g}s"
    line = f"[{'PASS' if out.ok else 'FAIL'}] criterion {num:>2}: {title}: {out.detail} ({dt:.1f}s)"
    RESULTS[num] = line
    print(line)
    assert out.ok, line


def equi_db(n, sigma_db, rho, mu_db=0.0):
    return SumModel.from_db(np.full(n, mu_db), np.full(n, sigma_db), rho)


def test_criterion_01_identity_reduction():
    with criterion(1, "N=1 identity reduction", 1.0) as c:
        worst = 0.0
        for mu_db, sigma_db in itertools.product((0.0, 6.0, -6.0), GRID_SIGMA_DB):
            p = fit_lsn(SumModel.from_db([mu_db], [sigma_db])).params
            err = max(abs(p.lam), abs(p.epsilon_db - mu_db), abs(p.omega_db - sigma_db))
            worst = max(worst, err)
        c.ok = worst <= 1e-9
        c.detail = f"max |error| {worst:.2e} (tol 1e-9)"


def test_criterion_02_solver_contract():
    with criterion(2, "solver contract over the grid", 10.0) as c:
        worst_res = worst_mean = worst_cv2 = 0.0
        max_steps = 0
        min_lam = math.inf
        for n, sdb, rho in itertools.product(GRID_N, GRID_SIGMA_DB, GRID_RHO):
            model = equi_db(n, sdb, rho)
            pa = precision_analysis(model)
            mom = sum_moments(model)
            lam, steps = _solve(mom.cv2, pa.sum_b_tilde, initial_guess(pa))
            fit = fit_lsn(model)
            lm = lsn_moments(fit.params)
            worst_res = max(worst_res, fit.residual)
            worst_mean = max(worst_mean, abs(lm.mean / mom.m - 1))
            worst_cv2 = max(worst_cv2, abs(lm.cv2 / mom.cv2 - 1))
            max_steps = max(max_steps, steps)
            min_lam = min(min_lam, lam)
        c.ok = (worst_res <= 1e-10 and max_steps <= MAX_BISECTIONS and min_lam >= 0
                and worst_mean <= 1e-9 and worst_cv2 <= 1e-9)
        c.detail = (f"residual {worst_res:.1e}, steps {max_steps}, min lambda {min_lam:.3g}, "
                    f"mean err {worst_mean:.1e}, cv2 err {worst_cv2:.1e}")


def test_criterion_03_fig2_reproduction():
    with criterion(3, "N=20 i.i.d. 6 dB |dev| <= 0.1 dB", 120.0) as c:
        model = equi_db(20, 6.0, 0.0)
        fit = fit_lsn(model)
        ecdf = sample_sln(model, SampleSpec(10 ** 7, seed=1))
        levels = (0.01, 0.1, 0.5, 0.9, 0.99, 0.999)
        dev = horizontal_deviation_db(lambda x: lsn_cdf(x, fit.params), ecdf, levels)
        worst = max(abs(d) for d in dev)
        c.ok = worst <= 0.1
        c.detail = "dev dB " + ", ".join(f"{p:g}:{d:+.3f}" for p, d in zip(levels, dev))


def test_criterion_04_correlated_tails():
    with criterion(4, "6 dB rho=0.9 CCDF tails <= 0.15 dB", 300.0) as c:
        parts, worst = [], 0.0
        for n in (2, 8, 20):
            model = equi_db(n, 6.0, 0.9)
            fit = fit_lsn(model)
            ecdf = sample_sln(model, SampleSpec(10 ** 7, seed=1))
            dev = horizontal_deviation_db(lambda x: lsn_cdf(x, fit.params), ecdf, CCDF_LEVELS)
            m = max(abs(d) for d in dev)
            worst = max(worst, m)
            parts.append(f"N={n}:{m:.3f}")
        c.ok = worst <= 0.15
        c.detail = "max |dev| dB " + ", ".join(parts)


def test_criterion_05_baseline_ordering():
    with criterion(5, "9 dB rho=0.3 LSN beats FW on CCDF tails", 300.0) as c:
        parts, ok = [], True
        for n in (2, 8, 20):
            model = equi_db(n, 9.0, 0.3)
            fit, fw = fit_lsn(model), fit_fenton_wilkinson(model)
            ecdf = sample_sln(model, SampleSpec(10 ** 7, seed=1))
            lsn = max(abs(d) for d in horizontal_deviation_db(lambda x: lsn_cdf(x, fit.params), ecdf,
                                                              CCDF_LEVELS))
            fwd = max(abs(d) for d in horizontal_deviation_db(lambda x: lognormal_cdf(x, fw), ecdf,
                                                              CCDF_LEVELS))
            ok &= lsn < fwd
            parts.append(f"N={n}: LSN {lsn:.3f} vs FW {fwd:.3f}")
        c.ok = ok
        c.detail = "; ".join(parts)


def test_criterion_06_sherman_morrison():
    with criterion(6, "equicorrelation oracle", 1.0) as c:
        worst = 0.0
        for n, sdb, rho in itertools.product(GRID_N, GRID_SIGMA_DB, GRID_RHO):
            s = sdb * XI
            got = precision_analysis(equi_db(n, sdb, rho)).sum_b_tilde
            expect = n / (s * s * (1 + (n - 1) * rho))
            worst = max(worst, abs(got / expect - 1))
        c.ok = worst <= 1e-9
        c.detail = f"max rel err {worst:.1e} (tol 1e-9)"


def test_criterion_07_owen_t_identities():
    with criterion(7, "Owen's T identities", 5.0) as c:
        h = np.linspace(-6, 6, 241)
        a = np.linspace(-5, 5, 201)
        hh, aa = np.meshgrid(h, a)
        t = owen_t(hh, aa)
        p = std_normal_cdf(h)
        errs = {
            "T(h,0)": np.max(np.abs(owen_t(h, np.zeros_like(h)))),
            "T(0,a)": np.max(np.abs(owen_t(np.zeros_like(a), a) - np.arctan(a) / (2 * math.pi))),
            "T(h,1)": np.max(np.abs(owen_t(h, np.ones_like(h)) - 0.5 * p * (1 - p))),
            "odd a": np.max(np.abs(owen_t(hh, -aa) + t)),
            "even h": np.max(np.abs(owen_t(-hh, aa) - t)),
        }
        worst = max(errs.values())
        c.ok = worst <= 1e-13
        c.detail = ", ".join(f"{k} {v:.1e}" for k, v in errs.items())


def test_criterion_08_sn_closure():
    with criterion(8, "normal-minus-SN closure KS <= 0.002", 30.0) as c:
        worst, n = 0.0, 10 ** 6
        rng = np.random.default_rng(20240101)
        for lam, ratio in itertools.product((0.5, 2.0, 5.0), (0.5, 1.0, 2.0)):
            p = SkewNormalParams(lam, 0.3, 1.2)
            s = ratio * p.omega_nat
            diff = sn_add_independent_normal(sn_negate(p), -0.5, s)
            x = np.sort(-0.5 + s * rng.standard_normal(n) - sn_sample(p, n, rng))
            worst = max(worst, ks_distance(x, sn_cdf(x, diff)))
        c.ok = worst <= 0.002
        c.detail = f"max KS {worst:.5f} over 9 cases (n=1e6)"


def test_criterion_09_outage():
    with criterion(9, "outage gap <= 0.3 dB for p in [1e-3, 0.9]", 600.0) as c:
        levels = np.geomspace(1e-3, 0.9, 40)
        parts, worst = [], 0.0
        for sigma_db, r in itertools.product((3.0, 6.0), (1.0, 0.5)):
            cfg = NetworkConfig(cell_range_km=1.0, rings=18, eta=3.0, sigma_db=sigma_db)
            mob = MobilePlacement.relative(cfg, r)
            samples = sinr_db_samples(cfg, mob, SampleSpec(10 ** 6, seed=1))
            g = np.max(np.abs(outage_horizontal_gap_db(cfg, mob, levels, samples)))
            worst = max(worst, g)
            parts.append(f"sigma={sigma_db:g} r={r:g}Rc:{g:.3f}")
        c.ok = worst <= 0.3
        c.detail = "max gap dB " + ", ".join(parts)


def test_criterion_10_determinism(tmp_path, capsys):
    with criterion(10, "compare byte-identical across --threads", 120.0) as c:
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        base = ["compare", str(SCEN / "fig2.toml"), "--seed", "42"]
        codes = (cli_main(base + ["--out", str(a), "--threads", "1"]),
                 cli_main(base + ["--out", str(b), "--threads", "4"]))
        capsys.readouterr()
        same = a.read_bytes() == b.read_bytes()
        c.ok = codes == (0, 0) and same
        c.detail = f"exit codes {codes}, identical={same}, {a.stat().st_size} bytes"


def test_criterion_11_tail_slope():
    with criterion(11, "left-tail slope within 15% of sqrt(sum B~)", 120.0) as c:
        model = equi_db(2, 3.0, 0.5)
        target = precision_analysis(model).left_slope
        n = 10 ** 7
        v = sample_sln(model, SampleSpec(n, seed=1)).sorted_values
        probs = np.geomspace(1e-5, 1e-3, 50)
        k = np.ceil(probs * n).astype(np.int64)
        x = np.log(v[k - 1])
        y = np.array([std_normal_quantile(p) for p in k / n])
        slope = np.polyfit(x, y, 1)[0]
        rel = abs(slope / target - 1)
        c.ok = rel <= 0.15
        c.detail = f"slope {slope:.4f} vs {target:.4f} (rel {rel:.3f}, tol 0.15)"


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
