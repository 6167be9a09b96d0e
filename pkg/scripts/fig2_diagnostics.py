"""Where does the LSN deviation for 20 i.i.d. 6 dB terms come from?

    python3 scripts/fig2_diagnostics.py [--samples 10000000]

Prints, for the 20 x 6 dB i.i.d. sum, the horizontal deviation (dB) of
 * the fitted LSN against the sum's Monte Carlo ecdf,
 * the fitted LSN against its own Monte Carlo ecdf (sampler noise floor),
 * the FW lognormal against the sum's ecdf,
together with the exact and sampled means.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from lsnsum.distributions import lognormal_cdf, lsn_cdf, sn_sample
from lsnsum.lsn_fit import fit_fenton_wilkinson, fit_lsn
from lsnsum.montecarlo import EmpiricalCdf, SampleSpec, horizontal_deviation_db, sample_sln
from lsnsum.sln_model import SumModel, sum_moments

LEVELS = (0.001, 0.01, 0.1, 0.5, 0.9, 0.99, 0.999)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=10 ** 7)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    model = SumModel.from_db(np.zeros(20), np.full(20, 6.0), 0.0)
    fit = fit_lsn(model)
    fw = fit_fenton_wilkinson(model)
    ecdf = sample_sln(model, SampleSpec(args.samples, args.seed))
    rng = np.random.default_rng(args.seed)
    self_ecdf = EmpiricalCdf.from_samples(np.exp(sn_sample(fit.params, args.samples, rng)))

    rows = {
        "LSN vs sum": horizontal_deviation_db(lambda x: lsn_cdf(x, fit.params), ecdf, LEVELS),
        "LSN vs own": horizontal_deviation_db(lambda x: lsn_cdf(x, fit.params), self_ecdf, LEVELS),
        "FW vs sum": horizontal_deviation_db(lambda x: lognormal_cdf(x, fw), ecdf, LEVELS),
    }
    p = fit.params
    print(f"lambda={p.lam:.10f} eps_db={p.epsilon_db:.6f} omega_db={p.omega_db:.6f}")
    print("level      " + " ".join(f"{lv:>8g}" for lv in LEVELS))
    for name, dev in rows.items():
        print(f"{name:<10} " + " ".join(f"{d:+8.3f}" for d in dev))
    mom = sum_moments(model)
    v = ecdf.sorted_values
    se = math.sqrt(mom.d2 / v.size)
    print(f"mean exact {mom.m:.6f}  sampled {v.mean():.6f}  ({(v.mean() - mom.m) / se:+.2f} SE)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
