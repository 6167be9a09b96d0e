"""Run ``compare`` on every fig*.toml scenario and print a deviation table.

    python3 scripts/reproduce_figures.py --out results/ [--samples N] [--only fig2 fig6_n8]

CSV and JSON reports land in ``--out``; the table lists the worst absolute
LSN and FW horizontal deviation (dB) over each scenario's levels.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import sys
import time
from pathlib import Path

from lsnsum.cli import main as cli_main

SCEN = Path(__file__).resolve().parents[1] / "scenarios"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results", help="output directory")
    ap.add_argument("--samples", type=int, help="override the scenario sample count")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--only", nargs="*", help="scenario stems to run (default: all fig*)")
    args = ap.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stems = args.only or sorted(p.stem for p in SCEN.glob("fig*.toml"))
    print(f"{'scenario':<12} {'LSN max|dev|':>13} {'FW max|dev|':>12} {'lambda':>8} {'secs':>6}")
    for stem in stems:
        argv_c = ["compare", str(SCEN / f"{stem}.toml"), "--out", str(out / f"{stem}.csv")]
        if args.samples:
            argv_c += ["--samples", str(args.samples)]
        if args.seed is not None:
            argv_c += ["--seed", str(args.seed)]
        t0 = time.perf_counter()
        # the command echoes its JSON report; keep the table readable
        with contextlib.redirect_stdout(io.StringIO()):
            code = cli_main(argv_c)
        if code != 0:
            print(f"{stem:<12} failed with exit code {code}")
            continue
        rep = json.loads((out / f"{stem}.json").read_text())
        print(f"{stem:<12} {rep['max_abs_lsn_db']:>13.3f} {rep['max_abs_fw_db']:>12.3f} "
              f"{rep['fit']['lambda']:>8.4f} {time.perf_counter() - t0:>6.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
