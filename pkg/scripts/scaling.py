"""Psi(alpha) at fixed k and its fitted exponent.

    python3 scripts/scaling.py                      # k = 84, alpha in 1e3..1e5, nonlocal on and off
    python3 scripts/scaling.py --k 2 --alphas 1e4,1e5,1e6,1e7

Writes a CSV table and an SVG log-log plot per run under --out.
"""
import argparse
import time
from pathlib import Path

import numpy as np

from vortexps.cli import csv_text, write_atomic
from vortexps.resolvent import fit_scaling, sweep_lambda
from vortexps.svg import line_plot


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--k", type=int, default=84)
    p.add_argument("--alphas", default="1e3,3e3,1e4,3e4,1e5")
    p.add_argument("--local-only", action="store_true", help="skip the run with the nonlocal term")
    p.add_argument("--out", default="runs/scripts")
    a = p.parse_args()
    alphas = [float(v) for v in a.alphas.split(",")]
    series = []
    for nl in ((False,) if a.local_only else (True, False)):
        rows = []
        for alpha in alphas:
            t0 = time.time()
            r = sweep_lambda(alpha, a.k, include_nonlocal=nl)
            rows.append((alpha, r.psi, r.nu_star, r.psi_stable, int(r.stable.sum()), len(r.nu)))
            print(f"nonlocal={nl} alpha={alpha:g} psi={r.psi:.6g} nu*={r.nu_star:.4g} "
                  f"stable={r.psi_stable} ({time.time() - t0:.0f} s)", flush=True)
        psi = np.array([r[1] for r in rows])
        slope, icpt, rms = fit_scaling(alphas, psi)
        print(f"nonlocal={nl}: exponent {slope:.4f} (1/3 = 0.3333), rms {rms:.3g}")
        tag = f"k{a.k}" + ("" if nl else "_local")
        write_atomic(Path(a.out) / f"scaling_{tag}.csv",
                     csv_text(dict(k=a.k, include_nonlocal=nl),
                              ["alpha", "psi", "nu_star", "stable", "points_stable", "points"], rows,
                              [f"exponent = {slope!r}", f"intercept = {icpt!r}", f"rms = {rms!r}"]))
        series.append(("nonlocal" if nl else "local", alphas, psi))
    ref = np.exp(icpt) * np.array(alphas) ** (1 / 3)
    series.append(("alpha^1/3 (through last fit)", alphas, ref))
    write_atomic(Path(a.out) / f"scaling_k{a.k}.svg",
                 line_plot(series, "alpha", "Psi", f"k = {a.k}", logx=True, logy=True))


if __name__ == "__main__":
    main()
